#pragma once

// Run configuration: everything a command needs, serializable to a single
// JSON document.  A run's configuration is embedded verbatim in its output,
// so any report can be reproduced bit-identically by feeding the embedded
// document back in.  Doubles survive the round trip exactly (shortest
// round-trip serialization).

#include <string>
#include <vector>

#include <json.hpp>

#include "basins.hpp"
#include "integrate.hpp"
#include "model.hpp"

namespace basinforge {

struct RunConfig {
    std::string command;  ///< thresholds|stability|basins|sweep|scan|integrate
    PendulumParams params;
    DampingSchedule schedule = DampingSchedule::constant(0.03);
    SamplingSpec sampling;
    ClassifyPolicy policy;
    std::string out;  ///< output path; empty = stdout

    // thresholds
    int qmax = 12;

    // sweep: family of schedules, either ramp lengths (shared gamma0/gamma1)
    // or constant damping values; exactly one list may be non-empty.
    std::vector<double> sweep_t0;
    std::vector<double> sweep_gamma;

    // scan
    double scan_to = 0.28;
    double scan_step = 0.002;
    std::string scan_track = "PR";  ///< label of the attractor to follow

    // integrate
    State start{1.0, 0.0};
    long periods = 100;
};

// --- JSON serializers -------------------------------------------------------

inline void to_json(nlohmann::json& j, const State& s) { j = {s.x, s.y}; }
inline void from_json(const nlohmann::json& j, State& s) {
    s.x = j.at(0).get<double>();
    s.y = j.at(1).get<double>();
}

inline void to_json(nlohmann::json& j, const PendulumParams& p) {
    j = {{"alpha", p.alpha},
         {"beta", p.beta},
         {"orientation", p.orientation == Orientation::inverted ? "inverted" : "downward"},
         {"tau0", p.tau0}};
}
inline void from_json(const nlohmann::json& j, PendulumParams& p) {
    PendulumParams d;
    p.alpha = j.value("alpha", d.alpha);
    p.beta = j.value("beta", d.beta);
    p.orientation = j.value("orientation", std::string("downward")) == "inverted"
                        ? Orientation::inverted
                        : Orientation::downward;
    p.tau0 = j.value("tau0", d.tau0);
}

inline void to_json(nlohmann::json& j, const DampingSchedule& s) {
    j = {{"gamma0", s.gamma0}, {"gamma1", s.gamma1}, {"T0", s.T0}};
}
inline void from_json(const nlohmann::json& j, DampingSchedule& s) {
    DampingSchedule d = DampingSchedule::constant(0.03);
    s.gamma0 = j.value("gamma0", d.gamma0);
    s.gamma1 = j.value("gamma1", d.gamma1);
    s.T0 = j.value("T0", d.T0);
}

inline void to_json(nlohmann::json& j, const SamplingSpec& s) {
    j = {{"mode", s.mode == SamplingMode::mesh ? "mesh" : "random"},
         {"count", s.count},
         {"mesh_w", s.mesh_w},
         {"mesh_h", s.mesh_h},
         {"x_min", s.x_min},
         {"x_max", s.x_max},
         {"y_min", s.y_min},
         {"y_max", s.y_max},
         {"seed", s.seed}};
}
inline void from_json(const nlohmann::json& j, SamplingSpec& s) {
    SamplingSpec d;
    s.mode = j.value("mode", std::string("random")) == "mesh" ? SamplingMode::mesh
                                                              : SamplingMode::random;
    s.count = j.value("count", d.count);
    s.mesh_w = j.value("mesh_w", d.mesh_w);
    s.mesh_h = j.value("mesh_h", d.mesh_h);
    s.x_min = j.value("x_min", d.x_min);
    s.x_max = j.value("x_max", d.x_max);
    s.y_min = j.value("y_min", d.y_min);
    s.y_max = j.value("y_max", d.y_max);
    s.seed = j.value("seed", d.seed);
}

inline void to_json(nlohmann::json& j, const IntegratorSpec& s) {
    j = {{"method", s.method == Method::taylor ? "taylor" : "rk_adaptive"},
         {"rel_tol", s.rel_tol},
         {"abs_tol", s.abs_tol},
         {"max_step", s.max_step},
         {"taylor_order", s.taylor_order},
         {"taylor_renormalize", s.taylor_renormalize}};
}
inline void from_json(const nlohmann::json& j, IntegratorSpec& s) {
    IntegratorSpec d;
    s.method = j.value("method", std::string("rk_adaptive")) == "taylor"
                   ? Method::taylor
                   : Method::rk_adaptive;
    s.rel_tol = j.value("rel_tol", d.rel_tol);
    s.abs_tol = j.value("abs_tol", d.abs_tol);
    s.max_step = j.value("max_step", d.max_step);
    s.taylor_order = j.value("taylor_order", d.taylor_order);
    s.taylor_renormalize = j.value("taylor_renormalize", d.taylor_renormalize);
}

inline void to_json(nlohmann::json& j, const ClassifyPolicy& p) {
    j = {{"match_tol", p.match_tol},
         {"merge_tol", p.merge_tol},
         {"fp_tol", p.fp_tol},
         {"confirm_periods", p.confirm_periods},
         {"max_period", p.max_period},
         {"budget_periods", p.budget_periods},
         {"region_radius", p.region_radius},
         {"region_extent", p.region_extent},
         {"region_window", p.region_window},
         {"region_confirm", p.region_confirm},
         {"refine_tol", p.refine_tol},
         {"refine_burn_periods", p.refine_burn_periods},
         {"integrator", p.integrator},
         {"workers", p.workers}};
}
inline void from_json(const nlohmann::json& j, ClassifyPolicy& p) {
    ClassifyPolicy d;
    p.match_tol = j.value("match_tol", d.match_tol);
    p.merge_tol = j.value("merge_tol", d.merge_tol);
    p.fp_tol = j.value("fp_tol", d.fp_tol);
    p.confirm_periods = j.value("confirm_periods", d.confirm_periods);
    p.max_period = j.value("max_period", d.max_period);
    p.budget_periods = j.value("budget_periods", d.budget_periods);
    p.region_radius = j.value("region_radius", d.region_radius);
    p.region_extent = j.value("region_extent", d.region_extent);
    p.region_window = j.value("region_window", d.region_window);
    p.region_confirm = j.value("region_confirm", d.region_confirm);
    p.refine_tol = j.value("refine_tol", d.refine_tol);
    p.refine_burn_periods = j.value("refine_burn_periods", d.refine_burn_periods);
    if (j.contains("integrator")) p.integrator = j.at("integrator").get<IntegratorSpec>();
    p.workers = j.value("workers", d.workers);
}

inline void to_json(nlohmann::json& j, const RunConfig& c) {
    j = {{"command", c.command},
         {"params", c.params},
         {"schedule", c.schedule},
         {"sampling", c.sampling},
         {"policy", c.policy},
         {"out", c.out},
         {"qmax", c.qmax},
         {"sweep_t0", c.sweep_t0},
         {"sweep_gamma", c.sweep_gamma},
         {"scan_to", c.scan_to},
         {"scan_step", c.scan_step},
         {"scan_track", c.scan_track},
         {"start", c.start},
         {"periods", c.periods}};
}
inline void from_json(const nlohmann::json& j, RunConfig& c) {
    RunConfig d;
    c.command = j.value("command", d.command);
    if (j.contains("params")) c.params = j.at("params").get<PendulumParams>();
    if (j.contains("schedule")) c.schedule = j.at("schedule").get<DampingSchedule>();
    if (j.contains("sampling")) c.sampling = j.at("sampling").get<SamplingSpec>();
    if (j.contains("policy")) c.policy = j.at("policy").get<ClassifyPolicy>();
    c.out = j.value("out", d.out);
    c.qmax = j.value("qmax", d.qmax);
    c.sweep_t0 = j.value("sweep_t0", d.sweep_t0);
    c.sweep_gamma = j.value("sweep_gamma", d.sweep_gamma);
    c.scan_to = j.value("scan_to", d.scan_to);
    c.scan_step = j.value("scan_step", d.scan_step);
    c.scan_track = j.value("scan_track", d.scan_track);
    if (j.contains("start")) c.start = j.at("start").get<State>();
    c.periods = j.value("periods", d.periods);
}

}  // namespace basinforge
