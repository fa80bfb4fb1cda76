#pragma once

// Command-line front end.  Single-threaded orchestration; estimation
// parallelism is delegated to the basin module's worker pool.
//
// Exit codes: 0 success, 1 domain error (invalid parameters or a failed
// computation), 2 usage error.

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "basins.hpp"
#include "config.hpp"
#include "report.hpp"
#include "stability.hpp"
#include "thresholds.hpp"

namespace basinforge {

namespace detail {

/// Stream to `out` (file) or stdout when the path is empty.
template <class Fn>
void with_output(const std::string& path, Fn&& fn) {
    if (path.empty()) {
        fn(std::cout);
        return;
    }
    std::ofstream os(path);
    if (!os) throw std::domain_error("cannot open output file: " + path);
    fn(os);
}

inline void parse_mesh(const std::string& text, SamplingSpec& sampling) {
    std::size_t x = text.find('x');
    if (x == std::string::npos || x == 0 || x + 1 >= text.size())
        throw CLI::ValidationError("--mesh", "expected WxH, e.g. 200x100");
    sampling.mode = SamplingMode::mesh;
    sampling.mesh_w = std::stoi(text.substr(0, x));
    sampling.mesh_h = std::stoi(text.substr(x + 1));
}

/// Find an attractor with the requested label by classifying successive
/// sample states until one converges onto it.
inline Attractor find_tracked(const std::string& label, const PendulumParams& params,
                              double gamma, const SamplingSpec& sampling,
                              const ClassifyPolicy& policy) {
    AttractorLibrary lib(policy.match_tol, policy.region_radius, policy.merge_tol);
    DampingSchedule schedule = DampingSchedule::constant(gamma);
    long probes = std::min<long>(sampling.total(), 500);
    for (long i = 0; i < probes; ++i) {
        classify_trajectory(sampling.sample(i), params, schedule, lib, policy);
        for (const auto& e : lib.snapshot())
            if (e->label == label) return *e;
    }
    throw std::domain_error("no attractor labelled '" + label +
                            "' found at the scan start damping");
}

inline int dispatch(const RunConfig& cfg) {
    if (cfg.command == "thresholds") {
        if (cfg.qmax < 2) throw std::domain_error("--qmax must be at least 2");
        with_output(cfg.out, [&](std::ostream& os) {
            thresholds_csv(os, cfg.params.alpha, cfg.qmax);
        });
        return 0;
    }
    if (cfg.command == "stability") {
        cfg.params.validate();
        double gamma = cfg.schedule.gamma1;
        FloquetResult down = floquet(cfg.params, gamma, EquilibriumPoint::down);
        FloquetResult up = floquet(cfg.params, gamma, EquilibriumPoint::up);
        auto word = [](const FloquetResult& f) {
            return f.verdict == FloquetVerdict::stable
                       ? "stable"
                       : (f.verdict == FloquetVerdict::unstable ? "unstable" : "marginal");
        };
        with_output(cfg.out, [&](std::ostream& os) {
            os << "down: " << word(down) << "; up: " << word(up);
            if (cfg.params.orientation == Orientation::downward &&
                cfg.params.beta < cfg.params.alpha) {
                double bound = global_attraction_bound(cfg.params.alpha, cfg.params.beta);
                os << "; bound = " << fixed(bound, 6);
            }
            os << '\n';
        });
        return 0;
    }
    if (cfg.command == "basins") {
        BasinReport r = estimate_basins(cfg.params, cfg.schedule, cfg.sampling, cfg.policy);
        basin_summary(std::cerr, r);
        with_output(cfg.out, [&](std::ostream& os) {
            os << basin_report_json(r, cfg).dump(2) << '\n';
        });
        return 0;
    }
    if (cfg.command == "sweep") {
        if (cfg.sweep_t0.empty() == cfg.sweep_gamma.empty())
            throw std::domain_error(
                "sweep needs exactly one of --t0-list and --gamma-list");
        std::vector<DampingSchedule> family;
        for (double t0 : cfg.sweep_t0)
            family.push_back({cfg.schedule.gamma0, cfg.schedule.gamma1, t0});
        for (double g : cfg.sweep_gamma) family.push_back(DampingSchedule::constant(g));
        auto reports = sweep(cfg.params, family, cfg.sampling, cfg.policy);
        for (const BasinReport& r : reports) basin_summary(std::cerr, r);
        with_output(cfg.out, [&](std::ostream& os) { sweep_csv(os, reports); });
        return 0;
    }
    if (cfg.command == "scan") {
        double gamma_from = cfg.schedule.gamma1;
        Attractor tracked =
            find_tracked(cfg.scan_track, cfg.params, gamma_from, cfg.sampling, cfg.policy);
        ScanResult res = bifurcation_scan(cfg.params, tracked, gamma_from, cfg.scan_to,
                                          cfg.scan_step, cfg.policy);
        with_output(cfg.out, [&](std::ostream& os) { scan_report(os, res); });
        return 0;
    }
    if (cfg.command == "integrate") {
        cfg.params.validate();
        cfg.schedule.validate();
        if (cfg.periods < 1) throw std::domain_error("--periods must be positive");
        PendulumIntegrator integ(cfg.params, cfg.schedule, cfg.policy.integrator);
        integ.reset(0.0, cfg.start);
        with_output(cfg.out, [&](std::ostream& os) {
            os << "tau,x,y\n";
            char buf[128];
            auto emit = [&]() {
                std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", integ.tau(),
                              integ.state().x, integ.state().y);
                os << buf;
            };
            emit();
            if (cfg.schedule.T0 > 0.0) integ.advance_to(cfg.schedule.T0);
            double base = integ.tau();
            for (long k = 1; k <= cfg.periods; ++k) {
                integ.advance_to(base + 2.0 * M_PI * static_cast<double>(k));
                emit();
            }
        });
        return 0;
    }
    throw std::domain_error("unknown command: " + cfg.command);
}

}  // namespace detail

/// Parse arguments (optionally seeded from a --config JSON file; explicit
/// flags override file values), dispatch, and map failures to exit codes.
inline int parse_and_dispatch(int argc, const char* const* argv) {
    RunConfig cfg;
    // Pre-scan for --config so file values become the defaults that flags
    // then override.
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") {
            std::ifstream in(argv[i + 1]);
            if (!in) {
                std::cerr << "cannot read config file: " << argv[i + 1] << '\n';
                return 1;
            }
            try {
                nlohmann::json j;
                in >> j;
                cfg = j.get<RunConfig>();
            } catch (const std::exception& e) {
                std::cerr << "bad config file: " << e.what() << '\n';
                return 1;
            }
        }
    }

    CLI::App app{"forced pendulum attractors: thresholds, stability, basins"};
    app.fallthrough();
    std::string config_path;
    app.add_option("--config", config_path, "JSON config file (flags override)");

    bool inverted = cfg.params.orientation == Orientation::inverted;
    double gamma = std::numeric_limits<double>::quiet_NaN();  // sentinel: not given
    std::string mesh_text;
    std::string t0_list, gamma_list;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--alpha", cfg.params.alpha, "mean forcing coefficient");
        sub->add_option("--beta", cfg.params.beta, "forcing modulation amplitude");
        sub->add_flag("--inverted", inverted, "upright coordinate convention");
        sub->add_option("--tau0", cfg.params.tau0, "forcing phase offset");
        sub->add_option("--gamma", gamma, "constant damping");
        sub->add_option("--gamma0", cfg.schedule.gamma0, "initial damping of the ramp");
        sub->add_option("--gamma1", cfg.schedule.gamma1, "final damping of the ramp");
        sub->add_option("--t0", cfg.schedule.T0, "ramp length in time units");
        sub->add_option("--out", cfg.out, "output path (default stdout)");
    };
    auto add_sampling = [&](CLI::App* sub) {
        sub->add_option("--n", cfg.sampling.count, "random sample count");
        sub->add_option("--mesh", mesh_text, "mesh sampling, WxH cells");
        sub->add_option("--seed", cfg.sampling.seed, "sampling seed");
        sub->add_option("--workers", cfg.policy.workers,
                        "worker threads (0: BASINFORGE_WORKERS or 1)");
        sub->add_option("--tol", cfg.policy.match_tol, "trajectory matching tolerance");
        sub->add_option("--budget", cfg.policy.budget_periods,
                        "post-ramp classification budget in periods");
    };

    CLI::App* thresholds = app.add_subcommand("thresholds", "subharmonic threshold table");
    thresholds->add_option("--alpha", cfg.params.alpha, "mean forcing coefficient");
    thresholds->add_option("--qmax", cfg.qmax, "largest subharmonic order");
    thresholds->add_option("--out", cfg.out, "output path (default stdout)");

    CLI::App* stability = app.add_subcommand("stability", "equilibrium stability verdicts");
    add_common(stability);

    CLI::App* basins = app.add_subcommand("basins", "basin fraction estimate");
    add_common(basins);
    add_sampling(basins);

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "basin estimates over a family");
    add_common(sweep_cmd);
    add_sampling(sweep_cmd);
    sweep_cmd->add_option("--t0-list", t0_list, "comma-separated ramp lengths");
    sweep_cmd->add_option("--gamma-list", gamma_list, "comma-separated damping values");

    CLI::App* scan = app.add_subcommand("scan", "track an attractor across damping");
    add_common(scan);
    add_sampling(scan);
    scan->add_option("--track", cfg.scan_track, "label of the attractor to follow");
    scan->add_option("--to", cfg.scan_to, "damping value to scan to");
    scan->add_option("--step", cfg.scan_step, "scan step");

    CLI::App* integrate = app.add_subcommand("integrate", "single-trajectory dump");
    add_common(integrate);
    integrate->add_option("--x0", cfg.start.x, "initial angle");
    integrate->add_option("--y0", cfg.start.y, "initial velocity");
    integrate->add_option("--periods", cfg.periods, "forcing periods to record");

    app.require_subcommand(0, 1);

    try {
        app.parse(argc, const_cast<char**>(argv));
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    // A subcommand on the command line wins; otherwise the config document
    // may already carry one (replay mode).
    std::vector<CLI::App*> subs = app.get_subcommands();
    if (!subs.empty()) cfg.command = subs.front()->get_name();
    if (cfg.command.empty()) {
        std::cerr << app.help();
        return 2;
    }

    try {
        cfg.params.orientation = inverted ? Orientation::inverted : Orientation::downward;
        if (!std::isnan(gamma)) cfg.schedule = DampingSchedule::constant(gamma);
        if (!mesh_text.empty()) detail::parse_mesh(mesh_text, cfg.sampling);
        auto parse_list = [](const std::string& text) {
            std::vector<double> vals;
            std::stringstream ss(text);
            std::string item;
            while (std::getline(ss, item, ','))
                if (!item.empty()) vals.push_back(std::stod(item));
            return vals;
        };
        if (!t0_list.empty()) cfg.sweep_t0 = parse_list(t0_list);
        if (!gamma_list.empty()) cfg.sweep_gamma = parse_list(gamma_list);

        cfg.params.validate();
        cfg.schedule.validate();
        cfg.sampling.validate();
        cfg.policy.validate();
        return detail::dispatch(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace basinforge
