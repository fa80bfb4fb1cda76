// Configuration serialization and report formatting.
//
// The configuration document is the reproducibility contract: every double
// must survive JSON round-trips bitwise, and absent fields must fall back to
// defaults so hand-written configs stay short.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <sstream>

#include <basinforge/config.hpp>
#include <basinforge/report.hpp>

using namespace basinforge;
using nlohmann::json;

namespace {

bool same_bits(double a, double b) {
    return std::memcmp(&a, &b, sizeof a) == 0;
}

RunConfig awkward_config() {
    RunConfig c;
    c.command = "basins";
    c.params.alpha = 0.1;
    c.params.beta = 0.545;
    c.params.orientation = Orientation::inverted;
    c.params.tau0 = 0.1 + 0.2;  // 0.30000000000000004
    c.schedule = {0.2725, 0.2, 1000.0};
    c.sampling.mode = SamplingMode::mesh;
    c.sampling.mesh_w = 137;
    c.sampling.mesh_h = 71;
    c.sampling.count = 12345;
    c.sampling.x_min = -3.0 * std::atan(1.0);  // not exactly representable intent
    c.sampling.y_max = 4.000000000000001;
    c.sampling.seed = 0xDEADBEEFCAFEull;
    c.policy.match_tol = 1e-3 * (1.0 + 1e-15);
    c.policy.workers = 7;
    c.policy.integrator.method = Method::taylor;
    c.policy.integrator.rel_tol = 1e-11;
    c.policy.integrator.taylor_order = 24;
    c.policy.integrator.taylor_renormalize = false;
    c.out = "/tmp/report.json";
    c.qmax = 8;
    c.sweep_t0 = {0.0, 100.0, 1000.0};
    c.scan_to = 0.2694;
    c.scan_step = 5e-4;
    c.scan_track = "DO4";
    c.start = {-0.938044, 1.479505};
    c.periods = 4096;
    return c;
}

}  // namespace

TEST_CASE("config JSON round-trip preserves every field bitwise") {
    RunConfig c = awkward_config();
    json j = c;
    // Through text, as a file round-trip would go.
    RunConfig r = json::parse(j.dump()).get<RunConfig>();

    CHECK(r.command == c.command);
    CHECK(same_bits(r.params.alpha, c.params.alpha));
    CHECK(same_bits(r.params.beta, c.params.beta));
    CHECK(r.params.orientation == c.params.orientation);
    CHECK(same_bits(r.params.tau0, c.params.tau0));
    CHECK(same_bits(r.schedule.gamma0, c.schedule.gamma0));
    CHECK(same_bits(r.schedule.gamma1, c.schedule.gamma1));
    CHECK(same_bits(r.schedule.T0, c.schedule.T0));
    CHECK(r.sampling.mode == c.sampling.mode);
    CHECK(r.sampling.count == c.sampling.count);
    CHECK(r.sampling.mesh_w == c.sampling.mesh_w);
    CHECK(r.sampling.mesh_h == c.sampling.mesh_h);
    CHECK(same_bits(r.sampling.x_min, c.sampling.x_min));
    CHECK(same_bits(r.sampling.x_max, c.sampling.x_max));
    CHECK(same_bits(r.sampling.y_min, c.sampling.y_min));
    CHECK(same_bits(r.sampling.y_max, c.sampling.y_max));
    CHECK(r.sampling.seed == c.sampling.seed);
    CHECK(same_bits(r.policy.match_tol, c.policy.match_tol));
    CHECK(same_bits(r.policy.merge_tol, c.policy.merge_tol));
    CHECK(same_bits(r.policy.fp_tol, c.policy.fp_tol));
    CHECK(r.policy.confirm_periods == c.policy.confirm_periods);
    CHECK(r.policy.max_period == c.policy.max_period);
    CHECK(r.policy.budget_periods == c.policy.budget_periods);
    CHECK(same_bits(r.policy.region_radius, c.policy.region_radius));
    CHECK(same_bits(r.policy.region_extent, c.policy.region_extent));
    CHECK(r.policy.region_window == c.policy.region_window);
    CHECK(r.policy.region_confirm == c.policy.region_confirm);
    CHECK(same_bits(r.policy.refine_tol, c.policy.refine_tol));
    CHECK(r.policy.refine_burn_periods == c.policy.refine_burn_periods);
    CHECK(r.policy.integrator.method == c.policy.integrator.method);
    CHECK(same_bits(r.policy.integrator.rel_tol, c.policy.integrator.rel_tol));
    CHECK(same_bits(r.policy.integrator.abs_tol, c.policy.integrator.abs_tol));
    CHECK(same_bits(r.policy.integrator.max_step, c.policy.integrator.max_step));
    CHECK(r.policy.integrator.taylor_order == c.policy.integrator.taylor_order);
    CHECK(r.policy.integrator.taylor_renormalize == c.policy.integrator.taylor_renormalize);
    CHECK(r.policy.workers == c.policy.workers);
    CHECK(r.out == c.out);
    CHECK(r.qmax == c.qmax);
    CHECK(r.sweep_t0 == c.sweep_t0);
    CHECK(r.sweep_gamma == c.sweep_gamma);
    CHECK(same_bits(r.scan_to, c.scan_to));
    CHECK(same_bits(r.scan_step, c.scan_step));
    CHECK(r.scan_track == c.scan_track);
    CHECK(same_bits(r.start.x, c.start.x));
    CHECK(same_bits(r.start.y, c.start.y));
    CHECK(r.periods == c.periods);

    // Serializing the reconstruction yields the identical document.
    CHECK(json(r).dump() == j.dump());
}

TEST_CASE("missing config fields fall back to defaults") {
    RunConfig d;
    RunConfig r = json::parse("{}").get<RunConfig>();
    CHECK(r.command == d.command);
    CHECK(r.params.alpha == d.params.alpha);
    CHECK(r.schedule.gamma1 == d.schedule.gamma1);
    CHECK(r.sampling.count == d.sampling.count);
    CHECK(r.policy.budget_periods == d.policy.budget_periods);
    CHECK(r.qmax == d.qmax);
    CHECK(r.periods == d.periods);

    // Partial documents override only what they mention.
    RunConfig p = json::parse(R"({"params":{"alpha":0.1},"qmax":4})").get<RunConfig>();
    CHECK(p.params.alpha == 0.1);
    CHECK(p.params.beta == d.params.beta);
    CHECK(p.qmax == 4);
    CHECK(p.sampling.seed == d.sampling.seed);
}

TEST_CASE("threshold CSV covers both response types at stated precision") {
    std::ostringstream os;
    thresholds_csv(os, 0.5, 12);
    std::istringstream is(os.str());
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(is, line)) lines.push_back(line);

    REQUIRE(lines.size() == 13);  // header + 6 libration + 6 rotation rows
    CHECK(lines[0] == "regime,q,k,G1,Delta,C1");
    CHECK(lines[1].rfind("libration,2,", 0) == 0);
    CHECK(lines[7].rfind("rotation,2,", 0) == 0);
    // Known constants at the printed precision.
    CHECK(lines[1].find("0.885201568846") != std::string::npos);
    CHECK(lines[1].find("0.597944") != std::string::npos);
    CHECK(lines[7].find("0.924397052341") != std::string::npos);
    // '.' decimal separator only.
    CHECK(os.str().find(',') != std::string::npos);
    CHECK(os.str().find("0,8") == std::string::npos);
}

TEST_CASE("sweep CSV emits the fixed column set") {
    PendulumParams params;  // defaults: downward, alpha 0.5, beta 0.1
    params.alpha = 0.5;
    params.beta = 0.1;
    SamplingSpec sampling;
    sampling.count = 30;
    ClassifyPolicy policy;
    policy.workers = 1;
    std::vector<DampingSchedule> family = {DampingSchedule::constant(0.06)};
    auto reports = sweep(params, family, sampling, policy);

    std::ostringstream os;
    sweep_csv(os, reports);
    std::istringstream is(os.str());
    std::string header;
    std::getline(is, header);
    CHECK(header ==
          "gamma0,gamma1,T0,attractor_id,kind,period,winding,fraction,ci,unresolved");
    std::string row;
    REQUIRE(std::getline(is, row));
    CHECK(row.find("fixed_point") != std::string::npos);

    // Full-precision columns parse back to the exact doubles.
    std::istringstream rs(row);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(rs, field, ',')) fields.push_back(field);
    REQUIRE(fields.size() == 10);
    CHECK(std::stod(fields[0]) == 0.06);
    CHECK(std::stod(fields[1]) == 0.06);
    CHECK(std::stod(fields[7]) == reports[0].entries[0].fraction);
}

TEST_CASE("basin report JSON embeds the generating config verbatim") {
    RunConfig cfg = awkward_config();
    cfg.command = "basins";
    cfg.sampling = SamplingSpec{};
    cfg.sampling.count = 40;
    cfg.params = PendulumParams{};
    cfg.schedule = DampingSchedule::constant(0.06);
    cfg.policy = ClassifyPolicy{};
    cfg.policy.workers = 1;

    BasinReport rep = estimate_basins(cfg.params, cfg.schedule, cfg.sampling, cfg.policy);
    json doc = basin_report_json(rep, cfg);

    // The embedded config reproduces the original exactly.
    CHECK(json(doc.at("config").get<RunConfig>()).dump() == json(cfg).dump());
    CHECK(doc.at("total").get<long>() == 40);
    REQUIRE(doc.at("entries").is_array());
    REQUIRE(!doc.at("entries").empty());
    const json& e = doc.at("entries")[0];
    CHECK(e.at("label") == "FP");
    CHECK(e.at("kind") == "fixed_point");
    CHECK(e.at("fraction").get<double>() == rep.entries[0].fraction);
    CHECK(e.at("witness").is_array());

    std::ostringstream os;
    basin_summary(os, rep);
    CHECK(os.str().find("FP  100.00%") != std::string::npos);
    CHECK(os.str().find("unresolved  0.00%") != std::string::npos);
}

TEST_CASE("scan text report names events and the tracking outcome") {
    ScanResult res;
    ScanEvent ev;
    ev.type = ScanEventType::period_change;
    ev.gamma_lo = 0.0925;
    ev.gamma_hi = 0.093125;
    ev.period_before = 2;
    ev.period_after = 1;
    ev.winding_before = 1;
    ev.winding_after = 1;
    ev.label_after = "PR";
    res.events.push_back(ev);
    res.gamma_last_tracked = 0.1;
    res.last_attractor.label = "PR";
    res.lost = false;

    std::ostringstream os;
    scan_report(os, res);
    std::string text = os.str();
    CHECK(text.find("period_change") != std::string::npos);
    CHECK(text.find("[0.092500, 0.093125]") != std::string::npos);
    CHECK(text.find("period 2 -> 1") != std::string::npos);
    CHECK(text.find("tracked to gamma 0.100000 as PR (persists)") != std::string::npos);
}
