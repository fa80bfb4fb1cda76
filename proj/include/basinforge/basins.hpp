#pragma once

// Basin-of-attraction estimation for the forced, damped pendulum.
//
// Each sample trajectory is integrated through the damping ramp (if any) and
// then observed stroboscopically, once per forcing period.  A trajectory is
// resolved when it (a) sits at an equilibrium, (b) matches the witness cycle
// of a known attractor, (c) exhibits a self-repeating cycle of period
// <= max_period (a new attractor), or (d) stays confined in a known bounded
// aperiodic region.  Everything else within the period budget is reported as
// unresolved -- never assigned by proximity.
//
// Sampling is counter-based: the initial condition of sample i depends only
// on (seed, i), so reports are reproducible no matter how samples are
// distributed over workers.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "attractor.hpp"
#include "integrate.hpp"
#include "model.hpp"
#include "rng.hpp"

namespace basinforge {

enum class SamplingMode { random, mesh };

/// Where initial conditions come from.  The default window is the standard
/// study region x in [-pi, pi], y in [-4, 4].
struct SamplingSpec {
    SamplingMode mode = SamplingMode::random;
    long count = 10000;  ///< random mode sample count
    int mesh_w = 0;      ///< mesh mode grid dimensions
    int mesh_h = 0;
    double x_min = -M_PI, x_max = M_PI;
    double y_min = -4.0, y_max = 4.0;
    std::uint64_t seed = 42;

    long total() const {
        return mode == SamplingMode::random
                   ? count
                   : static_cast<long>(mesh_w) * static_cast<long>(mesh_h);
    }

    /// Initial condition of sample `index`: an independent substream draw in
    /// random mode, the cell center of a row-major grid in mesh mode.
    State sample(long index) const {
        if (mode == SamplingMode::mesh) {
            long ix = index % mesh_w, iy = index / mesh_w;
            return {x_min + (ix + 0.5) * (x_max - x_min) / mesh_w,
                    y_min + (iy + 0.5) * (y_max - y_min) / mesh_h};
        }
        CounterRng rng(seed, static_cast<std::uint64_t>(index));
        double u = rng.uniform(), v = rng.uniform();
        return {x_min + (x_max - x_min) * u, y_min + (y_max - y_min) * v};
    }

    void validate() const {
        if (!(x_max > x_min) || !(y_max > y_min))
            throw std::domain_error("SamplingSpec: degenerate window");
        if (mode == SamplingMode::random && count < 1)
            throw std::domain_error("SamplingSpec: need count >= 1");
        if (mode == SamplingMode::mesh && (mesh_w < 1 || mesh_h < 1))
            throw std::domain_error("SamplingSpec: need positive mesh dims");
    }
};

namespace detail {
inline IntegratorSpec basin_integrator_defaults() {
    IntegratorSpec s;
    s.rel_tol = 1e-8;
    s.abs_tol = 1e-10;
    return s;
}
}  // namespace detail

/// Knobs of the classification loop.
struct ClassifyPolicy {
    double match_tol = 1e-3;   ///< witness / cycle matching distance
    double merge_tol = 0.1;    ///< same-attractor identification distance
    double fp_tol = 1e-4;      ///< equilibrium capture distance
    int confirm_periods = 3;   ///< consecutive confirming sections
    int max_period = 16;       ///< largest detectable cycle length
    long budget_periods = 5000;  ///< hard cap after the ramp ends
    double region_radius = 0.3;  ///< aperiodic region matching radius
    double region_extent = 2.0;  ///< max spread of a confined aperiodic orbit
    int region_window = 64;      ///< sections examined for confinement
    int region_confirm = 128;    ///< confined periods before declaring a region
    double refine_tol = 1e-6;    ///< canonical witness self-return tolerance
    int refine_burn_periods = 128;
    IntegratorSpec integrator = detail::basin_integrator_defaults();
    int workers = 0;  ///< 0: use BASINFORGE_WORKERS, else 1

    void validate() const {
        if (!(match_tol > 0.0) || !(merge_tol >= match_tol) || !(fp_tol > 0.0) ||
            !(region_radius > 0.0) || !(region_extent > 0.0) || !(refine_tol > 0.0))
            throw std::domain_error("ClassifyPolicy: tolerances must be positive");
        if (confirm_periods < 1 || max_period < 1 || budget_periods < 1 ||
            region_window < 2 || region_confirm < 1 || refine_burn_periods < 0)
            throw std::domain_error("ClassifyPolicy: counts must be positive");
        integrator.validate();
    }
};

struct PeriodDetection {
    int period_n;
    int winding_per_period;
};

/// Least period n <= max_period such that the last confirm_blocks blocks of
/// n consecutive Poincare points (x unwrapped, oldest first) repeat within
/// tol, after removing the winding shift 2 pi w n per block.  The winding per
/// period w must be near an integer (residual < 0.01).
inline std::optional<PeriodDetection> detect_period(const std::vector<State>& series,
                                                    int max_period, double tol,
                                                    int confirm_blocks = 3) {
    long L = static_cast<long>(series.size());
    for (int n = 1; n <= max_period; ++n) {
        long reach = static_cast<long>(confirm_blocks) * n + n;
        if (L < reach + 1) break;
        double turns = (series[L - 1].x - series[L - 1 - n].x) / (2.0 * M_PI * n);
        double w = std::nearbyint(turns);
        if (std::fabs(turns - w) > 0.01) continue;
        double shift = 2.0 * M_PI * w * n;
        bool ok = true;
        for (long j = 0; j < static_cast<long>(confirm_blocks) * n && ok; ++j) {
            const State& late = series[L - 1 - j];
            const State& early = series[L - 1 - j - n];
            ok = std::fabs(late.x - early.x - shift) < tol &&
                 std::fabs(late.y - early.y) < tol;
        }
        if (ok) return PeriodDetection{n, static_cast<int>(w)};
    }
    return std::nullopt;
}

namespace detail {

/// True when the newest confirm_periods sections walk the witness cycle in
/// phase.
inline bool matches_cycle(const std::vector<State>& series, const Attractor& at,
                          const ClassifyPolicy& policy) {
    int n = at.period_n;
    long L = static_cast<long>(series.size());
    if (static_cast<int>(at.witness.size()) != n || L < policy.confirm_periods)
        return false;
    State newest{wrap_angle(series[L - 1].x), series[L - 1].y};
    int align = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
        double d = cylinder_dist(newest, at.witness[j]);
        if (d < best) best = d, align = j;
    }
    if (best >= policy.match_tol) return false;
    for (int j = 1; j < policy.confirm_periods; ++j) {
        State p{wrap_angle(series[L - 1 - j].x), series[L - 1 - j].y};
        const State& wj = at.witness[((align - j) % n + n) % n];
        if (cylinder_dist(p, wj) >= policy.match_tol) return false;
    }
    return true;
}

/// Rotate a cycle so it starts at its lexicographically smallest point,
/// giving a canonical representative independent of the section it was first
/// seen on.
inline void canonical_rotation(std::vector<State>& cycle) {
    if (cycle.size() < 2) return;
    std::size_t first = 0;
    for (std::size_t i = 1; i < cycle.size(); ++i) {
        if (cycle[i].x < cycle[first].x ||
            (cycle[i].x == cycle[first].x && cycle[i].y < cycle[first].y))
            first = i;
    }
    std::rotate(cycle.begin(), cycle.begin() + first, cycle.end());
}

/// Core settle loop.  With a library, matching against known witnesses can
/// resolve the sample early; without one, only self-detection applies (used
/// for canonical re-derivation, where the outcome must not depend on shared
/// state).
struct SettleResult {
    std::optional<int> library_id;
    std::optional<Attractor> discovered;  ///< id/label unset
    long periods = 0;
};

inline SettleResult settle_trajectory(const State& start, const PendulumParams& params,
                                      const DampingSchedule& schedule,
                                      const AttractorLibrary* library,
                                      const ClassifyPolicy& policy) {
    PendulumIntegrator integ(params, schedule, policy.integrator);
    integ.reset(0.0, start);
    if (schedule.T0 > 0.0) integ.advance_to(schedule.T0);
    const double base = integ.tau();

    const long cap = std::max(static_cast<long>(policy.region_window),
                              static_cast<long>(policy.max_period) *
                                  (policy.confirm_periods + 1)) +
                     8;
    std::vector<State> series;
    series.reserve(cap + 1);

    auto make_candidate = [&](AttractorKind kind, int n, int w, double center,
                              std::vector<State> witness) {
        Attractor cand;
        cand.kind = kind;
        cand.period_n = n;
        cand.winding_per_period = w;
        cand.center = center;
        cand.witness = std::move(witness);
        cand.params = params;
        cand.schedule = schedule;
        return cand;
    };

    // Circular mean of the angle along the continuous orbit over the next
    // n periods; this is what tells an oscillation about 0 from one about pi.
    auto orbit_center = [&](int n) {
        constexpr int sub = 16;
        double sx = 0.0, cx = 0.0, t = integ.tau();
        for (int j = 1; j <= sub * n; ++j) {
            integ.advance_to(t + 2.0 * M_PI * j / sub);
            sx += std::sin(integ.state().x);
            cx += std::cos(integ.state().x);
        }
        return std::atan2(sx, cx);
    };

    long fp_run = 0;
    double fp_center = 0.0;
    long confined_run = 0;
    std::uint64_t lib_version = ~std::uint64_t{0};
    std::vector<std::shared_ptr<const Attractor>> snap;

    auto step_period = [&](long k) {
        integ.advance_to(base + 2.0 * M_PI * static_cast<double>(k));
        series.push_back(integ.state());
        if (static_cast<long>(series.size()) > cap) series.erase(series.begin());
        return series.back();
    };

    long k = 0;
    while (k < policy.budget_periods) {
        State s = step_period(++k);

        // Equilibria: x = 0 and x = pi are exact solutions of the
        // parametrically forced system.
        double c = std::fabs(wrap_angle(s.x)) < M_PI_2 ? 0.0 : M_PI;
        if (std::fabs(wrap_angle(s.x - c)) < policy.fp_tol &&
            std::fabs(s.y) < policy.fp_tol && (fp_run == 0 || c == fp_center)) {
            fp_center = c;
            ++fp_run;
        } else {
            fp_run = 0;
        }
        if (fp_run >= policy.confirm_periods) {
            auto cand = make_candidate(AttractorKind::fixed_point, 1, 0,
                                       wrap_angle(fp_center),
                                       {State{wrap_angle(fp_center), 0.0}});
            return {std::nullopt, std::move(cand), k};
        }

        bool region_checkpoint =
            k % 8 == 0 && static_cast<long>(series.size()) >= policy.region_window;

        // Known attractors first: convergence onto a library witness.
        if (library) {
            if (library->version() != lib_version) {
                snap = library->snapshot();
                lib_version = library->version();
            }
            for (const auto& e : snap) {
                if (e->kind == AttractorKind::periodic) {
                    if (matches_cycle(series, *e, policy)) return {e->id, std::nullopt, k};
                } else if (e->kind == AttractorKind::aperiodic_region && region_checkpoint) {
                    std::vector<State> window(series.end() - policy.region_window,
                                              series.end());
                    for (State& p : window) p.x = wrap_angle(p.x);
                    if (region_distance(window, e->witness) < policy.region_radius)
                        return {e->id, std::nullopt, k};
                }
            }
        }

        // Self-repeating cycle: a new (or independently re-found) attractor.
        if (auto det = detect_period(series, policy.max_period, policy.match_tol,
                                     policy.confirm_periods)) {
            const int n = det->period_n;
            // A tiny non-winding "cycle" hugging an equilibrium is a
            // still-converging spiral; let the equilibrium test claim it.
            bool near_fp = false;
            if (det->winding_per_period == 0) {
                double worst = 0.0;
                for (long j = 0; j < n; ++j) {
                    State p{wrap_angle(series[series.size() - 1 - j].x),
                            series[series.size() - 1 - j].y};
                    worst = std::fmax(worst,
                                      std::fmin(cylinder_dist(p, State{0.0, 0.0}),
                                                cylinder_dist(p, State{M_PI, 0.0})));
                }
                near_fp = worst < 0.05;
            }
            if (!near_fp) {
                // Attractivity verification.  A trajectory lingering beside a
                // saddle cycle also shows near-repeating sections for a few
                // periods, but its cycle-to-cycle displacement grows along
                // the unstable manifold, whereas near a true attractor it
                // contracts.  Watch the displacement over 8 more cycles.
                const double shift = 2.0 * M_PI * det->winding_per_period * n;
                std::vector<State> ring(series.end() - n, series.end());
                const long extra = 8L * n;
                double d_first = 0.0, d_last = 0.0;
                long done = 0;
                for (long j = 1; j <= extra && k < policy.budget_periods; ++j) {
                    State p = step_period(++k);
                    State& prev = ring[(j - 1) % n];
                    double d = std::hypot(p.x - prev.x - shift, p.y - prev.y);
                    prev = p;
                    if (j <= n) d_first = std::fmax(d_first, d);
                    if (j > extra - n) d_last = std::fmax(d_last, d);
                    done = j;
                }
                bool attracting = done == extra && d_last < policy.match_tol &&
                                  d_last <= std::fmax(1.02 * d_first, 1e-8);
                if (attracting) {
                    std::vector<State> cycle(series.end() - n, series.end());
                    for (State& p : cycle) p.x = wrap_angle(p.x);
                    canonical_rotation(cycle);
                    double center = det->winding_per_period == 0 ? orbit_center(n) : 0.0;
                    auto cand = make_candidate(AttractorKind::periodic, n,
                                               det->winding_per_period, center,
                                               std::move(cycle));
                    return {std::nullopt, std::move(cand), k};
                }
                // Not attracting: fall through and keep observing.  The new
                // sections are already in the series.
            }
        }

        // Confined, period-free orbit: bounded aperiodic region.  A genuine
        // region is stationary; a slow spiral into an equilibrium is not, so
        // demand (a) no net rotation, (b) bounded spread, (c) clearance from
        // the equilibria, (d) a non-shrinking mean amplitude.
        if (region_checkpoint) {
            constexpr double fp_clearance = 0.03;
            constexpr double stationarity = 0.8;
            std::vector<State> window(series.end() - policy.region_window, series.end());
            bool confined = std::fabs(window.back().x - window.front().x) < M_PI;
            if (confined) {
                double sx = 0.0, cx = 0.0, my = 0.0;
                for (const State& p : window) {
                    sx += std::sin(p.x);
                    cx += std::cos(p.x);
                    my += p.y;
                }
                State centroid{std::atan2(sx, cx), my / window.size()};
                long half = policy.region_window / 2;
                double amp_old = 0.0, amp_new = 0.0;
                for (long j = 0; j < static_cast<long>(window.size()) && confined; ++j) {
                    State p{wrap_angle(window[j].x), window[j].y};
                    double r = cylinder_dist(p, centroid);
                    (j < half ? amp_old : amp_new) += r;
                    confined = r <= policy.region_extent &&
                               cylinder_dist(p, State{0.0, 0.0}) > fp_clearance &&
                               cylinder_dist(p, State{M_PI, 0.0}) > fp_clearance;
                }
                confined = confined && amp_old > 0.05 * half &&
                           amp_new > stationarity * amp_old;
            }
            confined_run = confined ? confined_run + 8 : 0;
            if (confined_run >= policy.region_confirm) {
                std::vector<State> region(series.end() - policy.region_window,
                                          series.end());
                double sx = 0.0, cx = 0.0;
                for (State& p : region) {
                    p.x = wrap_angle(p.x);
                    sx += std::sin(p.x);
                    cx += std::cos(p.x);
                }
                auto cand = make_candidate(AttractorKind::aperiodic_region, 0, 0,
                                           std::atan2(sx, cx), std::move(region));
                return {std::nullopt, std::move(cand), k};
            }
        }
    }
    return {std::nullopt, std::nullopt, policy.budget_periods};
}

}  // namespace detail

/// Outcome of classifying one trajectory; `id` empty means unresolved.
struct ClassifyOutcome {
    std::optional<int> id;
    long periods_used = 0;
};

/// Integrate one start state until it resolves onto an attractor, growing the
/// library when a new cycle is found.
inline ClassifyOutcome classify_trajectory(const State& start,
                                           const PendulumParams& params,
                                           const DampingSchedule& schedule,
                                           AttractorLibrary& library,
                                           const ClassifyPolicy& policy) {
    params.validate();
    schedule.validate();
    policy.validate();
    auto res = detail::settle_trajectory(start, params, schedule, &library, policy);
    if (res.library_id) return {res.library_id, res.periods};
    if (res.discovered)
        return {library.find_or_insert(std::move(*res.discovered)), res.periods};
    return {std::nullopt, res.periods};
}

/// One row of a basin report.
struct BasinEntry {
    Attractor attractor;
    long count = 0;
    double fraction = 0.0;
    double ci = 0.0;  ///< 3-sigma binomial half width
};

struct BasinReport {
    PendulumParams params;
    DampingSchedule schedule;
    SamplingSpec sampling;
    int workers = 1;
    std::vector<BasinEntry> entries;  ///< ordered by first converging sample
    /// Basin map: final attractor id per sample index, -1 for unresolved.
    /// Enables paired comparisons across runs that share a sampling spec
    /// (the same index is the same start state).  Not serialised.
    std::vector<int> assignment;
    long unresolved = 0;
    long total = 0;
    double wall_seconds = 0.0;
};

inline int resolve_workers(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("BASINFORGE_WORKERS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 1;
}

namespace detail {

/// Deterministic canonical attractor: re-settle the first sample that
/// converged to it without any shared state, then tighten the witness with a
/// high-accuracy burn-in so it does not depend on classification order.
inline Attractor canonical_attractor(const Attractor& provisional, const State& first_start,
                                     const PendulumParams& params,
                                     const DampingSchedule& schedule,
                                     const ClassifyPolicy& policy) {
    Attractor canon = provisional;
    auto res = settle_trajectory(first_start, params, schedule, nullptr, policy);
    if (res.discovered) canon = std::move(*res.discovered);

    if (canon.kind == AttractorKind::periodic && policy.refine_burn_periods > 0) {
        IntegratorSpec tight = policy.integrator;
        tight.rel_tol = 1e-11;
        tight.abs_tol = 1e-13;
        PendulumIntegrator integ(params, schedule, tight);
        double base = schedule.T0;
        integ.reset(base, canon.witness.front());
        for (int k = 1; k <= policy.refine_burn_periods; ++k)
            integ.advance_to(base + 2.0 * M_PI * static_cast<double>(k));
        std::vector<State> cycle;
        State ref = integ.state();
        constexpr int sub = 16;
        double sx = 0.0, cx = 0.0;
        for (int j = 0; j < canon.period_n; ++j) {
            State s = integ.state();
            cycle.push_back({wrap_angle(s.x), s.y});
            double t = integ.tau();
            for (int m = 1; m <= sub; ++m) {
                integ.advance_to(t + 2.0 * M_PI * m / sub);
                sx += std::sin(integ.state().x);
                cx += std::cos(integ.state().x);
            }
        }
        State ret = integ.state();
        if (cylinder_dist(State{wrap_angle(ret.x), ret.y},
                          State{wrap_angle(ref.x), ref.y}) < policy.refine_tol) {
            canonical_rotation(cycle);
            canon.witness = std::move(cycle);
            if (canon.winding_per_period == 0) canon.center = std::atan2(sx, cx);
        }
    }
    canon.params = params;
    canon.schedule = schedule;
    canon.label = attractor_label(canon);
    return canon;
}

}  // namespace detail

/// Classify every sample of the spec and report per-attractor basin
/// fractions.  Embarrassingly parallel; the report is deterministic for a
/// fixed (seed, spec) regardless of the worker count.
inline BasinReport estimate_basins(const PendulumParams& params,
                                   const DampingSchedule& schedule,
                                   const SamplingSpec& sampling,
                                   const ClassifyPolicy& policy) {
    params.validate();
    schedule.validate();
    sampling.validate();
    policy.validate();
    auto t0 = std::chrono::steady_clock::now();

    const long total = sampling.total();
    AttractorLibrary library(policy.match_tol, policy.region_radius, policy.merge_tol);
    std::vector<int> assignment(total, -2);
    std::atomic<long> cursor{0};
    const int workers = resolve_workers(policy.workers);

    auto work = [&]() {
        for (;;) {
            long begin = cursor.fetch_add(64);
            if (begin >= total) return;
            long end = std::min(begin + 64, total);
            for (long i = begin; i < end; ++i) {
                try {
                    auto out = classify_trajectory(sampling.sample(i), params, schedule,
                                                   library, policy);
                    assignment[i] = out.id ? *out.id : -2;
                } catch (const std::exception&) {
                    assignment[i] = -2;  // per-sample failure -> unresolved
                }
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();

    // Canonical order: attractors sorted by the first sample that reached
    // them; witnesses re-derived deterministically from that sample.
    const int provisional = library.size();
    std::vector<long> first(provisional, std::numeric_limits<long>::max());
    std::vector<long> counts(provisional, 0);
    long unresolved = 0;
    for (long i = 0; i < total; ++i) {
        int a = assignment[i];
        if (a < 0) {
            ++unresolved;
            continue;
        }
        ++counts[a];
        first[a] = std::min(first[a], i);
    }
    std::vector<int> order;
    for (int a = 0; a < provisional; ++a)
        if (counts[a] > 0) order.push_back(a);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return first[a] < first[b]; });

    std::vector<int> rank_of(provisional, -1);
    for (std::size_t rank = 0; rank < order.size(); ++rank)
        rank_of[order[rank]] = static_cast<int>(rank);
    for (int& a : assignment) a = a < 0 ? -1 : rank_of[a];

    BasinReport report;
    report.params = params;
    report.schedule = schedule;
    report.sampling = sampling;
    report.workers = workers;
    report.total = total;
    report.unresolved = unresolved;
    report.assignment = std::move(assignment);
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        int a = order[rank];
        BasinEntry entry;
        entry.attractor = detail::canonical_attractor(
            library.get(a), sampling.sample(first[a]), params, schedule, policy);
        entry.attractor.id = static_cast<int>(rank);
        entry.count = counts[a];
        entry.fraction = static_cast<double>(counts[a]) / static_cast<double>(total);
        entry.ci = 3.0 * std::sqrt(entry.fraction * (1.0 - entry.fraction) /
                                   static_cast<double>(total));
        report.entries.push_back(std::move(entry));
    }
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

/// One report per schedule in the family (e.g. a gamma list or a T0 list).
inline std::vector<BasinReport> sweep(const PendulumParams& params,
                                      const std::vector<DampingSchedule>& family,
                                      const SamplingSpec& sampling,
                                      const ClassifyPolicy& policy) {
    if (family.empty()) throw std::domain_error("sweep: empty schedule family");
    std::vector<BasinReport> reports;
    reports.reserve(family.size());
    for (const DampingSchedule& s : family)
        reports.push_back(estimate_basins(params, s, sampling, policy));
    return reports;
}

/// Largest basin-fraction difference across +-winding rotation pairs; the
/// system's reflection symmetry says the true difference is zero, so the
/// returned value should sit within sampling error.
inline double symmetry_audit(const BasinReport& report) {
    double worst = -1.0;
    for (const BasinEntry& a : report.entries) {
        if (a.attractor.kind != AttractorKind::periodic ||
            a.attractor.winding_per_period <= 0)
            continue;
        for (const BasinEntry& b : report.entries) {
            if (b.attractor.kind != AttractorKind::periodic) continue;
            if (b.attractor.winding_per_period != -a.attractor.winding_per_period ||
                b.attractor.period_n != a.attractor.period_n)
                continue;
            worst = std::fmax(worst, std::fabs(a.fraction - b.fraction));
        }
    }
    if (worst < 0.0)
        throw std::domain_error("symmetry_audit: report has no +- rotation pair");
    return worst;
}

struct OrderingCheck {
    double gap = 0.0;    ///< |share_a - share_ref| - |share_b - share_ref|
    double sigma = 0.0;  ///< paired 1-sigma standard error of the gap
    /// One-sided verdict: "a is at least as close to the reference as b" is
    /// not contradicted at k sigma.  The comparison is inclusive so the
    /// degenerate exact tie (gap = sigma = 0) counts as holding.
    bool holds(double k = 3.0) const { return gap <= k * sigma; }
};

/// Paired test that report `a`'s share of `label` sits closer to the
/// reference share than report `b`'s.  All three reports must be built from
/// the identical sampling spec, so sample i is the same start state in each;
/// differencing per sample cancels the common sampling noise that an
/// unpaired comparison of three independent confidence intervals would
/// double-count.  The returned sigma is the delta-method standard error of
/// gap = |f_a - f_ref| - |f_b - f_ref| under that pairing.
inline OrderingCheck share_ordering(const BasinReport& a, const BasinReport& b,
                                    const BasinReport& ref, const std::string& label) {
    const long n = ref.total;
    if (a.total != n || b.total != n || a.sampling.seed != ref.sampling.seed ||
        b.sampling.seed != ref.sampling.seed || a.sampling.mode != ref.sampling.mode)
        throw std::domain_error("share_ordering: reports must share one sampling spec");
    if (a.assignment.size() != static_cast<std::size_t>(n) ||
        b.assignment.size() != static_cast<std::size_t>(n) ||
        ref.assignment.size() != static_cast<std::size_t>(n))
        throw std::domain_error("share_ordering: reports lack per-sample basin maps");

    auto indicator = [&](const BasinReport& r, long i) -> double {
        int id = r.assignment[static_cast<std::size_t>(i)];
        if (id < 0) return 0.0;
        return r.entries[static_cast<std::size_t>(id)].attractor.label == label ? 1.0
                                                                                : 0.0;
    };
    double mean_s = 0.0, mean_f = 0.0;
    for (long i = 0; i < n; ++i) {
        mean_s += indicator(a, i) - indicator(ref, i);
        mean_f += indicator(b, i) - indicator(ref, i);
    }
    mean_s /= static_cast<double>(n);
    mean_f /= static_cast<double>(n);
    const double sign_s = mean_s < 0.0 ? -1.0 : 1.0;
    const double sign_f = mean_f < 0.0 ? -1.0 : 1.0;

    OrderingCheck out;
    out.gap = sign_s * mean_s - sign_f * mean_f;
    double ss = 0.0;
    for (long i = 0; i < n; ++i) {
        double g = sign_s * (indicator(a, i) - indicator(ref, i)) -
                   sign_f * (indicator(b, i) - indicator(ref, i));
        ss += (g - out.gap) * (g - out.gap);
    }
    out.sigma = std::sqrt(ss / (static_cast<double>(n) * static_cast<double>(n - 1)));
    return out;
}

enum class ScanEventType { period_change, disappearance, collapse_to_fixed_point };

struct ScanEvent {
    ScanEventType type;
    double gamma_lo = 0.0;  ///< bisection-refined bracket, lo < hi
    double gamma_hi = 0.0;
    int period_before = 0, period_after = 0;
    int winding_before = 0, winding_after = 0;
    std::string label_after;  ///< where the re-seeded trajectory went
};

struct ScanResult {
    std::vector<ScanEvent> events;
    double gamma_last_tracked = 0.0;
    Attractor last_attractor;
    bool lost = false;  ///< the tracked family ended before gamma_to
};

namespace detail {

inline std::optional<Attractor> settle_constant(const State& start,
                                                const PendulumParams& params,
                                                double gamma,
                                                const ClassifyPolicy& policy) {
    auto res = settle_trajectory(start, params, DampingSchedule::constant(gamma),
                                 nullptr, policy);
    if (!res.discovered) return std::nullopt;
    Attractor a = std::move(*res.discovered);
    a.label = attractor_label(a);
    return a;
}

inline bool same_family(const Attractor& a, const Attractor& b) {
    return a.kind == AttractorKind::periodic && b.kind == AttractorKind::periodic &&
           a.period_n == b.period_n && a.winding_per_period == b.winding_per_period;
}

}  // namespace detail

/// Continue a periodic attractor in gamma by re-seeding from its witness at
/// each step, recording period changes and loss of the attractor.  Events
/// carry a bisection-refined bracket.  Tracking continues through period
/// changes and stops at disappearance or collapse.
inline ScanResult bifurcation_scan(const PendulumParams& params, const Attractor& tracked,
                                   double gamma_from, double gamma_to, double step,
                                   const ClassifyPolicy& policy) {
    params.validate();
    policy.validate();
    if (!(step > 0.0)) throw std::domain_error("bifurcation_scan: step must be positive");
    if (tracked.kind != AttractorKind::periodic || tracked.witness.empty())
        throw std::domain_error("bifurcation_scan: need a periodic attractor to track");

    auto cur = detail::settle_constant(tracked.witness.front(), params, gamma_from, policy);
    if (!cur || !detail::same_family(*cur, tracked))
        throw std::domain_error(
            "bifurcation_scan: tracked attractor does not persist at the range start");

    ScanResult res;
    res.gamma_last_tracked = gamma_from;
    res.last_attractor = *cur;
    const double dir = gamma_to >= gamma_from ? 1.0 : -1.0;
    const double refine = std::fmax(step / 16.0, 1e-5);
    double g = gamma_from;

    while (dir * (gamma_to - g) > 1e-12) {
        double gn = g + dir * step;
        if (dir * (gamma_to - gn) < 0.0) gn = gamma_to;
        auto next = detail::settle_constant(cur->witness.front(), params, gn, policy);
        if (next && detail::same_family(*next, *cur)) {
            g = gn;
            cur = next;
            res.gamma_last_tracked = g;
            res.last_attractor = *cur;
            continue;
        }

        // Event inside (g, gn): bisect, always re-seeding from the last
        // surviving witness.
        double lo = g, hi = gn;
        Attractor at_lo = *cur;
        std::optional<Attractor> outcome = next;
        while (std::fabs(hi - lo) > refine) {
            double mid = 0.5 * (lo + hi);
            auto m = detail::settle_constant(at_lo.witness.front(), params, mid, policy);
            if (m && detail::same_family(*m, at_lo)) {
                lo = mid;
                at_lo = *m;
            } else {
                hi = mid;
                outcome = m;
            }
        }

        ScanEvent ev;
        ev.gamma_lo = std::fmin(lo, hi);
        ev.gamma_hi = std::fmax(lo, hi);
        ev.period_before = at_lo.period_n;
        ev.winding_before = at_lo.winding_per_period;
        if (outcome) {
            ev.period_after = outcome->period_n;
            ev.winding_after = outcome->winding_per_period;
            ev.label_after = outcome->label;
        } else {
            ev.label_after = "unresolved";
        }
        bool continues = outcome && outcome->kind == AttractorKind::periodic &&
                         outcome->winding_per_period == at_lo.winding_per_period &&
                         outcome->winding_per_period != 0;
        bool osc_continues = outcome && outcome->kind == AttractorKind::periodic &&
                             at_lo.winding_per_period == 0 &&
                             outcome->winding_per_period == 0;
        if (continues || osc_continues) {
            ev.type = ScanEventType::period_change;
            res.events.push_back(ev);
            g = hi;
            cur = outcome;
            res.gamma_last_tracked = lo;
            res.last_attractor = at_lo;
            continue;
        }
        ev.type = outcome && outcome->kind == AttractorKind::fixed_point
                      ? ScanEventType::collapse_to_fixed_point
                      : ScanEventType::disappearance;
        res.events.push_back(ev);
        res.gamma_last_tracked = lo;
        res.last_attractor = at_lo;
        res.lost = true;
        return res;
    }
    return res;
}

}  // namespace basinforge
