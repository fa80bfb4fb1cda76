#pragma once

// Report emission.  CSV output always uses '.' as the decimal separator and
// is locale independent; summary fractions are printed to two decimals,
// while JSON carries full precision plus the generating configuration.

#include <cstdio>
#include <ostream>
#include <string>

#include <json.hpp>

#include "basins.hpp"
#include "config.hpp"
#include "thresholds.hpp"

namespace basinforge {

namespace detail {
/// Fixed-point formatting via snprintf ("C" numerics, '.' decimal, no
/// locale surprises from stream state).
inline std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}
}  // namespace detail

inline const char* kind_name(AttractorKind kind) {
    switch (kind) {
        case AttractorKind::fixed_point: return "fixed_point";
        case AttractorKind::periodic: return "periodic";
        case AttractorKind::aperiodic_region: return "aperiodic_region";
    }
    return "unknown";
}

/// Subharmonic threshold constants for both response types, one row per
/// admissible order up to qmax.
inline void thresholds_csv(std::ostream& os, double alpha, int qmax) {
    os << "regime,q,k,G1,Delta,C1\n";
    for (Regime regime : {Regime::libration, Regime::rotation}) {
        for (const ThresholdRow& row : threshold_table(regime, alpha, qmax)) {
            os << (regime == Regime::libration ? "libration" : "rotation") << ','
               << row.q << ',' << detail::fixed(row.k.k(), 12) << ','
               << detail::fixed(row.G1, 6) << ',' << detail::fixed(row.Delta, 6) << ','
               << detail::fixed(row.C1, 6) << '\n';
        }
    }
}

inline nlohmann::json basin_entry_json(const BasinEntry& e) {
    nlohmann::json w = nlohmann::json::array();
    for (const State& p : e.attractor.witness) w.push_back(p);
    return {{"id", e.attractor.id},
            {"kind", kind_name(e.attractor.kind)},
            {"label", e.attractor.label},
            {"period", e.attractor.period_n},
            {"winding", e.attractor.winding_per_period},
            {"center", e.attractor.center},
            {"witness", std::move(w)},
            {"count", e.count},
            {"fraction", e.fraction},
            {"ci", e.ci}};
}

/// Full-precision report with the generating configuration embedded.  Wall
/// time is deliberately omitted: replaying the embedded config must
/// regenerate this document byte for byte.
inline nlohmann::json basin_report_json(const BasinReport& r, const RunConfig& config) {
    nlohmann::json entries = nlohmann::json::array();
    for (const BasinEntry& e : r.entries) entries.push_back(basin_entry_json(e));
    return {{"config", config},
            {"params", r.params},
            {"schedule", r.schedule},
            {"sampling", r.sampling},
            {"workers", r.workers},
            {"total", r.total},
            {"unresolved", r.unresolved},
            {"entries", std::move(entries)}};
}

/// Human summary: one line per attractor, percentages to two decimals.
inline void basin_summary(std::ostream& os, const BasinReport& r) {
    os << "samples " << r.total << ", workers " << r.workers << ", wall "
       << detail::fixed(r.wall_seconds, 1) << " s\n";
    for (const BasinEntry& e : r.entries)
        os << "  " << e.attractor.label << "  " << detail::fixed(100.0 * e.fraction, 2)
           << "%  (count " << e.count << ", ci " << detail::fixed(100.0 * e.ci, 2)
           << "pp)\n";
    os << "  unresolved  "
       << detail::fixed(100.0 * static_cast<double>(r.unresolved) /
                            static_cast<double>(r.total), 2)
       << "%  (count " << r.unresolved << ")\n";
}

/// One row per (schedule, attractor); fractions at full precision.
inline void sweep_csv(std::ostream& os, const std::vector<BasinReport>& reports) {
    os << "gamma0,gamma1,T0,attractor_id,kind,period,winding,fraction,ci,unresolved\n";
    char buf[256];
    for (const BasinReport& r : reports) {
        for (const BasinEntry& e : r.entries) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%d,%s,%d,%d,%.17g,%.17g,%ld\n",
                          r.schedule.gamma0, r.schedule.gamma1, r.schedule.T0,
                          e.attractor.id, kind_name(e.attractor.kind),
                          e.attractor.period_n, e.attractor.winding_per_period,
                          e.fraction, e.ci, r.unresolved);
            os << buf;
        }
    }
}

inline const char* scan_event_name(ScanEventType t) {
    switch (t) {
        case ScanEventType::period_change: return "period_change";
        case ScanEventType::disappearance: return "disappearance";
        case ScanEventType::collapse_to_fixed_point: return "collapse_to_fixed_point";
    }
    return "unknown";
}

inline void scan_report(std::ostream& os, const ScanResult& res) {
    for (const ScanEvent& ev : res.events)
        os << "event " << scan_event_name(ev.type) << " in gamma ["
           << detail::fixed(ev.gamma_lo, 6) << ", " << detail::fixed(ev.gamma_hi, 6)
           << "] period " << ev.period_before << " -> " << ev.period_after
           << " winding " << ev.winding_before << " -> " << ev.winding_after
           << (ev.label_after.empty() ? "" : " to " + ev.label_after) << '\n';
    os << "tracked to gamma " << detail::fixed(res.gamma_last_tracked, 6) << " as "
       << res.last_attractor.label << (res.lost ? " (lost)" : " (persists)") << '\n';
}

}  // namespace basinforge
