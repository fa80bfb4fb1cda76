#pragma once

// Attractor taxonomy for the periodically forced pendulum and the library
// used to identify trajectories.  An attractor is recorded through a witness:
// the ordered Poincare points of one cycle (a single point for equilibria, a
// representative cloud for bounded aperiodic regions).

#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "model.hpp"

namespace basinforge {

enum class AttractorKind { fixed_point, periodic, aperiodic_region };

struct Attractor {
    int id = -1;
    AttractorKind kind = AttractorKind::fixed_point;
    int period_n = 1;            ///< forcing periods per cycle (periodic kind)
    int winding_per_period = 0;  ///< signed full turns per forcing period
    double center = 0.0;         ///< circular mean angle of the continuous orbit
    std::vector<State> witness;  ///< Poincare points, x wrapped to (-pi, pi]
    std::string label;
    PendulumParams params;       ///< context the attractor was found in
    DampingSchedule schedule;
};

/// Distance on the cylinder (angle wrapped, velocity plain).
inline double cylinder_dist(const State& a, const State& b) {
    return std::hypot(wrap_angle(a.x - b.x), a.y - b.y);
}

/// Smallest over cyclic alignments of the largest pointwise distance between
/// two equally long cycles; infinity when the lengths differ.
inline double cycle_distance(const std::vector<State>& a, const std::vector<State>& b) {
    std::size_t n = a.size();
    if (n == 0 || n != b.size()) return std::numeric_limits<double>::infinity();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t off = 0; off < n; ++off) {
        double worst = 0.0;
        for (std::size_t i = 0; i < n && worst < best; ++i)
            worst = std::fmax(worst, cylinder_dist(a[i], b[(i + off) % n]));
        best = std::fmin(best, worst);
    }
    return best;
}

/// How far the farthest point of `pts` lies from the set `region`.
inline double region_distance(const std::vector<State>& pts,
                              const std::vector<State>& region) {
    if (pts.empty() || region.empty()) return std::numeric_limits<double>::infinity();
    double worst = 0.0;
    for (const State& p : pts) {
        double near = std::numeric_limits<double>::infinity();
        for (const State& r : region) near = std::fmin(near, cylinder_dist(p, r));
        worst = std::fmax(worst, near);
    }
    return worst;
}

/// Symmetric (Hausdorff) distance between two point sets.
inline double hausdorff_distance(const std::vector<State>& a,
                                 const std::vector<State>& b) {
    return std::fmax(region_distance(a, b), region_distance(b, a));
}

/// Name an attractor by what it does.  Equilibria: FP at the origin of the
/// chosen coordinates, DFP (hanging) / UFP (upright) at angle pi depending on
/// the orientation convention.  Rotations: PR/NR by winding sign, period
/// appended when > 1.  Oscillations: those enclosing the angle pi are the
/// "downward oscillations" DO<n> of the inverted convention, the rest OSC
/// (period 2) or OSC<n>.  Which equilibrium an oscillation encloses is read
/// off the orbit's mean angle `center`: the stroboscopic points alone cannot
/// decide it, since a symmetric pair +-a is symmetric about both equilibria.
/// Bounded aperiodic regions are bucketed with DO2, whose period-doubled
/// remnants they are.
inline std::string attractor_label(const Attractor& a) {
    if (a.kind == AttractorKind::fixed_point) {
        double x = a.witness.empty() ? a.center : wrap_angle(a.witness.front().x);
        if (std::fabs(x) < M_PI_2) return "FP";
        return a.params.orientation == Orientation::inverted ? "DFP" : "UFP";
    }
    if (a.kind == AttractorKind::aperiodic_region) return "DO2";
    if (a.winding_per_period != 0) {
        std::string base = a.winding_per_period > 0 ? "PR" : "NR";
        if (a.period_n > 1) base += std::to_string(a.period_n);
        return base;
    }
    if (std::fabs(wrap_angle(a.center - M_PI)) < M_PI_2)
        return "DO" + std::to_string(a.period_n);
    return a.period_n == 2 ? std::string("OSC") : "OSC" + std::to_string(a.period_n);
}

/// Growing, thread-safe collection of attractors.  Insertion is guarded and
/// re-checks for an equivalent entry, so concurrent discoveries of the same
/// attractor collapse onto the first writer's id.
///
/// Two tolerances are involved: match_tol is the per-point trajectory
/// matching radius, while merge_tol identifies two witnesses of the same
/// attractor.  merge_tol must be the looser one: a cycle detected from a
/// still-converging trajectory can sit an order of magnitude further from
/// the true cycle than match_tol, and independent discoveries (different
/// samples, different workers) must still collapse onto one entry.  Distinct
/// attractors sharing period and winding are assumed to be separated by more
/// than merge_tol on the section, which holds comfortably for this system.
class AttractorLibrary {
public:
    explicit AttractorLibrary(double match_tol = 1e-3, double region_radius = 0.3,
                              double merge_tol = 0.1)
        : match_tol_(match_tol), region_radius_(region_radius),
          merge_tol_(std::fmax(match_tol, merge_tol)) {}

    int size() const {
        std::lock_guard<std::mutex> g(mutex_);
        return static_cast<int>(entries_.size());
    }

    std::uint64_t version() const {
        std::lock_guard<std::mutex> g(mutex_);
        return version_;
    }

    Attractor get(int id) const {
        std::lock_guard<std::mutex> g(mutex_);
        if (id < 0 || id >= static_cast<int>(entries_.size()))
            throw std::out_of_range("AttractorLibrary: no such id");
        return *entries_[id];
    }

    /// Cheap immutable snapshot for matching outside the lock.
    std::vector<std::shared_ptr<const Attractor>> snapshot() const {
        std::lock_guard<std::mutex> g(mutex_);
        return entries_;
    }

    /// Returns the id of an equivalent existing entry, or inserts the
    /// candidate (assigning id and label) and returns the new id.
    int find_or_insert(Attractor cand) {
        std::lock_guard<std::mutex> g(mutex_);
        for (const auto& e : entries_)
            if (equivalent(*e, cand)) return e->id;
        cand.id = static_cast<int>(entries_.size());
        cand.label = attractor_label(cand);
        entries_.push_back(std::make_shared<const Attractor>(std::move(cand)));
        ++version_;
        return entries_.back()->id;
    }

    /// Same-attractor test: equal discrete signature and witnesses within the
    /// merge tolerance (region radius for aperiodic regions).
    bool equivalent(const Attractor& a, const Attractor& b) const {
        if (a.kind != b.kind) return false;
        switch (a.kind) {
            case AttractorKind::fixed_point:
                return cylinder_dist(a.witness.front(), b.witness.front()) < merge_tol_;
            case AttractorKind::periodic:
                return a.period_n == b.period_n &&
                       a.winding_per_period == b.winding_per_period &&
                       cycle_distance(a.witness, b.witness) < merge_tol_;
            case AttractorKind::aperiodic_region:
                return hausdorff_distance(a.witness, b.witness) < region_radius_;
        }
        return false;
    }

    double match_tol() const { return match_tol_; }
    double region_radius() const { return region_radius_; }
    double merge_tol() const { return merge_tol_; }

private:
    mutable std::mutex mutex_;
    std::vector<std::shared_ptr<const Attractor>> entries_;
    std::uint64_t version_ = 0;
    double match_tol_;
    double region_radius_;
    double merge_tol_;
};

}  // namespace basinforge
