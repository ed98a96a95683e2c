#pragma once

#include <cstddef>
#include <cstdint>

#include "brbm/branching.hpp"
#include "brbm/rng.hpp"

namespace brbm {

/// Barriers used by the first/second moment frontier bounds at horizon t and
/// offset y:
///
///   slope     beta = sqrt2 - kLogDelay log(t)/t + y/t
///   straight  beta s + 1
///   curved    beta s + L(s) + y + 1
///
/// L follows kLogDelay log(s+1) on [0, t/2-1] and kLogDelay log(t-s+1) on
/// [t/2+1, t]; in between it is the cubic Hermite interpolant of the two
/// branches (values and first derivatives), so L is C^1 and concave.
class BarrierSpec {
public:
    BarrierSpec(double horizon, double offset);

    double horizon() const { return t_; }
    double offset() const { return y_; }
    double slope() const { return beta_; }

    double curve(double s) const;
    double curve_second_derivative(double s) const;
    double blend_begin() const { return blend_lo_; }
    double blend_end() const { return blend_hi_; }

    double straight(double s) const { return beta_ * s + 1.0; }
    double curved(double s) const { return beta_ * s + curve(s) + y_ + 1.0; }

    double box_low() const { return beta_ * t_ - 1.0; }
    double h_box_high() const { return beta_ * t_; }
    double gamma_box_high() const { return beta_ * t_ + y_; }

private:
    double t_;
    double y_;
    double beta_;
    double blend_lo_;
    double blend_hi_;
};

struct CensusCounts {
    std::uint64_t h = 0;
    std::uint64_t gamma = 0;
};

inline constexpr double kDefaultPathStep = 1e-2;

/// One replicate of the barrier census: counts of particles whose path stayed
/// under the straight (H) resp. curved (Gamma) barrier and ended in the
/// corresponding box. With `reflected`, |X| is monitored and the box applies
/// to |X(t)|. Requires t >= 1 and y >= 0; offsets above sqrt(t) lie outside
/// the range of the moment bounds but are still counted.
///
/// Paths are monitored on a grid of step dt_path via Brownian-bridge
/// interpolation; each sub-segment is killed with the exact bridge crossing
/// probability against the barrier chord on that sub-segment. Lifetimes whose
/// whole-lifetime chord crossing probability is below 1e-12 are not refined
/// (the barriers are concave, so that chord bound dominates the refined one).
CensusCounts barrier_census(double horizon, double offset, RngStream& stream, double dt_path = kDefaultPathStep,
                            bool reflected = true, std::size_t guard = kDefaultGuard);

}  // namespace brbm
