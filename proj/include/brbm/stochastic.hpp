#pragma once

#include "brbm/rng.hpp"

namespace brbm {

inline constexpr double kSqrt2 = 1.41421356237309504880;
inline constexpr double kPi = 3.14159265358979323846;
/// 3 / (2 sqrt 2), the logarithmic delay coefficient of the frontier.
inline constexpr double kLogDelay = 3.0 / (2.0 * kSqrt2);

/// A straight line s -> intercept + slope * s, with s measured from the start
/// of whatever segment it is attached to. Any sign of slope is allowed.
struct Line {
    double intercept = 0.0;
    double slope = 0.0;

    double at(double s) const { return intercept + slope * s; }
};

/// Affine boundary a + b s with a > 0 and b > 0.
class AffineBoundary {
public:
    AffineBoundary(double intercept, double slope);

    double intercept() const { return a_; }
    double slope() const { return b_; }
    double at(double s) const { return a_ + b_ * s; }
    Line line() const { return {a_, b_}; }

private:
    double a_;
    double b_;
};

double sample_gaussian(RngStream& stream, double mean, double variance);
double sample_exponential(RngStream& stream, double rate);

/// Transition density of reflected Brownian motion |B| from (s, x) to (t, y),
/// i.e. the free Gaussian kernel plus its image through the origin.
double reflected_density(double s, double x, double t, double y);

/// Probability that a Brownian bridge from x0 to x1 over a duration dt touches
/// the line `boundary` (anchored at the start of the segment).
///
/// Returns 1 when either endpoint is on or above the boundary.
double bridge_crossing_prob(double x0, double x1, double dt, const Line& boundary);

/// Same for |bridge| against the symmetric pair +boundary / -boundary, treating
/// the two crossings as independent events.
double reflected_bridge_crossing_prob(double x0, double x1, double dt, const Line& boundary);

/// Mills-ratio upper bound exp(-z^2/2) / (z sqrt(2 pi)) on P(N(0,1) >= z).
double gaussian_tail_bound(double z);

}  // namespace brbm
