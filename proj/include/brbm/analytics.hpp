#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "brbm/branching.hpp"
#include "brbm/stochastic.hpp"

namespace brbm {

/// A statistic with its Monte Carlo standard error and sample size.
struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t n = 0;
};

Estimate mean_estimate(std::span<const double> samples);

inline constexpr int kDefaultSeriesTerms = 12;

struct SeriesValue {
    double value = 0.0;
    /// Magnitude of the first omitted term pair.
    double truncation_bound = 0.0;
};

/// Density of |B_t| on the event that |B| stayed below a + b s on [0, t],
/// summed symmetrically over |n| <= n_max.
SeriesValue abundo_density(const AffineBoundary& boundary, double t, double x, int n_max = kDefaultSeriesTerms);

/// P(survive below a + b s up to t and |B_t| in [x_lo, x_hi]).
double abundo_band_probability(const AffineBoundary& boundary, double t, double x_lo, double x_hi,
                               int n_max = kDefaultSeriesTerms);

/// Many-to-one expectation of the straight-barrier census H for the reflected
/// system: e^t P(tau_{1,beta} >= t, |B_t| in [beta t - 1, beta t]).
/// Evaluated in log-space; warns on stderr outside t >= 1, y in [0, sqrt t].
double expectation_H_R(double y, double t);

struct ThetaSums {
    double s1 = 0.0;
    double s2 = 0.0;
};

/// S1 = sum (-1)^n e^{-sqrt8 n^2} cosh(sqrt8 n), S2 = same weighted by n^2,
/// over |n| <= n_max.
ThetaSums theta_sums(int n_max);

struct QuantileEstimate {
    double delta = 0.0;
    double horizon = 0.0;
    double value = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::size_t n = 0;

    /// Normal-equivalent standard error read off the 95% interval.
    double std_error() const { return (ci_high - ci_low) / (2.0 * 1.959963984540054); }
};

/// Empirical delta-quantile: the order statistic x_(ceil(n delta)), with a
/// distribution-free 95% interval from binomial(n, delta) order-statistic
/// ranks.
QuantileEstimate quantile_estimate(std::span<const double> samples, double delta, double horizon = 0.0);

struct FrontierFit {
    double speed = 0.0;
    double log_coeff = 0.0;
    double intercept = 0.0;
    double residual_rms = 0.0;
};

/// Least squares of median(t) against (t, log t, 1).
FrontierFit frontier_fit(std::span<const double> times, std::span<const double> medians);

/// P(M <= x, m >= -x) - P(M <= x)^2 with a jackknife standard error.
/// Each entry holds the signed (max, min) of one replicate.
Estimate dependence_statistic(std::span<const Extremes> replicates, double x);

/// 2 - r - (b-a)^2 / (4 (1-r)): growth exponent of the expected number of
/// pairs in clusters a and b whose MRCA lies in [rt, t].
double pair_overlap_exponent(double a, double b, double r);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double length() const { return hi - lo; }
    bool contains(double x) const { return x >= lo && x <= hi; }
};

std::size_t count_in(const PopulationSnapshot& snap, Interval domain);

struct WatanabeResult {
    std::vector<double> ratios;
    std::size_t excluded = 0;
};

/// Per replicate, [N_D(t2) sqrt(t2) e^{-t2}] / [N_D(t1) sqrt(t1) e^{-t1}].
///
/// Each run must contain nested snapshots (same genealogy) at t1 and t2.
/// Replicates with N_D(t1) = 0 are excluded and counted. Unbounded D is
/// rejected.
WatanabeResult watanabe_ratio(std::span<const std::vector<PopulationSnapshot>> runs, Interval domain, double t1,
                              double t2);

double median(std::vector<double> values);

}  // namespace brbm
