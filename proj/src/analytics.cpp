#include "brbm/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <set>
#include <stdexcept>

#include <Eigen/Dense>
#include <boost/math/distributions/binomial.hpp>

#include "brbm/errors.hpp"
#include "brbm/quadrature.hpp"

namespace brbm {

namespace {

double log_cosh(double z) {
    const double a = std::abs(z);
    return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

// Series evaluated as sum_n (-1)^n exp(log_scale + log prefactor - x^2/2t - c n^2 + log cosh(k n x)).
// No domain checks: callers validate, quadrature may touch x = a + bt.
SeriesValue abundo_series(double a, double b, double t, double x, int n_max, double log_scale) {
    const double c = 2.0 * a * (b + a / t);
    const double k = 2.0 * a / t;
    const double base = log_scale + 0.5 * std::log(2.0 / (kPi * t)) - x * x / (2.0 * t);
    const auto term = [&](int n) { return std::exp(base - c * n * n + log_cosh(k * n * x)); };
    double sum = term(0);
    double tail = 0.0;
    for (int n = 1; n <= n_max; ++n) tail += (n % 2 ? -2.0 : 2.0) * term(n);
    sum += tail;
    return {sum, 2.0 * term(n_max + 1)};
}

}  // namespace

Estimate mean_estimate(std::span<const double> samples) {
    Estimate e;
    e.n = samples.size();
    if (samples.empty()) return e;
    double sum = 0.0;
    for (double v : samples) sum += v;
    e.value = sum / e.n;
    if (e.n > 1) {
        double ss = 0.0;
        for (double v : samples) ss += (v - e.value) * (v - e.value);
        e.std_error = std::sqrt(ss / (e.n - 1) / e.n);
    }
    return e;
}

SeriesValue abundo_density(const AffineBoundary& boundary, double t, double x, int n_max) {
    if (!(t > 0.0)) throw std::domain_error("abundo_density: t must be positive");
    if (n_max < 1) throw std::domain_error("abundo_density: n_max must be >= 1");
    if (x < 0.0 || x >= boundary.at(t)) throw std::domain_error("abundo_density: requires 0 <= x < a + bt");
    return abundo_series(boundary.intercept(), boundary.slope(), t, x, n_max, 0.0);
}

double abundo_band_probability(const AffineBoundary& boundary, double t, double x_lo, double x_hi, int n_max) {
    if (!(t > 0.0)) throw std::domain_error("abundo_band_probability: t must be positive");
    if (x_lo < 0.0 || x_hi > boundary.at(t) || x_lo > x_hi)
        throw std::domain_error("abundo_band_probability: requires 0 <= x_lo <= x_hi <= a + bt");
    const double a = boundary.intercept(), b = boundary.slope();
    const auto f = [&](double x) { return abundo_series(a, b, t, x, n_max, 0.0).value; };
    return std::clamp(adaptive_simpson(f, x_lo, x_hi, 1e-10), 0.0, 1.0);
}

double expectation_H_R(double y, double t) {
    if (!(t > 0.0)) throw std::domain_error("expectation_H_R: t must be positive");
    if (t < 1.0 || y < 0.0 || y > std::sqrt(t))
        std::cerr << "warning: expectation_H_R(y=" << y << ", t=" << t
                  << ") outside t >= 1, 0 <= y <= sqrt(t); computing anyway\n";
    const double beta = kSqrt2 - kLogDelay * std::log(t) / t + y / t;
    if (!(beta > 0.0)) throw std::domain_error("expectation_H_R: barrier slope is not positive");
    const double lo = std::max(0.0, beta * t - 1.0);
    const double hi = beta * t;
    const auto f = [&](double x) { return abundo_series(1.0, beta, t, x, kDefaultSeriesTerms, t).value; };
    return std::max(0.0, adaptive_simpson(f, lo, hi, 1e-10));
}

ThetaSums theta_sums(int n_max) {
    if (n_max < 5) throw std::domain_error("theta_sums: n_max must be >= 5");
    const double r8 = std::sqrt(8.0);
    ThetaSums s;
    // Sum from the outside in so the small terms are accumulated first.
    for (int n = n_max; n >= -n_max; --n) {
        const double w = std::exp(-r8 * n * n + log_cosh(r8 * n));
        const double sign = (n % 2 == 0) ? 1.0 : -1.0;
        s.s1 += sign * w;
        s.s2 += sign * n * n * w;
    }
    return s;
}

QuantileEstimate quantile_estimate(std::span<const double> samples, double delta, double horizon) {
    if (samples.size() < 20) throw std::domain_error("quantile_estimate: needs at least 20 samples");
    if (!(delta > 0.0 && delta < 1.0)) throw std::domain_error("quantile_estimate: delta must lie in (0, 1)");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const auto n = sorted.size();
    const auto at_rank = [&](double rank) {  // 1-based, clamped
        const auto r = static_cast<std::size_t>(std::clamp(rank, 1.0, static_cast<double>(n)));
        return sorted[r - 1];
    };

    QuantileEstimate q;
    q.delta = delta;
    q.horizon = horizon;
    q.n = n;
    // Guard against n * delta landing a hair above an integer.
    const double k = std::ceil(static_cast<double>(n) * delta - 1e-9);
    q.value = at_rank(k);

    // Smallest rank k with P(Bin(n, delta) <= k) >= p.
    using RoundUp = boost::math::policies::policy<
        boost::math::policies::discrete_quantile<boost::math::policies::integer_round_up>>;
    const boost::math::binomial_distribution<double, RoundUp> ranks(static_cast<double>(n), delta);
    q.ci_low = std::min(q.value, at_rank(boost::math::quantile(ranks, 0.025)));
    q.ci_high = std::max(q.value, at_rank(boost::math::quantile(ranks, 0.975)));
    return q;
}

FrontierFit frontier_fit(std::span<const double> times, std::span<const double> medians) {
    if (times.size() != medians.size()) throw std::domain_error("frontier_fit: size mismatch");
    std::set<double> distinct;
    for (double t : times) {
        if (!(t > 0.0)) throw std::domain_error("frontier_fit: horizons must be positive");
        distinct.insert(t);
    }
    if (distinct.size() < 3) throw NumericalError("frontier_fit: rank-deficient design, fewer than 3 distinct horizons");

    const auto n = static_cast<Eigen::Index>(times.size());
    Eigen::MatrixXd design(n, 3);
    Eigen::VectorXd rhs(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        design(i, 0) = times[i];
        design(i, 1) = std::log(times[i]);
        design(i, 2) = 1.0;
        rhs(i) = medians[i];
    }
    const auto qr = design.colPivHouseholderQr();
    if (qr.rank() < 3) throw NumericalError("frontier_fit: rank-deficient design");
    const Eigen::Vector3d coef = qr.solve(rhs);
    const Eigen::VectorXd resid = rhs - design * coef;

    FrontierFit fit;
    fit.speed = coef(0);
    fit.log_coeff = coef(1);
    fit.intercept = coef(2);
    fit.residual_rms = std::sqrt(resid.squaredNorm() / static_cast<double>(n));
    return fit;
}

Estimate dependence_statistic(std::span<const Extremes> replicates, double x) {
    const auto n = replicates.size();
    if (n < 100) throw std::domain_error("dependence_statistic: needs at least 100 replicates");
    std::size_t joint = 0, upper = 0;
    for (const auto& e : replicates) {
        const bool below = e.max <= x;
        upper += below;
        joint += below && e.min >= -x;
    }
    const double nd = static_cast<double>(n);
    const auto delta = [](double j, double p) { return j - p * p; };

    Estimate est;
    est.n = n;
    est.value = delta(joint / nd, upper / nd);

    // Leave-one-out values depend only on the (joint, upper) indicator pair.
    std::vector<double> loo;
    loo.reserve(n);
    for (const auto& e : replicates) {
        const bool below = e.max <= x;
        const bool both = below && e.min >= -x;
        loo.push_back(delta((joint - both) / (nd - 1.0), (upper - below) / (nd - 1.0)));
    }
    double mean = 0.0;
    for (double v : loo) mean += v;
    mean /= nd;
    double ss = 0.0;
    for (double v : loo) ss += (v - mean) * (v - mean);
    est.std_error = std::sqrt((nd - 1.0) / nd * ss);
    return est;
}

double pair_overlap_exponent(double a, double b, double r) {
    if (!(a < b)) throw std::domain_error("pair_overlap_exponent: requires a < b");
    if (!(r > 0.0 && r < 1.0)) throw std::domain_error("pair_overlap_exponent: r must lie in (0, 1)");
    return 2.0 - r - (b - a) * (b - a) / (4.0 * (1.0 - r));
}

std::size_t count_in(const PopulationSnapshot& snap, Interval domain) {
    std::size_t c = 0;
    for (const auto& p : snap.particles) c += domain.contains(p.position);
    return c;
}

WatanabeResult watanabe_ratio(std::span<const std::vector<PopulationSnapshot>> runs, Interval domain, double t1,
                              double t2) {
    if (!std::isfinite(domain.lo) || !std::isfinite(domain.hi) || !(domain.hi > domain.lo))
        throw std::domain_error("watanabe_ratio: domain must be a bounded nonempty interval");
    if (!(t2 > t1 && t1 > 0.0)) throw std::domain_error("watanabe_ratio: requires 0 < t1 < t2");

    const auto find = [](const std::vector<PopulationSnapshot>& run, double t) -> const PopulationSnapshot& {
        for (const auto& s : run)
            if (std::abs(s.horizon - t) <= 1e-12 * std::max(1.0, t)) return s;
        throw std::domain_error("watanabe_ratio: run has no snapshot at the requested time");
    };

    WatanabeResult out;
    for (const auto& run : runs) {
        const auto& early = find(run, t1);
        const auto& late = find(run, t2);
        if (early.genealogy != late.genealogy)
            throw std::domain_error("watanabe_ratio: snapshots are not from the same replicate");
        const auto n1 = count_in(early, domain);
        if (n1 == 0) {
            ++out.excluded;
            continue;
        }
        const auto n2 = count_in(late, domain);
        const double log_ratio = std::log(static_cast<double>(n2)) + 0.5 * std::log(t2) - t2 -
                                 (std::log(static_cast<double>(n1)) + 0.5 * std::log(t1) - t1);
        out.ratios.push_back(n2 == 0 ? 0.0 : std::exp(log_ratio));
    }
    return out;
}

double median(std::vector<double> values) {
    if (values.empty()) throw std::domain_error("median: empty input");
    const auto mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + mid, values.end());
    if (values.size() % 2) return values[mid];
    const double hi = values[mid];
    const double lo = *std::max_element(values.begin(), values.begin() + mid);
    return 0.5 * (lo + hi);
}

}  // namespace brbm
