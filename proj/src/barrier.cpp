#include "brbm/barrier.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "brbm/errors.hpp"
#include "brbm/stochastic.hpp"

namespace brbm {

namespace {

constexpr double kSkipThreshold = 1e-12;

struct Hermite {
    double s0, h, p0, m0, p1, m1;

    double value(double s) const {
        const double u = (s - s0) / h;
        const double u2 = u * u, u3 = u2 * u;
        return (2 * u3 - 3 * u2 + 1) * p0 + (u3 - 2 * u2 + u) * h * m0 + (-2 * u3 + 3 * u2) * p1 +
               (u3 - u2) * h * m1;
    }
    double second(double s) const {
        const double u = (s - s0) / h;
        return ((12 * u - 6) * p0 + (6 * u - 4) * h * m0 + (-12 * u + 6) * p1 + (6 * u - 2) * h * m1) / (h * h);
    }
};

Hermite blend_of(double t, double lo, double hi) {
    return {lo, hi - lo, kLogDelay * std::log(lo + 1.0), kLogDelay / (lo + 1.0), kLogDelay * std::log(t - hi + 1.0),
            -kLogDelay / (t - hi + 1.0)};
}

double crossing(double x0, double x1, double dt, const Line& line, bool reflected) {
    return reflected ? reflected_bridge_crossing_prob(x0, x1, dt, line) : bridge_crossing_prob(x0, x1, dt, line);
}

struct Pending {
    double birth;
    double position;
    bool alive_h;
    bool alive_gamma;
};

}  // namespace

BarrierSpec::BarrierSpec(double horizon, double offset) : t_(horizon), y_(offset) {
    if (!(horizon > 0.0)) throw std::domain_error("BarrierSpec: horizon must be positive");
    if (offset < 0.0) throw std::domain_error("BarrierSpec: offset must be nonnegative");
    beta_ = kSqrt2 - kLogDelay * std::log(t_) / t_ + y_ / t_;
    blend_lo_ = std::max(0.0, 0.5 * t_ - 1.0);
    blend_hi_ = std::min(t_, 0.5 * t_ + 1.0);
}

double BarrierSpec::curve(double s) const {
    if (s <= blend_lo_) return kLogDelay * std::log(s + 1.0);
    if (s >= blend_hi_) return kLogDelay * std::log(t_ - s + 1.0);
    return blend_of(t_, blend_lo_, blend_hi_).value(s);
}

double BarrierSpec::curve_second_derivative(double s) const {
    if (s < blend_lo_) return -kLogDelay / ((s + 1.0) * (s + 1.0));
    if (s > blend_hi_) return -kLogDelay / ((t_ - s + 1.0) * (t_ - s + 1.0));
    return blend_of(t_, blend_lo_, blend_hi_).second(s);
}

CensusCounts barrier_census(double horizon, double offset, RngStream& stream, double dt_path, bool reflected,
                            std::size_t guard) {
    if (!(horizon >= 1.0)) throw std::domain_error("barrier_census: requires t >= 1");
    if (offset < 0.0) throw std::domain_error("barrier_census: requires y >= 0");
    if (!(dt_path > 0.0)) throw std::domain_error("barrier_census: dt_path must be positive");

    const BarrierSpec spec(horizon, offset);
    const double t = horizon;
    const double beta = spec.slope();
    const auto level = [&](double x) { return reflected ? std::abs(x) : x; };
    const auto straight_line = [&](double s) { return Line{spec.straight(s), beta}; };
    const auto curved_chord = [&](double s0, double s1) {
        const double g0 = spec.curved(s0);
        return Line{g0, (spec.curved(s1) - g0) / (s1 - s0)};
    };

    CensusCounts counts;
    std::vector<Pending> pending{{0.0, 0.0, true, true}};
    std::size_t finished = 0;

    while (!pending.empty()) {
        Pending p = pending.back();
        pending.pop_back();

        double end = t;
        const double life = sample_exponential(stream, 1.0);
        if (p.birth + life < t) end = p.birth + life;
        const double span = end - p.birth;
        const double x_end = sample_gaussian(stream, p.position, span);

        // Whole-lifetime chord bound; refine only when it is not negligible.
        double bound = crossing(p.position, x_end, span, curved_chord(p.birth, end), reflected);
        if (p.alive_h) bound = std::max(bound, crossing(p.position, x_end, span, straight_line(p.birth), reflected));

        if (bound >= kSkipThreshold) {
            double s = p.birth;
            double x = p.position;
            while (s < end && (p.alive_h || p.alive_gamma)) {
                double next = (std::floor(s / dt_path) + 1.0) * dt_path;
                if (next <= s) next = s + dt_path;
                if (next > end - 1e-12 * dt_path) next = end;
                const double dt = next - s;
                double x_next = x_end;
                if (next < end) {
                    const double remaining = end - s;
                    x_next = sample_gaussian(stream, x + dt / remaining * (x_end - x), dt * (end - next) / remaining);
                }
                const double u = stream.uniform_open();
                if (p.alive_h && u < crossing(x, x_next, dt, straight_line(s), reflected)) p.alive_h = false;
                if (p.alive_gamma && u < crossing(x, x_next, dt, curved_chord(s, next), reflected))
                    p.alive_gamma = false;
                s = next;
                x = x_next;
            }
        }

        if (end < t) {
            if (p.alive_h || p.alive_gamma) {
                pending.push_back({end, x_end, p.alive_h, p.alive_gamma});
                pending.push_back({end, x_end, p.alive_h, p.alive_gamma});
            }
        } else {
            ++finished;
            const double v = level(x_end);
            if (p.alive_h && v >= spec.box_low() && v <= spec.h_box_high()) ++counts.h;
            if (p.alive_gamma && v >= spec.box_low() && v <= spec.gamma_box_high()) ++counts.gamma;
        }
        if (finished + pending.size() > guard)
            throw ResourceError("barrier_census: population exceeds guard of " + std::to_string(guard));
    }
    return counts;
}

}  // namespace brbm
