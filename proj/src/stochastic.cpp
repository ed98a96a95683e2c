#include "brbm/stochastic.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace brbm {

AffineBoundary::AffineBoundary(double intercept, double slope) : a_(intercept), b_(slope) {
    if (!(intercept > 0.0) || !(slope > 0.0))
        throw std::domain_error("AffineBoundary: intercept and slope must be positive");
}

double sample_gaussian(RngStream& stream, double mean, double variance) {
    if (!(variance >= 0.0)) throw std::domain_error("sample_gaussian: negative variance");
    if (variance == 0.0) return mean;
    return mean + std::sqrt(variance) * stream.standard_normal();
}

double sample_exponential(RngStream& stream, double rate) {
    if (!(rate > 0.0)) throw std::domain_error("sample_exponential: rate must be positive");
    return -std::log(stream.uniform_open()) / rate;
}

double reflected_density(double s, double x, double t, double y) {
    if (!(t > s)) throw std::domain_error("reflected_density: requires t > s");
    if (x < 0.0 || y < 0.0) throw std::domain_error("reflected_density: negative position");
    const double v = t - s;
    const double norm = 1.0 / std::sqrt(2.0 * kPi * v);
    return norm * (std::exp(-(y - x) * (y - x) / (2.0 * v)) + std::exp(-(y + x) * (y + x) / (2.0 * v)));
}

double bridge_crossing_prob(double x0, double x1, double dt, const Line& boundary) {
    if (!(dt > 0.0)) throw std::domain_error("bridge_crossing_prob: dt must be positive");
    const double d0 = boundary.at(0.0) - x0;
    const double d1 = boundary.at(dt) - x1;
    if (d0 <= 0.0 || d1 <= 0.0) return 1.0;
    return std::exp(-2.0 * d0 * d1 / dt);
}

double reflected_bridge_crossing_prob(double x0, double x1, double dt, const Line& boundary) {
    const double upper = bridge_crossing_prob(x0, x1, dt, boundary);
    if (upper == 1.0) return 1.0;
    const double lower = bridge_crossing_prob(-x0, -x1, dt, boundary);
    return 1.0 - (1.0 - upper) * (1.0 - lower);
}

double gaussian_tail_bound(double z) {
    if (!(z > 0.0)) throw std::domain_error("gaussian_tail_bound: z must be positive");
    return std::exp(-0.5 * z * z) / (z * std::sqrt(2.0 * kPi));
}

}  // namespace brbm
