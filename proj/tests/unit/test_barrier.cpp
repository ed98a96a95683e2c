#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <vector>

#include "brbm/analytics.hpp"
#include "brbm/barrier.hpp"
#include "brbm/experiment.hpp"
#include "brbm/rng.hpp"
#include "brbm/stochastic.hpp"

using namespace brbm;

TEST_CASE("barrier slope and log branches") {
    for (double t : {4.0, 8.0, 20.0}) {
        for (double y : {0.0, 1.0, 2.0}) {
            const BarrierSpec b(t, y);
            CHECK(b.slope() == doctest::Approx(kSqrt2 - kLogDelay * std::log(t) / t + y / t).epsilon(1e-15));
            for (double s = 0.0; s <= t / 2 - 1; s += 0.25)
                CHECK(b.curve(s) == doctest::Approx(kLogDelay * std::log(s + 1)).epsilon(1e-14));
            for (double s = t / 2 + 1; s <= t; s += 0.25)
                CHECK(b.curve(s) == doctest::Approx(kLogDelay * std::log(t - s + 1)).epsilon(1e-14));
            CHECK(b.straight(0.0) == 1.0);
            CHECK(b.curved(t) == doctest::Approx(b.slope() * t + y + 1.0));
            CHECK(b.box_low() == doctest::Approx(b.slope() * t - 1.0));
            CHECK(b.h_box_high() == doctest::Approx(b.slope() * t));
            CHECK(b.gamma_box_high() == doctest::Approx(b.slope() * t + y));
        }
    }
}

TEST_CASE("blend is C1 and its curvature stays in [-10/t, 0]") {
    for (double t = 8.0; t <= 60.0; t += 1.0) {
        const BarrierSpec b(t, 0.5);
        const double lo = b.blend_begin(), hi = b.blend_end();
        CHECK(lo == doctest::Approx(t / 2 - 1));
        CHECK(hi == doctest::Approx(t / 2 + 1));
        const double h = 1e-6;
        for (double s : {lo, hi}) {
            CHECK(b.curve(s - h) == doctest::Approx(b.curve(s + h)).epsilon(1e-5));
            const double dl = (b.curve(s) - b.curve(s - h)) / h;
            const double dr = (b.curve(s + h) - b.curve(s)) / h;
            CHECK(dl == doctest::Approx(dr).epsilon(1e-4));
        }
        for (double s = 0.0; s <= t; s += t / 400.0) CHECK(b.curve_second_derivative(s) <= 0.0);
        for (double s = lo; s <= hi; s += (hi - lo) / 100.0) CHECK(b.curve_second_derivative(s) >= -10.0 / t);
        // the reported curvature matches a finite difference on the blend
        const double m = 0.5 * (lo + hi), e = 1e-3;
        const double fd = (b.curve(m + e) - 2 * b.curve(m) + b.curve(m - e)) / (e * e);
        CHECK(fd == doctest::Approx(b.curve_second_derivative(m)).epsilon(1e-4));
    }
}

TEST_CASE("census argument checks") {
    RngStream s(1, 0);
    CHECK_THROWS_AS(barrier_census(0.5, 0.0, s), std::domain_error);
    CHECK_NOTHROW(barrier_census(4.0, 2.5, s));
    CHECK_THROWS_AS(barrier_census(4.0, -0.1, s), std::domain_error);
    CHECK_THROWS_AS(barrier_census(4.0, 1.0, s, 0.0), std::domain_error);
}

TEST_CASE("Gamma counts dominate H counts when y = 0") {
    // With y = 0 the curved barrier lies above the straight one and the boxes coincide.
    for (int r = 0; r < 200; ++r) {
        RngStream s(2, r);
        const auto c = barrier_census(5.0, 0.0, s);
        REQUIRE(c.gamma >= c.h);
    }
}

TEST_CASE("census is reproducible") {
    RngStream a(3, 5), b(3, 5);
    const auto ca = barrier_census(6.0, 1.0, a);
    const auto cb = barrier_census(6.0, 1.0, b);
    CHECK(ca.h == cb.h);
    CHECK(ca.gamma == cb.gamma);
}

TEST_CASE("census mean agrees with the many-to-one formula") {
    const double t = 5.0;
    for (double y : {0.0, 1.0}) {
        const auto s = sample_census(t, y, 4000, 4, kDefaultPathStep, true, kDefaultGuard, 0,
                                     static_cast<std::uint64_t>(y * 100000));
        const auto h = mean_estimate(s.h);
        CHECK(std::abs(h.value - expectation_H_R(y, t)) < 3.0 * h.std_error);
    }
}

TEST_CASE("halving dt_path moves census means by less than 2 standard errors") {
    const double t = 5.0, y = 1.0;
    const std::size_t reps = 4000;
    const auto a = sample_census(t, y, reps, 5, 2e-2);
    const auto b = sample_census(t, y, reps, 6, 1e-2);
    for (auto member : {&CensusSample::h, &CensusSample::gamma}) {
        const auto ea = mean_estimate(a.*member);
        const auto eb = mean_estimate(b.*member);
        const double se = std::hypot(ea.std_error, eb.std_error);
        CHECK(std::abs(ea.value - eb.value) < 2.0 * se);
    }
}

TEST_CASE("reflected census counts exceed signed ones on average") {
    const auto ref = sample_census(5.0, 0.0, 2000, 7, kDefaultPathStep, true);
    const auto sig = sample_census(5.0, 0.0, 2000, 7, kDefaultPathStep, false);
    // the reflected box admits both signs; the extra kills from below cost less than that doubling
    CHECK(mean_estimate(ref.h).value > mean_estimate(sig.h).value);
}
