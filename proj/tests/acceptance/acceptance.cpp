// Acceptance criteria. Each criterion prints exactly one PASS/FAIL line,
// optionally preceded by "  info:" lines with the measured quantities.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "brbm/analytics.hpp"
#include "brbm/barrier.hpp"
#include "brbm/branching.hpp"
#include "brbm/experiment.hpp"
#include "brbm/fkpp.hpp"
#include "brbm/parallel.hpp"
#include "brbm/rng.hpp"
#include "brbm/stochastic.hpp"

using namespace brbm;

namespace {

constexpr std::uint64_t kSeed = 20261016;

struct Outcome {
    bool pass = false;
    std::string summary;
};

class Report {
public:
    template <class... Args>
    void info(const char* fmt, Args... args) {
        char buf[512];
        std::snprintf(buf, sizeof buf, fmt, args...);
        std::cout << "  info: " << buf << '\n';
    }
    void check(bool ok, const std::string& what) {
        pass_ = pass_ && ok;
        if (!parts_.empty()) parts_ += "; ";
        parts_ += what + (ok ? "" : " [miss]");
    }
    Outcome done() const { return {pass_, parts_}; }

private:
    bool pass_ = true;
    std::string parts_;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

double centering(double t) { return kSqrt2 * t - kLogDelay * std::log(t); }

std::vector<double> maxima_of(const std::vector<Extremes>& e) {
    std::vector<double> m;
    for (const auto& x : e) m.push_back(x.max);
    return m;
}

// ---------------------------------------------------------------- criteria

Outcome frontier_centering() {
    Report r;
    const std::vector<double> ts{6, 8, 10, 12};
    const auto samples = sample_displacements(ts, 500, kSeed);
    std::vector<double> med, med_r, se, se_r;
    for (const auto& s : samples) {
        const auto q = quantile_estimate(maxima_of(s.signed_extremes), 0.5, s.horizon);
        const auto qr = quantile_estimate(s.reflected_max, 0.5, s.horizon);
        med.push_back(q.value);
        se.push_back(q.std_error());
        med_r.push_back(qr.value);
        se_r.push_back(qr.std_error());
        r.info("t=%g median M=%.4f (ci %.4f..%.4f)  median M^R=%.4f (ci %.4f..%.4f)", s.horizon, q.value, q.ci_low,
               q.ci_high, qr.value, qr.ci_low, qr.ci_high);
    }
    for (int k = 0; k < 2; ++k) {
        const auto& m = k == 0 ? med : med_r;
        const auto fit = frontier_fit(ts, m);
        const auto err = frontier_fit_errors(ts, k == 0 ? se : se_r);
        const char* tag = k == 0 ? "BBM" : "BRBM";
        r.info("%s fit: speed %.4f +- %.4f, log_coeff %.4f +- %.4f, intercept %.4f, rms %.4f", tag, fit.speed, err[0],
               fit.log_coeff, err[1], fit.intercept, fit.residual_rms);
        r.check(std::abs(fit.speed - kSqrt2) <= 0.03, std::string(tag) + fmt(" speed %.4f in sqrt2+-0.03", fit.speed));
        r.check(std::abs(fit.log_coeff + 1.0607) <= 0.35,
                std::string(tag) + fmt(" log_coeff %.4f in -1.0607+-0.35", fit.log_coeff));
    }
    return r.done();
}

Outcome stochastic_dominance() {
    Report r;
    const std::size_t reps = 10000;
    std::vector<int> violation(reps);
    std::vector<double> m(reps), mr(reps);
    parallel_for(reps, 0, [&](std::size_t i) {
        RngStream s(kSeed, 200000 + i);
        const auto snap = simulate_bbm(6.0, s);
        const double a = extremes(snap).max;
        const double b = extremes(reflect_population(snap)).max;
        violation[i] = b < a;
        m[i] = a;
        mr[i] = b;
    });
    const int v = std::accumulate(violation.begin(), violation.end(), 0);
    r.check(v == 0, fmt("%g violations of M^R >= M over 1e4 replicates at t=6", v));

    const double gap6 = median(mr) - median(m);
    const std::vector<double> t12{12.0};
    const auto s12 = sample_displacements(t12, 2000, kSeed, kDefaultGuard, 0, 0.0, 300000).front();
    const double gap12 = median(s12.reflected_max) - median(maxima_of(s12.signed_extremes));
    r.info("median gap M^R - M: t=6 %.4f (1e4 reps), t=12 %.4f (2000 reps)", gap6, gap12);
    r.check(std::abs(gap12 - gap6) < 0.4, fmt("|gap(12) - gap(6)| = %.4f < 0.4", std::abs(gap12 - gap6)));
    return r.done();
}

Outcome independence_decay() {
    Report r;
    const std::vector<double> ts{4, 10};
    const auto samples = sample_displacements(ts, 2000, kSeed, kDefaultGuard, 0, 0.0, 400000);
    std::vector<Estimate> d;
    for (const auto& s : samples) {
        d.push_back(dependence_statistic(s.signed_extremes, centering(s.horizon)));
        r.info("t=%g x=%.4f delta=%.5f +- %.5f", s.horizon, centering(s.horizon), d.back().value, d.back().std_error);
    }
    r.info("|delta(10)| - |delta(4)| = %.5f", std::abs(d[1].value) - std::abs(d[0].value));
    r.check(d[1].value < d[0].value, fmt("delta(10) %.5f < delta(4) %.5f", d[1].value, d[0].value));
    r.check(d[1].value < 0.05, fmt("delta(10) %.5f < 0.05", d[1].value));
    return r.done();
}

Outcome abundo_vs_mc() {
    Report r;
    const AffineBoundary b(1, 1);
    const double series = abundo_band_probability(b, 1.0, 0.4, 0.6);
    const auto mc = mc_band_survival(b, 1.0, Interval{0.4, 0.6}, 1000000, 1e-3, kSeed);
    r.info("series %.7f  mc %.7f +- %.7f", series, mc.value, mc.std_error);
    const double z = std::abs(series - mc.value) / mc.std_error;
    r.check(z <= 3.0, fmt("|series - mc| = %.2f SE <= 3", z));
    return r.done();
}

Outcome theta_identities() {
    Report r;
    const auto a = theta_sums(10);
    const auto b = theta_sums(20);
    r.info("S1 = %.3e, S2 = %.15f (n_max 10), %.15f (n_max 20)", a.s1, a.s2, b.s2);
    r.check(std::abs(a.s1) < 1e-12 && std::abs(b.s1) < 1e-12, fmt("|S1| = %.1e < 1e-12", std::abs(a.s1)));
    r.check(std::abs(a.s2) > 0.9, fmt("|S2| = %.6f > 0.9", std::abs(a.s2)));
    r.check(std::abs(a.s2 - b.s2) < 1e-12, fmt("|S2(20) - S2(10)| = %.1e < 1e-12", std::abs(a.s2 - b.s2)));
    return r.done();
}

Outcome many_to_one() {
    Report r;
    std::vector<double> scaled;
    for (double y : {0.0, 1.0, 2.0, 3.0, 4.0}) {
        scaled.push_back(std::exp(kSqrt2 * y) * expectation_H_R(y, 20.0));
        r.info("y=%g  e^{sqrt2 y} E H^R(y,20) = %.5f", y, scaled.back());
    }
    const auto [lo, hi] = std::minmax_element(scaled.begin(), scaled.end());
    r.check(*hi / *lo <= 5.0, fmt("max/min = %.3f <= 5", *hi / *lo));

    const auto census = sample_census(8.0, 0.0, 2000, kSeed, kDefaultPathStep, true, kDefaultGuard, 0, 500000);
    const auto h = mean_estimate(census.h);
    const double e = expectation_H_R(0.0, 8.0);
    r.info("t=8 y=0: formula %.5f, census %.5f +- %.5f", e, h.value, h.std_error);
    r.check(std::abs(h.value - e) <= 3.0 * h.std_error,
            fmt("|census - formula| = %.2f SE <= 3", std::abs(h.value - e) / h.std_error));
    return r.done();
}

Outcome gamma_envelope() {
    Report r;
    std::vector<double> scaled;
    std::uint64_t base = 600000;
    for (double y : {0.0, 1.0, 2.0, 3.0}) {
        const auto c = sample_census(8.0, y, 2000, kSeed, kDefaultPathStep, true, kDefaultGuard, 0, base);
        base += 2000;
        const auto g = mean_estimate(c.gamma);
        const double f = std::exp(kSqrt2 * y) / ((y + 2.0) * (y + 2.0));
        scaled.push_back(g.value * f);
        r.info("y=%g  mean Gamma %.4f +- %.4f, scaled %.4f +- %.4f", y, g.value, g.std_error, g.value * f,
               g.std_error * f);
    }
    const auto [lo, hi] = std::minmax_element(scaled.begin(), scaled.end());
    r.check(*lo > 0.0 && *hi / *lo <= 10.0, fmt("max/min = %.3f <= 10", *hi / *lo));
    return r.done();
}

Outcome population_law() {
    Report r;
    const std::size_t reps = 100000;
    for (double t : {1.0, 2.0, 4.0}) {
        std::vector<double> n(reps);
        parallel_for(reps, 0, [&](std::size_t i) {
            RngStream s(kSeed, 700000 + static_cast<std::uint64_t>(t) * reps + i);
            n[i] = static_cast<double>(simulate_bbm(t, s).size());
        });
        const auto e = mean_estimate(n);
        const double z = std::abs(e.value - std::exp(t)) / e.std_error;
        r.info("t=%g mean #N %.5f +- %.5f (e^t = %.5f)", t, e.value, e.std_error, std::exp(t));
        r.check(z <= 3.0, fmt("t=%g mean within %.2f SE", t, z));

        if (t == 1.0) {
            std::sort(n.begin(), n.end());
            const double p = std::exp(-1.0);
            double ks = 0.0;
            for (int k = 1; k <= 60; ++k) {
                const double emp = static_cast<double>(std::upper_bound(n.begin(), n.end(), k) - n.begin()) / reps;
                ks = std::max(ks, std::abs(emp - (1.0 - std::pow(1.0 - p, k))));
            }
            r.check(ks < 0.005, fmt("KS vs Geometric(e^-1) %.5f < 0.005", ks));
        }
    }
    return r.done();
}

Outcome genealogy_covariance() {
    Report r;
    const std::size_t pairs = 10000;
    std::vector<double> q(pairs), prod(pairs);
    // One uniformly chosen pair of distinct particles per replicate.
    parallel_for(pairs, 0, [&](std::size_t i) {
        for (std::uint64_t attempt = 0;; ++attempt) {
            RngStream s(kSeed + attempt, 800000 + i);
            const auto snap = simulate_bbm(6.0, s);
            if (snap.size() < 2) continue;
            const auto a = static_cast<std::size_t>(s.uniform_open() * snap.size());
            auto b = static_cast<std::size_t>(s.uniform_open() * (snap.size() - 1));
            if (b >= a) ++b;
            q[i] = mrca_time(*snap.genealogy, snap.particles[a].id, snap.particles[b].id);
            prod[i] = snap.particles[a].position * snap.particles[b].position;
            return;
        }
    });
    const double mq = std::accumulate(q.begin(), q.end(), 0.0) / pairs;
    const double mp = std::accumulate(prod.begin(), prod.end(), 0.0) / pairs;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < pairs; ++i) {
        sxy += (q[i] - mq) * (prod[i] - mp);
        sxx += (q[i] - mq) * (q[i] - mq);
    }
    const double slope = sxy / sxx;
    double rss = 0.0;
    for (std::size_t i = 0; i < pairs; ++i) {
        const double res = prod[i] - mp - slope * (q[i] - mq);
        rss += res * res;
    }
    const double se = std::sqrt(rss / (pairs - 2) / sxx);
    r.info("slope %.4f +- %.4f, intercept %.4f, mean Q %.3f", slope, se, mp - slope * mq, mq);
    r.check(std::abs(slope - 1.0) <= 0.1, fmt("slope %.4f in 1+-0.1", slope));
    return r.done();
}

Outcome watanabe_and_minimal() {
    Report r;
    const std::vector<double> obs{8.0, 11.0};
    std::vector<std::vector<PopulationSnapshot>> runs(100);
    parallel_for(runs.size(), 0, [&](std::size_t i) {
        RngStream s(kSeed, 900000 + i);
        runs[i] = simulate_bbm_observed(obs, s);
    });
    const auto w = watanabe_ratio(runs, Interval{-1, 1}, 8.0, 11.0);
    const double med = median(w.ratios);
    r.info("Watanabe: %zu ratios, %zu excluded, median %.4f", w.ratios.size(), w.excluded, med);
    r.check(med >= 0.7 && med <= 1.3, fmt("median ratio %.4f in [0.7, 1.3]", med));

    const std::vector<double> ts{4, 8, 10};
    const auto samples = sample_displacements(ts, 500, kSeed, kDefaultGuard, 0, 0.0, 1000000);
    std::vector<double> medians;
    for (const auto& s : samples) {
        medians.push_back(median(s.reflected_min));
        r.info("t=%g median m^R = %.6f", s.horizon, medians.back());
    }
    r.check(medians[0] > medians[1] && medians[1] > medians[2], "minimal medians decreasing");
    r.check(medians[2] < 0.01, fmt("median m^R_10 = %.6f < 0.01", medians[2]));
    return r.done();
}

Outcome pde_front() {
    Report r;
    GridConfig g;
    g.dx = 0.05;
    g.dt = 0.05;
    g.store_interval = 0.5;
    const std::vector<double> window{20.0, 30.0};
    const double corr = kLogDelay * std::log(30.0 / 20.0);

    const auto lf = line_fronts(g, 30.0, window, 0.5);
    const double line_speed = (lf[1] - lf[0]) / 10.0;
    r.info("line: front(20) %.5f front(30) %.5f speed %.5f, with the log drift added back %.5f", lf[0], lf[1],
           line_speed, line_speed + corr / 10.0);
    r.check(std::abs(line_speed - kSqrt2) <= 0.02, fmt("line speed %.5f in sqrt2+-0.02", line_speed));

    const auto hf = halfline_fronts(g, window, 0.5, 0.1);
    const double half_speed = (hf[1] - hf[0]) / 10.0;
    r.info("half-line: front(20) %.5f front(30) %.5f speed %.5f, with the log drift added back %.5f", hf[0], hf[1],
           half_speed, half_speed + corr / 10.0);
    r.check(std::abs(half_speed - kSqrt2) <= 0.02, fmt("half-line speed %.5f in sqrt2+-0.02", half_speed));

    // McKean: u(6, x) = P(M_6 <= x)
    const std::vector<double> t6{6.0};
    const auto s = sample_displacements(t6, 10000, kSeed, kDefaultGuard, 0, 0.0, 1100000).front();
    auto m = maxima_of(s.signed_extremes);
    std::sort(m.begin(), m.end());
    const Grid1D grid(-20, kSqrt2 * 6 + 20, g.dx, g.dt, 6.0);
    const auto& u = solve_fkpp_line(grid, 0.5).at(6.0);
    double excess = -INFINITY, sup = 0.0;
    for (double x = -2.0; x <= 12.0 + 1e-9; x += 0.1) {
        const double p = static_cast<double>(std::upper_bound(m.begin(), m.end(), x) - m.begin()) / m.size();
        const double se = std::sqrt(p * (1.0 - p) / m.size());
        const double d = std::abs(u.value_at(x) - p);
        sup = std::max(sup, d);
        excess = std::max(excess, d - 3.0 * se - 0.01);
    }
    r.info("MC vs PDE at t=6: sup distance %.5f", sup);
    r.check(excess <= 0.0, fmt("sup distance within 3 SE + 0.01 (worst margin %.5f)", excess));
    return r.done();
}

Outcome renewal() {
    Report r;
    const auto residual = [](double dx) {
        const Grid1D grid(0.0, 8.0 + 20.0, dx, dx, 5.0);
        const auto h = solve_fkpp_halfline(grid, 8.0, 0.05);
        std::vector<RenewalPoint> pts;
        for (double y : {0.0, 1.0, 2.0}) pts.push_back({5.0, 8.0, y});
        return renewal_residual(h, pts);
    };
    const double coarse = residual(0.025);
    const double fine = residual(0.0125);
    r.info("max residual at t=5 x=8 y in {0,1,2}: dx 0.025 -> %.3e, dx 0.0125 -> %.3e", coarse, fine);
    r.check(coarse < 5e-3, fmt("residual %.3e < 5e-3", coarse));
    r.check(fine < coarse, "halving dx reduces it");
    return r.done();
}

Outcome trend_only() {
    Report r;
    // The almost-sure constants are reference lines only; what is asserted is
    // the profile-distance trend.
    std::vector<double> xs;
    for (double x = 0.0; x <= kSqrt2 * 15.0 + 10.0 + 1e-9; x += 0.1) xs.push_back(x);
    const auto fam = solve_profile_family(xs, 0.05, 0.05, 15.0, 0.5);
    const std::vector<double> ys{0.0, 2.0}, ts{5.0, 10.0, 15.0};
    const auto d = profile_convergence(fam, ys, ts, 0.5);
    bool flagged = false, monotone = true;
    for (std::size_t k = 0; k < d.size(); ++k) {
        r.info("t=%g centred sup distance y=0 vs y=2: %.6f%s", d[k].time, d[k].distance, d[k].flagged ? " (flagged)" : "");
        flagged = flagged || d[k].flagged;
        if (k > 0 && d[k].distance > d[k - 1].distance) monotone = false;
    }
    r.info("reference constants (not asserted): liminf %.5f, limsup %.5f", -kLogDelay, -1.0 / (2.0 * kSqrt2));
    r.check(!flagged, "all fronts formed");
    r.check(monotone, "distances nonincreasing over t = 5, 10, 15");
    return r.done();
}

struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> list{
        {1, "frontier centering", frontier_centering},
        {2, "stochastic dominance", stochastic_dominance},
        {3, "two-sided independence decay", independence_decay},
        {4, "Abundo series vs Monte Carlo", abundo_vs_mc},
        {5, "theta identities", theta_identities},
        {6, "many-to-one bracketing", many_to_one},
        {7, "Gamma envelope", gamma_envelope},
        {8, "population law", population_law},
        {9, "genealogy covariance", genealogy_covariance},
        {10, "Watanabe ratio and minimal displacement", watanabe_and_minimal},
        {11, "PDE front speed and McKean bridge", pde_front},
        {12, "renewal residual", renewal},
        {13, "trend-only substitutes", trend_only},
    };
    return list;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    int only = 0;
    app.add_option("--criterion", only, "run a single criterion (1-13)")->check(CLI::Range(1, 13));
    CLI11_PARSE(app, argc, argv);

    int failed = 0;
    for (const auto& c : criteria()) {
        if (only != 0 && c.id != only) continue;
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << "): " << o.summary
                  << std::endl;
        failed += !o.pass;
    }
    return failed == 0 ? 0 : 1;
}
