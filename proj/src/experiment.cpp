#include "brbm/experiment.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include <Eigen/Dense>

#include "brbm/barrier.hpp"
#include "brbm/errors.hpp"
#include "brbm/parallel.hpp"
#include "brbm/stochastic.hpp"

namespace brbm {

namespace {

constexpr std::array<std::string_view, 9> kNames = {"frontier", "dependence", "barrier",  "abundo", "watanabe",
                                                    "minimal",  "pde-front",  "renewal", "profile"};

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

std::string fmt_param(std::initializer_list<std::pair<const char*, double>> kv) {
    std::ostringstream os;
    os << std::setprecision(10);
    bool first = true;
    for (const auto& [k, v] : kv) {
        if (!first) os << ';';
        os << k << '=' << v;
        first = false;
    }
    return os.str();
}

class RowSink {
public:
    RowSink(ResultTable& table, std::string_view experiment) : table_(table), experiment_(experiment) {}

    void start() { t0_ = Clock::now(); }
    void add(const std::string& params, const std::string& stat, double value, double se, std::size_t n) {
        const double wall = std::chrono::duration<double>(Clock::now() - t0_).count();
        table_.rows.push_back({experiment_, params, stat, value, se, n, wall});
    }
    void add(const std::string& params, const std::string& stat, const Estimate& e) {
        add(params, stat, e.value, e.std_error, e.n);
    }

private:
    ResultTable& table_;
    std::string experiment_;
    Clock::time_point t0_ = Clock::now();
};

double centering(double t) { return kSqrt2 * t - kLogDelay * std::log(t); }

// ---------------------------------------------------------------- config

class FieldReader {
public:
    explicit FieldReader(const json& doc) : doc_(doc) {}

    template <class T>
    void read(const char* key, T& out) {
        seen_.insert(key);
        if (!doc_.contains(key)) return;
        try {
            out = doc_.at(key).get<T>();
        } catch (const std::exception& e) {
            errors_.push_back(std::string(key) + ": wrong type (" + e.what() + ")");
        }
    }
    void read_interval(const char* key, Interval& out) {
        std::vector<double> v;
        read(key, v);
        if (!doc_.contains(key)) return;
        if (v.size() != 2)
            errors_.push_back(std::string(key) + ": expected [lo, hi]");
        else
            out = {v[0], v[1]};
    }
    void check(bool ok, const std::string& message) {
        if (!ok) errors_.push_back(message);
    }
    void reject_unknown() {
        for (auto it = doc_.begin(); it != doc_.end(); ++it)
            if (!seen_.count(it.key())) errors_.push_back(it.key() + ": unknown key");
    }
    std::vector<std::string>& errors() { return errors_; }

private:
    const json& doc_;
    std::set<std::string> seen_;
    std::vector<std::string> errors_;
};

bool ascending(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] > v[i - 1])) return false;
    return true;
}

// ---------------------------------------------------------------- experiments

void run_frontier(const ExperimentConfig& c, ResultTable& table) {
    RowSink sink(table, "frontier");
    sink.start();
    const auto samples = sample_displacements(c.horizons, c.replicates, c.seed, c.guard, c.threads);

    if (!c.snapshot_prefix.empty()) {
        // Raw genealogy export, regenerated from the same streams.
        for (std::size_t h = 0; h < c.horizons.size(); ++h) {
            std::ostringstream name;
            name << c.snapshot_prefix << "_t" << c.horizons[h] << ".csv";
            std::ofstream out(name.str());
            write_snapshot_header(out);
            for (std::size_t r = 0; r < c.replicates; ++r) {
                RngStream stream(c.seed, h * c.replicates + r);
                write_snapshot_records(out, r, simulate_bbm(c.horizons[h], stream, c.guard));
            }
        }
    }

    std::vector<double> med_m, med_r, se_m, se_r;
    for (const auto& s : samples) {
        const auto p = fmt_param({{"t", s.horizon}});
        std::vector<double> maxima;
        maxima.reserve(s.signed_extremes.size());
        for (const auto& e : s.signed_extremes) maxima.push_back(e.max);
        const auto qm = quantile_estimate(maxima, c.delta, s.horizon);
        const auto qr = quantile_estimate(s.reflected_max, c.delta, s.horizon);
        sink.add(p, "quantile_M", qm.value, qm.std_error(), qm.n);
        sink.add(p, "quantile_MR", qr.value, qr.std_error(), qr.n);
        med_m.push_back(qm.value);
        med_r.push_back(qr.value);
        se_m.push_back(qm.std_error());
        se_r.push_back(qr.std_error());

        // Trend-only overlay data; the a.s. constants are references, not targets.
        if (s.horizon > 1.0) {
            std::vector<double> scaled;
            for (double m : s.reflected_max) scaled.push_back((m - kSqrt2 * s.horizon) / std::log(s.horizon));
            sink.add(p, "scaled_fluctuation_MR", mean_estimate(scaled));
        }
    }
    sink.add("", "liminf_reference", -kLogDelay, 0.0, 0);
    sink.add("", "limsup_reference", -1.0 / (2.0 * kSqrt2), 0.0, 0);

    if (c.horizons.size() >= 3) {
        const auto add_fit = [&](const char* tag, const std::vector<double>& med, const std::vector<double>& se) {
            const auto fit = frontier_fit(c.horizons, med);
            const auto err = frontier_fit_errors(c.horizons, se);
            const std::string prefix = tag;
            sink.add("", prefix + "_speed", fit.speed, err[0], c.horizons.size());
            sink.add("", prefix + "_log_coeff", fit.log_coeff, err[1], c.horizons.size());
            sink.add("", prefix + "_intercept", fit.intercept, err[2], c.horizons.size());
            sink.add("", prefix + "_residual_rms", fit.residual_rms, 0.0, c.horizons.size());
        };
        add_fit("fit_M", med_m, se_m);
        add_fit("fit_MR", med_r, se_r);
    }
}

void run_dependence(const ExperimentConfig& c, ResultTable& table) {
    RowSink sink(table, "dependence");
    sink.start();
    const auto samples = sample_displacements(c.horizons, c.replicates, c.seed, c.guard, c.threads);
    for (const auto& s : samples) {
        const double x = c.threshold.value_or(centering(s.horizon));
        const auto p = fmt_param({{"t", s.horizon}, {"x", x}});
        sink.add(p, "delta", dependence_statistic(s.signed_extremes, x));
        std::vector<double> below;
        for (const auto& e : s.signed_extremes) below.push_back(e.max <= x ? 1.0 : 0.0);
        sink.add(p, "p_max_below", mean_estimate(below));
    }
}

void run_barrier(const ExperimentConfig& c, ResultTable& table) {
    RowSink sink(table, "barrier");
    std::uint64_t cell = 0;
    for (double t : c.horizons) {
        for (double y : c.y_offsets) {
            sink.start();
            const auto s = sample_census(t, y, c.replicates, c.seed, c.dt_path, c.reflected, c.guard, c.threads,
                                         cell * c.replicates);
            ++cell;
            const auto p = fmt_param({{"t", t}, {"y", y}});
            const auto h = mean_estimate(s.h);
            const auto g = mean_estimate(s.gamma);
            sink.add(p, "mean_H", h);
            sink.add(p, "mean_Gamma", g);
            const double eh = std::exp(kSqrt2 * y);
            const double eg = eh / ((y + 2.0) * (y + 2.0));
            sink.add(p, "scaled_H", h.value * eh, h.std_error * eh, h.n);
            sink.add(p, "scaled_Gamma", g.value * eg, g.std_error * eg, g.n);
            if (c.reflected) sink.add(p, "expected_H_R", expectation_H_R(y, t), 0.0, 0);
        }
    }
}

void run_abundo(const ExperimentConfig& c, ResultTable& table) {
    RowSink sink(table, "abundo");
    const AffineBoundary bnd(c.intercept, c.slope);
    for (double t : c.horizons) {
        sink.start();
        const auto p = fmt_param({{"a", c.intercept}, {"b", c.slope}, {"t", t}, {"lo", c.band.lo}, {"hi", c.band.hi}});
        const double mid = 0.5 * (c.band.lo + c.band.hi);
        const auto dens = abundo_density(bnd, t, mid);
        sink.add(p, "series_density_mid", dens.value, dens.truncation_bound, 0);
        sink.add(p, "series_band_probability", abundo_band_probability(bnd, t, c.band.lo, c.band.hi), 0.0, 0);
        sink.start();
        sink.add(p, "mc_band_probability", mc_band_survival(bnd, t, c.band, c.replicates, c.mc_dt, c.seed, c.threads));
    }
}

void run_watanabe(const ExperimentConfig& c, ResultTable& table) {
    RowSink sink(table, "watanabe");
    sink.start();
    std::vector<std::vector<PopulationSnapshot>> runs(c.replicates);
    // Only counts are needed; keep just the two snapshots per run.
    parallel_for(c.replicates, c.threads, [&](std::size_t r) {
        RngStream stream(c.seed, r);
        runs[r] = simulate_bbm_observed(c.horizons, stream, c.guard);
    });
    const double t1 = c.horizons.front(), t2 = c.horizons.back();
    const auto res = watanabe_ratio(runs, c.interval, t1, t2);
    const auto p = fmt_param({{"t1", t1}, {"t2", t2}, {"lo", c.interval.lo}, {"hi", c.interval.hi}});
    if (!res.ratios.empty()) {
        const auto q = quantile_estimate(res.ratios.size() >= 20 ? res.ratios : std::vector<double>(20, median(res.ratios)),
                                         0.5);
        sink.add(p, "median_ratio", median(res.ratios), q.std_error(), res.ratios.size());
        sink.add(p, "mean_ratio", mean_estimate(res.ratios));
    }
    sink.add(p, "excluded", static_cast<double>(res.excluded), 0.0, c.replicates);
}

void run_minimal(const ExperimentConfig& c, ResultTable& table) {
    RowSink sink(table, "minimal");
    sink.start();
    const auto samples = sample_displacements(c.horizons, c.replicates, c.seed, c.guard, c.threads);
    for (const auto& s : samples) {
        const auto q = quantile_estimate(s.reflected_min, c.delta, s.horizon);
        sink.add(fmt_param({{"t", s.horizon}}), "quantile_mR", q.value, q.std_error(), q.n);
    }
}

void run_pde_front(const ExperimentConfig& c, ResultTable& table) {
    RowSink sink(table, "pde-front");
    const double t0 = c.horizons.front(), t1 = c.horizons.back();
    const std::vector<double> window{t0, t1};
    const double corr = kLogDelay * std::log(t1 / t0);

    sink.start();
    const auto lf = line_fronts(c.grid, t1, window, c.delta);
    const auto p = fmt_param({{"t0", t0}, {"t1", t1}, {"dx", c.grid.dx}, {"dt", c.grid.dt}});
    sink.add(p, "line_front_t0", lf[0], 0.0, 0);
    sink.add(p, "line_front_t1", lf[1], 0.0, 0);
    sink.add(p, "line_speed", (lf[1] - lf[0]) / (t1 - t0), 0.0, 0);
    sink.add(p, "line_speed_log_corrected", (lf[1] - lf[0] + corr) / (t1 - t0), 0.0, 0);

    if (!c.field_path.empty()) {
        const Grid1D grid(-c.grid.margin, kSqrt2 * t1 + c.grid.margin, c.grid.dx, c.grid.dt, t1);
        const auto hist = solve_fkpp_line(grid, c.grid.store_interval);
        std::ofstream out(c.field_path);
        write_field_records(out, hist, c.field_stride);
    }

    sink.start();
    const auto hf = halfline_fronts(c.grid, window, c.delta, c.x_step);
    sink.add(p, "halfline_front_t0", hf[0], 0.0, 0);
    sink.add(p, "halfline_front_t1", hf[1], 0.0, 0);
    sink.add(p, "halfline_speed", (hf[1] - hf[0]) / (t1 - t0), 0.0, 0);
    sink.add(p, "halfline_speed_log_corrected", (hf[1] - hf[0] + corr) / (t1 - t0), 0.0, 0);
}

void run_renewal(const ExperimentConfig& c, ResultTable& table) {
    RowSink sink(table, "renewal");
    const double T = c.horizons.back();
    for (double x : c.x_values) {
        sink.start();
        const Grid1D grid(0.0, x + c.grid.margin, c.grid.dx, c.grid.dt, T);
        const auto hist = solve_fkpp_halfline(grid, x, c.grid.store_interval);
        for (double t : c.horizons) {
            for (double y : c.y_offsets) {
                const RenewalPoint pt{t, x, y};
                sink.add(fmt_param({{"t", t}, {"x", x}, {"y", y}, {"dx", c.grid.dx}}), "residual",
                         renewal_residual(hist, std::span(&pt, 1)), 0.0, 0);
            }
        }
    }
}

void run_profile(const ExperimentConfig& c, ResultTable& table) {
    RowSink sink(table, "profile");
    sink.start();
    const double T = c.horizons.back();
    std::vector<double> xs;
    for (double x = 0.0; x <= kSqrt2 * T + 10.0 + 1e-9; x += c.x_step) xs.push_back(x);
    const auto fam = solve_profile_family(xs, c.grid.dx, c.grid.dt, T, c.grid.store_interval, c.grid.margin);
    const auto dist = profile_convergence(fam, c.y_offsets, c.horizons, c.delta);
    for (const auto& d : dist) {
        const auto p = fmt_param({{"t", d.time}});
        sink.add(p, "sup_distance", d.distance, 0.0, 0);
        sink.add(p, "flagged", d.flagged ? 1.0 : 0.0, 0.0, 0);
    }
}

}  // namespace

// ---------------------------------------------------------------- names

std::span<const std::string_view> experiment_names() { return kNames; }

std::string_view to_string(ExperimentKind kind) { return kNames[static_cast<std::size_t>(kind)]; }

std::optional<ExperimentKind> parse_experiment(std::string_view name) {
    for (std::size_t i = 0; i < kNames.size(); ++i)
        if (kNames[i] == name) return static_cast<ExperimentKind>(i);
    return std::nullopt;
}

// ---------------------------------------------------------------- config

ExperimentConfig parse_config(const json& doc) {
    if (!doc.is_object()) throw ValidationError("config: expected a JSON object");
    ExperimentConfig c;
    FieldReader r(doc);

    std::string name;
    r.read("experiment", name);
    if (const auto kind = parse_experiment(name))
        c.experiment = *kind;
    else
        r.check(false, "experiment: unknown or missing experiment '" + name + "'");

    r.read("seed", c.seed);
    r.read("replicates", c.replicates);
    r.read("horizons", c.horizons);
    r.read("y_offsets", c.y_offsets);
    r.read("dt_path", c.dt_path);
    r.read("guard", c.guard);
    r.read("output_path", c.output_path);
    r.read("threads", c.threads);
    r.read("delta", c.delta);
    double threshold = 0.0;
    r.read("threshold", threshold);
    if (doc.contains("threshold")) c.threshold = threshold;
    r.read("reflected", c.reflected);
    r.read_interval("interval", c.interval);
    r.read("intercept", c.intercept);
    r.read("slope", c.slope);
    r.read_interval("band", c.band);
    r.read("mc_dt", c.mc_dt);
    r.read("x_values", c.x_values);
    r.read("x_step", c.x_step);
    r.read("snapshot_prefix", c.snapshot_prefix);
    r.read("field_path", c.field_path);
    r.read("field_stride", c.field_stride);

    json grid = json::object();
    r.read("grid", grid);
    if (!grid.is_object()) {
        r.check(false, "grid: expected an object");
    } else {
        FieldReader g(grid);
        g.read("dx", c.grid.dx);
        g.read("dt", c.grid.dt);
        g.read("margin", c.grid.margin);
        g.read("store_interval", c.grid.store_interval);
        g.reject_unknown();
        for (auto& e : g.errors()) r.check(false, "grid." + e);
    }
    r.reject_unknown();

    r.check(c.replicates >= 1, "replicates: must be >= 1");
    r.check(!c.horizons.empty(), "horizons: must be nonempty");
    r.check(ascending(c.horizons), "horizons: must be sorted strictly ascending");
    r.check(std::all_of(c.horizons.begin(), c.horizons.end(), [](double t) { return t > 0.0; }),
            "horizons: must be positive");
    r.check(std::all_of(c.y_offsets.begin(), c.y_offsets.end(), [](double y) { return y >= 0.0; }),
            "y_offsets: must be nonnegative");
    r.check(c.dt_path > 0.0, "dt_path: must be positive");
    r.check(c.guard >= 1, "guard: must be >= 1");
    r.check(c.grid.dx > 0.0, "grid.dx: must be positive");
    r.check(c.grid.dt > 0.0 && c.grid.dt <= 1.0, "grid.dt: must lie in (0, 1]");
    r.check(c.grid.margin > 0.0, "grid.margin: must be positive");
    r.check(c.grid.store_interval > 0.0, "grid.store_interval: must be positive");
    r.check(c.delta > 0.0 && c.delta < 1.0, "delta: must lie in (0, 1)");
    r.check(c.interval.hi > c.interval.lo, "interval: requires lo < hi");
    r.check(c.intercept > 0.0, "intercept: must be positive");
    r.check(c.slope > 0.0, "slope: must be positive");
    r.check(c.band.lo >= 0.0 && c.band.hi >= c.band.lo, "band: requires 0 <= lo <= hi");
    r.check(c.mc_dt > 0.0, "mc_dt: must be positive");
    r.check(c.x_step > 0.0, "x_step: must be positive");
    r.check(!c.output_path.empty(), "output_path: must be nonempty");

    switch (c.experiment) {
        case ExperimentKind::Frontier:
        case ExperimentKind::Minimal:
            r.check(c.replicates >= 20, "replicates: quantiles need >= 20");
            break;
        case ExperimentKind::Dependence:
            r.check(c.replicates >= 100, "replicates: dependence needs >= 100");
            break;
        case ExperimentKind::Barrier:
            r.check(!c.y_offsets.empty(), "y_offsets: barrier needs at least one offset");
            r.check(c.horizons.front() >= 1.0, "horizons: barrier requires t >= 1");
            break;
        case ExperimentKind::Abundo:
            for (double t : c.horizons)
                r.check(c.band.hi <= c.intercept + c.slope * t, "band: must lie below a + b t");
            break;
        case ExperimentKind::Watanabe:
            r.check(c.horizons.size() == 2, "horizons: watanabe needs exactly [t1, t2]");
            break;
        case ExperimentKind::PdeFront:
            r.check(c.horizons.size() == 2, "horizons: pde-front needs exactly [t0, t1]");
            break;
        case ExperimentKind::Renewal:
            r.check(!c.x_values.empty(), "x_values: renewal needs at least one x");
            r.check(!c.y_offsets.empty(), "y_offsets: renewal needs at least one y");
            break;
        case ExperimentKind::Profile:
            r.check(c.y_offsets.size() >= 2, "y_offsets: profile needs at least two origins");
            break;
    }

    if (!r.errors().empty()) {
        std::string msg = "invalid config:";
        for (const auto& e : r.errors()) msg += "\n  " + e;
        throw ValidationError(msg);
    }
    return c;
}

json to_json(const ExperimentConfig& c) {
    json j;
    j["experiment"] = std::string(to_string(c.experiment));
    j["seed"] = c.seed;
    j["replicates"] = c.replicates;
    j["horizons"] = c.horizons;
    j["y_offsets"] = c.y_offsets;
    j["dt_path"] = c.dt_path;
    j["guard"] = c.guard;
    j["grid"] = {{"dx", c.grid.dx}, {"dt", c.grid.dt}, {"margin", c.grid.margin},
                 {"store_interval", c.grid.store_interval}};
    j["output_path"] = c.output_path;
    j["threads"] = c.threads;
    j["delta"] = c.delta;
    if (c.threshold) j["threshold"] = *c.threshold;
    j["reflected"] = c.reflected;
    j["interval"] = {c.interval.lo, c.interval.hi};
    j["intercept"] = c.intercept;
    j["slope"] = c.slope;
    j["band"] = {c.band.lo, c.band.hi};
    j["mc_dt"] = c.mc_dt;
    j["x_values"] = c.x_values;
    j["x_step"] = c.x_step;
    j["snapshot_prefix"] = c.snapshot_prefix;
    j["field_path"] = c.field_path;
    j["field_stride"] = c.field_stride;
    return j;
}

// ---------------------------------------------------------------- running

ResultTable run_experiment(const ExperimentConfig& config) {
    ResultTable table;
    try {
        switch (config.experiment) {
            case ExperimentKind::Frontier: run_frontier(config, table); break;
            case ExperimentKind::Dependence: run_dependence(config, table); break;
            case ExperimentKind::Barrier: run_barrier(config, table); break;
            case ExperimentKind::Abundo: run_abundo(config, table); break;
            case ExperimentKind::Watanabe: run_watanabe(config, table); break;
            case ExperimentKind::Minimal: run_minimal(config, table); break;
            case ExperimentKind::PdeFront: run_pde_front(config, table); break;
            case ExperimentKind::Renewal: run_renewal(config, table); break;
            case ExperimentKind::Profile: run_profile(config, table); break;
        }
    } catch (const ResourceError& e) {
        table.status = RunStatus::ResourceGuard;
        table.message = e.what();
    } catch (const NumericalError& e) {
        table.status = RunStatus::Numerical;
        table.message = e.what();
    } catch (const std::domain_error& e) {
        // e.g. a front level that is not bracketed on the requested range
        table.status = RunStatus::Numerical;
        table.message = e.what();
    }
    return table;
}

void write_csv(std::ostream& out, const ResultTable& table) {
    out << "experiment,parameters,statistic,value,std_error,n,wall_time\n";
    char buf[64];
    const auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    for (const auto& r : table.rows) {
        out << r.experiment << ',' << r.parameters << ',' << r.statistic << ',' << num(r.value) << ','
            << num(r.std_error) << ',' << r.n << ',';
        std::snprintf(buf, sizeof buf, "%.6f", r.wall_time);
        out << buf << '\n';
    }
}

void write_outputs(const std::string& path, const ExperimentConfig& config, const ResultTable& table) {
    namespace fs = std::filesystem;
    const auto write_atomic = [](const fs::path& target, const std::string& content) {
        const fs::path tmp = target.string() + ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out) throw std::runtime_error("cannot open " + tmp.string());
            out << content;
            if (!out) throw std::runtime_error("write failed: " + tmp.string());
        }
        fs::rename(tmp, target);
    };

    std::ostringstream csv;
    write_csv(csv, table);
    write_atomic(path, csv.str());

    json side;
    side["config"] = to_json(config);
    side["version"] = std::string(kVersion);
    side["status"] = table.status == RunStatus::Ok              ? "ok"
                     : table.status == RunStatus::ResourceGuard ? "resource_guard"
                                                                : "numerical_failure";
    side["partial"] = table.status != RunStatus::Ok;
    side["message"] = table.message;
    side["rows"] = table.rows.size();
    write_atomic(path + ".json", side.dump(2) + "\n");
}

// ---------------------------------------------------------------- building blocks

Extremes reflected_extremes(const PopulationSnapshot& snap) {
    if (snap.particles.empty()) throw std::domain_error("reflected_extremes: empty snapshot");
    Extremes e{0.0, std::abs(snap.particles.front().position)};
    for (const auto& p : snap.particles) {
        const double a = std::abs(p.position);
        e.max = std::max(e.max, a);
        e.min = std::min(e.min, a);
    }
    return e;
}

std::vector<DisplacementSample> sample_displacements(std::span<const double> horizons, std::size_t replicates,
                                                     std::uint64_t seed, std::size_t guard, unsigned threads,
                                                     double origin, std::uint64_t stream_base) {
    std::vector<DisplacementSample> out(horizons.size());
    for (std::size_t h = 0; h < horizons.size(); ++h) {
        auto& s = out[h];
        s.horizon = horizons[h];
        s.signed_extremes.resize(replicates);
        s.reflected_max.resize(replicates);
        s.reflected_min.resize(replicates);
    }
    parallel_for(horizons.size() * replicates, threads, [&](std::size_t cell) {
        const std::size_t h = cell / replicates;
        const std::size_t r = cell % replicates;
        RngStream stream(seed, stream_base + cell);
        const auto snap = simulate_bbm(horizons[h], stream, guard, origin);
        out[h].signed_extremes[r] = extremes(snap);
        const auto re = reflected_extremes(snap);
        out[h].reflected_max[r] = re.max;
        out[h].reflected_min[r] = re.min;
    });
    return out;
}

std::vector<double> frontier_fit_errors(std::span<const double> times, std::span<const double> std_errors) {
    const auto n = static_cast<Eigen::Index>(times.size());
    Eigen::MatrixXd design(n, 3);
    for (Eigen::Index i = 0; i < n; ++i) {
        design(i, 0) = times[i];
        design(i, 1) = std::log(times[i]);
        design(i, 2) = 1.0;
    }
    // coef = P y with P = (A^T A)^{-1} A^T; cov = P diag(se^2) P^T.
    const Eigen::MatrixXd proj = design.colPivHouseholderQr().solve(Eigen::MatrixXd::Identity(n, n));
    Eigen::VectorXd var(n);
    for (Eigen::Index i = 0; i < n; ++i) var(i) = std_errors[i] * std_errors[i];
    const Eigen::MatrixXd cov = proj * var.asDiagonal() * proj.transpose();
    return {std::sqrt(cov(0, 0)), std::sqrt(cov(1, 1)), std::sqrt(cov(2, 2))};
}

Estimate mc_band_survival(const AffineBoundary& boundary, double t, Interval band, std::size_t paths, double dt,
                          std::uint64_t seed, unsigned threads) {
    if (!(t > 0.0) || !(dt > 0.0)) throw std::domain_error("mc_band_survival: t and dt must be positive");
    const auto steps = static_cast<std::size_t>(std::llround(t / dt));
    const double h = t / static_cast<double>(steps);
    const double sd = std::sqrt(h);
    std::vector<double> weight(paths);
    parallel_for(paths, threads, [&](std::size_t i) {
        RngStream stream(seed, i);
        double x = 0.0;
        double w = 1.0;
        for (std::size_t k = 0; k < steps && w > 0.0; ++k) {
            const double s = static_cast<double>(k) * h;
            const double next = x + sd * stream.standard_normal();
            w *= 1.0 - reflected_bridge_crossing_prob(x, next, h, Line{boundary.at(s), boundary.slope()});
            x = next;
        }
        weight[i] = band.contains(std::abs(x)) ? w : 0.0;
    });
    return mean_estimate(weight);
}

CensusSample sample_census(double horizon, double offset, std::size_t replicates, std::uint64_t seed,
                           double dt_path, bool reflected, std::size_t guard, unsigned threads,
                           std::uint64_t stream_base) {
    if (offset > std::sqrt(horizon))
        std::cerr << "warning: census offset y=" << offset << " exceeds sqrt(t) at t=" << horizon
                  << "; outside the range of the moment bounds\n";
    CensusSample s;
    s.horizon = horizon;
    s.offset = offset;
    s.h.resize(replicates);
    s.gamma.resize(replicates);
    parallel_for(replicates, threads, [&](std::size_t r) {
        RngStream stream(seed, stream_base + r);
        const auto c = barrier_census(horizon, offset, stream, dt_path, reflected, guard);
        s.h[r] = static_cast<double>(c.h);
        s.gamma[r] = static_cast<double>(c.gamma);
    });
    return s;
}

std::vector<double> line_fronts(const GridConfig& g, double final_time, std::span<const double> times,
                                double level) {
    const Grid1D grid(-g.margin, kSqrt2 * final_time + g.margin, g.dx, g.dt, final_time);
    const auto hist = solve_fkpp_line(grid, g.store_interval);
    std::vector<double> out;
    for (double t : times) out.push_back(front_position(hist.at(t), level));
    return out;
}

std::vector<double> halfline_fronts(const GridConfig& g, std::span<const double> times, double level,
                                    double x_step) {
    const double t_min = times.front(), t_max = times.back();
    const double x_lo = std::max(0.0, centering(std::max(t_min, 1.0)) - 8.0);
    const double x_hi = kSqrt2 * t_max + 4.0;
    std::vector<double> xs;
    for (double x = x_lo; x <= x_hi + 1e-9; x += x_step) xs.push_back(x);
    const auto fam = solve_profile_family(xs, g.dx, g.dt, t_max, g.store_interval, g.margin);
    std::vector<double> out;
    for (double t : times) out.push_back(profile_front(fam.x_values, fam.profile(t, 0.0), level));
    return out;
}

}  // namespace brbm
