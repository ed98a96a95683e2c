#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "brbm/analytics.hpp"
#include "brbm/branching.hpp"
#include "brbm/fkpp.hpp"

namespace brbm {

inline constexpr std::string_view kVersion = "0.1.0";

enum class ExperimentKind { Frontier, Dependence, Barrier, Abundo, Watanabe, Minimal, PdeFront, Renewal, Profile };

std::span<const std::string_view> experiment_names();
std::string_view to_string(ExperimentKind kind);
std::optional<ExperimentKind> parse_experiment(std::string_view name);

struct GridConfig {
    double dx = 0.05;
    double dt = 0.05;
    double margin = 20.0;
    double store_interval = 0.5;
};

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::Frontier;
    std::uint64_t seed = 20261016;
    std::size_t replicates = 500;
    std::vector<double> horizons;
    std::vector<double> y_offsets;
    double dt_path = 1e-2;
    std::size_t guard = kDefaultGuard;
    GridConfig grid;
    std::string output_path = "results.csv";

    unsigned threads = 0;
    double delta = 0.5;
    std::optional<double> threshold;
    bool reflected = true;
    Interval interval{-1.0, 1.0};
    double intercept = 1.0;
    double slope = 1.0;
    Interval band{0.4, 0.6};
    double mc_dt = 1e-3;
    std::vector<double> x_values;
    double x_step = 0.1;
    std::string snapshot_prefix;
    std::string field_path;
    std::size_t field_stride = 10;
};

/// Parses and validates a JSON config. Unknown keys are rejected; every
/// offending field is listed in the thrown ValidationError.
ExperimentConfig parse_config(const nlohmann::json& doc);
nlohmann::json to_json(const ExperimentConfig& config);

struct ResultRow {
    std::string experiment;
    std::string parameters;
    std::string statistic;
    double value = 0.0;
    double std_error = 0.0;
    std::size_t n = 0;
    double wall_time = 0.0;
};

enum class RunStatus { Ok, ResourceGuard, Numerical };

struct ResultTable {
    std::vector<ResultRow> rows;
    RunStatus status = RunStatus::Ok;
    std::string message;
};

/// Runs the configured experiment. Guard and solver failures do not throw:
/// the rows computed so far are returned with a non-Ok status.
ResultTable run_experiment(const ExperimentConfig& config);

/// CSV with header experiment,parameters,statistic,value,std_error,n,wall_time.
void write_csv(std::ostream& out, const ResultTable& table);
/// Writes the CSV via a temporary file and rename, plus `<path>.json` holding
/// the config, version and status.
void write_outputs(const std::string& path, const ExperimentConfig& config, const ResultTable& table);

// ---------------------------------------------------------------------------
// Building blocks shared by the CLI and the acceptance suite.

/// Per-replicate extremes at one horizon. Cell (horizon h, replicate r) uses
/// stream id stream_base + h * replicates + r.
struct DisplacementSample {
    double horizon = 0.0;
    std::vector<Extremes> signed_extremes;
    std::vector<double> reflected_max;
    std::vector<double> reflected_min;
};

std::vector<DisplacementSample> sample_displacements(std::span<const double> horizons, std::size_t replicates,
                                                     std::uint64_t seed, std::size_t guard = kDefaultGuard,
                                                     unsigned threads = 0, double origin = 0.0,
                                                     std::uint64_t stream_base = 0);

/// max |X| and min |X| of a signed snapshot.
Extremes reflected_extremes(const PopulationSnapshot& snap);

/// Standard errors of (speed, log_coeff, intercept) implied by independent
/// median errors, by linear propagation through the least-squares map.
std::vector<double> frontier_fit_errors(std::span<const double> times, std::span<const double> std_errors);

/// Bridge-corrected Monte Carlo estimate of P(tau_{a,b} >= t, |B_t| in band):
/// Euler grid of step dt, each step weighted by the probability that neither
/// +boundary nor -boundary was touched by the bridge.
Estimate mc_band_survival(const AffineBoundary& boundary, double t, Interval band, std::size_t paths, double dt,
                          std::uint64_t seed, unsigned threads = 0);

struct CensusSample {
    double horizon = 0.0;
    double offset = 0.0;
    std::vector<double> h;
    std::vector<double> gamma;
};

CensusSample sample_census(double horizon, double offset, std::size_t replicates, std::uint64_t seed,
                           double dt_path = 1e-2, bool reflected = true, std::size_t guard = kDefaultGuard,
                           unsigned threads = 0, std::uint64_t stream_base = 0);

/// delta-level front of the line solver at each stored time in `times`.
std::vector<double> line_fronts(const GridConfig& grid, double final_time, std::span<const double> times,
                                double level);

/// q^R_delta(0, t) for each time, read from a half-line family over x.
std::vector<double> halfline_fronts(const GridConfig& grid, std::span<const double> times, double level,
                                    double x_step);

}  // namespace brbm
