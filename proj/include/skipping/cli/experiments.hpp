#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "skipping/cli/config.hpp"
#include "skipping/optimize.hpp"
#include "skipping/samplers.hpp"
#include "skipping/targets.hpp"

namespace skipping::cli {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kTraceSchemaLine = "# skipping-trace v1";

// --- tuning -------------------------------------------------------------------

struct TuneResult {
  double scale = 1.0;
  double acceptance = 0.0;  ///< RWM acceptance of the final pilot at `scale`
  int pilots = 0;
};

/// Bisection on log(scale) for an isotropic Gaussian RWM proposal so that a
/// pilot run of `pilot_steps` from x0 accepts close to `target_acceptance`.
/// Pilot k uses rng.split(k).
TuneResult tune_rwm_scale(const LogTarget& target, const Point& x0, double target_acceptance,
                          std::uint64_t pilot_steps, const RngStream& rng, int max_pilots = 24,
                          double tolerance = 0.01);

// --- traces -------------------------------------------------------------------

/// Versioned CSV: "# skipping-trace v1", then step,x1..xd,accepted,skip_count,log_target.
/// Each row holds the state after the step and its log-density.
void write_trace_csv(std::ostream& out, const ChainResult& chain);
void write_trace_csv(const std::filesystem::path& path, const ChainResult& chain);

void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

// --- sample -------------------------------------------------------------------

struct SampleOutcome {
  std::vector<ChainResult> chains;
  std::vector<std::filesystem::path> trace_files;
  nlohmann::json summary;
};

/// Runs the configured chains, writes traces and the summary JSON.
SampleOutcome run_sample(const ExperimentConfig& cfg, unsigned threads = 1);

// --- tail experiment ----------------------------------------------------------

struct TailExperimentOptions {
  Eigen::Index dim = 2;
  std::uint64_t seed = 1;
  std::uint64_t steps = 100000;
  std::size_t components = 20;
  double target_acceptance = 0.25;
  std::uint64_t pilot_steps = 10000;
};

/// log a for dimension d: -30 at d = 2, -350 at d = 50, linear in d elsewhere.
double tail_level_for_dim(Eigen::Index dim);
double tail_spread_for_dim(Eigen::Index dim);

struct TailExperimentResult {
  GaussianMixture mixture;
  double level_log = 0.0;
  Point x0;
  TuneResult tuning;
  ChainResult rwm;
  ChainResult skipping;
  double runtime_s = 0.0;

  nlohmann::json comparison_json() const;
};

TailExperimentResult run_tail_experiment(const TailExperimentOptions& opts);

/// Writes rwm_trace.csv, skipping_trace.csv, first_coordinate.csv,
/// mixture.json and comparison.json into dir.
void write_tail_experiment(const TailExperimentResult& res, const std::filesystem::path& dir);

// --- optimisation tables ------------------------------------------------------

struct MethodSummary {
  std::string name;
  double mean_distance = 0.0;
  double basin_fraction = 0.0;
  double mean_gap = 0.0;
  double mean_evals = 0.0;
  double mean_wall_time_s = 0.0;
  std::size_t runs = 0;
};

MethodSummary summarize(const std::string& name, const std::vector<OptRunReport>& reports,
                        double optimum_value);

struct TableOptions {
  std::size_t runs = 1000;
  std::uint64_t m = 100;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

struct TableResult {
  std::string title;
  std::vector<MethodSummary> methods;
  std::vector<std::vector<OptRunReport>> reports;  ///< same order as methods
  TableOptions options;

  nlohmann::json to_json() const;
  std::string to_text() const;
};

/// Vanilla, RWM-augmented (N(0, 2I), T = 1) and MSS-augmented (N(0, 2I),
/// K = 200) multistart on the eggholder problem.
TableResult run_table1(const TableOptions& opts);

/// Classic (T = 1), monotonic and MSS basin-hopping on the eggholder problem;
/// MSS uses N(0, I) and K = 200, the others uniform steps of matched variance.
TableResult run_table2(const TableOptions& opts);

void write_table(const TableResult& table, const std::filesystem::path& dir,
                 const std::string& stem);

}  // namespace skipping::cli
