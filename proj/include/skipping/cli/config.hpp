#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "skipping/core.hpp"
#include "skipping/samplers.hpp"

namespace skipping::cli {

/// Invalid configuration; the message starts with the offending key path.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& key, const std::string& problem);
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct TargetSpec {
  /// intervals | mixture_tail | eggholder | quadratic_box
  std::string kind;
  std::vector<std::pair<double, double>> intervals;
  // mixture_tail
  std::uint64_t mixture_seed = 1;
  std::size_t components = 20;
  Eigen::Index dim = 2;
  double spread = 10.0;
  double level_log = -30.0;
  std::string mixture_file;
  // eggholder / quadratic_box
  double temperature = 1.0;
  Eigen::VectorXd center;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

struct BallObstacle {
  Eigen::VectorXd center;
  double radius = 1.0;
};

struct SamplerSpec {
  std::string kind;  ///< rwm | skipping | mss
  nlohmann::json proposal;
  nlohmann::json halting;
  bool use_doubling = false;
  std::vector<BallObstacle> obstacles;
};

struct RunSpec {
  std::uint64_t steps = 10000;
  std::uint64_t seed = 1;
  double burn_in = 0.1;
  std::size_t chains = 1;
  std::optional<Eigen::VectorXd> x0;
  bool tune = false;
  double tune_acceptance = 0.25;
  std::uint64_t pilot_steps = 10000;
};

struct OutputSpec {
  std::string dir = ".";
  std::string trace = "trace.csv";
  std::string summary = "summary.json";
};

struct ExperimentConfig {
  TargetSpec target;
  SamplerSpec sampler;
  RunSpec run;
  OutputSpec output;
  nlohmann::json source;  ///< the parsed document, echoed into summaries
};

/// Parses and fully validates a configuration document.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);

/// Builds a proposal from its JSON description; `key` prefixes error messages.
UnderlyingProposal parse_proposal(const nlohmann::json& j, Eigen::Index dim,
                                  const std::string& key, double scale_override = 0.0);
HaltingIndex parse_halting(const nlohmann::json& j, const std::string& key);

/// The sampling problem a configuration describes.
struct BuiltTarget {
  Eigen::Index dim = 1;
  std::optional<LogTarget> log_target;  ///< for rwm / skipping
  Objective objective;                  ///< for mss
  std::optional<Box> domain;
  Point default_x0;
};

BuiltTarget build_target(const TargetSpec& spec);

}  // namespace skipping::cli
