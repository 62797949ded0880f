#include "skipping/cli/config.hpp"

#include <fstream>
#include <set>

#include "skipping/targets.hpp"

namespace skipping::cli {

using nlohmann::json;

ConfigError::ConfigError(const std::string& key, const std::string& problem)
    : Error(key + ": " + problem), key_(key) {}

namespace {

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

const json& require(const json& obj, const std::string& prefix, const std::string& key) {
  if (!obj.is_object()) throw ConfigError(prefix, "must be an object");
  if (!obj.contains(key)) throw ConfigError(join(prefix, key), "is required");
  return obj.at(key);
}

void reject_unknown(const json& obj, const std::string& prefix,
                    const std::set<std::string>& allowed) {
  for (const auto& [k, _] : obj.items())
    if (!allowed.contains(k)) throw ConfigError(join(prefix, k), "unknown key");
}

double number(const json& j, const std::string& key) {
  if (!j.is_number()) throw ConfigError(key, "must be a number");
  return j.get<double>();
}

double positive(const json& j, const std::string& key) {
  const double v = number(j, key);
  if (!(v > 0.0)) throw ConfigError(key, "must be > 0");
  return v;
}

std::uint64_t count(const json& j, const std::string& key, std::uint64_t min_value = 1) {
  if (!j.is_number_integer() || j.get<std::int64_t>() < static_cast<std::int64_t>(min_value))
    throw ConfigError(key, "must be an integer >= " + std::to_string(min_value));
  return j.get<std::uint64_t>();
}

std::string text(const json& j, const std::string& key) {
  if (!j.is_string()) throw ConfigError(key, "must be a string");
  return j.get<std::string>();
}

Eigen::VectorXd vector(const json& j, const std::string& key) {
  if (!j.is_array() || j.empty()) throw ConfigError(key, "must be a non-empty array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v[static_cast<Eigen::Index>(i)] = number(j[i], key + "[" + std::to_string(i) + "]");
  return v;
}

Eigen::MatrixXd matrix(const json& j, const std::string& key) {
  if (!j.is_array() || j.empty()) throw ConfigError(key, "must be a non-empty array of rows");
  const auto n = static_cast<Eigen::Index>(j.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const std::string row_key = key + "[" + std::to_string(r) + "]";
    const Eigen::VectorXd row = vector(j[static_cast<std::size_t>(r)], row_key);
    if (row.size() != n) throw ConfigError(row_key, "matrix must be square");
    m.row(r) = row.transpose();
  }
  return m;
}

TargetSpec parse_target(const json& j) {
  const std::string p = "target";
  TargetSpec t;
  t.kind = text(require(j, p, "kind"), p + ".kind");
  if (t.kind == "intervals") {
    reject_unknown(j, p, {"kind", "intervals"});
    const json& iv = require(j, p, "intervals");
    if (!iv.is_array() || iv.empty()) throw ConfigError(p + ".intervals", "must be a non-empty array");
    for (std::size_t i = 0; i < iv.size(); ++i) {
      const std::string k = p + ".intervals[" + std::to_string(i) + "]";
      const Eigen::VectorXd v = vector(iv[i], k);
      if (v.size() != 2 || !(v[0] < v[1])) throw ConfigError(k, "must be [lo, hi] with lo < hi");
      t.intervals.emplace_back(v[0], v[1]);
    }
    t.dim = 1;
  } else if (t.kind == "mixture_tail") {
    reject_unknown(j, p, {"kind", "seed", "components", "dim", "spread", "level_log", "mixture_file"});
    if (j.contains("seed")) t.mixture_seed = count(j["seed"], p + ".seed", 0);
    if (j.contains("components")) t.components = count(j["components"], p + ".components");
    if (j.contains("dim")) t.dim = static_cast<Eigen::Index>(count(j["dim"], p + ".dim"));
    if (j.contains("spread")) t.spread = positive(j["spread"], p + ".spread");
    if (j.contains("level_log")) t.level_log = number(j["level_log"], p + ".level_log");
    if (j.contains("mixture_file")) t.mixture_file = text(j["mixture_file"], p + ".mixture_file");
  } else if (t.kind == "eggholder") {
    reject_unknown(j, p, {"kind", "temperature"});
    if (j.contains("temperature")) t.temperature = positive(j["temperature"], p + ".temperature");
    t.dim = 2;
  } else if (t.kind == "quadratic_box") {
    reject_unknown(j, p, {"kind", "center", "lower", "upper", "temperature"});
    t.center = vector(require(j, p, "center"), p + ".center");
    t.lower = vector(require(j, p, "lower"), p + ".lower");
    t.upper = vector(require(j, p, "upper"), p + ".upper");
    if (t.lower.size() != t.center.size() || t.upper.size() != t.center.size())
      throw ConfigError(p + ".lower", "center, lower and upper must have equal length");
    for (Eigen::Index i = 0; i < t.lower.size(); ++i)
      if (!(t.lower[i] < t.upper[i])) throw ConfigError(p + ".lower", "must be < upper");
    if (j.contains("temperature")) t.temperature = positive(j["temperature"], p + ".temperature");
    t.dim = t.center.size();
  } else {
    throw ConfigError(p + ".kind", "must be one of intervals, mixture_tail, eggholder, quadratic_box");
  }
  return t;
}

SamplerSpec parse_sampler(const json& j, Eigen::Index dim, const TargetSpec& target) {
  const std::string p = "sampler";
  reject_unknown(j, p, {"kind", "proposal", "halting", "use_doubling", "obstacles"});
  SamplerSpec s;
  s.kind = text(require(j, p, "kind"), p + ".kind");
  if (s.kind != "rwm" && s.kind != "skipping" && s.kind != "mss")
    throw ConfigError(p + ".kind", "must be one of rwm, skipping, mss");
  if (s.kind == "mss" && target.kind != "eggholder" && target.kind != "quadratic_box")
    throw ConfigError(p + ".kind", "mss needs an objective target (eggholder or quadratic_box)");
  s.proposal = require(j, p, "proposal");
  parse_proposal(s.proposal, dim, p + ".proposal", 1.0);
  if (s.kind != "rwm") {
    s.halting = require(j, p, "halting");
    parse_halting(s.halting, p + ".halting");
  }
  if (j.contains("use_doubling")) {
    if (!j["use_doubling"].is_boolean()) throw ConfigError(p + ".use_doubling", "must be a boolean");
    s.use_doubling = j["use_doubling"].get<bool>();
  }
  if (j.contains("obstacles")) {
    const json& obs = j["obstacles"];
    if (!obs.is_array()) throw ConfigError(p + ".obstacles", "must be an array");
    for (std::size_t i = 0; i < obs.size(); ++i) {
      const std::string k = p + ".obstacles[" + std::to_string(i) + "]";
      reject_unknown(obs[i], k, {"center", "radius"});
      BallObstacle b;
      b.center = vector(require(obs[i], k, "center"), k + ".center");
      if (b.center.size() != dim) throw ConfigError(k + ".center", "dimension mismatch");
      b.radius = positive(require(obs[i], k, "radius"), k + ".radius");
      s.obstacles.push_back(std::move(b));
    }
  }
  return s;
}

RunSpec parse_run(const json& j, Eigen::Index dim) {
  const std::string p = "run";
  reject_unknown(j, p, {"steps", "seed", "burn_in", "chains", "x0", "tune", "tune_acceptance",
                        "pilot_steps"});
  RunSpec r;
  if (j.contains("steps")) r.steps = count(j["steps"], p + ".steps");
  if (j.contains("seed")) r.seed = count(j["seed"], p + ".seed", 0);
  if (j.contains("burn_in")) {
    r.burn_in = number(j["burn_in"], p + ".burn_in");
    if (!(r.burn_in >= 0.0 && r.burn_in < 1.0)) throw ConfigError(p + ".burn_in", "must be in [0, 1)");
  }
  if (j.contains("chains")) r.chains = count(j["chains"], p + ".chains");
  if (j.contains("x0")) {
    r.x0 = vector(j["x0"], p + ".x0");
    if (r.x0->size() != dim) throw ConfigError(p + ".x0", "dimension mismatch");
  }
  if (j.contains("tune")) {
    if (!j["tune"].is_boolean()) throw ConfigError(p + ".tune", "must be a boolean");
    r.tune = j["tune"].get<bool>();
  }
  if (j.contains("tune_acceptance")) {
    r.tune_acceptance = number(j["tune_acceptance"], p + ".tune_acceptance");
    if (!(r.tune_acceptance > 0.0 && r.tune_acceptance < 1.0))
      throw ConfigError(p + ".tune_acceptance", "must be in (0, 1)");
  }
  if (j.contains("pilot_steps")) r.pilot_steps = count(j["pilot_steps"], p + ".pilot_steps", 100);
  return r;
}

OutputSpec parse_output(const json& j) {
  const std::string p = "output";
  reject_unknown(j, p, {"dir", "trace", "summary"});
  OutputSpec o;
  if (j.contains("dir")) o.dir = text(j["dir"], p + ".dir");
  if (j.contains("trace")) o.trace = text(j["trace"], p + ".trace");
  if (j.contains("summary")) o.summary = text(j["summary"], p + ".summary");
  return o;
}

RadiusLaw parse_radius(const json& j, const std::string& p) {
  const std::string kind = text(require(j, p, "kind"), p + ".kind");
  if (kind == "exponential") {
    reject_unknown(j, p, {"kind", "rate"});
    return ExponentialRadius{positive(require(j, p, "rate"), p + ".rate")};
  }
  if (kind == "gamma") {
    reject_unknown(j, p, {"kind", "shape", "rate"});
    return GammaRadius{positive(require(j, p, "shape"), p + ".shape"),
                       positive(require(j, p, "rate"), p + ".rate")};
  }
  if (kind == "constant") {
    reject_unknown(j, p, {"kind", "value"});
    return ConstantRadius{positive(require(j, p, "value"), p + ".value")};
  }
  throw ConfigError(p + ".kind", "must be one of exponential, gamma, constant");
}

}  // namespace

UnderlyingProposal parse_proposal(const json& j, Eigen::Index dim, const std::string& p,
                                  double scale_override) {
  const std::string kind = text(require(j, p, "kind"), p + ".kind");
  bool equal = false;
  if (j.contains("equal_increments")) {
    if (!j["equal_increments"].is_boolean())
      throw ConfigError(p + ".equal_increments", "must be a boolean");
    equal = j["equal_increments"].get<bool>();
  }
  if (kind == "gaussian") {
    reject_unknown(j, p, {"kind", "scale", "covariance", "equal_increments"});
    if (j.contains("covariance")) {
      const Eigen::MatrixXd cov = matrix(j["covariance"], p + ".covariance");
      if (cov.rows() != dim) throw ConfigError(p + ".covariance", "dimension mismatch");
      try {
        return UnderlyingProposal::gaussian(cov).with_equal_increments(equal);
      } catch (const InvalidArgument& e) {
        throw ConfigError(p + ".covariance", e.what());
      }
    }
    double scale = j.contains("scale") ? positive(j["scale"], p + ".scale") : 1.0;
    if (scale_override > 0.0 && !j.contains("scale")) scale = scale_override;
    return UnderlyingProposal::isotropic_gaussian(dim, scale).with_equal_increments(equal);
  }
  if (kind == "radial") {
    reject_unknown(j, p, {"kind", "radius", "equal_increments"});
    return UnderlyingProposal::radial(dim, parse_radius(require(j, p, "radius"), p + ".radius"))
        .with_equal_increments(equal);
  }
  throw ConfigError(p + ".kind", "must be gaussian or radial");
}

HaltingIndex parse_halting(const json& j, const std::string& p) {
  const std::string kind = text(require(j, p, "kind"), p + ".kind");
  if (kind == "deterministic") {
    reject_unknown(j, p, {"kind", "k"});
    return HaltingIndex(DeterministicHalting{count(require(j, p, "k"), p + ".k")});
  }
  if (kind == "geometric") {
    reject_unknown(j, p, {"kind", "p", "cap"});
    const double prob = number(require(j, p, "p"), p + ".p");
    if (!(prob > 0.0 && prob <= 1.0)) throw ConfigError(p + ".p", "must lie in (0, 1]");
    const std::uint64_t cap = j.contains("cap") ? count(j["cap"], p + ".cap") : 10000;
    return HaltingIndex(GeometricHalting{prob, cap});
  }
  if (kind == "infinite") {
    reject_unknown(j, p, {"kind", "safety_cap"});
    const std::uint64_t cap =
        j.contains("safety_cap") ? count(j["safety_cap"], p + ".safety_cap") : 1000000;
    return HaltingIndex(InfiniteHalting{cap});
  }
  throw ConfigError(p + ".kind", "must be one of deterministic, geometric, infinite");
}

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("<root>", "must be an object");
  reject_unknown(doc, "", {"target", "sampler", "run", "output"});
  ExperimentConfig c;
  c.target = parse_target(require(doc, "", "target"));
  c.sampler = parse_sampler(require(doc, "", "sampler"), c.target.dim, c.target);
  c.run = doc.contains("run") ? parse_run(doc["run"], c.target.dim) : RunSpec{};
  c.output = doc.contains("output") ? parse_output(doc["output"]) : OutputSpec{};
  c.source = doc;
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("<file>", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(doc);
}

BuiltTarget build_target(const TargetSpec& spec) {
  BuiltTarget b;
  b.dim = spec.dim;
  if (spec.kind == "intervals") {
    b.log_target = interval_union_target(spec.intervals);
    b.default_x0 = Point::Constant(1, 0.5 * (spec.intervals.front().first + spec.intervals.front().second));
  } else if (spec.kind == "mixture_tail") {
    GaussianMixture g = [&] {
      if (spec.mixture_file.empty())
        return make_random_mixture(spec.mixture_seed, spec.components, spec.dim, spec.spread);
      std::ifstream in(spec.mixture_file);
      if (!in) throw ConfigError("target.mixture_file", "cannot open " + spec.mixture_file);
      return mixture_from_json(json::parse(in));
    }();
    if (g.dim() != spec.dim) throw ConfigError("target.dim", "does not match the mixture file");
    b.default_x0 = level_set_entry_point(g, spec.level_log);
    b.log_target = level_conditioned_target(std::move(g), spec.level_log);
  } else if (spec.kind == "eggholder") {
    b.objective = [](const Point& x) { return eggholder(x); };
    b.domain = eggholder_domain();
    b.log_target = boltzmann_target(b.objective, spec.temperature, *b.domain);
    b.default_x0 = Point::Zero(2);
  } else if (spec.kind == "quadratic_box") {
    const Eigen::VectorXd c = spec.center;
    b.objective = [c](const Point& x) { return (x - c).squaredNorm(); };
    b.domain = Box(spec.lower, spec.upper);
    b.log_target = boltzmann_target(b.objective, spec.temperature, *b.domain);
    b.default_x0 = 0.5 * (spec.lower + spec.upper);
  } else {
    throw ConfigError("target.kind", "unsupported kind " + spec.kind);
  }
  return b;
}

}  // namespace skipping::cli
