#include "skipping/cli/experiments.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "skipping/diagnostics.hpp"
#include "skipping/parallel.hpp"

namespace skipping::cli {

using nlohmann::json;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

json estimate_json(const BatchMeansEstimate& e) {
  return {{"mean", e.mean}, {"std_error", e.std_error}, {"n_batches", e.n_batches}};
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

}  // namespace

TuneResult tune_rwm_scale(const LogTarget& target, const Point& x0, double target_acceptance,
                          std::uint64_t pilot_steps, const RngStream& rng, int max_pilots,
                          double tolerance) {
  double lo = std::log(1e-3);
  double hi = std::log(1e3);
  TuneResult best;
  double best_gap = kPosInf;
  for (int k = 0; k < max_pilots; ++k) {
    const double scale = std::exp(0.5 * (lo + hi));
    RngStream stream = rng.split(static_cast<std::uint64_t>(k));
    const auto chain = run_chain(
        x0, rwm_kernel(target, UnderlyingProposal::isotropic_gaussian(target.dim(), scale)),
        pilot_steps, stream);
    const double acc = chain.acceptance_rate;
    best.pilots = k + 1;
    if (std::abs(acc - target_acceptance) < best_gap) {
      best_gap = std::abs(acc - target_acceptance);
      best.scale = scale;
      best.acceptance = acc;
    }
    if (best_gap < tolerance) break;
    if (acc > target_acceptance) lo = std::log(scale);
    else hi = std::log(scale);
  }
  return best;
}

void write_trace_csv(std::ostream& out, const ChainResult& chain) {
  const Eigen::Index d = chain.trace.empty() ? 0 : chain.trace.front().state.size();
  out << kTraceSchemaLine << '\n' << "step";
  for (Eigen::Index i = 1; i <= d; ++i) out << ",x" << i;
  out << ",accepted,skip_count,log_target\n";
  std::string line;
  for (std::size_t n = 0; n < chain.trace.size(); ++n) {
    const StepRecord& r = chain.trace[n];
    const Point& x = r.next_state();
    line = fmt::format("{}", n + 1);
    for (Eigen::Index i = 0; i < x.size(); ++i) line += fmt::format(",{}", x[i]);
    line += fmt::format(",{},{},{}\n", r.accepted ? 1 : 0, r.skip_count, r.next_log_target());
    out << line;
  }
}

void write_trace_csv(const std::filesystem::path& path, const ChainResult& chain) {
  auto out = open_out(path);
  write_trace_csv(out, chain);
}

void write_json(const std::filesystem::path& path, const json& doc) {
  auto out = open_out(path);
  out << doc.dump(2) << '\n';
}

// --- sample -------------------------------------------------------------------

SampleOutcome run_sample(const ExperimentConfig& cfg, unsigned threads) {
  const auto t0 = std::chrono::steady_clock::now();
  const BuiltTarget built = build_target(cfg.target);
  const Point x0 = cfg.run.x0 ? *cfg.run.x0 : built.default_x0;
  const RngStream root(cfg.run.seed);

  double scale_override = 0.0;
  TuneResult tuning;
  if (cfg.run.tune) {
    if (!built.log_target) throw ConfigError("run.tune", "target has no log-density to tune on");
    tuning = tune_rwm_scale(*built.log_target, x0, cfg.run.tune_acceptance, cfg.run.pilot_steps,
                            root.split(0xC0FFEE));
    scale_override = tuning.scale;
  }

  json proposal_doc = cfg.sampler.proposal;
  if (cfg.run.tune) {
    if (proposal_doc.value("kind", "") != "gaussian" || proposal_doc.contains("covariance"))
      throw ConfigError("run.tune", "tuning needs an isotropic gaussian proposal");
    proposal_doc["scale"] = scale_override;
  }
  const UnderlyingProposal proposal =
      parse_proposal(proposal_doc, built.dim, "sampler.proposal", scale_override);

  SkippingConfig skip_cfg{proposal, HaltingIndex{}, cfg.sampler.use_doubling, {}, std::nullopt};
  if (cfg.sampler.kind != "rwm") skip_cfg.halting = parse_halting(cfg.sampler.halting, "sampler.halting");
  for (const auto& ball : cfg.sampler.obstacles) {
    skip_cfg.obstacles.push_back(ConvexObstacle{[ball](const Point& z) {
      return (z - ball.center).norm() < ball.radius;
    }});
  }

  SampleOutcome outcome;
  outcome.chains.resize(cfg.run.chains);
  parallel_for(cfg.run.chains, threads, [&](std::size_t c) {
    StepKernel kernel;
    if (cfg.sampler.kind == "rwm") kernel = rwm_kernel(*built.log_target, proposal);
    else if (cfg.sampler.kind == "skipping") kernel = skipping_kernel(*built.log_target, skip_cfg);
    else kernel = mss_kernel(built.objective, *built.domain, skip_cfg);
    RngStream stream = root.split(c + 1);
    outcome.chains[c] = run_chain(x0, kernel, cfg.run.steps, stream);
  });

  const std::filesystem::path dir(cfg.output.dir);
  json per_chain = json::array();
  double acc_sum = 0.0;
  double skip_sum = 0.0;
  for (std::size_t c = 0; c < outcome.chains.size(); ++c) {
    const ChainResult& chain = outcome.chains[c];
    std::filesystem::path trace_path = dir / cfg.output.trace;
    if (cfg.run.chains > 1) {
      const auto stem = trace_path.stem().string();
      trace_path = dir / fmt::format("{}_chain{}{}", stem, c, trace_path.extension().string());
    }
    write_trace_csv(trace_path, chain);
    outcome.trace_files.push_back(trace_path);

    json coords = json::array();
    std::vector<double> x1;
    for (Eigen::Index i = 0; i < built.dim; ++i) {
      const auto series = discard_burn_in(observe(chain, [i](const Point& x) { return x[i]; }),
                                          cfg.run.burn_in);
      if (i == 0) x1 = series;
      coords.push_back(series.size() >= 100 ? estimate_json(ergodic_average(series)) : json(nullptr));
    }
    json chain_doc = {{"chain", c},
                      {"acceptance_rate", chain.acceptance_rate},
                      {"skip_fraction", chain.skip_fraction},
                      {"ergodic_means", coords}};
    if (x1.size() >= 1000) {
      const auto ac = lag1_autocovariance(x1);
      chain_doc["lag1_autocovariance_x1"] = {{"estimate", ac.estimate}, {"std_error", ac.std_error}};
    }
    per_chain.push_back(std::move(chain_doc));
    acc_sum += chain.acceptance_rate;
    skip_sum += chain.skip_fraction;
  }

  const double n_chains = static_cast<double>(outcome.chains.size());
  json metrics = {{"chains", per_chain}, {"x0", std::vector<double>(x0.data(), x0.data() + x0.size())}};
  if (cfg.run.tune) {
    metrics["tuned_scale"] = tuning.scale;
    metrics["tuning_pilot_acceptance"] = tuning.acceptance;
    metrics["tuning_pilots"] = tuning.pilots;
  }
  outcome.summary = {{"schema_version", kSchemaVersion},
                     {"config", cfg.source},
                     {"seed", cfg.run.seed},
                     {"acceptance_rate", acc_sum / n_chains},
                     {"skip_fraction", skip_sum / n_chains},
                     {"metrics", metrics},
                     {"runtime_s", seconds_since(t0)}};
  write_json(dir / cfg.output.summary, outcome.summary);
  return outcome;
}

// --- tail experiment ----------------------------------------------------------

double tail_level_for_dim(Eigen::Index dim) {
  if (dim == 2) return -30.0;
  if (dim == 50) return -350.0;
  // Linear in d through the two reference levels.
  return -30.0 - 320.0 * static_cast<double>(dim - 2) / 48.0;
}

double tail_spread_for_dim(Eigen::Index) { return 10.0; }

TailExperimentResult run_tail_experiment(const TailExperimentOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  const RngStream root(opts.seed);
  GaussianMixture mixture =
      make_random_mixture(root.split(0).seed(), opts.components, opts.dim, tail_spread_for_dim(opts.dim));
  const double level = tail_level_for_dim(opts.dim);
  const Point x0 = level_set_entry_point(mixture, level);
  const LogTarget target = level_conditioned_target(mixture, level);

  const TuneResult tuning =
      tune_rwm_scale(target, x0, opts.target_acceptance, opts.pilot_steps, root.split(1));
  const UnderlyingProposal q = UnderlyingProposal::isotropic_gaussian(opts.dim, tuning.scale);

  RngStream rwm_stream = root.split(2);
  ChainResult rwm = run_chain(x0, rwm_kernel(level_conditioned_target(mixture, level), q),
                              opts.steps, rwm_stream);
  SkippingConfig cfg{q, HaltingIndex(InfiniteHalting{}), false, {}, std::nullopt};
  RngStream skip_stream = root.split(2);
  ChainResult skipping = run_chain(x0, skipping_kernel(level_conditioned_target(mixture, level), cfg),
                                   opts.steps, skip_stream);

  return TailExperimentResult{std::move(mixture), level,    x0, tuning, std::move(rwm),
                              std::move(skipping), seconds_since(t0)};
}

json TailExperimentResult::comparison_json() const {
  auto chain_json = [](const ChainResult& c) {
    return json{{"acceptance_rate", c.acceptance_rate}, {"skip_fraction", c.skip_fraction}};
  };
  return {{"schema_version", kSchemaVersion},
          {"dim", mixture.dim()},
          {"components", mixture.size()},
          {"level_log", level_log},
          {"x0", std::vector<double>(x0.data(), x0.data() + x0.size())},
          {"tuned_scale", tuning.scale},
          {"tuning_pilot_acceptance", tuning.acceptance},
          {"rwm", chain_json(rwm)},
          {"skipping", chain_json(skipping)},
          {"runtime_s", runtime_s}};
}

void write_tail_experiment(const TailExperimentResult& res, const std::filesystem::path& dir) {
  write_trace_csv(dir / "rwm_trace.csv", res.rwm);
  write_trace_csv(dir / "skipping_trace.csv", res.skipping);
  {
    auto out = open_out(dir / "first_coordinate.csv");
    out << "step,rwm_x1,skipping_x1\n";
    for (std::size_t n = 0; n < res.rwm.trace.size(); ++n) {
      out << fmt::format("{},{},{}\n", n + 1, res.rwm.trace[n].next_state()[0],
                         res.skipping.trace[n].next_state()[0]);
    }
  }
  json mix;
  to_json(mix, res.mixture);
  write_json(dir / "mixture.json", mix);
  write_json(dir / "comparison.json", res.comparison_json());
}

// --- tables -------------------------------------------------------------------

MethodSummary summarize(const std::string& name, const std::vector<OptRunReport>& reports,
                        double optimum_value) {
  MethodSummary s;
  s.name = name;
  s.runs = reports.size();
  for (const auto& r : reports) {
    s.mean_distance += r.distance_to_optimum;
    s.basin_fraction += r.in_basin ? 1.0 : 0.0;
    s.mean_gap += r.final_value - optimum_value;
    s.mean_evals += static_cast<double>(r.function_evals);
    s.mean_wall_time_s += r.wall_time_s;
  }
  const double n = static_cast<double>(reports.size());
  s.mean_distance /= n;
  s.basin_fraction /= n;
  s.mean_gap /= n;
  s.mean_evals /= n;
  s.mean_wall_time_s /= n;
  return s;
}

TableResult run_table1(const TableOptions& opts) {
  const BoxProblem prob = eggholder_problem();
  const RngStream root(opts.seed);
  const auto q = UnderlyingProposal::gaussian(2.0 * Eigen::MatrixXd::Identity(2, 2));
  TableResult t;
  t.title = "Multistart starting-point quality on eggholder";
  t.options = opts;
  const std::vector<std::pair<std::string, MultistartMode>> modes = {
      {"vanilla", VanillaMultistart{}},
      {"rwm_augmented", RwmAugmented{opts.m, q, 1.0}},
      {"mss_augmented",
       MssAugmented{opts.m, SkippingConfig{q, HaltingIndex(DeterministicHalting{200}), false, {},
                                           std::nullopt}}},
  };
  for (const auto& [name, mode] : modes) {
    auto reports = multistart(prob, opts.runs, mode, root, opts.threads);
    t.methods.push_back(summarize(name, reports, prob.known_optimum->value));
    t.reports.push_back(std::move(reports));
  }
  return t;
}

TableResult run_table2(const TableOptions& opts) {
  const BoxProblem prob = eggholder_problem();
  const RngStream root(opts.seed);
  const double w = matched_uniform_half_width(1.0);
  TableResult t;
  t.title = "Basin-hopping variants on eggholder";
  t.options = opts;
  const std::vector<std::pair<std::string, HoppingMode>> modes = {
      {"classic", ClassicHopping{w, 1.0}},
      {"monotonic", MonotonicHopping{w}},
      {"mss", MssHopping{SkippingConfig{UnderlyingProposal::isotropic_gaussian(2, 1.0),
                                        HaltingIndex(DeterministicHalting{200}), false, {},
                                        std::nullopt}}},
  };
  for (const auto& [name, mode] : modes) {
    auto reports = basin_hopping_restarts(prob, opts.runs, mode, opts.m, root, opts.threads);
    t.methods.push_back(summarize(name, reports, prob.known_optimum->value));
    t.reports.push_back(std::move(reports));
  }
  return t;
}

json TableResult::to_json() const {
  json methods_doc = json::array();
  for (const auto& m : methods) {
    methods_doc.push_back({{"method", m.name},
                           {"runs", m.runs},
                           {"mean_distance_to_optimum", m.mean_distance},
                           {"basin_fraction", m.basin_fraction},
                           {"mean_optimality_gap", m.mean_gap},
                           {"mean_function_evals", m.mean_evals},
                           {"mean_wall_time_s", m.mean_wall_time_s}});
  }
  return {{"schema_version", kSchemaVersion},
          {"title", title},
          {"seed", options.seed},
          {"runs", options.runs},
          {"m", options.m},
          {"metrics", methods_doc}};
}

std::string TableResult::to_text() const {
  std::ostringstream os;
  os << title << " (N = " << options.runs << ", m = " << options.m << ", seed = " << options.seed
     << ")\n";
  os << fmt::format("{:<34}", "metric");
  for (const auto& m : methods) os << fmt::format("{:>16}", m.name);
  os << '\n';
  auto row = [&](const std::string& label, auto getter, const char* spec) {
    os << fmt::format("{:<34}", label);
    for (const auto& m : methods) os << fmt::format(fmt::runtime(spec), getter(m));
    os << '\n';
  };
  row("mean distance to optimum", [](const MethodSummary& m) { return m.mean_distance; }, "{:>16.3f}");
  row("basin fraction", [](const MethodSummary& m) { return m.basin_fraction; }, "{:>16.3f}");
  row("mean optimality gap", [](const MethodSummary& m) { return m.mean_gap; }, "{:>16.3f}");
  row("mean function evaluations", [](const MethodSummary& m) { return m.mean_evals; }, "{:>16.0f}");
  row("mean wall time (s/run)", [](const MethodSummary& m) { return m.mean_wall_time_s; }, "{:>16.4f}");
  return os.str();
}

void write_table(const TableResult& table, const std::filesystem::path& dir,
                 const std::string& stem) {
  write_json(dir / (stem + ".json"), table.to_json());
  auto out = open_out(dir / (stem + ".txt"));
  out << table.to_text();
}

}  // namespace skipping::cli
