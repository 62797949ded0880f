// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "skipping/cli/experiments.hpp"
#include "skipping/diagnostics.hpp"
#include "skipping/doubling.hpp"
#include "skipping/optimize.hpp"
#include "skipping/targets.hpp"
#include "support.hpp"

using namespace skipping;
using testsupport::p1;
using testsupport::p2;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

SkippingConfig with_halting(UnderlyingProposal q, HaltingLaw law) {
  return SkippingConfig{std::move(q), HaltingIndex(law), false, {}, std::nullopt};
}

// Stationary start on [0,1] u [2,3].
Point stationary_start(RngStream& rng) {
  const double u = rng.uniform(0.0, 2.0);
  return p1(u < 1.0 ? u : u + 1.0);
}

bool identical(const ChainResult& a, const ChainResult& b) {
  if (a.trace.size() != b.trace.size()) return false;
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    const auto& x = a.trace[i];
    const auto& y = b.trace[i];
    if (x.accepted != y.accepted || x.proposal != y.proposal || x.state != y.state ||
        x.skip_count != y.skip_count)
      return false;
  }
  return true;
}

Outcome rwm_reduction() {
  const GaussianMixture mix = make_random_mixture(11, 20, 2, 10.0);
  struct Case {
    const char* name;
    LogTarget target;
    Point x0;
    double scale;
  };
  const std::vector<Case> cases{
      {"two-interval", testsupport::two_intervals(), p1(0.5), 0.5},
      {"mixture tail", level_conditioned_target(mix, -30.0), level_set_entry_point(mix, -30.0), 0.5},
      {"eggholder Boltzmann", boltzmann_target([](const Point& x) { return eggholder(x); }, 1.0,
                                               eggholder_domain()),
       p2(0.0, 0.0), 2.0},
  };
  std::string detail;
  bool all = true;
  for (const auto& c : cases) {
    const auto q = UnderlyingProposal::isotropic_gaussian(c.x0.size(), c.scale);
    RngStream a(2024);
    RngStream b(2024);
    const auto skip = run_chain(c.x0, skipping_kernel(c.target, with_halting(q, DeterministicHalting{1})),
                                10000, a);
    const auto rwm = run_chain(c.x0, rwm_kernel(c.target, q), 10000, b);
    const bool same = identical(skip, rwm) && a() == b();
    all = all && same;
    detail += fmt::format("{}: {}; ", c.name, same ? "identical" : "differ");
  }
  return {all, detail};
}

Outcome stationarity() {
  const LogTarget t = testsupport::two_intervals();
  RngStream rng(1);
  const auto chain = run_chain(p1(0.5), skipping_kernel(t, testsupport::two_interval_skipping()), 200000, rng);
  const auto xs = observe(chain, [](const Point& x) { return x[0]; });
  double upper = 0.0;
  for (double x : xs) upper += x >= 2.0 ? 1.0 : 0.0;
  upper /= static_cast<double>(xs.size());
  const double m = testsupport::mean(xs);

  RngStream rng2(1);
  const auto rwm = run_chain(p1(0.5), rwm_kernel(t, UnderlyingProposal::isotropic_gaussian(1, 0.1)), 200000, rng2);
  double rwm_upper = 0.0;
  for (double x : observe(rwm, [](const Point& x) { return x[0]; })) rwm_upper += x >= 2.0 ? 1.0 : 0.0;
  rwm_upper /= 200000.0;

  const bool pass = std::abs(upper - 0.5) <= 0.03 && std::abs(m - 1.5) <= 0.05 && rwm_upper < 0.01;
  return {pass, fmt::format("mass[2,3]={:.4f} mean={:.4f} rwm(0.1) mass[2,3]={:.4f}", upper, m, rwm_upper)};
}

Outcome reversibility() {
  const LogTarget t = testsupport::two_intervals();
  std::vector<double> edges;
  for (int i = 0; i <= 8; ++i) edges.push_back(3.0 * i / 8.0);
  int ok = 0;
  std::string ps;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    RngStream rng(1000 + seed);
    const Point x0 = stationary_start(rng);
    const auto chain = run_chain(x0, skipping_kernel(t, testsupport::two_interval_skipping()), 100000, rng);
    const auto xs = observe(chain, [](const Point& x) { return x[0]; });
    const double p = transition_balance_test(xs, edges);
    if (p > 0.01) ++ok;
    ps += fmt::format("{:.3f} ", p);
  }
  return {ok >= 18, fmt::format("{}/20 seeds with p > 0.01 (p: {})", ok, ps)};
}

Outcome peskun() {
  const LogTarget t = testsupport::two_intervals();
  const auto cfg = testsupport::two_interval_skipping();
  int ok = 0;
  std::string diffs;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    RngStream init(2000 + seed);
    const Point x0 = stationary_start(init);
    RngStream a = init.split(1);
    RngStream b = init.split(2);
    const auto skip = run_chain(x0, skipping_kernel(t, cfg), 100000, a);
    const auto rwm = run_chain(x0, rwm_kernel(t, cfg.proposal), 100000, b);
    const auto id = [](const Point& x) { return x[0]; };
    const auto cs = lag1_autocovariance(observe(skip, id));
    const auto cr = lag1_autocovariance(observe(rwm, id));
    const double pooled = std::sqrt(cs.std_error * cs.std_error + cr.std_error * cr.std_error);
    if (cs.estimate <= cr.estimate + 3.0 * pooled) ++ok;
    diffs += fmt::format("{:.3f}/{:.3f} ", cs.estimate, cr.estimate);
  }
  return {ok == 10, fmt::format("{}/10 seeds (skip/rwm lag-1 autocov: {})", ok, diffs)};
}

Outcome proposal_dominance() {
  const LogTarget t = testsupport::two_intervals();
  const auto cfg = testsupport::two_interval_skipping();
  RngStream rng(5);
  const int n = 100000;
  std::vector<double> zs(n);
  for (auto& z : zs) z = skipping_proposal(p1(0.5), t, cfg, rng).z[0];

  const double h = 0.02;
  const double sigma = 0.5;
  const double rk = 1.0 / (2.0 * std::sqrt(std::numbers::pi));  // roughness of the Gaussian kernel
  std::vector<double> grid;
  for (int i = 0; i < 10; ++i) grid.push_back(0.05 + 0.1 * i);
  for (int i = 0; i < 10; ++i) grid.push_back(2.05 + 0.1 * i);

  int ok = 0;
  double worst = kPosInf;
  for (double g : grid) {
    double s = 0.0;
    for (double z : zs) {
      const double u = (g - z) / h;
      s += std::exp(-0.5 * u * u);
    }
    const double kde = s / (n * h * std::sqrt(2.0 * std::numbers::pi));
    const double band = 3.0 * std::sqrt(kde * rk / (n * h));
    const double u = (g - 0.5) / sigma;
    const double q = std::exp(-0.5 * u * u) / (sigma * std::sqrt(2.0 * std::numbers::pi));
    if (kde >= q - band) ++ok;
    worst = std::min(worst, kde - (q - band));
  }
  return {ok == 20, fmt::format("{}/20 grid points dominated, min margin {:.4f}", ok, worst)};
}

Outcome doubling_equivalence() {
  bool all = true;
  std::string detail;
  for (double len : {5.0, 50.0, 500.0}) {
    const LogTarget t(1, [len](const Point& x) { return (x[0] <= 0.0 || x[0] >= len) ? 0.0 : kNegInf; });
    RngStream a(61);
    RngStream b(62);
    std::vector<double> ta_d, z_d, ta_s, z_s;
    double samples = 0.0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
      const auto r = doubling_find_entry(p1(0.0), p1(1.0), ExponentialIncrements{1.0}, t, a);
      ta_d.push_back(static_cast<double>(r.t_a));
      z_d.push_back(r.z[0]);
      samples += static_cast<double>(r.partial_sum_samples);
      double z = 0.0;
      std::uint64_t k = 0;
      do {
        z += b.exponential(1.0);
        ++k;
      } while (z < len);
      ta_s.push_back(static_cast<double>(k));
      z_s.push_back(z);
    }
    const double p_t = ks_two_sample(ta_d, ta_s);
    const double p_z = ks_two_sample(z_d, z_s);
    const double per_call = samples / n;
    const double bound = 2.0 * std::log2(testsupport::mean(ta_s)) + 4.0;
    all = all && p_t > 0.01 && p_z > 0.01 && per_call <= bound;
    detail += fmt::format("L={}: p(T)={:.3f} p(Z)={:.3f} samples {:.2f} <= {:.2f}; ", len, p_t, p_z, per_call,
                          bound);
  }
  return {all, detail};
}

Outcome tail_experiment() {
  bool all = true;
  std::string detail;
  for (Eigen::Index d : {2, 50}) {
    cli::TailExperimentOptions opts;
    opts.dim = d;
    const auto r = cli::run_tail_experiment(opts);
    const double gap = r.skipping.acceptance_rate - r.rwm.acceptance_rate;
    all = all && gap >= 0.10 && r.skipping.skip_fraction >= 0.05;
    detail += fmt::format("d={}: rwm {:.3f} skip {:.3f} skip fraction {:.3f}; ", d, r.rwm.acceptance_rate,
                          r.skipping.acceptance_rate, r.skipping.skip_fraction);
  }
  return {all, detail};
}

const cli::MethodSummary& method(const cli::TableResult& t, const std::string& name) {
  for (const auto& m : t.methods)
    if (m.name == name) return m;
  throw InvalidArgument("no method " + name);
}

Outcome table1() {
  cli::TableOptions opts;
  opts.runs = 1000;
  const auto big = cli::run_table1(opts);
  const auto& mss = method(big, "mss_augmented");
  const auto& van = method(big, "vanilla");
  opts.runs = 200;
  const auto small = cli::run_table1(opts);
  const auto& mss_s = method(small, "mss_augmented");
  const auto& van_s = method(small, "vanilla");
  const bool pass = mss.basin_fraction >= 0.55 && mss.basin_fraction <= 0.75 && van.basin_fraction <= 0.02 &&
                    mss.mean_gap < 50.0 && mss_s.basin_fraction >= 0.45 &&
                    mss_s.basin_fraction >= 20.0 * van_s.basin_fraction;
  return {pass, fmt::format("N=1000: mss basin {:.3f} gap {:.2f}, vanilla basin {:.3f}; N=200: mss {:.3f} "
                            "vanilla {:.3f}",
                            mss.basin_fraction, mss.mean_gap, van.basin_fraction, mss_s.basin_fraction,
                            van_s.basin_fraction)};
}

Outcome table2() {
  cli::TableOptions opts;
  opts.runs = 1000;
  const auto t = cli::run_table2(opts);
  const auto& mss = method(t, "mss");
  const auto& classic = method(t, "classic");
  const auto& mono = method(t, "monotonic");
  const bool pass = mss.basin_fraction >= 0.40 && mss.basin_fraction <= 0.70 && classic.basin_fraction <= 0.10 &&
                    mono.basin_fraction <= 0.10 && mss.mean_gap < 20.0;
  return {pass, fmt::format("mss-bh basin {:.3f} gap {:.2f}; classic {:.3f}; msbh {:.3f}", mss.basin_fraction,
                            mss.mean_gap, classic.basin_fraction, mono.basin_fraction)};
}

Outcome eggholder_truth() {
  const auto r = local_search(p2(510.0, 400.0), eggholder_problem());
  const double dist = (r.point - Point(kEggholderOptimum)).norm();
  const bool pass = std::abs(r.value - (-959.6407)) <= 1e-3 && dist <= 0.5;
  return {pass, fmt::format("f={:.5f} at ({:.4f}, {:.4f}), distance {:.4f}", r.value, r.point[0], r.point[1], dist)};
}

Outcome mss_monotonicity() {
  const BoxProblem prob = eggholder_problem();
  const auto cfg = with_halting(UnderlyingProposal::isotropic_gaussian(2, std::sqrt(2.0)), InfiniteHalting{200});
  SkippingConfig mss_cfg = cfg;
  mss_cfg.halting = HaltingIndex(DeterministicHalting{200});
  std::uint64_t violations = 0;
  std::uint64_t accepted = 0;
  for (std::uint64_t c = 0; c < 100; ++c) {
    RngStream rng = RngStream(11).split(c);
    Point x = prob.bounds.sample_uniform(rng);
    double fx = prob.f(x);
    for (int s = 0; s < 200; ++s) {
      const auto r = mss_step(x, fx, prob.f, prob.bounds, mss_cfg, rng);
      if (!r.accepted) continue;
      ++accepted;
      const double fz = prob.f(r.proposal);
      if (!(fz < fx)) ++violations;
      x = r.proposal;
      fx = fz;
    }
  }
  return {violations == 0, fmt::format("{} accepted moves, {} violations", accepted, violations)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"rwm-reduction", rwm_reduction},
      {"stationarity", stationarity},
      {"reversibility", reversibility},
      {"peskun-ordering", peskun},
      {"proposal-dominance", proposal_dominance},
      {"doubling-equivalence", doubling_equivalence},
      {"tail-experiment", tail_experiment},
      {"table1", table1},
      {"table2", table2},
      {"eggholder-ground-truth", eggholder_truth},
      {"mss-monotonicity", mss_monotonicity},
  };
  int failed = 0;
  int index = 0;
  for (const auto& [name, run] : criteria) {
    ++index;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failed;
    fmt::print("{} {:2d} {} ({:.1f} s): {}\n", o.pass ? "PASS" : "FAIL", index, name, secs, o.detail);
    std::fflush(stdout);
  }
  fmt::print("{} of {} criteria passed\n", index - failed, index);
  return failed == 0 ? 0 : 1;
}
