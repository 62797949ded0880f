#include <doctest.h>

#include <cmath>
#include <vector>

#include "skipping/diagnostics.hpp"
#include "skipping/samplers.hpp"
#include "skipping/targets.hpp"
#include "support.hpp"

using namespace skipping;
using testsupport::p1;
using testsupport::p2;

namespace {

// Support is the real line minus the open interval (0, len).
LogTarget outside_gap(double len) {
  return LogTarget(1, [len](const Point& x) { return (x[0] <= 0.0 || x[0] >= len) ? 0.0 : kNegInf; });
}

SkippingConfig unit_steps_forward(HaltingLaw halting) {
  return SkippingConfig{UnderlyingProposal::radial(1, ConstantRadius{1.0}), HaltingIndex(halting),
                        false, {}, testsupport::forward_only()};
}

bool same_record(const StepRecord& a, const StepRecord& b) {
  return a.state == b.state && a.proposal == b.proposal && a.accepted == b.accepted &&
         a.skip_count == b.skip_count && a.log_target_at_state == b.log_target_at_state &&
         a.log_target_at_proposal == b.log_target_at_proposal;
}

}  // namespace

TEST_CASE("hand-iterated skipping chain across a gap") {
  const LogTarget t = outside_gap(10.0);
  RngStream rng(1);
  SUBCASE("K infinite enters at 10.5 after 11 steps") {
    const auto prop = skipping_proposal(p1(-0.5), t, unit_steps_forward(InfiniteHalting{1000}), rng);
    CHECK(prop.z[0] == 10.5);
    CHECK(prop.skip_count == 11);
    CHECK(prop.log_target_z == 0.0);
  }
  SUBCASE("K = 5 halts inside the gap and the step is rejected") {
    const auto cfg = unit_steps_forward(DeterministicHalting{5});
    const auto prop = skipping_proposal(p1(-0.5), t, cfg, rng);
    CHECK(prop.z[0] == 4.5);
    CHECK(prop.skip_count == 5);
    RngStream rng2(1);
    const StepRecord r = skip_step(p1(-0.5), t, cfg, rng2);
    CHECK_FALSE(r.accepted);
    CHECK(r.next_state()[0] == -0.5);
  }
}

TEST_CASE("first proposal inside the support ends the loop at once") {
  const LogTarget everywhere(2, [](const Point&) { return 0.0; });
  SkippingConfig cfg{UnderlyingProposal::isotropic_gaussian(2, 1.0),
                     HaltingIndex(DeterministicHalting{50}), false, {}, std::nullopt};
  RngStream a(2);
  RngStream b(2);
  const auto prop = skipping_proposal(p2(0, 0), everywhere, cfg, a);
  CHECK(prop.skip_count == 1);
  const Point y = cfg.proposal.sample_offset(b);
  CHECK(prop.z == y);
}

TEST_CASE("a state outside the support accepts every proposal") {
  const LogTarget t = testsupport::two_intervals();
  auto cfg = testsupport::two_interval_skipping();
  cfg.halting = HaltingIndex(DeterministicHalting{3});
  RngStream rng(3);
  for (int i = 0; i < 200; ++i) {
    const StepRecord r = skip_step(p1(1.5), t, cfg, rng);
    REQUIRE(r.accepted);
  }
}

TEST_CASE("K = 1 reproduces random-walk Metropolis bit for bit") {
  const auto q = UnderlyingProposal::isotropic_gaussian(1, 0.7);
  const LogTarget t = testsupport::two_intervals();
  const SkippingConfig cfg{q, HaltingIndex(DeterministicHalting{1}), false, {}, std::nullopt};
  RngStream a(4);
  RngStream b(4);
  Point xa = p1(0.5);
  Point xb = p1(0.5);
  for (int i = 0; i < 10000; ++i) {
    const StepRecord ra = skip_step(xa, t, cfg, a);
    const StepRecord rb = rwm_step(xb, t, q, b);
    REQUIRE(same_record(ra, rb));
    xa = ra.next_state();
    xb = rb.next_state();
  }
  CHECK(a() == b());
}

TEST_CASE("in-support state rejects a proposal halted in the gap") {
  const LogTarget t = outside_gap(10.0);
  RngStream rng(5);
  const StepRecord r = skip_step(p1(-0.5), t, unit_steps_forward(DeterministicHalting{3}), rng);
  CHECK(r.proposal[0] == 2.5);
  CHECK_FALSE(r.accepted);
  CHECK(r.log_target_at_proposal == kNegInf);
}

TEST_CASE("angular acceptance") {
  const LogTarget t = testsupport::two_intervals();
  const auto uniform = DirectionalDensity::uniform(1);
  CHECK(angular_log_acceptance(t, p1(0.5), p1(2.5), p1(1.0), uniform) ==
        log_acceptance(t, p1(0.5), p1(2.5)));
  CHECK(angular_log_acceptance(t, p1(0.5), p1(1.5), p1(1.0), uniform) == kNegInf);
  CHECK(angular_log_acceptance(t, p1(1.5), p1(0.5), p1(-1.0), uniform) == 0.0);
  // Forward density 0.2, reverse 0.4 or 0.1.
  auto make = [](double reverse) {
    return DirectionalDensity{[reverse](const Point& x, const Point&) { return x[0] < 1.0 ? 0.2 : reverse; },
                              [](const Point&, RngStream&) { return p1(1.0); }};
  };
  CHECK(angular_log_acceptance(t, p1(0.5), p1(2.5), p1(1.0), make(0.4)) == 0.0);
  CHECK(angular_log_acceptance(t, p1(0.5), p1(2.5), p1(1.0), make(0.1)) ==
        doctest::Approx(std::log(0.5)));
  CHECK(angular_log_acceptance(-1.0, -3.0, p1(0.0), p1(1.0), p1(1.0), make(0.4)) ==
        doctest::Approx(-2.0 + std::log(2.0)));
}

TEST_CASE("random-walk step cases on the unit interval") {
  const LogTarget t = interval_union_target({{0.0, 1.0}});
  RngStream rng(6);
  const auto small = UnderlyingProposal::radial(1, ConstantRadius{0.2});
  const auto big = UnderlyingProposal::radial(1, ConstantRadius{1.0});
  for (int i = 0; i < 20; ++i) {
    const StepRecord r = rwm_step(p1(0.5), t, small, rng);
    REQUIRE(r.accepted);  // 0.7 or 0.3, equal density
    REQUIRE(std::abs(std::abs(r.proposal[0] - 0.5) - 0.2) < 1e-12);
    const StepRecord s = rwm_step(p1(0.5), t, big, rng);
    REQUIRE_FALSE(s.accepted);  // 1.5 or -0.5
    REQUIRE(s.skip_count == 1);
    const StepRecord u = rwm_step(p1(5.0), t, big, rng);
    REQUIRE(u.accepted);
  }
}

TEST_CASE("equal increments reuse the first radius") {
  const LogTarget t = outside_gap(10.0);
  SkippingConfig cfg{UnderlyingProposal::isotropic_gaussian(1, 0.8).with_equal_increments(true),
                     HaltingIndex(InfiniteHalting{100000}), false, {}, testsupport::forward_only()};
  RngStream rng(7);
  for (int i = 0; i < 100; ++i) {
    const auto prop = skipping_proposal(p1(0.0), t, cfg, rng);
    const double travelled = prop.z[0];
    const double r = travelled / static_cast<double>(prop.skip_count);
    REQUIRE(travelled >= 10.0 - 1e-9);
    REQUIRE((static_cast<double>(prop.skip_count) - 1.0) * r < 10.0);
  }
}

TEST_CASE("infinite halting past its safety cap raises") {
  const LogTarget left_only(1, [](const Point& x) { return x[0] <= 0.0 ? 0.0 : kNegInf; });
  RngStream rng(8);
  CHECK_THROWS_AS(skipping_proposal(p1(-0.5), left_only, unit_steps_forward(InfiniteHalting{100}), rng),
                  FiniteSkippingViolation);
}

TEST_CASE("doubling inside the sampler matches sequential skipping") {
  const double len = 50.0;
  const LogTarget t = outside_gap(len);
  SkippingConfig seq{UnderlyingProposal::radial(1, ExponentialRadius{1.0}),
                     HaltingIndex(InfiniteHalting{1000000}), false, {}, testsupport::forward_only()};
  SkippingConfig dbl = seq;
  dbl.use_doubling = true;
  dbl.obstacles.push_back(ConvexObstacle{[len](const Point& z) { return z[0] > 0.0 && z[0] < len; }});
  RngStream a(9);
  RngStream b(10);
  std::vector<double> ka, kb, za, zb;
  for (int i = 0; i < 5000; ++i) {
    const auto pa = skipping_proposal(p1(0.0), t, seq, a);
    const auto pb = skipping_proposal(p1(0.0), t, dbl, b);
    REQUIRE(pb.z[0] >= len);
    ka.push_back(static_cast<double>(pa.skip_count));
    kb.push_back(static_cast<double>(pb.skip_count));
    za.push_back(pa.z[0]);
    zb.push_back(pb.z[0]);
  }
  CHECK(ks_two_sample(za, zb) > 0.01);
  // Discrete counts: compare means too, KS is conservative here.
  CHECK(ks_two_sample(ka, kb) > 0.01);
  CHECK(std::abs(testsupport::mean(ka) - testsupport::mean(kb)) < 0.5);
}

TEST_CASE("re-entering a declared-convex obstacle raises") {
  const LogTarget t = outside_gap(50.0);
  SkippingConfig cfg{UnderlyingProposal::radial(1, ExponentialRadius{1.0}),
                     HaltingIndex(InfiniteHalting{100000}), true, {}, testsupport::forward_only()};
  // Two pieces, so not convex.
  cfg.obstacles.push_back(ConvexObstacle{[](const Point& z) {
    return (z[0] > 0.0 && z[0] < 10.0) || (z[0] > 20.0 && z[0] < 30.0);
  }});
  RngStream rng(16);
  CHECK_THROWS_AS(skipping_proposal(p1(-0.5), t, cfg, rng), ConvexityViolation);
}

TEST_CASE("MSS step acceptance rules on hand-built objectives") {
  const Box d = Box::cube(1, 0.0, 10.0);
  const auto cfg = unit_steps_forward(DeterministicHalting{10});
  RngStream rng(11);
  SUBCASE("downhill lands and is accepted") {
    const Objective f = [](const Point& x) { return -x[0]; };
    const StepRecord r = mss_step(p1(2.0), f, d, cfg, rng);
    CHECK(r.accepted);
    CHECK(r.proposal[0] == 3.0);
    CHECK(r.skip_count == 1);
    CHECK(r.log_target_at_proposal == 3.0);
    CHECK(r.log_target_at_state == 2.0);
  }
  SUBCASE("uphill everywhere ahead is rejected") {
    const Objective f = [](const Point& x) { return x[0]; };
    const StepRecord r = mss_step(p1(2.0), f, d, cfg, rng);
    CHECK_FALSE(r.accepted);
  }
  SUBCASE("equal value is not in the strict sublevel set") {
    const Objective f = [](const Point&) { return 1.0; };
    CHECK_FALSE(mss_step(p1(2.0), f, d, cfg, rng).accepted);
  }
  SUBCASE("skips across to a lower trough") {
    const Objective f = [](const Point& x) { return (x[0] >= 6.0 && x[0] <= 7.0) ? -1.0 : 0.0; };
    const StepRecord r = mss_step(p1(2.0), f, d, cfg, rng);
    CHECK(r.accepted);
    CHECK(r.proposal[0] == 6.0);
    CHECK(r.skip_count == 4);
  }
  SUBCASE("leaving the box keeps skipping and is rejected when halted outside") {
    const Objective f = [](const Point& x) { return -x[0]; };
    const auto short_cfg = unit_steps_forward(DeterministicHalting{3});
    const StepRecord r = mss_step(p1(9.5), f, d, short_cfg, rng);
    CHECK(r.proposal[0] == 12.5);
    CHECK(r.skip_count == 3);
    CHECK_FALSE(r.accepted);
  }
  SUBCASE("an infeasible start accepts the halted proposal") {
    const Objective f = [](const Point& x) { return x[0] < 5.0 ? kPosInf : 0.0; };
    const StepRecord r = mss_step(p1(1.0), f, d, cfg, rng);
    CHECK(r.accepted);
    CHECK(r.proposal[0] == 5.0);
    const StepRecord outside = mss_step(p1(-20.0), f, d, cfg, rng);
    CHECK(outside.accepted);
    CHECK(outside.proposal[0] == -10.0);  // halted after 10 steps, still outside D
  }
}

TEST_CASE("MSS chains never increase f") {
  const Box d = eggholder_domain();
  const SkippingConfig cfg{UnderlyingProposal::isotropic_gaussian(2, std::sqrt(2.0)),
                           HaltingIndex(DeterministicHalting{200}), false, {}, std::nullopt};
  RngStream root(12);
  for (int c = 0; c < 10; ++c) {
    RngStream rng = root.split(c);
    const auto chain = run_chain(d.sample_uniform(rng), mss_kernel(eggholder, d, cfg), 200, rng);
    for (const auto& r : chain.trace) {
      if (r.accepted) REQUIRE(-r.log_target_at_proposal < -r.log_target_at_state);
      else REQUIRE(r.next_state() == r.state);
    }
  }
}

TEST_CASE("run_chain bookkeeping") {
  const LogTarget t = testsupport::two_intervals();
  const auto q = UnderlyingProposal::isotropic_gaussian(1, 0.3);
  RngStream rng(13);
  CHECK(run_chain(p1(0.5), rwm_kernel(t, q), 1, rng).trace.size() == 1);
  CHECK_THROWS(run_chain(p1(0.5), rwm_kernel(t, q), 0, rng));

  const LogTarget point_mass(1, [](const Point& x) { return x[0] == 0.5 ? 0.0 : kNegInf; });
  const auto stuck = run_chain(p1(0.5), rwm_kernel(point_mass, q), 500, rng);
  CHECK(stuck.acceptance_rate == 0.0);
  CHECK(stuck.skip_fraction == 0.0);
  for (const auto& x : stuck.states()) REQUIRE(x[0] == 0.5);

  RngStream a(14);
  RngStream b(14);
  const auto kernel = skipping_kernel(t, testsupport::two_interval_skipping());
  const auto ca = run_chain(p1(0.5), kernel, 2000, a);
  const auto cb = run_chain(p1(0.5), kernel, 2000, b);
  REQUIRE(ca.trace.size() == cb.trace.size());
  for (std::size_t i = 0; i < ca.trace.size(); ++i) REQUIRE(same_record(ca.trace[i], cb.trace[i]));
  std::size_t acc = 0, skips = 0;
  for (const auto& r : ca.trace) {
    REQUIRE(r.skip_count >= 1);
    acc += r.accepted ? 1 : 0;
    skips += (r.accepted && r.skip_count >= 2) ? 1 : 0;
  }
  CHECK(ca.acceptance_rate == doctest::Approx(static_cast<double>(acc) / 2000.0));
  CHECK(ca.skip_fraction == doctest::Approx(static_cast<double>(skips) / 2000.0));
  CHECK(ca.skip_fraction > 0.0);
}

TEST_CASE("skipping sampler is stationary on the two-interval uniform") {
  const LogTarget t = testsupport::two_intervals();
  RngStream rng(15);
  const auto chain = run_chain(p1(0.5), skipping_kernel(t, testsupport::two_interval_skipping()),
                               200000, rng);
  const auto xs = observe(chain, [](const Point& x) { return x[0]; });
  double upper = 0.0;
  for (double x : xs) upper += x >= 2.0 ? 1.0 : 0.0;
  CHECK(std::abs(upper / static_cast<double>(xs.size()) - 0.5) < 0.03);
  CHECK(std::abs(ergodic_average(xs).mean - 1.5) < 0.05);
}
