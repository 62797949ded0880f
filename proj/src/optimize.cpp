#include "skipping/optimize.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "skipping/parallel.hpp"
#include "skipping/targets.hpp"

namespace skipping {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double checked(double v) {
  if (std::isnan(v)) throw InvalidArgument("objective returned NaN");
  return v;
}

// Objective wrapper that counts its calls. Not shared across threads.
struct CountedObjective {
  const Objective* f;
  std::uint64_t* count;
  double operator()(const Point& x) const {
    ++*count;
    return checked((*f)(x));
  }
};

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void score(OptRunReport& rep, const BoxProblem& prob) {
  rep.final_value = checked(prob.f(rep.final_point));
  if (prob.known_optimum) {
    rep.distance_to_optimum = (rep.final_point - prob.known_optimum->point).norm();
    rep.in_basin = in_basin_of(rep.final_point, prob);
  }
}

}  // namespace

BoxProblem eggholder_problem() {
  return BoxProblem{
      [](const Point& x) { return eggholder(x); },
      eggholder_domain(),
      KnownOptimum{Point(kEggholderOptimum), kEggholderMinimum},
  };
}

LocalSearchResult local_search(const Point& x0, const BoxProblem& prob,
                               const NelderMeadOptions& opts) {
  const Eigen::Index d = prob.bounds.dim();
  check_dim(d, x0);
  if (!x0.allFinite()) throw InvalidArgument("local search start must be finite");

  LocalSearchResult res;
  auto g = [&](const Point& x) {
    ++res.evals;
    return checked(prob.f(prob.bounds.clamp(x)));
  };

  const Point start = prob.bounds.clamp(x0);
  std::vector<Point> simplex;
  std::vector<double> values;
  simplex.reserve(static_cast<std::size_t>(d + 1));
  simplex.push_back(start);
  values.push_back(g(start));
  const Eigen::VectorXd width = prob.bounds.width();
  for (Eigen::Index i = 0; i < d; ++i) {
    Point v = start;
    const double h = opts.edge_fraction * width[i];
    v[i] = (v[i] + h <= prob.bounds.upper[i]) ? v[i] + h : v[i] - h;
    values.push_back(g(v));
    simplex.push_back(std::move(v));
  }

  if (std::all_of(values.begin(), values.end(), [](double v) { return v == kPosInf; })) {
    res.point = start;
    res.value = values.front();
    res.infeasible = true;
    return res;
  }

  const auto n = static_cast<std::size_t>(d + 1);
  std::vector<std::size_t> order(n);
  for (res.iterations = 0; res.iterations < opts.max_iterations; ++res.iterations) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[n - 2];
    if (values[worst] - values[best] < opts.f_tolerance) break;

    Point centroid = Point::Zero(d);
    for (std::size_t i = 0; i + 1 < n; ++i) centroid += simplex[order[i]];
    centroid /= static_cast<double>(d);

    const Point reflected = centroid + (centroid - simplex[worst]);
    const double f_r = g(reflected);
    if (f_r < values[best]) {
      const Point expanded = centroid + 2.0 * (centroid - simplex[worst]);
      const double f_e = g(expanded);
      if (f_e < f_r) {
        simplex[worst] = expanded;
        values[worst] = f_e;
      } else {
        simplex[worst] = reflected;
        values[worst] = f_r;
      }
      continue;
    }
    if (f_r < values[second]) {
      simplex[worst] = reflected;
      values[worst] = f_r;
      continue;
    }
    // Contraction, outside or inside.
    const bool outside = f_r < values[worst];
    const Point contracted = outside ? Point(centroid + 0.5 * (reflected - centroid))
                                     : Point(centroid + 0.5 * (simplex[worst] - centroid));
    const double f_c = g(contracted);
    if (f_c < (outside ? f_r : values[worst])) {
      simplex[worst] = contracted;
      values[worst] = f_c;
      continue;
    }
    // Shrink towards the best vertex.
    for (std::size_t i = 0; i < n; ++i) {
      if (i == best) continue;
      simplex[i] = simplex[best] + 0.5 * (simplex[i] - simplex[best]);
      values[i] = g(simplex[i]);
    }
  }

  const auto best_it = std::min_element(values.begin(), values.end());
  const auto best = static_cast<std::size_t>(best_it - values.begin());
  res.point = prob.bounds.clamp(simplex[best]);
  res.value = values[best];
  return res;
}

bool in_basin_of(const Point& x, const BoxProblem& prob, double tol) {
  if (!prob.known_optimum) throw InvalidArgument("basin test needs a known optimum");
  const auto r = local_search(x, prob);
  return (r.point - prob.known_optimum->point).norm() <= tol;
}

std::vector<OptRunReport> multistart(const BoxProblem& prob, std::size_t n,
                                     const MultistartMode& mode, const RngStream& rng,
                                     unsigned threads) {
  if (n < 1) throw InvalidArgument("multistart needs n >= 1");
  std::vector<OptRunReport> reports(n);
  parallel_for(n, threads, [&](std::size_t i) {
    RngStream stream = rng.split(i);
    Stopwatch clock;
    OptRunReport rep;
    rep.start = prob.bounds.sample_uniform(stream);
    std::uint64_t evals = 0;
    const CountedObjective f{&prob.f, &evals};

    std::visit(overloaded{
                   [&](const VanillaMultistart&) { rep.final_point = rep.start; },
                   [&](const RwmAugmented& m) {
                     const LogTarget target = boltzmann_target(f, m.temperature, prob.bounds);
                     Point x = rep.start;
                     double lx = target(x);
                     for (std::uint64_t s = 0; s < m.m; ++s) {
                       const StepRecord r = rwm_step(x, lx, target, m.proposal, stream);
                       if (r.accepted) {
                         ++rep.accepted_moves;
                         x = r.proposal;
                         lx = r.log_target_at_proposal;
                       }
                       rep.value_history.push_back(-lx * m.temperature);
                     }
                     rep.final_point = x;
                   },
                   [&](const MssAugmented& m) {
                     Point x = rep.start;
                     double fx = prob.bounds.contains(x) ? f(x) : kPosInf;
                     for (std::uint64_t s = 0; s < m.m; ++s) {
                       const StepRecord r = mss_step(x, fx, f, prob.bounds, m.cfg, stream);
                       if (r.accepted) {
                         ++rep.accepted_moves;
                         x = r.proposal;
                         fx = -r.log_target_at_proposal;
                       }
                       rep.value_history.push_back(fx);
                     }
                     rep.final_point = x;
                   },
               },
               mode);

    rep.function_evals = evals;
    rep.wall_time_s = clock.seconds();
    score(rep, prob);
    reports[i] = std::move(rep);
  });
  return reports;
}

OptRunReport basin_hopping(const BoxProblem& prob, const Point& x0, const HoppingMode& mode,
                           std::uint64_t n_iters, RngStream& rng) {
  if (n_iters < 1) throw InvalidArgument("basin hopping needs n_iters >= 1");
  check_dim(prob.bounds.dim(), x0);
  Stopwatch clock;
  OptRunReport rep;
  rep.start = x0;
  std::uint64_t evals = 0;
  const CountedObjective f{&prob.f, &evals};
  const BoxProblem counted{f, prob.bounds, prob.known_optimum};

  auto perturb_and_descend = [&](const LocalSearchResult& current, double half_width) {
    Point trial = current.point;
    for (Eigen::Index j = 0; j < trial.size(); ++j) trial[j] += rng.uniform(-half_width, half_width);
    return local_search(prob.bounds.clamp(trial), counted);
  };

  std::visit(
      overloaded{
          [&](const ClassicHopping& m) {
            LocalSearchResult y = local_search(x0, counted);
            for (std::uint64_t it = 0; it < n_iters; ++it) {
              LocalSearchResult cand = perturb_and_descend(y, m.half_width);
              const double log_alpha =
                  (y.value == kPosInf) ? 0.0
                  : (cand.value == kPosInf)
                      ? kNegInf
                      : std::min(0.0, -(cand.value - y.value) / m.temperature);
              if (metropolis_accept(log_alpha, rng)) {
                y = std::move(cand);
                ++rep.accepted_moves;
              }
              rep.value_history.push_back(y.value);
            }
            rep.final_point = y.point;
          },
          [&](const MonotonicHopping& m) {
            LocalSearchResult y = local_search(x0, counted);
            for (std::uint64_t it = 0; it < n_iters; ++it) {
              LocalSearchResult cand = perturb_and_descend(y, m.half_width);
              if (cand.value < y.value) {
                y = std::move(cand);
                ++rep.accepted_moves;
              }
              rep.value_history.push_back(y.value);
            }
            rep.final_point = y.point;
          },
          [&](const MssHopping& m) {
            Point x = x0;
            for (std::uint64_t it = 0; it < n_iters; ++it) {
              const LocalSearchResult y = local_search(x, counted);
              const StepRecord r = mss_step(y.point, y.value, f, prob.bounds, m.cfg, rng);
              if (r.accepted) {
                ++rep.accepted_moves;
                x = r.proposal;
                rep.value_history.push_back(-r.log_target_at_proposal);
              } else {
                x = y.point;
                rep.value_history.push_back(y.value);
              }
            }
            rep.final_point = x;
          },
      },
      mode);

  rep.function_evals = evals;
  rep.wall_time_s = clock.seconds();
  score(rep, prob);
  return rep;
}

std::vector<OptRunReport> basin_hopping_restarts(const BoxProblem& prob, std::size_t n,
                                                 const HoppingMode& mode, std::uint64_t n_iters,
                                                 const RngStream& rng, unsigned threads) {
  if (n < 1) throw InvalidArgument("basin hopping restarts need n >= 1");
  std::vector<OptRunReport> reports(n);
  parallel_for(n, threads, [&](std::size_t i) {
    RngStream stream = rng.split(i);
    const Point x0 = prob.bounds.sample_uniform(stream);
    reports[i] = basin_hopping(prob, x0, mode, n_iters, stream);
  });
  return reports;
}

}  // namespace skipping
