#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "skipping/cli/experiments.hpp"
#include "skipping/diagnostics.hpp"
#include "skipping/doubling.hpp"
#include "skipping/optimize.hpp"
#include "skipping/targets.hpp"

namespace py = pybind11;
using namespace skipping;

namespace {

py::dict chain_to_dict(const ChainResult& chain) {
  const auto n = static_cast<Eigen::Index>(chain.trace.size());
  const Eigen::Index d = n > 0 ? chain.trace.front().state.size() : 0;
  Eigen::MatrixXd states(n, d);
  Eigen::VectorXd log_target(n);
  std::vector<bool> accepted(chain.trace.size());
  std::vector<std::uint64_t> skips(chain.trace.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = chain.trace[static_cast<std::size_t>(i)];
    states.row(i) = r.next_state().transpose();
    log_target[i] = r.next_log_target();
    accepted[static_cast<std::size_t>(i)] = r.accepted;
    skips[static_cast<std::size_t>(i)] = r.skip_count;
  }
  py::dict out;
  out["states"] = states;
  out["log_target"] = log_target;
  out["accepted"] = accepted;
  out["skip_count"] = skips;
  out["acceptance_rate"] = chain.acceptance_rate;
  out["skip_fraction"] = chain.skip_fraction;
  return out;
}

py::dict report_to_dict(const OptRunReport& r) {
  py::dict out;
  out["start"] = r.start;
  out["final_point"] = r.final_point;
  out["final_value"] = r.final_value;
  out["distance_to_optimum"] = r.distance_to_optimum;
  out["in_basin"] = r.in_basin;
  out["function_evals"] = r.function_evals;
  out["wall_time_s"] = r.wall_time_s;
  out["accepted_moves"] = r.accepted_moves;
  out["value_history"] = r.value_history;
  return out;
}

std::string dump(const nlohmann::json& j) { return j.dump(); }

}  // namespace

PYBIND11_MODULE(_skipping, m) {
  m.doc() = "Skipping sampler bindings";

  static py::exception<Error> base(m, "SkippingError", PyExc_RuntimeError);
  static py::exception<FiniteSkippingViolation> finite(m, "FiniteSkippingViolation", base.ptr());
  static py::exception<ConvexityViolation> convex(m, "ConvexityViolation", base.ptr());
  static py::exception<cli::ConfigError> config(m, "ConfigError", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const InvalidArgument& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const DimensionMismatch& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const FiniteSkippingViolation& e) {
      PyErr_SetString(finite.ptr(), e.what());
    } catch (const ConvexityViolation& e) {
      PyErr_SetString(convex.ptr(), e.what());
    } catch (const cli::ConfigError& e) {
      PyErr_SetString(config.ptr(), e.what());
    } catch (const Error& e) {
      PyErr_SetString(base.ptr(), e.what());
    }
  });

  // targets
  m.def("eggholder", [](const Point& x) { return eggholder(x); }, py::arg("x"));
  m.attr("EGGHOLDER_OPTIMUM") = Eigen::VectorXd(kEggholderOptimum);
  m.attr("EGGHOLDER_MINIMUM") = kEggholderMinimum;

  py::class_<LogTarget>(m, "LogTarget")
      .def(py::init<Eigen::Index, LogTarget::Fn>(), py::arg("dim"), py::arg("log_density"))
      .def_property_readonly("dim", &LogTarget::dim)
      .def("__call__", &LogTarget::operator(), py::arg("x"))
      .def_property_readonly("evaluations", &LogTarget::evaluations);

  py::class_<GaussianMixture>(m, "GaussianMixture")
      .def(py::init<std::vector<double>, std::vector<Eigen::VectorXd>, std::vector<Eigen::MatrixXd>>(),
           py::arg("weights"), py::arg("means"), py::arg("covariances"))
      .def_property_readonly("dim", &GaussianMixture::dim)
      .def_property_readonly("weights", &GaussianMixture::weights)
      .def_property_readonly("means", &GaussianMixture::means)
      .def_property_readonly("covariances", &GaussianMixture::covariances)
      .def("logpdf", &GaussianMixture::logpdf, py::arg("x"))
      .def("to_json", [](const GaussianMixture& g) {
        nlohmann::json j;
        to_json(j, g);
        return j.dump();
      })
      .def_static("from_json", [](const std::string& s) { return mixture_from_json(nlohmann::json::parse(s)); });

  m.def("make_random_mixture", &make_random_mixture, py::arg("seed"), py::arg("m"), py::arg("dim"),
        py::arg("spread"));
  m.def("level_set_entry_point", &level_set_entry_point, py::arg("mixture"), py::arg("level_log"));
  m.def("level_conditioned_target", &level_conditioned_target, py::arg("mixture"), py::arg("level_log"));
  m.def("interval_union_target", &interval_union_target, py::arg("intervals"));
  m.def(
      "eggholder_boltzmann_target",
      [](double temperature) {
        return boltzmann_target([](const Point& x) { return eggholder(x); }, temperature, eggholder_domain());
      },
      py::arg("temperature") = 1.0);

  // proposals and halting
  py::class_<UnderlyingProposal>(m, "Proposal")
      .def_static("gaussian", &UnderlyingProposal::gaussian, py::arg("covariance"))
      .def_static("isotropic_gaussian", &UnderlyingProposal::isotropic_gaussian, py::arg("dim"),
                  py::arg("scale"))
      .def_static(
          "exponential_radial",
          [](Eigen::Index dim, double rate) { return UnderlyingProposal::radial(dim, ExponentialRadius{rate}); },
          py::arg("dim"), py::arg("rate"))
      .def("with_equal_increments", &UnderlyingProposal::with_equal_increments, py::arg("on"))
      .def_property_readonly("dim", &UnderlyingProposal::dim);

  py::class_<HaltingIndex>(m, "Halting")
      .def_static("deterministic", [](std::uint64_t k) { return HaltingIndex(DeterministicHalting{k}); },
                  py::arg("k"))
      .def_static(
          "geometric", [](double p, std::uint64_t cap) { return HaltingIndex(GeometricHalting{p, cap}); },
          py::arg("p"), py::arg("cap") = 10000)
      .def_static(
          "infinite", [](std::uint64_t cap) { return HaltingIndex(InfiniteHalting{cap}); },
          py::arg("safety_cap") = 1000000);

  py::class_<SkippingConfig>(m, "SkippingConfig")
      .def(py::init([](UnderlyingProposal q, HaltingIndex k) {
             return SkippingConfig{std::move(q), std::move(k), false, {}, std::nullopt};
           }),
           py::arg("proposal"), py::arg("halting"));

  // samplers
  m.def(
      "run_skipping",
      [](const LogTarget& t, const Point& x0, const SkippingConfig& cfg, std::uint64_t steps,
         std::uint64_t seed) {
        RngStream rng(seed);
        return chain_to_dict(run_chain(x0, skipping_kernel(t, cfg), steps, rng));
      },
      py::arg("target"), py::arg("x0"), py::arg("config"), py::arg("steps"), py::arg("seed"));
  m.def(
      "run_rwm",
      [](const LogTarget& t, const Point& x0, const UnderlyingProposal& q, std::uint64_t steps,
         std::uint64_t seed) {
        RngStream rng(seed);
        return chain_to_dict(run_chain(x0, rwm_kernel(t, q), steps, rng));
      },
      py::arg("target"), py::arg("x0"), py::arg("proposal"), py::arg("steps"), py::arg("seed"));
  m.def(
      "run_mss_eggholder",
      [](const Point& x0, const SkippingConfig& cfg, std::uint64_t steps, std::uint64_t seed) {
        RngStream rng(seed);
        const BoxProblem p = eggholder_problem();
        return chain_to_dict(run_chain(x0, mss_kernel(p.f, p.bounds, cfg), steps, rng));
      },
      py::arg("x0"), py::arg("config"), py::arg("steps"), py::arg("seed"));
  m.def(
      "skipping_proposal",
      [](const LogTarget& t, const Point& x, const SkippingConfig& cfg, std::uint64_t seed, std::size_t n) {
        RngStream rng(seed);
        Eigen::MatrixXd zs(static_cast<Eigen::Index>(n), x.size());
        std::vector<std::uint64_t> counts(n);
        for (std::size_t i = 0; i < n; ++i) {
          const auto p = skipping_proposal(x, t, cfg, rng);
          zs.row(static_cast<Eigen::Index>(i)) = p.z.transpose();
          counts[i] = p.skip_count;
        }
        return py::make_tuple(zs, counts);
      },
      py::arg("target"), py::arg("x"), py::arg("config"), py::arg("seed"), py::arg("n") = 1);

  // doubling
  m.def(
      "doubling_find_entry",
      [](const Point& x, const Point& phi, double rate, const LogTarget& t, std::uint64_t seed) {
        RngStream rng(seed);
        const auto r = doubling_find_entry(x, phi, ExponentialIncrements{rate}, t, rng);
        return py::make_tuple(r.t_a, r.z, r.partial_sum_samples);
      },
      py::arg("x"), py::arg("phi"), py::arg("rate"), py::arg("target"), py::arg("seed"));

  // optimisation
  m.def(
      "local_search",
      [](const Point& x0) {
        const auto r = local_search(x0, eggholder_problem());
        py::dict out;
        out["point"] = r.point;
        out["value"] = r.value;
        out["evals"] = r.evals;
        out["iterations"] = r.iterations;
        return out;
      },
      py::arg("x0"));
  m.def(
      "multistart",
      [](const std::string& mode, std::size_t n, std::uint64_t m_steps, std::uint64_t seed) {
        const BoxProblem p = eggholder_problem();
        const auto q = UnderlyingProposal::isotropic_gaussian(2, std::sqrt(2.0));
        MultistartMode mm = VanillaMultistart{};
        if (mode == "rwm")
          mm = RwmAugmented{m_steps, q, 1.0};
        else if (mode == "mss")
          mm = MssAugmented{m_steps, SkippingConfig{q, HaltingIndex(DeterministicHalting{200}), false, {}, {}}};
        else if (mode != "vanilla")
          throw InvalidArgument("mode must be vanilla, rwm or mss");
        py::list out;
        for (const auto& r : multistart(p, n, mm, RngStream(seed))) out.append(report_to_dict(r));
        return out;
      },
      py::arg("mode"), py::arg("n"), py::arg("m") = 100, py::arg("seed") = 1);
  m.def(
      "basin_hopping",
      [](const std::string& mode, std::size_t n, std::uint64_t iters, std::uint64_t seed) {
        const BoxProblem p = eggholder_problem();
        HoppingMode hm = ClassicHopping{};
        if (mode == "monotonic")
          hm = MonotonicHopping{};
        else if (mode == "mss")
          hm = MssHopping{SkippingConfig{UnderlyingProposal::isotropic_gaussian(2, 1.0),
                                         HaltingIndex(DeterministicHalting{200}), false, {}, {}}};
        else if (mode != "classic")
          throw InvalidArgument("mode must be classic, monotonic or mss");
        py::list out;
        for (const auto& r : basin_hopping_restarts(p, n, hm, iters, RngStream(seed))) out.append(report_to_dict(r));
        return out;
      },
      py::arg("mode"), py::arg("n"), py::arg("n_iters") = 100, py::arg("seed") = 1);

  // diagnostics
  m.def("ks_two_sample", [](const std::vector<double>& a, const std::vector<double>& b) {
    return ks_two_sample(a, b);
  });
  m.def("transition_balance_test", [](const std::vector<double>& v, const std::vector<double>& edges) {
    return transition_balance_test(v, edges);
  });
  m.def("lag1_autocovariance", [](const std::vector<double>& v) {
    const auto c = lag1_autocovariance(v);
    return py::make_tuple(c.estimate, c.std_error);
  });
  m.def("ergodic_average", [](const std::vector<double>& v) {
    const auto e = ergodic_average(v);
    return py::make_tuple(e.mean, e.std_error);
  });

  // experiments (JSON strings, decoded on the Python side)
  m.def(
      "_tail_experiment",
      [](Eigen::Index dim, std::uint64_t seed, std::uint64_t steps) {
        cli::TailExperimentOptions o;
        o.dim = dim;
        o.seed = seed;
        o.steps = steps;
        return dump(cli::run_tail_experiment(o).comparison_json());
      },
      py::arg("dim"), py::arg("seed") = 1, py::arg("steps") = 100000);
  m.def(
      "_table",
      [](int which, std::size_t runs, std::uint64_t m_steps, std::uint64_t seed, unsigned threads) {
        cli::TableOptions o;
        o.runs = runs;
        o.m = m_steps;
        o.seed = seed;
        o.threads = threads;
        return dump((which == 1 ? cli::run_table1(o) : cli::run_table2(o)).to_json());
      },
      py::arg("which"), py::arg("runs"), py::arg("m") = 100, py::arg("seed") = 1, py::arg("threads") = 1);
  m.def("_validate_config", [](const std::string& s) {
    cli::parse_config(nlohmann::json::parse(s));
  });
}
