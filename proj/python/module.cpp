#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "kinlna/datasets.hpp"
#include "kinlna/errors.hpp"
#include "kinlna/filter.hpp"
#include "kinlna/lna.hpp"
#include "kinlna/mcmc.hpp"
#include "kinlna/network.hpp"
#include "kinlna/observation.hpp"
#include "kinlna/sim.hpp"

namespace py = pybind11;
using namespace kinlna;

PYBIND11_MODULE(_core, m) {
  m.doc() = "stochastic reaction networks: simulation, LNA likelihoods, MCMC";

  py::register_exception<Error>(m, "KineticError");

  py::class_<ReactionNetwork>(m, "ReactionNetwork")
      .def_property_readonly("species", &ReactionNetwork::species)
      .def_property_readonly("params", &ReactionNetwork::params)
      .def_property_readonly("num_species", &ReactionNetwork::num_species)
      .def_property_readonly("num_reactions", &ReactionNetwork::num_reactions)
      .def_property_readonly("net_effect_matrix",
                             [](const ReactionNetwork& n) {
                               return Matrix(n.net_effect_matrix().cast<double>());
                             })
      .def("propensities", &ReactionNetwork::propensities)
      .def("drift", &ReactionNetwork::drift)
      .def("diffusion_matrix", &ReactionNetwork::diffusion_matrix)
      .def("drift_jacobian", &ReactionNetwork::drift_jacobian)
      .def("__repr__", [](const ReactionNetwork& n) {
        return "<ReactionNetwork " + std::to_string(n.num_species()) +
               " species, " + std::to_string(n.num_reactions()) + " reactions>";
      });

  m.def("parse_network", &parse_network);
  m.def("serialize_network", &serialize_network);

  py::class_<BuiltinModel>(m, "BuiltinModel")
      .def_readonly("network", &BuiltinModel::network)
      .def_readonly("theta", &BuiltinModel::theta)
      .def_readonly("x0", &BuiltinModel::x0);
  m.def("builtin", &builtin, py::arg("name"), py::arg("scale") = 1.0);

  py::class_<Trajectory>(m, "Trajectory")
      .def_readonly("times", &Trajectory::times)
      .def_readonly("states", &Trajectory::states);
  m.def("ssa_trajectory", &ssa_trajectory);
  m.def("em_trajectory", &em_trajectory);
  m.def("sample_at_times", &sample_at_times);

  py::class_<EmpiricalTransition>(m, "EmpiricalTransition")
      .def_readonly("samples", &EmpiricalTransition::samples)
      .def_readonly("mean", &EmpiricalTransition::mean)
      .def_readonly("cov", &EmpiricalTransition::cov);
  m.def(
      "empirical_transition",
      [](const ReactionNetwork& net, const Vector& theta, const Vector& x0,
         double t, int reps, const std::string& method, uint64_t seed, double dt) {
        return empirical_transition(
            net, theta, x0, t, reps,
            method == "exact" ? SimMethod::Exact : SimMethod::EulerMaruyama,
            seed, dt);
      },
      py::arg("net"), py::arg("theta"), py::arg("x0"), py::arg("t"),
      py::arg("reps"), py::arg("method") = "exact", py::arg("seed") = 1,
      py::arg("dt") = 1e-3);

  py::class_<GaussianDist>(m, "GaussianDist")
      .def_readonly("mean", &GaussianDist::mean)
      .def_readonly("cov", &GaussianDist::cov);
  m.def(
      "lna_transition_density",
      [](const ReactionNetwork& net, const Vector& theta, const Vector& x_prev,
         double dt, double rtol, double atol) {
        IntegratorConfig cfg{rtol, atol};
        return lna_transition_density(net, theta, x_prev, dt, cfg);
      },
      py::arg("net"), py::arg("theta"), py::arg("x_prev"), py::arg("delta_t"),
      py::arg("rtol") = 1e-6, py::arg("atol") = 1e-8);

  py::class_<ObservationModel>(m, "ObservationModel")
      .def(py::init([](Matrix P, Matrix V, Vector mu0, Matrix sigma0) {
             ObservationModel obs{std::move(P), std::move(V), std::move(mu0),
                                  std::move(sigma0)};
             obs.validate();
             return obs;
           }),
           py::arg("P"), py::arg("V"), py::arg("mu0"), py::arg("sigma0"))
      .def_readonly("P", &ObservationModel::P)
      .def_readonly("V", &ObservationModel::V)
      .def_readonly("mu0", &ObservationModel::mu0)
      .def_readonly("sigma0", &ObservationModel::sigma0);

  py::class_<ObservationSeries>(m, "ObservationSeries")
      .def(py::init([](std::vector<double> times, std::vector<Vector> obs) {
             ObservationSeries s{std::move(times), std::move(obs)};
             if (!s.observations.empty())
               s.validate(static_cast<int>(s.observations[0].size()));
             return s;
           }),
           py::arg("times"), py::arg("observations"))
      .def_readonly("times", &ObservationSeries::times)
      .def_readonly("observations", &ObservationSeries::observations);

  py::class_<FilterResult>(m, "FilterResult")
      .def_readonly("loglik", &FilterResult::loglik)
      .def_readonly("filtered", &FilterResult::filtered)
      .def_readonly("predictive", &FilterResult::predictive)
      .def_readonly("dropped_y0_term", &FilterResult::dropped_y0_term)
      .def_readonly("degenerate", &FilterResult::degenerate);

  m.def("loglik_fully_observed",
        [](const ReactionNetwork& net, const Vector& theta,
           const ObservationSeries& series) {
          return loglik_fully_observed(net, theta, series);
        });
  m.def("loglik_lna_filter",
        [](const ReactionNetwork& net, const Vector& theta,
           const ObservationModel& obs, const ObservationSeries& series) {
          return loglik_lna_filter(net, theta, obs, series);
        });
  m.def("loglik_lna_global",
        [](const ReactionNetwork& net, const Vector& theta, const Vector& x0,
           const ObservationModel& obs, const ObservationSeries& series) {
          return loglik_lna_global(net, theta, x0, obs, series);
        });
  m.def("loglik_ode_gauss",
        [](const ReactionNetwork& net, const Vector& theta, const Vector& x0,
           double sigma2, const ObservationModel& obs,
           const ObservationSeries& series) {
          return loglik_ode_gauss(net, theta, x0, sigma2, obs, series);
        });

  py::class_<PriorSpec>(m, "PriorSpec")
      .def(py::init([](const std::vector<std::pair<std::string, std::vector<double>>>& entries) {
        PriorSpec spec;
        for (const auto& [family, args] : entries) {
          if (family == "gamma" && args.size() == 2)
            spec.entries.push_back(PriorSpec::gamma(args[0], args[1]));
          else if (family == "halfcauchy" && args.size() == 1)
            spec.entries.push_back(PriorSpec::halfcauchy(args[0]));
          else
            throw Error(ErrorKind::UsageError, "bad prior entry '" + family + "'");
        }
        return spec;
      }));
  m.def("log_prior", &log_prior, py::arg("prior"), py::arg("u_log10"),
        py::arg("include_jacobian") = true);

  py::class_<SampleChain>(m, "SampleChain")
      .def_readonly("draws", &SampleChain::draws)
      .def_readonly("logposts", &SampleChain::logposts)
      .def_readonly("accept_count", &SampleChain::accept_count)
      .def_property_readonly("acceptance_rate", &SampleChain::acceptance_rate);
  m.def("rwm_chain", &rwm_chain, py::arg("logpost"), py::arg("theta0_log"),
        py::arg("proposal_cov"), py::arg("iters"), py::arg("seed"));
  m.def("tune_proposal",
        [](const LogPost& lp, const Vector& u0, uint64_t seed) {
          TuneResult t = tune_proposal(lp, u0, seed);
          return py::make_tuple(t.proposal_cov, t.acceptance, t.converged);
        });
  m.def("ess", [](const std::vector<double>& s) {
    EssResult r = ess(s);
    return py::make_tuple(r.ess, r.degenerate);
  });
  m.def("summarize",
        [](const SampleChain& chain, const std::vector<std::string>& names,
           int burnin) {
          ChainSummary s = summarize(chain, names, burnin);
          py::list out;
          for (const auto& p : s.params)
            out.append(py::dict(py::arg("name") = p.name,
                                py::arg("median") = p.median,
                                py::arg("q025") = p.q025, py::arg("q975") = p.q975,
                                py::arg("ess") = p.ess));
          return py::make_tuple(out, s.acceptance_rate);
        });

  m.def("smallpox_series", [](int tail_days) {
    return smallpox_series(tail_days);
  }, py::arg("tail_days") = 10);
}
