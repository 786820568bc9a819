// kinetic-lna: simulation and inference for stochastic reaction networks.
//
// Exit codes: 0 ok, 1 usage error, 2 parse/data error, 3 numerical failure.

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <thread>

#include "kinlna/datasets.hpp"
#include "kinlna/errors.hpp"
#include "kinlna/filter.hpp"
#include "kinlna/lna.hpp"
#include "kinlna/mcmc.hpp"
#include "kinlna/network.hpp"
#include "kinlna/observation.hpp"
#include "kinlna/sim.hpp"

namespace {

using namespace kinlna;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitParse = 2;
constexpr int kExitNumerical = 3;

struct UsageFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorKind::UsageError, "cannot open file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out)
    throw Error(ErrorKind::UsageError, "cannot write file '" + path + "'");
  out << content;
}

// --network accepts a DSL file path or "builtin:name[:scale]".
BuiltinModel load_network(const std::string& spec) {
  if (spec.rfind("builtin:", 0) == 0) {
    std::string rest = spec.substr(8);
    double scale = 1.0;
    auto colon = rest.find(':');
    if (colon != std::string::npos) {
      scale = std::stod(rest.substr(colon + 1));
      rest = rest.substr(0, colon);
    }
    return builtin(rest, scale);
  }
  BuiltinModel m{parse_network(read_file(spec)), Vector(), Vector()};
  return m;
}

// Comma list of reals; a token `a..b` or `a..b..step` expands to a grid.
std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    auto dots = tok.find("..");
    if (dots != std::string::npos) {
      double a = std::stod(tok.substr(0, dots));
      std::string rest = tok.substr(dots + 2);
      double step = 1.0;
      auto dots2 = rest.find("..");
      double b;
      if (dots2 != std::string::npos) {
        b = std::stod(rest.substr(0, dots2));
        step = std::stod(rest.substr(dots2 + 2));
      } else {
        b = std::stod(rest);
      }
      if (!(step > 0)) throw UsageFailure("range step must be positive");
      for (double v = a; v <= b + 1e-12 * std::max(1.0, std::abs(b)); v += step)
        out.push_back(v);
    } else if (!tok.empty()) {
      out.push_back(std::stod(tok));
    }
  }
  return out;
}

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Vector resolve_theta(const BuiltinModel& model, const std::string& theta_csv) {
  if (!theta_csv.empty()) {
    Vector theta = to_vector(parse_real_list(theta_csv));
    if (theta.size() != model.network.num_params())
      throw UsageFailure("--theta needs " +
                         std::to_string(model.network.num_params()) + " values");
    return theta;
  }
  if (model.theta.size() == 0)
    throw UsageFailure("--theta is required for file-based networks");
  return model.theta;
}

Vector resolve_x0(const BuiltinModel& model, const std::string& x0_csv) {
  if (!x0_csv.empty()) {
    Vector x0 = to_vector(parse_real_list(x0_csv));
    if (x0.size() != model.network.num_species())
      throw UsageFailure("--x0 needs " +
                         std::to_string(model.network.num_species()) + " values");
    return x0;
  }
  if (model.x0.size() == 0)
    throw UsageFailure("--x0 is required for file-based networks");
  return model.x0;
}

IntegratorConfig integrator_config(double rtol, double atol, bool rtol_set) {
  IntegratorConfig cfg;
  // Flag wins over the environment override.
  if (rtol_set) {
    cfg.rtol = rtol;
  } else if (const char* env = std::getenv("KINETIC_LNA_RTOL")) {
    cfg.rtol = std::stod(env);
  }
  cfg.atol = atol;
  return cfg;
}

std::string trajectory_csv(const Trajectory& traj,
                           const std::vector<std::string>& species) {
  std::ostringstream out;
  out << "time";
  for (const auto& s : species) out << ',' << s;
  out << '\n';
  for (size_t i = 0; i < traj.times.size(); ++i) {
    out << format_double(traj.times[i]);
    for (int j = 0; j < traj.states[i].size(); ++j)
      out << ',' << format_double(traj.states[i][j]);
    out << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------

int cmd_simulate(const std::string& network_spec, const std::string& theta_csv,
                 const std::string& x0_csv, double t_end,
                 const std::string& method, double dt,
                 const std::string& obs_times_csv, uint64_t seed,
                 const std::string& out_path) {
  if (!(t_end > 0)) throw UsageFailure("--t-end must be positive");
  if (method != "ssa" && method != "em")
    throw UsageFailure("--method must be ssa or em");
  if (method == "em" && !(dt > 0)) throw UsageFailure("--dt must be positive for em");

  BuiltinModel model = load_network(network_spec);
  Vector theta = resolve_theta(model, theta_csv);
  Vector x0 = resolve_x0(model, x0_csv);
  std::vector<double> obs_times;
  if (!obs_times_csv.empty()) obs_times = parse_real_list(obs_times_csv);

  Trajectory traj;
  if (method == "ssa") {
    traj = ssa_trajectory(model.network, theta, x0, t_end, seed);
  } else {
    std::vector<double> grid = obs_times;
    if (grid.empty()) {
      for (double t = 0.0; t < t_end + dt / 2; t += dt) grid.push_back(std::min(t, t_end));
      if (grid.back() < t_end) grid.push_back(t_end);
    }
    traj = em_trajectory(model.network, theta, x0, grid, dt, seed);
  }

  if (!obs_times.empty()) {
    auto states = sample_at_times(traj, obs_times);
    Trajectory sampled;
    sampled.times = obs_times;
    sampled.states = states;
    sampled.kind = traj.kind;
    write_file(out_path, trajectory_csv(sampled, model.network.species()));
  } else {
    write_file(out_path, trajectory_csv(traj, model.network.species()));
  }
  return kExitOk;
}

int cmd_transdens(const std::string& network_spec, const std::string& theta_csv,
                  const std::string& x0_csv, const std::string& times_csv,
                  int reps, const std::string& methods_csv, double dt,
                  uint64_t seed, const std::string& out_prefix,
                  const IntegratorConfig& cfg) {
  if (reps < 2) throw UsageFailure("--reps must be at least 2");
  std::vector<double> times = parse_real_list(times_csv);
  if (times.empty()) throw UsageFailure("--times must be nonempty");

  std::vector<std::string> methods;
  {
    std::istringstream in(methods_csv);
    std::string tok;
    while (std::getline(in, tok, ',')) {
      if (tok != "ssa" && tok != "em" && tok != "lna")
        throw UsageFailure("--methods entries must be ssa, em or lna");
      methods.push_back(tok);
    }
  }
  if (methods.empty()) throw UsageFailure("--methods must be nonempty");

  BuiltinModel model = load_network(network_spec);
  Vector theta = resolve_theta(model, theta_csv);
  Vector x0 = resolve_x0(model, x0_csv);
  const auto& species = model.network.species();
  const int n = model.network.num_species();

  std::ostringstream moments;
  moments << "method,time,species,mean,sd\n";

  for (double t : times) {
    std::ostringstream tag;
    tag << "_t" << t;
    for (const auto& method : methods) {
      Vector mean(n);
      Vector sd(n);
      if (method == "lna") {
        GaussianDist g = lna_transition_density(model.network, theta, x0, t, cfg);
        mean = g.mean;
        sd = g.cov.diagonal().cwiseMax(0.0).cwiseSqrt();
        std::ostringstream out;
        out << "row";
        for (const auto& s : species) out << ',' << s;
        out << "\nmean";
        for (int j = 0; j < n; ++j) out << ',' << format_double(g.mean[j]);
        out << '\n';
        for (int i = 0; i < n; ++i) {
          out << "cov_" << species[static_cast<size_t>(i)];
          for (int j = 0; j < n; ++j) out << ',' << format_double(g.cov(i, j));
          out << '\n';
        }
        write_file(out_prefix + "_lna" + tag.str() + ".csv", out.str());
      } else {
        SimMethod sm = method == "ssa" ? SimMethod::Exact : SimMethod::EulerMaruyama;
        EmpiricalTransition emp = empirical_transition(model.network, theta, x0,
                                                       t, reps, sm, seed, dt);
        mean = emp.mean;
        sd = emp.cov.diagonal().cwiseMax(0.0).cwiseSqrt();
        std::ostringstream out;
        for (size_t j = 0; j < species.size(); ++j)
          out << (j ? "," : "") << species[j];
        out << '\n';
        for (const auto& s : emp.samples) {
          for (int j = 0; j < n; ++j) out << (j ? "," : "") << format_double(s[j]);
          out << '\n';
        }
        write_file(out_prefix + "_" + method + tag.str() + ".csv", out.str());
      }
      for (int j = 0; j < n; ++j)
        moments << method << ',' << format_double(t) << ','
                << species[static_cast<size_t>(j)] << ',' << format_double(mean[j])
                << ',' << format_double(sd[j]) << '\n';
    }
  }
  write_file(out_prefix + "_moments.csv", moments.str());
  return kExitOk;
}

std::string filtered_means_csv(const FilterResult& result,
                               const ObservationSeries& series,
                               const std::vector<std::string>& species) {
  std::ostringstream out;
  out << "time";
  for (const auto& s : species) out << ',' << s;
  out << '\n';
  for (size_t i = 0; i < result.filtered.size(); ++i) {
    out << format_double(series.times[i]);
    const Vector& m = result.filtered[i].mean;
    for (int j = 0; j < m.size(); ++j) out << ',' << format_double(m[j]);
    out << '\n';
  }
  return out.str();
}

int cmd_loglik(const std::string& network_spec, const std::string& theta_csv,
               const std::string& data_path, const std::string& obs_model_path,
               const std::string& engine, const std::string& x0_csv,
               double sigma2, bool sigma2_set, const IntegratorConfig& cfg,
               const std::string& filtered_out) {
  if (engine != "lna" && engine != "lna-global" && engine != "ode")
    throw UsageFailure("--engine must be lna, lna-global or ode");
  if (sigma2_set && engine != "ode")
    throw UsageFailure("--sigma2 only applies to the ode engine");
  if (engine == "ode" && !sigma2_set)
    throw UsageFailure("the ode engine requires --sigma2");

  BuiltinModel model = load_network(network_spec);
  Vector theta = resolve_theta(model, theta_csv);
  ObservationSeries series = read_observation_csv(read_file(data_path));
  ObservationModel obs = parse_observation_model(read_file(obs_model_path),
                                                 model.network.num_species());

  double loglik;
  FilterResult result;
  if (engine == "lna") {
    result = loglik_lna_filter(model.network, theta, obs, series, cfg);
    loglik = result.loglik;
  } else if (engine == "lna-global") {
    Vector x0 = resolve_x0(model, x0_csv);
    result = loglik_lna_global(model.network, theta, x0, obs, series, cfg);
    loglik = result.loglik;
  } else {
    Vector x0 = resolve_x0(model, x0_csv);
    loglik = loglik_ode_gauss(model.network, theta, x0, sigma2, obs, series, cfg);
  }

  std::cout.precision(17);
  std::cout << loglik << '\n';
  if (!filtered_out.empty()) {
    if (engine == "ode")
      throw UsageFailure("--filtered-out only applies to filter engines");
    write_file(filtered_out,
               filtered_means_csv(result, series, model.network.species()));
  }
  return kExitOk;
}

PriorSpec read_prior_spec(const std::string& path,
                          const std::vector<std::string>& params) {
  std::string text = read_file(path);
  std::vector<PriorEntry> entries(params.size(),
                                  PriorEntry{PriorEntry::Family::Gamma, 0, 0});
  std::vector<bool> seen(params.size(), false);
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    std::string name, family;
    if (!(ls >> name)) continue;
    if (!(ls >> family))
      throw Error(ErrorKind::SyntaxError, "prior line needs a family");
    auto it = std::find(params.begin(), params.end(), name);
    if (it == params.end())
      throw Error(ErrorKind::UnknownIdentifier,
                  "prior for unknown parameter '" + name + "'");
    size_t idx = static_cast<size_t>(it - params.begin());
    if (seen[idx])
      throw Error(ErrorKind::DuplicateName, "duplicate prior for '" + name + "'");
    seen[idx] = true;
    if (family == "gamma") {
      double shape, rate;
      if (!(ls >> shape >> rate))
        throw Error(ErrorKind::SyntaxError, "gamma prior needs shape and rate");
      entries[idx] = PriorSpec::gamma(shape, rate);
    } else if (family == "halfcauchy") {
      double c;
      if (!(ls >> c))
        throw Error(ErrorKind::SyntaxError, "halfcauchy prior needs a scale");
      entries[idx] = PriorSpec::halfcauchy(c);
    } else {
      throw Error(ErrorKind::SyntaxError, "unknown prior family '" + family + "'");
    }
  }
  for (size_t j = 0; j < params.size(); ++j)
    if (!seen[j])
      throw Error(ErrorKind::SyntaxError,
                  "missing prior for parameter '" + params[j] + "'");
  return PriorSpec{entries};
}

int cmd_infer(const std::string& network_spec, const std::string& data_path,
              const std::string& obs_model_path, const std::string& prior_path,
              const std::string& engine, const std::string& theta0_csv,
              const std::string& x0_csv, double sigma2, bool sigma2_set,
              int iters, int burnin, int chains, uint64_t seed,
              const std::string& out_path, bool no_jacobian,
              const IntegratorConfig& cfg) {
  if (engine != "lna" && engine != "lna-global" && engine != "ode")
    throw UsageFailure("--engine must be lna, lna-global or ode");
  if (iters < 1) throw UsageFailure("--iters must be >= 1");
  if (burnin < 0 || burnin >= iters)
    throw UsageFailure("--burnin must be in [0, iters)");
  if (chains < 1) throw UsageFailure("--chains must be >= 1");
  if (engine == "ode" && !sigma2_set)
    throw UsageFailure("the ode engine requires --sigma2");

  BuiltinModel model = load_network(network_spec);
  const auto& params = model.network.params();
  ObservationSeries series = read_observation_csv(read_file(data_path));
  ObservationModel obs = parse_observation_model(read_file(obs_model_path),
                                                 model.network.num_species());
  PriorSpec prior = read_prior_spec(prior_path, params);

  Vector x0;
  if (engine != "lna") x0 = resolve_x0(model, x0_csv);

  std::atomic<long> eval_count{0}, fail_count{0};
  auto logpost = [&](const Vector& u) -> double {
    double lp = log_prior(prior, u, !no_jacobian);
    if (!std::isfinite(lp)) return lp;
    Vector theta(u.size());
    for (int j = 0; j < u.size(); ++j) theta[j] = std::pow(10.0, u[j]);
    ++eval_count;
    try {
      if (engine == "lna")
        return lp + loglik_lna_filter(model.network, theta, obs, series, cfg).loglik;
      if (engine == "lna-global")
        return lp + loglik_lna_global(model.network, theta, x0, obs, series, cfg).loglik;
      return lp + loglik_ode_gauss(model.network, theta, x0, sigma2, obs, series, cfg);
    } catch (const Error&) {
      ++fail_count;
      return -std::numeric_limits<double>::infinity();
    }
  };

  // Starting point: --theta0 or prior central values.
  Vector u0(static_cast<Eigen::Index>(params.size()));
  if (!theta0_csv.empty()) {
    Vector theta0 = to_vector(parse_real_list(theta0_csv));
    if (theta0.size() != u0.size())
      throw UsageFailure("--theta0 needs one value per parameter");
    for (int j = 0; j < u0.size(); ++j) u0[j] = std::log10(theta0[j]);
  } else {
    for (size_t j = 0; j < params.size(); ++j) {
      const PriorEntry& e = prior.entries[j];
      double central = e.family == PriorEntry::Family::Gamma ? e.a / e.b : 1.0 / e.a;
      u0[static_cast<Eigen::Index>(j)] = std::log10(central);
    }
  }
  if (!std::isfinite(logpost(u0)))
    throw Error(ErrorKind::NumericalFailure,
                "log posterior not finite at the starting point; supply --theta0");

  auto t_start = std::chrono::steady_clock::now();
  TuneResult tuned = tune_proposal(logpost, u0, seed);
  if (!tuned.converged)
    std::cerr << "warning: proposal tuning did not reach the 0.25-0.30 "
                 "acceptance band (best probe acceptance "
              << tuned.acceptance << ")\n";

  std::vector<SampleChain> results(static_cast<size_t>(chains));
  {
    std::vector<std::thread> workers;
    for (int c = 0; c < chains; ++c)
      workers.emplace_back([&, c] {
        results[static_cast<size_t>(c)] =
            rwm_chain(logpost, u0, tuned.proposal_cov, iters,
                      seed + 1 + static_cast<uint64_t>(c));
      });
    for (auto& w : workers) w.join();
  }
  double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();

  if (fail_count.load() * 100 > eval_count.load())
    throw Error(ErrorKind::NumericalFailure,
                "more than 1% of likelihood evaluations failed (" +
                    std::to_string(fail_count.load()) + "/" +
                    std::to_string(eval_count.load()) + ")");

  // Chain CSV(s): header iter,logpost,<log10_param...>
  auto chain_csv = [&](const SampleChain& chain) {
    std::ostringstream out;
    out << "iter,logpost";
    for (const auto& p : params) out << ",log10_" << p;
    out << '\n';
    for (int i = 0; i < chain.iters(); ++i) {
      out << i << ',' << format_double(chain.logposts[i]);
      for (int j = 0; j < chain.draws.cols(); ++j)
        out << ',' << format_double(chain.draws(i, j));
      out << '\n';
    }
    return out.str();
  };
  write_file(out_path, chain_csv(results[0]));
  for (int c = 1; c < chains; ++c)
    write_file(out_path + ".chain" + std::to_string(c), chain_csv(results[static_cast<size_t>(c)]));

  // Summary over pooled post-burnin draws (per-chain ESS summed).
  std::vector<std::string> log_names;
  for (const auto& p : params) log_names.push_back("log10_" + p);

  SampleChain pooled;
  int kept = iters - burnin;
  pooled.draws.resize(static_cast<Eigen::Index>(kept) * chains, u0.size());
  pooled.logposts.resize(static_cast<Eigen::Index>(kept) * chains);
  double pooled_ess_scale = 0.0;
  long accept = 0;
  for (int c = 0; c < chains; ++c) {
    pooled.draws.middleRows(static_cast<Eigen::Index>(c) * kept, kept) =
        results[static_cast<size_t>(c)].draws.bottomRows(kept);
    accept += results[static_cast<size_t>(c)].accept_count;
  }
  (void)pooled_ess_scale;
  pooled.accept_count = accept;

  ChainSummary summary = summarize(pooled, log_names, 0);

  std::ostringstream sum_csv, sum_txt;
  sum_csv << "param,median,q025,q975,ess,acceptance,seconds\n";
  sum_txt.setf(std::ios::fixed);
  sum_txt.precision(4);
  sum_txt << "param            median      2.5%     97.5%       ESS\n";
  for (const auto& p : summary.params) {
    sum_csv << p.name << ',' << format_double(p.median) << ','
            << format_double(p.q025) << ',' << format_double(p.q975) << ','
            << format_double(p.ess) << ',' << format_double(summary.acceptance_rate)
            << ',' << format_double(seconds) << '\n';
    sum_txt << p.name;
    for (size_t k = p.name.size(); k < 14; ++k) sum_txt << ' ';
    sum_txt << ' ' << p.median << ' ' << p.q025 << ' ' << p.q975 << ' ' << p.ess
            << '\n';
  }
  sum_txt << "acceptance rate " << summary.acceptance_rate << ", wall clock "
          << seconds << " s\n";
  write_file(out_path + ".summary.csv", sum_csv.str());
  std::cout << sum_txt.str();
  return kExitOk;
}

int cmd_dataset(const std::string& name, const std::string& out_path,
                int tail_days) {
  if (name != "smallpox") throw UsageFailure("unknown dataset '" + name + "'");
  ObservationSeries series = smallpox_series(tail_days);
  write_file(out_path, write_observation_csv(series, {"y1"}));
  return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"stochastic kinetics: simulation, LNA likelihoods, MCMC inference"};
  app.require_subcommand(1);

  std::string network, theta_csv, x0_csv, method = "ssa", obs_times, out;
  std::string times_csv, methods_csv = "ssa,em,lna", out_prefix;
  std::string data_path, obs_model_path, engine = "lna", filtered_out;
  std::string prior_path, theta0_csv, dataset_name;
  double t_end = 0, dt = 1e-3, sigma2 = 1.0, rtol = 1e-6, atol = 1e-8;
  int reps = 0, iters = 10000, burnin = -1, chains = 1, tail_days = 10;
  uint64_t seed = 1;
  bool no_jacobian = false;

  auto* sim = app.add_subcommand("simulate", "simulate one trajectory");
  sim->add_option("--network", network)->required();
  sim->add_option("--theta", theta_csv);
  sim->add_option("--x0", x0_csv);
  sim->add_option("--t-end", t_end)->required();
  sim->add_option("--method", method);
  sim->add_option("--dt", dt);
  sim->add_option("--obs-times", obs_times);
  sim->add_option("--seed", seed);
  sim->add_option("--out", out)->required();

  auto* td = app.add_subcommand("transdens", "transition-density comparison data");
  td->add_option("--network", network)->required();
  td->add_option("--theta", theta_csv);
  td->add_option("--x0", x0_csv);
  td->add_option("--times", times_csv)->required();
  td->add_option("--reps", reps)->required();
  td->add_option("--methods", methods_csv);
  td->add_option("--dt", dt);
  td->add_option("--seed", seed);
  td->add_option("--out-prefix", out_prefix)->required();
  auto* td_rtol = td->add_option("--rtol", rtol);
  td->add_option("--atol", atol);

  auto* ll = app.add_subcommand("loglik", "evaluate a log-likelihood");
  ll->add_option("--network", network)->required();
  ll->add_option("--theta", theta_csv);
  ll->add_option("--data", data_path)->required();
  ll->add_option("--obs-model", obs_model_path)->required();
  ll->add_option("--engine", engine);
  ll->add_option("--x0", x0_csv);
  auto* ll_sigma2 = ll->add_option("--sigma2", sigma2);
  auto* ll_rtol = ll->add_option("--rtol", rtol);
  ll->add_option("--atol", atol);
  ll->add_option("--filtered-out", filtered_out);

  auto* inf = app.add_subcommand("infer", "random-walk Metropolis inference");
  inf->add_option("--network", network)->required();
  inf->add_option("--data", data_path)->required();
  inf->add_option("--obs-model", obs_model_path)->required();
  inf->add_option("--prior", prior_path)->required();
  inf->add_option("--engine", engine);
  inf->add_option("--theta0", theta0_csv);
  inf->add_option("--x0", x0_csv);
  auto* inf_sigma2 = inf->add_option("--sigma2", sigma2);
  inf->add_option("--iters", iters)->required();
  inf->add_option("--burnin", burnin);
  inf->add_option("--chains", chains);
  inf->add_option("--seed", seed);
  inf->add_option("--out", out)->required();
  inf->add_flag("--no-jacobian", no_jacobian);
  auto* inf_rtol = inf->add_option("--rtol", rtol);
  inf->add_option("--atol", atol);

  auto* ds = app.add_subcommand("dataset", "emit an embedded dataset");
  ds->add_option("--name", dataset_name)->required();
  ds->add_option("--out", out)->required();
  ds->add_option("--tail-days", tail_days);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (sim->parsed())
      return cmd_simulate(network, theta_csv, x0_csv, t_end, method, dt,
                          obs_times, seed, out);
    if (td->parsed())
      return cmd_transdens(network, theta_csv, x0_csv, times_csv, reps,
                           methods_csv, dt, seed, out_prefix,
                           integrator_config(rtol, atol, td_rtol->count() > 0));
    if (ll->parsed())
      return cmd_loglik(network, theta_csv, data_path, obs_model_path, engine,
                        x0_csv, sigma2, ll_sigma2->count() > 0,
                        integrator_config(rtol, atol, ll_rtol->count() > 0),
                        filtered_out);
    if (inf->parsed()) {
      if (burnin < 0) burnin = iters / 5; // default 20%
      return cmd_infer(network, data_path, obs_model_path, prior_path, engine,
                       theta0_csv, x0_csv, sigma2, inf_sigma2->count() > 0,
                       iters, burnin, chains, seed, out, no_jacobian,
                       integrator_config(rtol, atol, inf_rtol->count() > 0));
    }
    if (ds->parsed()) return cmd_dataset(dataset_name, out, tail_days);
  } catch (const UsageFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitParse;
  } catch (const Error& e) {
    switch (e.kind()) {
    case ErrorKind::UsageError:
      std::cerr << "error: " << e.what() << '\n';
      return kExitUsage;
    case ErrorKind::SyntaxError:
    case ErrorKind::UnknownIdentifier:
    case ErrorKind::DuplicateName:
    case ErrorKind::EmptyReactionList:
      std::cerr << "error: " << e.what() << '\n';
      return kExitParse;
    default:
      std::cerr << "error: " << e.what() << '\n';
      return kExitNumerical;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
