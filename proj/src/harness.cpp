#include "csag/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <thread>

namespace csag {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  return out;
}

}  // namespace

std::unique_ptr<CompositionalProblem> make_problem(const ProblemSpec& spec) {
  if (spec.kind == "portfolio") {
    RewardMatrix rm = spec.data_file.empty()
                          ? gen_gaussian_rewards(spec.periods, spec.assets,
                                                 spec.kappa, spec.seed)
                          : RewardMatrix::load(spec.data_file);
    return make_portfolio(std::move(rm));
  }
  if (spec.kind == "lasso") {
    return make_lasso(gen_random_lasso(spec.lasso_samples, spec.lasso_dim,
                                       spec.lambda, spec.epsilon, spec.seed));
  }
  if (spec.kind == "policy") {
    return make_policy_eval(gen_random_mdp(spec.states, spec.feature_dim,
                                           spec.discount, spec.seed),
                            spec.anchor_state);
  }
  if (spec.kind == "toy") {
    return make_toy_quadratic(spec.toy_m, spec.toy_n, spec.toy_p, spec.toy_q,
                              spec.toy_mu, spec.seed);
  }
  throw std::invalid_argument("unknown problem kind: " + spec.kind);
}

double estimate_optimum(const std::vector<Trace>& traces) {
  if (traces.empty()) throw std::invalid_argument("estimate_optimum: no traces");
  double best = std::numeric_limits<double>::infinity();
  bool any = false;
  for (const Trace& t : traces) {
    for (const TraceRecord& r : t) {
      if (std::isfinite(r.objective)) {
        best = std::min(best, r.objective);
        any = true;
      }
    }
  }
  if (!any) throw std::invalid_argument("estimate_optimum: traces carry no finite objective");
  return best;
}

GapSeries gap_series(const Trace& trace, double f_star) {
  if (!std::isfinite(f_star))
    throw std::invalid_argument("gap_series: optimum must be finite");
  GapSeries g;
  g.f_star = f_star;
  g.points.reserve(trace.size());
  for (const TraceRecord& r : trace) {
    const double gap = r.objective - f_star;
    if (gap > 0.0 && std::isfinite(gap)) {
      g.points.emplace_back(r.queries, std::log10(gap));
    } else {
      ++g.dropped;
    }
  }
  return g;
}

std::optional<std::uint64_t> queries_to_gap(const Trace& trace, double f_star,
                                            double gap) {
  for (const TraceRecord& r : trace) {
    if (std::isfinite(r.objective) && r.objective - f_star <= gap) return r.queries;
  }
  return std::nullopt;
}

const RunOutcome& ExperimentResult::find(const std::string& label,
                                         std::int64_t rep) const {
  for (const RunOutcome& run : runs) {
    if (run.algorithm == label && run.repetition == rep) return run;
  }
  throw std::out_of_range("no run labelled " + label + " for repetition " +
                          std::to_string(rep));
}

Vector initial_iterate(std::uint64_t experiment_seed, std::int64_t repetition,
                       Eigen::Index dim) {
  Rng rng(Rng::mix(experiment_seed, 0x1000 + static_cast<std::uint64_t>(repetition)));
  return rng.gaussian_vector(dim);
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  if (spec.algorithms.empty())
    throw std::invalid_argument("run_experiment: need at least one algorithm");
  if (spec.repetitions < 1)
    throw std::invalid_argument("run_experiment: need at least one repetition");
  for (const AlgorithmSpec& a : spec.algorithms) {
    if (!known_algorithm(a.name))
      throw std::invalid_argument("run_experiment: unknown algorithm " + a.name);
  }

  const auto problem = make_problem(spec.problem);
  const std::size_t per_rep = spec.algorithms.size();
  const std::size_t total = static_cast<std::size_t>(spec.repetitions) * per_rep;

  std::vector<Vector> starts;
  starts.reserve(static_cast<std::size_t>(spec.repetitions));
  for (std::int64_t rep = 0; rep < spec.repetitions; ++rep)
    starts.push_back(initial_iterate(spec.seed, rep, problem->dim()));

  // Runs are independent: the problem is immutable and every run owns its
  // tally and random stream, so they can execute on a worker pool. Results
  // land in preassigned slots; the output is identical to a serial pass.
  ExperimentResult result;
  result.runs.resize(total);
  std::atomic<std::size_t> cursor{0};
  std::vector<std::exception_ptr> errors(total);
  auto worker = [&] {
    for (;;) {
      const std::size_t idx = cursor.fetch_add(1);
      if (idx >= total) return;
      const std::int64_t rep = static_cast<std::int64_t>(idx / per_rep);
      const std::size_t ai = idx % per_rep;
      const AlgorithmSpec& algo = spec.algorithms[ai];
      CsagConfig config = algo.config;
      config.seed = Rng::mix(spec.seed, (static_cast<std::uint64_t>(ai) << 20) +
                                            static_cast<std::uint64_t>(rep));
      RunOutcome& outcome = result.runs[idx];
      outcome.algorithm = algo.label.empty() ? algo.name : algo.label;
      outcome.repetition = rep;
      try {
        outcome.result = run_algorithm(algo.name, *problem, config,
                                       starts[static_cast<std::size_t>(rep)]);
      } catch (...) {
        errors[idx] = std::current_exception();
      }
    }
  };
  const unsigned hw = std::thread::hardware_concurrency();
  const std::size_t threads =
      std::max<std::size_t>(1, std::min<std::size_t>(
                                   spec.parallelism > 0 ? spec.parallelism
                                                        : (hw ? hw : 1),
                                   total));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  for (const std::exception_ptr& err : errors) {
    if (err) std::rethrow_exception(err);
  }

  std::vector<Trace> traces;
  traces.reserve(result.runs.size());
  for (const RunOutcome& run : result.runs) traces.push_back(run.result.trace);
  result.f_star = estimate_optimum(traces);
  for (RunOutcome& run : result.runs)
    run.gaps = gap_series(run.result.trace, result.f_star);

  if (!spec.out_prefix.empty()) {
    for (const RunOutcome& run : result.runs) {
      const std::string stem = spec.out_prefix + "_" + run.algorithm + "_seed" +
                               std::to_string(run.repetition);
      write_gap_series(stem + "_gap.txt", run.gaps);
      if (spec.write_traces) write_trace(stem + "_trace.txt", run.result.trace);
    }
    write_summary(spec.out_prefix + "_summary.txt", result, spec.gap_thresholds);
  }
  return result;
}

namespace {

ExperimentResult sweep_impl(ExperimentSpec spec, const std::string& param,
                            const std::vector<std::int64_t>& values) {
  if (spec.algorithms.size() != 1 || spec.algorithms.front().name != "csag")
    throw std::invalid_argument("sweep: expects a single csag algorithm spec");
  const AlgorithmSpec base = spec.algorithms.front();
  spec.algorithms.clear();
  for (const std::int64_t v : values) {
    AlgorithmSpec a = base;
    if (param == "K") {
      a.config.inner_steps = v;
    } else {
      a.config.batch = v;
    }
    a.label = "csag_" + param + std::to_string(v);
    spec.algorithms.push_back(std::move(a));
  }
  return run_experiment(spec);
}

}  // namespace

ExperimentResult sweep_period(ExperimentSpec spec, const std::vector<std::int64_t>& K_values) {
  return sweep_impl(std::move(spec), "K", K_values);
}

ExperimentResult sweep_batch(ExperimentSpec spec, const std::vector<std::int64_t>& a_values) {
  return sweep_impl(std::move(spec), "batch", a_values);
}

double halve_alpha_until_stable(const CompositionalProblem& problem,
                                const std::vector<AlgorithmSpec>& algorithms,
                                const Vector& x0, double alpha0,
                                std::int64_t probe_epochs, int max_halvings) {
  double alpha = alpha0;
  for (int attempt = 0; attempt <= max_halvings; ++attempt) {
    bool stable = true;
    for (const AlgorithmSpec& algo : algorithms) {
      CsagConfig config = algo.config;
      config.alpha = alpha;
      config.max_epochs = probe_epochs;
      config.query_budget = 0;
      const RunResult probe = run_algorithm(algo.name, problem, config, x0);
      if (probe.status == RunStatus::Diverged) {
        stable = false;
        break;
      }
    }
    if (stable) return alpha;
    alpha *= 0.5;
  }
  throw std::runtime_error("no stable step size found by halving");
}

void write_gap_series(const std::string& path, const GapSeries& gaps) {
  std::ofstream out = open_out(path);
  out << "queries log10_gap\n";
  for (const auto& [queries, log_gap] : gaps.points)
    out << queries << ' ' << format_double(log_gap) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_trace(const std::string& path, const Trace& trace) {
  std::ofstream out = open_out(path);
  out << "epoch inner_iter queries objective\n";
  for (const TraceRecord& r : trace)
    out << r.epoch << ' ' << r.inner_iter << ' ' << r.queries << ' '
        << format_double(r.objective) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_summary(const std::string& path, const ExperimentResult& result,
                   const std::vector<double>& thresholds) {
  std::ofstream out = open_out(path);
  out << "algorithm seed threshold queries\n";
  for (const RunOutcome& run : result.runs) {
    for (const double th : thresholds) {
      out << run.algorithm << ' ' << run.repetition << ' ' << format_double(th) << ' ';
      const auto q = queries_to_gap(run.result.trace, result.f_star, th);
      if (q) {
        out << *q << '\n';
      } else {
        out << "unreached\n";
      }
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace csag
