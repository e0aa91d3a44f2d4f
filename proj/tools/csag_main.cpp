#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "csag/harness.hpp"
#include "csag/theory.hpp"

namespace {

using namespace csag;

void add_problem_options(CLI::App* cmd, ProblemSpec* spec) {
  cmd->add_option("--problem", spec->kind, "portfolio | lasso | policy | toy")
      ->check(CLI::IsMember({"portfolio", "lasso", "policy", "toy"}));
  cmd->add_option("--data", spec->data_file, "reward matrix file (portfolio)");
  cmd->add_option("--n", spec->periods, "time points for generated portfolio data");
  cmd->add_option("--assets", spec->assets, "assets for generated portfolio data");
  cmd->add_option("--kappa", spec->kappa, "covariance condition number");
  cmd->add_option("--lasso-samples", spec->lasso_samples, "lasso sample count");
  cmd->add_option("--lasso-dim", spec->lasso_dim, "lasso dimension");
  cmd->add_option("--lambda", spec->lambda, "lasso penalty weight");
  cmd->add_option("--epsilon", spec->epsilon, "lasso smoothing width");
  cmd->add_option("--states", spec->states, "policy-eval state count");
  cmd->add_option("--feat-dim", spec->feature_dim, "policy-eval feature dimension");
  cmd->add_option("--discount", spec->discount, "policy-eval discount");
  cmd->add_option("--anchor", spec->anchor_state, "policy-eval anchor state");
  cmd->add_option("--toy-m", spec->toy_m, "toy inner component count");
  cmd->add_option("--toy-n", spec->toy_n, "toy outer component count");
  cmd->add_option("--toy-p", spec->toy_p, "toy iterate dimension");
  cmd->add_option("--toy-q", spec->toy_q, "toy inner output dimension");
  cmd->add_option("--toy-mu", spec->toy_mu, "toy outer regularization");
}

void add_run_options(CLI::App* cmd, CsagConfig* config) {
  cmd->add_option("--alpha", config->alpha, "step size");
  cmd->add_option("--K", config->inner_steps, "steps per refresh period");
  cmd->add_option("--batch", config->batch, "mini-batch size");
  cmd->add_option("--batch2", config->batch_b, "second mini-batch (csvrg2)");
  cmd->add_option("--epochs", config->max_epochs, "maximum refresh periods");
  cmd->add_option("--grad-tol", config->grad_tol, "stop below this gradient norm");
  cmd->add_option("--budget", config->query_budget, "stop after this many queries");
}

int print_run_report(const ExperimentResult& result,
                     const std::vector<double>& thresholds) {
  int exit_code = 0;
  for (const RunOutcome& run : result.runs) {
    const RunResult& r = run.result;
    std::printf("%s seed %" PRId64 ": status=%s queries=%" PRIu64
                " records=%zu final_objective=%.17g\n",
                run.algorithm.c_str(), run.repetition, to_string(r.status),
                r.tally.total(), r.trace.size(),
                r.trace.empty() ? 0.0 : r.trace.back().objective);
    if (r.status == RunStatus::Diverged) {
      std::fprintf(stderr, "%s seed %" PRId64 " diverged: %s\n",
                   run.algorithm.c_str(), run.repetition, r.diagnostic.c_str());
      exit_code = 2;
    }
    for (const double th : thresholds) {
      const auto q = queries_to_gap(r.trace, result.f_star, th);
      if (q) {
        std::printf("  gap<=%g after %" PRIu64 " queries\n", th, *q);
      } else {
        std::printf("  gap<=%g unreached\n", th);
      }
    }
  }
  return exit_code;
}

std::vector<std::int64_t> parse_values(const std::string& csv) {
  std::vector<std::int64_t> values;
  std::size_t pos = 0;
  while (pos < csv.size()) {
    const std::size_t comma = csv.find(',', pos);
    const std::string tok = csv.substr(pos, comma == std::string::npos
                                                ? std::string::npos
                                                : comma - pos);
    values.push_back(std::stoll(tok));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (values.empty()) throw CLI::ValidationError("--values", "empty list");
  return values;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"compositional finite-sum optimization: C-SAG, baselines, benchmarks"};
  app.require_subcommand(1);

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "generate a folded-Gaussian reward matrix");
  std::int64_t gen_n = 2000, gen_assets = 200;
  double gen_kappa = 20.0;
  std::uint64_t gen_seed = 1;
  std::string gen_out = "rewards.txt";
  gen->add_option("--n", gen_n, "time points")->required();
  gen->add_option("--assets", gen_assets, "asset count")->required();
  gen->add_option("--kappa", gen_kappa, "covariance condition number");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--out", gen_out, "output path")->required();

  // run
  auto* run = app.add_subcommand("run", "run one optimizer and write trace/gap files");
  ExperimentSpec run_spec;
  std::string run_algo = "csag";
  std::uint64_t run_seed = 1;
  std::string run_prefix = "run";
  CsagConfig run_config;
  add_problem_options(run, &run_spec.problem);
  run->add_option("--algo", run_algo, "csag | fg | csvrg1 | csvrg2")
      ->check(CLI::IsMember({"csag", "fg", "csvrg1", "csvrg2"}));
  add_run_options(run, &run_config);
  run->add_option("--seed", run_seed, "run seed (also drives generated data)");
  run->add_option("--out-prefix", run_prefix, "output file prefix");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "run csag across one swept parameter");
  ExperimentSpec sweep_spec;
  std::string sweep_param = "K";
  std::string sweep_values = "10,20,50,200";
  std::uint64_t sweep_seed = 1;
  std::string sweep_prefix = "sweep";
  CsagConfig sweep_config;
  add_problem_options(sweep, &sweep_spec.problem);
  add_run_options(sweep, &sweep_config);
  sweep->add_option("--param", sweep_param, "K | batch")
      ->check(CLI::IsMember({"K", "batch"}));
  sweep->add_option("--values", sweep_values, "comma-separated values")->required();
  sweep->add_option("--seed", sweep_seed, "run seed");
  sweep->add_option("--out-prefix", sweep_prefix, "output file prefix");

  // theory
  auto* theory = app.add_subcommand("theory", "evaluate convergence constants and thresholds");
  TheoryInputs ti;
  double theory_K = 0.0;  // 0: derive from the K threshold
  theory->add_option("--mu", ti.mu_f, "strong convexity modulus")->required();
  theory->add_option("--bg", ti.jacobian_bound, "inner Jacobian bound")->required();
  theory->add_option("--lf", ti.outer_lipschitz, "outer gradient Lipschitz constant")->required();
  theory->add_option("--m", ti.m, "inner component count")->required();
  theory->add_option("--n", ti.n, "outer component count")->required();
  theory->add_option("--batch", ti.batch, "mini-batch size")->required();
  theory->add_option("--alpha", ti.alpha, "step size")->required();
  theory->add_option("--K", theory_K, "refresh period for the ratio");

  // check-grad
  auto* check = app.add_subcommand("check-grad", "compare chain-rule and finite-difference gradients");
  check->set_help_flag("--help", "print help");  // frees -h for the step flag
  ProblemSpec check_spec;
  std::int64_t check_points = 100;
  double check_h = 1e-5, check_tol = 1e-4;
  std::uint64_t check_seed = 1;
  add_problem_options(check, &check_spec);
  check->add_option("--points", check_points, "random evaluation points");
  check->add_option("--h", check_h, "finite-difference step");
  check->add_option("--tol", check_tol, "maximum relative error");
  check->add_option("--seed", check_seed, "point-sampling seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      gen_gaussian_rewards(gen_n, gen_assets, gen_kappa, gen_seed).save(gen_out);
      std::printf("wrote %" PRId64 " x %" PRId64 " reward matrix to %s\n", gen_n,
                  gen_assets, gen_out.c_str());
      return 0;
    }

    if (run->parsed()) {
      run_spec.problem.seed = run_seed;
      run_spec.seed = run_seed;
      run_spec.repetitions = 1;
      run_spec.out_prefix = run_prefix;
      run_spec.write_traces = true;
      if (run->count("--batch") == 0) {
        // default batch capped by the problem's inner component count
        const auto probe = make_problem(run_spec.problem);
        run_config.batch = std::min(run_config.batch, probe->inner_count());
      }
      run_spec.algorithms = {{run_algo, run_config, run_algo}};
      const ExperimentResult result = run_experiment(run_spec);
      return print_run_report(result, run_spec.gap_thresholds);
    }

    if (sweep->parsed()) {
      sweep_spec.problem.seed = sweep_seed;
      sweep_spec.seed = sweep_seed;
      sweep_spec.repetitions = 1;
      sweep_spec.out_prefix = sweep_prefix;
      if (sweep->count("--batch") == 0) {
        const auto probe = make_problem(sweep_spec.problem);
        sweep_config.batch = std::min(sweep_config.batch, probe->inner_count());
      }
      sweep_spec.algorithms = {{"csag", sweep_config, "csag"}};
      const auto values = parse_values(sweep_values);
      const ExperimentResult result =
          sweep_param == "K" ? sweep_period(sweep_spec, values)
                             : sweep_batch(sweep_spec, values);
      return print_run_report(result, sweep_spec.gap_thresholds);
    }

    if (theory->parsed()) {
      const CorollaryThresholds th = corollary_params(ti);
      const double period = theory_K > 0.0
                                ? theory_K
                                : std::max(1.0, std::floor(th.period_min) + 1.0);
      const TheoryOutputs out = evaluate_theory(ti, period);
      std::printf("sigma1   %.17g\n", out.sigma.sigma1);
      std::printf("sigma2   %.17g\n", out.sigma.sigma2);
      std::printf("gamma1   %.17g (K=%g)\n", out.bound.gamma1, period);
      std::printf("gamma2   %.17g\n", out.bound.gamma2);
      if (out.bound.vacuous) {
        std::printf("ratio    vacuous (gamma2 <= 0)\n");
      } else {
        std::printf("ratio    %.17g\n", out.bound.ratio);
      }
      std::printf("a_min    %.17g\n", out.thresholds.batch_min);
      std::printf("alpha1   %.17g\n", out.thresholds.alpha1);
      std::printf("alpha2   %.17g\n", out.thresholds.alpha2);
      std::printf("alpha3   %.17g\n", out.thresholds.alpha3);
      std::printf("K_min    %.17g\n", out.thresholds.period_min);
      std::printf("feasible %s\n", out.thresholds.feasible ? "true" : "false");
      return 0;
    }

    if (check->parsed()) {
      check_spec.seed = check_seed;
      const auto problem = make_problem(check_spec);
      Rng rng(Rng::mix(check_seed, 0xc4ec));
      double worst = 0.0;
      Vector worst_x;
      for (std::int64_t k = 0; k < check_points; ++k) {
        const Vector x = rng.gaussian_vector(problem->dim());
        const Vector analytic = full_gradient(*problem, x);
        const Vector numeric = finite_difference_gradient(*problem, x, check_h);
        const double err = gradient_relative_error(analytic, numeric);
        if (err > worst) {
          worst = err;
          worst_x = x;
        }
      }
      std::printf("%s: max relative gradient error %.3e over %" PRId64
                  " points (h=%g, tol=%g)\n",
                  problem->name().c_str(), worst, check_points, check_h, check_tol);
      if (worst > check_tol) {
        std::fprintf(stderr, "gradient check failed; worst point:");
        for (Eigen::Index i = 0; i < worst_x.size(); ++i)
          std::fprintf(stderr, " %.6g", worst_x[i]);
        std::fprintf(stderr, "\n");
        return 1;
      }
      return 0;
    }
  } catch (const std::exception& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 1;
  }
  return 0;
}
