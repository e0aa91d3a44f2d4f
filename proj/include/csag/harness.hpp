#ifndef CSAG_HARNESS_HPP
#define CSAG_HARNESS_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "csag/optimizers.hpp"
#include "csag/problems.hpp"

namespace csag {

/// Problem descriptor: which instance to build and from what. Portfolio
/// data comes from a reward file when given, otherwise from the seeded
/// generator; the other kinds are always generated from the seed.
struct ProblemSpec {
  std::string kind = "portfolio";  // portfolio | lasso | policy | toy
  std::uint64_t seed = 1;          // data-generation seed

  std::string data_file;           // portfolio only, optional
  std::int64_t periods = 200;
  std::int64_t assets = 20;
  double kappa = 20.0;

  std::int64_t lasso_samples = 50;
  Eigen::Index lasso_dim = 10;
  double lambda = 0.1;
  double epsilon = 1e-4;

  std::int64_t states = 10;
  Eigen::Index feature_dim = 5;
  double discount = 0.9;
  std::int64_t anchor_state = 0;

  std::int64_t toy_m = 4;
  std::int64_t toy_n = 4;
  Eigen::Index toy_p = 3;
  Eigen::Index toy_q = 3;
  double toy_mu = 0.5;
};

std::unique_ptr<CompositionalProblem> make_problem(const ProblemSpec& spec);

struct AlgorithmSpec {
  std::string name;  // csag | fg | csvrg1 | csvrg2
  CsagConfig config;
  std::string label; // file-name label; defaults to name
};

struct ExperimentSpec {
  ProblemSpec problem;
  std::vector<AlgorithmSpec> algorithms;
  std::int64_t repetitions = 1;
  std::uint64_t seed = 1;       // drives initial iterates and run streams
  std::string out_prefix;       // empty: keep results in memory only
  std::vector<double> gap_thresholds = {1e-2, 1e-4, 1e-6};
  bool write_traces = false;
  int parallelism = 0;          // worker threads; 0 = hardware concurrency
};

/// log10(objective - optimum) against cumulative queries. Records at or
/// below the optimum have no defined gap; they are dropped and counted.
struct GapSeries {
  std::vector<std::pair<std::uint64_t, double>> points;
  double f_star = 0.0;
  std::int64_t dropped = 0;
};

/// Smallest objective value seen anywhere in the supplied traces.
double estimate_optimum(const std::vector<Trace>& traces);

GapSeries gap_series(const Trace& trace, double f_star);

/// First query count at which the trace objective comes within `gap`
/// of f_star; empty when the run never gets there.
std::optional<std::uint64_t> queries_to_gap(const Trace& trace, double f_star,
                                            double gap);

struct RunOutcome {
  std::string algorithm;  // label
  std::int64_t repetition = 0;
  RunResult result;
  GapSeries gaps;         // against the comparison-wide optimum
};

struct ExperimentResult {
  double f_star = 0.0;
  std::vector<RunOutcome> runs;

  const RunOutcome& find(const std::string& label, std::int64_t rep) const;
};

/// Runs every (algorithm, repetition) pair from a shared per-repetition
/// initial iterate, estimates the optimum over the whole comparison, and
/// writes gap series plus a queries-to-gap summary when a prefix is set.
/// Diverged runs are recorded, not fatal.
ExperimentResult run_experiment(const ExperimentSpec& spec);

/// C-SAG only, one run per swept value with everything else fixed.
ExperimentResult sweep_period(ExperimentSpec spec, const std::vector<std::int64_t>& K_values);
ExperimentResult sweep_batch(ExperimentSpec spec, const std::vector<std::int64_t>& a_values);

/// Halves alpha until short probe runs of every listed algorithm stay
/// finite; returns the first stable step size.
double halve_alpha_until_stable(const CompositionalProblem& problem,
                                const std::vector<AlgorithmSpec>& algorithms,
                                const Vector& x0, double alpha0,
                                std::int64_t probe_epochs = 10,
                                int max_halvings = 40);

Vector initial_iterate(std::uint64_t experiment_seed, std::int64_t repetition,
                       Eigen::Index dim);

void write_gap_series(const std::string& path, const GapSeries& gaps);
void write_trace(const std::string& path, const Trace& trace);
void write_summary(const std::string& path, const ExperimentResult& result,
                   const std::vector<double>& thresholds);

}  // namespace csag

#endif  // CSAG_HARNESS_HPP
