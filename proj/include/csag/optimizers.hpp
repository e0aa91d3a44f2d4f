#ifndef CSAG_OPTIMIZERS_HPP
#define CSAG_OPTIMIZERS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "csag/problem.hpp"
#include "csag/rng.hpp"
#include "csag/tally.hpp"

namespace csag {

struct CsagConfig {
  double alpha = 0.12;           // step size
  std::int64_t inner_steps = 20; // steps between memory refreshes (K)
  std::int64_t batch = 20;       // inner value mini-batch size (a)
  std::int64_t batch_b = 0;      // second mini-batch for csvrg2; 0 means batch
  std::int64_t max_epochs = 50;  // refresh periods before giving up (S)
  double grad_tol = 0.0;         // stop once |grad f(x_ref)| falls below this
  std::uint64_t seed = 0;
  std::uint64_t query_budget = 0;    // 0 = unlimited; checked at epoch starts
  double divergence_threshold = 1e12;

  std::int64_t csvrg2_batch() const { return batch_b > 0 ? batch_b : batch; }
};

/// One measurement row, taken after every algorithm step. Objective values
/// come from the problem's direct form and are never charged to the tally.
struct TraceRecord {
  std::int64_t epoch = 0;
  std::int64_t inner_iter = 0;
  std::uint64_t queries = 0;
  double objective = 0.0;
};

using Trace = std::vector<TraceRecord>;

enum class RunStatus { Converged, EpochLimit, BudgetExhausted, Diverged };

const char* to_string(RunStatus status);

struct RunResult {
  Trace trace;
  Vector final_x;       // reference iterate at termination
  RunStatus status = RunStatus::EpochLimit;
  std::string diagnostic;
  OracleTally tally;
};

/// The three per-component memories plus running component sums kept in
/// extended precision, so step cost stays proportional to the batch size
/// while the assembled averages match a fresh left-to-right reduction.
struct CsagState {
  Vector x;
  Vector x_ref;
  std::vector<Matrix> jac_mem;    // one q x p slot per inner component
  std::vector<Vector> val_mem;    // one q slot per inner component
  std::vector<Vector> grad_mem;   // one q slot per outer component
  MeanAccumulator jac_sum, val_sum, grad_sum;
  std::int64_t epoch = 0;
  std::int64_t inner_iter = 0;
  bool refreshed = false;

  Matrix mean_jacobian() const { return jac_sum.mean(); }
  Vector mean_value() const { return val_sum.mean(); }
  Vector mean_gradient() const { return grad_sum.mean(); }
};

/// Indices drawn for one inner step: the Jacobian slot, the value
/// mini-batch (ascending), and the outer gradient slot.
struct StepInfo {
  std::int64_t jacobian_index = 0;
  std::vector<std::int64_t> value_batch;
  std::int64_t gradient_index = 0;
};

/// Recomputes every memory slot at x_ref (m + m + n queries), then takes
/// one exact gradient step from the just-filled memories at no extra
/// query cost. Returns the exact gradient at x_ref.
Vector csag_refresh(CsagState& state, const CompositionalProblem& problem,
                    const CsagConfig& config, OracleTally& tally);

/// Samples the step indices and applies one memory-update step.
StepInfo csag_inner_step(CsagState& state, const CompositionalProblem& problem,
                         const CsagConfig& config, Rng& rng, OracleTally& tally);

/// Same update with caller-chosen indices; charges |batch| + 2 queries.
void csag_apply_step(CsagState& state, const CompositionalProblem& problem,
                     const CsagConfig& config, const StepInfo& info,
                     OracleTally& tally);

RunResult run_csag(const CompositionalProblem& problem, const CsagConfig& config,
                   const Vector& x0);

/// Full gradient descent; every step charges 2m + n queries.
RunResult run_fg(const CompositionalProblem& problem, const CsagConfig& config,
                 const Vector& x0);

/// Variance-reduced compositional baselines anchored at a periodically
/// renewed reference point. Per step: 2a + 4 queries (csvrg1) and
/// 2a + 2b + 2 queries (csvrg2); the reference update costs 2m + n.
RunResult run_csvrg1(const CompositionalProblem& problem, const CsagConfig& config,
                     const Vector& x0);
RunResult run_csvrg2(const CompositionalProblem& problem, const CsagConfig& config,
                     const Vector& x0);

/// Dispatch by name: csag | fg | csvrg1 | csvrg2.
RunResult run_algorithm(const std::string& name, const CompositionalProblem& problem,
                        const CsagConfig& config, const Vector& x0);

bool known_algorithm(const std::string& name);

}  // namespace csag

#endif  // CSAG_OPTIMIZERS_HPP
