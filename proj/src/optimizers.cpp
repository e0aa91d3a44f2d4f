#include "csag/optimizers.hpp"

#include <cmath>
#include <sstream>

namespace csag {

namespace {

void validate_config(const CsagConfig& config, const CompositionalProblem& problem) {
  if (!(config.alpha > 0.0)) throw std::invalid_argument("config: step size must be > 0");
  if (config.inner_steps < 1) throw std::invalid_argument("config: need at least 1 inner step");
  if (config.max_epochs < 1) throw std::invalid_argument("config: need at least 1 epoch");
  if (config.grad_tol < 0.0) throw std::invalid_argument("config: gradient tolerance must be >= 0");
  if (config.batch < 1 || config.batch > problem.inner_count())
    throw std::invalid_argument("config: batch must lie in [1, m]");
  if (config.batch_b < 0 || config.batch_b > problem.inner_count())
    throw std::invalid_argument("config: second batch must lie in [0, m]");
}

// Shared measurement/termination bookkeeping for all runners.
class RunRecorder {
 public:
  RunRecorder(const CompositionalProblem& problem, const CsagConfig& config,
              const Vector& x0)
      : problem_(problem), config_(config) {
    result_.final_x = x0;
    result_.status = RunStatus::EpochLimit;
  }

  // Appends a record; returns false when the run must stop (divergence).
  bool record(std::int64_t epoch, std::int64_t inner, const Vector& x) {
    const double f = measure_objective(problem_, x);
    result_.trace.push_back({epoch, inner, result_.tally.total(), f});
    if (!std::isfinite(f) || f > config_.divergence_threshold) {
      std::ostringstream msg;
      msg << "objective " << f << " at epoch " << epoch << " step " << inner
          << " exceeds divergence threshold " << config_.divergence_threshold;
      diverge(msg.str());
      return false;
    }
    return true;
  }

  void diverge(const std::string& why) {
    result_.status = RunStatus::Diverged;
    result_.diagnostic = why;
  }

  bool budget_left() const {
    return config_.query_budget == 0 || result_.tally.total() < config_.query_budget;
  }

  void mark_budget_exhausted() { result_.status = RunStatus::BudgetExhausted; }
  void mark_converged() { result_.status = RunStatus::Converged; }

  OracleTally& tally() { return result_.tally; }
  RunResult take(const Vector& final_x) {
    result_.final_x = final_x;
    return std::move(result_);
  }

 private:
  const CompositionalProblem& problem_;
  const CsagConfig& config_;
  RunResult result_;
};

}  // namespace

const char* to_string(RunStatus status) {
  switch (status) {
    case RunStatus::Converged: return "converged";
    case RunStatus::EpochLimit: return "epoch-limit";
    case RunStatus::BudgetExhausted: return "budget-exhausted";
    case RunStatus::Diverged: return "diverged";
  }
  return "unknown";
}

Vector csag_refresh(CsagState& state, const CompositionalProblem& problem,
                    const CsagConfig& config, OracleTally& tally) {
  if (state.x_ref.size() != problem.dim())
    throw std::invalid_argument("csag_refresh: reference iterate not set");
  MeteredOracle oracle(problem, tally);
  const std::int64_t m = problem.inner_count();
  const std::int64_t n = problem.outer_count();

  state.jac_mem.resize(static_cast<std::size_t>(m));
  state.val_mem.resize(static_cast<std::size_t>(m));
  state.grad_mem.resize(static_cast<std::size_t>(n));

  state.jac_sum.reset();
  for (std::int64_t j = 0; j < m; ++j) {
    state.jac_mem[static_cast<std::size_t>(j)] = oracle.inner_jacobian(j, state.x_ref);
    state.jac_sum.add(state.jac_mem[static_cast<std::size_t>(j)]);
  }
  state.val_sum.reset();
  for (std::int64_t j = 0; j < m; ++j) {
    state.val_mem[static_cast<std::size_t>(j)] = oracle.inner_value(j, state.x_ref);
    state.val_sum.add(state.val_mem[static_cast<std::size_t>(j)]);
  }
  const Vector y = state.mean_value();
  state.grad_sum.reset();
  for (std::int64_t i = 0; i < n; ++i) {
    state.grad_mem[static_cast<std::size_t>(i)] = oracle.outer_gradient(i, y);
    state.grad_sum.add(state.grad_mem[static_cast<std::size_t>(i)]);
  }

  // exact gradient at x_ref, assembled from the memories just written
  Vector grad = state.mean_jacobian().transpose() * state.mean_gradient();
  if (!grad.allFinite()) throw NumericError("csag_refresh: non-finite gradient");
  state.x = state.x_ref - config.alpha * grad;
  state.refreshed = true;
  state.inner_iter = 0;
  return grad;
}

void csag_apply_step(CsagState& state, const CompositionalProblem& problem,
                     const CsagConfig& config, const StepInfo& info,
                     OracleTally& tally) {
  if (!state.refreshed)
    throw std::invalid_argument("csag_apply_step: refresh must run first");
  const std::int64_t m = problem.inner_count();
  const std::int64_t n = problem.outer_count();
  if (info.jacobian_index < 0 || info.jacobian_index >= m)
    throw std::invalid_argument("csag_apply_step: jacobian index out of range");
  if (info.gradient_index < 0 || info.gradient_index >= n)
    throw std::invalid_argument("csag_apply_step: gradient index out of range");
  if (info.value_batch.empty())
    throw std::invalid_argument("csag_apply_step: empty value batch");
  for (const std::int64_t j : info.value_batch) {
    if (j < 0 || j >= m)
      throw std::invalid_argument("csag_apply_step: value index out of range");
  }
  MeteredOracle oracle(problem, tally);

  auto& jac_slot = state.jac_mem[static_cast<std::size_t>(info.jacobian_index)];
  Matrix jac_new = oracle.inner_jacobian(info.jacobian_index, state.x);
  state.jac_sum.replace_term(jac_new, jac_slot);
  jac_slot = std::move(jac_new);

  for (const std::int64_t j : info.value_batch) {
    auto& val_slot = state.val_mem[static_cast<std::size_t>(j)];
    Vector val_new = oracle.inner_value(j, state.x);
    state.val_sum.replace_term(val_new, val_slot);
    val_slot = std::move(val_new);
  }

  // outer gradient slot is evaluated at the just-updated inner value mean
  const Vector y = state.mean_value();
  auto& grad_slot = state.grad_mem[static_cast<std::size_t>(info.gradient_index)];
  Vector grad_new = oracle.outer_gradient(info.gradient_index, y);
  state.grad_sum.replace_term(grad_new, grad_slot);
  grad_slot = std::move(grad_new);

  const Vector step = state.mean_jacobian().transpose() * state.mean_gradient();
  state.x -= config.alpha * step;
  if (!state.x.allFinite()) {
    std::ostringstream msg;
    msg << "csag step produced a non-finite iterate at epoch " << state.epoch
        << " inner step " << state.inner_iter + 1 << "; iterate:";
    for (Eigen::Index i = 0; i < std::min<Eigen::Index>(state.x.size(), 8); ++i)
      msg << ' ' << state.x[i];
    if (state.x.size() > 8) msg << " ...";
    throw NumericError(msg.str());
  }
  ++state.inner_iter;
}

StepInfo csag_inner_step(CsagState& state, const CompositionalProblem& problem,
                         const CsagConfig& config, Rng& rng, OracleTally& tally) {
  StepInfo info;
  info.jacobian_index = rng.uniform_index(problem.inner_count());
  info.value_batch = rng.sample_distinct(problem.inner_count(), config.batch);
  info.gradient_index = rng.uniform_index(problem.outer_count());
  csag_apply_step(state, problem, config, info, tally);
  return info;
}

RunResult run_csag(const CompositionalProblem& problem, const CsagConfig& config,
                   const Vector& x0) {
  validate_config(config, problem);
  RunRecorder rec(problem, config, x0);
  Rng rng(config.seed);
  CsagState state;
  state.x_ref = x0;
  state.x = x0;

  if (!rec.record(0, 0, x0)) return rec.take(x0);
  try {
    for (std::int64_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
      if (!rec.budget_left()) {
        rec.mark_budget_exhausted();
        break;
      }
      state.epoch = epoch;
      const Vector grad = csag_refresh(state, problem, config, rec.tally());
      if (!rec.record(epoch, 0, state.x)) break;
      if (grad.norm() <= config.grad_tol) {
        rec.mark_converged();
        return rec.take(state.x_ref);
      }
      bool ok = true;
      for (std::int64_t k = 1; k <= config.inner_steps; ++k) {
        csag_inner_step(state, problem, config, rng, rec.tally());
        if (!rec.record(epoch, k, state.x)) {
          ok = false;
          break;
        }
      }
      if (!ok) break;
      state.x_ref = state.x;
    }
  } catch (const NumericError& err) {
    rec.diverge(err.what());
  }
  return rec.take(state.x_ref);
}

RunResult run_fg(const CompositionalProblem& problem, const CsagConfig& config,
                 const Vector& x0) {
  validate_config(config, problem);
  RunRecorder rec(problem, config, x0);
  Vector x = x0;
  if (!rec.record(0, 0, x)) return rec.take(x);
  try {
    for (std::int64_t step = 1; step <= config.max_epochs; ++step) {
      if (!rec.budget_left()) {
        rec.mark_budget_exhausted();
        break;
      }
      const Vector grad = full_gradient(problem, x, &rec.tally());
      if (grad.norm() <= config.grad_tol) {
        rec.mark_converged();
        break;
      }
      x -= config.alpha * grad;
      if (!rec.record(step, 0, x)) break;
    }
  } catch (const NumericError& err) {
    rec.diverge(err.what());
  }
  return rec.take(x);
}

namespace {

struct ReferencePoint {
  Vector x;
  Vector value_mean;    // G(x_ref)
  Matrix jacobian_mean; // dG(x_ref)
  Vector full_grad;     // grad f(x_ref)
};

// 2m + n queries, mirroring the memory refresh cost.
ReferencePoint update_reference(const CompositionalProblem& problem, const Vector& x,
                                OracleTally& tally, bool keep_jacobian) {
  MeteredOracle oracle(problem, tally);
  const std::int64_t m = problem.inner_count();
  const std::int64_t n = problem.outer_count();
  ReferencePoint ref;
  ref.x = x;
  MeanAccumulator jac_acc;
  for (std::int64_t j = 0; j < m; ++j) jac_acc.add(oracle.inner_jacobian(j, x));
  MeanAccumulator val_acc;
  for (std::int64_t j = 0; j < m; ++j) val_acc.add(oracle.inner_value(j, x));
  ref.value_mean = val_acc.mean();
  MeanAccumulator grad_acc;
  for (std::int64_t i = 0; i < n; ++i)
    grad_acc.add(oracle.outer_gradient(i, ref.value_mean));
  ref.jacobian_mean = jac_acc.mean();
  ref.full_grad = ref.jacobian_mean.transpose() * grad_acc.mean();
  if (!ref.full_grad.allFinite())
    throw NumericError("reference update: non-finite gradient");
  if (!keep_jacobian) ref.jacobian_mean.resize(0, 0);
  return ref;
}

// Mini-batch corrected estimate of G(x): G(x_ref) - mean_{j in batch}(G_j(x_ref) - G_j(x)).
// Charges two value queries per batch element.
Vector estimate_inner_value(MeteredOracle& oracle, const ReferencePoint& ref,
                            const Vector& x, const std::vector<std::int64_t>& batch) {
  Eigen::Matrix<long double, Eigen::Dynamic, 1> corr =
      Eigen::Matrix<long double, Eigen::Dynamic, 1>::Zero(ref.value_mean.size());
  for (const std::int64_t j : batch) {
    const Vector at_ref = oracle.inner_value(j, ref.x);
    const Vector at_x = oracle.inner_value(j, x);
    corr += at_ref.cast<long double>() - at_x.cast<long double>();
  }
  corr /= static_cast<long double>(batch.size());
  return ref.value_mean - corr.cast<double>();
}

using SvrgStep = Vector (*)(MeteredOracle&, const ReferencePoint&, const Vector&,
                            const CsagConfig&, Rng&);

Vector csvrg1_step(MeteredOracle& oracle, const ReferencePoint& ref, const Vector& x,
                   const CsagConfig& config, Rng& rng) {
  const std::int64_t m = oracle.problem().inner_count();
  const std::int64_t n = oracle.problem().outer_count();
  const auto batch = rng.sample_distinct(m, config.batch);
  const std::int64_t jac_idx = rng.uniform_index(m);
  const std::int64_t grad_idx = rng.uniform_index(n);

  const Vector value_est = estimate_inner_value(oracle, ref, x, batch);
  const Matrix jac_at_x = oracle.inner_jacobian(jac_idx, x);
  const Matrix jac_at_ref = oracle.inner_jacobian(jac_idx, ref.x);
  const Vector grad_at_est = oracle.outer_gradient(grad_idx, value_est);
  const Vector grad_at_ref = oracle.outer_gradient(grad_idx, ref.value_mean);
  return jac_at_x.transpose() * grad_at_est - jac_at_ref.transpose() * grad_at_ref +
         ref.full_grad;
}

Vector csvrg2_step(MeteredOracle& oracle, const ReferencePoint& ref, const Vector& x,
                   const CsagConfig& config, Rng& rng) {
  const std::int64_t m = oracle.problem().inner_count();
  const std::int64_t n = oracle.problem().outer_count();
  const auto value_batch = rng.sample_distinct(m, config.batch);
  const auto jac_batch = rng.sample_distinct(m, config.csvrg2_batch());
  const std::int64_t grad_idx = rng.uniform_index(n);

  const Vector value_est = estimate_inner_value(oracle, ref, x, value_batch);

  Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic> corr =
      Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>::Zero(
          ref.jacobian_mean.rows(), ref.jacobian_mean.cols());
  for (const std::int64_t j : jac_batch) {
    const Matrix at_ref = oracle.inner_jacobian(j, ref.x);
    const Matrix at_x = oracle.inner_jacobian(j, x);
    corr += at_ref.cast<long double>() - at_x.cast<long double>();
  }
  corr /= static_cast<long double>(jac_batch.size());
  const Matrix jac_est = ref.jacobian_mean - corr.cast<double>();

  const Vector grad_at_est = oracle.outer_gradient(grad_idx, value_est);
  const Vector grad_at_ref = oracle.outer_gradient(grad_idx, ref.value_mean);
  return jac_est.transpose() * (grad_at_est - grad_at_ref) + ref.full_grad;
}

RunResult run_csvrg(const CompositionalProblem& problem, const CsagConfig& config,
                    const Vector& x0, SvrgStep step_fn, bool keep_jacobian) {
  validate_config(config, problem);
  RunRecorder rec(problem, config, x0);
  Rng rng(config.seed);
  MeteredOracle oracle(problem, rec.tally());
  Vector x = x0;
  Vector x_ref = x0;

  if (!rec.record(0, 0, x)) return rec.take(x);
  try {
    for (std::int64_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
      if (!rec.budget_left()) {
        rec.mark_budget_exhausted();
        break;
      }
      const ReferencePoint ref =
          update_reference(problem, x, rec.tally(), keep_jacobian);
      x_ref = ref.x;
      if (!rec.record(epoch, 0, x)) break;
      if (ref.full_grad.norm() <= config.grad_tol) {
        rec.mark_converged();
        return rec.take(x_ref);
      }
      bool ok = true;
      for (std::int64_t k = 1; k <= config.inner_steps; ++k) {
        const Vector grad = step_fn(oracle, ref, x, config, rng);
        x -= config.alpha * grad;
        if (!x.allFinite())
          throw NumericError("csvrg step produced a non-finite iterate");
        if (!rec.record(epoch, k, x)) {
          ok = false;
          break;
        }
      }
      if (!ok) break;
      x_ref = x;
    }
  } catch (const NumericError& err) {
    rec.diverge(err.what());
  }
  return rec.take(x_ref);
}

}  // namespace

RunResult run_csvrg1(const CompositionalProblem& problem, const CsagConfig& config,
                     const Vector& x0) {
  return run_csvrg(problem, config, x0, &csvrg1_step, /*keep_jacobian=*/false);
}

RunResult run_csvrg2(const CompositionalProblem& problem, const CsagConfig& config,
                     const Vector& x0) {
  return run_csvrg(problem, config, x0, &csvrg2_step, /*keep_jacobian=*/true);
}

RunResult run_algorithm(const std::string& name, const CompositionalProblem& problem,
                        const CsagConfig& config, const Vector& x0) {
  if (name == "csag") return run_csag(problem, config, x0);
  if (name == "fg") return run_fg(problem, config, x0);
  if (name == "csvrg1") return run_csvrg1(problem, config, x0);
  if (name == "csvrg2") return run_csvrg2(problem, config, x0);
  throw std::invalid_argument("unknown algorithm: " + name);
}

bool known_algorithm(const std::string& name) {
  return name == "csag" || name == "fg" || name == "csvrg1" || name == "csvrg2";
}

}  // namespace csag
