#include "csag/problem.hpp"

#include <cmath>

namespace csag {

namespace {

void require_dim(const Vector& x, Eigen::Index expected, const char* what) {
  if (x.size() != expected) {
    throw std::invalid_argument(std::string(what) + ": expected dimension " +
                                std::to_string(expected) + ", got " +
                                std::to_string(x.size()));
  }
}

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) {
    throw NumericError(std::string("non-finite oracle output from ") + what);
  }
}

}  // namespace

Vector MeteredOracle::inner_value(std::int64_t j, const Vector& x) {
  Vector v = problem_.inner_value(j, x);
  require_finite(v, "inner_value");
  tally_.count_inner_value();
  return v;
}

Matrix MeteredOracle::inner_jacobian(std::int64_t j, const Vector& x) {
  Matrix m = problem_.inner_jacobian(j, x);
  require_finite(m, "inner_jacobian");
  tally_.count_inner_jacobian();
  return m;
}

Vector MeteredOracle::outer_gradient(std::int64_t i, const Vector& y) {
  Vector g = problem_.outer_gradient(i, y);
  require_finite(g, "outer_gradient");
  tally_.count_outer_gradient();
  return g;
}

void MeanAccumulator::add(const Matrix& term) {
  if (count_ == 0) {
    sum_ = term.cast<long double>();
  } else {
    sum_ += term.cast<long double>();
  }
  ++count_;
}

void MeanAccumulator::replace_term(const Matrix& next, const Matrix& previous) {
  sum_ += next.cast<long double>() - previous.cast<long double>();
}

Matrix MeanAccumulator::mean() const {
  if (count_ == 0) throw std::logic_error("MeanAccumulator: empty");
  return (sum_ / static_cast<long double>(count_)).cast<double>();
}

void MeanAccumulator::reset() {
  count_ = 0;
  sum_.resize(0, 0);
}

double compose_objective(const CompositionalProblem& problem, const Vector& x,
                         OracleTally* tally) {
  require_dim(x, problem.dim(), "compose_objective");
  if (problem.has_outer_value()) {
    OracleTally local;
    MeteredOracle oracle(problem, tally ? *tally : local);
    const std::int64_t m = problem.inner_count();
    MeanAccumulator g_acc;
    for (std::int64_t j = 0; j < m; ++j) g_acc.add(oracle.inner_value(j, x));
    const Vector y = g_acc.mean();
    const std::int64_t n = problem.outer_count();
    long double sum = 0.0L;
    for (std::int64_t i = 0; i < n; ++i) {
      sum += static_cast<long double>(problem.outer_value(i, y));
    }
    const double f = static_cast<double>(sum / static_cast<long double>(n));
    if (!std::isfinite(f)) throw NumericError("compose_objective: non-finite value");
    return f;
  }
  if (problem.has_direct_objective()) {
    const double f = problem.direct_objective(x);
    if (!std::isfinite(f)) throw NumericError("direct_objective: non-finite value");
    return f;
  }
  throw std::logic_error("problem exposes neither outer values nor a direct objective");
}

Vector full_gradient(const CompositionalProblem& problem, const Vector& x,
                     OracleTally* tally) {
  require_dim(x, problem.dim(), "full_gradient");
  OracleTally local;
  MeteredOracle oracle(problem, tally ? *tally : local);
  const std::int64_t m = problem.inner_count();
  const std::int64_t n = problem.outer_count();

  MeanAccumulator jac_acc;
  for (std::int64_t j = 0; j < m; ++j) jac_acc.add(oracle.inner_jacobian(j, x));
  MeanAccumulator val_acc;
  for (std::int64_t j = 0; j < m; ++j) val_acc.add(oracle.inner_value(j, x));
  const Vector y = val_acc.mean();

  MeanAccumulator grad_acc;
  for (std::int64_t i = 0; i < n; ++i) grad_acc.add(oracle.outer_gradient(i, y));

  const Matrix jac = jac_acc.mean();
  const Vector fgrad = grad_acc.mean();
  Vector g = jac.transpose() * fgrad;
  if (!g.allFinite()) throw NumericError("full_gradient: non-finite result");
  return g;
}

Vector finite_difference_gradient(const CompositionalProblem& problem,
                                  const Vector& x, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite_difference_gradient: h must be > 0");
  require_dim(x, problem.dim(), "finite_difference_gradient");
  Vector g(x.size());
  Vector probe = x;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    probe[k] = x[k] + h;
    const double fp = measure_objective(problem, probe);
    probe[k] = x[k] - h;
    const double fm = measure_objective(problem, probe);
    probe[k] = x[k];
    g[k] = (fp - fm) / (2.0 * h);
  }
  if (!g.allFinite()) throw NumericError("finite_difference_gradient: non-finite result");
  return g;
}

double measure_objective(const CompositionalProblem& problem, const Vector& x) {
  if (problem.has_direct_objective()) {
    const double f = problem.direct_objective(x);
    if (!std::isfinite(f)) throw NumericError("direct_objective: non-finite value");
    return f;
  }
  return compose_objective(problem, x, nullptr);
}

double gradient_relative_error(const Vector& reference, const Vector& candidate) {
  const double scale = std::max(1.0, reference.lpNorm<Eigen::Infinity>());
  return (reference - candidate).lpNorm<Eigen::Infinity>() / scale;
}

}  // namespace csag
