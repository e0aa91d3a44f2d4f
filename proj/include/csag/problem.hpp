#ifndef CSAG_PROBLEM_HPP
#define CSAG_PROBLEM_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

#include "csag/tally.hpp"

namespace csag {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Thrown when an oracle produces a non-finite value or an iterate has
/// gone numerically bad. Distinct from std::invalid_argument so callers
/// can treat it as a run-level failure rather than a usage bug.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Objective of the form f(x) = F(G(x)) with
///   G(x) = (1/m) sum_j G_j(x),  G_j : R^p -> R^q
///   F(y) = (1/n) sum_i F_i(y),  F_i : R^q -> R
/// Optimizers access the problem only through the per-component oracles
/// inner_value, inner_jacobian and outer_gradient. Implementations must be
/// immutable after construction; a problem instance may be shared across
/// concurrent runs.
class CompositionalProblem {
 public:
  virtual ~CompositionalProblem() = default;

  virtual std::int64_t inner_count() const = 0;   // m
  virtual std::int64_t outer_count() const = 0;   // n
  virtual Eigen::Index dim() const = 0;           // p
  virtual Eigen::Index inner_dim() const = 0;     // q

  virtual Vector inner_value(std::int64_t j, const Vector& x) const = 0;
  virtual Matrix inner_jacobian(std::int64_t j, const Vector& x) const = 0;  // q x p
  virtual Vector outer_gradient(std::int64_t i, const Vector& y) const = 0;

  // Component values F_i(y). Not part of the metered oracle set; used only
  // to evaluate the composed objective for measurement and cross-checks.
  virtual bool has_outer_value() const { return false; }
  virtual double outer_value(std::int64_t /*i*/, const Vector& /*y*/) const {
    throw std::logic_error("outer_value not provided");
  }

  // Closed-form f(x) when one exists; never charged to a tally.
  virtual bool has_direct_objective() const { return false; }
  virtual double direct_objective(const Vector& /*x*/) const {
    throw std::logic_error("direct_objective not provided");
  }

  virtual std::string name() const { return "problem"; }
};

/// Charges one query per component call and rejects non-finite oracle
/// output. All algorithm code goes through this wrapper so that query
/// accounting is exact by construction.
class MeteredOracle {
 public:
  MeteredOracle(const CompositionalProblem& problem, OracleTally& tally)
      : problem_(problem), tally_(tally) {}

  Vector inner_value(std::int64_t j, const Vector& x);
  Matrix inner_jacobian(std::int64_t j, const Vector& x);
  Vector outer_gradient(std::int64_t i, const Vector& y);

  const CompositionalProblem& problem() const { return problem_; }

 private:
  const CompositionalProblem& problem_;
  OracleTally& tally_;
};

// Left-to-right accumulation of component terms in extended precision.
// Used for every (1/m) sum_j and (1/n) sum_i so that independently
// assembled averages agree bitwise.
class MeanAccumulator {
 public:
  void add(const Matrix& term);
  // swap one already-counted term for a new one: sum += next - previous
  void replace_term(const Matrix& next, const Matrix& previous);
  Matrix mean() const;
  std::int64_t count() const { return count_; }
  void reset();

 private:
  Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic> sum_;
  std::int64_t count_ = 0;
};

/// f(x) evaluated through the component oracles when outer values are
/// available, otherwise through the closed form. Oracle-path evaluation
/// charges m inner-value queries; objective measurement itself is free.
double compose_objective(const CompositionalProblem& problem, const Vector& x,
                         OracleTally* tally = nullptr);

/// Chain-rule gradient (dG(x))^T dF(G(x)). Charges exactly m Jacobian,
/// m value and n gradient queries when a tally is supplied.
Vector full_gradient(const CompositionalProblem& problem, const Vector& x,
                     OracleTally* tally = nullptr);

/// Central-difference gradient of the composed objective; test oracle,
/// never charged.
Vector finite_difference_gradient(const CompositionalProblem& problem,
                                  const Vector& x, double h);

/// Objective for trace measurement: direct form when available, else the
/// composed evaluation. Never charged.
double measure_objective(const CompositionalProblem& problem, const Vector& x);

// max-norm relative gradient error with a unit floor on the denominator
double gradient_relative_error(const Vector& reference, const Vector& candidate);

}  // namespace csag

#endif  // CSAG_PROBLEM_HPP
