#ifndef CSAG_PROBLEMS_HPP
#define CSAG_PROBLEMS_HPP

#include <cstdint>
#include <memory>
#include <string>

#include "csag/problem.hpp"

namespace csag {

/// Per-period asset rewards: row i holds the reward vector observed at
/// time point i. Entries are non-negative (folded-Gaussian samples).
struct RewardMatrix {
  Matrix rewards;  // n x N

  std::int64_t periods() const { return rewards.rows(); }
  std::int64_t assets() const { return rewards.cols(); }
  void validate() const;

  void save(const std::string& path) const;
  static RewardMatrix load(const std::string& path);
};

/// Eigenvalues assigned to the sampling covariance: log-spaced in
/// [1, kappa_cov] with both endpoints hit exactly.
Vector covariance_spectrum(std::int64_t assets, double kappa_cov);

/// Draws n folded-Gaussian reward vectors whose underlying covariance
/// Sigma = Q diag(lambda) Q^T has eigenvalues from covariance_spectrum and
/// Q a seeded random orthogonal matrix. Bit-reproducible per seed.
RewardMatrix gen_gaussian_rewards(std::int64_t n, std::int64_t assets,
                                  double kappa_cov, std::uint64_t seed);

/// Markov reward process with linear value features; transition rows sum
/// to one and the discount lies in [0, 1).
struct MdpSpec {
  Matrix features;     // |S| x d
  Matrix transitions;  // |S| x |S|, row-stochastic
  Matrix rewards;      // |S| x |S|
  double discount = 0.9;

  std::int64_t states() const { return features.rows(); }
  Eigen::Index feature_dim() const { return features.cols(); }
  void validate() const;
};

MdpSpec gen_random_mdp(std::int64_t states, Eigen::Index feature_dim,
                       double discount, std::uint64_t seed);

/// l1-penalized least squares with a smoothed absolute value
/// s_eps(t) = sqrt(t^2 + eps^2) - eps in place of |t|.
struct LassoSpec {
  Matrix design;    // n x d
  Vector response;  // n
  double lambda = 0.1;
  double epsilon = 1e-4;

  void validate() const;
};

LassoSpec gen_random_lasso(std::int64_t samples, Eigen::Index dim,
                           double lambda, double epsilon, std::uint64_t seed);

/// Mean-variance portfolio selection: maximize average return minus the
/// variance of returns, expressed as a minimization. Inner components
/// stack the decision vector with one period's return; outer components
/// score it against each period.
std::unique_ptr<CompositionalProblem> make_portfolio(RewardMatrix rewards);

std::unique_ptr<CompositionalProblem> make_lasso(LassoSpec spec);

/// Bellman-residual policy evaluation. The inner components share one
/// designated anchor state whose transition row and rewards they carry.
std::unique_ptr<CompositionalProblem> make_policy_eval(MdpSpec spec,
                                                       std::int64_t anchor_state);

/// Strongly convex composition of affine inner maps G_j(x) = A_j x + b_j
/// with outer components F_i(y) = 0.5*|y - c_i|^2 + (mu/2)*|y|^2.
/// The minimizer and the standard constants are available in closed form.
class ToyQuadratic : public CompositionalProblem {
 public:
  ToyQuadratic(std::int64_t m, std::int64_t n, Eigen::Index p, Eigen::Index q,
               double mu, std::uint64_t seed);

  std::int64_t inner_count() const override { return static_cast<std::int64_t>(A_.size()); }
  std::int64_t outer_count() const override { return static_cast<std::int64_t>(c_.size()); }
  Eigen::Index dim() const override { return p_; }
  Eigen::Index inner_dim() const override { return q_; }

  Vector inner_value(std::int64_t j, const Vector& x) const override;
  Matrix inner_jacobian(std::int64_t j, const Vector& x) const override;
  Vector outer_gradient(std::int64_t i, const Vector& y) const override;
  bool has_outer_value() const override { return true; }
  double outer_value(std::int64_t i, const Vector& y) const override;
  bool has_direct_objective() const override { return true; }
  double direct_objective(const Vector& x) const override;
  std::string name() const override { return "toy-quadratic"; }

  const Vector& minimizer() const { return x_star_; }
  double objective_at_minimizer() const { return f_star_; }
  double strong_convexity() const { return mu_f_; }      // modulus of f
  double jacobian_bound() const { return jac_bound_; }   // max_j |A_j|_2
  double outer_lipschitz() const { return 1.0 + mu_; }   // gradient Lipschitz constant

 private:
  std::vector<Matrix> A_;
  std::vector<Vector> b_;
  std::vector<Vector> c_;
  Eigen::Index p_, q_;
  double mu_;
  Matrix a_bar_;
  Vector b_bar_, c_bar_;
  double const_term_;
  Vector x_star_;
  double f_star_;
  double mu_f_;
  double jac_bound_;
};

std::unique_ptr<ToyQuadratic> make_toy_quadratic(std::int64_t m, std::int64_t n,
                                                 Eigen::Index p, Eigen::Index q,
                                                 double mu, std::uint64_t seed);

}  // namespace csag

#endif  // CSAG_PROBLEMS_HPP
