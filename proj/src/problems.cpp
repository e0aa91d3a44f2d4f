#include "csag/problems.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include <Eigen/Dense>

#include "csag/rng.hpp"

namespace csag {

namespace {

constexpr double kStochasticRowTol = 1e-12;

void check(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

double smoothed_abs(double t, double eps) {
  return std::sqrt(t * t + eps * eps) - eps;
}

double smoothed_abs_slope(double t, double eps) {
  return t / std::sqrt(t * t + eps * eps);
}

}  // namespace

// ---------------------------------------------------------------------------
// RewardMatrix

void RewardMatrix::validate() const {
  check(periods() >= 2, "RewardMatrix: need at least 2 time points");
  check(assets() >= 1, "RewardMatrix: need at least 1 asset");
  check(rewards.allFinite() && (rewards.array() >= 0.0).all(),
        "RewardMatrix: entries must be finite and non-negative");
}

void RewardMatrix::save(const std::string& path) const {
  validate();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << periods() << ' ' << assets() << '\n';
  char buf[40];
  for (std::int64_t i = 0; i < periods(); ++i) {
    for (std::int64_t k = 0; k < assets(); ++k) {
      std::snprintf(buf, sizeof(buf), "%.17g", rewards(i, k));
      out << buf << (k + 1 == assets() ? '\n' : ' ');
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

RewardMatrix RewardMatrix::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::int64_t n = 0, assets = 0;
  if (!(in >> n >> assets) || n < 2 || assets < 1)
    throw std::runtime_error("malformed reward file header: " + path);
  RewardMatrix rm;
  rm.rewards.resize(n, assets);
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t k = 0; k < assets; ++k)
      if (!(in >> rm.rewards(i, k)))
        throw std::runtime_error("truncated reward file: " + path);
  rm.validate();
  return rm;
}

Vector covariance_spectrum(std::int64_t assets, double kappa_cov) {
  check(assets >= 1, "covariance_spectrum: need at least 1 asset");
  check(kappa_cov >= 1.0, "covariance_spectrum: condition number must be >= 1");
  const Eigen::Index N = static_cast<Eigen::Index>(assets);
  Vector lambda(N);
  for (Eigen::Index k = 0; k < N; ++k) {
    lambda[k] = (N == 1) ? 1.0
                         : std::pow(kappa_cov, static_cast<double>(k) /
                                                   static_cast<double>(N - 1));
  }
  return lambda;
}

RewardMatrix gen_gaussian_rewards(std::int64_t n, std::int64_t assets,
                                  double kappa_cov, std::uint64_t seed) {
  check(n >= 2, "gen_gaussian_rewards: need n >= 2");

  const Vector lambda = covariance_spectrum(assets, kappa_cov);
  Rng rng(seed);
  const Eigen::Index N = static_cast<Eigen::Index>(assets);

  // Random orthogonal basis: QR of a Gaussian matrix, with column signs
  // fixed so the factorization (and hence the data) is unique.
  Eigen::HouseholderQR<Matrix> qr(rng.gaussian_matrix(N, N));
  Matrix q = qr.householderQ();
  const Matrix& r = qr.matrixQR();
  for (Eigen::Index k = 0; k < N; ++k)
    if (r(k, k) < 0.0) q.col(k) = -q.col(k);

  const Matrix factor = q * lambda.cwiseSqrt().asDiagonal();

  RewardMatrix rm;
  rm.rewards.resize(n, N);
  for (std::int64_t i = 0; i < n; ++i) {
    rm.rewards.row(i) = (factor * rng.gaussian_vector(N)).cwiseAbs().transpose();
  }
  rm.validate();
  return rm;
}

// ---------------------------------------------------------------------------
// Mean-variance portfolio

namespace {

class PortfolioProblem final : public CompositionalProblem {
 public:
  explicit PortfolioProblem(RewardMatrix rm) : r_(std::move(rm.rewards)) {}

  std::int64_t inner_count() const override { return r_.rows(); }
  std::int64_t outer_count() const override { return r_.rows(); }
  Eigen::Index dim() const override { return r_.cols(); }
  Eigen::Index inner_dim() const override { return r_.cols() + 1; }

  // G_j(x) = (x, <r_j, x>)
  Vector inner_value(std::int64_t j, const Vector& x) const override {
    const Eigen::Index N = r_.cols();
    Vector v(N + 1);
    v.head(N) = x;
    v[N] = r_.row(j).dot(x);
    return v;
  }

  Matrix inner_jacobian(std::int64_t j, const Vector& /*x*/) const override {
    const Eigen::Index N = r_.cols();
    Matrix jac(N + 1, N);
    jac.topRows(N) = Matrix::Identity(N, N);
    jac.row(N) = r_.row(j);
    return jac;
  }

  // F_i(y) = -y_last + (<r_i, y_head> - y_last)^2
  double outer_value(std::int64_t i, const Vector& y) const override {
    const Eigen::Index N = r_.cols();
    const double delta = r_.row(i).dot(y.head(N)) - y[N];
    return -y[N] + delta * delta;
  }

  Vector outer_gradient(std::int64_t i, const Vector& y) const override {
    const Eigen::Index N = r_.cols();
    const double delta = r_.row(i).dot(y.head(N)) - y[N];
    Vector g(N + 1);
    g.head(N) = 2.0 * delta * r_.row(i).transpose();
    g[N] = -1.0 - 2.0 * delta;
    return g;
  }

  bool has_outer_value() const override { return true; }
  bool has_direct_objective() const override { return true; }

  // negated mean return plus variance of per-period returns
  double direct_objective(const Vector& x) const override {
    const Vector returns = r_ * x;
    const std::int64_t n = r_.rows();
    long double mean = 0.0L;
    for (std::int64_t i = 0; i < n; ++i) mean += returns[i];
    mean /= static_cast<long double>(n);
    long double var = 0.0L;
    for (std::int64_t i = 0; i < n; ++i) {
      const long double d = returns[i] - mean;
      var += d * d;
    }
    var /= static_cast<long double>(n);
    return static_cast<double>(-mean + var);
  }

  std::string name() const override { return "portfolio"; }

 private:
  Matrix r_;  // n x N
};

}  // namespace

std::unique_ptr<CompositionalProblem> make_portfolio(RewardMatrix rewards) {
  rewards.validate();
  return std::make_unique<PortfolioProblem>(std::move(rewards));
}

// ---------------------------------------------------------------------------
// Smoothed lasso

void LassoSpec::validate() const {
  check(design.rows() >= 1 && design.cols() >= 1, "LassoSpec: empty design");
  check(response.size() == design.rows(), "LassoSpec: response length mismatch");
  check(epsilon > 0.0, "LassoSpec: smoothing epsilon must be > 0");
  check(lambda >= 0.0, "LassoSpec: penalty must be >= 0");
}

namespace {

// Inner component j carries the smoothed penalty of coordinate j in slot 0
// and the coordinate itself in slot 1+j, so the averaged inner value is
// ((lambda/d) sum_j s(w_j), w/d) and each F_i can rebuild <w, x_i> from the
// tail block scaled by d. This keeps the inner components independent of
// the sample index while reproducing the penalized least-squares objective.
class LassoProblem final : public CompositionalProblem {
 public:
  explicit LassoProblem(LassoSpec spec) : s_(std::move(spec)) {}

  std::int64_t inner_count() const override { return s_.design.cols(); }
  std::int64_t outer_count() const override { return s_.design.rows(); }
  Eigen::Index dim() const override { return s_.design.cols(); }
  Eigen::Index inner_dim() const override { return s_.design.cols() + 1; }

  Vector inner_value(std::int64_t j, const Vector& w) const override {
    Vector v = Vector::Zero(inner_dim());
    v[0] = s_.lambda * smoothed_abs(w[j], s_.epsilon);
    v[1 + j] = w[j];
    return v;
  }

  Matrix inner_jacobian(std::int64_t j, const Vector& w) const override {
    Matrix jac = Matrix::Zero(inner_dim(), dim());
    jac(0, j) = s_.lambda * smoothed_abs_slope(w[j], s_.epsilon);
    jac(1 + j, j) = 1.0;
    return jac;
  }

  double outer_value(std::int64_t i, const Vector& z) const override {
    const double d = static_cast<double>(dim());
    const double resid = s_.response[i] - d * s_.design.row(i).dot(z.tail(dim()));
    return d * z[0] + resid * resid;
  }

  Vector outer_gradient(std::int64_t i, const Vector& z) const override {
    const double d = static_cast<double>(dim());
    const double resid = s_.response[i] - d * s_.design.row(i).dot(z.tail(dim()));
    Vector g(inner_dim());
    g[0] = d;
    g.tail(dim()) = (-2.0 * d * resid) * s_.design.row(i).transpose();
    return g;
  }

  bool has_outer_value() const override { return true; }
  bool has_direct_objective() const override { return true; }

  double direct_objective(const Vector& w) const override {
    const Vector resid = s_.response - s_.design * w;
    long double mse = 0.0L;
    for (Eigen::Index i = 0; i < resid.size(); ++i)
      mse += static_cast<long double>(resid[i]) * resid[i];
    mse /= static_cast<long double>(resid.size());
    long double penalty = 0.0L;
    for (Eigen::Index j = 0; j < w.size(); ++j)
      penalty += smoothed_abs(w[j], s_.epsilon);
    return static_cast<double>(mse + s_.lambda * penalty);
  }

  std::string name() const override { return "lasso"; }

 private:
  LassoSpec s_;
};

}  // namespace

std::unique_ptr<CompositionalProblem> make_lasso(LassoSpec spec) {
  spec.validate();
  return std::make_unique<LassoProblem>(std::move(spec));
}

LassoSpec gen_random_lasso(std::int64_t samples, Eigen::Index dim, double lambda,
                           double epsilon, std::uint64_t seed) {
  check(samples >= 1 && dim >= 1, "gen_random_lasso: degenerate sizes");
  Rng rng(seed);
  LassoSpec spec;
  spec.design = rng.gaussian_matrix(samples, dim);
  Vector w_true = Vector::Zero(dim);
  for (Eigen::Index j = 0; j < dim; j += 3) w_true[j] = (j % 2 == 0) ? 1.5 : -1.0;
  spec.response = spec.design * w_true + 0.1 * rng.gaussian_vector(samples);
  spec.lambda = lambda;
  spec.epsilon = epsilon;
  spec.validate();
  return spec;
}

// ---------------------------------------------------------------------------
// Policy evaluation

void MdpSpec::validate() const {
  const std::int64_t s = states();
  check(s >= 1, "MdpSpec: need at least one state");
  check(feature_dim() >= 1, "MdpSpec: need at least one feature");
  check(transitions.rows() == s && transitions.cols() == s,
        "MdpSpec: transition matrix must be |S| x |S|");
  check(rewards.rows() == s && rewards.cols() == s,
        "MdpSpec: reward matrix must be |S| x |S|");
  check(discount >= 0.0 && discount < 1.0, "MdpSpec: discount must lie in [0, 1)");
  check((transitions.array() >= 0.0).all(), "MdpSpec: negative transition probability");
  for (std::int64_t i = 0; i < s; ++i) {
    check(std::abs(transitions.row(i).sum() - 1.0) <= kStochasticRowTol,
          "MdpSpec: transition row " + std::to_string(i) + " does not sum to 1");
  }
}

MdpSpec gen_random_mdp(std::int64_t states, Eigen::Index feature_dim,
                       double discount, std::uint64_t seed) {
  check(states >= 1 && feature_dim >= 1, "gen_random_mdp: degenerate sizes");
  Rng rng(seed);
  MdpSpec spec;
  spec.features = rng.gaussian_matrix(states, feature_dim);
  spec.transitions.resize(states, states);
  for (std::int64_t i = 0; i < states; ++i) {
    for (std::int64_t j = 0; j < states; ++j)
      spec.transitions(i, j) = rng.uniform01() + 0.1;
    spec.transitions.row(i) /= spec.transitions.row(i).sum();
  }
  spec.rewards = rng.gaussian_matrix(states, states);
  spec.discount = discount;
  spec.validate();
  return spec;
}

namespace {

// Inner component j carries (w, P[anchor][j] * (r[anchor][j] + g * phi_j' w)),
// so the averaged inner value is (w, q_anchor(w)/|S|) and each outer
// component scores feature row i against the anchored one-step lookahead.
class PolicyEvalProblem final : public CompositionalProblem {
 public:
  PolicyEvalProblem(MdpSpec spec, std::int64_t anchor)
      : s_(std::move(spec)), anchor_(anchor) {}

  std::int64_t inner_count() const override { return s_.states(); }
  std::int64_t outer_count() const override { return s_.states(); }
  Eigen::Index dim() const override { return s_.feature_dim(); }
  Eigen::Index inner_dim() const override { return s_.feature_dim() + 1; }

  Vector inner_value(std::int64_t j, const Vector& w) const override {
    const Eigen::Index d = dim();
    Vector v(d + 1);
    v.head(d) = w;
    v[d] = s_.transitions(anchor_, j) *
           (s_.rewards(anchor_, j) + s_.discount * s_.features.row(j).dot(w));
    return v;
  }

  Matrix inner_jacobian(std::int64_t j, const Vector& /*w*/) const override {
    const Eigen::Index d = dim();
    Matrix jac(d + 1, d);
    jac.topRows(d) = Matrix::Identity(d, d);
    jac.row(d) = s_.discount * s_.transitions(anchor_, j) * s_.features.row(j);
    return jac;
  }

  // F_i(z) = (phi_i' z_head - |S| z_last)^2
  double outer_value(std::int64_t i, const Vector& z) const override {
    const double u = residual(i, z);
    return u * u;
  }

  Vector outer_gradient(std::int64_t i, const Vector& z) const override {
    const Eigen::Index d = dim();
    const double u = residual(i, z);
    Vector g(d + 1);
    g.head(d) = 2.0 * u * s_.features.row(i).transpose();
    g[d] = -2.0 * u * static_cast<double>(s_.states());
    return g;
  }

  bool has_outer_value() const override { return true; }
  bool has_direct_objective() const override { return true; }

  double direct_objective(const Vector& w) const override {
    const std::int64_t S = s_.states();
    long double lookahead = 0.0L;
    for (std::int64_t j = 0; j < S; ++j) {
      lookahead += static_cast<long double>(s_.transitions(anchor_, j)) *
                   (s_.rewards(anchor_, j) + s_.discount * s_.features.row(j).dot(w));
    }
    long double sum = 0.0L;
    for (std::int64_t i = 0; i < S; ++i) {
      const long double u = static_cast<long double>(s_.features.row(i).dot(w)) - lookahead;
      sum += u * u;
    }
    return static_cast<double>(sum / static_cast<long double>(S));
  }

  std::string name() const override { return "policy-eval"; }

 private:
  double residual(std::int64_t i, const Vector& z) const {
    const Eigen::Index d = dim();
    return s_.features.row(i).dot(z.head(d)) -
           static_cast<double>(s_.states()) * z[d];
  }

  MdpSpec s_;
  std::int64_t anchor_;
};

}  // namespace

std::unique_ptr<CompositionalProblem> make_policy_eval(MdpSpec spec,
                                                       std::int64_t anchor_state) {
  spec.validate();
  check(anchor_state >= 0 && anchor_state < spec.states(),
        "make_policy_eval: anchor state out of range");
  return std::make_unique<PolicyEvalProblem>(std::move(spec), anchor_state);
}

// ---------------------------------------------------------------------------
// Toy quadratic

ToyQuadratic::ToyQuadratic(std::int64_t m, std::int64_t n, Eigen::Index p,
                           Eigen::Index q, double mu, std::uint64_t seed)
    : p_(p), q_(q), mu_(mu) {
  check(m >= 1 && n >= 1 && p >= 1 && q >= 1, "ToyQuadratic: degenerate sizes");
  check(mu > 0.0, "ToyQuadratic: mu must be > 0");

  Rng rng(seed);

  // Affine maps close to a common orthonormal-column base so the averaged
  // map keeps full column rank and the conditioning stays moderate.
  Matrix base = rng.gaussian_matrix(q, p);
  if (q >= p) {
    Eigen::HouseholderQR<Matrix> qr(base);
    Matrix qfull = qr.householderQ();
    base = qfull.leftCols(p);
  }
  A_.reserve(static_cast<std::size_t>(m));
  b_.reserve(static_cast<std::size_t>(m));
  for (std::int64_t j = 0; j < m; ++j) {
    A_.push_back(base + 0.1 * rng.gaussian_matrix(q, p));
    b_.push_back(0.1 * rng.gaussian_vector(q));
  }
  c_.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) c_.push_back(rng.gaussian_vector(q));

  MeanAccumulator a_acc, b_acc, c_acc;
  for (const auto& a : A_) a_acc.add(a);
  for (const auto& b : b_) b_acc.add(b);
  for (const auto& c : c_) c_acc.add(c);
  a_bar_ = a_acc.mean();
  b_bar_ = b_acc.mean();
  c_bar_ = c_acc.mean();

  long double csq = 0.0L;
  for (const auto& c : c_) csq += static_cast<long double>(c.squaredNorm());
  const_term_ = static_cast<double>(csq / (2.0L * static_cast<long double>(n)));

  const Matrix normal = a_bar_.transpose() * a_bar_;
  Eigen::SelfAdjointEigenSolver<Matrix> es(normal);
  const double lambda_min = es.eigenvalues().minCoeff();
  if (lambda_min <= 1e-8) {
    throw NumericError("ToyQuadratic: singular construction; use another seed");
  }
  mu_f_ = (1.0 + mu_) * lambda_min;

  // stationarity: (1+mu) Abar'Abar x* = Abar' (cbar - (1+mu) bbar)
  const Vector rhs = a_bar_.transpose() * (c_bar_ - (1.0 + mu_) * b_bar_);
  x_star_ = ((1.0 + mu_) * normal).ldlt().solve(rhs);

  double bound = 0.0;
  for (const auto& a : A_) {
    Eigen::JacobiSVD<Matrix> svd(a);
    bound = std::max(bound, svd.singularValues()[0]);
  }
  jac_bound_ = bound;
  f_star_ = direct_objective(x_star_);
}

Vector ToyQuadratic::inner_value(std::int64_t j, const Vector& x) const {
  return A_[static_cast<std::size_t>(j)] * x + b_[static_cast<std::size_t>(j)];
}

Matrix ToyQuadratic::inner_jacobian(std::int64_t j, const Vector& /*x*/) const {
  return A_[static_cast<std::size_t>(j)];
}

Vector ToyQuadratic::outer_gradient(std::int64_t i, const Vector& y) const {
  return (1.0 + mu_) * y - c_[static_cast<std::size_t>(i)];
}

double ToyQuadratic::outer_value(std::int64_t i, const Vector& y) const {
  const Vector& c = c_[static_cast<std::size_t>(i)];
  return 0.5 * (y - c).squaredNorm() + 0.5 * mu_ * y.squaredNorm();
}

double ToyQuadratic::direct_objective(const Vector& x) const {
  const Vector y = a_bar_ * x + b_bar_;
  return 0.5 * (1.0 + mu_) * y.squaredNorm() - c_bar_.dot(y) + const_term_;
}

std::unique_ptr<ToyQuadratic> make_toy_quadratic(std::int64_t m, std::int64_t n,
                                                 Eigen::Index p, Eigen::Index q,
                                                 double mu, std::uint64_t seed) {
  return std::make_unique<ToyQuadratic>(m, n, p, q, mu, seed);
}

}  // namespace csag
