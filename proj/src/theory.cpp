#include "csag/theory.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace csag {

namespace {

struct Terms {
  double m, n, a, alpha, mu, b4l2;  // b4l2 = B_G^4 * L_F^2
  double poly1;   // (m-1)^2 (1-1/n)(n+2) + (n-1)(4m-3)
  double coeff1;  // (m-1)^2 (1-1/n)^2 + (1-1/n)^2
  double poly2;   // (m-1)^2 (2n-1) + n + 4n(m-1)
  double coeff2;  // (1-1/m)^2 m + 16(m-a)
};

Terms expand(const TheoryInputs& in) {
  Terms t;
  t.m = static_cast<double>(in.m);
  t.n = static_cast<double>(in.n);
  t.a = static_cast<double>(in.batch);
  t.alpha = in.alpha;
  t.mu = in.mu_f;
  const double b2 = in.jacobian_bound * in.jacobian_bound;
  t.b4l2 = b2 * b2 * in.outer_lipschitz * in.outer_lipschitz;
  const double m1 = t.m - 1.0;
  const double n_frac = 1.0 - 1.0 / t.n;
  const double m_frac = 1.0 - 1.0 / t.m;
  t.poly1 = m1 * m1 * n_frac * (t.n + 2.0) + (t.n - 1.0) * (4.0 * t.m - 3.0);
  t.coeff1 = m1 * m1 * n_frac * n_frac + n_frac * n_frac;
  t.poly2 = m1 * m1 * (2.0 * t.n - 1.0) + t.n + 4.0 * t.n * m1;
  t.coeff2 = m_frac * m_frac * t.m + 16.0 * (t.m - t.a);
  return t;
}

}  // namespace

void TheoryInputs::validate() const {
  if (!(mu_f > 0.0) || !(jacobian_bound > 0.0) || !(outer_lipschitz > 0.0))
    throw std::invalid_argument("theory inputs: constants must be positive");
  if (m < 1 || n < 1) throw std::invalid_argument("theory inputs: m, n must be >= 1");
  if (batch < 1 || batch > m)
    throw std::invalid_argument("theory inputs: batch must lie in [1, m]");
  if (!(alpha > 0.0)) throw std::invalid_argument("theory inputs: alpha must be > 0");
}

SigmaConstants sigma_constants(const TheoryInputs& in) {
  in.validate();
  const Terms t = expand(in);
  SigmaConstants s;
  s.sigma1 = 9.0 * t.alpha * t.alpha * t.poly1 + 16.0 * t.alpha * t.n * t.coeff1 / t.mu;
  s.sigma2 = 9.0 * t.alpha * t.alpha / t.m * t.poly2 +
             16.0 * t.alpha * t.coeff2 / (t.m * t.m * t.mu);
  return s;
}

ContractionBound contraction_ratio(const TheoryInputs& in, double period) {
  in.validate();
  if (!(period >= 1.0))
    throw std::invalid_argument("contraction_ratio: period must be >= 1");
  const Terms t = expand(in);
  const SigmaConstants s = sigma_constants(in);
  const double batch_frac = t.a / t.m;

  ContractionBound b;
  b.gamma1 = 1.0 / period +
             (t.n * s.sigma1 + 3.0 * t.m * (1.0 - batch_frac * batch_frac) * s.sigma2) *
                 t.b4l2;
  b.gamma2 = t.alpha * t.mu -
             (32.0 * t.alpha * (t.m - t.a) / (t.m * t.mu) +
              3.0 * t.a * (2.0 - batch_frac) * s.sigma2) *
                 t.b4l2;
  b.vacuous = !(b.gamma2 > 0.0);
  b.ratio = b.vacuous ? std::numeric_limits<double>::quiet_NaN() : b.gamma1 / b.gamma2;
  return b;
}

CorollaryThresholds corollary_params(const TheoryInputs& in) {
  in.validate();
  const Terms t = expand(in);
  CorollaryThresholds c;

  c.batch_min = t.m * (1.0 - t.mu * t.mu / (128.0 * t.b4l2));

  const double mem_drag = 16.0 * t.coeff2 / (t.m * t.m * t.mu);
  c.alpha1 = t.m *
             (t.mu / (12.0 * t.a * (2.0 - t.a / t.m) * t.b4l2) - mem_drag) /
             (9.0 * t.poly2);
  c.alpha2 = (t.mu / (8.0 * t.n * t.b4l2) - 16.0 * t.n * t.coeff1 / t.mu) /
             (9.0 * t.poly1);
  const double slack = 1.0 - (t.a / t.m) * (t.a / t.m);
  if (slack <= 0.0) {
    // full batch: the term this threshold guards is identically zero
    c.alpha3 = std::numeric_limits<double>::infinity();
  } else {
    c.alpha3 = t.m * (t.mu / (24.0 * t.m * slack * t.b4l2) - mem_drag) /
               (9.0 * t.poly2);
  }
  c.period_min = 8.0 / (in.alpha * t.mu);

  // n = 1 zeroes the sigma1 contribution entirely, so the alpha2
  // constraint (otherwise 0/0 here) is inactive.
  if (t.poly1 == 0.0) c.alpha2 = std::numeric_limits<double>::infinity();

  c.feasible = c.alpha1 > 0.0 && c.alpha2 > 0.0 && c.alpha3 > 0.0;
  return c;
}

TheoryOutputs evaluate_theory(const TheoryInputs& in, double period) {
  TheoryOutputs out;
  out.sigma = sigma_constants(in);
  out.bound = contraction_ratio(in, period);
  out.thresholds = corollary_params(in);
  return out;
}

}  // namespace csag
