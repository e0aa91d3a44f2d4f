#ifndef CSAG_THEORY_HPP
#define CSAG_THEORY_HPP

#include <cstdint>

namespace csag {

/// Problem and algorithm constants entering the convergence bound:
/// strong-convexity modulus of the composed objective, uniform bound on
/// inner Jacobian norms, Lipschitz constant of outer component gradients,
/// component counts, mini-batch size and step size.
struct TheoryInputs {
  double mu_f = 1.0;
  double jacobian_bound = 1.0;   // B_G
  double outer_lipschitz = 1.0;  // L_F
  std::int64_t m = 1;
  std::int64_t n = 1;
  std::int64_t batch = 1;        // a
  double alpha = 0.1;

  void validate() const;
};

struct SigmaConstants {
  double sigma1 = 0.0;
  double sigma2 = 0.0;
};

struct ContractionBound {
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double ratio = 0.0;    // gamma1 / gamma2; NaN when the bound is vacuous
  bool vacuous = false;  // gamma2 <= 0: the bound says nothing
};

struct CorollaryThresholds {
  double batch_min = 0.0;   // a must exceed this
  double alpha1 = 0.0;      // step size must stay below min(alpha1..alpha3)
  double alpha2 = 0.0;
  double alpha3 = 0.0;      // +inf when batch == m (that branch is inactive)
  double period_min = 0.0;  // K must exceed this
  bool feasible = false;    // all three step thresholds positive
};

struct TheoryOutputs {
  SigmaConstants sigma;
  ContractionBound bound;
  CorollaryThresholds thresholds;
};

/// The two aggregate constants of the epoch contraction bound.
SigmaConstants sigma_constants(const TheoryInputs& in);

/// Numerator/denominator of the per-epoch contraction factor for a given
/// refresh period K. A non-positive denominator is flagged, not an error.
ContractionBound contraction_ratio(const TheoryInputs& in, double period);

/// Parameter thresholds under which the contraction factor drops below 3/4.
CorollaryThresholds corollary_params(const TheoryInputs& in);

TheoryOutputs evaluate_theory(const TheoryInputs& in, double period);

}  // namespace csag

#endif  // CSAG_THEORY_HPP
