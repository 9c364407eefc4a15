#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace loggas::num {

// Thrown when an adaptive routine exhausts its budget before reaching the
// requested tolerance. Carries the best estimate so callers can decide
// whether the partial answer is still usable.
class AccuracyError : public std::runtime_error {
 public:
  AccuracyError(const std::string& what, double estimate_, double error_bound_)
      : std::runtime_error(what), estimate(estimate_), error_bound(error_bound_) {}
  double estimate;
  double error_bound;
};

// Complete elliptic integrals at modulus k together with the pair at the
// complementary modulus kc = sqrt(1-k^2). K is +infinity at k == 1, Kc at
// k == 0. Near the logarithmic singularity (complementary modulus below
// 1.5e-4, i.e. modulus within ~1e-8 of 1) a log-series branch replaces the
// AGM iteration; both agree to machine precision at the switch point.
struct EllipticQuartet {
  double K;
  double E;
  double Kc;
  double Ec;
};

EllipticQuartet elliptic_quartet(double k);

// K and E alone at modulus k, where kc is the accurately computed
// complementary modulus. Passing kc explicitly keeps the k -> 1 direction
// meaningful when 1-k underflows in double (e.g. modulus sqrt(1-k^2) for
// tiny k).
void elliptic_ke(double k, double kc, double& K, double& E);

// Truncated series p_k(x) = sum_{j=0..k} (-1/2)_j x^j / j! with the rising
// factorial (a)_j. p_0 = 1, p_1(x) = 1 - x/2, p_2(x) = 1 - x/2 - x^2/8.
double p_k_poly(int k, double x);

struct QuadratureSpec {
  double lower = 0;
  double upper = 0;
  // Integrable endpoint behaviour: the integrand may blow up like
  // (x - lower)^left_exponent near the left end, exponent in (-1, 0], and
  // correspondingly on the right. 0 means bounded (possibly log-singular,
  // which the adaptive subdivision absorbs without substitution).
  double left_exponent = 0;
  double right_exponent = 0;
  double rel_tol = 1e-10;
};

// Adaptive Gauss-Kronrod 7-15 over [lower, upper]. Endpoint power
// singularities are removed by the substitution x = lower + h*u^(1/(1+e))
// on each half, after which the transformed integrand is bounded. The
// endpoints themselves are never evaluated. Throws AccuracyError if the
// subdivision budget runs out before the tolerance is met.
//
// Conditioning caveat: when a singular endpoint sits at a nonzero
// coordinate, f is necessarily evaluated at points whose distance to the
// endpoint is itself a rounded quantity. Exponents down to about -0.6 still
// reach ~1e-10 relative accuracy; deeper exponents saturate earlier (e.g.
// -0.75 at ~1e-7) and must be given a correspondingly looser rel_tol. A
// singular endpoint at 0 has no such limit.
double quad_singular(const std::function<double(double)>& f, const QuadratureSpec& spec);

// Brent bracket root solve on [lo, hi]; requires a sign change. tol is a
// relative bracket-width target. Returns the iterate with the smaller
// residual.
double find_root(const std::function<double(double)>& f, double lo, double hi,
                 double tol = 1e-12);

}  // namespace loggas::num
