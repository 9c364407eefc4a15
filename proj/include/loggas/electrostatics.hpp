#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include "loggas/numerics.hpp"

// Continuum electrostatics of a log-gas conditioned to hold a prescribed
// charge n inside a gap next to a spectrum edge. Two edge geometries:
//
//  hard: background density 1/(2*pi*sqrt(x)) on x > 0, gap (0, t), the
//        conditioned charge piles into a blob (0, b) with b < t;
//  soft: background density sqrt(x)/pi on x > 0, gap (0, t), the blob
//        occupies (b1, b2) with b1 = t/2 - d, b2 = t/2 + d.
//
// Fields are resolvent-like: real z is always interpreted as the boundary
// value from the upper half plane (x + i0), which the principal complex
// sqrt delivers automatically. On conductor intervals Re E vanishes
// identically in floating point; the gap carries Re E = -dphi/dx.
namespace loggas::gas {

// A requested gap charge exceeds what the geometry can hold.
class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(const std::string& what, double requested_, double limit_)
      : std::runtime_error(what), requested(requested_), limit(limit_) {}
  double requested;
  double limit;
};

struct HardProblem {
  double beta = 2;  // log-gas inverse temperature, > 0
  double n = 0;     // conditioned charge in the gap, real, >= 0
  double a = 0;     // charge carried by the hard wall at the origin, >= 0
  double t = 1;     // outer gap endpoint, > 0
};

struct HardSolution {
  double b;             // blob endpoint solving the charge constraint
  double v;             // potential drop across the depleted zone (b, t)
  double V1;            // blob self-energy: -v*n/2 + (t - b)/8
  double V1_boundary;   // wall coupling -a' * v with a' = (a-1)/2 + 1/beta
  double a_prime;
  double V2_corrected;  // entropy term (1/beta - 1/2) * v
  double V2_legacy;     // historical half-weight variant
  double delta_F;       // V1 + V1_boundary + V2_corrected
  double delta_F_legacy;
  double log_E;         // -beta * delta_F
  double log_E_legacy;
  double n_max;         // capacity sqrt(t)/pi of the full blob
};

// Resolvent field (i/(2 sqrt(z))) * (1 - sqrt((z-b)/(z-t))).
// Branch cuts (-inf, 0] and [b, t]; real z means x + i0. Throws
// std::domain_error at z == t and on the nonphysical axis Re z <= 0,
// Im z == 0.
std::complex<double> hard_field(std::complex<double> z, double b, double t);

// Conditioned one-point density: the blob profile on (0, b), zero on the
// depleted zone [b, t), the outer profile beyond t.
double hard_density(double x, double b, double t);

// Charge held by the blob (0, b); equals (sqrt(t)/pi) * (E - (1-k^2) K) at
// modulus k = sqrt(b/t). Increases from 0 at b = 0 to sqrt(t)/pi at b = t.
double hard_count(double b, double t);

// Potential drop v across (b, t); sqrt(t) at b = 0, decreasing to 0 at
// b = t.
double hard_drop(double b, double t);

HardSolution hard_solve(const HardProblem& p, double tol_root = 1e-12);

struct EntropyCheck {
  double quadrature;
  double closed_form;
  double difference;
};

// Legacy entropy normalization evaluated two independent ways: the defining
// density-weighted integral over both conductor regions, and the closed
// form (1/beta - 1/2) v / 2. beta == 2 short-circuits to zeros.
EntropyCheck hard_legacy_entropy(double b, double t, double beta,
                                 double rel_tol = 1e-10);

struct SoftProblem {
  double beta = 2;
  double n = 0;
  double t = 1;  // gap size, > 0; the edge sits at 0 in these coordinates
};

struct SoftSolution {
  double d;  // half-separation of the blob, in (0, t/2]
  double b1;
  double b2;
  double v;             // drop across (b2, t)
  double V1;            // -v*n/2 + (t^3/24) (1 - 4 d^2/t^2)
  double V2_corrected;  // (1/beta - 1/2) * v
  double V2_legacy;     // (1/beta - 1/2) (v + drop across (0, b1)) / 2
  double delta_F;       // V1 + V2_corrected
  double delta_F_legacy;
  double log_E;
  double log_E_legacy;
  double n_max;  // capacity (2/(3 pi)) t^(3/2)
};

// Field i (sqrt(z) - sqrt(z-b1) sqrt(z-b2) / sqrt(z-t)). The factor-wise
// principal roots confine the nontrivial cut to [b1, b2] plus the axis cut
// of sqrt(z). Real z is x + i0; throws std::domain_error at z == t.
std::complex<double> soft_field(std::complex<double> z, double d, double t);

double soft_density(double x, double d, double t);

// Blob charge between b1 and b2. Uses the complementary-modulus elliptic
// form when the blob is wide; for small d a series in kc^2 = 2d/b2 avoids
// the cancellation that kills the direct form (leading term d^2/(2
// sqrt(b2))).
double soft_count(double d, double t);

// Drop across (b2, t): (2/3) sqrt(b2) [t E - 2 d K] at modulus
// k = sqrt(b1/b2), rearranged for small k where t E - 2 d K loses digits.
double soft_drop(double d, double t);

SoftSolution soft_solve(const SoftProblem& p, double tol_root = 1e-12);

// (pi/2)(1 - u^2) for u in [0, 1]; the closed form of the gap-weighted
// moment integral that feeds the soft V1 term.
double lemma2_H(double u);

// Soft-edge legacy entropy. Only d == 0 has a closed form; for d > 0 both
// reported values are the drop-based evaluation and difference is NaN.
EntropyCheck soft_legacy_entropy(double d, double t, double beta,
                                 double rel_tol = 1e-10);

// ---- one-parameter family of backgrounds c x^(k - 1/2), k = 0, 1, ... ----
// k = 0 with c = 1/(2 pi) is the hard geometry, k = 1 with c = 1/pi the
// soft one; higher k interpolates multicritical edges.

struct GeneralAlphaProblem {
  int k = 0;
  double c = 1.0;
  double t = 1.0;
  double beta = 2.0;
};

// Coefficient multiplying z^alpha in the pure-background field:
// c * (-pi cot(pi alpha) + i pi). Exactly i pi c at half-integer alpha.
// alpha must not be an integer (cot pole) and must exceed -1.
std::complex<double> background_field_coeff(double alpha, double c);

// Field of the empty-gap problem: pi i c z^alpha (1 - sqrt(z/(z-t))
// p_k(t/z)) with alpha = k - 1/2. Same boundary-value convention as the
// edge fields.
std::complex<double> general_field(std::complex<double> z, int k, double c,
                                   double t);

// Leading free-energy shift of the empty gap: closed hypergeometric-type
// sum (pi c^2 / (2k+1)) t^(2k+1) * S_k.
double general_V1(const GeneralAlphaProblem& p);

// Same quantity from the field route (c / (2(alpha+1))) * integral over the
// gap of x^(alpha+1) dphi/dx, with dphi/dx = -Re E(x + i0).
double general_V1_quadrature(const GeneralAlphaProblem& p,
                             double rel_tol = 1e-10);

double general_logE0(const GeneralAlphaProblem& p);

}  // namespace loggas::gas
