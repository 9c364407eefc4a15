#include "loggas/electrostatics.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>

namespace loggas::gas {

namespace {

constexpr double kPi = 3.14159265358979323846;
using cplx = std::complex<double>;

std::string fmt_infeasible(const char* edge, double n, double nmax) {
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "%s gap cannot hold n = %.17g; capacity is %.17g", edge, n,
                nmax);
  return buf;
}

void check_hard_bt(double b, double t, const char* who) {
  if (!(t > 0.0) || !std::isfinite(t))
    throw std::domain_error(std::string(who) + ": t must be positive");
  if (!(b >= 0.0 && b <= t))
    throw std::domain_error(std::string(who) + ": need 0 <= b <= t");
}

void check_soft_dt(double d, double t, const char* who) {
  if (!(t > 0.0) || !std::isfinite(t))
    throw std::domain_error(std::string(who) + ": t must be positive");
  if (!(d >= 0.0 && d <= 0.5 * t))
    throw std::domain_error(std::string(who) + ": need 0 <= d <= t/2");
}

}  // namespace

std::complex<double> hard_field(std::complex<double> z, double b, double t) {
  check_hard_bt(b, t, "hard_field");
  if (z == cplx(t, 0.0) || (z.imag() == 0.0 && z.real() == t))
    throw std::domain_error("hard_field: z == t is a singular point");
  if (z.imag() == 0.0 && z.real() <= 0.0)
    throw std::domain_error("hard_field: nonphysical axis Re z <= 0");
  const cplx r = std::sqrt((z - b) / (z - t));
  return cplx(0.0, 1.0) / (2.0 * std::sqrt(z)) * (1.0 - r);
}

double hard_density(double x, double b, double t) {
  check_hard_bt(b, t, "hard_density");
  if (!(x > 0.0)) throw std::domain_error("hard_density: x must be positive");
  if (x == t) throw std::domain_error("hard_density: singular at x == t");
  if (x < b) return std::sqrt((b - x) / (x * (t - x))) / (2.0 * kPi);
  if (x <= t) return 0.0;
  return std::sqrt((x - b) / (x * (x - t))) / (2.0 * kPi);
}

double hard_count(double b, double t) {
  check_hard_bt(b, t, "hard_count");
  if (b == 0.0) return 0.0;
  if (b == t) return std::sqrt(t) / kPi;
  const double k = std::sqrt(b / t);
  const double kc2 = (t - b) / t;
  const double kc = std::sqrt(kc2);
  double K, E;
  num::elliptic_ke(k, kc, K, E);
  return std::sqrt(t) / kPi * (E - kc2 * K);
}

double hard_drop(double b, double t) {
  check_hard_bt(b, t, "hard_drop");
  if (b == 0.0) return std::sqrt(t);
  if (b == t) return 0.0;
  // complementary orientation: modulus sqrt(1 - b/t), complement sqrt(b/t)
  const double m = std::sqrt((t - b) / t);
  const double mc = std::sqrt(b / t);
  double Kp, Ep;
  num::elliptic_ke(m, mc, Kp, Ep);
  return std::sqrt(t) * (Ep - (b / t) * Kp);
}

HardSolution hard_solve(const HardProblem& p, double tol_root) {
  if (!(p.beta > 0.0)) throw std::domain_error("hard_solve: beta must be positive");
  if (!(p.t > 0.0)) throw std::domain_error("hard_solve: t must be positive");
  if (!(p.n >= 0.0)) throw std::domain_error("hard_solve: n must be >= 0");
  if (!(p.a >= 0.0)) throw std::domain_error("hard_solve: a must be >= 0");

  HardSolution s;
  s.n_max = std::sqrt(p.t) / kPi;
  if (p.n == 0.0) {
    s.b = 0.0;
  } else {
    const double b_hi = p.t * (1.0 - 1e-12);
    if (p.n >= hard_count(b_hi, p.t))
      throw InfeasibleError(fmt_infeasible("hard", p.n, s.n_max), p.n, s.n_max);
    const double t = p.t, n = p.n;
    s.b = num::find_root([t, n](double b) { return hard_count(b, t) - n; }, 0.0,
                         b_hi, tol_root);
  }
  s.v = hard_drop(s.b, p.t);
  s.V1 = -s.v * p.n / 2.0 + (p.t - s.b) / 8.0;
  s.a_prime = (p.a - 1.0) / 2.0 + 1.0 / p.beta;
  s.V1_boundary = -s.a_prime * s.v;
  const double c2 = 1.0 / p.beta - 0.5;
  s.V2_corrected = c2 * s.v;
  s.V2_legacy = 0.5 * c2 * s.v;
  // grouping matters: the boundary and entropy terms cancel exactly at
  // a == 0, and that cancellation must happen before V1 is added
  s.delta_F = s.V1 + (s.V1_boundary + s.V2_corrected);
  s.delta_F_legacy = s.V1 + (s.V1_boundary + s.V2_legacy);
  s.log_E = -p.beta * s.delta_F;
  s.log_E_legacy = -p.beta * s.delta_F_legacy;
  return s;
}

EntropyCheck hard_legacy_entropy(double b, double t, double beta,
                                 double rel_tol) {
  check_hard_bt(b, t, "hard_legacy_entropy");
  if (!(beta > 0.0))
    throw std::domain_error("hard_legacy_entropy: beta must be positive");
  const double c2 = 1.0 / beta - 0.5;
  if (beta == 2.0) return {0.0, 0.0, 0.0};

  double inner = 0.0;
  if (b > 0.0) {
    num::QuadratureSpec qs;
    qs.lower = 0.0;
    qs.upper = std::sqrt(b);
    qs.rel_tol = rel_tol;
    inner = num::quad_singular(
        [b, t](double x) {
          const double s = std::sqrt((b - x * x) / (t - x * x));
          return s == 0.0 ? 0.0 : s * std::log(s);
        },
        qs);
  }

  // Outer region folded to s in (0, 1) by x = sqrt(t)/s. The s -> 1 end is
  // integrated in the reflected variable w = 1 - s so the distance to the
  // singularity stays exactly representable (1 - s^2 = w(2-w)).
  const double r = b / t;
  num::QuadratureSpec qa;
  qa.lower = 0.0;
  qa.upper = 0.5;
  qa.rel_tol = rel_tol;
  const double outer_a = num::quad_singular(
      [r](double s) {
        const double s2 = s * s;
        const double lg = std::log1p(-r * s2) - std::log1p(-s2);
        return std::sqrt((1.0 - r * s2) / (1.0 - s2)) * lg / (2.0 * s2);
      },
      qa);
  num::QuadratureSpec qb;
  qb.lower = 0.0;
  qb.upper = 0.5;
  qb.left_exponent = -0.5;
  qb.rel_tol = rel_tol;
  const double outer_b = num::quad_singular(
      [r](double w) {
        const double s = 1.0 - w;
        const double s2 = s * s;
        const double lg =
            std::log1p(-r * s2) - std::log(w) - std::log(2.0 - w);
        return std::sqrt((1.0 - r * s2) / (w * (2.0 - w))) * lg / (2.0 * s2);
      },
      qb);
  const double outer = std::sqrt(t) * (outer_a + outer_b);

  EntropyCheck ec;
  ec.quadrature = c2 * (inner + outer) / kPi;
  ec.closed_form = c2 * hard_drop(b, t) / 2.0;
  ec.difference = ec.quadrature - ec.closed_form;
  return ec;
}

std::complex<double> soft_field(std::complex<double> z, double d, double t) {
  check_soft_dt(d, t, "soft_field");
  if (z.imag() == 0.0 && z.real() == t)
    throw std::domain_error("soft_field: z == t is a singular point");
  const double b1 = 0.5 * t - d;
  const double b2 = 0.5 * t + d;
  const cplx num_ = std::sqrt(z - b1) * std::sqrt(z - b2);
  return cplx(0.0, 1.0) * (std::sqrt(z) - num_ / std::sqrt(z - t));
}

double soft_density(double x, double d, double t) {
  check_soft_dt(d, t, "soft_density");
  if (!(x > 0.0)) throw std::domain_error("soft_density: x must be positive");
  if (x == t) throw std::domain_error("soft_density: singular at x == t");
  const double b1 = 0.5 * t - d;
  const double b2 = 0.5 * t + d;
  if (x > b1 && x < b2)
    return std::sqrt((x - b1) * (b2 - x) / (t - x)) / kPi;
  if (x > t) return std::sqrt((x - b1) * (x - b2) / (x - t)) / kPi;
  return 0.0;
}

double soft_count(double d, double t) {
  check_soft_dt(d, t, "soft_count");
  if (d == 0.0) return 0.0;
  const double b2 = 0.5 * t + d;
  if (d == 0.5 * t) return 2.0 / (3.0 * kPi) * t * std::sqrt(t);
  const double b1 = 0.5 * t - d;
  const double m = 2.0 * d / b2;  // kc^2
  if (m >= 0.5) {
    const double kc = std::sqrt(m);
    const double k = std::sqrt(b1 / b2);
    double Kp, Ep;
    num::elliptic_ke(kc, k, Kp, Ep);
    return 2.0 / (3.0 * kPi) * std::sqrt(b2) * (t * Ep - 2.0 * b1 * Kp);
  }
  // narrow blob: t E' - 2 b1 K' cancels to O(kc^4), so switch to the series
  // with a_j = ((2j-1)!!/(2j)!!)^2
  double a_prev = 0.25;    // a_1
  double a_cur = 9.0 / 64.0;  // a_2
  double mp = m * m;       // m^r
  double sum = 0.0;
  for (int r = 2; r < 200; ++r) {
    const double g = a_cur * (-2.0 / (2 * r - 1) - 2.0) +
                     a_prev * (2.0 + 1.0 / (2 * r - 3));
    const double term = g * mp;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum) && r > 4) break;
    mp *= m;
    a_prev = a_cur;
    const double j = r + 1;
    a_cur *= ((2 * j - 1) / (2 * j)) * ((2 * j - 1) / (2 * j));
  }
  return b2 * std::sqrt(b2) / 3.0 * sum;
}

double soft_drop(double d, double t) {
  check_soft_dt(d, t, "soft_drop");
  const double b1 = 0.5 * t - d;
  const double b2 = 0.5 * t + d;
  if (d == 0.0) return std::sqrt(2.0) / 3.0 * t * std::sqrt(t);
  if (d == 0.5 * t) return 0.0;
  const double k2 = b1 / b2;
  const double k = std::sqrt(k2);
  const double kc = std::sqrt(2.0 * d / b2);
  double K, E;
  num::elliptic_ke(k, kc, K, E);
  if (k2 > 0.5)  // wide separation, no cancellation in t E - 2 d K
    return 2.0 / 3.0 * std::sqrt(b2) * (t * E - 2.0 * d * K);
  return 2.0 / 3.0 * std::sqrt(b2) * (t * (E - K) + 2.0 * b1 * K);
}

namespace {

// drop of the outer potential across (0, b1); the legacy entropy needs it
double soft_drop01(double d, double t, double rel_tol) {
  const double b1 = 0.5 * t - d;
  const double b2 = 0.5 * t + d;
  if (d == 0.0) return (std::sqrt(2.0) - 1.0) / 3.0 * t * std::sqrt(t);
  if (b1 <= 0.0) return 0.0;
  num::QuadratureSpec qs;
  qs.lower = 0.0;
  qs.upper = b1;
  qs.rel_tol = rel_tol;
  return num::quad_singular(
      [b1, b2, t](double x) {
        return std::sqrt(b1 - x) * std::sqrt(b2 - x) / std::sqrt(t - x);
      },
      qs);
}

}  // namespace

SoftSolution soft_solve(const SoftProblem& p, double tol_root) {
  if (!(p.beta > 0.0)) throw std::domain_error("soft_solve: beta must be positive");
  if (!(p.t > 0.0)) throw std::domain_error("soft_solve: t must be positive");
  if (!(p.n >= 0.0)) throw std::domain_error("soft_solve: n must be >= 0");

  SoftSolution s;
  s.n_max = 2.0 / (3.0 * kPi) * p.t * std::sqrt(p.t);
  if (p.n == 0.0) {
    s.d = 0.0;
  } else {
    const double d_hi = 0.5 * p.t * (1.0 - 1e-12);
    if (p.n >= soft_count(d_hi, p.t))
      throw InfeasibleError(fmt_infeasible("soft", p.n, s.n_max), p.n, s.n_max);
    const double t = p.t, n = p.n;
    s.d = num::find_root([t, n](double d) { return soft_count(d, t) - n; }, 0.0,
                         d_hi, tol_root);
  }
  s.b1 = 0.5 * p.t - s.d;
  s.b2 = 0.5 * p.t + s.d;
  s.v = soft_drop(s.d, p.t);
  const double u = 2.0 * s.d / p.t;
  s.V1 = -s.v * p.n / 2.0 +
         p.t * p.t * p.t / 24.0 * (1.0 - u) * (1.0 + u);
  const double c2 = 1.0 / p.beta - 0.5;
  s.V2_corrected = c2 * s.v;
  s.V2_legacy = c2 * (s.v + soft_drop01(s.d, p.t, 1e-10)) / 2.0;
  s.delta_F = s.V1 + s.V2_corrected;
  s.delta_F_legacy = s.V1 + s.V2_legacy;
  s.log_E = -p.beta * s.delta_F;
  s.log_E_legacy = -p.beta * s.delta_F_legacy;
  return s;
}

double lemma2_H(double u) {
  if (!(u >= 0.0 && u <= 1.0))
    throw std::domain_error("lemma2_H: u must lie in [0, 1]");
  return kPi / 2.0 * (1.0 - u * u);
}

EntropyCheck soft_legacy_entropy(double d, double t, double beta,
                                 double rel_tol) {
  check_soft_dt(d, t, "soft_legacy_entropy");
  if (!(beta > 0.0))
    throw std::domain_error("soft_legacy_entropy: beta must be positive");
  if (beta == 2.0) return {0.0, 0.0, 0.0};
  const double c2 = 1.0 / beta - 0.5;

  if (d > 0.0) {
    const double value =
        c2 * (soft_drop(d, t) + soft_drop01(d, t, rel_tol)) / 2.0;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {value, nan, nan};
  }

  // Empty-gap case: closed form against the density-weighted integral,
  // folded to y in (0, 1) by x = 1/y. The y -> 1 end is handled in the
  // reflected variable w = 1 - y to keep sqrt(1-y) and log(1-y) exact.
  num::QuadratureSpec qa;
  qa.lower = 0.0;
  qa.upper = 0.5;
  qa.left_exponent = -0.5;
  qa.rel_tol = rel_tol;
  const double part_a = num::quad_singular(
      [](double y) {
        const double lg = std::log1p(-0.5 * y) - 0.5 * std::log1p(-y);
        return (2.0 - y) * lg /
               (2.0 * y * y * std::sqrt(y) * std::sqrt(1.0 - y));
      },
      qa);
  num::QuadratureSpec qb;
  qb.lower = 0.0;
  qb.upper = 0.5;
  qb.left_exponent = -0.5;
  qb.rel_tol = rel_tol;
  const double part_b = num::quad_singular(
      [](double w) {
        const double y = 1.0 - w;
        const double lg = std::log1p(-0.5 * y) - 0.5 * std::log(w);
        return (2.0 - y) * lg /
               (2.0 * y * y * std::sqrt(y) * std::sqrt(w));
      },
      qb);
  const double integral = part_a + part_b;
  EntropyCheck ec;
  ec.quadrature = c2 * t * std::sqrt(t) / kPi * integral;
  ec.closed_form = c2 * t * std::sqrt(t) / 3.0 * (std::sqrt(2.0) - 0.5);
  ec.difference = ec.quadrature - ec.closed_form;
  return ec;
}

std::complex<double> background_field_coeff(double alpha, double c) {
  if (!(alpha > -1.0))
    throw std::domain_error("background_field_coeff: alpha must exceed -1");
  if (!(c > 0.0))
    throw std::domain_error("background_field_coeff: c must be positive");
  const double two_alpha = 2.0 * alpha;
  if (two_alpha == std::round(two_alpha)) {
    const long la = static_cast<long>(std::lround(two_alpha));
    if (la % 2 == 0)
      throw std::domain_error(
          "background_field_coeff: integer alpha hits the cotangent pole");
    return {0.0, kPi * c};  // half-integer: exactly imaginary
  }
  const double cot = std::cos(kPi * alpha) / std::sin(kPi * alpha);
  return {-kPi * c * cot, kPi * c};
}

std::complex<double> general_field(std::complex<double> z, int k, double c,
                                   double t) {
  if (k < 0) throw std::domain_error("general_field: k must be >= 0");
  if (!(c > 0.0) || !(t > 0.0))
    throw std::domain_error("general_field: need c > 0 and t > 0");
  if (z.imag() == 0.0 && z.real() == t)
    throw std::domain_error("general_field: z == t is a singular point");
  if (z.imag() == 0.0 && z.real() <= 0.0)
    throw std::domain_error("general_field: nonphysical axis Re z <= 0");
  const double alpha = k - 0.5;
  const cplx za = std::pow(z, alpha);
  const cplx r = std::sqrt(z / (z - t));
  // p_k evaluated at t/z; safe since z != 0 here
  const cplx tz = t / z;
  cplx pk = 1.0, term = 1.0;
  for (int j = 1; j <= k; ++j) {
    term *= tz * ((j - 1.5) / j);
    pk += term;
  }
  return cplx(0.0, kPi * c) * za * (1.0 - r * pk);
}

double general_V1(const GeneralAlphaProblem& p) {
  if (p.k < 0 || p.k > 60)
    throw std::domain_error("general_V1: k out of supported range");
  if (!(p.c > 0.0) || !(p.t > 0.0))
    throw std::domain_error("general_V1: need c > 0 and t > 0");
  const int k = p.k;
  double S = 0.0;
  double poch = 1.0;  // (-1/2)_j / j!
  for (int j = 0; j <= k; ++j) {
    if (j > 0) poch *= (j - 1.5) / j;
    const double g = std::exp(std::lgamma(2 * k - j + 1.5) + std::lgamma(0.5) -
                              std::lgamma(2 * k - j + 2.0));
    S += g * poch;
  }
  return kPi * p.c * p.c / (2 * k + 1) * std::pow(p.t, 2 * k + 1) * S;
}

double general_V1_quadrature(const GeneralAlphaProblem& p, double rel_tol) {
  if (p.k < 0 || p.k > 60)
    throw std::domain_error("general_V1_quadrature: k out of supported range");
  if (!(p.c > 0.0) || !(p.t > 0.0))
    throw std::domain_error("general_V1_quadrature: need c > 0 and t > 0");
  const double alpha = p.k - 0.5;
  num::QuadratureSpec qs;
  qs.lower = 0.0;
  qs.upper = p.t;
  qs.right_exponent = -0.5;
  qs.rel_tol = rel_tol;
  const int k = p.k;
  const double c = p.c, t = p.t;
  const double integral = num::quad_singular(
      [k, c, t, alpha](double x) {
        const double dphi = -general_field(cplx(x, 0.0), k, c, t).real();
        return std::pow(x, alpha + 1.0) * dphi;
      },
      qs);
  return p.c / (2.0 * (alpha + 1.0)) * integral;
}

double general_logE0(const GeneralAlphaProblem& p) {
  if (!(p.beta > 0.0))
    throw std::domain_error("general_logE0: beta must be positive");
  return -p.beta * general_V1(p);
}

}  // namespace loggas::gas
