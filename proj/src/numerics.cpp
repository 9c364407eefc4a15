#include "loggas/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace loggas::num {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Below this complementary modulus the AGM is replaced by the log series.
constexpr double kLogBranch = 1.5e-4;

}  // namespace

void elliptic_ke(double k, double kc, double& K, double& E) {
  if (kc == 0.0) {
    K = std::numeric_limits<double>::infinity();
    E = 1.0;
    return;
  }
  if (kc < kLogBranch) {
    const double l = std::log(4.0 / kc);
    const double kc2 = kc * kc;
    K = l + 0.25 * kc2 * (l - 1.0);
    E = 1.0 + 0.5 * kc2 * (l - 0.5);
    return;
  }
  double a = 1.0;
  double b = kc;
  double sum = 0.5 * k * k;
  double pw = 0.5;
  for (int i = 0; i < 60; ++i) {
    const double c = 0.5 * (a - b);
    const double an = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = an;
    pw *= 2.0;
    sum += pw * c * c;
    if (c < 1e-17 * a) break;
  }
  K = kPi / (2.0 * a);
  E = K * (1.0 - sum);
}

EllipticQuartet elliptic_quartet(double k) {
  if (!(k >= 0.0 && k <= 1.0))
    throw std::domain_error("elliptic_quartet: modulus must lie in [0, 1]");
  const double kc = std::sqrt((1.0 - k) * (1.0 + k));
  EllipticQuartet q;
  elliptic_ke(k, kc, q.K, q.E);
  elliptic_ke(kc, k, q.Kc, q.Ec);
  return q;
}

double p_k_poly(int k, double x) {
  if (k < 0) throw std::domain_error("p_k_poly: order must be nonnegative");
  double term = 1.0;
  double sum = 1.0;
  for (int j = 1; j <= k; ++j) {
    term *= x * (j - 1.5) / j;
    sum += term;
  }
  return sum;
}

namespace {

// Gauss-Kronrod 7-15 nodes and weights (nonnegative abscissae; the rule is
// symmetric). Gauss points sit at indices 1, 3, 5, 7.
constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
constexpr double kWg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

struct GkResult {
  double integral;
  double error;
  double resabs;
};

GkResult gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double resk = kWgk[7] * fc;
  double resg = kWg[3] * fc;
  double resabs = std::abs(resk);
  double fv1[7], fv2[7];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    fv1[j] = f(c - dx);
    fv2[j] = f(c + dx);
    const double fsum = fv1[j] + fv2[j];
    resk += kWgk[j] * fsum;
    resabs += kWgk[j] * (std::abs(fv1[j]) + std::abs(fv2[j]));
    if (j % 2 == 1) resg += kWg[j / 2] * fsum;
  }
  const double reskh = 0.5 * resk;
  double resasc = kWgk[7] * std::abs(fc - reskh);
  for (int j = 0; j < 7; ++j)
    resasc += kWgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));
  const double ah = std::abs(h);
  if (!std::isfinite(resk))
    throw AccuracyError(
        "quad_singular: integrand not finite; endpoint exponent too extreme "
        "to resolve in double precision",
        resk * h, std::numeric_limits<double>::infinity());
  GkResult r;
  r.integral = resk * h;
  r.resabs = resabs * ah;
  resasc *= ah;
  double err = std::abs((resk - resg) * h);
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  const double eps50 = 50.0 * std::numeric_limits<double>::epsilon();
  if (r.resabs > std::numeric_limits<double>::min() / eps50)
    err = std::max(eps50 * r.resabs, err);
  r.error = err;
  return r;
}

struct Segment {
  double a, b, val, err;
  bool operator<(const Segment& o) const { return err < o.err; }
};

double adapt_gk(const std::function<double(double)>& f, double a, double b,
                double rel_tol) {
  constexpr int kMaxSegments = 4000;
  std::priority_queue<Segment> heap;
  GkResult r0 = gk15(f, a, b);
  double total = r0.integral;
  double total_err = r0.error;
  double total_resabs = r0.resabs;
  heap.push({a, b, r0.integral, r0.error});
  int n = 1;
  const double eps50 = 50.0 * std::numeric_limits<double>::epsilon();
  while (true) {
    const double bound =
        std::max(rel_tol * std::abs(total), 1e-305);
    if (total_err <= bound) return total;
    if (total_err <= eps50 * total_resabs) return total;  // round-off floor
    if (n >= kMaxSegments) break;
    Segment s = heap.top();
    heap.pop();
    const double m = 0.5 * (s.a + s.b);
    if (m <= s.a || m >= s.b) {
      // interval no longer splittable; put it back and give up if it
      // dominates the error
      heap.push(s);
      break;
    }
    GkResult r1 = gk15(f, s.a, m);
    GkResult r2 = gk15(f, m, s.b);
    total += r1.integral + r2.integral - s.val;
    total_err += r1.error + r2.error - s.err;
    total_resabs += r1.resabs + r2.resabs;  // monotone overestimate is fine
    heap.push({s.a, m, r1.integral, r1.error});
    heap.push({m, s.b, r2.integral, r2.error});
    ++n;
  }
  throw AccuracyError("quad_singular: tolerance not reached within budget",
                      total, total_err);
}

}  // namespace

double quad_singular(const std::function<double(double)>& f,
                     const QuadratureSpec& spec) {
  if (!(spec.upper >= spec.lower) || !std::isfinite(spec.lower) ||
      !std::isfinite(spec.upper))
    throw std::domain_error("quad_singular: bad interval");
  if (!(spec.left_exponent > -1.0 && spec.left_exponent <= 0.0) ||
      !(spec.right_exponent > -1.0 && spec.right_exponent <= 0.0))
    throw std::domain_error("quad_singular: endpoint exponents must lie in (-1, 0]");
  if (!(spec.rel_tol > 0.0))
    throw std::domain_error("quad_singular: rel_tol must be positive");
  if (spec.upper == spec.lower) return 0.0;

  const double mid = 0.5 * (spec.lower + spec.upper);
  const double tol = 0.5 * spec.rel_tol;

  double left;
  if (spec.left_exponent == 0.0) {
    left = adapt_gk(f, spec.lower, mid, tol);
  } else {
    const double h = mid - spec.lower;
    const double p = 1.0 / (1.0 + spec.left_exponent);
    const double lo = spec.lower;
    auto g = [&f, h, p, lo](double u) {
      return f(lo + h * std::pow(u, p)) * h * p * std::pow(u, p - 1.0);
    };
    left = adapt_gk(g, 0.0, 1.0, tol);
  }

  double right;
  if (spec.right_exponent == 0.0) {
    right = adapt_gk(f, mid, spec.upper, tol);
  } else {
    const double h = spec.upper - mid;
    const double p = 1.0 / (1.0 + spec.right_exponent);
    const double hi = spec.upper;
    auto g = [&f, h, p, hi](double u) {
      return f(hi - h * std::pow(u, p)) * h * p * std::pow(u, p - 1.0);
    };
    right = adapt_gk(g, 0.0, 1.0, tol);
  }
  return left + right;
}

double find_root(const std::function<double(double)>& f, double lo, double hi,
                 double tol) {
  if (!(lo < hi)) throw std::invalid_argument("find_root: need lo < hi");
  if (!(tol > 0.0)) throw std::invalid_argument("find_root: tol must be positive");
  double a = lo, b = hi;
  double fa = f(a), fb = f(b);
  if (!std::isfinite(fa) || !std::isfinite(fb))
    throw std::invalid_argument("find_root: endpoint values not finite");
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0))
    throw std::invalid_argument("find_root: no sign change on bracket");

  double c = a, fc = fa;
  double d = b - a, e = d;
  const double eps = std::numeric_limits<double>::epsilon();
  for (int iter = 0; iter < 200; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    const double tol1 = 2.0 * eps * std::abs(b) + 0.5 * tol * std::max(1.0, std::abs(b));
    const double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || fb == 0.0) return b;
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      double p, q;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        const double qa = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
        q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    if (std::abs(d) > tol1)
      b += d;
    else
      b += (xm > 0.0 ? tol1 : -tol1);
    fb = f(b);
  }
  return b;
}

}  // namespace loggas::num
