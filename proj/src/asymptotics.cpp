#include "loggas/asymptotics.hpp"

#include <cmath>
#include <stdexcept>

namespace loggas::asym {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_beta(double beta) {
  if (!(beta > 0.0)) throw std::domain_error("beta must be positive");
}

// Residual of a term-by-term comparison, scaled by the largest coefficient
// of the reference table. Per-order relative error would blow up on orders
// whose coefficient vanishes identically while round-off leaves a 1e-17
// residue on the other side.
double table_mismatch(const Expansion& ref, const std::vector<double>& other) {
  double scale = 0, worst = 0;
  for (const auto& t : ref.terms) scale = std::max(scale, std::abs(t.coeff));
  for (std::size_t i = 0; i < other.size(); ++i)
    worst = std::max(worst, std::abs(ref.terms[i].coeff - other[i]));
  return worst / scale;
}

}  // namespace

Expansion hard_expansion(double beta, double n, double a) {
  check_beta(beta);
  Expansion e;
  e.terms.push_back({1.0, false, -beta / 8});
  e.terms.push_back({0.5, false, beta * (n + a / 2)});
  const double bracket =
      n * n / 2 + n * a / 2 + a * (a - 1) / 4 + a / (2 * beta);
  e.terms.push_back({0.0, true, -(beta / 2) * bracket});
  return e;
}

Expansion soft_expansion(double beta, double n) {
  check_beta(beta);
  Expansion e;
  e.terms.push_back({3.0, false, -beta / 24});
  e.terms.push_back({1.5, false, std::sqrt(2.0) / 3 * (beta * n + beta / 2 - 1)});
  const double q = 1 - beta / 2;
  const double c_log = -0.75 * (beta * n * n / 2 + (beta / 2 - 1) * n) -
                       0.125 * (1 - (2 / beta) * q * q);
  e.terms.push_back({0.0, true, c_log});
  return e;
}

Expansion bulk_expansion(double beta, double n, double rho) {
  check_beta(beta);
  if (!(rho > 0.0)) throw std::domain_error("rho must be positive");
  if (!(n >= 0.0)) throw std::domain_error("n must be nonnegative");
  Expansion e;
  e.terms.push_back({2.0, false, -beta * kPi * kPi * rho * rho / 16});
  if (n == 0.0) {
    e.terms.push_back({1.0, false, (beta / 2 - 1) * kPi * rho / 2});
    const double c_log = 0.25 * (beta / 2 + 2 / beta - 3);
    e.terms.push_back({0.0, true, c_log});
    e.terms.push_back({0.0, false, c_log * std::log(rho)});
  } else {
    e.terms.push_back({1.0, false, (beta * n + beta / 2 - 1) * kPi * rho / 2});
    const double c_log = n / 2 * (1 - beta / 2 - beta * n / 2);
    e.terms.push_back({0.0, true, c_log});
    e.terms.push_back({0.0, false, c_log * (std::log(4 * kPi * rho / n) + 1)});
  }
  return e;
}

double evaluate(const Expansion& e, double t) {
  if (!(t > 0.0) || !std::isfinite(t))
    throw std::domain_error("expansion variable must be positive");
  double sum = 0;
  for (const auto& term : e.terms)
    sum += term.coeff * (term.log_factor ? std::log(t) : std::pow(t, term.power));
  return sum;
}

double hard_duality_residual(double beta, double n, double a) {
  const auto e = hard_expansion(beta, n, a);
  const auto d = hard_expansion(4 / beta, beta * (n + 1) / 2 - 1,
                                beta * a / 2 - beta + 2);
  const double s = beta / 2;
  return table_mismatch(e, {d.terms[0].coeff * s * s, d.terms[1].coeff * s,
                            d.terms[2].coeff});
}

double soft_duality_residual(double beta, double n) {
  const auto e = soft_expansion(beta, n);
  const auto d = soft_expansion(4 / beta, beta * n / 2 + beta / 2 - 1);
  const double s = beta / 2;
  return table_mismatch(e, {d.terms[0].coeff * s * s, d.terms[1].coeff * s,
                            d.terms[2].coeff});
}

double hard_factorization_residual(double n, double a) {
  const auto e = hard_expansion(2, n, a);
  const auto r = hard_expansion(1, n, a - 1);
  const auto q = hard_expansion(1, n + 1, a - 1);
  return table_mismatch(e, {r.terms[0].coeff + q.terms[0].coeff,
                            r.terms[1].coeff + q.terms[1].coeff,
                            r.terms[2].coeff + q.terms[2].coeff});
}

double soft_factorization_residual(double n) {
  const auto e = soft_expansion(2, n);
  const auto r = soft_expansion(1, n);
  const auto q = soft_expansion(1, n + 1);
  return table_mismatch(e, {r.terms[0].coeff + q.terms[0].coeff,
                            r.terms[1].coeff + q.terms[1].coeff,
                            r.terms[2].coeff + q.terms[2].coeff});
}

}  // namespace loggas::asym
