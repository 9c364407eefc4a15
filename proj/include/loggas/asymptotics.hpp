#pragma once

#include <vector>

namespace loggas::asym {

// One term of a large-gap expansion of log E(n; t): coeff times t^power, or
// coeff times log t when log_factor is set (power is zero in that case).
struct Term {
  double power = 0;
  bool log_factor = false;
  double coeff = 0;
};

// Terms in descending order. The series is asymptotic as t grows and stops
// at the log order for the edge tables, at the constant order for the bulk
// table; orders below that are not claimed.
struct Expansion {
  std::vector<Term> terms;
};

// Coefficient tables for the conditioned gap probabilities. They are
// polynomial in n and a, so those arguments are unrestricted reals; beta
// must be positive.
Expansion hard_expansion(double beta, double n, double a);
Expansion soft_expansion(double beta, double n);

// Bulk gap of scaled length t against a constant background of density rho.
// The n == 0 table differs structurally from n > 0 (the constant order
// carries log rho respectively log(4 pi rho / n) + 1), so n == 0 dispatches
// exactly; n must be nonnegative.
Expansion bulk_expansion(double beta, double n, double rho);

double evaluate(const Expansion& e, double t);

// Largest mismatch across comparable orders of the beta <-> 4/beta
// parameter map, which reproduces the same table up to a fixed rescaling of
// t. The constant order is not comparable (the rescaling leaks the log
// coefficient into it), so only the shared orders enter. Exact algebra
// gives zero; floating point gives round-off. The mismatch is scaled by the
// largest coefficient magnitude of the table, so a clean implementation
// stays near 1e-16.
double hard_duality_residual(double beta, double n, double a);
double soft_duality_residual(double beta, double n);

// Mismatch of the beta = 2 table against the sum of two beta = 1 tables at
// shifted arguments, over the same shared orders and with the same scaling.
double hard_factorization_residual(double n, double a);
double soft_factorization_residual(double n);

}  // namespace loggas::asym
