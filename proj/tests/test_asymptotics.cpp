#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "loggas/asymptotics.hpp"
#include "loggas/electrostatics.hpp"

using namespace loggas;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("hard expansion structure and pinned samples") {
  auto e = asym::hard_expansion(4, 1, 1);
  REQUIRE(e.terms.size() == 3);
  CHECK(e.terms[0].power == 1.0);
  CHECK_FALSE(e.terms[0].log_factor);
  CHECK(e.terms[1].power == 0.5);
  CHECK(e.terms[2].log_factor);
  CHECK(e.terms[0].coeff == -0.5);
  CHECK(e.terms[1].coeff == 6.0);
  CHECK(e.terms[2].coeff == -2.25);

  auto d = asym::hard_expansion(1, 3, 0);
  CHECK(d.terms[0].coeff == -0.125);
  CHECK(d.terms[1].coeff == 3.0);
  CHECK(d.terms[2].coeff == -2.25);

  CHECK_THROWS_AS(asym::hard_expansion(0, 0, 0), std::domain_error);
  CHECK_THROWS_AS(asym::hard_expansion(-1, 0, 0), std::domain_error);
}

TEST_CASE("hard expansion log coefficient at beta = 2") {
  for (double n : {0.0, 1.0, 2.5}) {
    for (double a : {0.0, 0.5, 2.0}) {
      auto e = asym::hard_expansion(2, n, a);
      const double want = -(n * n / 2 + n * a / 2 + a * a / 4);
      CHECK(e.terms[2].coeff == doctest::Approx(want).epsilon(1e-15));
    }
  }
}

TEST_CASE("soft expansion structure and pinned samples") {
  auto e = asym::soft_expansion(2, 0);
  REQUIRE(e.terms.size() == 3);
  CHECK(e.terms[0].power == 3.0);
  CHECK(e.terms[1].power == 1.5);
  CHECK(e.terms[2].log_factor);
  CHECK(e.terms[0].coeff == -1.0 / 12);
  CHECK(e.terms[1].coeff == 0.0);
  CHECK(e.terms[2].coeff == -0.125);

  auto f = asym::soft_expansion(4, 0);
  CHECK(f.terms[0].coeff == -1.0 / 6);
  CHECK(f.terms[1].coeff == std::sqrt(2.0) / 3);
  CHECK(f.terms[2].coeff == -0.0625);

  CHECK_THROWS_AS(asym::soft_expansion(0, 0), std::domain_error);
}

TEST_CASE("bulk expansion tables") {
  auto e = asym::bulk_expansion(2, 0, 0.7);
  REQUIRE(e.terms.size() == 4);
  CHECK(e.terms[0].power == 2.0);
  CHECK(e.terms[0].coeff ==
        doctest::Approx(-(kPi * 0.7) * (kPi * 0.7) / 8).epsilon(1e-15));
  CHECK(e.terms[1].coeff == 0.0);
  CHECK(e.terms[2].log_factor);
  CHECK(e.terms[2].coeff == -0.25);
  CHECK_FALSE(e.terms[3].log_factor);
  CHECK(e.terms[3].coeff == doctest::Approx(-0.25 * std::log(0.7)).epsilon(1e-15));

  auto f = asym::bulk_expansion(2, 1, 2.0);
  CHECK(f.terms[1].coeff == doctest::Approx(2 * kPi).epsilon(1e-15));
  CHECK(f.terms[2].coeff == -0.5);
  CHECK(f.terms[3].coeff ==
        doctest::Approx(-0.5 * (std::log(8 * kPi) + 1)).epsilon(1e-15));

  CHECK_THROWS_AS(asym::bulk_expansion(2, 0, 0), std::domain_error);
  CHECK_THROWS_AS(asym::bulk_expansion(2, -1, 1), std::domain_error);
}

TEST_CASE("evaluate sums the declared orders") {
  asym::Expansion e;
  e.terms.push_back({1.0, false, 2.0});
  e.terms.push_back({0.0, true, 3.0});
  const double t = std::exp(1.0);
  CHECK(asym::evaluate(e, t) == doctest::Approx(2 * t + 3).epsilon(1e-15));
  CHECK_THROWS_AS(asym::evaluate(e, 0.0), std::domain_error);
  CHECK_THROWS_AS(asym::evaluate(e, -2.0), std::domain_error);
}

TEST_CASE("duality residuals vanish to round-off") {
  for (double beta : {0.5, 1.0, 2.0, 2.5, 4.0}) {
    for (double n : {0.0, 0.7, 1.0, 2.5}) {
      CAPTURE(beta);
      CAPTURE(n);
      CHECK(asym::soft_duality_residual(beta, n) < 1e-13);
      for (double a : {0.0, 0.5, 1.0, 3.0}) {
        CAPTURE(a);
        CHECK(asym::hard_duality_residual(beta, n, a) < 1e-13);
      }
    }
  }
}

TEST_CASE("factorization residuals vanish to round-off") {
  for (double n : {0.0, 0.7, 1.0, 2.5}) {
    CAPTURE(n);
    CHECK(asym::soft_factorization_residual(n) < 1e-13);
    for (double a : {0.0, 0.5, 1.0, 3.0}) {
      CAPTURE(a);
      CHECK(asym::hard_factorization_residual(n, a) < 1e-13);
    }
  }
}

TEST_CASE("empty hard gap: table evaluation equals the solver exactly") {
  for (double beta : {0.5, 1.0, 2.0, 4.0}) {
    for (double t : {1e3, 1e5}) {
      auto ex = asym::hard_expansion(beta, 0, 0);
      auto s = gas::hard_solve({beta, 0.0, 0.0, t});
      CHECK(s.log_E == asym::evaluate(ex, t));
    }
  }
}

TEST_CASE("hard solver agrees with the table through the log order at a = 0") {
  // at a = 0 the full log coefficient is charge driven, so the difference
  // between solver and table must level off to a constant
  for (double beta : {1.0, 2.0, 4.0}) {
    for (double n : {1.0, 2.0}) {
      auto ex = asym::hard_expansion(beta, n, 0);
      auto diff = [&](double t) {
        return gas::hard_solve({beta, n, 0.0, t}).log_E -
               asym::evaluate(ex, t);
      };
      const double step = std::abs(diff(1e6) - diff(1e5));
      CAPTURE(beta);
      CAPTURE(n);
      CHECK(step < 0.02 * (1 + n * n));
      CHECK(step < std::abs(diff(1e4) - diff(1e3)));
    }
  }
}

TEST_CASE("hard solver resolves all but the charge-independent log piece") {
  // with a wall charge the table carries a log t piece that does not depend
  // on n; the solver difference must grow with exactly that slope
  for (double beta : {1.0, 2.0, 4.0}) {
    for (double n : {0.0, 1.0}) {
      for (double a : {1.0, 1.5}) {
        auto ex = asym::hard_expansion(beta, n, a);
        auto diff = [&](double t) {
          return gas::hard_solve({beta, n, a, t}).log_E -
                 asym::evaluate(ex, t);
        };
        const double slope = (diff(1e6) - diff(1e5)) / std::log(10.0);
        const double want = beta * a * (a - 1) / 8 + a / 4;
        CAPTURE(beta);
        CAPTURE(n);
        CAPTURE(a);
        CHECK(std::abs(slope - want) < 0.01);
      }
    }
  }
}

TEST_CASE("soft solver resolves all but the charge-independent log piece") {
  for (double beta : {1.0, 2.0, 4.0}) {
    for (double n : {0.0, 1.0, 2.0}) {
      auto ex = asym::soft_expansion(beta, n);
      auto diff = [&](double t) {
        return gas::soft_solve({beta, n, t}).log_E - asym::evaluate(ex, t);
      };
      const double slope = (diff(300.0) - diff(100.0)) / std::log(3.0);
      const double q = 1 - beta / 2;
      const double want = 0.125 * (1 - (2 / beta) * q * q);
      CAPTURE(beta);
      CAPTURE(n);
      CHECK(std::abs(slope - want) < 0.01);
    }
  }
}
