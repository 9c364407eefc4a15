#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#ifdef LOGGAS_HAVE_EIGEN
#include <Eigen/Eigenvalues>
#endif

#include "json.hpp"
#include "loggas/asymptotics.hpp"
#include "loggas/ensemble_mc.hpp"

using namespace loggas;

namespace {

double sample_mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_var(const std::vector<double>& v) {
  const double m = sample_mean(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

}  // namespace

TEST_CASE("stream determinism and substream independence") {
  mc::Rng a(42, 7), b(42, 7), c(42, 8);
  bool all_equal = true, any_equal_to_other = false;
  for (int i = 0; i < 64; ++i) {
    const auto va = a.next_u64();
    if (va != b.next_u64()) all_equal = false;
    if (va == c.next_u64()) any_equal_to_other = true;
  }
  CHECK(all_equal);
  CHECK_FALSE(any_equal_to_other);
}

TEST_CASE("uniform, normal, gamma, chi moments") {
  mc::Rng r(123);
  const int n = 200000;
  std::vector<double> u(n), g(n), gm(n), gs(n);
  for (int i = 0; i < n; ++i) {
    u[i] = r.next_uniform();
    g[i] = r.next_normal();
    gm[i] = r.next_gamma(2.5);
    gs[i] = r.next_gamma(0.5);
  }
  CHECK(sample_mean(u) == doctest::Approx(0.5).epsilon(0.01));
  CHECK(std::abs(sample_mean(g)) < 0.01);
  CHECK(sample_var(g) == doctest::Approx(1.0).epsilon(0.02));
  CHECK(sample_mean(gm) == doctest::Approx(2.5).epsilon(0.02));
  CHECK(sample_var(gm) == doctest::Approx(2.5).epsilon(0.05));
  CHECK(sample_mean(gs) == doctest::Approx(0.5).epsilon(0.03));
  // chi squared with k degrees of freedom has mean k
  std::vector<double> c2(n / 4);
  for (auto& x : c2) {
    const double c = r.next_chi(3.0);
    x = c * c;
  }
  CHECK(sample_mean(c2) == doctest::Approx(3.0).epsilon(0.03));
  CHECK_THROWS_AS(r.next_gamma(0.0), std::domain_error);
  CHECK_THROWS_AS(r.next_chi(-1.0), std::domain_error);
}

TEST_CASE("single-site gaussian ensemble has variance 1/beta") {
  for (double beta : {1.0, 2.5}) {
    mc::EnsembleSpec spec{mc::Kind::gaussian, 1, beta, 0};
    std::vector<double> v(100000);
    for (std::size_t i = 0; i < v.size(); ++i) {
      mc::Rng r(11, i);
      v[i] = mc::sample_gaussian(spec, r).diag[0];
    }
    CAPTURE(beta);
    CHECK(std::abs(sample_mean(v)) < 3.0 / std::sqrt(beta * v.size()));
    CHECK(sample_var(v) == doctest::Approx(1 / beta).epsilon(0.03));
  }
}

TEST_CASE("two-site gaussian ensemble matches a dense construction") {
  // both samplers target the joint density with weight exp(-x^2) at
  // beta = 2, so the mean of the top eigenvalue squared must agree
  const int n = 100000;
  std::vector<double> tri(n), dense(n);
  mc::EnsembleSpec spec{mc::Kind::gaussian, 2, 2.0, 0};
  for (int i = 0; i < n; ++i) {
    mc::Rng r(21, static_cast<std::uint64_t>(i));
    const auto T = mc::sample_gaussian(spec, r);
    const double mid = (T.diag[0] + T.diag[1]) / 2;
    const double rad = std::sqrt((T.diag[0] - T.diag[1]) *
                                     (T.diag[0] - T.diag[1]) / 4 +
                                 T.off[0] * T.off[0]);
    tri[i] = (mid + rad) * (mid + rad);

    mc::Rng q(22, static_cast<std::uint64_t>(i));
    const double d1 = q.next_normal() / std::sqrt(2.0);
    const double d2 = q.next_normal() / std::sqrt(2.0);
    const double re = q.next_normal() / 2;
    const double im = q.next_normal() / 2;
    const double m2 = (d1 + d2) / 2;
    const double r2 = std::sqrt((d1 - d2) * (d1 - d2) / 4 + re * re + im * im);
    dense[i] = (m2 + r2) * (m2 + r2);
  }
  const double se = std::sqrt(sample_var(tri) / n + sample_var(dense) / n);
  CHECK(std::abs(sample_mean(tri) - sample_mean(dense)) < 3 * se);
}

TEST_CASE("semicircle bulk and edge at sqrt(2N)") {
  const int N = 200, n = 10000;
  mc::EnsembleSpec spec{mc::Kind::gaussian, N, 2.0, 0};
  const double edge = std::sqrt(2.0 * N);
  const std::vector<double> us = {-0.9, -0.6, -0.3, 0.0, 0.3, 0.6, 0.9};
  std::vector<double> fhat(us.size(), 0.0);
  for (int i = 0; i < n; ++i) {
    mc::Rng r(31, static_cast<std::uint64_t>(i));
    const auto T = mc::sample_gaussian(spec, r);
    for (std::size_t k = 0; k < us.size(); ++k)
      fhat[k] += mc::sturm_count_below(T, us[k] * edge);
  }
  double sup = 0;
  constexpr double kPi = 3.14159265358979323846;
  for (std::size_t k = 0; k < us.size(); ++k) {
    const double u = us[k];
    const double want = 0.5 + (u * std::sqrt(1 - u * u) + std::asin(u)) / kPi;
    sup = std::max(sup, std::abs(fhat[k] / (double(n) * N) - want));
  }
  CHECK(sup < 0.05);
}

TEST_CASE("gaussian spectrum is symmetric about zero") {
  const int N = 50, n = 2000;
  mc::EnsembleSpec spec{mc::Kind::gaussian, N, 1.0, 0};
  std::vector<double> below(n);
  for (int i = 0; i < n; ++i) {
    mc::Rng r(41, static_cast<std::uint64_t>(i));
    below[i] = mc::sturm_count_below(mc::sample_gaussian(spec, r), 0.0);
  }
  const double se = std::sqrt(sample_var(below) / n);
  CHECK(std::abs(sample_mean(below) - N / 2.0) < 4 * se);
}

TEST_CASE("single-site laguerre at a=0, beta=2 is standard exponential") {
  mc::EnsembleSpec spec{mc::Kind::laguerre, 1, 2.0, 0};
  const int n = 100000;
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) {
    mc::Rng r(51, static_cast<std::uint64_t>(i));
    v[i] = mc::sample_laguerre(spec, r).diag[0];
  }
  std::sort(v.begin(), v.end());
  double ks = 0;
  for (int i = 0; i < n; ++i) {
    const double F = 1 - std::exp(-v[i]);
    ks = std::max(ks, std::max(F - double(i) / n, double(i + 1) / n - F));
  }
  CHECK(ks < 0.01);
}

TEST_CASE("laguerre tridiagonal entries replay the bidiagonal identity") {
  mc::EnsembleSpec spec{mc::Kind::laguerre, 2, 3.0, 0.5};
  mc::Rng r(5, 3);
  const auto T = mc::sample_laguerre(spec, r);
  mc::Rng q(5, 3);
  const double x0 = q.next_chi(3.0 * 0.5 + 3.0 * 1 + 2);
  const double x1 = q.next_chi(3.0 * 0.5 + 2);
  const double y0 = q.next_chi(3.0 * 1);
  CHECK(T.diag[0] == x0 * x0 / 3.0);
  CHECK(T.diag[1] == (x1 * x1 + y0 * y0) / 3.0);
  CHECK(T.off[0] == x0 * y0 / 3.0);
}

TEST_CASE("gaussian draw order replays") {
  mc::EnsembleSpec spec{mc::Kind::gaussian, 3, 2.0, 0};
  mc::Rng r(6, 9);
  const auto T = mc::sample_gaussian(spec, r);
  mc::Rng q(6, 9);
  const double root2 = std::sqrt(2.0);
  const double d0 = q.next_normal() / root2;
  const double d1 = q.next_normal() / root2;
  const double d2 = q.next_normal() / root2;
  const double o0 = q.next_chi(4.0) / 2;
  const double o1 = q.next_chi(2.0) / 2;
  CHECK(T.diag == std::vector<double>{d0, d1, d2});
  CHECK(T.off == std::vector<double>{o0, o1});
}

TEST_CASE("sturm counting on hand matrices") {
  mc::Tridiag flip{{0.0, 0.0}, {1.0}};  // eigenvalues -1 and 1
  CHECK(mc::sturm_count_below(flip, -2.0) == 0);
  CHECK(mc::sturm_count_below(flip, -1.0) == 0);  // strict
  CHECK(mc::sturm_count_below(flip, -0.999) == 1);
  CHECK(mc::sturm_count_below(flip, 0.0) == 1);
  CHECK(mc::sturm_count_below(flip, 1.0) == 1);  // zero pivot resolves upward
  CHECK(mc::sturm_count_below(flip, 1.001) == 2);
  CHECK(mc::sturm_count_below(flip, 5.0) == 2);

  mc::Tridiag diag{{1.0, 2.0, 3.0}, {0.0, 0.0}};
  CHECK(mc::sturm_count_below(diag, 2.5) == 2);
  CHECK(mc::sturm_count_below(diag, 0.0) == 0);
  CHECK(mc::sturm_count_below(diag, 100.0) == 3);
  CHECK_THROWS_AS(
      mc::sturm_count_below(diag, std::numeric_limits<double>::infinity()),
      std::domain_error);
}

#ifdef LOGGAS_HAVE_EIGEN
TEST_CASE("sturm counts equal dense eigensolver counts") {
  const int N = 12;
  int trials_checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    mc::Rng r(61, static_cast<std::uint64_t>(trial));
    mc::EnsembleSpec spec{trial % 2 ? mc::Kind::gaussian : mc::Kind::laguerre,
                          N, 1.0 + (trial % 3), 0.25 * (trial % 4)};
    const auto T = trial % 2 ? mc::sample_gaussian(spec, r)
                             : mc::sample_laguerre(spec, r);
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(N, N);
    for (int i = 0; i < N; ++i) M(i, i) = T.diag[i];
    for (int i = 0; i + 1 < N; ++i) M(i, i + 1) = M(i + 1, i) = T.off[i];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M,
                                                      Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    const double lo = ev(0) - 1, hi = ev(N - 1) + 1;
    bool ok = true;
    for (int k = 0; k < 20; ++k) {
      const double x = lo + (hi - lo) * r.next_uniform();
      int dense = 0;
      for (int i = 0; i < N; ++i) dense += ev(i) < x;
      if (mc::sturm_count_below(T, x) != dense) ok = false;
    }
    if (ok) ++trials_checked;
  }
  CHECK(trials_checked == 1000);
}
#endif

TEST_CASE("window thresholds match the edge scalings") {
  mc::EnsembleSpec lag{mc::Kind::laguerre, 100, 2.0, 0};
  mc::EnsembleSpec gau{mc::Kind::gaussian, 100, 2.0, 0};
  CHECK(mc::window_threshold({mc::Edge::hard, 2.0}, lag) == 2.0 / 400);
  CHECK(mc::window_threshold({mc::Edge::soft, -1.5}, gau) ==
        doctest::Approx(std::sqrt(200.0) -
                        1.5 / (std::sqrt(2.0) * std::pow(100.0, 1.0 / 6)))
            .epsilon(1e-15));
  CHECK(mc::window_threshold({mc::Edge::soft, -1.0}, lag) ==
        doctest::Approx(400 - 2 * std::cbrt(200.0)).epsilon(1e-15));
  CHECK_THROWS_AS(mc::window_threshold({mc::Edge::hard, -1.0}, lag),
                  std::domain_error);
}

TEST_CASE("window counts: usage guards and trivial cases") {
  mc::EnsembleSpec gau{mc::Kind::gaussian, 4, 2.0, 0};
  mc::EnsembleSpec lag{mc::Kind::laguerre, 4, 2.0, 0};
  mc::Rng r(71);
  const auto G = mc::sample_gaussian(gau, r);
  const auto L = mc::sample_laguerre(lag, r);
  CHECK_THROWS_AS(mc::count_in_window(G, {mc::Edge::hard, 1.0}, gau),
                  std::invalid_argument);
  CHECK(mc::count_in_window(L, {mc::Edge::hard, 0.0}, lag) == 0);
  // threshold far below the spectrum puts everything in the soft window
  CHECK(mc::count_in_window(G, {mc::Edge::soft, -1e5}, gau) == 4);
  CHECK(mc::count_in_window(L, {mc::Edge::soft, -1e5}, lag) == 4);
}

TEST_CASE("windows nest: counts are monotone per sample") {
  mc::EnsembleSpec lag{mc::Kind::laguerre, 20, 1.0, 0.3};
  mc::EnsembleSpec gau{mc::Kind::gaussian, 20, 2.0, 0};
  for (int i = 0; i < 200; ++i) {
    mc::Rng r(81, static_cast<std::uint64_t>(i));
    const auto L = mc::sample_laguerre(lag, r);
    const int c1 = mc::count_in_window(L, {mc::Edge::hard, 1.0}, lag);
    const int c2 = mc::count_in_window(L, {mc::Edge::hard, 2.0}, lag);
    const int c4 = mc::count_in_window(L, {mc::Edge::hard, 4.0}, lag);
    CHECK(c1 <= c2);
    CHECK(c2 <= c4);

    mc::Rng q(82, static_cast<std::uint64_t>(i));
    const auto G = mc::sample_gaussian(gau, q);
    CHECK(mc::count_in_window(G, {mc::Edge::soft, -2.0}, gau) >=
          mc::count_in_window(G, {mc::Edge::soft, -1.0}, gau));
  }
}

TEST_CASE("run_mc histogram completeness and degenerate plan") {
  mc::EnsembleSpec spec{mc::Kind::laguerre, 10, 2.0, 0};
  mc::McPlan plan;
  plan.samples = 1;
  plan.seed = 3;
  plan.t_grid = {1.0};
  plan.n_max = 2;
  auto r = mc::run_mc(spec, mc::Edge::hard, plan);
  REQUIRE(r.grid.size() == 1);
  REQUIRE(r.grid[0].counts.size() == 4);
  std::uint64_t sum = 0;
  for (auto c : r.grid[0].counts) sum += c;
  CHECK(sum == 1);
  for (double p : r.grid[0].p_hat) CHECK((p == 0.0 || p == 1.0));
  CHECK(r.complete);
  CHECK(r.samples_done == 1);

  plan.samples = 2000;
  plan.t_grid = {1.0, 4.0, 16.0};
  auto big = mc::run_mc(spec, mc::Edge::hard, plan);
  for (const auto& row : big.grid) {
    std::uint64_t s = 0;
    double ps = 0;
    for (auto c : row.counts) s += c;
    for (double p : row.p_hat) ps += p;
    CHECK(s == 2000);
    CHECK(ps == doctest::Approx(1.0).epsilon(1e-12));
  }
  // gap probability shrinks as the window widens
  CHECK(big.grid[0].p_hat[0] >= big.grid[1].p_hat[0]);
  CHECK(big.grid[1].p_hat[0] >= big.grid[2].p_hat[0]);
}

TEST_CASE("run_mc is deterministic and worker-count independent") {
  mc::EnsembleSpec spec{mc::Kind::gaussian, 12, 2.0, 0};
  mc::McPlan plan;
  plan.samples = 5000;
  plan.seed = 97;
  plan.t_grid = {-2.0, -1.0, 0.5};
  plan.n_max = 3;
  const auto r1 = mc::run_mc(spec, mc::Edge::soft, plan);
  const auto r2 = mc::run_mc(spec, mc::Edge::soft, plan);
  CHECK(mc::report_csv(r1) == mc::report_csv(r2));
#ifdef _OPENMP
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const auto serial = mc::run_mc(spec, mc::Edge::soft, plan);
  omp_set_num_threads(2);
  const auto dual = mc::run_mc(spec, mc::Edge::soft, plan);
  omp_set_num_threads(saved);
  CHECK(mc::report_csv(serial) == mc::report_csv(dual));
  CHECK(mc::report_csv(serial) == mc::report_csv(r1));
#endif
}

TEST_CASE("run_mc respects the wall-clock budget") {
  mc::EnsembleSpec spec{mc::Kind::laguerre, 30, 2.0, 0};
  mc::McPlan plan;
  plan.samples = 1000000000000ull;
  plan.seed = 1;
  plan.t_grid = {1.0};
  plan.n_max = 1;
  plan.max_seconds = 0.05;
  const auto r = mc::run_mc(spec, mc::Edge::hard, plan);
  CHECK_FALSE(r.complete);
  CHECK(r.samples_done > 0);
  CHECK(r.samples_done < plan.samples);
  std::uint64_t sum = 0;
  for (auto c : r.grid[0].counts) sum += c;
  CHECK(sum == r.samples_done);
  CHECK_THROWS_AS(mc::compare_mc_asym(r, {asym::hard_expansion(2, 0, 0)}),
                  std::invalid_argument);
}

TEST_CASE("hard-edge gap law at moderate size") {
  // the a=0 empty-window probability is exp(-t/4) for laguerre beta=2 at
  // any matrix size, so a medium run must land within binomial error
  mc::EnsembleSpec spec{mc::Kind::laguerre, 40, 2.0, 0};
  mc::McPlan plan;
  plan.samples = 20000;
  plan.seed = 2024;
  plan.t_grid = {1.0, 2.0};
  plan.n_max = 3;
  const auto r = mc::run_mc(spec, mc::Edge::hard, plan);
  for (const auto& row : r.grid) {
    const double want = std::exp(-row.t / 4);
    CAPTURE(row.t);
    CHECK(std::abs(row.p_hat[0] - want) < 3 * row.std_err[0]);
  }
}

TEST_CASE("report serialization carries the run") {
  mc::EnsembleSpec spec{mc::Kind::laguerre, 8, 1.5, 0.5};
  mc::McPlan plan;
  plan.samples = 100;
  plan.seed = 5;
  plan.t_grid = {1.0, 3.0};
  plan.n_max = 2;
  const auto r = mc::run_mc(spec, mc::Edge::hard, plan);

  const auto j = nlohmann::json::parse(mc::report_json(r));
  CHECK(j["spec"]["kind"] == "laguerre");
  CHECK(j["spec"]["N"] == 8);
  CHECK(j["spec"]["beta"] == 1.5);
  CHECK(j["edge"] == "hard");
  CHECK(j["plan"]["samples"] == 100);
  CHECK(j["grid"].size() == 2);
  CHECK(j["grid"][0]["counts"].size() == 4);
  std::uint64_t sum = 0;
  for (const auto& c : j["grid"][0]["counts"]) sum += c.get<std::uint64_t>();
  CHECK(sum == 100);
  CHECK(j["complete"] == true);
  CHECK(j["samples_done"] == 100);
  CHECK(j["grid"][0]["p_hat"][0].get<double>() ==
        r.grid[0].p_hat[0]);  // 17 digits round-trip

  const auto csv = mc::report_csv(r);
  CHECK(csv.find("t,n,count,p_hat,stderr\n") != std::string::npos);
  CHECK(csv.find("wall") == std::string::npos);
  std::size_t lines = 0;
  for (char ch : csv) lines += ch == '\n';
  CHECK(lines == 2 + 1 + 2 * 4);  // two comments, header, grid rows
}

TEST_CASE("fit recovers a synthetic cubic law to four digits") {
  std::vector<double> x, y, var;
  for (double t : {-20.0, -24.0, -28.0, -32.0}) {
    const double at = std::abs(t);
    x.push_back(at * at * at);
    y.push_back(-at * at * at / 12 - std::log(at) / 8);
    var.push_back(1e-6);
  }
  const auto f = mc::fit_line(x, y, var);
  CHECK(f.points_used == 4);
  CHECK(std::abs(f.slope - (-1.0 / 12)) < 1e-4 * (1.0 / 12));
  CHECK(f.slope_stderr > 0);
  CHECK(f.slope_stderr < 1e-3);

  const auto degenerate = mc::fit_line({1.0}, {2.0}, {});
  CHECK(degenerate.points_used == 1);
  CHECK(std::isnan(degenerate.slope));
}

namespace {

mc::McReport synthetic_soft_report(const std::vector<double>& t_grid,
                                   const std::vector<asym::Expansion>& per_n) {
  mc::McReport r;
  r.spec = {mc::Kind::gaussian, 200, 2.0, 0};
  r.edge = mc::Edge::soft;
  r.plan.samples = 100000;
  r.plan.seed = 1;
  r.plan.t_grid = t_grid;
  r.plan.n_max = static_cast<int>(per_n.size()) - 1;
  r.samples_done = 100000;
  r.complete = true;
  for (double t : t_grid) {
    mc::McGridRow row;
    row.t = t;
    const std::size_t nb = per_n.size() + 1;
    row.counts.assign(nb, 0);
    row.p_hat.assign(nb, 0.0);
    row.std_err.assign(nb, 0.0);
    for (std::size_t n = 0; n < per_n.size(); ++n)
      row.p_hat[n] = std::exp(asym::evaluate(per_n[n], std::abs(t)));
    r.grid.push_back(row);
  }
  return r;
}

}  // namespace

TEST_CASE("comparison of a report that matches the table exactly") {
  const std::vector<asym::Expansion> per_n = {asym::soft_expansion(2, 0),
                                              asym::soft_expansion(2, 1)};
  const auto r = synthetic_soft_report({-2.0, -3.0}, per_n);
  const auto c = mc::compare_mc_asym(r, per_n);
  REQUIRE(c.rows.size() == 4);
  for (const auto& row : c.rows) {
    CHECK_FALSE(row.excluded);
    CHECK(std::abs(row.difference) < 1e-12);
  }
  CHECK(c.leading_power == 3.0);
}

TEST_CASE("comparison fit through the full path recovers the leading slope") {
  const std::vector<asym::Expansion> per_n = {asym::soft_expansion(2, 0)};
  const auto r = synthetic_soft_report({-6.0, -8.0, -10.0, -12.0}, per_n);
  const auto c = mc::compare_mc_asym(r, per_n);
  CHECK(c.gap_fit.points_used == 4);
  CHECK(std::abs(c.gap_fit.slope - (-1.0 / 12)) < 0.01 * (1.0 / 12));
}

TEST_CASE("comparison excludes empty cells from rows and fit") {
  const std::vector<asym::Expansion> per_n = {asym::soft_expansion(2, 0)};
  auto r = synthetic_soft_report({-2.0, -3.0, -4.0}, per_n);
  r.grid[1].p_hat[0] = 0.0;  // no surviving samples in this cell
  const auto c = mc::compare_mc_asym(r, per_n);
  REQUIRE(c.rows.size() == 3);
  CHECK_FALSE(c.rows[0].excluded);
  CHECK(c.rows[1].excluded);
  CHECK(std::isnan(c.rows[1].log_p_hat));
  CHECK_FALSE(c.rows[2].excluded);
  CHECK(c.gap_fit.points_used == 2);
}
