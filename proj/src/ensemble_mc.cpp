#include "loggas/ensemble_mc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace loggas::mc {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

void check_spec(const EnsembleSpec& spec) {
  if (spec.N < 1) throw std::domain_error("ensemble size must be at least 1");
  if (!(spec.beta > 0)) throw std::domain_error("beta must be positive");
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t x = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  for (auto& w : s_) w = splitmix64(x);
  if (!(s_[0] | s_[1] | s_[2] | s_[3])) s_[0] = 1;
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::next_uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::next_normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  double u, v, s;
  do {
    u = 2 * next_uniform() - 1;
    v = 2 * next_uniform() - 1;
    s = u * u + v * v;
  } while (s >= 1 || s == 0);
  const double m = std::sqrt(-2 * std::log(s) / s);
  cached_normal_ = v * m;
  has_cached_normal_ = true;
  return u * m;
}

double Rng::next_gamma(double shape) {
  if (!(shape > 0)) throw std::domain_error("gamma shape must be positive");
  if (shape < 1) {
    // boost to shape + 1, then scale back by a uniform power
    const double g = next_gamma(shape + 1);
    return g * std::pow(next_uniform(), 1 / shape);
  }
  const double d = shape - 1.0 / 3;
  const double c = 1 / std::sqrt(9 * d);
  for (;;) {
    double x, w;
    do {
      x = next_normal();
      w = 1 + c * x;
    } while (w <= 0);
    w = w * w * w;
    const double u = next_uniform();
    if (u < 1 - 0.0331 * x * x * x * x) return d * w;
    if (u > 0 && std::log(u) < 0.5 * x * x + d * (1 - w + std::log(w)))
      return d * w;
  }
}

double Rng::next_chi(double k) {
  if (!(k > 0)) throw std::domain_error("chi degrees of freedom must be positive");
  return std::sqrt(2 * next_gamma(k / 2));
}

Tridiag sample_gaussian(const EnsembleSpec& spec, Rng& rng) {
  check_spec(spec);
  const int N = spec.N;
  Tridiag T;
  T.diag.resize(N);
  T.off.resize(N - 1);
  const double root_beta = std::sqrt(spec.beta);
  for (int i = 0; i < N; ++i) T.diag[i] = rng.next_normal() / root_beta;
  for (int i = 0; i + 1 < N; ++i)
    T.off[i] = rng.next_chi(spec.beta * (N - 1 - i)) / std::sqrt(2 * spec.beta);
  return T;
}

Tridiag sample_laguerre(const EnsembleSpec& spec, Rng& rng) {
  check_spec(spec);
  if (!(spec.a >= 0))
    throw std::domain_error("laguerre exponent must be nonnegative");
  const int N = spec.N;
  std::vector<double> x(N), y(N > 1 ? N - 1 : 0);
  for (int j = 0; j < N; ++j) {
    const double shape = spec.beta * spec.a + spec.beta * (N - 1 - j) + 2;
    if (!(shape > 0)) throw std::domain_error("chi shape must be positive");
    x[j] = rng.next_chi(shape);
  }
  for (int j = 0; j + 1 < N; ++j) y[j] = rng.next_chi(spec.beta * (N - 1 - j));
  Tridiag T;
  T.diag.resize(N);
  T.off.resize(N - 1);
  for (int j = 0; j < N; ++j) {
    const double prev = j > 0 ? y[j - 1] : 0.0;
    T.diag[j] = (x[j] * x[j] + prev * prev) / spec.beta;
  }
  for (int j = 0; j + 1 < N; ++j) T.off[j] = x[j] * y[j] / spec.beta;
  return T;
}

int sturm_count_below(const Tridiag& T, double x) {
  if (!std::isfinite(x)) throw std::domain_error("shift must be finite");
  const int N = static_cast<int>(T.diag.size());
  double maxb2 = 1;
  for (double b : T.off) maxb2 = std::max(maxb2, b * b);
  const double pivmin = std::numeric_limits<double>::min() * maxb2;
  int count = 0;
  double d = 1;
  for (int i = 0; i < N; ++i) {
    const double couple = i > 0 ? T.off[i - 1] * T.off[i - 1] / d : 0.0;
    d = T.diag[i] - x - couple;
    if (std::abs(d) <= pivmin) d = d < 0 ? -pivmin : pivmin;
    if (d < 0) ++count;
  }
  return count;
}

double window_threshold(const EdgeWindow& w, const EnsembleSpec& spec) {
  check_spec(spec);
  const double N = spec.N;
  if (w.edge == Edge::hard) {
    if (!(w.t >= 0)) throw std::domain_error("hard window needs t >= 0");
    return w.t / (4 * N);
  }
  if (!std::isfinite(w.t))
    throw std::domain_error("soft window coordinate must be finite");
  if (spec.kind == Kind::gaussian)
    return std::sqrt(2 * N) + w.t / (std::sqrt(2.0) * std::pow(N, 1.0 / 6));
  return 4 * N + 2 * std::cbrt(2 * N) * w.t;
}

int count_in_window(const Tridiag& T, const EdgeWindow& w,
                    const EnsembleSpec& spec) {
  if (w.edge == Edge::hard) {
    if (spec.kind != Kind::laguerre)
      throw std::invalid_argument("hard edge windows require the laguerre ensemble");
    if (w.t == 0) return 0;
    return sturm_count_below(T, window_threshold(w, spec)) -
           sturm_count_below(T, 0.0);
  }
  return spec.N - sturm_count_below(T, window_threshold(w, spec));
}

McReport run_mc(const EnsembleSpec& spec, Edge edge, const McPlan& plan) {
  check_spec(spec);
  if (plan.samples < 1) throw std::domain_error("samples must be at least 1");
  if (plan.n_max < 0) throw std::domain_error("n_max must be nonnegative");
  if (plan.t_grid.empty()) throw std::domain_error("t grid must be nonempty");
  if (edge == Edge::hard && spec.kind != Kind::laguerre)
    throw std::invalid_argument("hard edge windows require the laguerre ensemble");
  std::vector<EdgeWindow> windows;
  windows.reserve(plan.t_grid.size());
  for (double t : plan.t_grid) {
    EdgeWindow w{edge, t};
    window_threshold(w, spec);  // validates the coordinate up front
    windows.push_back(w);
  }

  const std::size_t G = windows.size();
  const int nb = plan.n_max + 2;
  std::vector<std::uint64_t> hist(G * nb, 0);

  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&start] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
  };

  const std::uint64_t block = 4096;
  std::uint64_t done = 0;
  bool complete = true;
  while (done < plan.samples) {
    if (plan.max_seconds > 0 && elapsed() >= plan.max_seconds) {
      complete = false;
      break;
    }
    const std::uint64_t m = std::min<std::uint64_t>(block, plan.samples - done);
#ifdef _OPENMP
#pragma omp parallel
#endif
    {
      std::vector<std::uint64_t> local(G * nb, 0);
#ifdef _OPENMP
#pragma omp for schedule(static)
#endif
      for (std::int64_t i = 0; i < static_cast<std::int64_t>(m); ++i) {
        Rng rng(plan.seed, done + static_cast<std::uint64_t>(i));
        const Tridiag T = spec.kind == Kind::gaussian
                              ? sample_gaussian(spec, rng)
                              : sample_laguerre(spec, rng);
        for (std::size_t g = 0; g < G; ++g) {
          int c = count_in_window(T, windows[g], spec);
          if (c > plan.n_max + 1) c = plan.n_max + 1;
          ++local[g * nb + static_cast<std::size_t>(c)];
        }
      }
#ifdef _OPENMP
#pragma omp critical
#endif
      for (std::size_t k = 0; k < hist.size(); ++k) hist[k] += local[k];
    }
    done += m;
  }

  McReport r;
  r.spec = spec;
  r.edge = edge;
  r.plan = plan;
  r.samples_done = done;
  r.complete = complete;
  r.grid.resize(G);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t g = 0; g < G; ++g) {
    auto& row = r.grid[g];
    row.t = plan.t_grid[g];
    row.counts.assign(hist.begin() + g * nb, hist.begin() + (g + 1) * nb);
    row.p_hat.resize(nb);
    row.std_err.resize(nb);
    for (int j = 0; j < nb; ++j) {
      if (done == 0) {
        row.p_hat[j] = nan;
        row.std_err[j] = nan;
        continue;
      }
      const double p = static_cast<double>(row.counts[j]) /
                       static_cast<double>(done);
      row.p_hat[j] = p;
      row.std_err[j] = std::sqrt(p * (1 - p) / static_cast<double>(done));
    }
  }
  r.wall_seconds = elapsed();
  return r;
}

namespace {

std::string fmt_g17(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const char* kind_name(Kind k) {
  return k == Kind::gaussian ? "gaussian" : "laguerre";
}

const char* edge_name(Edge e) { return e == Edge::hard ? "hard" : "soft"; }

}  // namespace

std::string report_json(const McReport& r) {
  std::string out = "{\"spec\":{\"kind\":\"";
  out += kind_name(r.spec.kind);
  out += "\",\"N\":" + std::to_string(r.spec.N);
  out += ",\"beta\":" + fmt_g17(r.spec.beta);
  out += ",\"a\":" + fmt_g17(r.spec.a);
  out += "},\"edge\":\"";
  out += edge_name(r.edge);
  out += "\",\"plan\":{\"samples\":" + std::to_string(r.plan.samples);
  out += ",\"seed\":" + std::to_string(r.plan.seed);
  out += ",\"t_grid\":[";
  for (std::size_t i = 0; i < r.plan.t_grid.size(); ++i) {
    if (i) out += ',';
    out += fmt_g17(r.plan.t_grid[i]);
  }
  out += "],\"n_max\":" + std::to_string(r.plan.n_max);
  out += ",\"max_seconds\":" + fmt_g17(r.plan.max_seconds);
  out += "},\"grid\":[";
  for (std::size_t g = 0; g < r.grid.size(); ++g) {
    const auto& row = r.grid[g];
    if (g) out += ',';
    out += "{\"t\":" + fmt_g17(row.t) + ",\"counts\":[";
    for (std::size_t j = 0; j < row.counts.size(); ++j) {
      if (j) out += ',';
      out += std::to_string(row.counts[j]);
    }
    out += "],\"p_hat\":[";
    for (std::size_t j = 0; j < row.p_hat.size(); ++j) {
      if (j) out += ',';
      out += fmt_g17(row.p_hat[j]);
    }
    out += "],\"stderr\":[";
    for (std::size_t j = 0; j < row.std_err.size(); ++j) {
      if (j) out += ',';
      out += fmt_g17(row.std_err[j]);
    }
    out += "]}";
  }
  out += "],\"samples_done\":" + std::to_string(r.samples_done);
  out += ",\"complete\":";
  out += r.complete ? "true" : "false";
  out += ",\"wall_seconds\":" + fmt_g17(r.wall_seconds);
  out += "}";
  return out;
}

std::string report_csv(const McReport& r) {
  // no wall clock here: equal completed runs must yield byte-equal files
  std::string out = "# kind=";
  out += kind_name(r.spec.kind);
  out += " N=" + std::to_string(r.spec.N);
  out += " beta=" + fmt_g17(r.spec.beta);
  out += " a=" + fmt_g17(r.spec.a);
  out += " edge=";
  out += edge_name(r.edge);
  out += " samples=" + std::to_string(r.plan.samples);
  out += " seed=" + std::to_string(r.plan.seed);
  out += " n_max=" + std::to_string(r.plan.n_max);
  out += " max_seconds=" + fmt_g17(r.plan.max_seconds);
  out += " samples_done=" + std::to_string(r.samples_done);
  out += " complete=";
  out += r.complete ? "1" : "0";
  out += "\n# last bin n=" + std::to_string(r.plan.n_max + 1);
  out += " counts every sample above n_max\nt,n,count,p_hat,stderr\n";
  for (const auto& row : r.grid) {
    for (std::size_t j = 0; j < row.counts.size(); ++j) {
      out += fmt_g17(row.t);
      out += ',' + std::to_string(j);
      out += ',' + std::to_string(row.counts[j]);
      out += ',';
      out += std::isfinite(row.p_hat[j]) ? fmt_g17(row.p_hat[j]) : "nan";
      out += ',';
      out += std::isfinite(row.std_err[j]) ? fmt_g17(row.std_err[j]) : "nan";
      out += '\n';
    }
  }
  return out;
}

FitResult fit_line(const std::vector<double>& x, const std::vector<double>& y,
                   const std::vector<double>& var_y) {
  if (x.size() != y.size() || (!var_y.empty() && var_y.size() != x.size()))
    throw std::invalid_argument("fit inputs must have matching lengths");
  FitResult f;
  f.points_used = x.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (x.size() < 2) {
    f.slope = f.slope_stderr = f.intercept = nan;
    return f;
  }
  const std::size_t n = x.size();
  double xbar = 0, ybar = 0;
  for (std::size_t i = 0; i < n; ++i) {
    xbar += x[i];
    ybar += y[i];
  }
  xbar /= static_cast<double>(n);
  ybar /= static_cast<double>(n);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - xbar;
    sxx += dx * dx;
    sxy += dx * (y[i] - ybar);
  }
  if (sxx == 0) {
    f.slope = f.slope_stderr = f.intercept = nan;
    return f;
  }
  f.slope = sxy / sxx;
  f.intercept = ybar - f.slope * xbar;
  double var = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double c = (x[i] - xbar) / sxx;
    var += c * c * (var_y.empty() ? 0.0 : var_y[i]);
  }
  f.slope_stderr = std::sqrt(var);
  return f;
}

Comparison compare_mc_asym(const McReport& r,
                           const std::vector<asym::Expansion>& per_n) {
  if (!r.complete)
    throw std::invalid_argument("comparison requires a complete report");
  if (r.samples_done == 0)
    throw std::invalid_argument("comparison requires processed samples");
  Comparison c;
  c.leading_power = r.edge == Edge::hard ? 1.0 : 3.0;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> xs, ys, vars;
  for (const auto& row : r.grid) {
    const double abs_t = std::abs(row.t);
    const std::size_t n_rows =
        std::min(per_n.size(), row.p_hat.size() - 1);  // overflow bin stays out
    for (std::size_t n = 0; n < n_rows; ++n) {
      CompareRow cr;
      cr.t = row.t;
      cr.n = static_cast<int>(n);
      const double p = row.p_hat[n];
      cr.excluded = !(p > 0) || abs_t == 0;
      cr.expansion_value = abs_t > 0 ? asym::evaluate(per_n[n], abs_t) : nan;
      cr.log_p_hat = cr.excluded ? nan : std::log(p);
      cr.difference = cr.excluded ? nan : cr.log_p_hat - cr.expansion_value;
      c.rows.push_back(cr);
      if (n == 0 && !cr.excluded) {
        xs.push_back(std::pow(abs_t, c.leading_power));
        ys.push_back(cr.log_p_hat);
        vars.push_back((1 - p) / (static_cast<double>(r.samples_done) * p));
      }
    }
  }
  c.gap_fit = fit_line(xs, ys, vars);
  return c;
}

}  // namespace loggas::mc
