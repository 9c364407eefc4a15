#include "loggas/cli.hpp"

#include <chrono>
#include <cinttypes>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "loggas/asymptotics.hpp"
#include "loggas/electrostatics.hpp"
#include "loggas/ensemble_mc.hpp"
#include "loggas/numerics.hpp"

namespace loggas::cli {
namespace {

constexpr int kOk = 0;
constexpr int kUsage = 2;
constexpr int kInfeasible = 3;
constexpr int kAccuracy = 4;
constexpr int kVerifyFail = 5;

constexpr double kPi = 3.14159265358979323846;

// ------------------------------------------------------------- formatting

std::string jnum(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string jnum(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%" PRIu64, v);
  return buf;
}

std::string jnum(int v) { return std::to_string(v); }

std::string jstr(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') {
      out += '\\';
      out += ch;
    } else if (static_cast<unsigned char>(ch) < 0x20) {
      char buf[8];
      std::snprintf(buf, sizeof buf, "\\u%04x", ch);
      out += buf;
    } else {
      out += ch;
    }
  }
  out += '"';
  return out;
}

std::string jbool(bool b) { return b ? "true" : "false"; }

// human-scale rounding for text mode
std::string tnum(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

class JsonObj {
 public:
  JsonObj& add(const std::string& key, const std::string& raw) {
    if (!body_.empty()) body_ += ',';
    body_ += jstr(key) + ":" + raw;
    return *this;
  }
  std::string str() const { return "{" + body_ + "}"; }

 private:
  std::string body_;
};

class JsonArr {
 public:
  JsonArr& add(const std::string& raw) {
    if (!body_.empty()) body_ += ',';
    body_ += raw;
    return *this;
  }
  std::string str() const { return "[" + body_ + "]"; }

 private:
  std::string body_;
};

std::string jgrid(const std::vector<double>& v) {
  JsonArr a;
  for (double x : v) a.add(jnum(x));
  return a.str();
}

// -------------------------------------------------------------- plumbing

struct Ctx {
  std::string edge;
  std::string kind;      // check: duality | factorization
  std::string ensemble;  // mc: gaussian | laguerre
  std::string format = "json";
  std::string out;
  std::string group;
  std::string config_path;
  double beta = 2;
  double n = 0;
  double a = 0;
  double t = 0;
  double rho = 1;
  double eval_at = 0;
  double max_seconds = 0;
  double tol_quad = 1e-10;
  double tol_root = 1e-12;
  std::vector<double> t_grid;
  int N = 100;
  int n_max = 4;
  std::uint64_t samples = 100000;
  std::uint64_t seed = 1;
  bool full = false;
  bool do_compare = false;
  bool have_eval = false;
};

struct Binding {
  CLI::Option* opt;
  std::function<void(const nlohmann::json&)> load;
};
using BindMap = std::map<std::string, Binding>;

void apply_config(const nlohmann::json& cfg, const BindMap& binds) {
  for (const auto& [key, bind] : binds) {
    if (!cfg.contains(key)) continue;
    if (bind.opt->count() > 0) continue;  // flags win over the file
    try {
      bind.load(cfg.at(key));
    } catch (const nlohmann::json::exception& e) {
      throw std::domain_error("config key '" + key + "': " + e.what());
    }
  }
}

void check_choice(const std::string& what, const std::string& got,
                  const std::vector<std::string>& allowed) {
  for (const auto& ok : allowed)
    if (got == ok) return;
  std::string msg = what + " must be one of {";
  for (std::size_t i = 0; i < allowed.size(); ++i)
    msg += (i ? ", " : "") + allowed[i];
  throw std::domain_error(msg + "}, got '" + got + "'");
}

int emit(const Ctx& c, const std::string& payload) {
  if (c.out.empty()) {
    std::fputs(payload.c_str(), stdout);
    return kOk;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) {
    std::fprintf(stderr, "cannot open output file '%s'\n", c.out.c_str());
    return kUsage;
  }
  f << payload;
  return kOk;
}

bool write_file(const std::string& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary);
  if (!f) return false;
  f << body;
  return bool(f);
}

double quadv(const std::function<double(double)>& f, double lo, double hi,
             double le, double re, double tol) {
  num::QuadratureSpec s;
  s.lower = lo;
  s.upper = hi;
  s.left_exponent = le;
  s.right_exponent = re;
  s.rel_tol = tol;
  return num::quad_singular(f, s);
}

double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

// ---------------------------------------------------------------- electro

int cmd_electro(const Ctx& c) {
  check_choice("edge", c.edge, {"hard", "soft"});
  if (!(c.t > 0) || !std::isfinite(c.t))
    throw std::domain_error("--t must be a positive finite number");

  JsonObj cfg;
  cfg.add("edge", jstr(c.edge)).add("beta", jnum(c.beta)).add("n", jnum(c.n));
  if (c.edge == "hard") cfg.add("a", jnum(c.a));
  cfg.add("t", jnum(c.t))
      .add("tol-root", jnum(c.tol_root))
      .add("format", jstr(c.format))
      .add("out", jstr(c.out));

  std::vector<std::pair<std::string, double>> rows;
  if (c.edge == "hard") {
    const auto s = gas::hard_solve({c.beta, c.n, c.a, c.t}, c.tol_root);
    rows = {{"n_max", s.n_max},
            {"b", s.b},
            {"modulus", std::sqrt(s.b / c.t)},
            {"v", s.v},
            {"V1", s.V1},
            {"V1_boundary", s.V1_boundary},
            {"a_prime", s.a_prime},
            {"V2_corrected", s.V2_corrected},
            {"V2_legacy", s.V2_legacy},
            {"delta_F", s.delta_F},
            {"delta_F_legacy", s.delta_F_legacy},
            {"log_E", s.log_E},
            {"log_E_legacy", s.log_E_legacy}};
  } else {
    const auto s = gas::soft_solve({c.beta, c.n, c.t}, c.tol_root);
    rows = {{"n_max", s.n_max},
            {"b1", s.b1},
            {"b2", s.b2},
            {"d", s.d},
            {"modulus", std::sqrt(s.b1 / s.b2)},
            {"v", s.v},
            {"V1", s.V1},
            {"V2_corrected", s.V2_corrected},
            {"V2_legacy", s.V2_legacy},
            {"delta_F", s.delta_F},
            {"delta_F_legacy", s.delta_F_legacy},
            {"log_E", s.log_E},
            {"log_E_legacy", s.log_E_legacy}};
  }

  std::string payload;
  if (c.format == "json") {
    JsonObj res;
    for (const auto& [k, v] : rows) res.add(k, jnum(v));
    payload = JsonObj{}
                  .add("command", jstr("electro"))
                  .add("config", cfg.str())
                  .add("result", res.str())
                  .str() +
              "\n";
  } else if (c.format == "csv") {
    payload = "# config: " + cfg.str() + "\nfield,value\n";
    for (const auto& [k, v] : rows) payload += k + "," + jnum(v) + "\n";
  } else {
    payload = "# config: " + cfg.str() + "\n";
    char line[80];
    for (const auto& [k, v] : rows) {
      std::snprintf(line, sizeof line, "%-16s %s\n", k.c_str(),
                    tnum(v).c_str());
      payload += line;
    }
  }
  return emit(c, payload);
}

// ------------------------------------------------------------------- asym

std::string term_label(const asym::Term& t) {
  if (t.log_factor) return "log(t)";
  if (t.power == 0.0) return "1";
  char buf[32];
  std::snprintf(buf, sizeof buf, "t^%g", t.power);
  return buf;
}

int cmd_asym(const Ctx& c) {
  check_choice("edge", c.edge, {"hard", "soft", "bulk"});

  JsonObj cfg;
  cfg.add("edge", jstr(c.edge)).add("beta", jnum(c.beta)).add("n", jnum(c.n));
  if (c.edge == "hard") cfg.add("a", jnum(c.a));
  if (c.edge == "bulk") cfg.add("rho", jnum(c.rho));
  if (c.have_eval) cfg.add("eval-at", jnum(c.eval_at));
  cfg.add("format", jstr(c.format)).add("out", jstr(c.out));

  asym::Expansion e;
  if (c.edge == "hard")
    e = asym::hard_expansion(c.beta, c.n, c.a);
  else if (c.edge == "soft")
    e = asym::soft_expansion(c.beta, c.n);
  else
    e = asym::bulk_expansion(c.beta, c.n, c.rho);

  double value = 0;
  if (c.have_eval) value = asym::evaluate(e, c.eval_at);

  // drop trailing zero coefficients; interior zeros stay to keep the
  // basis readable
  auto terms = e.terms;
  while (!terms.empty() && terms.back().coeff == 0.0) terms.pop_back();

  std::string payload;
  if (c.format == "json") {
    JsonArr arr;
    for (const auto& t : terms)
      arr.add(JsonObj{}
                  .add("power", jnum(t.power))
                  .add("log", jbool(t.log_factor))
                  .add("coeff", jnum(t.coeff))
                  .str());
    JsonObj res;
    res.add("terms", arr.str());
    if (c.have_eval) res.add("eval_at", jnum(c.eval_at)).add("value", jnum(value));
    payload = JsonObj{}
                  .add("command", jstr("asym"))
                  .add("config", cfg.str())
                  .add("result", res.str())
                  .str() +
              "\n";
  } else if (c.format == "csv") {
    payload = "# config: " + cfg.str() + "\npower,log_factor,coeff\n";
    for (const auto& t : terms)
      payload += jnum(t.power) + "," + (t.log_factor ? "1" : "0") + "," +
                 jnum(t.coeff) + "\n";
    if (c.have_eval)
      payload += "# value at t=" + jnum(c.eval_at) + ": " + jnum(value) + "\n";
  } else {
    payload = "# config: " + cfg.str() + "\n";
    char line[64];
    for (const auto& t : terms) {
      std::snprintf(line, sizeof line, "%-8s %s\n", term_label(t).c_str(),
                    tnum(t.coeff).c_str());
      payload += line;
    }
    if (c.have_eval)
      payload += "value at t=" + tnum(c.eval_at) + ": " + tnum(value) + "\n";
  }
  return emit(c, payload);
}

// ------------------------------------------------------------------ check

int cmd_check(const Ctx& c) {
  check_choice("kind", c.kind, {"duality", "factorization"});
  check_choice("--edge", c.edge, {"hard", "soft"});
  constexpr double kTol = 1e-12;

  JsonObj cfg;
  cfg.add("kind", jstr(c.kind)).add("edge", jstr(c.edge));
  if (c.kind == "duality") cfg.add("beta", jnum(c.beta));
  cfg.add("n", jnum(c.n));
  if (c.edge == "hard") cfg.add("a", jnum(c.a));
  cfg.add("format", jstr(c.format)).add("out", jstr(c.out));

  double residual = 0;
  JsonObj detail;
  if (c.kind == "duality") {
    const double dual_beta = 4 / c.beta;
    double dual_n, dual_a = 0;
    if (c.edge == "hard") {
      dual_n = c.beta * (c.n + 1) / 2 - 1;
      dual_a = c.beta * c.a / 2 - c.beta + 2;
    } else {
      dual_n = c.beta * c.n / 2 + c.beta / 2 - 1;
    }
    if (dual_n < 0) {
      const double n_floor =
          c.edge == "hard" ? 2 / c.beta - 1 : std::max(0.0, 2 / c.beta - 1);
      char msg[160];
      std::snprintf(msg, sizeof msg,
                    "dual count %.17g is negative at beta=%.17g; the %s "
                    "duality map needs n >= %.17g",
                    dual_n, c.beta, c.edge.c_str(), n_floor);
      throw gas::InfeasibleError(msg, dual_n, 0.0);
    }
    residual = c.edge == "hard"
                   ? asym::hard_duality_residual(c.beta, c.n, c.a)
                   : asym::soft_duality_residual(c.beta, c.n);
    detail.add("dual_beta", jnum(dual_beta)).add("dual_n", jnum(dual_n));
    if (c.edge == "hard") detail.add("dual_a", jnum(dual_a));
  } else {
    // the factorization identity relates beta = 2 to beta = 1, no free beta
    residual = c.edge == "hard" ? asym::hard_factorization_residual(c.n, c.a)
                                : asym::soft_factorization_residual(c.n);
    detail.add("factor_counts", jgrid({c.n, c.n + 1}));
  }
  const bool pass = residual < kTol;

  std::string payload;
  if (c.format == "json") {
    JsonObj res;
    res.add("kind", jstr(c.kind))
        .add("edge", jstr(c.edge))
        .add("detail", detail.str())
        .add("residual", jnum(residual))
        .add("tolerance", jnum(kTol))
        .add("pass", jbool(pass));
    payload = JsonObj{}
                  .add("command", jstr("check"))
                  .add("config", cfg.str())
                  .add("result", res.str())
                  .str() +
              "\n";
  } else if (c.format == "csv") {
    payload = "# config: " + cfg.str() + "\nkind,edge,residual,tolerance,pass\n" +
              c.kind + "," + c.edge + "," + jnum(residual) + "," + jnum(kTol) +
              "," + (pass ? "1" : "0") + "\n";
  } else {
    payload = "# config: " + cfg.str() + "\n" + c.kind + " " + c.edge +
              ": residual " + tnum(residual) + " against tolerance " +
              tnum(kTol) + " -> " + (pass ? "PASS" : "FAIL") + "\n";
  }
  const int rc = emit(c, payload);
  if (rc != kOk) return rc;
  return pass ? kOk : kVerifyFail;
}

// --------------------------------------------------------------------- mc

std::string comparison_json(const mc::Comparison& cp) {
  JsonArr rows;
  for (const auto& r : cp.rows)
    rows.add(JsonObj{}
                 .add("t", jnum(r.t))
                 .add("n", jnum(r.n))
                 .add("log_p_hat", jnum(r.log_p_hat))
                 .add("expansion_value", jnum(r.expansion_value))
                 .add("difference", jnum(r.difference))
                 .add("excluded", jbool(r.excluded))
                 .str());
  return JsonObj{}
      .add("leading_power", jnum(cp.leading_power))
      .add("gap_fit", JsonObj{}
                          .add("slope", jnum(cp.gap_fit.slope))
                          .add("slope_stderr", jnum(cp.gap_fit.slope_stderr))
                          .add("intercept", jnum(cp.gap_fit.intercept))
                          .add("points_used", jnum(cp.gap_fit.points_used))
                          .str())
      .add("rows", rows.str())
      .str();
}

std::string comparison_csv(const mc::Comparison& cp) {
  std::string out = "# comparison gap fit: slope=" + jnum(cp.gap_fit.slope) +
                    " slope_stderr=" + jnum(cp.gap_fit.slope_stderr) +
                    " intercept=" + jnum(cp.gap_fit.intercept) +
                    " points_used=" + jnum(cp.gap_fit.points_used) +
                    " leading_power=" + jnum(cp.leading_power) + "\n";
  out += "t,n,log_p_hat,expansion_value,difference,excluded\n";
  for (const auto& r : cp.rows) {
    const auto num_or_nan = [](double x) {
      return std::isfinite(x) ? jnum(x) : std::string("nan");
    };
    out += jnum(r.t) + "," + std::to_string(r.n) + "," +
           num_or_nan(r.log_p_hat) + "," + num_or_nan(r.expansion_value) +
           "," + num_or_nan(r.difference) + "," + (r.excluded ? "1" : "0") +
           "\n";
  }
  return out;
}

int cmd_mc(const Ctx& c) {
  check_choice("--ensemble", c.ensemble, {"gaussian", "laguerre"});
  check_choice("--edge", c.edge, {"hard", "soft"});
  if (c.edge == "hard" && c.ensemble == "gaussian")
    throw std::domain_error(
        "hard edge windows require the laguerre ensemble; the gaussian "
        "spectrum has no hard wall");
  if (c.N < 2) throw std::domain_error("--N must be at least 2");
  if (!(c.beta > 0)) throw std::domain_error("--beta must be positive");
  if (c.t_grid.empty())
    throw std::domain_error("provide a window grid via --t or --t-grid");
  if (c.ensemble == "laguerre") {
    if (c.a < 0) throw std::domain_error("--a must be nonnegative");
    const double min_shape = c.beta * c.a + 2;
    if (!(min_shape > 0)) {
      char msg[120];
      std::snprintf(msg, sizeof msg,
                    "laguerre sampling needs beta*a + 2 > 0; a must exceed "
                    "%.17g at beta=%.17g",
                    -2 / c.beta, c.beta);
      throw gas::InfeasibleError(msg, c.a, -2 / c.beta);
    }
  }

  mc::EnsembleSpec spec;
  spec.kind =
      c.ensemble == "gaussian" ? mc::Kind::gaussian : mc::Kind::laguerre;
  spec.N = c.N;
  spec.beta = c.beta;
  spec.a = c.a;
  mc::McPlan plan;
  plan.samples = c.samples;
  plan.seed = c.seed;
  plan.t_grid = c.t_grid;
  plan.n_max = c.n_max;
  plan.max_seconds = c.max_seconds;
  const mc::Edge edge = c.edge == "hard" ? mc::Edge::hard : mc::Edge::soft;

  JsonObj cfg;
  cfg.add("ensemble", jstr(c.ensemble))
      .add("edge", jstr(c.edge))
      .add("beta", jnum(c.beta))
      .add("a", jnum(c.a))
      .add("N", jnum(c.N))
      .add("samples", jnum(c.samples))
      .add("seed", jnum(c.seed))
      .add("t-grid", jgrid(c.t_grid))
      .add("n-max", jnum(c.n_max))
      .add("max-seconds", jnum(c.max_seconds))
      .add("compare", jbool(c.do_compare))
      .add("format", jstr(c.format))
      .add("out", jstr(c.out));

  const auto report = mc::run_mc(spec, edge, plan);

  bool compared = false;
  mc::Comparison cp;
  if (c.do_compare && report.complete && report.samples_done > 0) {
    std::vector<asym::Expansion> per_n;
    for (int n = 0; n <= c.n_max; ++n)
      per_n.push_back(c.edge == "soft"
                          ? asym::soft_expansion(c.beta, n)
                          : asym::hard_expansion(c.beta, n, c.a));
    cp = mc::compare_mc_asym(report, per_n);
    compared = true;
  }

  std::string json_payload = "{\"command\":\"mc\",\"config\":" + cfg.str() +
                             ",\"report\":" + mc::report_json(report);
  if (compared) json_payload += ",\"comparison\":" + comparison_json(cp);
  json_payload += "}\n";

  std::string csv_payload = "# config: " + cfg.str() + "\n" + mc::report_csv(report);
  if (compared) csv_payload += comparison_csv(cp);

  const std::string base = c.out.empty() ? "mc_report" : c.out;
  if (!write_file(base + ".json", json_payload) ||
      !write_file(base + ".csv", csv_payload)) {
    std::fprintf(stderr, "cannot write report files at base '%s'\n",
                 base.c_str());
    return kUsage;
  }

  if (c.format == "json") {
    std::fputs(json_payload.c_str(), stdout);
  } else if (c.format == "csv") {
    std::fputs(csv_payload.c_str(), stdout);
  } else {
    std::printf("# config: %s\n", cfg.str().c_str());
    std::printf("%s N=%d beta=%s a=%s edge=%s samples_done=%" PRIu64 "%s\n",
                c.ensemble.c_str(), c.N, tnum(c.beta).c_str(),
                tnum(c.a).c_str(), c.edge.c_str(), report.samples_done,
                report.complete ? "" : " (budget hit, partial)");
    for (const auto& row : report.grid)
      std::printf("t=%-10s p_hat(0)=%-12s stderr=%s\n", tnum(row.t).c_str(),
                  tnum(row.p_hat[0]).c_str(), tnum(row.std_err[0]).c_str());
    if (compared)
      std::printf("fit: slope=%s stderr=%s expected leading power %s\n",
                  tnum(cp.gap_fit.slope).c_str(),
                  tnum(cp.gap_fit.slope_stderr).c_str(),
                  tnum(cp.leading_power).c_str());
    std::printf("wrote %s.json and %s.csv\n", base.c_str(), base.c_str());
  }

  if (!report.complete) {
    std::fprintf(stderr,
                 "wall-clock budget exhausted after %" PRIu64
                 " of %" PRIu64 " samples; partial report written\n",
                 report.samples_done, plan.samples);
    return kAccuracy;
  }
  return kOk;
}

// ----------------------------------------------------------------- verify

struct GroupResult {
  std::string name;
  double max_error = 0;
  double tolerance = 0;
  double seconds = 0;
  bool pass = false;
};

double group_exact_laws() {
  double worst = 0;
  for (double beta : {0.5, 1.0, 2.0, 4.0}) {
    for (double t : {1.0, 10.0, 100.0}) {
      const auto s = gas::hard_solve({beta, 0, 0, t});
      worst = std::max(worst, rel_err(s.log_E, -beta * t / 8));
    }
    for (double t : {0.5, 2.0, 8.0}) {
      const auto s = gas::soft_solve({beta, 0, t});
      const double want = -beta * t * t * t / 24 +
                          (beta / 2 - 1) * std::sqrt(2.0) / 3 * std::pow(t, 1.5);
      worst = std::max(worst, rel_err(s.log_E, want));
    }
  }
  for (double beta : {1.0, 2.5})
    for (double a : {0.5, 2.0})
      for (double t : {2.0, 10.0}) {
        const auto s = gas::hard_solve({beta, 0, a, t});
        const double want = -beta * (t / 8 - a * std::sqrt(t) / 2);
        worst = std::max(worst, rel_err(s.log_E, want));
      }
  return worst;
}

double group_roundtrip(double tol_root) {
  double worst = 0;
  for (double beta : {1.0, 2.0})
    for (double f : {0.3, 0.8})
      for (double t : {1.0, 9.0}) {
        const double nh = f * std::sqrt(t) / kPi;
        const auto h = gas::hard_solve({beta, nh, 0, t}, tol_root);
        worst = std::max(worst, std::abs(gas::hard_count(h.b, t) - nh) / nh);
        const double ns = f * 2 / (3 * kPi) * std::pow(t, 1.5);
        const auto s = gas::soft_solve({beta, ns, t}, tol_root);
        worst = std::max(worst, std::abs(gas::soft_count(s.d, t) - ns) / ns);
      }
  return worst;
}

double group_oracles(double tol_quad) {
  double worst = 0;
  for (double t : {0.5, 7.0})
    for (double fb : {0.3, 0.8}) {
      const double b = fb * t;
      const double q = quadv(
          [b, t](double x) { return gas::hard_density(x, b, t); }, 0, b, -0.5,
          0, tol_quad);
      worst = std::max(worst, rel_err(q, gas::hard_count(b, t)));
    }
  for (double t : {0.9, 12.0})
    for (double fb : {0.1, 0.6}) {
      const double b = fb * t;
      const double v = gas::hard_drop(b, t);
      const double q1 = quadv(
          [b, t](double x) {
            return -gas::hard_field({x, 0.0}, b, t).real();
          },
          b, t, 0, -0.5, tol_quad);
      const double q2 = quadv(
          [b, t](double y) { return std::sqrt((y * y - b) / (t - y * y)); },
          std::sqrt(b), std::sqrt(t), 0, -0.5, tol_quad);
      worst = std::max(worst, rel_err(q1, v));
      worst = std::max(worst, rel_err(q2, v));
    }
  for (double t : {2.0, 40.0})
    for (double fd : {0.1, 0.4}) {
      const double d = fd * t, b1 = t / 2 - d, b2 = t / 2 + d;
      const double q = quadv(
                           [b1, b2, t](double x) {
                             return std::sqrt((x - b1) * (b2 - x) / (t - x));
                           },
                           b1, b2, 0, 0, tol_quad) /
                       kPi;
      worst = std::max(worst, rel_err(q, gas::soft_count(d, t)));
    }
  for (double t : {2.0, 30.0})
    for (double fd : {0.1, 0.4}) {
      const double d = fd * t, b1 = t / 2 - d, b2 = t / 2 + d;
      const double q = quadv(
          [b1, b2, t](double x) {
            return std::sqrt((x - b1) * (x - b2) / (t - x));
          },
          b2, t, 0, -0.5, tol_quad);
      worst = std::max(worst, rel_err(q, gas::soft_drop(d, t)));
    }
  for (const auto& [b, t, beta] :
       {std::tuple{0.3, 2.0, 1.0}, std::tuple{1.5, 5.0, 4.0}}) {
    const auto e = gas::hard_legacy_entropy(b, t, beta, tol_quad);
    worst = std::max(worst, rel_err(e.quadrature, e.closed_form));
  }
  for (double t : {2.0, 6.0})
    for (double beta : {1.0, 4.0}) {
      const auto e = gas::soft_legacy_entropy(0.0, t, beta, tol_quad);
      worst = std::max(worst, rel_err(e.quadrature, e.closed_form));
    }
  for (int k : {0, 1, 2}) {
    const gas::GeneralAlphaProblem p{k, 0.4, 3.0, 2.0};
    worst = std::max(
        worst, rel_err(gas::general_V1_quadrature(p, tol_quad),
                       gas::general_V1(p)));
  }
  return worst;
}

double group_lemma2() {
  double worst = 0;
  for (int i = 0; i <= 9; ++i) {
    const double u = 0.1 * i;
    const double I = quadv(
        [u](double x) {
          return (1 - x) *
                 std::sqrt(((1 - x) * (1 - x) - u * u) / (x * (2 - x)));
        },
        0.0, 1.0 - u, -0.5, 0, 1e-12);
    worst = std::max(worst, std::abs(gas::lemma2_H(u) - 2 * I));
  }
  return worst;
}

double group_tables() {
  double worst = 0;
  const auto soft = asym::soft_expansion(2, 0).terms;
  worst = std::max(worst, std::abs(soft[0].coeff - (-1.0 / 12)));
  worst = std::max(worst, std::abs(soft[1].coeff));
  worst = std::max(worst, std::abs(soft[2].coeff - (-0.125)));
  for (const auto& t : asym::bulk_expansion(2, 0, 1.0).terms)
    if (t.log_factor) worst = std::max(worst, std::abs(t.coeff - (-0.25)));
  const auto hard = asym::hard_expansion(2, 0, 0).terms;
  worst = std::max(worst, std::abs(hard[0].coeff - (-0.25)));
  worst = std::max(worst, std::abs(hard[1].coeff));
  worst = std::max(worst, std::abs(hard[2].coeff));
  const auto h411 = asym::hard_expansion(4, 1, 1).terms;
  worst = std::max(worst, std::abs(h411[0].coeff - (-0.5)));
  worst = std::max(worst, std::abs(h411[1].coeff - 6.0));
  worst = std::max(worst, std::abs(h411[2].coeff - (-2.25)));
  return worst;
}

double group_duality() {
  double worst = 0;
  for (double beta : {0.5, 1.0, 2.0, 2.5, 4.0})
    for (double n : {0.0, 0.7, 1.0, 2.5}) {
      worst = std::max(worst, asym::soft_duality_residual(beta, n));
      for (double a : {0.0, 0.5, 1.0, 3.0})
        worst = std::max(worst, asym::hard_duality_residual(beta, n, a));
    }
  return worst;
}

double group_factorization() {
  double worst = 0;
  for (double n : {0.0, 0.7, 1.0, 2.5}) {
    worst = std::max(worst, asym::soft_factorization_residual(n));
    for (double a : {0.0, 0.5, 1.0, 3.0})
      worst = std::max(worst, asym::hard_factorization_residual(n, a));
  }
  return worst;
}

double group_mc(std::uint64_t seed, std::uint64_t samples) {
  mc::EnsembleSpec spec{mc::Kind::laguerre, 100, 2.0, 0};
  mc::McPlan plan;
  plan.samples = samples;
  plan.seed = seed;
  plan.t_grid = {1.0, 2.0, 4.0};
  plan.n_max = 2;
  const auto r = mc::run_mc(spec, mc::Edge::hard, plan);
  // worst deviation of p_hat(0) from exp(-t/4) in standard-error units
  double worst = 0;
  for (const auto& row : r.grid) {
    const double want = std::exp(-row.t / 4);
    const double se = std::max(row.std_err[0], 1e-300);
    worst = std::max(worst, std::abs(row.p_hat[0] - want) / se);
  }
  return worst;
}

int cmd_verify(const Ctx& c) {
  struct Spec {
    std::string name;
    double tol;
    std::function<double()> run;
    bool mc_only = false;
  };
  const std::vector<Spec> all = {
      {"exact-laws", 1e-12, [] { return group_exact_laws(); }, false},
      {"roundtrip", std::max(1e-9, 10 * c.tol_root),
       [&c] { return group_roundtrip(c.tol_root); }, false},
      {"oracles", 1e-6, [&c] { return group_oracles(c.tol_quad); }, false},
      {"lemma2", 1e-10, [] { return group_lemma2(); }, false},
      {"tables", 0.0, [] { return group_tables(); }, false},
      {"duality", 1e-13, [] { return group_duality(); }, false},
      {"factorization", 1e-13, [] { return group_factorization(); }, false},
      {"mc", 3.0, [&c] { return group_mc(c.seed, c.samples); }, true},
  };

  if (!c.group.empty()) {
    bool known = false;
    for (const auto& s : all) known = known || s.name == c.group;
    if (!known) {
      std::string names;
      for (const auto& s : all) names += (names.empty() ? "" : ", ") + s.name;
      throw std::domain_error("unknown group '" + c.group + "'; have: " + names);
    }
  }

  JsonObj cfg;
  cfg.add("full", jbool(c.full))
      .add("group", jstr(c.group))
      .add("seed", jnum(c.seed))
      .add("samples", jnum(c.samples))
      .add("tol-quad", jnum(c.tol_quad))
      .add("tol-root", jnum(c.tol_root))
      .add("format", jstr(c.format))
      .add("out", jstr(c.out));

  std::vector<GroupResult> results;
  bool all_pass = true;
  for (const auto& s : all) {
    if (!c.group.empty() && s.name != c.group) continue;
    if (c.group.empty() && s.mc_only && !c.full) continue;
    GroupResult g;
    g.name = s.name;
    g.tolerance = s.tol;
    const auto start = std::chrono::steady_clock::now();
    g.max_error = s.run();
    g.seconds = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - start)
                    .count();
    g.pass = s.tol == 0.0 ? g.max_error == 0.0 : g.max_error < s.tol;
    all_pass = all_pass && g.pass;
    results.push_back(g);
  }

  std::string payload;
  if (c.format == "json") {
    JsonArr arr;
    for (const auto& g : results)
      arr.add(JsonObj{}
                  .add("name", jstr(g.name))
                  .add("max_error", jnum(g.max_error))
                  .add("tolerance", jnum(g.tolerance))
                  .add("seconds", jnum(g.seconds))
                  .add("pass", jbool(g.pass))
                  .str());
    payload = JsonObj{}
                  .add("command", jstr("verify"))
                  .add("config", cfg.str())
                  .add("result", JsonObj{}
                                     .add("groups", arr.str())
                                     .add("pass", jbool(all_pass))
                                     .str())
                  .str() +
              "\n";
  } else if (c.format == "csv") {
    payload = "# config: " + cfg.str() + "\ngroup,max_error,tolerance,seconds,pass\n";
    for (const auto& g : results)
      payload += g.name + "," + jnum(g.max_error) + "," + jnum(g.tolerance) +
                 "," + jnum(g.seconds) + "," + (g.pass ? "1" : "0") + "\n";
  } else {
    payload = "# config: " + cfg.str() + "\n";
    char line[120];
    for (const auto& g : results) {
      std::snprintf(line, sizeof line, "%s %-14s max_error=%-12s tol=%-8s (%.2fs)\n",
                    g.pass ? "PASS" : "FAIL", g.name.c_str(),
                    tnum(g.max_error).c_str(), tnum(g.tolerance).c_str(),
                    g.seconds);
      payload += line;
    }
    payload += all_pass ? "PASS overall\n" : "FAIL overall\n";
  }
  const int rc = emit(c, payload);
  if (rc != kOk) return rc;
  return all_pass ? kOk : kVerifyFail;
}

// ------------------------------------------------------------ entry point

int run_cli_inner(int argc, const char* const* argv) {
  Ctx c;
  CLI::App app{"log-gas edge electrostatics: conditioned gap free energies,"
               " expansion tables, and tridiagonal ensemble sampling"};
  app.require_subcommand(1);
  app.add_option("--config", c.config_path,
                 "JSON config file; explicit flags override its values")
      ->envname("LOGGAS_CONFIG");

  std::map<const CLI::App*, BindMap> binds;

  const auto bind_d = [&binds](CLI::App* cmd, const std::string& key,
                               double& ref, const std::string& desc) {
    auto* o = cmd->add_option("--" + key, ref, desc);
    binds[cmd][key] = {o, [&ref](const nlohmann::json& v) {
                         ref = v.get<double>();
                       }};
    return o;
  };
  const auto bind_i = [&binds](CLI::App* cmd, const std::string& key, int& ref,
                               const std::string& desc) {
    auto* o = cmd->add_option("--" + key, ref, desc);
    binds[cmd][key] = {o, [&ref](const nlohmann::json& v) {
                         ref = v.get<int>();
                       }};
    return o;
  };
  const auto bind_u = [&binds](CLI::App* cmd, const std::string& key,
                               std::uint64_t& ref, const std::string& desc) {
    auto* o = cmd->add_option("--" + key, ref, desc);
    binds[cmd][key] = {o, [&ref](const nlohmann::json& v) {
                         ref = v.get<std::uint64_t>();
                       }};
    return o;
  };
  const auto bind_s = [&binds](CLI::App* cmd, const std::string& key,
                               std::string& ref, const std::string& desc) {
    auto* o = cmd->add_option("--" + key, ref, desc);
    binds[cmd][key] = {o, [&ref](const nlohmann::json& v) {
                         ref = v.get<std::string>();
                       }};
    return o;
  };
  const auto bind_b = [&binds](CLI::App* cmd, const std::string& key,
                               bool& ref, const std::string& desc) {
    auto* o = cmd->add_flag("--" + key, ref, desc);
    binds[cmd][key] = {o, [&ref](const nlohmann::json& v) {
                         ref = v.get<bool>();
                       }};
    return o;
  };
  const auto bind_fmt = [&](CLI::App* cmd) {
    bind_s(cmd, "format", c.format, "output format: json, csv or text");
    bind_s(cmd, "out", c.out, "write output to this file instead of stdout");
  };

  auto* electro = app.add_subcommand(
      "electro", "solve the conditioned-gap electrostatic problem");
  electro->fallthrough();
  electro->add_option("edge", c.edge, "hard or soft")->required();
  bind_d(electro, "beta", c.beta, "inverse temperature, > 0");
  bind_d(electro, "n", c.n, "conditioned charge in the gap");
  bind_d(electro, "a", c.a, "wall charge (hard edge only)");
  bind_d(electro, "t", c.t, "gap endpoint, > 0");
  bind_d(electro, "tol-root", c.tol_root, "root-finder tolerance");
  bind_fmt(electro);

  auto* asymc = app.add_subcommand(
      "asym", "emit large-gap expansion coefficients");
  asymc->fallthrough();
  asymc->add_option("edge", c.edge, "hard, soft or bulk")->required();
  bind_d(asymc, "beta", c.beta, "inverse temperature, > 0");
  bind_d(asymc, "n", c.n, "conditioned count");
  bind_d(asymc, "a", c.a, "wall charge (hard edge only)");
  bind_d(asymc, "rho", c.rho, "bulk density (bulk edge only)");
  auto* ev = bind_d(asymc, "eval-at", c.eval_at,
                    "also evaluate the series at this gap size");
  binds[asymc]["eval-at"] = {ev, [&c](const nlohmann::json& v) {
                               c.eval_at = v.get<double>();
                               c.have_eval = true;
                             }};
  bind_fmt(asymc);

  auto* check = app.add_subcommand(
      "check", "test duality and factorization identities");
  check->fallthrough();
  check->add_option("kind", c.kind, "duality or factorization")->required();
  bind_s(check, "edge", c.edge, "hard or soft");
  bind_d(check, "beta", c.beta, "inverse temperature (duality only)");
  bind_d(check, "n", c.n, "conditioned count");
  bind_d(check, "a", c.a, "wall charge (hard edge only)");
  bind_fmt(check);

  auto* mcc = app.add_subcommand(
      "mc", "sample tridiagonal ensembles and histogram window counts");
  mcc->fallthrough();
  bind_s(mcc, "ensemble", c.ensemble, "gaussian or laguerre");
  bind_s(mcc, "edge", c.edge, "hard or soft window scaling");
  bind_d(mcc, "beta", c.beta, "inverse temperature, > 0");
  bind_d(mcc, "a", c.a, "laguerre exponent parameter, >= 0");
  bind_i(mcc, "N", c.N, "matrix size, >= 2");
  bind_u(mcc, "samples", c.samples, "number of matrices to draw");
  bind_u(mcc, "seed", c.seed, "stream seed; fixes the report bit-for-bit");
  auto* tg = mcc->add_option("--t,--t-grid", c.t_grid,
                             "window coordinates, comma separated");
  tg->delimiter(',');
  binds[mcc]["t"] = {tg, [&c](const nlohmann::json& v) {
                       if (v.is_array())
                         c.t_grid = v.get<std::vector<double>>();
                       else
                         c.t_grid = {v.get<double>()};
                     }};
  binds[mcc]["t-grid"] = binds[mcc]["t"];
  bind_i(mcc, "n-max", c.n_max, "largest resolved count; rest overflow");
  bind_d(mcc, "max-seconds", c.max_seconds,
         "wall-clock budget, 0 disables the cap");
  bind_b(mcc, "compare", c.do_compare,
         "attach the expansion-table comparison");
  bind_fmt(mcc);

  auto* verify = app.add_subcommand(
      "verify", "run the invariant suites and report pass/fail per group");
  verify->fallthrough();
  bind_b(verify, "full", c.full, "include the Monte Carlo group");
  bind_s(verify, "group", c.group, "run a single named group");
  bind_u(verify, "seed", c.seed, "seed for the Monte Carlo group");
  bind_u(verify, "samples", c.samples, "sample count for the Monte Carlo group");
  bind_d(verify, "tol-quad", c.tol_quad, "quadrature tolerance for oracles");
  bind_d(verify, "tol-root", c.tol_root, "root-finder tolerance");
  bind_fmt(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  if (ev->count() > 0) c.have_eval = true;
  try {
    if (!c.config_path.empty()) {
      std::ifstream f(c.config_path);
      if (!f)
        throw std::domain_error("cannot read config file '" + c.config_path +
                                "'");
      nlohmann::json cfg;
      try {
        f >> cfg;
      } catch (const nlohmann::json::exception& e) {
        throw std::domain_error("config file '" + c.config_path +
                                "' is not valid JSON: " + e.what());
      }
      if (!cfg.is_object())
        throw std::domain_error("config file must hold a JSON object");
      apply_config(cfg, binds[sub]);
    }
    check_choice("--format", c.format, {"json", "csv", "text"});

    if (sub->get_name() == "electro") return cmd_electro(c);
    if (sub->get_name() == "asym") return cmd_asym(c);
    if (sub->get_name() == "check") return cmd_check(c);
    if (sub->get_name() == "mc") return cmd_mc(c);
    return cmd_verify(c);
  } catch (const gas::InfeasibleError& e) {
    std::fprintf(stderr,
                 "infeasible: %s (requested %.17g, feasible limit %.17g)\n",
                 e.what(), e.requested, e.limit);
    return kInfeasible;
  } catch (const num::AccuracyError& e) {
    std::fprintf(stderr, "accuracy: %s (estimate %.17g, bound %.17g)\n",
                 e.what(), e.estimate, e.error_bound);
    return kAccuracy;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "usage: %s\n", e.what());
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "usage: %s\n", e.what());
    return kUsage;
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  return run_cli_inner(argc, argv);
}

}  // namespace loggas::cli
