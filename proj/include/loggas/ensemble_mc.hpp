#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "loggas/asymptotics.hpp"

namespace loggas::mc {

// Deterministic splittable random stream: xoshiro256++ state expanded from a
// splitmix64 chain. A substream is keyed by (seed, stream index), so every
// Monte Carlo sample owns an independent generator and aggregate results do
// not depend on scheduling or worker count.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : Rng(seed, 0) {}
  Rng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();
  double next_uniform();            // [0, 1), 53 bits
  double next_normal();             // standard normal (polar rejection)
  double next_gamma(double shape);  // Gamma(shape, 1), shape > 0
  double next_chi(double k);        // chi with k > 0 degrees of freedom

 private:
  std::uint64_t s_[4];
  double cached_normal_ = 0;
  bool has_cached_normal_ = false;
};

enum class Kind { gaussian, laguerre };
enum class Edge { hard, soft };

struct EnsembleSpec {
  Kind kind = Kind::gaussian;
  int N = 2;
  double beta = 2;
  double a = 0;  // laguerre weight exponent; ignored for gaussian
};

struct Tridiag {
  std::vector<double> diag;
  std::vector<double> off;
};

// Tridiagonal realization with eigenvalue density proportional to
// prod exp(-beta x^2 / 2) * |Delta|^beta. Draw order is documented so tests
// can replay a stream: all diagonal normals first (row order), then the
// off-diagonal chis (row order). The spectrum edge sits near sqrt(2N).
Tridiag sample_gaussian(const EnsembleSpec& spec, Rng& rng);

// Bidiagonal-squared realization with eigenvalue density proportional to
// prod x^{beta a / 2} exp(-beta x / 2) * |Delta|^beta, bulk support
// approaching (0, 4N). Draw order: the N bidiagonal diagonal chis first
// (row order), then the N-1 subdiagonal chis (row order); the returned
// matrix is B B^T / beta.
Tridiag sample_laguerre(const EnsembleSpec& spec, Rng& rng);

// Number of eigenvalues strictly below x, via the pivot signs of the
// shifted LDL^T recurrence. Near-zero pivots are replaced by a relative
// safeguard magnitude keeping their sign; an exactly zero pivot resolves
// upward, so x being an eigenvalue does not inflate the strict count.
int sturm_count_below(const Tridiag& T, double x);

struct EdgeWindow {
  Edge edge = Edge::hard;
  double t = 1;  // scaled coordinate; hard: t >= 0, soft: any real
};

// Raw spectral threshold realizing the scaled window. Hard: t/(4N). Soft
// gaussian: sqrt(2N) + t/(sqrt(2) N^{1/6}). Soft laguerre:
// 4N + 2 (2N)^{1/3} t.
double window_threshold(const EdgeWindow& w, const EnsembleSpec& spec);

// Hard: eigenvalues in (0, t/(4N)); soft: eigenvalues above the threshold.
// The hard window requires the laguerre kind.
int count_in_window(const Tridiag& T, const EdgeWindow& w,
                    const EnsembleSpec& spec);

struct McPlan {
  std::uint64_t samples = 1;
  std::uint64_t seed = 1;
  std::vector<double> t_grid;
  int n_max = 4;           // histogram cap; one extra bucket catches the rest
  double max_seconds = 0;  // wall-clock budget; 0 means unlimited
};

struct McGridRow {
  double t = 0;
  // counts[n] for n = 0..n_max, then counts[n_max + 1] for every sample
  // holding more than n_max window eigenvalues, so the row always sums to
  // the number of processed samples
  std::vector<std::uint64_t> counts;
  std::vector<double> p_hat;
  std::vector<double> std_err;
};

struct McReport {
  EnsembleSpec spec;
  Edge edge = Edge::hard;
  McPlan plan;
  std::vector<McGridRow> grid;
  std::uint64_t samples_done = 0;
  bool complete = true;  // false when the wall-clock budget cut the run short
  double wall_seconds = 0;
};

// Samples spec matrices and histograms the window counts over the whole
// t grid with common random numbers (one matrix serves every t). Sample i
// always uses the substream keyed by (seed, i), so a finished report is
// bit-reproducible for any worker count. A budget overrun stops between
// blocks and flags the report incomplete; estimates are then normalized by
// samples_done.
McReport run_mc(const EnsembleSpec& spec, Edge edge, const McPlan& plan);

// Serialized forms consumed by the CLI. JSON carries wall_seconds; the CSV
// deliberately omits it so completed equal runs are byte-identical files.
std::string report_json(const McReport& r);
std::string report_csv(const McReport& r);

struct FitResult {
  double slope = 0;
  double slope_stderr = 0;
  double intercept = 0;
  std::size_t points_used = 0;
};

// Unweighted least squares of y on x. var_y feeds only the slope error bar
// (Var(slope) = sum c_i^2 var_y_i with the usual hat-matrix weights); the
// fit itself stays unweighted so a single low-probability point cannot
// dominate. Fewer than two points yields NaN slope and error.
FitResult fit_line(const std::vector<double>& x, const std::vector<double>& y,
                   const std::vector<double>& var_y);

struct CompareRow {
  double t = 0;
  int n = 0;
  double log_p_hat = 0;      // NaN when excluded
  double expansion_value = 0;
  double difference = 0;     // NaN when excluded
  bool excluded = false;     // empty cell (p_hat = 0) or t = 0
};

struct Comparison {
  std::vector<CompareRow> rows;
  double leading_power = 1;  // basis exponent of |t| used for the fit
  FitResult gap_fit;         // log p_hat(0) against |t|^leading_power
};

// Confronts a finished report with expansion tables per n (index = n).
// Rows with empty cells are flagged and left out of the fit; expansions are
// evaluated at |t|. Throws if the report is incomplete.
Comparison compare_mc_asym(const McReport& r,
                           const std::vector<asym::Expansion>& per_n);

}  // namespace loggas::mc
