// Compares the parallel sampling driver against a plain serial loop built
// from the same primitives: identical histograms required, timings printed.
// Usage: bench_mc [N] [samples]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "loggas/ensemble_mc.hpp"

using namespace loggas;
using clock_type = std::chrono::steady_clock;

namespace {

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  const int N = argc > 1 ? std::atoi(argv[1]) : 100;
  const std::uint64_t samples = argc > 2 ? std::strtoull(argv[2], nullptr, 10)
                                         : 20000;
  mc::EnsembleSpec spec{mc::Kind::laguerre, N, 2.0, 0};
  mc::McPlan plan;
  plan.samples = samples;
  plan.seed = 99;
  plan.t_grid = {1.0, 2.0, 4.0};
  plan.n_max = 3;

  // serial reference: one explicit loop, same per-sample substreams
  std::vector<mc::EdgeWindow> windows;
  for (double t : plan.t_grid) windows.push_back({mc::Edge::hard, t});
  const int nb = plan.n_max + 2;
  std::vector<std::uint64_t> ref(windows.size() * nb, 0);
  const auto t_ref = clock_type::now();
  for (std::uint64_t i = 0; i < samples; ++i) {
    mc::Rng rng(plan.seed, i);
    const auto T = mc::sample_laguerre(spec, rng);
    for (std::size_t g = 0; g < windows.size(); ++g) {
      int c = mc::count_in_window(T, windows[g], spec);
      if (c > plan.n_max + 1) c = plan.n_max + 1;
      ++ref[g * nb + static_cast<std::size_t>(c)];
    }
  }
  const double sec_ref = seconds_since(t_ref);

  int max_threads = 1;
#ifdef _OPENMP
  max_threads = omp_get_max_threads();
  omp_set_num_threads(1);
#endif
  const auto t_one = clock_type::now();
  const auto r_one = mc::run_mc(spec, mc::Edge::hard, plan);
  const double sec_one = seconds_since(t_one);

#ifdef _OPENMP
  omp_set_num_threads(max_threads);
#endif
  const auto t_many = clock_type::now();
  const auto r_many = mc::run_mc(spec, mc::Edge::hard, plan);
  const double sec_many = seconds_since(t_many);

  bool identical = true;
  for (std::size_t g = 0; g < windows.size(); ++g)
    for (int b = 0; b < nb; ++b) {
      const auto want = ref[g * nb + static_cast<std::size_t>(b)];
      identical = identical && r_one.grid[g].counts[b] == want &&
                  r_many.grid[g].counts[b] == want;
    }

  std::printf("laguerre N=%d, %llu samples, 3 windows\n", N,
              static_cast<unsigned long long>(samples));
  std::printf("serial reference loop : %8.3fs  %10.0f samples/s\n", sec_ref,
              samples / sec_ref);
  std::printf("driver, 1 thread      : %8.3fs  %10.0f samples/s\n", sec_one,
              samples / sec_one);
  std::printf("driver, %2d threads    : %8.3fs  %10.0f samples/s\n",
              max_threads, sec_many, samples / sec_many);
  std::printf("speedup vs 1 thread   : %.2fx\n", sec_one / sec_many);
  std::printf("histograms: %s\n", identical ? "identical" : "MISMATCH");
  return identical ? 0 : 1;
}
