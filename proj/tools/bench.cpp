// Benchmark comparing the OpenMP sweep/probe kernels against their serial
// reference implementations, checking that both produce identical output.

#include <chrono>
#include <cstdio>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "spshare/analysis.hpp"
#include "spshare/scenario.hpp"
#include "spshare/table_io.hpp"

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

} // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
  std::printf("built without OpenMP; comparing two serial runs\n");
#endif

  spshare::SweepSpec spec;
  spec.size_a = 0.3;
  spec.size_ab = 0.5;
  spec.size_b = 0.2;
  spec.w_min = 0.005;
  spec.w_max = 2.0;
  spec.w_step = 0.0005;
  spec.include_cooperation = true;

  auto t0 = std::chrono::steady_clock::now();
  const spshare::SweepTable serial = spshare::sweep_serial(spec);
  const double t_serial = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  const spshare::SweepTable parallel = spshare::sweep(spec);
  const double t_parallel = seconds_since(t0);

  const std::string csv_serial =
      spshare::emit_sweep_csv(serial, spshare::Mode::kBoth);
  const std::string csv_parallel =
      spshare::emit_sweep_csv(parallel, spshare::Mode::kBoth);

  std::printf("sweep rows: %zu\n", serial.rows.size());
  std::printf("  serial:   %.3f s (%.0f rows/s)\n", t_serial,
              serial.rows.size() / t_serial);
  std::printf("  parallel: %.3f s (%.0f rows/s, speedup %.2fx)\n", t_parallel,
              parallel.rows.size() / t_parallel, t_serial / t_parallel);
  std::printf("  identical output: %s\n",
              csv_serial == csv_parallel ? "yes" : "NO");

  const spshare::MarketConfig cfg{0.3, 0.5, 0.2, 0.6};
  const int starts = 400;

  t0 = std::chrono::steady_clock::now();
  const spshare::ProbeResult probe_serial =
      spshare::multistart_probe_serial(cfg, starts, 7);
  const double p_serial = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  const spshare::ProbeResult probe_parallel =
      spshare::multistart_probe(cfg, starts, 7);
  const double p_parallel = seconds_since(t0);

  std::printf("multi-start probe (%d starts):\n", starts);
  std::printf("  serial:   %.3f s\n", p_serial);
  std::printf("  parallel: %.3f s (speedup %.2fx)\n", p_parallel,
              p_serial / p_parallel);
  std::printf("  identical result: %s\n",
              probe_serial.max_pairwise_distance ==
                          probe_parallel.max_pairwise_distance &&
                      probe_serial.max_residual == probe_parallel.max_residual
                  ? "yes"
                  : "NO");

  return csv_serial == csv_parallel ? 0 : 1;
}
