// Micro-benchmark for the dispatched kernels: Poisson-binomial convolution
// and batched tilting, scalar vs AVX2.  Wall-clock only, no framework.

#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include "cdold/simd.hpp"

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::vector<double> random_probs(std::size_t n) {
    std::mt19937_64 gen(12345);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = u(gen);
    return v;
}

template <class F>
void bench_pmf(const char* name, std::size_t n, F step) {
    std::vector<double> probs = random_probs(n);
    std::vector<double> pmf(n + 1, 0.0);
    auto t0 = clock_type::now();
    pmf[0] = 1.0;
    std::size_t k = 0;
    for (double p : probs) step(pmf.data(), ++k, p);
    double dt = seconds_since(t0);
    // The DP touches ~n^2/2 fused multiply-adds.
    double gflops = 1e-9 * (static_cast<double>(n) * n) / dt;
    std::printf("  %-8s N=%-6zu  %8.3f ms  %6.2f Gflop/s  (pmf[0]=%.3e)\n", name, n, dt * 1e3,
                gflops, pmf[0]);
}

template <class F>
void bench_tilt(const char* name, std::size_t n, int reps, F tilt) {
    std::vector<double> probs = random_probs(n);
    std::vector<double> out(n);
    auto t0 = clock_type::now();
    double sink = 0.0;
    for (int r = 0; r < reps; ++r) {
        tilt(probs.data(), out.data(), n, 1.8 + 1e-9 * r);
        sink += out[r % n];
    }
    double dt = seconds_since(t0);
    double gelems = 1e-9 * static_cast<double>(n) * reps / dt;
    std::printf("  %-8s N=%-6zu  %8.3f ms  %6.2f Gelem/s  (sink=%.3e)\n", name, n, dt * 1e3,
                gelems, sink);
}

}  // namespace

int main() {
    std::printf("active backend: %s\n", cdold::simd::backend_name(cdold::simd::active_backend()));

    std::printf("poisson-binomial convolution:\n");
    for (std::size_t n : {2000u, 10000u, 40000u}) {
        bench_pmf("scalar", n, cdold::simd::pb_convolve_step_scalar);
        bench_pmf("avx2", n, cdold::simd::pb_convolve_step_avx2);
    }

    std::printf("batched tilt:\n");
    for (std::size_t n : {1000u, 100000u}) {
        bench_tilt("scalar", n, 2000, cdold::simd::tilt_batch_scalar);
        bench_tilt("avx2", n, 2000, cdold::simd::tilt_batch_avx2);
    }
    return 0;
}
