#ifndef CDOLD_SIMD_HPP
#define CDOLD_SIMD_HPP

#include <cstddef>

// Runtime-dispatched arithmetic kernels for the two data-parallel inner loops:
// the Poisson-binomial convolution step and batched probability tilting.
// Scalar variants are the reference; vector variants must be bit-identical
// (each lane performs the same IEEE operation sequence, fma included).

namespace cdold::simd {

enum class Backend { scalar, avx2 };

// Selected once per process: AVX2 when the CPU supports it, unless the
// CDO_LD_SIMD environment variable ("scalar" | "avx2") overrides.
Backend active_backend();
const char* backend_name(Backend b);

// One convolution step of the Poisson-binomial DP.  On entry pmf[0..n-1]
// holds the count distribution of the names processed so far and pmf[n] == 0;
// on exit pmf[0..n] holds the distribution with one more Bernoulli(p) added:
//   pmf[k] <- fma(pmf[k], 1-p, pmf[k-1]*p),  pmf[0] <- pmf[0]*(1-p).
void pb_convolve_step(double* pmf, std::size_t n, double p);
void pb_convolve_step_scalar(double* pmf, std::size_t n, double p);
void pb_convolve_step_avx2(double* pmf, std::size_t n, double p);

// out[i] = p[i]*e_lam / ((1 - p[i]) + p[i]*e_lam) with e_lam = exp(lambda)
// precomputed by the caller (finite, > 0).  In-place (out == p) is allowed.
void tilt_batch(const double* p, double* out, std::size_t n, double e_lam);
void tilt_batch_scalar(const double* p, double* out, std::size_t n, double e_lam);
void tilt_batch_avx2(const double* p, double* out, std::size_t n, double e_lam);

}  // namespace cdold::simd

#endif
