#include "cdold/simd.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>

#if defined(__x86_64__) || defined(__i386__)
#define CDOLD_X86 1
#include <immintrin.h>
#else
#define CDOLD_X86 0
#endif

namespace cdold::simd {

namespace {

Backend detect_backend() {
    if (const char* env = std::getenv("CDO_LD_SIMD")) {
        if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
        if (std::strcmp(env, "avx2") == 0) return Backend::avx2;
    }
#if CDOLD_X86
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return Backend::avx2;
#endif
    return Backend::scalar;
}

}  // namespace

Backend active_backend() {
    static const Backend b = detect_backend();
    return b;
}

const char* backend_name(Backend b) {
    return b == Backend::avx2 ? "avx2" : "scalar";
}

// ----------------------------------------------------------------------------
// Poisson-binomial convolution step
// ----------------------------------------------------------------------------

void pb_convolve_step_scalar(double* pmf, std::size_t n, double p) {
    const double q = 1.0 - p;
    for (std::size_t k = n; k >= 1; --k) pmf[k] = std::fma(pmf[k], q, pmf[k - 1] * p);
    pmf[0] *= q;
}

#if CDOLD_X86
__attribute__((target("avx2,fma"))) void pb_convolve_step_avx2(double* pmf, std::size_t n, double p) {
    const double q = 1.0 - p;
    std::size_t k = n;
    const __m256d qv = _mm256_set1_pd(q);
    const __m256d pv = _mm256_set1_pd(p);
    // Descending blocks of 4: the store at [k-3, k] never overlaps the next
    // block's loads at [k-8, k-4].
    while (k >= 4) {
        __m256d cur = _mm256_loadu_pd(pmf + k - 3);
        __m256d prev = _mm256_loadu_pd(pmf + k - 4);
        _mm256_storeu_pd(pmf + k - 3, _mm256_fmadd_pd(cur, qv, _mm256_mul_pd(prev, pv)));
        k -= 4;
    }
    for (; k >= 1; --k) pmf[k] = std::fma(pmf[k], q, pmf[k - 1] * p);
    pmf[0] *= q;
}
#else
void pb_convolve_step_avx2(double* pmf, std::size_t n, double p) {
    pb_convolve_step_scalar(pmf, n, p);
}
#endif

void pb_convolve_step(double* pmf, std::size_t n, double p) {
    if (active_backend() == Backend::avx2)
        pb_convolve_step_avx2(pmf, n, p);
    else
        pb_convolve_step_scalar(pmf, n, p);
}

// ----------------------------------------------------------------------------
// Batched tilt
// ----------------------------------------------------------------------------

void tilt_batch_scalar(const double* p, double* out, std::size_t n, double e_lam) {
    for (std::size_t i = 0; i < n; ++i) {
        const double t = p[i] * e_lam;
        const double d = (1.0 - p[i]) + t;
        out[i] = t / d;
    }
}

#if CDOLD_X86
__attribute__((target("avx2"))) void tilt_batch_avx2(const double* p, double* out, std::size_t n,
                                                     double e_lam) {
    const __m256d ev = _mm256_set1_pd(e_lam);
    const __m256d one = _mm256_set1_pd(1.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d pv = _mm256_loadu_pd(p + i);
        __m256d t = _mm256_mul_pd(pv, ev);
        __m256d d = _mm256_add_pd(_mm256_sub_pd(one, pv), t);
        _mm256_storeu_pd(out + i, _mm256_div_pd(t, d));
    }
    for (; i < n; ++i) {
        const double t = p[i] * e_lam;
        const double d = (1.0 - p[i]) + t;
        out[i] = t / d;
    }
}
#else
void tilt_batch_avx2(const double* p, double* out, std::size_t n, double e_lam) {
    tilt_batch_scalar(p, out, n, e_lam);
}
#endif

void tilt_batch(const double* p, double* out, std::size_t n, double e_lam) {
    if (active_backend() == Backend::avx2)
        tilt_batch_avx2(p, out, n, e_lam);
    else
        tilt_batch_scalar(p, out, n, e_lam);
}

}  // namespace cdold::simd
