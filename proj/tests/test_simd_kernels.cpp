#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "cdold/simd.hpp"

using namespace cdold;
using Catch::Approx;

namespace {

std::vector<double> random_probs(std::size_t n, unsigned seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = u(gen);
    return v;
}

}  // namespace

TEST_CASE("backend detection reports a valid backend") {
    simd::Backend b = simd::active_backend();
    REQUIRE((b == simd::Backend::scalar || b == simd::Backend::avx2));
    REQUIRE(simd::backend_name(b) != nullptr);
}

TEST_CASE("pb convolve step: scalar and avx2 variants are bit-identical") {
    for (std::size_t n : {1u, 2u, 3u, 4u, 5u, 7u, 8u, 31u, 128u, 1001u}) {
        std::vector<double> base = random_probs(n + 1, 42 + static_cast<unsigned>(n));
        base[n] = 0.0;
        for (double p : {0.0, 1e-9, 0.3, 0.97, 1.0}) {
            std::vector<double> a = base, b = base;
            simd::pb_convolve_step_scalar(a.data(), n, p);
            simd::pb_convolve_step_avx2(b.data(), n, p);
            for (std::size_t k = 0; k <= n; ++k) REQUIRE(a[k] == b[k]);
        }
    }
}

TEST_CASE("pb convolve step matches the direct convolution") {
    std::vector<double> pmf = {1.0, 0.0, 0.0, 0.0};
    simd::pb_convolve_step(pmf.data(), 1, 0.25);
    simd::pb_convolve_step(pmf.data(), 2, 0.5);
    simd::pb_convolve_step(pmf.data(), 3, 0.75);
    // Direct enumeration of three Bernoullis (0.25, 0.5, 0.75).
    double q1 = 0.75, q2 = 0.5, q3 = 0.25;
    REQUIRE(pmf[0] == Approx(q1 * q2 * q3).margin(1e-16));
    REQUIRE(pmf[3] == Approx(0.25 * 0.5 * 0.75).margin(1e-16));
    REQUIRE(pmf[0] + pmf[1] + pmf[2] + pmf[3] == Approx(1.0).margin(1e-15));
}

TEST_CASE("tilt batch: scalar and avx2 variants are bit-identical") {
    for (std::size_t n : {1u, 3u, 4u, 9u, 64u, 513u}) {
        std::vector<double> p = random_probs(n, 7 + static_cast<unsigned>(n));
        p.front() = 0.0;
        if (n > 1) p.back() = 1.0;
        for (double lam : {-30.0, -1.0, 0.0, 0.5848, 4.0, 50.0}) {
            std::vector<double> a(n), b(n);
            double e = std::exp(lam);
            simd::tilt_batch_scalar(p.data(), a.data(), n, e);
            simd::tilt_batch_avx2(p.data(), b.data(), n, e);
            for (std::size_t i = 0; i < n; ++i) REQUIRE(a[i] == b[i]);
        }
    }
}

TEST_CASE("tilt batch evaluates the tilt formula") {
    std::vector<double> p = {0.0, 0.02, 0.5, 0.98, 1.0};
    std::vector<double> out(p.size());
    double lam = 0.5848;
    simd::tilt_batch(p.data(), out.data(), p.size(), std::exp(lam));
    REQUIRE(out[0] == 0.0);
    REQUIRE(out[4] == 1.0);
    for (std::size_t i = 1; i < 4; ++i) {
        double expect = p[i] * std::exp(lam) / (1.0 - p[i] + p[i] * std::exp(lam));
        REQUIRE(out[i] == Approx(expect).epsilon(1e-15));
    }
    REQUIRE(out[1] == Approx(0.035331135434066397).margin(1e-12));
}

TEST_CASE("tilt batch works in place") {
    std::vector<double> p = random_probs(100, 5);
    std::vector<double> expect(100);
    simd::tilt_batch(p.data(), expect.data(), 100, 2.0);
    simd::tilt_batch(p.data(), p.data(), 100, 2.0);
    for (std::size_t i = 0; i < 100; ++i) REQUIRE(p[i] == expect[i]);
}
