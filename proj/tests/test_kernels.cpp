#include <doctest.h>

#include <random>

#include "ionsim/kernels.hpp"
#include "ionsim/numeric.hpp"

using namespace ionsim;

namespace {

cvec random_cvec(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    cvec v(n);
    for (auto& x : v) x = cplx(dist(rng), dist(rng));
    return v;
}

// Reference product written independently of the kernel implementations.
cvec naive_gemv(const cvec& a, const cvec& x, std::size_t n, std::size_t m) {
    cvec y(n, cplx(0, 0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) y[i] += a[i * m + j] * x[j];
    }
    return y;
}

double max_abs_diff(const cvec& a, const cvec& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

}  // namespace

TEST_CASE("scalar cgemv matches a naive product") {
    const std::size_t n = 37, m = 41;
    const cvec a = random_cvec(n * m, 11);
    const cvec x = random_cvec(m, 12);
    cvec y(n);
    kern::scalar().cgemv(a.data(), x.data(), y.data(), n, m);
    CHECK(max_abs_diff(y, naive_gemv(a, x, n, m)) < 1e-13);
}

TEST_CASE("avx2 kernels agree with the scalar reference") {
    if (!kern::avx2_supported()) return;
    const auto& fast = kern::avx2();
    const auto& ref = kern::scalar();

    for (std::size_t n : {1u, 7u, 62u, 128u}) {
        const std::size_t m = n + 3;
        const cvec a = random_cvec(n * m, 100 + n);
        const cvec x = random_cvec(m, 200 + n);
        cvec y1(n), y2(n);
        ref.cgemv(a.data(), x.data(), y1.data(), n, m);
        fast.cgemv(a.data(), x.data(), y2.data(), n, m);
        CHECK(max_abs_diff(y1, y2) < 1e-12);

        for (std::size_t k : {1u, 2u, 5u, 6u, 17u}) {
            const cvec xb = random_cvec(m * k, 300 + n + k);
            cvec yb1(n * k), yb2(n * k);
            ref.cgemm_rhs(a.data(), xb.data(), yb1.data(), n, m, k);
            fast.cgemm_rhs(a.data(), xb.data(), yb2.data(), n, m, k);
            CHECK(max_abs_diff(yb1, yb2) < 1e-12);
        }

        cvec u1 = random_cvec(n, 400 + n);
        cvec u2 = u1;
        const cvec v = random_cvec(n, 500 + n);
        const cplx alpha(0.3, -1.2);
        ref.caxpy(alpha, v.data(), u1.data(), n);
        fast.caxpy(alpha, v.data(), u2.data(), n);
        CHECK(max_abs_diff(u1, u2) < 1e-12);
    }
}

TEST_CASE("cgemm_rhs reproduces column-by-column cgemv") {
    const auto& kr = kern::active();
    const std::size_t n = 24, m = 24, k = 6;
    const cvec a = random_cvec(n * m, 7);
    const cvec xb = random_cvec(m * k, 8);
    cvec yb(n * k);
    kr.cgemm_rhs(a.data(), xb.data(), yb.data(), n, m, k);
    for (std::size_t c = 0; c < k; ++c) {
        cvec x(m), y(n);
        for (std::size_t j = 0; j < m; ++j) x[j] = xb[j * k + c];
        kr.cgemv(a.data(), x.data(), y.data(), n, m);
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(y[i] - yb[i * k + c]) < 1e-12);
    }
}

TEST_CASE("Taylor and Chebyshev exponential actions agree on skew-Hermitian input") {
    const std::size_t n = 40;
    cvec a = random_cvec(n * n, 42);
    // project to the skew-Hermitian part and push the norm into Chebyshev range
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            const cplx v = 2.0 * (a[i * n + j] - std::conj(a[j * n + i]));
            a[i * n + j] = v;
            a[j * n + i] = -std::conj(v);
        }
    }
    const cvec x = random_cvec(n, 43);
    cvec y1 = x, y2 = x;
    num::expm_apply_taylor(a.data(), n, y1.data(), 1, 1e-13);
    num::expm_apply_chebyshev(a.data(), n, y2.data(), 1, 1e-13);
    CHECK(num::one_norm(a.data(), n) > 1.0);
    CHECK(max_abs_diff(y1, y2) < 1e-11);

    // unitarity: norm preserved
    double norm = 0.0;
    for (const auto& v : y2) norm += std::norm(v);
    double norm0 = 0.0;
    for (const auto& v : x) norm0 += std::norm(v);
    CHECK(std::abs(norm - norm0) < 1e-10 * norm0);
}

TEST_CASE("expm_apply handles the zero matrix") {
    const std::size_t n = 5;
    cvec a(n * n, cplx(0, 0));
    cvec x = random_cvec(n, 3);
    const cvec x0 = x;
    num::expm_apply(a.data(), n, x.data(), 1);
    CHECK(max_abs_diff(x, x0) == 0.0);
}

TEST_CASE("substream seeds differ across points and repeat across calls") {
    CHECK(num::substream_seed(7, 0) == num::substream_seed(7, 0));
    CHECK(num::substream_seed(7, 0) != num::substream_seed(7, 1));
    CHECK(num::substream_seed(7, 0) != num::substream_seed(8, 0));
}
