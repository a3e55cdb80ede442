// AVX2+FMA variants of the complex kernels. This translation unit is the only
// one compiled with -mavx2 -mfma; callers must check avx2_supported() (the
// dispatcher in kernels_dispatch.cpp does).

#include "ionsim/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define IONSIM_X86 1
#else
#define IONSIM_X86 0
#endif

#if IONSIM_X86

#include <immintrin.h>

namespace ionsim::kern {
namespace {

// One step of y_acc += a * x for two packed complex doubles.
// Even lanes carry real parts, odd lanes imaginary parts.
inline __m256d cmul_acc(__m256d acc, __m256d ar, __m256d ai, __m256d x) {
    __m256d xs = _mm256_permute_pd(x, 0x5);          // swap re/im in each pair
    __m256d t = _mm256_mul_pd(ai, xs);               // [ai*xi, ai*xr, ...]
    return _mm256_add_pd(acc, _mm256_fmaddsub_pd(ar, x, t));
}

void cgemv_avx2(const cplx* a, const cplx* x, cplx* y, std::size_t n, std::size_t m) {
    const double* xd = reinterpret_cast<const double*>(x);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = reinterpret_cast<const double*>(a + i * m);
        __m256d acc = _mm256_setzero_pd();
        std::size_t j = 0;
        for (; j + 2 <= m; j += 2) {
            __m256d av = _mm256_loadu_pd(row + 2 * j);
            __m256d xv = _mm256_loadu_pd(xd + 2 * j);
            acc = cmul_acc(acc, _mm256_unpacklo_pd(av, av), _mm256_unpackhi_pd(av, av), xv);
        }
        double buf[4];
        _mm256_storeu_pd(buf, acc);
        double re = buf[0] + buf[2];
        double im = buf[1] + buf[3];
        for (; j < m; ++j) {
            const cplx aj = a[i * m + j];
            re += aj.real() * x[j].real() - aj.imag() * x[j].imag();
            im += aj.real() * x[j].imag() + aj.imag() * x[j].real();
        }
        y[i] = cplx(re, im);
    }
}

void cgemm_rhs_avx2(const cplx* a, const cplx* x, cplx* y, std::size_t n, std::size_t m,
                    std::size_t k) {
    if (k == 1) {
        cgemv_avx2(a, x, y, n, m);
        return;
    }
    const std::size_t kv = k / 2;       // vectorized column pairs
    const std::size_t krem = k % 2;
    const double* xd = reinterpret_cast<const double*>(x);
    for (std::size_t i = 0; i < n; ++i) {
        const cplx* row = a + i * m;
        __m256d acc[8];
        const std::size_t nv = kv > 8 ? 8 : kv;  // register budget; larger k falls back below
        if (kv <= 8) {
            for (std::size_t c = 0; c < nv; ++c) acc[c] = _mm256_setzero_pd();
            double tail_re = 0.0, tail_im = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                const double arr = row[j].real(), aii = row[j].imag();
                __m256d ar = _mm256_set1_pd(arr);
                __m256d ai = _mm256_set1_pd(aii);
                const double* xrow = xd + 2 * j * k;
                for (std::size_t c = 0; c < nv; ++c) {
                    acc[c] = cmul_acc(acc[c], ar, ai, _mm256_loadu_pd(xrow + 4 * c));
                }
                if (krem) {
                    const cplx xv = x[j * k + k - 1];
                    tail_re += arr * xv.real() - aii * xv.imag();
                    tail_im += arr * xv.imag() + aii * xv.real();
                }
            }
            double* out = reinterpret_cast<double*>(y + i * k);
            for (std::size_t c = 0; c < nv; ++c) _mm256_storeu_pd(out + 4 * c, acc[c]);
            if (krem) y[i * k + k - 1] = cplx(tail_re, tail_im);
        } else {
            // Wide blocks are outside the hot path; reuse the pairwise loop.
            for (std::size_t c = 0; c < k; ++c) y[i * k + c] = cplx(0.0, 0.0);
            for (std::size_t j = 0; j < m; ++j) {
                const double arr = row[j].real(), aii = row[j].imag();
                for (std::size_t c = 0; c < k; ++c) {
                    const cplx xv = x[j * k + c];
                    y[i * k + c] += cplx(arr * xv.real() - aii * xv.imag(),
                                         arr * xv.imag() + aii * xv.real());
                }
            }
        }
    }
}

void caxpy_avx2(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
    __m256d ar = _mm256_set1_pd(alpha.real());
    __m256d ai = _mm256_set1_pd(alpha.imag());
    const double* xd = reinterpret_cast<const double*>(x);
    double* yd = reinterpret_cast<double*>(y);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d yv = _mm256_loadu_pd(yd + 2 * i);
        yv = cmul_acc(yv, ar, ai, _mm256_loadu_pd(xd + 2 * i));
        _mm256_storeu_pd(yd + 2 * i, yv);
    }
    for (; i < n; ++i) {
        y[i] += alpha * x[i];
    }
}

}  // namespace

const Kernels& avx2() {
    static const Kernels table{"avx2", cgemv_avx2, cgemm_rhs_avx2, caxpy_avx2};
    return table;
}

bool avx2_supported() {
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

}  // namespace ionsim::kern

#else  // non-x86 builds fall back to the scalar table

namespace ionsim::kern {

const Kernels& avx2() { return scalar(); }
bool avx2_supported() { return false; }

}  // namespace ionsim::kern

#endif
