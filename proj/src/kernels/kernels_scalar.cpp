#include "ionsim/kernels.hpp"

namespace ionsim::kern {
namespace {

void cgemv_scalar(const cplx* a, const cplx* x, cplx* y, std::size_t n, std::size_t m) {
    for (std::size_t i = 0; i < n; ++i) {
        const cplx* row = a + i * m;
        double re = 0.0, im = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            const double ar = row[j].real(), ai = row[j].imag();
            const double xr = x[j].real(), xi = x[j].imag();
            re += ar * xr - ai * xi;
            im += ar * xi + ai * xr;
        }
        y[i] = cplx(re, im);
    }
}

void cgemm_rhs_scalar(const cplx* a, const cplx* x, cplx* y, std::size_t n, std::size_t m,
                      std::size_t k) {
    for (std::size_t i = 0; i < n; ++i) {
        const cplx* row = a + i * m;
        cplx* out = y + i * k;
        for (std::size_t c = 0; c < k; ++c) {
            out[c] = cplx(0.0, 0.0);
        }
        for (std::size_t j = 0; j < m; ++j) {
            const double ar = row[j].real(), ai = row[j].imag();
            const cplx* xr = x + j * k;
            for (std::size_t c = 0; c < k; ++c) {
                const double vr = xr[c].real(), vi = xr[c].imag();
                out[c] += cplx(ar * vr - ai * vi, ar * vi + ai * vr);
            }
        }
    }
}

void caxpy_scalar(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
    const double ar = alpha.real(), ai = alpha.imag();
    for (std::size_t i = 0; i < n; ++i) {
        const double xr = x[i].real(), xi = x[i].imag();
        y[i] += cplx(ar * xr - ai * xi, ar * xi + ai * xr);
    }
}

}  // namespace

const Kernels& scalar() {
    static const Kernels table{"scalar", cgemv_scalar, cgemm_rhs_scalar, caxpy_scalar};
    return table;
}

}  // namespace ionsim::kern
