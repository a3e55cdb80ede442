#pragma once

#include <cstddef>

#include "ionsim/types.hpp"

namespace ionsim::kern {

// Complex double-precision linear-algebra primitives used by the Fock-space
// propagators. Two implementations are provided: a scalar reference and an
// AVX2+FMA variant. The active table is selected once at startup from CPU
// capabilities; set IONSIM_KERNEL=scalar|avx2 to override.
//
// Matrices are dense row-major. Multi-vector blocks X/Y hold k columns per
// row contiguously (row-major n x k), so one sweep over A updates all
// columns.
struct Kernels {
    const char* name;
    // y = A x, A is n x m
    void (*cgemv)(const cplx* a, const cplx* x, cplx* y, std::size_t n, std::size_t m);
    // Y = A X, A is n x m, X is m x k, Y is n x k
    void (*cgemm_rhs)(const cplx* a, const cplx* x, cplx* y, std::size_t n, std::size_t m,
                      std::size_t k);
    // y += alpha * x
    void (*caxpy)(cplx alpha, const cplx* x, cplx* y, std::size_t n);
};

const Kernels& scalar();
const Kernels& avx2();
bool avx2_supported();

// Runtime-selected table (stable for the lifetime of the process).
const Kernels& active();

}  // namespace ionsim::kern
