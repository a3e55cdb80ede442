#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

#include "ionsim/types.hpp"

namespace ionsim::num {

// Maximum column sum of magnitudes; upper bound for the spectral radius of a
// skew-Hermitian matrix.
double one_norm(const cplx* a, std::size_t n);

// Skew-Hermitian operator given by its action y = A x on k-column blocks
// (row-major n x k) plus a one-norm bound on its spectrum.
struct LinearOperator {
    std::size_t dim = 0;
    double norm1 = 0.0;
    std::function<void(const cplx* x, cplx* y, std::size_t k)> apply;
};

LinearOperator dense_operator(const cplx* a, std::size_t n);

// Y <- exp(A) Y for a skew-Hermitian A; Y holds k columns in row-major
// n x k layout. Uses a truncated Taylor series with scaling for small norms
// and a Chebyshev (Jacobi-Anger) expansion otherwise; both target a relative
// tolerance of 1e-12.
void expm_apply(const LinearOperator& op, cplx* y, std::size_t k, double tol = 1e-12);
void expm_apply(const cplx* a, std::size_t n, cplx* y, std::size_t k, double tol = 1e-12);

// Individual routes, exposed so tests can cross-check them.
void expm_apply_taylor(const LinearOperator& op, cplx* y, std::size_t k, double tol);
void expm_apply_chebyshev(const LinearOperator& op, cplx* y, std::size_t k, double tol);
void expm_apply_taylor(const cplx* a, std::size_t n, cplx* y, std::size_t k, double tol);
void expm_apply_chebyshev(const cplx* a, std::size_t n, cplx* y, std::size_t k, double tol);

double frobenius_norm(const cvec& a);

// Runs fn(i) for i in [0, count). Work is partitioned over std::thread
// workers (IONSIM_THREADS overrides the count); every index writes only its
// own outputs, so results do not depend on the schedule.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

std::size_t thread_count();

// SplitMix64 step; used to derive independent substream seeds.
std::uint64_t splitmix64(std::uint64_t& state);

// Seed for scan point `index` of a run seeded with `seed`. Points get
// decorrelated streams and parallel evaluation matches serial evaluation.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace ionsim::num
