#include "ionsim/numeric.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

#include "ionsim/kernels.hpp"

namespace ionsim::num {

double one_norm(const cplx* a, std::size_t n) {
    std::vector<double> col(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const cplx* row = a + i * n;
        for (std::size_t j = 0; j < n; ++j) {
            col[j] += std::abs(row[j]);
        }
    }
    double best = 0.0;
    for (double c : col) best = std::max(best, c);
    return best;
}

double frobenius_norm(const cvec& a) {
    double s = 0.0;
    for (const cplx& v : a) s += std::norm(v);
    return std::sqrt(s);
}

namespace {

double block_norm(const cplx* y, std::size_t len) {
    double s = 0.0;
    for (std::size_t i = 0; i < len; ++i) s += std::norm(y[i]);
    return std::sqrt(s);
}

}  // namespace

LinearOperator dense_operator(const cplx* a, std::size_t n) {
    LinearOperator op;
    op.dim = n;
    op.norm1 = one_norm(a, n);
    op.apply = [a, n](const cplx* x, cplx* y, std::size_t k) {
        kern::active().cgemm_rhs(a, x, y, n, n, k);
    };
    return op;
}

void expm_apply_taylor(const LinearOperator& op, cplx* y, std::size_t k, double tol) {
    const std::size_t len = op.dim * k;
    if (op.norm1 == 0.0) return;

    int s = 0;
    double sub = op.norm1;
    while (sub > 1.0) {
        sub *= 0.5;
        ++s;
    }
    const double scale = std::ldexp(1.0, -s);
    const double step_tol = tol * scale;

    const auto& kr = kern::active();
    cvec term(len), tmp(len);
    for (long step = 0; step < (1L << s); ++step) {
        std::copy(y, y + len, term.begin());
        const double ref = block_norm(y, len);
        int quiet = 0;
        for (int j = 1; j <= 120; ++j) {
            op.apply(term.data(), tmp.data(), k);
            const cplx c(scale / j, 0.0);
            for (std::size_t i = 0; i < len; ++i) term[i] = c * tmp[i];
            kr.caxpy(cplx(1.0, 0.0), term.data(), y, len);
            if (block_norm(term.data(), len) <= step_tol * std::max(ref, 1e-300)) {
                if (++quiet >= 2) break;
            } else {
                quiet = 0;
            }
            if (j == 120) throw std::runtime_error("expm_apply_taylor: series did not converge");
        }
    }
}

void expm_apply_chebyshev(const LinearOperator& op, cplx* y, std::size_t k, double tol) {
    const double b = op.norm1;
    const std::size_t len = op.dim * k;
    if (b == 0.0) return;

    // exp(i b x) = sum_k (2 - delta_k0) i^k J_k(b) T_k(x) on x in [-1, 1],
    // applied with x = H/b, H = -iA. Coefficients below fold the i^k in.
    std::vector<double> bessel;
    bessel.reserve(static_cast<std::size_t>(b) + 48);
    int quiet = 0;
    for (int j = 0; j < 4000; ++j) {
        const double v = std::cyl_bessel_j(static_cast<double>(j), b);
        bessel.push_back(v);
        if (j > static_cast<int>(b) && std::abs(v) < tol * 1e-2) {
            if (++quiet >= 3) break;
        } else {
            quiet = 0;
        }
    }
    const std::size_t terms = bessel.size();

    const auto& kr = kern::active();
    // t_prev = T_0 y = y, t_cur = T_1 y = (H/b) y with H/b = -i A / b.
    cvec t_prev(y, y + len), t_cur(len), tmp(len), acc(len);
    op.apply(y, tmp.data(), k);
    const cplx hb(0.0, -1.0 / b);
    for (std::size_t i = 0; i < len; ++i) t_cur[i] = hb * tmp[i];

    static const cplx ipow[4] = {cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0, -1)};
    for (std::size_t i = 0; i < len; ++i) acc[i] = bessel[0] * t_prev[i];
    if (terms > 1) kr.caxpy(2.0 * ipow[1] * bessel[1], t_cur.data(), acc.data(), len);

    for (std::size_t j = 2; j < terms; ++j) {
        // t_next = 2 (H/b) t_cur - t_prev, reusing t_prev as the destination.
        op.apply(t_cur.data(), tmp.data(), k);
        const cplx two_hb = 2.0 * hb;
        for (std::size_t i = 0; i < len; ++i) t_prev[i] = two_hb * tmp[i] - t_prev[i];
        t_prev.swap(t_cur);
        kr.caxpy(2.0 * ipow[j & 3] * bessel[j], t_cur.data(), acc.data(), len);
    }
    std::copy(acc.begin(), acc.end(), y);
}

void expm_apply(const LinearOperator& op, cplx* y, std::size_t k, double tol) {
    if (op.norm1 <= 1e-14) return;
    if (op.norm1 <= 1.0) {
        expm_apply_taylor(op, y, k, tol);
    } else {
        expm_apply_chebyshev(op, y, k, tol);
    }
}

void expm_apply(const cplx* a, std::size_t n, cplx* y, std::size_t k, double tol) {
    expm_apply(dense_operator(a, n), y, k, tol);
}

void expm_apply_taylor(const cplx* a, std::size_t n, cplx* y, std::size_t k, double tol) {
    expm_apply_taylor(dense_operator(a, n), y, k, tol);
}

void expm_apply_chebyshev(const cplx* a, std::size_t n, cplx* y, std::size_t k, double tol) {
    expm_apply_chebyshev(dense_operator(a, n), y, k, tol);
}

std::size_t thread_count() {
    if (const char* env = std::getenv("IONSIM_THREADS")) {
        const long v = std::atol(env);
        if (v >= 1) return static_cast<std::size_t>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
    const std::size_t workers = std::min(thread_count(), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t state = seed ^ (0xA0761D6478BD642Full * (index + 1));
    std::uint64_t out = splitmix64(state);
    out ^= splitmix64(state);
    return out;
}

}  // namespace ionsim::num
