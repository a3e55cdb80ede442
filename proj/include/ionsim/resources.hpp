#pragma once

#include <cstdint>
#include <vector>

#include "ionsim/model.hpp"

namespace ionsim::resources {

// Two-qubit gates needed to synthesize a single Pauli string of order n.
std::uint64_t two_qubit_cost_string(int order);

// Sum over all string orders 2..N weighted by subset count:
// sum_{n=2}^{N} binomial(N, n) * 2n.
std::uint64_t two_qubit_cost_full_polynomial(int n_ions);

struct NativeCost {
    std::uint64_t displacements = 0;
    std::uint64_t squeezes = 0;
    std::uint64_t rotations = 0;
    std::uint64_t preps = 0;
    double total_time = 0.0;  // seconds, from op duration metadata
};

NativeCost native_cost(const PulseSequence& seq);

struct CostRow {
    int n_ions = 0;
    std::uint64_t native_ops = 0;      // displacement + squeeze count of the rectangle family
    std::uint64_t two_qubit_gates = 0;
};

// Entangling-op count of the squeezed-rectangle family (4 displacements plus
// 4 squeezes per middle ion) against the exponentially growing two-qubit
// decomposition, for N in [n_min, n_max].
std::vector<CostRow> compare(int n_min, int n_max);

}  // namespace ionsim::resources
