#include "ionsim/resources.hpp"

#include <stdexcept>

namespace ionsim::resources {

std::uint64_t two_qubit_cost_string(int order) {
    if (order < 2) throw std::invalid_argument("string order must be at least 2");
    return 2ull * static_cast<std::uint64_t>(order);
}

std::uint64_t two_qubit_cost_full_polynomial(int n_ions) {
    if (n_ions < 2) throw std::invalid_argument("polynomial cost needs at least 2 ions");
    if (n_ions > 60) throw std::invalid_argument("polynomial cost overflows past 60 ions");
    std::uint64_t total = 0;
    std::uint64_t binom = static_cast<std::uint64_t>(n_ions);  // C(N, 1)
    for (int n = 2; n <= n_ions; ++n) {
        binom = binom * static_cast<std::uint64_t>(n_ions - n + 1) / static_cast<std::uint64_t>(n);
        total += binom * two_qubit_cost_string(n);
    }
    return total;
}

NativeCost native_cost(const PulseSequence& seq) {
    NativeCost cost;
    for (const auto& op : seq.ops) {
        if (std::holds_alternative<DisplaceOp>(op)) {
            ++cost.displacements;
            cost.total_time += std::get<DisplaceOp>(op).duration;
        } else if (std::holds_alternative<SqueezeOp>(op)) {
            ++cost.squeezes;
            cost.total_time += std::get<SqueezeOp>(op).duration;
        } else if (std::holds_alternative<RotateOp>(op)) {
            ++cost.rotations;
            cost.total_time += std::get<RotateOp>(op).duration;
        } else {
            ++cost.preps;
        }
    }
    return cost;
}

std::vector<CostRow> compare(int n_min, int n_max) {
    if (n_min < 2 || n_max < n_min) throw std::invalid_argument("compare needs 2 <= n_min <= n_max");
    std::vector<CostRow> rows;
    for (int n = n_min; n <= n_max; ++n) {
        CostRow row;
        row.n_ions = n;
        row.native_ops = 4ull + 4ull * static_cast<std::uint64_t>(n > 2 ? n - 2 : 0);
        row.two_qubit_gates = two_qubit_cost_full_polynomial(n);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace ionsim::resources
