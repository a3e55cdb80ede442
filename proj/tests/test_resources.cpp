#include <doctest.h>

#include "ionsim/resources.hpp"
#include "ionsim/sequences.hpp"

using namespace ionsim;

TEST_CASE("string costs follow 2n") {
    CHECK(resources::two_qubit_cost_string(2) == 4);
    CHECK(resources::two_qubit_cost_string(3) == 6);
    CHECK(resources::two_qubit_cost_string(10) == 20);
    CHECK_THROWS_AS(resources::two_qubit_cost_string(1), std::invalid_argument);
}

TEST_CASE("full polynomial costs evaluate the binomial sum exactly") {
    CHECK(resources::two_qubit_cost_full_polynomial(2) == 4);
    CHECK(resources::two_qubit_cost_full_polynomial(3) == 18);
    CHECK(resources::two_qubit_cost_full_polynomial(4) == 56);
    CHECK_THROWS_AS(resources::two_qubit_cost_full_polynomial(1), std::invalid_argument);
}

TEST_CASE("subset enumeration agrees with the closed sum up to 12 ions") {
    for (int n = 2; n <= 12; ++n) {
        std::uint64_t brute = 0;
        for (std::uint32_t subset = 0; subset < (1u << n); ++subset) {
            const int order = __builtin_popcount(subset);
            if (order >= 2) brute += resources::two_qubit_cost_string(order);
        }
        CHECK(brute == resources::two_qubit_cost_full_polynomial(n));
    }
}

TEST_CASE("comparison table is monotone and matches the builder counts") {
    const auto rows = resources::compare(2, 20);
    CHECK(rows[0].native_ops == 4);
    CHECK(rows[0].two_qubit_gates == 4);
    CHECK(rows[1].native_ops == 8);
    CHECK(rows[1].two_qubit_gates == 18);
    CHECK(rows[2].native_ops == 12);
    CHECK(rows[2].two_qubit_gates == 56);
    double last_ratio = 0.0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i].two_qubit_gates > rows[i - 1].two_qubit_gates);
        const double ratio = static_cast<double>(rows[i].two_qubit_gates) / rows[i].native_ops;
        CHECK(ratio > last_ratio);
        last_ratio = ratio;
    }

    // builder histograms match the table's native column
    const auto c3 = resources::native_cost(squeezed_rectangle_3(preset_chain(3), 1.0, 0.2));
    CHECK(c3.displacements + c3.squeezes == rows[1].native_ops);
    const auto c4 = resources::native_cost(squeezed_rectangle_4(preset_chain(4), 1.0, 0.2, 0.1));
    CHECK(c4.displacements + c4.squeezes == rows[2].native_ops);
}
