#include <doctest.h>

#include <cmath>

#include "ionsim/branch.hpp"
#include "ionsim/model.hpp"
#include "ionsim/resources.hpp"
#include "ionsim/sequences.hpp"

using namespace ionsim;

TEST_CASE("builders emit the advertised op histograms") {
    const ChainConfig c3 = preset_chain(3);
    const ChainConfig c4 = preset_chain(4);

    const auto ms = resources::native_cost(ms_rectangle(c3, 0.5));
    CHECK(ms.displacements == 4);
    CHECK(ms.squeezes == 0);
    CHECK(ms.rotations == 4);

    const auto r3 = resources::native_cost(squeezed_rectangle_3(c3, 0.5, 0.2));
    CHECK(r3.displacements == 4);
    CHECK(r3.squeezes == 4);

    const auto r4 = resources::native_cost(squeezed_rectangle_4(c4, 0.5, 0.2, 0.1));
    CHECK(r4.displacements == 4);
    CHECK(r4.squeezes == 8);
}

TEST_CASE("squeezed rectangle total time stays under 300 microseconds") {
    const ChainConfig chain = preset_chain(3);
    const double t = total_duration(squeezed_rectangle_3(chain, 1.0, 0.27));
    CHECK(t < 300e-6);
    CHECK(t > 200e-6);
}

TEST_CASE("every built sequence closes all branches") {
    const ChainConfig c3 = preset_chain(3);
    const ChainConfig c4 = preset_chain(4);
    for (double phi0 : {0.0, 0.4, 1.7, pi}) {
        for (double xi : {0.0, 0.2, 0.5}) {
            for (XIndex c = 0; c < 8; ++c) {
                const auto r = run_branch(squeezed_rectangle_3(c3, phi0, xi), c);
                CHECK(r.closed);
            }
            for (XIndex c = 0; c < 16; ++c) {
                const auto r = run_branch(squeezed_rectangle_4(c4, phi0, xi, 0.3), c);
                CHECK(r.closed);
            }
        }
    }
}

TEST_CASE("xi = 0 squeezed rectangle equals the plain MS gate") {
    const ChainConfig chain = preset_chain(3);
    const auto u1 = effective_unitary(ms_rectangle(chain, 0.8));
    const auto u2 = effective_unitary(squeezed_rectangle_3(chain, 0.8, 0.0));
    for (std::size_t i = 0; i < u1.x_phase_factors.size(); ++i) {
        CHECK(std::abs(u1.x_phase_factors[i] - u2.x_phase_factors[i]) < 1e-12);
    }
}

TEST_CASE("zeta = 0 four-ion gate reduces to the three-body structure") {
    const ChainConfig chain = preset_chain(4);
    const auto poly = extract_polynomial(
        geometric_phases(squeezed_rectangle_4(chain, 1.0, 0.3, 0.0)), 4);
    CHECK(std::abs(poly.coefficient(0b1001)) == doctest::Approx(std::cosh(0.3)).epsilon(1e-9));
    CHECK(std::abs(poly.coefficient(0b1011)) == doctest::Approx(std::sinh(0.3)).epsilon(1e-9));
    CHECK(poly.coefficient(0b1101) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(poly.coefficient(0b1111) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("xi = zeta = 0 four-ion gate is a pairwise gate on the edges") {
    const ChainConfig chain = preset_chain(4);
    const auto poly = extract_polynomial(
        geometric_phases(squeezed_rectangle_4(chain, 0.7, 0.0, 0.0)), 4);
    CHECK(std::abs(poly.coefficient(0b1001)) == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(poly.terms.size() == 1);
}

TEST_CASE("four-ion coefficient ratios follow tanh") {
    const ChainConfig chain = preset_chain(4);
    const double xi = 0.34, zeta = 0.29;
    const auto poly = extract_polynomial(
        geometric_phases(squeezed_rectangle_4(chain, 1.0, xi, zeta)), 4);
    const double c2 = std::abs(poly.coefficient(0b1001));
    CHECK(std::abs(poly.coefficient(0b1011)) / c2 == doctest::Approx(std::tanh(xi)).epsilon(1e-10));
    CHECK(std::abs(poly.coefficient(0b1111)) / c2 ==
          doctest::Approx(std::tanh(xi) * std::tanh(zeta)).epsilon(1e-10));
}

TEST_CASE("pure three-body solve inverts the closed forms") {
    const auto p = solve_pure_three_body(pi / 4.0);
    CHECK(p.xi == doctest::Approx(std::atanh(0.25)).epsilon(1e-12));
    CHECK(p.phi0 == doctest::Approx(pi / std::cosh(p.xi)).epsilon(1e-12));

    // small target angle degenerates to xi -> 0, phi0 -> pi
    const auto small = solve_pure_three_body(1e-6);
    CHECK(small.xi == doctest::Approx(0.0).epsilon(1e-5));
    CHECK(small.phi0 == doctest::Approx(pi).epsilon(1e-9));

    CHECK_THROWS_AS(solve_pure_three_body(pi), std::invalid_argument);
    CHECK_THROWS_AS(solve_pure_three_body(0.0), std::invalid_argument);
}

TEST_CASE("pure three-body polynomial has a pi two-body and phi3 three-body term") {
    const ChainConfig chain = preset_chain(3);
    const double phi3 = pi / 4.0;
    const auto poly = extract_polynomial(geometric_phases(pure_three_body(chain, phi3)), 3);
    CHECK(std::abs(poly.coefficient(0b101)) == doctest::Approx(pi).epsilon(1e-12));
    CHECK(std::abs(poly.coefficient(0b111)) == doctest::Approx(phi3).epsilon(1e-12));
}

TEST_CASE("with_prep replaces preps and keeps them in front") {
    const ChainConfig chain = preset_chain(3);
    PulseSequence seq = with_prep(ms_rectangle(chain, 0.5),
                                  {{PrepBasis::Z, false}, {PrepBasis::X, true}, {PrepBasis::Z, true}});
    seq = with_prep(std::move(seq),
                    {{PrepBasis::Z, true}, {PrepBasis::Z, false}, {PrepBasis::Z, false}});
    CHECK(validate_sequence(seq).empty());
    int preps = 0;
    for (const auto& op : seq.ops) {
        if (std::holds_alternative<PrepOp>(op)) ++preps;
    }
    CHECK(preps == 3);
    CHECK_THROWS_AS(with_prep(ms_rectangle(chain, 0.5), {{PrepBasis::Z, false}}),
                    std::invalid_argument);
}

TEST_CASE("analysis rotations are appended on every ion") {
    const ChainConfig chain = preset_chain(3);
    const PulseSequence seq = with_analysis_rotations(ms_rectangle(chain, 0.5), 0.3);
    int rotations_at_end = 0;
    for (std::size_t i = seq.ops.size() - 3; i < seq.ops.size(); ++i) {
        if (const auto* r = std::get_if<RotateOp>(&seq.ops[i])) {
            CHECK(r->axis_angle == 0.3);
            CHECK(r->rotation_angle == doctest::Approx(pi / 2.0));
            ++rotations_at_end;
        }
    }
    CHECK(rotations_at_end == 3);
}

TEST_CASE("reversed sandwich flips the sign of the odd terms") {
    const ChainConfig chain = preset_chain(3);
    BuildOptions rev;
    rev.reversed_sandwich = true;
    const auto normal = extract_polynomial(
        geometric_phases(squeezed_rectangle_3(chain, 1.0, 0.3)), 3);
    const auto flipped = extract_polynomial(
        geometric_phases(squeezed_rectangle_3(chain, 1.0, 0.3, rev)), 3);
    CHECK(normal.coefficient(0b101) == doctest::Approx(flipped.coefficient(0b101)).epsilon(1e-12));
    CHECK(normal.coefficient(0b111) ==
          doctest::Approx(-flipped.coefficient(0b111)).epsilon(1e-12));
}

TEST_CASE("displaced ions are the chain edges") {
    const ChainConfig chain = preset_chain(4);
    const auto ions = displaced_ions(squeezed_rectangle_4(chain, 0.5, 0.1, 0.1));
    CHECK(ions == std::vector<int>{0, 3});
}
