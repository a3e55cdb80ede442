#include <doctest.h>

#include <cmath>

#include "ionsim/model.hpp"
#include "ionsim/sequences.hpp"

using namespace ionsim;

TEST_CASE("3-ion preset matches the published chain data") {
    const ChainConfig chain = preset_chain(3);
    CHECK(chain.n_ions == 3);
    CHECK(chain.mode_frequencies[0] == doctest::Approx(two_pi * 2.817e6));
    CHECK(chain.mode_frequencies[2] == doctest::Approx(two_pi * 3.03e6));
    CHECK(chain.lamb_dicke_scale == 0.08);
    CHECK(chain.rabi_max == doctest::Approx(two_pi * 1e6));
    // raw (0.41, 0.82, 0.41) normalized; eta for the middle ion on the target
    // mode is 0.08 * 0.82 up to that normalization
    CHECK(chain.lamb_dicke(1, 0) == doctest::Approx(0.0656).epsilon(1e-2));
    const double col_ratio = chain.participation(1, 0) / chain.participation(0, 0);
    CHECK(col_ratio == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(chain.synthetic_mode == std::vector<bool>{false, true, false});
    chain.check();
}

TEST_CASE("4-ion preset carries the alternating participation signs") {
    const ChainConfig chain = preset_chain(4);
    CHECK(chain.mode_frequencies[0] == doctest::Approx(two_pi * 2.781e6));
    CHECK(chain.participation(0, 0) > 0.0);
    CHECK(chain.participation(1, 0) < 0.0);
    CHECK(chain.participation(2, 0) > 0.0);
    CHECK(chain.participation(3, 0) < 0.0);
    CHECK(std::abs(chain.participation(1, 0) / chain.participation(0, 0)) ==
          doctest::Approx(0.67 / 0.21).epsilon(1e-12));
    chain.check();
    CHECK_THROWS_AS(preset_chain(5), std::invalid_argument);
}

TEST_CASE("preset mode columns are exactly orthonormal after renormalization") {
    for (int n : {3, 4}) {
        const ChainConfig chain = preset_chain(n);
        const int modes = static_cast<int>(chain.mode_frequencies.size());
        for (int k = 0; k < modes; ++k) {
            double norm = 0.0;
            for (int i = 0; i < n; ++i) norm += chain.participation(i, k) * chain.participation(i, k);
            CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("validate_sequence reports the spec'd diagnostics") {
    PulseSequence seq;
    seq.chain = preset_chain(3);
    CHECK(validate_sequence(seq).empty());

    DisplaceOp d;
    d.ion = 3;  // out of range
    seq.ops.push_back(d);
    auto diags = validate_sequence(seq);
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].find("ion index out of range") != std::string::npos);

    seq.ops.clear();
    DisplaceOp ok;
    ok.ion = 0;
    seq.ops.push_back(ok);
    PrepOp late;
    late.ion = 1;
    seq.ops.push_back(late);
    diags = validate_sequence(seq);
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].find("prep after dynamics") != std::string::npos);

    seq.ops.clear();
    SqueezeOp s;
    s.ion = 1;
    s.xi = 0.2;
    s.motional_phase = 0.3;
    seq.ops.push_back(s);
    diags = validate_sequence(seq);
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].find("motional phase") != std::string::npos);
}

TEST_CASE("sequence files round-trip exactly") {
    const ChainConfig chain = preset_chain(3);
    PulseSequence seq = with_prep(squeezed_rectangle_3(chain, 0.8, 0.27),
                                  {{PrepBasis::Z, false}, {PrepBasis::X, true}, {PrepBasis::Z, false}});
    seq = with_analysis_rotations(seq, 0.4);
    const std::string text = sequence_to_json(seq);
    const PulseSequence back = sequence_from_json(text);
    CHECK(sequences_equal(seq, back));
    // and the serialization itself is stable
    CHECK(sequence_to_json(back) == text);
}

TEST_CASE("chain files round-trip") {
    const ChainConfig chain = preset_chain(4);
    const ChainConfig back = chain_from_json(chain_to_json(chain));
    CHECK(back.n_ions == 4);
    CHECK(back.mode_frequencies == chain.mode_frequencies);
    CHECK(back.participation_data == chain.participation_data);
}

TEST_CASE("prep parsing accepts u/d with z/x and rejects junk") {
    const auto prep = parse_prep("dz,ux,dx", 3);
    CHECK(prep[0].basis == PrepBasis::Z);
    CHECK_FALSE(prep[0].up);
    CHECK(prep[1].basis == PrepBasis::X);
    CHECK(prep[1].up);
    CHECK(prep_to_string(prep) == "dz,ux,dx");
    CHECK_THROWS_AS(parse_prep("dz,ux", 3), std::invalid_argument);
    CHECK_THROWS_AS(parse_prep("qz,ux,dx", 3), std::invalid_argument);
}

TEST_CASE("prep_state builds the expected product amplitudes") {
    const cvec all_down = prep_state(std::vector<PrepSpec>(2, {PrepBasis::Z, false}));
    CHECK(all_down[0b00] == cplx(1.0, 0.0));

    const cvec up_x = prep_state({{PrepBasis::X, true}, {PrepBasis::Z, true}});
    // ion 0 in (|u> + |d>)/sqrt(2), ion 1 up: indices 0b10 and 0b11
    CHECK(std::abs(up_x[0b10] - cplx(1.0 / std::sqrt(2.0), 0.0)) < 1e-15);
    CHECK(std::abs(up_x[0b11] - cplx(1.0 / std::sqrt(2.0), 0.0)) < 1e-15);

    const cvec down_x = prep_state({{PrepBasis::X, false}, {PrepBasis::Z, false}});
    CHECK(std::abs(down_x[0b01] - cplx(1.0 / std::sqrt(2.0), 0.0)) < 1e-15);
    CHECK(std::abs(down_x[0b00] + cplx(1.0 / std::sqrt(2.0), 0.0)) < 1e-15);
}

TEST_CASE("polynomial pruning and evaluation") {
    PauliXPolynomial poly;
    poly.terms[0b11] = 0.5;
    poly.terms[0b01] = 1e-14;
    poly.prune();
    CHECK(poly.terms.size() == 1);
    CHECK(poly.evaluate(0b11, 2) == doctest::Approx(0.5));   // s = (+1, +1)
    CHECK(poly.evaluate(0b01, 2) == doctest::Approx(-0.5));  // s = (+1, -1)
}
