#include <doctest.h>

#include <cmath>

#include "ionsim/fock.hpp"
#include "ionsim/model.hpp"
#include "ionsim/numeric.hpp"
#include "ionsim/sequences.hpp"

#include <random>

using namespace ionsim;

namespace {

DisplaceOp displace(int ion, cplx alpha) {
    DisplaceOp d;
    d.ion = ion;
    d.alpha = alpha;
    d.motional_phase = std::arg(alpha);
    d.duration = 26e-6;
    return d;
}

SqueezeOp squeeze(int ion, double xi, int sign = +1, double mphase = 0.0) {
    SqueezeOp s;
    s.ion = ion;
    s.xi = xi;
    s.sign = sign;
    s.motional_phase = mphase;
    s.duration = 29e-6;
    return s;
}

double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

}  // namespace

TEST_CASE("displacement generator matches ladder matrix elements at n_max = 1") {
    const double alpha = 0.37;
    const cvec g = fock::op_generator(displace(0, cplx(alpha, 0.0)), 1, 1);
    // dim 4: (z, n) = (down,0), (down,1), (up,0), (up,1); spin factor is the
    // x flip, phonon block [[0, -a], [a, 0]].
    const auto at = [&](int r, int c) { return g[r * 4 + c]; };
    CHECK(at(2, 1) == cplx(-alpha, 0.0));
    CHECK(at(3, 0) == cplx(alpha, 0.0));
    CHECK(at(0, 3) == cplx(-alpha, 0.0));
    CHECK(at(1, 2) == cplx(alpha, 0.0));
    CHECK(at(0, 0) == cplx(0.0, 0.0));
    CHECK(at(0, 1) == cplx(0.0, 0.0));
}

TEST_CASE("squeeze generator column at n = 0 only feeds n = 2") {
    const cvec g = fock::op_generator(squeeze(0, 0.3), 1, 6);
    const int levels = 7;
    const int dim = 2 * levels;
    for (int r = 0; r < dim; ++r) {
        const cplx v = g[r * dim + 0];  // column (down, n=0)
        if (r == levels + 2) {
            CHECK(std::abs(v + 0.15 * std::sqrt(2.0)) < 1e-14);  // -(r/2) sqrt(1*2)
        } else {
            CHECK(std::abs(v) < 1e-14);
        }
    }
}

TEST_CASE("x-axis pi rotation exponentiates to -i sigma_x") {
    RotateOp r;
    r.ion = 0;
    r.rotation_angle = pi;
    fock::State state = fock::make_state({cplx(1, 0), cplx(0, 0)}, 1, 6);
    fock::apply(state, r, {.n_max = 6});
    CHECK(std::abs(state.amplitude(1, 0) - cplx(0, -1)) < 1e-12);
    CHECK(std::abs(state.amplitude(0, 0)) < 1e-12);
}

TEST_CASE("displacement of spin-down-x produces the Poisson number distribution") {
    // |down_x> picks the -alpha branch; the distribution only sees |alpha|^2.
    const cvec spin{cplx(1.0 / std::sqrt(2.0), 0), cplx(-1.0 / std::sqrt(2.0), 0)};
    fock::State state = fock::make_state(spin, 1, 30);
    fock::apply(state, displace(0, cplx(0.5, 0.0)), {});
    const auto dist = fock::phonon_distribution(state);
    const double mean = 0.25;
    for (int n = 0; n <= 12; ++n) {
        const double expected = std::exp(-mean) * std::pow(mean, n) / factorial(n);
        CHECK(std::abs(dist[n] - expected) < 1e-10);
    }
}

TEST_CASE("zero-amplitude displacement leaves the state unchanged") {
    fock::State state = fock::make_state({cplx(0.6, 0), cplx(0.8, 0)}, 1, 10);
    const cvec before = state.amplitudes;
    fock::apply(state, displace(0, cplx(0.0, 0.0)), {.n_max = 10});
    CHECK(state.amplitudes == before);
}

TEST_CASE("squeeze scales the q variance by exp(-2 s xi)") {
    const double xi = 0.27;
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

    // spin up along x: S(+xi), q narrowed
    fock::State up = fock::make_state({cplx(inv_sqrt2, 0), cplx(inv_sqrt2, 0)}, 1, 40);
    fock::apply(up, squeeze(0, xi), {.n_max = 40});
    CHECK(fock::mean_q_squared(up) == doctest::Approx(std::exp(-2.0 * xi) / 4.0).epsilon(1e-9));

    // spin down along x: S(-xi), q stretched
    fock::State down = fock::make_state({cplx(inv_sqrt2, 0), cplx(-inv_sqrt2, 0)}, 1, 40);
    fock::apply(down, squeeze(0, xi), {.n_max = 40});
    CHECK(fock::mean_q_squared(down) == doctest::Approx(std::exp(2.0 * xi) / 4.0).epsilon(1e-9));

    // motional phase pi flips the roles
    fock::State up_pi = fock::make_state({cplx(inv_sqrt2, 0), cplx(inv_sqrt2, 0)}, 1, 40);
    fock::apply(up_pi, squeeze(0, xi, +1, pi), {.n_max = 40});
    CHECK(fock::mean_q_squared(up_pi) == doctest::Approx(std::exp(2.0 * xi) / 4.0).epsilon(1e-9));
}

TEST_CASE("truncation leak raises instead of renormalizing") {
    fock::State state = fock::make_state({cplx(1, 0), cplx(0, 0)}, 1, 8);
    CHECK_THROWS_AS(fock::apply(state, displace(0, cplx(2.5, 0.0)), {.n_max = 8}),
                    fock::TruncationLeak);
}

TEST_CASE("MS rectangle at phi0 = pi/2 flips the edge pair deterministically") {
    const ChainConfig chain = preset_chain(3);
    const PulseSequence seq = ms_rectangle(chain, pi / 2.0);
    const std::vector<PrepSpec> prep(3, PrepSpec{PrepBasis::Z, false});
    const fock::State state = fock::run(seq, prep_state(prep), {});
    const auto pops = fock::z_populations(state);
    CHECK(pops[0b101] == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("empty sequence returns the input state") {
    PulseSequence seq;
    seq.chain = preset_chain(3);
    const cvec spin = prep_state({{PrepBasis::Z, false}, {PrepBasis::X, true}, {PrepBasis::Z, true}});
    const fock::State state = fock::run(seq, spin, {});
    for (std::size_t z = 0; z < spin.size(); ++z) {
        CHECK(std::abs(state.amplitude(static_cast<ZIndex>(z), 0) - spin[z]) < 1e-14);
    }
}

TEST_CASE("squeezed rectangle flip probability follows sin^2(e^{+-xi} phi0)") {
    const ChainConfig chain = preset_chain(3);
    const double phi0 = 0.5, xi = 0.27;
    const PulseSequence seq = squeezed_rectangle_3(chain, phi0, xi);

    for (bool middle_up : {false, true}) {
        const std::vector<PrepSpec> prep{
            {PrepBasis::Z, false}, {PrepBasis::X, middle_up}, {PrepBasis::Z, false}};
        const fock::State state = fock::run(seq, prep_state(prep), {});
        const auto pops = fock::z_populations(state);
        double flip = 0.0;
        for (std::size_t z = 0; z < pops.size(); ++z) {
            if ((z & 0b101) == 0b101) flip += pops[z];
        }
        const double expected = std::pow(std::sin(std::exp(middle_up ? xi : -xi) * phi0), 2);
        CHECK(flip == doctest::Approx(expected).epsilon(1e-6));
    }
}

TEST_CASE("reduced density of a product state is the rank-1 spin projector") {
    const cvec spin = prep_state({{PrepBasis::X, true}, {PrepBasis::Z, false}});
    const fock::State state = fock::make_state(spin, 2, 10);
    const cvec rho = fock::reduced_spin_density(state);
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            CHECK(std::abs(rho[i * 4 + j] - spin[i] * std::conj(spin[j])) < 1e-14);
        }
    }
    CHECK(fock::trace_distance(rho, rho, 4) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(fock::purity(rho, 4) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("loop closure leaves the reduced spin state pure") {
    const ChainConfig chain = preset_chain(3);
    const PulseSequence seq = ms_rectangle(chain, pi / 4.0);
    const fock::State state = fock::run(seq, prep_state({{PrepBasis::Z, false},
                                                         {PrepBasis::Z, false},
                                                         {PrepBasis::Z, false}}), {});
    const cvec rho = fock::reduced_spin_density(state);
    CHECK(fock::purity(rho, 8) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("norm stays within 1e-9 across a long sequence") {
    const ChainConfig chain = preset_chain(3);
    PulseSequence seq;
    seq.chain = chain;
    // 104 ops of small closed loops, so the excursion stays low while the
    // propagator error accumulates.
    for (int k = 0; k < 13; ++k) {
        seq.ops.push_back(displace(0, cplx(0.3, 0.0)));
        seq.ops.push_back(squeeze(1, 0.2, -1));
        seq.ops.push_back(displace(2, cplx(0.0, 0.3)));
        seq.ops.push_back(squeeze(1, 0.2, +1));
        seq.ops.push_back(displace(0, cplx(-0.3, 0.0)));
        seq.ops.push_back(squeeze(1, 0.2, -1));
        seq.ops.push_back(displace(2, cplx(0.0, -0.3)));
        seq.ops.push_back(squeeze(1, 0.2, +1));
    }
    const fock::State state = fock::run(seq, prep_state({{PrepBasis::Z, false},
                                                         {PrepBasis::X, true},
                                                         {PrepBasis::Z, true}}), {});
    CHECK(std::abs(state.norm(0) - 1.0) < 1e-9);
}

TEST_CASE("doubling n_max does not move low-excursion probabilities") {
    const ChainConfig chain = preset_chain(3);
    const PulseSequence seq = squeezed_rectangle_3(chain, pi / 4.0, 0.27);
    const std::vector<PrepSpec> prep{{PrepBasis::Z, false}, {PrepBasis::X, true}, {PrepBasis::Z, false}};
    const fock::State s20 = fock::run(seq, prep_state(prep), {.n_max = 20});
    const fock::State s40 = fock::run(seq, prep_state(prep), {.n_max = 40});
    const auto p20 = fock::z_populations(s20);
    const auto p40 = fock::z_populations(s40);
    for (std::size_t z = 0; z < p20.size(); ++z) CHECK(std::abs(p20[z] - p40[z]) < 1e-8);
}

TEST_CASE("banded propagation matches the dense-generator reference") {
    // The run path applies generators through their spin-flip/band structure;
    // the dense matrix from op_generator is the reference. Same series, same
    // tolerances, so agreement should sit at rounding level.
    const int n_ions = 2, n_max = 14;
    const std::size_t dim = 4 * (n_max + 1);
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);

    std::vector<PulseOp> ops;
    ops.push_back(displace(1, cplx(0.4, -0.3)));
    ops.push_back(squeeze(0, 0.35, -1));
    ops.push_back(squeeze(1, 0.2, +1, pi));
    RotateOp rot;
    rot.ion = 0;
    rot.axis_angle = 0.7;
    rot.rotation_angle = 1.3;
    ops.push_back(rot);
    DisplaceOp tilted = displace(0, cplx(0.1, 0.5));
    tilted.spin_phase = 0.4;
    ops.push_back(tilted);

    for (const auto& op : ops) {
        fock::State state;
        state.n_ions = n_ions;
        state.n_max = n_max;
        state.columns = 3;
        state.amplitudes.resize(dim * 3);
        for (auto& a : state.amplitudes) a = cplx(dist(rng), dist(rng));
        double norm0 = 0.0;
        for (int c = 0; c < 3; ++c) norm0 += state.norm(c);
        for (auto& a : state.amplitudes) a /= norm0;

        cvec dense_cols = state.amplitudes;
        const cvec g = fock::op_generator(op, n_ions, n_max);
        num::expm_apply(g.data(), dim, dense_cols.data(), 3);

        fock::apply(state, op, {.n_max = n_max, .leak_tol = 1.0});
        double worst = 0.0;
        for (std::size_t i = 0; i < dense_cols.size(); ++i) {
            worst = std::max(worst, std::abs(dense_cols[i] - state.amplitudes[i]));
        }
        CHECK(worst < 1e-13);
    }
}

TEST_CASE("squeeze sandwich equals the scaled displacement as an operator") {
    // 2 ions (squeezer m=0, displacer n=1), compare on low phonon columns.
    const int n_max = 40;
    const int levels = n_max + 1;
    const std::size_t dim = 4 * levels;
    const double xi = 0.1;
    const cplx alpha(0.0, 0.4);

    const cvec gs_minus = fock::op_generator(squeeze(0, xi, -1), 2, n_max);
    const cvec gs_plus = fock::op_generator(squeeze(0, xi, +1), 2, n_max);
    const cvec gd = fock::op_generator(displace(1, alpha), 2, n_max);

    // RHS: D(e^{sigma_x xi} alpha) block per x eigenvalue of ion 0.
    const cvec gd_up = fock::op_generator(displace(1, alpha * std::exp(xi)), 2, n_max);
    const cvec gd_down = fock::op_generator(displace(1, alpha * std::exp(-xi)), 2, n_max);

    const int column_cap = 10;
    double worst = 0.0;
    for (int z = 0; z < 4; ++z) {
        for (int n = 0; n < column_cap; ++n) {
            cvec lhs(dim, cplx(0, 0));
            lhs[z * levels + n] = 1.0;
            cvec rhs = lhs;

            num::expm_apply(gs_minus.data(), dim, lhs.data(), 1);
            num::expm_apply(gd.data(), dim, lhs.data(), 1);
            num::expm_apply(gs_plus.data(), dim, lhs.data(), 1);

            // project RHS input onto ion-0 x eigenstates and displace each
            cvec plus(dim, cplx(0, 0)), minus(dim, cplx(0, 0));
            const std::size_t i = z * levels + n;
            const std::size_t flipped = (z ^ 1) * levels + n;
            plus[i] = 0.5;
            plus[flipped] = 0.5;
            minus[i] = 0.5;
            minus[flipped] = -0.5;
            num::expm_apply(gd_up.data(), dim, plus.data(), 1);
            num::expm_apply(gd_down.data(), dim, minus.data(), 1);
            for (std::size_t j = 0; j < dim; ++j) rhs[j] = plus[j] + minus[j];

            double diff = 0.0;
            for (std::size_t j = 0; j < dim; ++j) diff += std::norm(lhs[j] - rhs[j]);
            worst = std::max(worst, std::sqrt(diff));
        }
    }
    CHECK(worst < 1e-8);
}
