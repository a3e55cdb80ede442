#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "ionsim/model.hpp"
#include "ionsim/types.hpp"

namespace ionsim::fock {

// Population crossed into the top of the truncated ladder; results past this
// point are unreliable, so the run aborts instead of renormalizing.
struct TruncationLeak : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Config {
    int n_max = 30;         // highest retained phonon number
    double leak_tol = 1e-8; // max population allowed in the top two levels

    void check() const {
        if (n_max < 4) throw std::invalid_argument("fock: n_max must be at least 4");
    }
};

// State tensor over (2^n_ions z-basis spin states) x (n_max+1 phonon levels),
// optionally holding several columns evolved in lockstep. The amplitude of
// column c at spin index z and phonon level n sits at
// ((z * (n_max+1)) + n) * columns + c.
struct State {
    int n_ions = 0;
    int n_max = 0;
    int columns = 1;
    cvec amplitudes;

    std::size_t dim() const { return (std::size_t{1} << n_ions) * (n_max + 1); }
    double norm(int column) const;
    cplx amplitude(ZIndex z, int phonon, int column = 0) const {
        return amplitudes[(static_cast<std::size_t>(z) * (n_max + 1) + phonon) * columns + column];
    }
};

// Spin state (2^n amplitudes) tensored with phonon vacuum.
State make_state(const cvec& spin_state, int n_ions, int n_max);
State make_state_block(const std::vector<cvec>& spin_states, int n_ions, int n_max);

// Dense anti-Hermitian generator of `op` on the joint space, row-major.
// Detuned displacements have no static generator and are rejected here.
cvec op_generator(const PulseOp& op, int n_ions, int n_max);

// state <- exp(G) state. Applies the truncation-leak check first and verifies
// the norm stays within 1e-9 of unity. Detuned displacements are evolved by
// slicing the drive into piecewise-constant generators, at least 200 per
// detuning period; `t_start` anchors the drive phase.
void apply(State& state, const PulseOp& op, const Config& cfg, double t_start = 0.0);

// Second-sideband drive off resonance, sliced like the detuned displacement.
// Calibration support; the sequence IR itself has no detuned squeeze.
void apply_detuned_squeeze(State& state, const SqueezeOp& op, double detuning, const Config& cfg,
                           double t_start = 0.0);

// Runs the whole sequence from phonon vacuum. When `initial_spin` is empty
// the spin state is read off the sequence's prep pseudo-ops (unprepped ions
// default to z-down).
State run(const PulseSequence& seq, const cvec& initial_spin, const Config& cfg);
State run_block(const PulseSequence& seq, const std::vector<cvec>& spins, const Config& cfg);

// Partial trace over the phonon ladder: 2^n x 2^n row-major density matrix.
cvec reduced_spin_density(const State& state, int column = 0);

double trace_distance(const cvec& rho_a, const cvec& rho_b, int dim);

std::vector<double> z_populations(const State& state, int column = 0);
std::vector<double> phonon_distribution(const State& state, int column = 0);
// <q^2> with q = (a + a^dagger)/2 (vacuum value 1/4).
double mean_q_squared(const State& state, int column = 0);

double purity(const cvec& rho, int dim);

}  // namespace ionsim::fock
