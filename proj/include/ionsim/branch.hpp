#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ionsim/model.hpp"
#include "ionsim/types.hpp"

namespace ionsim {

// Thrown when a sequence contains an operation the analytic engine cannot
// represent (detuned or off-axis drives, non-echo rotations).
struct BranchIncompatible : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown by geometric_phases / effective_unitary when a branch does not
// return to the phase-space origin.
struct OpenLoopError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr double closure_tolerance = 1e-9;

// Gaussian normal form of one x-basis branch: the evolved state is
// exp(i theta) * D(beta) * S(rho) |vacuum>. S(rho) with rho > 0 narrows the
// q quadrature; theta is tracked additively (never rewrapped) so phases
// beyond pi stay unambiguous.
struct BranchState {
    double theta = 0.0;
    cplx beta{0.0, 0.0};
    double rho = 0.0;

    cplx phase_factor() const { return std::polar(1.0, theta); }
};

struct BranchResult {
    XIndex spin_config = 0;
    BranchState final;
    bool closed = false;
};

// Reason the op is rejected by the branch engine, or nullopt if compatible.
std::optional<std::string> branch_incompatibility(const PulseOp& op);
std::optional<std::string> branch_incompatibility(const PulseSequence& seq);

// Applies one op to a branch with x-basis spin configuration `config`.
// Throws BranchIncompatible for unsupported ops.
BranchState apply_op(const BranchState& state, const PulseOp& op, XIndex config);

BranchResult run_branch(const PulseSequence& seq, XIndex config);

// Geometric phase Phi per x-basis configuration, defined through
// U|s> = exp(-i Phi_s)|s>. Requires every branch to close; throws
// OpenLoopError naming the worst offender otherwise. Entry order is the
// XIndex order (bit n set means s_n = +1).
std::vector<double> geometric_phases(const PulseSequence& seq);

// Walsh coefficients c_T = 2^-N sum_s phi_s prod_{n in T} s_n. The transform
// reconstructs the input exactly: phi_s = sum_T c_T prod s_n.
PauliXPolynomial extract_polynomial(const std::vector<double>& phases, int n_ions);

// Diagonal-in-x unitary produced by a closed sequence.
struct EffectiveUnitary {
    int n_ions = 0;
    cvec x_phase_factors;  // exp(i theta_s) per XIndex

    // Conjugates with the x<->z basis change and returns a normalized vector.
    cvec apply_to_state(const cvec& z_state) const;
};

EffectiveUnitary effective_unitary(const PulseSequence& seq);

// H = Phi / T: same polynomial with every coefficient divided by T (units of
// rad/s, hbar = 1).
PauliXPolynomial effective_hamiltonian(const PauliXPolynomial& poly, double t_effective);

// <state2|state1> for two squeeze-free branches. Throws if either branch has
// nonzero net squeeze.
cplx coherent_overlap(const BranchState& b1, const BranchState& b2);

// In-place x<->z basis change (self-inverse tensor butterfly).
void hadamard_transform(cvec& amplitudes, int n_ions);

}  // namespace ionsim
