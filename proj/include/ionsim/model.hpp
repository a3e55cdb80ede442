#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ionsim/types.hpp"

namespace ionsim {

// Physical context shared by every engine: mode spectrum, mode participation
// and the spin-motion coupling scale. participation(n, k) is the amplitude of
// ion n in mode k; columns form an orthonormal set and mode frequencies are
// strictly increasing. Values are immutable after construction.
struct ChainConfig {
    int n_ions = 0;
    std::vector<double> mode_frequencies;   // rad/s, ascending
    std::vector<double> participation_data; // row-major [n][k]
    std::vector<bool> synthetic_mode;       // true where the frequency is interpolated
    double lamb_dicke_scale = 0.0;
    double rabi_max = 0.0;                  // rad/s
    int target_mode = 0;

    double participation(int ion, int mode) const {
        return participation_data[static_cast<std::size_t>(ion) * mode_frequencies.size() + mode];
    }
    double lamb_dicke(int ion, int mode) const { return lamb_dicke_scale * participation(ion, mode); }

    // Throws std::invalid_argument if any structural invariant fails.
    void check() const;
};

// Preset chains for 3 and 4 ions. Target-mode participation vectors are
// renormalized to unit norm; spectator modes are filled with orthonormal
// vectors and interpolated frequencies and flagged synthetic.
ChainConfig preset_chain(int n_ions);

struct DisplaceOp {
    int ion = 0;
    cplx alpha;                 // phase-space displacement, a = q + i p units
    double motional_phase = 0;  // arg(alpha), kept as calibration metadata
    double spin_phase = 0;      // spin-axis angle; engines assume 0
    double detuning = 0;        // rad/s
    double duration = 0;        // seconds, metadata for timing reports
};

struct SqueezeOp {
    int ion = 0;
    double xi = 0;              // squeeze magnitude, >= 0
    int sign = +1;              // +1 or -1
    double motional_phase = 0;  // 0 squeezes q, pi anti-squeezes q
    double spin_phase = 0;
    double duration = 0;
};

struct RotateOp {
    int ion = 0;
    double axis_angle = 0;      // theta in sigma_theta = cos(theta) X + sin(theta) Y
    double rotation_angle = 0;  // chi in exp(-i chi/2 sigma_theta)
    double duration = 0;
};

enum class PrepBasis { Z, X };

struct PrepOp {
    int ion = 0;
    PrepBasis basis = PrepBasis::Z;
    bool up = false;
};

using PulseOp = std::variant<DisplaceOp, SqueezeOp, RotateOp, PrepOp>;

struct PulseSequence {
    ChainConfig chain;
    std::vector<PulseOp> ops;
    std::string label;
};

// Checks op-level invariants and prep ordering. Returns human-readable
// diagnostics; empty means valid.
std::vector<std::string> validate_sequence(const PulseSequence& seq);

// Real polynomial in Pauli-X strings: bitmask of the ion subset -> coefficient.
// The empty set carries the global phase. Terms below prune_threshold are
// dropped on normalization.
struct PauliXPolynomial {
    static constexpr double prune_threshold = 1e-12;

    std::map<std::uint32_t, double> terms;

    void prune();
    double coefficient(std::uint32_t subset) const;
    // Value of the polynomial on the x-basis configuration `config`.
    double evaluate(XIndex config, int n_ions) const;
    PauliXPolynomial scaled(double factor) const;
};

// JSON round-trippable external format. Complex numbers serialize as
// [re, im]; angles are radians, frequencies rad/s.
std::string chain_to_json(const ChainConfig& chain);
ChainConfig chain_from_json(const std::string& text);
std::string sequence_to_json(const PulseSequence& seq);
PulseSequence sequence_from_json(const std::string& text);

bool sequences_equal(const PulseSequence& a, const PulseSequence& b);

// Per-ion initial state request used by the analysis front ends.
struct PrepSpec {
    PrepBasis basis = PrepBasis::Z;
    bool up = false;
};

std::vector<PrepSpec> parse_prep(const std::string& text, int n_ions);
std::string prep_to_string(const std::vector<PrepSpec>& prep);

// Product state over the z basis (bit n of the index = ion n, set = up).
cvec prep_state(const std::vector<PrepSpec>& prep);

}  // namespace ionsim
