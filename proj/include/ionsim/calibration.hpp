#pragma once

#include <string>
#include <vector>

#include "ionsim/fock.hpp"
#include "ionsim/model.hpp"

namespace ionsim::calibration {

// Minimal single-ion context for the single-spin calibration experiments.
ChainConfig single_ion_chain();

enum class DriveKind { Displace, Squeeze };

struct CommonPhaseScan {
    std::vector<double> thetas;
    std::vector<double> flip;
    bool degenerate = false;      // flat curve, no argmin
    double theta0 = 0.0;          // argmin over the grid
    double reported_phase = 0.0;  // recovered drive spin phase, in (-pi/2, pi/2]
};

// R_theta(pi/2), drive, R_theta(-pi/2) on one spin from z-down, evaluated on
// the Fock oracle. The flip probability is minimal where the conjugated spin
// axis reaches +-z, i.e. at theta = phase +- pi/2; the drive phase is
// recovered as theta0 + pi/2 (mod pi) for both drive kinds.
CommonPhaseScan scan_common_phase(DriveKind kind, double amplitude, double drive_spin_phase,
                                  const std::vector<double>& thetas,
                                  const fock::Config& cfg = {});

struct OrientationScan {
    std::vector<double> dphi;
    std::vector<double> flip;   // edge-pair flip probability
    double p_a = 0.0;           // dphi = 0
    double p_b = 0.0;           // dphi = pi
    bool extraction_valid = true;  // phi0 e^xi < pi/2
};

// Squeezed rectangle on the 3-ion preset from |down_z down_x down_z| with the
// squeeze motional phase swept; evaluated on the Fock oracle (the squeeze
// parameter is complex off the q axis, outside the branch model).
OrientationScan scan_squeeze_orientation(double phi0, double xi,
                                         const std::vector<double>& dphi_grid,
                                         const fock::Config& cfg = {});

struct PhiXiEstimate {
    double phi0 = 0.0;
    double xi = 0.0;
    bool near_boundary = false;  // arcsin branch about to wrap
};

// Inverts p_a = sin^2(e^-xi phi0), p_b = sin^2(e^xi phi0) on the principal
// branch. Requires 0 < p_a <= p_b < 1.
PhiXiEstimate estimate_phi_xi(double p_a, double p_b);

struct MotionalScan {
    std::vector<double> detunings;
    std::vector<double> flip;
    std::vector<double> closed_form;  // displacement variant only, else empty
};

// D(alpha) followed by the same pulse with motional phase advanced by pi,
// swept over drive detuning; the pair inverts exactly only on resonance.
// The displacement variant carries the coherent-overlap closed form for
// cross-checking. The squeeze variant applies the analogous S, S(phase+pi)
// pair (a stand-in layout, not calibrated against hardware).
MotionalScan scan_motional_frequency(double amplitude, const std::vector<double>& detunings,
                                     DriveKind kind, double pulse_duration = 26e-6,
                                     const fock::Config& cfg = {});

}  // namespace ionsim::calibration
