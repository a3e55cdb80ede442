#pragma once

#include <vector>

#include "ionsim/model.hpp"
#include "ionsim/types.hpp"

namespace ionsim::waveform {

// Closed-form integral of exp(i detuning t) sin(pi m t / T) over [0, T].
cplx basis_integral(int m, double duration, double detuning);

// alpha = (eta/2) exp(i motional_phase) sum_m c_m basis_integral(m). The
// drive Omega(t) = sum_m c_m sin(pi m t / T) vanishes at both ends.
cplx displacement_integral(const std::vector<double>& coefficients, double duration,
                           double detuning, double eta, double motional_phase = 0.0);

double omega_at(const std::vector<double>& coefficients, double duration, double t);

struct WaveformSolution {
    std::vector<double> coefficients;
    double duration = 0.0;
    std::vector<cplx> achieved;  // displacement per mode
    double objective = 0.0;      // sum over spectator modes of |alpha_k|^2
    double omega_max = 0.0;      // max |Omega| on a dense grid
    int target_mode = 0;
};

// Minimizes the spectator displacement power subject to hitting the target
// displacement on the chain's target mode, over M sine-basis coefficients.
// Among minimizers the smallest-coefficient solution is returned. Detunings
// are taken relative to the target mode (the drive sits on resonance with
// it); the target's phase is realized through the motional phase, so the
// sine coefficients stay real. Throws when the constraint is singular or the
// drive would exceed chain.rabi_max.
WaveformSolution solve_waveform(const ChainConfig& chain, int ion, cplx alpha_target,
                                double duration, int basis_size);

struct ModeReport {
    int mode = 0;
    cplx achieved;
    double magnitude = 0.0;
    bool spectator = false;
    bool flagged = false;  // spectator above tolerance
};

// Recomputes every mode displacement from scratch and flags spectators above
// tol_rel * |target|.
std::vector<ModeReport> verify_solution(const WaveformSolution& sol, const ChainConfig& chain,
                                        int ion, double tol_rel = 1e-6);

}  // namespace ionsim::waveform
