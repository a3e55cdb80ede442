#pragma once

#include <string>
#include <vector>

#include "ionsim/model.hpp"

namespace ionsim {

struct BuildOptions {
    // Insert an R_0(+pi)/R_0(-pi) echo pair on each displaced ion (after the
    // first and second half of the loop). Identity in noiseless evolution.
    bool echo = true;
    // Swap the squeeze/anti-squeeze order inside the sandwiches; flips the
    // sign of the odd (sinh) terms of the extracted polynomial.
    bool reversed_sandwich = false;
};

// Rectangular two-ion phase gate on the edge ions of a 3-ion chain. The edge
// amplitude a = sqrt(phi0/2) makes the branch phase magnitude exactly
// phi0 * s_1 * s_3 (the composition rule contributes twice the enclosed
// area a^2).
PulseSequence ms_rectangle(const ChainConfig& chain, double phi0, const BuildOptions& opts = {});

// Same rectangle with every p-displacement wrapped in a squeeze/anti-squeeze
// pair on the middle ion, scaling the p edges by exp(s_2 xi).
PulseSequence squeezed_rectangle_3(const ChainConfig& chain, double phi0, double xi,
                                   const BuildOptions& opts = {});

// Four-ion variant: displacements on the edge ions, nested sandwiches on both
// middle ions with magnitudes xi and zeta.
PulseSequence squeezed_rectangle_4(const ChainConfig& chain, double phi0, double xi, double zeta,
                                   const BuildOptions& opts = {});

// Pure three-body gate: solves pi * tanh(xi) = phi3 and phi0 = pi / cosh(xi),
// leaving a two-body coefficient of pi (identity up to global phase) and a
// three-body coefficient of phi3.
PulseSequence pure_three_body(const ChainConfig& chain, double phi3, const BuildOptions& opts = {},
                              double xi_cap = 1.0);

struct PureThreeBodyParams {
    double xi = 0.0;
    double phi0 = 0.0;
};
PureThreeBodyParams solve_pure_three_body(double phi3, double xi_cap = 1.0);

// Replaces any existing prep pseudo-ops and prepends the given per-ion list.
PulseSequence with_prep(PulseSequence seq, const std::vector<PrepSpec>& prep);

// Appends R_theta(pi/2) analysis rotations on every ion.
PulseSequence with_analysis_rotations(PulseSequence seq, double theta);

// Ions that receive displacement ops, ascending.
std::vector<int> displaced_ions(const PulseSequence& seq);

double total_duration(const PulseSequence& seq);

}  // namespace ionsim
