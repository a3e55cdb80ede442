#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ionsim/fock.hpp"
#include "ionsim/model.hpp"

namespace ionsim::analysis {

enum class Engine { Branch, Fock };

// z-basis outcome probabilities after running `seq` from the given product
// state. The branch engine handles the x-diagonal core and applies trailing
// analysis rotations on the spin factor; sequences it cannot represent fall
// back to the Fock oracle.
std::vector<double> z_populations(const PulseSequence& seq, const std::vector<PrepSpec>& prep,
                                  Engine engine = Engine::Branch,
                                  const fock::Config& fock_cfg = {});

// Final spin state for a branch-compatible sequence (pure by construction).
cvec output_spin_state(const PulseSequence& seq, const std::vector<PrepSpec>& prep);

double magnetization(const std::vector<double>& populations, int ion);

// Row per z-basis input, each row the outcome distribution.
std::vector<std::vector<double>> truth_table(const PulseSequence& seq,
                                             Engine engine = Engine::Branch,
                                             const fock::Config& fock_cfg = {});

struct ParityScan {
    std::vector<double> thetas;
    std::vector<double> parities;           // exact expectation values
    std::vector<double> sampled_parities;   // empty unless shots > 0
    std::vector<double> sigmas;
    std::uint64_t shots = 0;
    std::uint64_t seed = 0;
};

// Parity (-1)^{number of up outcomes} after appending R_theta(pi/2) on every
// ion. With shots > 0 each point also carries a seeded multinomial estimate;
// point k uses the (seed, k) substream, so parallel and serial runs agree.
ParityScan parity_scan(const PulseSequence& seq, const std::vector<PrepSpec>& prep,
                       const std::vector<double>& thetas, Engine engine = Engine::Branch,
                       std::uint64_t shots = 0, std::uint64_t seed = 0,
                       const fock::Config& fock_cfg = {});

struct FitResult {
    double amplitude = 0.0;  // >= 0; sign folded into phase
    double phase = 0.0;
    double offset = 0.0;
    double rms_residual = 0.0;
};

// Least-squares fit of A cos(freq * theta + phase) + offset at fixed integer
// frequency. Needs at least 2*freq + 1 points spanning a full period.
FitResult fit_sine(const std::vector<double>& thetas, const std::vector<double>& values,
                   int frequency);

// Witness fidelity (P_all_down + P_all_up)/2 + amplitude/2.
double ghz_fidelity(const std::vector<double>& populations, const FitResult& fit);

struct Sampled {
    std::vector<std::uint64_t> counts;
    std::vector<double> frequencies;
    std::vector<double> sigmas;  // sqrt(p(1-p)/n) with p the sampled frequency
};

// Seeded multinomial draw (mt19937_64 bit stream, CDF walk per shot).
Sampled sample_shots(const std::vector<double>& probabilities, std::uint64_t n_shots,
                     std::uint64_t seed);

// Probability that every ion in `flip_ions` reads the opposite of its z-basis
// preparation, marginal over the rest. Requires those ions to be z-prepped.
double flip_probability(const std::vector<double>& populations,
                        const std::vector<PrepSpec>& prep, const std::vector<int>& flip_ions);

struct ScanSpec {
    std::string family = "ms";  // ms | rect3 | rect4 | xxx
    double xi = 0.0;
    double zeta = 0.0;
    std::vector<double> phi0_grid;
    std::vector<PrepSpec> prep;
    bool echo = true;
    Engine engine = Engine::Branch;
};

struct ScanPoint {
    double phi0 = 0.0;
    double flip = 0.0;                   // edge-flip probability
    std::vector<double> magnetizations;  // per ion
    std::vector<double> populations;
};

// Builder sweep over phi0; points are evaluated in parallel and reported in
// grid order.
std::vector<ScanPoint> scan_phi0(const ScanSpec& spec, const ChainConfig& chain);

PulseSequence build_family(const std::string& family, const ChainConfig& chain, double phi0,
                           double xi, double zeta, bool echo);

}  // namespace ionsim::analysis
