#include "ionsim/analysis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <stdexcept>

#include "ionsim/branch.hpp"
#include "ionsim/numeric.hpp"
#include "ionsim/sequences.hpp"

namespace ionsim::analysis {

namespace {

// Splits a sequence into its x-diagonal core and a tail of general analysis
// rotations the branch engine cannot absorb.
struct SplitSequence {
    PulseSequence core;
    std::vector<RotateOp> tail;
};

SplitSequence split_analysis_tail(const PulseSequence& seq) {
    SplitSequence out;
    out.core.chain = seq.chain;
    out.core.label = seq.label;
    std::size_t end = seq.ops.size();
    while (end > 0) {
        const auto* rot = std::get_if<RotateOp>(&seq.ops[end - 1]);
        if (!rot || !branch_incompatibility(seq.ops[end - 1])) break;
        out.tail.push_back(*rot);
        --end;
    }
    std::reverse(out.tail.begin(), out.tail.end());
    out.core.ops.assign(seq.ops.begin(), seq.ops.begin() + end);
    return out;
}

void apply_single_qubit(cvec& state, int n_ions, int ion, const cplx u[2][2]) {
    const std::size_t bit = std::size_t{1} << ion;
    const std::size_t size = std::size_t{1} << n_ions;
    for (std::size_t i = 0; i < size; ++i) {
        if (i & bit) continue;
        const cplx down = state[i];
        const cplx up = state[i | bit];
        state[i] = u[0][0] * down + u[0][1] * up;
        state[i | bit] = u[1][0] * down + u[1][1] * up;
    }
}

// R_theta(chi) = cos(chi/2) I - i sin(chi/2) sigma_theta in (down, up) order.
void rotation_matrix(const RotateOp& op, cplx u[2][2]) {
    const double c = std::cos(op.rotation_angle / 2.0);
    const double s = std::sin(op.rotation_angle / 2.0);
    const cplx up_down = std::polar(1.0, -op.axis_angle);  // <up|sigma_theta|down>
    u[0][0] = cplx(c, 0.0);
    u[1][1] = cplx(c, 0.0);
    u[0][1] = cplx(0.0, -s) * std::conj(up_down);
    u[1][0] = cplx(0.0, -s) * up_down;
}

std::vector<PrepSpec> effective_prep(const PulseSequence& seq, const std::vector<PrepSpec>& prep) {
    if (!prep.empty()) {
        if (static_cast<int>(prep.size()) != seq.chain.n_ions) {
            throw std::invalid_argument("prep list length does not match ion count");
        }
        return prep;
    }
    std::vector<PrepSpec> out(seq.chain.n_ions);
    for (const auto& op : seq.ops) {
        if (const auto* p = std::get_if<PrepOp>(&op)) out[p->ion] = PrepSpec{p->basis, p->up};
    }
    return out;
}

}  // namespace

cvec output_spin_state(const PulseSequence& seq, const std::vector<PrepSpec>& prep) {
    const SplitSequence split = split_analysis_tail(seq);
    if (auto reason = branch_incompatibility(split.core)) throw BranchIncompatible(*reason);
    cvec state = effective_unitary(split.core).apply_to_state(prep_state(effective_prep(seq, prep)));
    for (const auto& rot : split.tail) {
        cplx u[2][2];
        rotation_matrix(rot, u);
        apply_single_qubit(state, seq.chain.n_ions, rot.ion, u);
    }
    return state;
}

std::vector<double> z_populations(const PulseSequence& seq, const std::vector<PrepSpec>& prep,
                                  Engine engine, const fock::Config& fock_cfg) {
    if (engine == Engine::Branch) {
        const SplitSequence split = split_analysis_tail(seq);
        if (!branch_incompatibility(split.core)) {
            const cvec state = output_spin_state(seq, prep);
            std::vector<double> pops(state.size());
            for (std::size_t i = 0; i < state.size(); ++i) pops[i] = std::norm(state[i]);
            return pops;
        }
        // fall back to the oracle for sequences outside the branch model
    }
    const fock::State state = fock::run(seq, prep_state(effective_prep(seq, prep)), fock_cfg);
    return fock::z_populations(state);
}

double magnetization(const std::vector<double>& populations, int ion) {
    double m = 0.0;
    for (std::size_t z = 0; z < populations.size(); ++z) {
        m += populations[z] * ((z >> ion & 1u) ? 1.0 : -1.0);
    }
    return m;
}

std::vector<std::vector<double>> truth_table(const PulseSequence& seq, Engine engine,
                                             const fock::Config& fock_cfg) {
    const int n = seq.chain.n_ions;
    const std::size_t inputs = std::size_t{1} << n;
    std::vector<std::vector<double>> table(inputs);
    num::parallel_for(inputs, [&](std::size_t z) {
        std::vector<PrepSpec> prep(n);
        for (int ion = 0; ion < n; ++ion) prep[ion] = PrepSpec{PrepBasis::Z, (z >> ion & 1u) != 0};
        table[z] = z_populations(seq, prep, engine, fock_cfg);
    });
    return table;
}

ParityScan parity_scan(const PulseSequence& seq, const std::vector<PrepSpec>& prep,
                       const std::vector<double>& thetas, Engine engine, std::uint64_t shots,
                       std::uint64_t seed, const fock::Config& fock_cfg) {
    ParityScan scan;
    scan.thetas = thetas;
    scan.parities.resize(thetas.size());
    scan.shots = shots;
    scan.seed = seed;
    if (shots > 0) {
        scan.sampled_parities.resize(thetas.size());
        scan.sigmas.resize(thetas.size());
    }
    num::parallel_for(thetas.size(), [&](std::size_t k) {
        const PulseSequence rotated = with_analysis_rotations(seq, thetas[k]);
        const std::vector<double> pops = z_populations(rotated, prep, engine, fock_cfg);
        double parity = 0.0;
        for (std::size_t z = 0; z < pops.size(); ++z) {
            parity += pops[z] * (std::popcount(z) % 2 == 0 ? 1.0 : -1.0);
        }
        scan.parities[k] = parity;
        if (shots > 0) {
            const Sampled s = sample_shots(pops, shots, num::substream_seed(seed, k));
            double sampled = 0.0;
            double var = 0.0;
            for (std::size_t z = 0; z < pops.size(); ++z) {
                sampled += s.frequencies[z] * (std::popcount(z) % 2 == 0 ? 1.0 : -1.0);
            }
            // parity = 2 P(even) - 1, so sigma = 2 sigma(P_even)
            double p_even = 0.0;
            for (std::size_t z = 0; z < pops.size(); ++z) {
                if (std::popcount(z) % 2 == 0) p_even += s.frequencies[z];
            }
            var = p_even * (1.0 - p_even) / static_cast<double>(shots);
            scan.sampled_parities[k] = sampled;
            scan.sigmas[k] = 2.0 * std::sqrt(var);
        }
    });
    return scan;
}

FitResult fit_sine(const std::vector<double>& thetas, const std::vector<double>& values,
                   int frequency) {
    if (thetas.size() != values.size()) throw std::invalid_argument("fit_sine: size mismatch");
    if (frequency < 1) throw std::invalid_argument("fit_sine: frequency must be positive");
    if (thetas.size() < static_cast<std::size_t>(2 * frequency + 1)) {
        throw std::invalid_argument("fit_sine: not enough points");
    }
    const auto [min_it, max_it] = std::minmax_element(thetas.begin(), thetas.end());
    // A uniform grid over [0, 2pi) covers the period without repeating the
    // endpoint; extend the raw extent by one mean spacing before checking.
    const double extent = (*max_it - *min_it) * thetas.size() / (thetas.size() - 1.0);
    if (extent < two_pi / frequency - 1e-9) {
        throw std::invalid_argument("fit_sine: points must span a full period");
    }
    // Linear model values ~ a cos(f theta) + b sin(f theta) + c.
    double m[3][3] = {};
    double rhs[3] = {};
    for (std::size_t i = 0; i < thetas.size(); ++i) {
        const double basis[3] = {std::cos(frequency * thetas[i]), std::sin(frequency * thetas[i]),
                                 1.0};
        for (int r = 0; r < 3; ++r) {
            rhs[r] += basis[r] * values[i];
            for (int c = 0; c < 3; ++c) m[r][c] += basis[r] * basis[c];
        }
    }
    // Gaussian elimination with partial pivoting on the 3x3 normal equations.
    int perm[3] = {0, 1, 2};
    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 3; ++r) {
            if (std::abs(m[perm[r]][col]) > std::abs(m[perm[pivot]][col])) pivot = r;
        }
        std::swap(perm[col], perm[pivot]);
        const double d = m[perm[col]][col];
        if (std::abs(d) < 1e-14) throw std::invalid_argument("fit_sine: degenerate design");
        for (int r = col + 1; r < 3; ++r) {
            const double f = m[perm[r]][col] / d;
            for (int c = col; c < 3; ++c) m[perm[r]][c] -= f * m[perm[col]][c];
            rhs[perm[r]] -= f * rhs[perm[col]];
        }
    }
    double sol[3];
    for (int col = 2; col >= 0; --col) {
        double v = rhs[perm[col]];
        for (int c = col + 1; c < 3; ++c) v -= m[perm[col]][c] * sol[c];
        sol[col] = v / m[perm[col]][col];
    }
    FitResult fit;
    fit.amplitude = std::hypot(sol[0], sol[1]);
    fit.phase = std::atan2(-sol[1], sol[0]);
    fit.offset = sol[2];
    double ss = 0.0;
    for (std::size_t i = 0; i < thetas.size(); ++i) {
        const double model = sol[0] * std::cos(frequency * thetas[i]) +
                             sol[1] * std::sin(frequency * thetas[i]) + sol[2];
        ss += (values[i] - model) * (values[i] - model);
    }
    fit.rms_residual = std::sqrt(ss / thetas.size());
    return fit;
}

double ghz_fidelity(const std::vector<double>& populations, const FitResult& fit) {
    const double pop_term = (populations.front() + populations.back()) / 2.0;
    return pop_term + fit.amplitude / 2.0;
}

Sampled sample_shots(const std::vector<double>& probabilities, std::uint64_t n_shots,
                     std::uint64_t seed) {
    if (n_shots < 1) throw std::invalid_argument("sample_shots: need at least one shot");
    Sampled out;
    out.counts.assign(probabilities.size(), 0);
    std::mt19937_64 rng(seed);
    for (std::uint64_t s = 0; s < n_shots; ++s) {
        const double u = (rng() >> 11) * 0x1.0p-53;
        double acc = 0.0;
        std::size_t pick = probabilities.size() - 1;
        for (std::size_t i = 0; i < probabilities.size(); ++i) {
            acc += probabilities[i];
            if (u < acc) {
                pick = i;
                break;
            }
        }
        ++out.counts[pick];
    }
    out.frequencies.resize(probabilities.size());
    out.sigmas.resize(probabilities.size());
    for (std::size_t i = 0; i < probabilities.size(); ++i) {
        const double p = static_cast<double>(out.counts[i]) / static_cast<double>(n_shots);
        out.frequencies[i] = p;
        out.sigmas[i] = std::sqrt(p * (1.0 - p) / static_cast<double>(n_shots));
    }
    return out;
}

double flip_probability(const std::vector<double>& populations, const std::vector<PrepSpec>& prep,
                        const std::vector<int>& flip_ions) {
    ZIndex prepared = 0;
    for (int ion : flip_ions) {
        if (prep[ion].basis != PrepBasis::Z) {
            throw std::invalid_argument("flip probability needs z-basis preparation on the flipped ions");
        }
        if (prep[ion].up) prepared |= ZIndex{1} << ion;
    }
    double p = 0.0;
    for (std::size_t z = 0; z < populations.size(); ++z) {
        bool all_flipped = true;
        for (int ion : flip_ions) {
            const bool prep_up = (prepared >> ion) & 1u;
            const bool out_up = (z >> ion) & 1u;
            if (out_up == prep_up) {
                all_flipped = false;
                break;
            }
        }
        if (all_flipped) p += populations[z];
    }
    return p;
}

PulseSequence build_family(const std::string& family, const ChainConfig& chain, double phi0,
                           double xi, double zeta, bool echo) {
    BuildOptions opts;
    opts.echo = echo;
    if (family == "ms") return ms_rectangle(chain, phi0, opts);
    if (family == "rect3") return squeezed_rectangle_3(chain, phi0, xi, opts);
    if (family == "rect4") return squeezed_rectangle_4(chain, phi0, xi, zeta, opts);
    if (family == "xxx") return pure_three_body(chain, phi0, opts);
    throw std::invalid_argument("unknown gate family: " + family);
}

std::vector<ScanPoint> scan_phi0(const ScanSpec& spec, const ChainConfig& chain) {
    std::vector<ScanPoint> points(spec.phi0_grid.size());
    num::parallel_for(spec.phi0_grid.size(), [&](std::size_t k) {
        const double phi0 = spec.phi0_grid[k];
        const PulseSequence seq = build_family(spec.family, chain, phi0, spec.xi, spec.zeta,
                                               spec.echo);
        ScanPoint& pt = points[k];
        pt.phi0 = phi0;
        pt.populations = z_populations(seq, spec.prep, spec.engine);
        pt.magnetizations.resize(chain.n_ions);
        for (int ion = 0; ion < chain.n_ions; ++ion) {
            pt.magnetizations[ion] = magnetization(pt.populations, ion);
        }
        const auto edges = displaced_ions(seq);
        const bool edges_z = std::all_of(edges.begin(), edges.end(), [&](int ion) {
            return spec.prep[ion].basis == PrepBasis::Z;
        });
        // flip is only defined against a z-basis edge preparation
        pt.flip = edges_z ? flip_probability(pt.populations, spec.prep, edges) : 0.0;
    });
    return points;
}

}  // namespace ionsim::analysis
