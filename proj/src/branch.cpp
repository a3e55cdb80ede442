#include "ionsim/branch.hpp"

#include <cmath>
#include <cstdio>

namespace ionsim {

namespace {

bool near(double a, double b, double tol = 1e-12) { return std::abs(a - b) <= tol; }

std::optional<std::string> op_incompatibility(const PulseOp& op) {
    if (const auto* d = std::get_if<DisplaceOp>(&op)) {
        if (d->detuning != 0.0) return "detuned displacement requires the Fock engine";
        if (!near(d->spin_phase, 0.0)) return "branch engine requires spin phase 0";
        return std::nullopt;
    }
    if (const auto* s = std::get_if<SqueezeOp>(&op)) {
        if (!near(s->motional_phase, 0.0) && !near(s->motional_phase, pi)) {
            return "squeeze motional phase must be 0 or pi";
        }
        if (!near(s->spin_phase, 0.0)) return "branch engine requires spin phase 0";
        return std::nullopt;
    }
    if (const auto* r = std::get_if<RotateOp>(&op)) {
        if (!near(r->axis_angle, 0.0) || !near(std::abs(r->rotation_angle), pi)) {
            return "branch engine requires x-diagonal ops";
        }
        return std::nullopt;
    }
    return std::nullopt;  // prep pseudo-ops are skipped
}

}  // namespace

std::optional<std::string> branch_incompatibility(const PulseOp& op) { return op_incompatibility(op); }

std::optional<std::string> branch_incompatibility(const PulseSequence& seq) {
    for (const auto& op : seq.ops) {
        if (auto reason = op_incompatibility(op)) return reason;
    }
    return std::nullopt;
}

BranchState apply_op(const BranchState& state, const PulseOp& op, XIndex config) {
    if (auto reason = op_incompatibility(op)) throw BranchIncompatible(*reason);
    BranchState out = state;
    if (const auto* d = std::get_if<DisplaceOp>(&op)) {
        const double s = spin_sign(config, d->ion);
        const cplx alpha_eff = s * d->alpha;
        // D(a) D(b) = exp(i Im(a conj(b))) D(a + b)
        out.theta += std::imag(alpha_eff * std::conj(out.beta));
        out.beta += alpha_eff;
    } else if (const auto* sq = std::get_if<SqueezeOp>(&op)) {
        const double s = spin_sign(config, sq->ion);
        const double orientation = near(sq->motional_phase, 0.0) ? 1.0 : -1.0;
        const double r = s * sq->sign * sq->xi * orientation;
        // S(r) D(beta) S(-r) = D(beta cosh r - conj(beta) sinh r); no scalar phase.
        out.beta = out.beta * std::cosh(r) - std::conj(out.beta) * std::sinh(r);
        out.rho += r;
    } else if (const auto* rot = std::get_if<RotateOp>(&op)) {
        // R_0(+pi) = -i sigma_x acts as exp(-i s pi/2) on branch s.
        const double s = spin_sign(config, rot->ion);
        out.theta += (rot->rotation_angle > 0 ? -1.0 : 1.0) * s * pi / 2.0;
    }
    return out;
}

BranchResult run_branch(const PulseSequence& seq, XIndex config) {
    BranchState state;
    for (const auto& op : seq.ops) {
        if (std::holds_alternative<PrepOp>(op)) continue;
        state = apply_op(state, op, config);
    }
    BranchResult result;
    result.spin_config = config;
    result.final = state;
    result.closed = std::abs(state.beta) <= closure_tolerance && std::abs(state.rho) <= closure_tolerance;
    return result;
}

std::vector<double> geometric_phases(const PulseSequence& seq) {
    const int n = seq.chain.n_ions;
    const std::size_t configs = std::size_t{1} << n;
    std::vector<double> phases(configs, 0.0);
    double worst_residual = 0.0;
    XIndex worst_config = 0;
    for (std::size_t c = 0; c < configs; ++c) {
        const BranchResult r = run_branch(seq, static_cast<XIndex>(c));
        const double residual = std::max(std::abs(r.final.beta), std::abs(r.final.rho));
        if (residual > worst_residual) {
            worst_residual = residual;
            worst_config = r.spin_config;
        }
        phases[c] = -r.final.theta;
    }
    if (worst_residual > closure_tolerance) {
        char msg[160];
        std::snprintf(msg, sizeof msg,
                      "open loop: spin config %u leaves residual %.3e (tolerance %.1e)",
                      worst_config, worst_residual, closure_tolerance);
        throw OpenLoopError(msg);
    }
    return phases;
}

PauliXPolynomial extract_polynomial(const std::vector<double>& phases, int n_ions) {
    const std::size_t configs = std::size_t{1} << n_ions;
    if (phases.size() != configs) throw std::invalid_argument("phase table size mismatch");
    PauliXPolynomial poly;
    for (std::uint32_t subset = 0; subset < configs; ++subset) {
        double acc = 0.0;
        for (std::size_t c = 0; c < configs; ++c) {
            int sign = 1;
            for (int n = 0; n < n_ions; ++n) {
                if (subset >> n & 1u) sign *= spin_sign(static_cast<XIndex>(c), n);
            }
            acc += sign * phases[c];
        }
        poly.terms[subset] = acc / static_cast<double>(configs);
    }
    poly.prune();
    return poly;
}

void hadamard_transform(cvec& amplitudes, int n_ions) {
    const std::size_t size = amplitudes.size();
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int n = 0; n < n_ions; ++n) {
        const std::size_t bit = std::size_t{1} << n;
        for (std::size_t i = 0; i < size; ++i) {
            if (i & bit) continue;
            const cplx a0 = amplitudes[i];
            const cplx a1 = amplitudes[i | bit];
            amplitudes[i] = (a1 - a0) * inv_sqrt2;
            amplitudes[i | bit] = (a1 + a0) * inv_sqrt2;
        }
    }
}

cvec EffectiveUnitary::apply_to_state(const cvec& z_state) const {
    if (z_state.size() != x_phase_factors.size()) {
        throw std::invalid_argument("state dimension does not match unitary");
    }
    cvec state = z_state;
    hadamard_transform(state, n_ions);
    for (std::size_t i = 0; i < state.size(); ++i) state[i] *= x_phase_factors[i];
    hadamard_transform(state, n_ions);
    double norm = 0.0;
    for (const cplx& v : state) norm += std::norm(v);
    norm = std::sqrt(norm);
    for (cplx& v : state) v /= norm;
    return state;
}

EffectiveUnitary effective_unitary(const PulseSequence& seq) {
    const std::vector<double> phi = geometric_phases(seq);
    EffectiveUnitary u;
    u.n_ions = seq.chain.n_ions;
    u.x_phase_factors.resize(phi.size());
    for (std::size_t i = 0; i < phi.size(); ++i) u.x_phase_factors[i] = std::polar(1.0, -phi[i]);
    return u;
}

PauliXPolynomial effective_hamiltonian(const PauliXPolynomial& poly, double t_effective) {
    if (!(t_effective > 0.0)) throw std::invalid_argument("effective time must be positive");
    return poly.scaled(1.0 / t_effective);
}

cplx coherent_overlap(const BranchState& b1, const BranchState& b2) {
    if (std::abs(b1.rho) > closure_tolerance || std::abs(b2.rho) > closure_tolerance) {
        throw std::invalid_argument("coherent_overlap requires squeeze-free branches");
    }
    const cplx d = b1.beta - b2.beta;
    const cplx exponent(-0.5 * std::norm(d), std::imag(b1.beta * std::conj(b2.beta)));
    return std::conj(b2.phase_factor()) * b1.phase_factor() * std::exp(exponent);
}

}  // namespace ionsim
