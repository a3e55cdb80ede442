#include "ionsim/fock.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>

#include "ionsim/kernels.hpp"
#include "ionsim/numeric.hpp"

namespace ionsim::fock {

namespace {

std::size_t joint_dim(int n_ions, int n_max) {
    return (std::size_t{1} << n_ions) * (n_max + 1);
}

// sigma_phi in (down=0, up=1) indexing: off-diagonal e^{+-i phi}.
cplx spin_factor(double phi, int row_bit, int col_bit) {
    if (row_bit == col_bit) return cplx(0.0, 0.0);
    return row_bit == 1 ? std::polar(1.0, -phi) : std::polar(1.0, phi);
}

// Generator in factored form: sigma_{spin_phase} on `ion` (the identity when
// spin_diagonal is set, for rotation generators already carrying their -i chi/2
// scale) tensored with a banded phonon operator.
struct PhononBand {
    int row;
    int col;
    cplx value;
};

struct BandGen {
    int ion = 0;
    double spin_phase = 0.0;
    std::vector<PhononBand> bands;
};

BandGen displacement_gen(int ion, double spin_phase, cplx alpha, int n_max) {
    BandGen g;
    g.ion = ion;
    g.spin_phase = spin_phase;
    for (int n = 0; n < n_max; ++n) {
        g.bands.push_back({n + 1, n, alpha * std::sqrt(n + 1.0)});  // alpha a^dag
        g.bands.push_back({n, n + 1, -std::conj(alpha) * std::sqrt(n + 1.0)});
    }
    return g;
}

// (1/2)(conj(z) a^2 - z a^dag^2); real z keeps the q axis.
BandGen squeeze_gen(int ion, double spin_phase, cplx z, int n_max) {
    BandGen g;
    g.ion = ion;
    g.spin_phase = spin_phase;
    for (int n = 2; n <= n_max; ++n) {
        g.bands.push_back({n - 2, n, 0.5 * std::conj(z) * std::sqrt(n * (n - 1.0))});
    }
    for (int n = 0; n + 2 <= n_max; ++n) {
        g.bands.push_back({n + 2, n, -0.5 * z * std::sqrt((n + 1.0) * (n + 2.0))});
    }
    return g;
}

BandGen rotation_gen(const RotateOp& op, int n_max) {
    BandGen g;
    g.ion = op.ion;
    g.spin_phase = op.axis_angle;
    const cplx scale(0.0, -op.rotation_angle / 2.0);
    for (int n = 0; n <= n_max; ++n) g.bands.push_back({n, n, scale});
    return g;
}

BandGen static_generator(const PulseOp& op, int n_max) {
    if (const auto* d = std::get_if<DisplaceOp>(&op)) {
        if (d->detuning != 0.0) {
            throw std::invalid_argument("op_generator: detuned displacement has no static generator");
        }
        return displacement_gen(d->ion, d->spin_phase, d->alpha, n_max);
    }
    if (const auto* s = std::get_if<SqueezeOp>(&op)) {
        // Complex squeeze parameter; motional phase 0 or pi lands on the q axis
        // (the only orientations the sequence IR admits), other angles serve
        // the calibration scans.
        const cplx z = static_cast<double>(s->sign) * s->xi * std::polar(1.0, s->motional_phase);
        return squeeze_gen(s->ion, s->spin_phase, z, n_max);
    }
    if (const auto* r = std::get_if<RotateOp>(&op)) {
        return rotation_gen(*r, n_max);
    }
    throw std::invalid_argument("op_generator: prep pseudo-ops have no generator");
}

double band_one_norm(const BandGen& g, int n_max) {
    std::vector<double> col(n_max + 1, 0.0);
    for (const auto& band : g.bands) col[band.col] += std::abs(band.value);
    double best = 0.0;
    for (double c : col) best = std::max(best, c);
    return best;
}

// y = G x on k-column blocks, using the spin-flip (x) band structure. The
// per-band update is a k-length complex axpy, so the SIMD kernels stay on
// the hot path.
num::LinearOperator band_operator(const BandGen& g, int n_ions, int n_max) {
    num::LinearOperator op;
    const int levels = n_max + 1;
    op.dim = joint_dim(n_ions, n_max);
    op.norm1 = band_one_norm(g, n_max);
    op.apply = [g, n_ions, levels](const cplx* x, cplx* y, std::size_t k) {
        const std::size_t zcount = std::size_t{1} << n_ions;
        std::fill(y, y + zcount * levels * k, cplx(0.0, 0.0));
        const auto& kr = kern::active();
        for (std::size_t z = 0; z < zcount; ++z) {
            const std::size_t zr = z ^ (std::size_t{1} << g.ion);
            const int col_bit = (z >> g.ion) & 1u;
            const cplx sf = spin_factor(g.spin_phase, 1 - col_bit, col_bit);
            for (const auto& band : g.bands) {
                kr.caxpy(sf * band.value, x + (z * levels + band.col) * k,
                         y + (zr * levels + band.row) * k, k);
            }
        }
    };
    return op;
}

void leak_check(const State& state, const Config& cfg) {
    const int levels = state.n_max + 1;
    const std::size_t zcount = std::size_t{1} << state.n_ions;
    for (int c = 0; c < state.columns; ++c) {
        double top = 0.0;
        double total = 0.0;
        for (std::size_t z = 0; z < zcount; ++z) {
            top += std::norm(state.amplitude(static_cast<ZIndex>(z), levels - 2, c));
            top += std::norm(state.amplitude(static_cast<ZIndex>(z), levels - 1, c));
        }
        const std::size_t d = state.dim();
        for (std::size_t i = 0; i < d; ++i) total += std::norm(state.amplitudes[i * state.columns + c]);
        if (total > 0.0 && top > cfg.leak_tol * total) {
            char msg[128];
            std::snprintf(msg, sizeof msg,
                          "truncation leak %.3e above tolerance %.1e; increase n_max", top / total,
                          cfg.leak_tol);
            throw TruncationLeak(msg);
        }
    }
}

std::vector<double> column_norms(const State& state) {
    std::vector<double> norms(state.columns);
    for (int c = 0; c < state.columns; ++c) norms[c] = state.norm(c);
    return norms;
}

// exp of an anti-Hermitian generator preserves every norm; drift beyond 1e-9
// means the propagator tolerance was violated.
void drift_check(const State& state, const std::vector<double>& before) {
    for (int c = 0; c < state.columns; ++c) {
        if (before[c] == 0.0) continue;
        if (std::abs(state.norm(c) / before[c] - 1.0) > 1e-9) {
            throw std::runtime_error("fock: norm drifted beyond 1e-9; propagator tolerance exceeded");
        }
    }
}

void apply_sliced_displacement(State& state, const DisplaceOp& op, const Config& cfg,
                               double t_start) {
    if (!(op.duration > 0.0)) {
        throw std::invalid_argument("detuned displacement needs a positive duration");
    }
    const double delta = op.detuning;
    const double periods = std::abs(delta) * op.duration / two_pi;
    const int slices = std::max(200, static_cast<int>(std::ceil(periods * 200.0)));
    const double dt = op.duration / slices;
    // Drive alpha-dot(t) = (|alpha|/T) e^{i(delta t + arg alpha)}; each slice
    // applies the exactly integrated increment as a constant generator.
    const cplx rate = std::polar(std::abs(op.alpha) / op.duration, std::arg(op.alpha));
    for (int k = 0; k < slices; ++k) {
        const double t0 = t_start + k * dt;
        cplx dalpha;
        if (delta == 0.0) {
            dalpha = rate * dt;
        } else {
            const cplx i_delta(0.0, delta);
            dalpha = rate * (std::exp(i_delta * (t0 + dt)) - std::exp(i_delta * t0)) / i_delta;
        }
        const auto gen = band_operator(
            displacement_gen(op.ion, op.spin_phase, dalpha, state.n_max), state.n_ions, state.n_max);
        num::expm_apply(gen, state.amplitudes.data(), state.columns);
        if ((k & 63) == 63) leak_check(state, cfg);
    }
}

void sliced_squeeze(State& state, const SqueezeOp& op, double detuning, const Config& cfg,
                    double t_start) {
    if (!(op.duration > 0.0)) throw std::invalid_argument("detuned squeeze needs a positive duration");
    const double periods = std::abs(detuning) * op.duration / two_pi;
    const int slices = std::max(200, static_cast<int>(std::ceil(periods * 200.0)));
    const double dt = op.duration / slices;
    const cplx rate =
        static_cast<double>(op.sign) * op.xi / op.duration * std::polar(1.0, op.motional_phase);
    for (int k = 0; k < slices; ++k) {
        const double t0 = t_start + k * dt;
        cplx dz;
        if (detuning == 0.0) {
            dz = rate * dt;
        } else {
            const cplx i_delta(0.0, detuning);
            dz = rate * (std::exp(i_delta * (t0 + dt)) - std::exp(i_delta * t0)) / i_delta;
        }
        const auto gen = band_operator(squeeze_gen(op.ion, op.spin_phase, dz, state.n_max),
                                       state.n_ions, state.n_max);
        num::expm_apply(gen, state.amplitudes.data(), state.columns);
        if ((k & 63) == 63) leak_check(state, cfg);
    }
}

void apply_in_place(State& state, const PulseOp& op, const Config& cfg, double t_start) {
    if (std::holds_alternative<PrepOp>(op)) {
        throw std::invalid_argument("fock: prep pseudo-ops must precede dynamics and are applied by run()");
    }
    leak_check(state, cfg);
    const std::vector<double> norms = column_norms(state);
    if (const auto* d = std::get_if<DisplaceOp>(&op); d && d->detuning != 0.0) {
        apply_sliced_displacement(state, *d, cfg, t_start);
    } else {
        const auto gen = band_operator(static_generator(op, state.n_max), state.n_ions, state.n_max);
        num::expm_apply(gen, state.amplitudes.data(), state.columns);
    }
    leak_check(state, cfg);
    drift_check(state, norms);
}

}  // namespace

double State::norm(int column) const {
    double s = 0.0;
    const std::size_t d = dim();
    for (std::size_t i = 0; i < d; ++i) s += std::norm(amplitudes[i * columns + column]);
    return std::sqrt(s);
}

State make_state(const cvec& spin_state, int n_ions, int n_max) {
    return make_state_block({spin_state}, n_ions, n_max);
}

State make_state_block(const std::vector<cvec>& spin_states, int n_ions, int n_max) {
    State state;
    state.n_ions = n_ions;
    state.n_max = n_max;
    state.columns = static_cast<int>(spin_states.size());
    const int levels = n_max + 1;
    state.amplitudes.assign(state.dim() * state.columns, cplx(0.0, 0.0));
    const std::size_t zcount = std::size_t{1} << n_ions;
    for (int c = 0; c < state.columns; ++c) {
        if (spin_states[c].size() != zcount) {
            throw std::invalid_argument("fock: spin state dimension mismatch");
        }
        for (std::size_t z = 0; z < zcount; ++z) {
            state.amplitudes[(z * levels + 0) * state.columns + c] = spin_states[c][z];
        }
    }
    return state;
}

cvec op_generator(const PulseOp& op, int n_ions, int n_max) {
    const BandGen g = static_generator(op, n_max);
    const int levels = n_max + 1;
    const std::size_t dim = joint_dim(n_ions, n_max);
    cvec out(dim * dim, cplx(0.0, 0.0));
    const std::size_t zcount = std::size_t{1} << n_ions;
    for (std::size_t z = 0; z < zcount; ++z) {
        const std::size_t zr = z ^ (std::size_t{1} << g.ion);
        const int col_bit = (z >> g.ion) & 1u;
        const cplx sf = spin_factor(g.spin_phase, 1 - col_bit, col_bit);
        for (const auto& band : g.bands) {
            out[(zr * levels + band.row) * dim + (z * levels + band.col)] = sf * band.value;
        }
    }
    return out;
}

void apply(State& state, const PulseOp& op, const Config& cfg, double t_start) {
    cfg.check();
    apply_in_place(state, op, cfg, t_start);
}

void apply_detuned_squeeze(State& state, const SqueezeOp& op, double detuning, const Config& cfg,
                           double t_start) {
    cfg.check();
    leak_check(state, cfg);
    const std::vector<double> norms = column_norms(state);
    sliced_squeeze(state, op, detuning, cfg, t_start);
    leak_check(state, cfg);
    drift_check(state, norms);
}

State run_block(const PulseSequence& seq, const std::vector<cvec>& spins, const Config& cfg) {
    cfg.check();
    std::vector<cvec> initial = spins;
    if (initial.empty()) {
        std::vector<PrepSpec> prep(seq.chain.n_ions);
        for (const auto& op : seq.ops) {
            if (const auto* p = std::get_if<PrepOp>(&op)) {
                prep[p->ion] = PrepSpec{p->basis, p->up};
            }
        }
        initial.push_back(prep_state(prep));
    }
    State state = make_state_block(initial, seq.chain.n_ions, cfg.n_max);
    double t_elapsed = 0.0;
    for (const auto& op : seq.ops) {
        if (std::holds_alternative<PrepOp>(op)) continue;
        apply_in_place(state, op, cfg, t_elapsed);
        t_elapsed += std::visit(
            [](const auto& o) -> double {
                if constexpr (std::is_same_v<std::decay_t<decltype(o)>, PrepOp>) {
                    return 0.0;
                } else {
                    return o.duration;
                }
            },
            op);
    }
    return state;
}

State run(const PulseSequence& seq, const cvec& initial_spin, const Config& cfg) {
    std::vector<cvec> spins;
    if (!initial_spin.empty()) spins.push_back(initial_spin);
    return run_block(seq, spins, cfg);
}

cvec reduced_spin_density(const State& state, int column) {
    const std::size_t zcount = std::size_t{1} << state.n_ions;
    const int levels = state.n_max + 1;
    cvec rho(zcount * zcount, cplx(0.0, 0.0));
    for (std::size_t z1 = 0; z1 < zcount; ++z1) {
        for (std::size_t z2 = 0; z2 < zcount; ++z2) {
            cplx acc(0.0, 0.0);
            for (int n = 0; n < levels; ++n) {
                acc += state.amplitude(static_cast<ZIndex>(z1), n, column) *
                       std::conj(state.amplitude(static_cast<ZIndex>(z2), n, column));
            }
            rho[z1 * zcount + z2] = acc;
        }
    }
    return rho;
}

double trace_distance(const cvec& rho_a, const cvec& rho_b, int dim) {
    Eigen::MatrixXcd diff(dim, dim);
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
            diff(i, j) = rho_a[static_cast<std::size_t>(i) * dim + j] -
                         rho_b[static_cast<std::size_t>(i) * dim + j];
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(diff, Eigen::EigenvaluesOnly);
    return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

std::vector<double> z_populations(const State& state, int column) {
    const std::size_t zcount = std::size_t{1} << state.n_ions;
    const int levels = state.n_max + 1;
    std::vector<double> pops(zcount, 0.0);
    for (std::size_t z = 0; z < zcount; ++z) {
        for (int n = 0; n < levels; ++n) {
            pops[z] += std::norm(state.amplitude(static_cast<ZIndex>(z), n, column));
        }
    }
    return pops;
}

std::vector<double> phonon_distribution(const State& state, int column) {
    const std::size_t zcount = std::size_t{1} << state.n_ions;
    const int levels = state.n_max + 1;
    std::vector<double> dist(levels, 0.0);
    for (int n = 0; n < levels; ++n) {
        for (std::size_t z = 0; z < zcount; ++z) {
            dist[n] += std::norm(state.amplitude(static_cast<ZIndex>(z), n, column));
        }
    }
    return dist;
}

double mean_q_squared(const State& state, int column) {
    const std::size_t zcount = std::size_t{1} << state.n_ions;
    const int levels = state.n_max + 1;
    // tr(rho_ph q^2): q^2 couples n to n and n +- 2.
    double acc = 0.0;
    for (int n = 0; n < levels; ++n) {
        cplx diag(0.0, 0.0);
        for (std::size_t z = 0; z < zcount; ++z) {
            diag += state.amplitude(static_cast<ZIndex>(z), n, column) *
                    std::conj(state.amplitude(static_cast<ZIndex>(z), n, column));
        }
        acc += diag.real() * (2.0 * n + 1.0) / 4.0;
        if (n + 2 < levels) {
            cplx off(0.0, 0.0);
            for (std::size_t z = 0; z < zcount; ++z) {
                off += state.amplitude(static_cast<ZIndex>(z), n + 2, column) *
                       std::conj(state.amplitude(static_cast<ZIndex>(z), n, column));
            }
            acc += 2.0 * off.real() * std::sqrt((n + 1.0) * (n + 2.0)) / 4.0;
        }
    }
    return acc;
}

double purity(const cvec& rho, int dim) {
    double acc = 0.0;
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
            acc += std::norm(rho[static_cast<std::size_t>(i) * dim + j]);
        }
    }
    return acc;
}

}  // namespace ionsim::fock
