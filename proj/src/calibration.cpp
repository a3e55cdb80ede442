#include "ionsim/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ionsim/analysis.hpp"
#include "ionsim/branch.hpp"
#include "ionsim/numeric.hpp"
#include "ionsim/sequences.hpp"

namespace ionsim::calibration {

namespace {

constexpr double pulse_default = 26e-6;

double wrap_half_pi(double angle) {
    // reduce mod pi into (-pi/2, pi/2]
    double a = std::fmod(angle, pi);
    if (a <= -pi / 2.0) a += pi;
    if (a > pi / 2.0) a -= pi;
    return a;
}

PulseOp make_rotation(double theta, double chi) {
    RotateOp op;
    op.ion = 0;
    op.axis_angle = theta;
    op.rotation_angle = chi;
    op.duration = 12.7e-6;
    return op;
}

}  // namespace

ChainConfig single_ion_chain() {
    ChainConfig chain;
    chain.n_ions = 1;
    chain.mode_frequencies = {two_pi * 2.817e6};
    chain.participation_data = {1.0};
    chain.synthetic_mode = {false};
    chain.lamb_dicke_scale = 0.08;
    chain.rabi_max = two_pi * 1.0e6;
    chain.target_mode = 0;
    chain.check();
    return chain;
}

CommonPhaseScan scan_common_phase(DriveKind kind, double amplitude, double drive_spin_phase,
                                  const std::vector<double>& thetas, const fock::Config& cfg) {
    CommonPhaseScan scan;
    scan.thetas = thetas;
    scan.flip.resize(thetas.size());
    const ChainConfig chain = single_ion_chain();
    num::parallel_for(thetas.size(), [&](std::size_t k) {
        PulseSequence seq;
        seq.chain = chain;
        seq.ops.push_back(make_rotation(thetas[k], pi / 2.0));
        if (kind == DriveKind::Displace) {
            DisplaceOp d;
            d.ion = 0;
            d.alpha = cplx(amplitude, 0.0);
            d.spin_phase = drive_spin_phase;
            d.duration = pulse_default;
            seq.ops.push_back(d);
        } else {
            SqueezeOp s;
            s.ion = 0;
            s.xi = amplitude;
            s.spin_phase = drive_spin_phase;
            s.duration = 29e-6;
            seq.ops.push_back(s);
        }
        seq.ops.push_back(make_rotation(thetas[k], -pi / 2.0));
        const fock::State state = fock::run(seq, {cplx(1.0, 0.0), cplx(0.0, 0.0)}, cfg);
        scan.flip[k] = fock::z_populations(state)[1];
    });
    const auto [min_it, max_it] = std::minmax_element(scan.flip.begin(), scan.flip.end());
    if (*max_it - *min_it < 1e-12) {
        scan.degenerate = true;
        return scan;
    }
    scan.theta0 = thetas[static_cast<std::size_t>(min_it - scan.flip.begin())];
    scan.reported_phase = wrap_half_pi(scan.theta0 + pi / 2.0);
    return scan;
}

OrientationScan scan_squeeze_orientation(double phi0, double xi,
                                         const std::vector<double>& dphi_grid,
                                         const fock::Config& cfg) {
    OrientationScan scan;
    scan.dphi = dphi_grid;
    scan.flip.resize(dphi_grid.size());
    scan.extraction_valid = phi0 * std::exp(xi) < pi / 2.0;

    const ChainConfig chain = preset_chain(3);
    const std::vector<PrepSpec> prep{{PrepBasis::Z, false}, {PrepBasis::X, false}, {PrepBasis::Z, false}};
    const auto flip_at = [&](double dphi) {
        PulseSequence seq = squeezed_rectangle_3(chain, phi0, xi);
        for (auto& op : seq.ops) {
            // Rotate the squeeze axis of every pulse; the sign field keeps each
            // sandwich an exact inverse pair.
            if (auto* s = std::get_if<SqueezeOp>(&op)) s->motional_phase = dphi;
        }
        const std::vector<double> pops =
            analysis::z_populations(seq, prep, analysis::Engine::Fock, cfg);
        return analysis::flip_probability(pops, prep, {0, 2});
    };
    num::parallel_for(dphi_grid.size(), [&](std::size_t k) { scan.flip[k] = flip_at(dphi_grid[k]); });
    scan.p_a = flip_at(0.0);
    scan.p_b = flip_at(pi);
    return scan;
}

PhiXiEstimate estimate_phi_xi(double p_a, double p_b) {
    if (!(p_a > 0.0)) throw std::invalid_argument("estimate_phi_xi: p_a must be positive (xi undefined at 0)");
    if (p_a > p_b) throw std::invalid_argument("estimate_phi_xi: requires p_a <= p_b");
    if (!(p_b < 1.0)) throw std::invalid_argument("estimate_phi_xi: p_b must be below 1");
    const double sa = std::asin(std::sqrt(p_a));
    const double sb = std::asin(std::sqrt(p_b));
    PhiXiEstimate out;
    out.phi0 = std::sqrt(sa * sb);
    out.xi = 0.5 * std::log(sb / sa);
    out.near_boundary = sb > pi / 2.0 - 0.05;
    return out;
}

MotionalScan scan_motional_frequency(double amplitude, const std::vector<double>& detunings,
                                     DriveKind kind, double pulse_duration, const fock::Config& cfg) {
    MotionalScan scan;
    scan.detunings = detunings;
    scan.flip.resize(detunings.size());
    if (kind == DriveKind::Displace) scan.closed_form.resize(detunings.size());
    const ChainConfig chain = single_ion_chain();
    const cvec down{cplx(1.0, 0.0), cplx(0.0, 0.0)};

    num::parallel_for(detunings.size(), [&](std::size_t k) {
        const double delta = detunings[k];
        if (kind == DriveKind::Displace) {
            PulseSequence seq;
            seq.chain = chain;
            DisplaceOp d1;
            d1.ion = 0;
            d1.alpha = cplx(amplitude, 0.0);
            d1.detuning = delta;
            d1.duration = pulse_duration;
            DisplaceOp d2 = d1;
            d2.alpha = -d1.alpha;  // motional phase advanced by pi
            d2.motional_phase = pi;
            seq.ops.push_back(d1);
            seq.ops.push_back(d2);
            const fock::State state = fock::run(seq, down, cfg);
            scan.flip[k] = fock::z_populations(state)[1];

            // Exact drive integral: beta = -rate (e^{i d T} - 1)^2 / (i d) on
            // the s = +1 branch; both branches share |beta| and phase, so
            // P_up = (1 - exp(-2|beta|^2)) / 2.
            cplx beta;
            if (delta == 0.0) {
                beta = cplx(0.0, 0.0);
            } else {
                const cplx i_d(0.0, delta);
                const cplx ramp = std::exp(i_d * pulse_duration) - 1.0;
                beta = -(amplitude / pulse_duration) * ramp * ramp / i_d;
            }
            scan.closed_form[k] = 0.5 * (1.0 - std::exp(-2.0 * std::norm(beta)));
        } else {
            SqueezeOp s1;
            s1.ion = 0;
            s1.xi = amplitude;
            s1.duration = pulse_duration;
            SqueezeOp s2 = s1;
            s2.motional_phase = pi;
            fock::State state = fock::make_state(down, 1, cfg.n_max);
            fock::apply_detuned_squeeze(state, s1, delta, cfg, 0.0);
            fock::apply_detuned_squeeze(state, s2, delta, cfg, pulse_duration);
            scan.flip[k] = fock::z_populations(state)[1];
        }
    });
    return scan;
}

}  // namespace ionsim::calibration
