#include "ionsim/sequences.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <stdexcept>

namespace ionsim {

namespace {

constexpr double rotation_duration = 12.7e-6;

double displace_duration(int n_ions) { return n_ions == 4 ? 44e-6 : 26e-6; }
double squeeze_duration(int n_ions) { return n_ions == 4 ? 49e-6 : 29e-6; }

DisplaceOp displace(int ion, cplx alpha, double duration) {
    DisplaceOp op;
    op.ion = ion;
    op.alpha = alpha;
    op.motional_phase = std::arg(alpha);
    op.duration = duration;
    return op;
}

SqueezeOp squeeze(int ion, double xi, int sign, double duration) {
    SqueezeOp op;
    op.ion = ion;
    op.xi = xi;
    op.sign = sign;
    op.duration = duration;
    return op;
}

RotateOp echo_pulse(int ion, double angle) {
    RotateOp op;
    op.ion = ion;
    op.rotation_angle = angle;
    op.duration = rotation_duration;
    return op;
}

void append_sandwiched_p_edge(std::vector<PulseOp>& ops, const std::vector<int>& squeeze_ions,
                              const std::vector<double>& magnitudes, int edge_ion, cplx alpha,
                              double d_dur, double s_dur, bool reversed) {
    const int open_sign = reversed ? +1 : -1;
    for (std::size_t i = squeeze_ions.size(); i-- > 0;) {
        ops.push_back(squeeze(squeeze_ions[i], magnitudes[i], open_sign, s_dur));
    }
    ops.push_back(displace(edge_ion, alpha, d_dur));
    for (std::size_t i = 0; i < squeeze_ions.size(); ++i) {
        ops.push_back(squeeze(squeeze_ions[i], magnitudes[i], -open_sign, s_dur));
    }
}

PulseSequence build_rectangle(const ChainConfig& chain, double phi0,
                              const std::vector<double>& squeeze_magnitudes,
                              const BuildOptions& opts) {
    if (phi0 < 0.0) throw std::invalid_argument("phi0 must be nonnegative");
    const int n = chain.n_ions;
    const double a = std::sqrt(phi0 / 2.0);
    const double d_dur = displace_duration(n);
    const double s_dur = squeeze_duration(n);
    const int q_ion = 0;
    const int p_ion = n - 1;
    std::vector<int> middles;
    for (int i = 1; i < n - 1; ++i) middles.push_back(i);

    PulseSequence seq;
    seq.chain = chain;
    auto half = [&](double sign) {
        seq.ops.push_back(displace(q_ion, cplx(sign * a, 0.0), d_dur));
        append_sandwiched_p_edge(seq.ops, middles, squeeze_magnitudes, p_ion,
                                 cplx(0.0, sign * a), d_dur, s_dur, opts.reversed_sandwich);
    };
    half(+1.0);
    if (opts.echo) {
        seq.ops.push_back(echo_pulse(q_ion, pi));
        seq.ops.push_back(echo_pulse(p_ion, pi));
    }
    half(-1.0);
    if (opts.echo) {
        seq.ops.push_back(echo_pulse(q_ion, -pi));
        seq.ops.push_back(echo_pulse(p_ion, -pi));
    }
    return seq;
}

std::string format_label(const char* fmt, double a, double b = 0.0, double c = 0.0) {
    char buf[128];
    std::snprintf(buf, sizeof buf, fmt, a, b, c);
    return buf;
}

}  // namespace

PulseSequence ms_rectangle(const ChainConfig& chain, double phi0, const BuildOptions& opts) {
    if (chain.n_ions != 3) throw std::invalid_argument("ms_rectangle expects the 3-ion chain");
    PulseSequence seq = build_rectangle(chain, phi0, {0.0}, opts);
    // The middle ion takes no part in the plain rectangle.
    std::erase_if(seq.ops, [](const PulseOp& op) { return std::holds_alternative<SqueezeOp>(op); });
    seq.label = format_label("ms(phi0=%g)", phi0);
    return seq;
}

PulseSequence squeezed_rectangle_3(const ChainConfig& chain, double phi0, double xi,
                                   const BuildOptions& opts) {
    if (chain.n_ions != 3) throw std::invalid_argument("squeezed_rectangle_3 expects the 3-ion chain");
    if (xi < 0.0) throw std::invalid_argument("xi must be nonnegative");
    PulseSequence seq = build_rectangle(chain, phi0, {xi}, opts);
    seq.label = format_label("rect3(phi0=%g,xi=%g)", phi0, xi);
    return seq;
}

PulseSequence squeezed_rectangle_4(const ChainConfig& chain, double phi0, double xi, double zeta,
                                   const BuildOptions& opts) {
    if (chain.n_ions != 4) throw std::invalid_argument("squeezed_rectangle_4 expects the 4-ion chain");
    if (xi < 0.0 || zeta < 0.0) throw std::invalid_argument("squeeze magnitudes must be nonnegative");
    PulseSequence seq = build_rectangle(chain, phi0, {xi, zeta}, opts);
    seq.label = format_label("rect4(phi0=%g,xi=%g,zeta=%g)", phi0, xi, zeta);
    return seq;
}

PureThreeBodyParams solve_pure_three_body(double phi3, double xi_cap) {
    const double limit = pi * std::tanh(xi_cap);
    if (!(phi3 > 0.0) || phi3 > limit) {
        char msg[128];
        std::snprintf(msg, sizeof msg,
                      "three-body angle %.6g outside (0, %.6g] reachable with xi <= %.3g", phi3,
                      limit, xi_cap);
        throw std::invalid_argument(msg);
    }
    PureThreeBodyParams p;
    p.xi = std::atanh(phi3 / pi);
    p.phi0 = pi / std::cosh(p.xi);
    return p;
}

PulseSequence pure_three_body(const ChainConfig& chain, double phi3, const BuildOptions& opts,
                              double xi_cap) {
    const PureThreeBodyParams p = solve_pure_three_body(phi3, xi_cap);
    PulseSequence seq = squeezed_rectangle_3(chain, p.phi0, p.xi, opts);
    seq.label = format_label("xxx(phi3=%g,xi=%g,phi0=%g)", phi3, p.xi, p.phi0);
    return seq;
}

PulseSequence with_prep(PulseSequence seq, const std::vector<PrepSpec>& prep) {
    if (static_cast<int>(prep.size()) != seq.chain.n_ions) {
        throw std::invalid_argument("prep list length does not match ion count");
    }
    std::erase_if(seq.ops, [](const PulseOp& op) { return std::holds_alternative<PrepOp>(op); });
    std::vector<PulseOp> ops;
    for (std::size_t ion = 0; ion < prep.size(); ++ion) {
        PrepOp p;
        p.ion = static_cast<int>(ion);
        p.basis = prep[ion].basis;
        p.up = prep[ion].up;
        ops.push_back(p);
    }
    ops.insert(ops.end(), seq.ops.begin(), seq.ops.end());
    seq.ops = std::move(ops);
    return seq;
}

PulseSequence with_analysis_rotations(PulseSequence seq, double theta) {
    for (int ion = 0; ion < seq.chain.n_ions; ++ion) {
        RotateOp op;
        op.ion = ion;
        op.axis_angle = theta;
        op.rotation_angle = pi / 2.0;
        op.duration = rotation_duration;
        seq.ops.push_back(op);
    }
    return seq;
}

std::vector<int> displaced_ions(const PulseSequence& seq) {
    std::set<int> ions;
    for (const auto& op : seq.ops) {
        if (const auto* d = std::get_if<DisplaceOp>(&op)) ions.insert(d->ion);
    }
    return {ions.begin(), ions.end()};
}

double total_duration(const PulseSequence& seq) {
    double t = 0.0;
    for (const auto& op : seq.ops) {
        t += std::visit(
            [](const auto& o) -> double {
                if constexpr (std::is_same_v<std::decay_t<decltype(o)>, PrepOp>) {
                    return 0.0;
                } else {
                    return o.duration;
                }
            },
            op);
    }
    return t;
}

}  // namespace ionsim
