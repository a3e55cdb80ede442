#include "ionsim/waveform.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace ionsim::waveform {

namespace {

// (exp(z) - 1) / z, stable near zero.
cplx expm1_over(cplx z) {
    if (std::abs(z) < 1e-4) {
        return 1.0 + z * (0.5 + z * (1.0 / 6.0 + z * (1.0 / 24.0 + z / 120.0)));
    }
    return (std::exp(z) - 1.0) / z;
}

}  // namespace

cplx basis_integral(int m, double duration, double detuning) {
    if (!(duration > 0.0)) throw std::invalid_argument("waveform: duration must be positive");
    if (m < 1) throw std::invalid_argument("waveform: basis index starts at 1");
    const double omega = pi * m / duration;
    // sin(w t) = (e^{iwt} - e^{-iwt}) / 2i
    const cplx plus = duration * expm1_over(cplx(0.0, (detuning + omega) * duration));
    const cplx minus = duration * expm1_over(cplx(0.0, (detuning - omega) * duration));
    return (plus - minus) / cplx(0.0, 2.0);
}

cplx displacement_integral(const std::vector<double>& coefficients, double duration,
                           double detuning, double eta, double motional_phase) {
    cplx acc(0.0, 0.0);
    for (std::size_t m = 0; m < coefficients.size(); ++m) {
        if (coefficients[m] == 0.0) continue;
        acc += coefficients[m] * basis_integral(static_cast<int>(m) + 1, duration, detuning);
    }
    return 0.5 * eta * std::polar(1.0, motional_phase) * acc;
}

double omega_at(const std::vector<double>& coefficients, double duration, double t) {
    double v = 0.0;
    for (std::size_t m = 0; m < coefficients.size(); ++m) {
        v += coefficients[m] * std::sin(pi * (m + 1) * t / duration);
    }
    return v;
}

WaveformSolution solve_waveform(const ChainConfig& chain, int ion, cplx alpha_target,
                                double duration, int basis_size) {
    chain.check();
    const int modes = static_cast<int>(chain.mode_frequencies.size());
    if (ion < 0 || ion >= chain.n_ions) throw std::invalid_argument("waveform: ion out of range");
    if (basis_size < modes + 1) {
        throw std::invalid_argument("waveform: basis must have at least n_modes + 1 terms");
    }
    const int target = chain.target_mode;
    const double phase = std::arg(alpha_target);
    const double magnitude = std::abs(alpha_target);

    // alpha_k is linear in the coefficients: row_k[m] = (eta_k/2) I_m(Delta_k).
    Eigen::MatrixXcd rows(modes, basis_size);
    for (int k = 0; k < modes; ++k) {
        const double delta = chain.mode_frequencies[target] - chain.mode_frequencies[k];
        const double eta = chain.lamb_dicke(ion, k);
        for (int m = 0; m < basis_size; ++m) {
            rows(k, m) = 0.5 * eta * basis_integral(m + 1, duration, delta);
        }
    }

    // Equality constraint on the target mode (pre-rotation value is real).
    Eigen::MatrixXd constraint(2, basis_size);
    Eigen::Vector2d rhs(magnitude, 0.0);
    constraint.row(0) = rows.row(target).real();
    constraint.row(1) = rows.row(target).imag();
    std::vector<int> keep;
    for (int r = 0; r < 2; ++r) {
        if (constraint.row(r).norm() > 1e-18) {
            keep.push_back(r);
        } else if (std::abs(rhs(r)) > 1e-15) {
            throw std::invalid_argument("waveform: constraint is singular (rank deficiency)");
        }
    }
    Eigen::MatrixXd a(keep.size(), basis_size);
    Eigen::VectorXd b(keep.size());
    for (std::size_t i = 0; i < keep.size(); ++i) {
        a.row(i) = constraint.row(keep[i]);
        b(i) = rhs(keep[i]);
    }

    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
    Eigen::VectorXd c0 = cod.solve(b);
    if ((a * c0 - b).norm() > 1e-10 * std::max(1.0, b.norm())) {
        throw std::invalid_argument("waveform: constraint is singular (rank deficiency)");
    }

    // Orthonormal null-space basis of the constraint.
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a.transpose());
    Eigen::MatrixXd q = qr.householderQ();
    const long rank = a.rows();
    Eigen::MatrixXd nullspace = q.rightCols(basis_size - rank);

    // Spectator residual rows, stacked real and imaginary parts.
    Eigen::MatrixXd spectators(2 * (modes - 1), basis_size);
    int r = 0;
    for (int k = 0; k < modes; ++k) {
        if (k == target) continue;
        spectators.row(r++) = rows.row(k).real();
        spectators.row(r++) = rows.row(k).imag();
    }

    Eigen::VectorXd c = c0;
    if (modes > 1 && nullspace.cols() > 0) {
        const Eigen::MatrixXd gz = spectators * nullspace;
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> lsq(gz);
        const Eigen::VectorXd y = lsq.solve(-spectators * c0);
        c += nullspace * y;
    }

    WaveformSolution sol;
    sol.coefficients.assign(c.data(), c.data() + c.size());
    sol.duration = duration;
    sol.target_mode = target;
    sol.achieved.resize(modes);
    sol.objective = 0.0;
    for (int k = 0; k < modes; ++k) {
        cplx alpha(0.0, 0.0);
        for (int m = 0; m < basis_size; ++m) alpha += rows(k, m) * c(m);
        alpha *= std::polar(1.0, phase);
        sol.achieved[k] = alpha;
        if (k != target) sol.objective += std::norm(alpha);
    }

    const int samples = 2048;
    sol.omega_max = 0.0;
    for (int i = 0; i <= samples; ++i) {
        const double t = duration * i / samples;
        sol.omega_max = std::max(sol.omega_max, std::abs(omega_at(sol.coefficients, duration, t)));
    }
    if (sol.omega_max > chain.rabi_max) {
        char msg[160];
        std::snprintf(msg, sizeof msg,
                      "waveform: drive needs |Omega| up to %.6g rad/s, above the cap %.6g", sol.omega_max,
                      chain.rabi_max);
        throw std::invalid_argument(msg);
    }
    return sol;
}

std::vector<ModeReport> verify_solution(const WaveformSolution& sol, const ChainConfig& chain,
                                        int ion, double tol_rel) {
    const int modes = static_cast<int>(chain.mode_frequencies.size());
    const int target = chain.target_mode;
    const double target_mag = std::abs(sol.achieved.empty() ? cplx(1.0, 0.0) : sol.achieved[target]);
    const double phase = sol.achieved.empty() ? 0.0 : std::arg(sol.achieved[target]);
    std::vector<ModeReport> report(modes);
    for (int k = 0; k < modes; ++k) {
        const double delta = chain.mode_frequencies[target] - chain.mode_frequencies[k];
        const double eta = chain.lamb_dicke(ion, k);
        const cplx alpha =
            displacement_integral(sol.coefficients, sol.duration, delta, eta, phase);
        report[k].mode = k;
        report[k].achieved = alpha;
        report[k].magnitude = std::abs(alpha);
        report[k].spectator = k != target;
        report[k].flagged = report[k].spectator && report[k].magnitude > tol_rel * target_mag;
    }
    return report;
}

}  // namespace ionsim::waveform
