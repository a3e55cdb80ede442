#include "ionsim/model.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace ionsim {

namespace {

using json = nlohmann::json;

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void normalize(std::vector<double>& v) {
    const double n = std::sqrt(dot(v, v));
    if (n == 0.0) throw std::invalid_argument("cannot normalize zero vector");
    for (double& x : v) x /= n;
}

// Builds an orthonormal mode basis: column 0 is the normalized target vector,
// the remaining columns are the seeds after Gram-Schmidt against everything
// accepted so far.
std::vector<std::vector<double>> orthonormal_modes(std::vector<double> target,
                                                   std::vector<std::vector<double>> seeds) {
    normalize(target);
    std::vector<std::vector<double>> cols{target};
    for (auto& seed : seeds) {
        for (const auto& prev : cols) {
            const double p = dot(seed, prev);
            for (std::size_t i = 0; i < seed.size(); ++i) seed[i] -= p * prev[i];
        }
        normalize(seed);
        cols.push_back(seed);
    }
    return cols;
}

ChainConfig assemble_chain(int n_ions, std::vector<double> freqs_hz, std::vector<bool> synthetic,
                           std::vector<double> target, std::vector<std::vector<double>> seeds) {
    ChainConfig chain;
    chain.n_ions = n_ions;
    chain.mode_frequencies.reserve(freqs_hz.size());
    for (double f : freqs_hz) chain.mode_frequencies.push_back(two_pi * f);
    chain.synthetic_mode = std::move(synthetic);
    chain.lamb_dicke_scale = 0.08;
    chain.rabi_max = two_pi * 1.0e6;
    chain.target_mode = 0;

    const auto cols = orthonormal_modes(std::move(target), std::move(seeds));
    chain.participation_data.assign(static_cast<std::size_t>(n_ions) * cols.size(), 0.0);
    for (int n = 0; n < n_ions; ++n) {
        for (std::size_t k = 0; k < cols.size(); ++k) {
            chain.participation_data[static_cast<std::size_t>(n) * cols.size() + k] = cols[k][n];
        }
    }
    chain.check();
    return chain;
}

}  // namespace

ChainConfig preset_chain(int n_ions) {
    if (n_ions == 3) {
        return assemble_chain(3, {2.817e6, 2.9235e6, 3.03e6}, {false, true, false},
                              {0.41, 0.82, 0.41},
                              {{1.0, 0.0, -1.0}, {1.0, 1.0, 1.0}});
    }
    if (n_ions == 4) {
        return assemble_chain(4, {2.781e6, 2.864e6, 2.947e6, 3.03e6}, {false, true, true, false},
                              {0.21, -0.67, 0.67, -0.21},
                              {{1.0, -1.0, -1.0, 1.0}, {1.0, 1.0, -1.0, -1.0}, {1.0, 1.0, 1.0, 1.0}});
    }
    throw std::invalid_argument("preset_chain: only 3- and 4-ion chains are defined");
}

void ChainConfig::check() const {
    const std::size_t modes = mode_frequencies.size();
    if (n_ions < 1) throw std::invalid_argument("chain: n_ions must be positive");
    if (modes < 1) throw std::invalid_argument("chain: no modes");
    if (participation_data.size() != static_cast<std::size_t>(n_ions) * modes) {
        throw std::invalid_argument("chain: participation shape mismatch");
    }
    if (synthetic_mode.size() != modes) throw std::invalid_argument("chain: synthetic flag shape");
    if (target_mode < 0 || static_cast<std::size_t>(target_mode) >= modes) {
        throw std::invalid_argument("chain: target mode out of range");
    }
    for (std::size_t k = 0; k < modes; ++k) {
        if (mode_frequencies[k] <= 0.0) throw std::invalid_argument("chain: frequencies must be positive");
        if (k > 0 && mode_frequencies[k] <= mode_frequencies[k - 1]) {
            throw std::invalid_argument("chain: frequencies must be strictly increasing");
        }
    }
    for (std::size_t k = 0; k < modes; ++k) {
        for (std::size_t l = k; l < modes; ++l) {
            double s = 0.0;
            for (int n = 0; n < n_ions; ++n) {
                s += participation(n, static_cast<int>(k)) * participation(n, static_cast<int>(l));
            }
            const double want = (k == l) ? 1.0 : 0.0;
            if (std::abs(s - want) > 1e-9) {
                throw std::invalid_argument("chain: participation columns are not orthonormal");
            }
        }
    }
}

std::vector<std::string> validate_sequence(const PulseSequence& seq) {
    std::vector<std::string> diags;
    try {
        seq.chain.check();
    } catch (const std::exception& e) {
        diags.emplace_back(e.what());
    }
    bool dynamics_seen = false;
    for (std::size_t i = 0; i < seq.ops.size(); ++i) {
        const auto& op = seq.ops[i];
        const auto tag = [&](const std::string& msg) {
            diags.push_back("op " + std::to_string(i) + ": " + msg);
        };
        const int ion = std::visit([](const auto& o) { return o.ion; }, op);
        if (ion < 0 || ion >= seq.chain.n_ions) tag("ion index out of range");
        if (const auto* d = std::get_if<DisplaceOp>(&op)) {
            if (!std::isfinite(d->alpha.real()) || !std::isfinite(d->alpha.imag())) {
                tag("displacement amplitude not finite");
            }
            dynamics_seen = true;
        } else if (const auto* s = std::get_if<SqueezeOp>(&op)) {
            if (s->xi < 0.0) tag("squeeze magnitude must be nonnegative");
            if (s->sign != 1 && s->sign != -1) tag("squeeze sign must be +1 or -1");
            if (std::abs(s->motional_phase) > 1e-12 && std::abs(s->motional_phase - pi) > 1e-12) {
                tag("squeeze motional phase must be 0 or pi");
            }
            dynamics_seen = true;
        } else if (std::holds_alternative<RotateOp>(op)) {
            dynamics_seen = true;
        } else if (std::holds_alternative<PrepOp>(op)) {
            if (dynamics_seen) tag("prep after dynamics");
        }
    }
    return diags;
}

void PauliXPolynomial::prune() {
    for (auto it = terms.begin(); it != terms.end();) {
        if (std::abs(it->second) < prune_threshold) {
            it = terms.erase(it);
        } else {
            ++it;
        }
    }
}

double PauliXPolynomial::coefficient(std::uint32_t subset) const {
    const auto it = terms.find(subset);
    return it == terms.end() ? 0.0 : it->second;
}

double PauliXPolynomial::evaluate(XIndex config, int n_ions) const {
    double total = 0.0;
    for (const auto& [subset, coeff] : terms) {
        int sign = 1;
        for (int n = 0; n < n_ions; ++n) {
            if (subset >> n & 1u) sign *= spin_sign(config, n);
        }
        total += sign * coeff;
    }
    return total;
}

PauliXPolynomial PauliXPolynomial::scaled(double factor) const {
    PauliXPolynomial out;
    for (const auto& [subset, coeff] : terms) out.terms[subset] = coeff * factor;
    out.prune();
    return out;
}

namespace {

json chain_json(const ChainConfig& chain) {
    json j;
    j["n_ions"] = chain.n_ions;
    j["mode_frequencies"] = chain.mode_frequencies;
    json rows = json::array();
    const std::size_t modes = chain.mode_frequencies.size();
    for (int n = 0; n < chain.n_ions; ++n) {
        json row = json::array();
        for (std::size_t k = 0; k < modes; ++k) row.push_back(chain.participation(n, static_cast<int>(k)));
        rows.push_back(row);
    }
    j["participation"] = rows;
    j["synthetic_modes"] = chain.synthetic_mode;
    j["lamb_dicke_scale"] = chain.lamb_dicke_scale;
    j["rabi_max"] = chain.rabi_max;
    j["target_mode"] = chain.target_mode;
    return j;
}

ChainConfig chain_parse(const json& j) {
    ChainConfig chain;
    chain.n_ions = j.at("n_ions").get<int>();
    chain.mode_frequencies = j.at("mode_frequencies").get<std::vector<double>>();
    const auto rows = j.at("participation");
    for (const auto& row : rows) {
        for (const auto& v : row) chain.participation_data.push_back(v.get<double>());
    }
    chain.synthetic_mode = j.at("synthetic_modes").get<std::vector<bool>>();
    chain.lamb_dicke_scale = j.at("lamb_dicke_scale").get<double>();
    chain.rabi_max = j.at("rabi_max").get<double>();
    chain.target_mode = j.at("target_mode").get<int>();
    chain.check();
    return chain;
}

json op_json(const PulseOp& op) {
    json j;
    if (const auto* d = std::get_if<DisplaceOp>(&op)) {
        j["type"] = "displace";
        j["ion"] = d->ion;
        j["alpha"] = {d->alpha.real(), d->alpha.imag()};
        j["motional_phase"] = d->motional_phase;
        j["spin_phase"] = d->spin_phase;
        j["detuning"] = d->detuning;
        j["duration"] = d->duration;
    } else if (const auto* s = std::get_if<SqueezeOp>(&op)) {
        j["type"] = "squeeze";
        j["ion"] = s->ion;
        j["xi"] = s->xi;
        j["sign"] = s->sign;
        j["motional_phase"] = s->motional_phase;
        j["spin_phase"] = s->spin_phase;
        j["duration"] = s->duration;
    } else if (const auto* r = std::get_if<RotateOp>(&op)) {
        j["type"] = "rotate";
        j["ion"] = r->ion;
        j["axis_angle"] = r->axis_angle;
        j["rotation_angle"] = r->rotation_angle;
        j["duration"] = r->duration;
    } else {
        const auto& p = std::get<PrepOp>(op);
        j["type"] = p.basis == PrepBasis::Z ? "prep_z" : "prep_x";
        j["ion"] = p.ion;
        j["direction"] = p.up ? "up" : "down";
    }
    return j;
}

PulseOp op_parse(const json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "displace") {
        DisplaceOp d;
        d.ion = j.at("ion").get<int>();
        const auto a = j.at("alpha");
        d.alpha = cplx(a.at(0).get<double>(), a.at(1).get<double>());
        d.motional_phase = j.at("motional_phase").get<double>();
        d.spin_phase = j.at("spin_phase").get<double>();
        d.detuning = j.at("detuning").get<double>();
        d.duration = j.at("duration").get<double>();
        return d;
    }
    if (type == "squeeze") {
        SqueezeOp s;
        s.ion = j.at("ion").get<int>();
        s.xi = j.at("xi").get<double>();
        s.sign = j.at("sign").get<int>();
        s.motional_phase = j.at("motional_phase").get<double>();
        s.spin_phase = j.at("spin_phase").get<double>();
        s.duration = j.at("duration").get<double>();
        return s;
    }
    if (type == "rotate") {
        RotateOp r;
        r.ion = j.at("ion").get<int>();
        r.axis_angle = j.at("axis_angle").get<double>();
        r.rotation_angle = j.at("rotation_angle").get<double>();
        r.duration = j.at("duration").get<double>();
        return r;
    }
    if (type == "prep_z" || type == "prep_x") {
        PrepOp p;
        p.ion = j.at("ion").get<int>();
        p.basis = type == "prep_z" ? PrepBasis::Z : PrepBasis::X;
        const std::string dir = j.at("direction").get<std::string>();
        if (dir != "up" && dir != "down") throw std::invalid_argument("prep direction must be up or down");
        p.up = dir == "up";
        return p;
    }
    throw std::invalid_argument("unknown op type: " + type);
}

}  // namespace

std::string chain_to_json(const ChainConfig& chain) { return chain_json(chain).dump(2) + "\n"; }

ChainConfig chain_from_json(const std::string& text) { return chain_parse(json::parse(text)); }

std::string sequence_to_json(const PulseSequence& seq) {
    json j;
    j["label"] = seq.label;
    j["chain"] = chain_json(seq.chain);
    json ops = json::array();
    for (const auto& op : seq.ops) ops.push_back(op_json(op));
    j["ops"] = ops;
    return j.dump(2) + "\n";
}

PulseSequence sequence_from_json(const std::string& text) {
    const json j = json::parse(text);
    PulseSequence seq;
    seq.label = j.at("label").get<std::string>();
    seq.chain = chain_parse(j.at("chain"));
    for (const auto& jop : j.at("ops")) seq.ops.push_back(op_parse(jop));
    return seq;
}

bool sequences_equal(const PulseSequence& a, const PulseSequence& b) {
    if (a.label != b.label || a.chain.n_ions != b.chain.n_ions) return false;
    if (a.chain.mode_frequencies != b.chain.mode_frequencies) return false;
    if (a.chain.participation_data != b.chain.participation_data) return false;
    if (a.chain.synthetic_mode != b.chain.synthetic_mode) return false;
    if (a.chain.lamb_dicke_scale != b.chain.lamb_dicke_scale) return false;
    if (a.chain.rabi_max != b.chain.rabi_max || a.chain.target_mode != b.chain.target_mode) return false;
    if (a.ops.size() != b.ops.size()) return false;
    for (std::size_t i = 0; i < a.ops.size(); ++i) {
        if (a.ops[i].index() != b.ops[i].index()) return false;
        bool same = true;
        std::visit(
            [&](const auto& x) {
                using T = std::decay_t<decltype(x)>;
                const auto& y = std::get<T>(b.ops[i]);
                if constexpr (std::is_same_v<T, DisplaceOp>) {
                    same = x.ion == y.ion && x.alpha == y.alpha && x.motional_phase == y.motional_phase &&
                           x.spin_phase == y.spin_phase && x.detuning == y.detuning &&
                           x.duration == y.duration;
                } else if constexpr (std::is_same_v<T, SqueezeOp>) {
                    same = x.ion == y.ion && x.xi == y.xi && x.sign == y.sign &&
                           x.motional_phase == y.motional_phase && x.spin_phase == y.spin_phase &&
                           x.duration == y.duration;
                } else if constexpr (std::is_same_v<T, RotateOp>) {
                    same = x.ion == y.ion && x.axis_angle == y.axis_angle &&
                           x.rotation_angle == y.rotation_angle && x.duration == y.duration;
                } else {
                    same = x.ion == y.ion && x.basis == y.basis && x.up == y.up;
                }
            },
            a.ops[i]);
        if (!same) return false;
    }
    return true;
}

std::vector<PrepSpec> parse_prep(const std::string& text, int n_ions) {
    std::vector<PrepSpec> prep;
    std::stringstream ss(text);
    std::string token;
    while (std::getline(ss, token, ',')) {
        if (token.empty()) continue;
        PrepSpec spec;
        if (token[0] == 'u') {
            spec.up = true;
        } else if (token[0] == 'd') {
            spec.up = false;
        } else {
            throw std::invalid_argument("prep token must start with u or d: " + token);
        }
        if (token.size() == 1 || token[1] == 'z') {
            spec.basis = PrepBasis::Z;
        } else if (token[1] == 'x') {
            spec.basis = PrepBasis::X;
        } else {
            throw std::invalid_argument("prep basis must be z or x: " + token);
        }
        prep.push_back(spec);
    }
    if (static_cast<int>(prep.size()) != n_ions) {
        throw std::invalid_argument("prep list length does not match ion count");
    }
    return prep;
}

std::string prep_to_string(const std::vector<PrepSpec>& prep) {
    std::string out;
    for (std::size_t i = 0; i < prep.size(); ++i) {
        if (i) out += ',';
        out += prep[i].up ? 'u' : 'd';
        out += prep[i].basis == PrepBasis::Z ? 'z' : 'x';
    }
    return out;
}

cvec prep_state(const std::vector<PrepSpec>& prep) {
    cvec state{cplx(1.0, 0.0)};
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (std::size_t n = 0; n < prep.size(); ++n) {
        cplx down(0.0, 0.0), up(0.0, 0.0);
        if (prep[n].basis == PrepBasis::Z) {
            (prep[n].up ? up : down) = cplx(1.0, 0.0);
        } else {
            // |+x> = (|up> + |down>)/sqrt(2), |-x> = (|up> - |down>)/sqrt(2)
            up = cplx(inv_sqrt2, 0.0);
            down = cplx(prep[n].up ? inv_sqrt2 : -inv_sqrt2, 0.0);
        }
        cvec next(state.size() * 2);
        for (std::size_t i = 0; i < state.size(); ++i) {
            next[i] = state[i] * down;
            next[i + state.size()] = state[i] * up;
        }
        state.swap(next);
    }
    return state;
}

}  // namespace ionsim
