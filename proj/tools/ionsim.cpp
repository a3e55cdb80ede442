// ionsim command-line front end: builds gate sequences, runs the analytic
// branch engine and the truncated-Fock oracle, and emits scan/observable data
// as CSV or JSON. All numeric output is formatted to 12 significant digits;
// identical invocations produce byte-identical files.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "ionsim/analysis.hpp"
#include "ionsim/branch.hpp"
#include "ionsim/calibration.hpp"
#include "ionsim/fock.hpp"
#include "ionsim/io_util.hpp"
#include "ionsim/kernels.hpp"
#include "ionsim/model.hpp"
#include "ionsim/numeric.hpp"
#include "ionsim/resources.hpp"
#include "ionsim/sequences.hpp"
#include "ionsim/waveform.hpp"

using json = nlohmann::ordered_json;
using namespace ionsim;

namespace {

// ---------------------------------------------------------------------------
// shared plumbing

struct CliError : std::runtime_error {
    std::string code;
    CliError(std::string code_, const std::string& msg) : std::runtime_error(msg), code(std::move(code_)) {}
};

std::string resolve_out(const std::string& path) {
    if (path.empty()) return path;
    std::filesystem::path p(path);
    if (p.is_absolute()) return path;
    if (const char* dir = std::getenv("IONSIM_OUT_DIR")) {
        return (std::filesystem::path(dir) / p).string();
    }
    return path;
}

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    return json::parse(io::read_text_file(path));
}

// Config files mirror the long option names; explicit flags win.
template <typename T>
void merge(const json& cfg, const char* key, const CLI::Option* opt, T& value) {
    if (opt != nullptr && opt->count() > 0) return;
    if (cfg.contains(key)) value = cfg.at(key).get<T>();
}

ChainConfig load_chain(const std::string& chain_file, int default_ions) {
    if (!chain_file.empty()) return chain_from_json(io::read_text_file(chain_file));
    return preset_chain(default_ions);
}

std::string bitstring(std::size_t z, int n_ions) {
    std::string s;
    for (int ion = 0; ion < n_ions; ++ion) s += (z >> ion & 1u) ? 'u' : 'd';
    return s;
}

json metadata_base(const std::string& command) {
    json meta;
    meta["command"] = command;
    meta["kernel"] = kern::active().name;
    return meta;
}

void emit(const std::string& out_path, const std::string& format, const io::CsvTable& table,
          const json& meta) {
    std::string payload;
    if (format == "csv") {
        payload = table.to_string();
    } else if (format == "json") {
        json j;
        j["metadata"] = meta;
        j["columns"] = table.header;
        j["rows"] = json::array();
        for (const auto& row : table.rows) j["rows"].push_back(row);
        payload = j.dump(2) + "\n";
    } else {
        throw CliError("cli_usage", "unknown format: " + format);
    }
    if (out_path.empty()) {
        std::cout << payload;
    } else {
        io::write_text_file(resolve_out(out_path), payload);
    }
}

analysis::Engine parse_engine(const std::string& name) {
    if (name == "branch") return analysis::Engine::Branch;
    if (name == "fock") return analysis::Engine::Fock;
    throw CliError("cli_usage", "engine must be branch, fock or both");
}

PulseSequence sequence_from_flags(const std::string& seqfile, const std::string& family,
                                  const std::string& chain_file, double phi0, double xi,
                                  double zeta, double phi3, bool echo) {
    if (!seqfile.empty()) return sequence_from_json(io::read_text_file(seqfile));
    if (family.empty()) {
        throw CliError("cli_usage", "need a sequence file or --family with parameters");
    }
    const ChainConfig chain = load_chain(chain_file, family == "rect4" ? 4 : 3);
    const double knob = family == "xxx" ? phi3 : phi0;
    return analysis::build_family(family, chain, knob, xi, zeta, echo);
}

// ---------------------------------------------------------------------------
// subcommands

struct BuildArgs {
    std::string family, chain_file, out, config;
    double phi0 = 0.0, xi = 0.0, zeta = 0.0, phi3 = 0.0;
    bool no_echo = false;
};

int run_build(BuildArgs& a, CLI::App* cmd) {
    const json cfg = load_config(a.config);
    merge(cfg, "family", cmd->get_option_no_throw("family"), a.family);
    merge(cfg, "phi0", cmd->get_option_no_throw("--phi0"), a.phi0);
    merge(cfg, "xi", cmd->get_option_no_throw("--xi"), a.xi);
    merge(cfg, "zeta", cmd->get_option_no_throw("--zeta"), a.zeta);
    merge(cfg, "phi3", cmd->get_option_no_throw("--phi3"), a.phi3);
    merge(cfg, "chain", cmd->get_option_no_throw("--chain"), a.chain_file);

    const ChainConfig chain = load_chain(a.chain_file, a.family == "rect4" ? 4 : 3);
    const double knob = a.family == "xxx" ? a.phi3 : a.phi0;
    const PulseSequence seq = analysis::build_family(a.family, chain, knob, a.xi, a.zeta, !a.no_echo);

    const auto diags = validate_sequence(seq);
    if (!diags.empty()) throw CliError("invalid_sequence", diags.front());
    io::write_text_file(resolve_out(a.out), sequence_to_json(seq));

    const auto cost = resources::native_cost(seq);
    std::cout << "wrote " << a.out << ": " << seq.label << ", "
              << (cost.displacements + cost.squeezes + cost.rotations) << " ops, total time "
              << io::format_double(total_duration(seq)) << " s\n";
    return 0;
}

struct SimulateArgs {
    std::string seqfile, prep, engine = "branch", out, format = "csv", config;
    int nmax = 30;
};

int run_simulate(SimulateArgs& a, CLI::App* cmd) {
    const json cfg = load_config(a.config);
    merge(cfg, "prep", cmd->get_option_no_throw("--prep"), a.prep);
    merge(cfg, "engine", cmd->get_option_no_throw("--engine"), a.engine);
    merge(cfg, "nmax", cmd->get_option_no_throw("--nmax"), a.nmax);

    const PulseSequence seq = sequence_from_json(io::read_text_file(a.seqfile));
    const int n = seq.chain.n_ions;
    const std::vector<PrepSpec> prep =
        a.prep.empty() ? std::vector<PrepSpec>() : parse_prep(a.prep, n);
    const fock::Config fcfg{a.nmax, 1e-8};

    json meta = metadata_base("simulate");
    meta["sequence"] = seq.label;
    meta["engine"] = a.engine;

    std::vector<double> pops;
    if (a.engine == "both") {
        pops = analysis::z_populations(seq, prep, analysis::Engine::Branch, fcfg);
        const cvec spin = analysis::output_spin_state(seq, prep);
        cvec rho_branch(spin.size() * spin.size());
        for (std::size_t i = 0; i < spin.size(); ++i) {
            for (std::size_t j = 0; j < spin.size(); ++j) {
                rho_branch[i * spin.size() + j] = spin[i] * std::conj(spin[j]);
            }
        }
        const fock::State state =
            fock::run(seq, prep.empty() ? cvec() : prep_state(prep), fcfg);
        const cvec rho_fock = fock::reduced_spin_density(state);
        const double dist = fock::trace_distance(rho_branch, rho_fock, 1 << n);
        meta["trace_distance"] = io::format_double(dist);
        std::cout << "engine trace distance: " << io::format_double(dist) << "\n";
    } else {
        pops = analysis::z_populations(seq, prep, parse_engine(a.engine), fcfg);
    }

    io::CsvTable table;
    table.header = {"kind", "key", "value"};
    for (std::size_t z = 0; z < pops.size(); ++z) {
        table.rows.push_back({"population", bitstring(z, n), io::format_double(pops[z])});
    }
    for (int ion = 0; ion < n; ++ion) {
        table.rows.push_back({"magnetization", "ion" + std::to_string(ion),
                              io::format_double(analysis::magnetization(pops, ion))});
    }
    emit(a.out, a.format, table, meta);
    return 0;
}

struct TruthTableArgs {
    std::string seqfile, family, chain_file, engine = "branch", out, format = "csv", config;
    double phi0 = 0.0, xi = 0.0, zeta = 0.0, phi3 = 0.0;
    int nmax = 30;
};

int run_truth_table(TruthTableArgs& a, CLI::App* cmd) {
    const json cfg = load_config(a.config);
    merge(cfg, "family", cmd->get_option_no_throw("--family"), a.family);
    merge(cfg, "phi0", cmd->get_option_no_throw("--phi0"), a.phi0);
    merge(cfg, "xi", cmd->get_option_no_throw("--xi"), a.xi);
    merge(cfg, "zeta", cmd->get_option_no_throw("--zeta"), a.zeta);
    merge(cfg, "phi3", cmd->get_option_no_throw("--phi3"), a.phi3);
    merge(cfg, "engine", cmd->get_option_no_throw("--engine"), a.engine);

    const PulseSequence seq =
        sequence_from_flags(a.seqfile, a.family, a.chain_file, a.phi0, a.xi, a.zeta, a.phi3, true);
    const int n = seq.chain.n_ions;
    const auto table_data =
        analysis::truth_table(seq, parse_engine(a.engine), fock::Config{a.nmax, 1e-8});

    io::CsvTable table;
    table.header = {"input"};
    for (std::size_t z = 0; z < table_data.size(); ++z) {
        table.header.push_back("out_" + bitstring(z, n));
    }
    for (std::size_t in = 0; in < table_data.size(); ++in) {
        std::vector<std::string> row{bitstring(in, n)};
        for (double p : table_data[in]) row.push_back(io::format_double(p));
        table.rows.push_back(std::move(row));
    }
    json meta = metadata_base("truth-table");
    meta["sequence"] = seq.label;
    meta["engine"] = a.engine;
    emit(a.out, a.format, table, meta);
    return 0;
}

struct ParityArgs {
    std::string seqfile, family, chain_file, prep, engine = "branch", out, format = "csv", config;
    double phi0 = 0.0, xi = 0.0, zeta = 0.0, phi3 = 0.0;
    int points = 24, nmax = 30;
    std::uint64_t shots = 0, seed = 0;
};

int run_parity(ParityArgs& a, CLI::App* cmd) {
    const json cfg = load_config(a.config);
    merge(cfg, "family", cmd->get_option_no_throw("--family"), a.family);
    merge(cfg, "phi0", cmd->get_option_no_throw("--phi0"), a.phi0);
    merge(cfg, "xi", cmd->get_option_no_throw("--xi"), a.xi);
    merge(cfg, "zeta", cmd->get_option_no_throw("--zeta"), a.zeta);
    merge(cfg, "phi3", cmd->get_option_no_throw("--phi3"), a.phi3);
    merge(cfg, "prep", cmd->get_option_no_throw("--prep"), a.prep);
    merge(cfg, "points", cmd->get_option_no_throw("--points"), a.points);
    merge(cfg, "shots", cmd->get_option_no_throw("--shots"), a.shots);
    merge(cfg, "seed", cmd->get_option_no_throw("--seed"), a.seed);

    const PulseSequence seq =
        sequence_from_flags(a.seqfile, a.family, a.chain_file, a.phi0, a.xi, a.zeta, a.phi3, true);
    const int n = seq.chain.n_ions;
    const std::vector<PrepSpec> prep =
        a.prep.empty() ? std::vector<PrepSpec>(n) : parse_prep(a.prep, n);

    std::vector<double> thetas(a.points);
    for (int i = 0; i < a.points; ++i) thetas[i] = two_pi * i / a.points;

    const auto scan = analysis::parity_scan(seq, prep, thetas, parse_engine(a.engine), a.shots,
                                            a.seed, fock::Config{a.nmax, 1e-8});
    const auto fit = analysis::fit_sine(scan.thetas, scan.parities, n);
    const auto pops = analysis::z_populations(seq, prep, parse_engine(a.engine));
    const double fidelity = analysis::ghz_fidelity(pops, fit);

    io::CsvTable table;
    table.header = {"theta", "parity"};
    if (a.shots > 0) {
        table.header.push_back("sampled");
        table.header.push_back("sigma");
    }
    for (std::size_t k = 0; k < thetas.size(); ++k) {
        std::vector<double> row{scan.thetas[k], scan.parities[k]};
        if (a.shots > 0) {
            row.push_back(scan.sampled_parities[k]);
            row.push_back(scan.sigmas[k]);
        }
        table.add_row(row);
    }
    json meta = metadata_base("parity");
    meta["sequence"] = seq.label;
    meta["prep"] = prep_to_string(prep);
    meta["fit_frequency"] = n;
    meta["fit_amplitude"] = io::format_double(fit.amplitude);
    meta["fit_phase"] = io::format_double(fit.phase);
    meta["fit_offset"] = io::format_double(fit.offset);
    meta["fit_rms"] = io::format_double(fit.rms_residual);
    meta["ghz_fidelity"] = io::format_double(fidelity);
    if (a.shots > 0) {
        meta["shots"] = a.shots;
        meta["seed"] = a.seed;
        meta["rng"] = "mt19937_64/cdf-walk, per-point substream";
    }
    emit(a.out, a.format, table, meta);
    std::cout << "fitted amplitude " << io::format_double(fit.amplitude) << ", ghz fidelity "
              << io::format_double(fidelity) << "\n";
    return 0;
}

struct ScanArgs {
    std::string family = "ms", chain_file, prep, observable = "flip", engine = "branch";
    std::string out, format = "csv", config;
    double phi0_min = 0.0, phi0_max = pi, xi = 0.0, zeta = 0.0;
    int points = 50;
    std::uint64_t shots = 0, seed = 0;
    bool no_echo = false;
};

int run_scan(ScanArgs& a, CLI::App* cmd) {
    const json cfg = load_config(a.config);
    merge(cfg, "family", cmd->get_option_no_throw("--family"), a.family);
    merge(cfg, "phi0-min", cmd->get_option_no_throw("--phi0-min"), a.phi0_min);
    merge(cfg, "phi0-max", cmd->get_option_no_throw("--phi0-max"), a.phi0_max);
    merge(cfg, "points", cmd->get_option_no_throw("--points"), a.points);
    merge(cfg, "xi", cmd->get_option_no_throw("--xi"), a.xi);
    merge(cfg, "zeta", cmd->get_option_no_throw("--zeta"), a.zeta);
    merge(cfg, "prep", cmd->get_option_no_throw("--prep"), a.prep);
    merge(cfg, "observable", cmd->get_option_no_throw("--observable"), a.observable);
    merge(cfg, "shots", cmd->get_option_no_throw("--shots"), a.shots);
    merge(cfg, "seed", cmd->get_option_no_throw("--seed"), a.seed);

    const ChainConfig chain = load_chain(a.chain_file, a.family == "rect4" ? 4 : 3);
    analysis::ScanSpec spec;
    spec.family = a.family;
    spec.xi = a.xi;
    spec.zeta = a.zeta;
    spec.prep = a.prep.empty() ? std::vector<PrepSpec>(chain.n_ions) : parse_prep(a.prep, chain.n_ions);
    spec.echo = !a.no_echo;
    spec.engine = parse_engine(a.engine);
    if (a.points < 1) throw CliError("cli_usage", "need at least one scan point");
    for (int i = 0; i < a.points; ++i) {
        spec.phi0_grid.push_back(a.points == 1
                                     ? a.phi0_min
                                     : a.phi0_min + (a.phi0_max - a.phi0_min) * i / (a.points - 1));
    }
    const auto points = analysis::scan_phi0(spec, chain);

    io::CsvTable table;
    json meta = metadata_base("scan");
    meta["family"] = a.family;
    meta["xi"] = io::format_double(a.xi);
    meta["zeta"] = io::format_double(a.zeta);
    meta["prep"] = prep_to_string(spec.prep);
    meta["observable"] = a.observable;
    if (a.shots > 0) {
        meta["shots"] = a.shots;
        meta["seed"] = a.seed;
        meta["rng"] = "mt19937_64/cdf-walk, per-point substream";
    }

    const auto flip_ions = displaced_ions(
        analysis::build_family(a.family, chain, a.family == "xxx" ? pi / 4 : 1.0, a.xi, a.zeta,
                               spec.echo));
    if (a.observable == "flip") {
        for (int ion : flip_ions) {
            if (spec.prep[ion].basis != PrepBasis::Z) {
                throw CliError("cli_usage",
                               "flip observable needs z-basis preparation on the displaced ions");
            }
        }
        table.header = {"phi0", "exact"};
        if (a.shots > 0) {
            table.header.push_back("sampled");
            table.header.push_back("sigma");
        }
        for (std::size_t k = 0; k < points.size(); ++k) {
            std::vector<double> row{points[k].phi0, points[k].flip};
            if (a.shots > 0) {
                const auto s = analysis::sample_shots(points[k].populations, a.shots,
                                                      num::substream_seed(a.seed, k));
                const double flip = analysis::flip_probability(s.frequencies, spec.prep, flip_ions);
                row.push_back(flip);
                row.push_back(std::sqrt(flip * (1.0 - flip) / static_cast<double>(a.shots)));
            }
            table.add_row(row);
        }
    } else if (a.observable == "magnetization") {
        table.header = {"phi0"};
        for (int ion = 0; ion < chain.n_ions; ++ion) table.header.push_back("m_ion" + std::to_string(ion));
        if (a.shots > 0) {
            for (int ion = 0; ion < chain.n_ions; ++ion) {
                table.header.push_back("m_sampled_ion" + std::to_string(ion));
            }
        }
        for (std::size_t k = 0; k < points.size(); ++k) {
            std::vector<double> row{points[k].phi0};
            for (double m : points[k].magnetizations) row.push_back(m);
            if (a.shots > 0) {
                const auto s = analysis::sample_shots(points[k].populations, a.shots,
                                                      num::substream_seed(a.seed, k));
                for (int ion = 0; ion < chain.n_ions; ++ion) {
                    row.push_back(analysis::magnetization(s.frequencies, ion));
                }
            }
            table.add_row(row);
        }
    } else {
        throw CliError("cli_usage", "observable must be flip or magnetization");
    }
    emit(a.out, a.format, table, meta);
    return 0;
}

struct CalibrateArgs {
    std::string mode, kind = "displace", out, format = "csv", config;
    double amplitude = 0.4, drive_phase = 0.0, phi0 = 0.4, xi = 0.27;
    double span = 1.0e5, duration = 26e-6;
    int points = 25, nmax = 30;
};

int run_calibrate(CalibrateArgs& a, CLI::App* cmd) {
    const json cfg = load_config(a.config);
    merge(cfg, "kind", cmd->get_option_no_throw("--kind"), a.kind);
    merge(cfg, "amplitude", cmd->get_option_no_throw("--amplitude"), a.amplitude);
    merge(cfg, "phi0", cmd->get_option_no_throw("--phi0"), a.phi0);
    merge(cfg, "xi", cmd->get_option_no_throw("--xi"), a.xi);
    merge(cfg, "points", cmd->get_option_no_throw("--points"), a.points);
    merge(cfg, "span", cmd->get_option_no_throw("--span"), a.span);

    if (a.points < 2) throw CliError("cli_usage", "need at least two scan points");
    const fock::Config fcfg{a.nmax, 1e-8};
    const calibration::DriveKind kind =
        a.kind == "squeeze" ? calibration::DriveKind::Squeeze : calibration::DriveKind::Displace;
    io::CsvTable table;
    json meta = metadata_base("calibrate");
    meta["mode"] = a.mode;

    if (a.mode == "common-phase") {
        std::vector<double> thetas(a.points);
        for (int i = 0; i < a.points; ++i) thetas[i] = -pi / 2.0 + pi * i / (a.points - 1.0);
        const auto scan =
            calibration::scan_common_phase(kind, a.amplitude, a.drive_phase, thetas, fcfg);
        table.header = {"theta", "flip"};
        for (std::size_t k = 0; k < thetas.size(); ++k) table.add_row({scan.thetas[k], scan.flip[k]});
        meta["kind"] = a.kind;
        if (scan.degenerate) {
            meta["result"] = "degenerate scan";
        } else {
            meta["theta0"] = io::format_double(scan.theta0);
            meta["reported_phase"] = io::format_double(scan.reported_phase);
        }
    } else if (a.mode == "squeeze-orientation") {
        std::vector<double> dphi(a.points);
        for (int i = 0; i < a.points; ++i) dphi[i] = two_pi * i / (a.points - 1.0);
        const auto scan = calibration::scan_squeeze_orientation(a.phi0, a.xi, dphi, fcfg);
        table.header = {"dphi", "flip"};
        for (std::size_t k = 0; k < dphi.size(); ++k) table.add_row({scan.dphi[k], scan.flip[k]});
        meta["p_a"] = io::format_double(scan.p_a);
        meta["p_b"] = io::format_double(scan.p_b);
        if (scan.extraction_valid) {
            const auto est = calibration::estimate_phi_xi(scan.p_a, scan.p_b);
            meta["estimated_phi0"] = io::format_double(est.phi0);
            meta["estimated_xi"] = io::format_double(est.xi);
        } else {
            meta["warning"] = "phi0 e^xi >= pi/2: extraction disabled";
        }
    } else if (a.mode == "motional") {
        std::vector<double> deltas(a.points);
        for (int i = 0; i < a.points; ++i) {
            deltas[i] = -a.span + 2.0 * a.span * i / (a.points - 1.0);
        }
        const auto scan =
            calibration::scan_motional_frequency(a.amplitude, deltas, kind, a.duration, fcfg);
        table.header = scan.closed_form.empty()
                           ? std::vector<std::string>{"detuning", "flip"}
                           : std::vector<std::string>{"detuning", "flip", "closed_form"};
        for (std::size_t k = 0; k < deltas.size(); ++k) {
            std::vector<double> row{scan.detunings[k], scan.flip[k]};
            if (!scan.closed_form.empty()) row.push_back(scan.closed_form[k]);
            table.add_row(row);
        }
        meta["kind"] = a.kind;
    } else {
        throw CliError("cli_usage",
                       "calibrate mode must be common-phase, squeeze-orientation or motional");
    }
    emit(a.out, a.format, table, meta);
    return 0;
}

struct WaveformArgs {
    std::string chain_file, out, omega_csv, config;
    int ions = 3, ion = 0, basis = 12;
    double alpha_re = 0.5, alpha_im = 0.0, duration = 26e-6;
};

int run_waveform(WaveformArgs& a, CLI::App* cmd) {
    const json cfg = load_config(a.config);
    merge(cfg, "ions", cmd->get_option_no_throw("--ions"), a.ions);
    merge(cfg, "ion", cmd->get_option_no_throw("--ion"), a.ion);
    merge(cfg, "alpha-re", cmd->get_option_no_throw("--alpha-re"), a.alpha_re);
    merge(cfg, "alpha-im", cmd->get_option_no_throw("--alpha-im"), a.alpha_im);
    merge(cfg, "duration", cmd->get_option_no_throw("--duration"), a.duration);
    merge(cfg, "basis", cmd->get_option_no_throw("--basis"), a.basis);

    const ChainConfig chain = load_chain(a.chain_file, a.ions);
    const auto sol = waveform::solve_waveform(chain, a.ion, cplx(a.alpha_re, a.alpha_im),
                                              a.duration, a.basis);
    const auto report = waveform::verify_solution(sol, chain, a.ion);

    json j;
    j["metadata"] = metadata_base("waveform");
    j["ion"] = a.ion;
    j["duration"] = a.duration;
    j["basis"] = a.basis;
    j["coefficients"] = sol.coefficients;
    j["objective"] = sol.objective;
    j["omega_max"] = sol.omega_max;
    json modes = json::array();
    for (const auto& mode : report) {
        json m;
        m["mode"] = mode.mode;
        m["achieved"] = {mode.achieved.real(), mode.achieved.imag()};
        m["magnitude"] = mode.magnitude;
        m["spectator"] = mode.spectator;
        m["flagged"] = mode.flagged;
        modes.push_back(m);
    }
    j["modes"] = modes;
    const std::string payload = j.dump(2) + "\n";
    if (a.out.empty()) {
        std::cout << payload;
    } else {
        io::write_text_file(resolve_out(a.out), payload);
    }

    if (!a.omega_csv.empty()) {
        io::CsvTable table;
        table.header = {"t", "omega"};
        const int samples = 512;
        for (int i = 0; i <= samples; ++i) {
            const double t = a.duration * i / samples;
            table.add_row({t, waveform::omega_at(sol.coefficients, a.duration, t)});
        }
        io::write_text_file(resolve_out(a.omega_csv), table.to_string());
    }
    return 0;
}

struct CompareArgs {
    std::string out, format = "csv", config;
    int min_n = 2, max_n = 10;
};

int run_compare(CompareArgs& a, CLI::App* cmd) {
    const json cfg = load_config(a.config);
    merge(cfg, "min-n", cmd->get_option_no_throw("--min-n"), a.min_n);
    merge(cfg, "max-n", cmd->get_option_no_throw("--max-n"), a.max_n);

    const auto rows = resources::compare(a.min_n, a.max_n);
    io::CsvTable table;
    table.header = {"n_ions", "native_ops", "two_qubit_gates"};
    for (const auto& row : rows) {
        table.rows.push_back({std::to_string(row.n_ions), std::to_string(row.native_ops),
                              std::to_string(row.two_qubit_gates)});
    }
    emit(a.out, a.format, table, metadata_base("compare-cost"));
    return 0;
}

int dispatch(int argc, char** argv) {
    CLI::App app{"trapped-ion N-body entangling-gate simulator"};
    app.require_subcommand(1);

    BuildArgs build;
    auto* cmd_build = app.add_subcommand("build", "emit a gate sequence file");
    cmd_build->add_option("family", build.family, "ms|rect3|rect4|xxx");
    cmd_build->add_option("--phi0", build.phi0);
    cmd_build->add_option("--xi", build.xi);
    cmd_build->add_option("--zeta", build.zeta);
    cmd_build->add_option("--phi3", build.phi3);
    cmd_build->add_flag("--no-echo", build.no_echo);
    cmd_build->add_option("--chain", build.chain_file, "chain JSON overriding the preset");
    cmd_build->add_option("--out", build.out)->required();
    cmd_build->add_option("--config", build.config);

    SimulateArgs sim;
    auto* cmd_sim = app.add_subcommand("simulate", "run a sequence file");
    cmd_sim->add_option("seqfile", sim.seqfile)->required();
    cmd_sim->add_option("--prep", sim.prep, "per-ion tokens, e.g. dz,ux,dz");
    cmd_sim->add_option("--engine", sim.engine, "branch|fock|both");
    cmd_sim->add_option("--nmax", sim.nmax);
    cmd_sim->add_option("--out", sim.out);
    cmd_sim->add_option("--format", sim.format);
    cmd_sim->add_option("--config", sim.config);

    TruthTableArgs tt;
    auto* cmd_tt = app.add_subcommand("truth-table", "outcome distribution per z-basis input");
    cmd_tt->add_option("seqfile", tt.seqfile);
    cmd_tt->add_option("--family", tt.family);
    cmd_tt->add_option("--phi0", tt.phi0);
    cmd_tt->add_option("--xi", tt.xi);
    cmd_tt->add_option("--zeta", tt.zeta);
    cmd_tt->add_option("--phi3", tt.phi3);
    cmd_tt->add_option("--chain", tt.chain_file);
    cmd_tt->add_option("--engine", tt.engine);
    cmd_tt->add_option("--nmax", tt.nmax);
    cmd_tt->add_option("--out", tt.out);
    cmd_tt->add_option("--format", tt.format);
    cmd_tt->add_option("--config", tt.config);

    ParityArgs par;
    auto* cmd_par = app.add_subcommand("parity", "parity fringe scan with a fixed-frequency fit");
    cmd_par->add_option("seqfile", par.seqfile);
    cmd_par->add_option("--family", par.family);
    cmd_par->add_option("--phi0", par.phi0);
    cmd_par->add_option("--xi", par.xi);
    cmd_par->add_option("--zeta", par.zeta);
    cmd_par->add_option("--phi3", par.phi3);
    cmd_par->add_option("--chain", par.chain_file);
    cmd_par->add_option("--prep", par.prep);
    cmd_par->add_option("--points", par.points);
    cmd_par->add_option("--shots", par.shots);
    cmd_par->add_option("--seed", par.seed);
    cmd_par->add_option("--engine", par.engine);
    cmd_par->add_option("--nmax", par.nmax);
    cmd_par->add_option("--out", par.out);
    cmd_par->add_option("--format", par.format);
    cmd_par->add_option("--config", par.config);

    ScanArgs scan;
    auto* cmd_scan = app.add_subcommand("scan", "sweep phi0 for a gate family");
    cmd_scan->add_option("--family", scan.family);
    cmd_scan->add_option("--phi0-min", scan.phi0_min);
    cmd_scan->add_option("--phi0-max", scan.phi0_max);
    cmd_scan->add_option("--points", scan.points);
    cmd_scan->add_option("--xi", scan.xi);
    cmd_scan->add_option("--zeta", scan.zeta);
    cmd_scan->add_option("--prep", scan.prep);
    cmd_scan->add_option("--observable", scan.observable, "flip|magnetization");
    cmd_scan->add_option("--shots", scan.shots);
    cmd_scan->add_option("--seed", scan.seed);
    cmd_scan->add_option("--engine", scan.engine);
    cmd_scan->add_option("--chain", scan.chain_file);
    cmd_scan->add_flag("--no-echo", scan.no_echo);
    cmd_scan->add_option("--out", scan.out);
    cmd_scan->add_option("--format", scan.format);
    cmd_scan->add_option("--config", scan.config);

    CalibrateArgs cal;
    auto* cmd_cal = app.add_subcommand("calibrate", "simulated calibration scans");
    cmd_cal->add_option("mode", cal.mode, "common-phase|squeeze-orientation|motional")->required();
    cmd_cal->add_option("--kind", cal.kind, "displace|squeeze");
    cmd_cal->add_option("--amplitude", cal.amplitude);
    cmd_cal->add_option("--drive-phase", cal.drive_phase);
    cmd_cal->add_option("--phi0", cal.phi0);
    cmd_cal->add_option("--xi", cal.xi);
    cmd_cal->add_option("--span", cal.span, "detuning half-range, rad/s");
    cmd_cal->add_option("--duration", cal.duration);
    cmd_cal->add_option("--points", cal.points);
    cmd_cal->add_option("--nmax", cal.nmax);
    cmd_cal->add_option("--out", cal.out);
    cmd_cal->add_option("--format", cal.format);
    cmd_cal->add_option("--config", cal.config);

    WaveformArgs wf;
    auto* cmd_wf = app.add_subcommand("waveform", "solve the mode-decoupling drive");
    cmd_wf->add_option("--chain", wf.chain_file);
    cmd_wf->add_option("--ions", wf.ions);
    cmd_wf->add_option("--ion", wf.ion);
    cmd_wf->add_option("--alpha-re", wf.alpha_re);
    cmd_wf->add_option("--alpha-im", wf.alpha_im);
    cmd_wf->add_option("--duration", wf.duration);
    cmd_wf->add_option("--basis", wf.basis);
    cmd_wf->add_option("--out", wf.out);
    cmd_wf->add_option("--omega-csv", wf.omega_csv);
    cmd_wf->add_option("--config", wf.config);

    CompareArgs cmp;
    auto* cmd_cmp = app.add_subcommand("compare-cost", "native vs two-qubit gate counts");
    cmd_cmp->add_option("--min-n", cmp.min_n);
    cmd_cmp->add_option("--max-n", cmp.max_n);
    cmd_cmp->add_option("--out", cmp.out);
    cmd_cmp->add_option("--format", cmp.format);
    cmd_cmp->add_option("--config", cmp.config);

    CLI11_PARSE(app, argc, argv);

    if (cmd_build->parsed()) return run_build(build, cmd_build);
    if (cmd_sim->parsed()) return run_simulate(sim, cmd_sim);
    if (cmd_tt->parsed()) return run_truth_table(tt, cmd_tt);
    if (cmd_par->parsed()) return run_parity(par, cmd_par);
    if (cmd_scan->parsed()) return run_scan(scan, cmd_scan);
    if (cmd_cal->parsed()) return run_calibrate(cal, cmd_cal);
    if (cmd_wf->parsed()) return run_waveform(wf, cmd_wf);
    if (cmd_cmp->parsed()) return run_compare(cmp, cmd_cmp);
    return 0;
}

void print_error(const std::string& code, const std::string& message) {
    json j;
    j["code"] = code;
    j["message"] = message;
    std::cerr << j.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const CliError& e) {
        print_error(e.code, e.what());
    } catch (const OpenLoopError& e) {
        print_error("open_loop", std::string(e.what()) + "; rerun with --engine fock");
    } catch (const BranchIncompatible& e) {
        print_error("branch_incompatible", std::string(e.what()) + "; rerun with --engine fock");
    } catch (const fock::TruncationLeak& e) {
        print_error("truncation_leak", e.what());
    } catch (const std::invalid_argument& e) {
        print_error("invalid_argument", e.what());
    } catch (const std::exception& e) {
        print_error("error", e.what());
    }
    return 1;
}
