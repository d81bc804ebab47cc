// qpty: command-line front end for simulation, mitigation and reconstruction.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "qpty/experiments.hpp"
#include "qpty/io.hpp"
#include "qpty/mitigation.hpp"
#include "qpty/pie.hpp"
#include "qpty/protocol.hpp"
#include "qpty/stateprep.hpp"

namespace {

using namespace qpty;
using qpty::io::json;

struct Globals {
    std::uint64_t seed = 0;
    std::optional<std::uint64_t> shots;
    std::string unitary = "qft";
    double delta_beta = 0.04;
    std::optional<int> iterations;
    std::optional<double> beta0;
    std::string out;
};

class UsageError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

void emit(const Globals &g, const std::string &text) {
    if (g.out.empty() || g.out == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(g.out, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot write '" + g.out + "'");
    }
    f << text;
}

void write_file(const std::string &path, const std::string &text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot write '" + path + "'");
    }
    f << text;
}

// "qft", "hadamard", "separable", "aqft:<m>"
UnitarySpec parse_unitary(const std::string &s, int n, std::uint64_t seed) {
    if (s == "qft") {
        return UnitarySpec::qft();
    }
    if (s == "hadamard") {
        return UnitarySpec::hadamard();
    }
    if (s == "separable") {
        Rng rng(derive_seed(seed, {0x5E9A}));
        std::vector<EulerAngles> angles;
        for (int q = 0; q < n; ++q) {
            angles.push_back(haar_angles(rng));
        }
        return UnitarySpec::separable(std::move(angles));
    }
    if (s.rfind("aqft:", 0) == 0) {
        try {
            return UnitarySpec::aqft(std::stoi(s.substr(5)));
        } catch (const std::logic_error &) {
        }
    }
    throw UsageError("--unitary must be qft, hadamard, separable or aqft:<m>, got '" + s + "'");
}

PieConfig pie_config(const Globals &g, std::uint64_t init_seed) {
    PieConfig cfg;
    cfg.beta0 = g.beta0.value_or(2.0);
    cfg.delta_beta = g.delta_beta;
    if (g.iterations) {
        cfg.iterations = *g.iterations;
    } else if (g.delta_beta > 0.0) {
        cfg.iterations = static_cast<int>(std::lround(cfg.beta0 / g.delta_beta));
    } else {
        throw UsageError("--iterations is required when --delta-beta is 0");
    }
    cfg.init_seed = init_seed;
    cfg.validate();
    return cfg;
}

std::optional<ReadoutNoiseModel> noise_model(double eps, int bits) {
    if (eps <= 0.0) {
        return std::nullopt;
    }
    return ReadoutNoiseModel::symmetric(bits, eps);
}

std::string error_line(const std::string &kind, const std::string &message) {
    return json{{"error", kind}, {"message", message}}.dump() + "\n";
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Quantum ptychography: simulate, mitigate and reconstruct pure n-qubit states"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "TOML/INI file with option values");

    Globals g;
    app.add_option("--seed", g.seed, "Master RNG seed")->capture_default_str();
    app.add_option("--shots", g.shots, "Shots per circuit (0 = exact distributions)");
    app.add_option("--unitary", g.unitary, "qft | aqft:<m> | hadamard | separable")
        ->capture_default_str();
    app.add_option("--delta-beta", g.delta_beta, "Per-iteration decrement of beta")
        ->capture_default_str();
    app.add_option("--iterations", g.iterations, "PIE iterations (default round(beta0/delta-beta))");
    app.add_option("--beta0", g.beta0, "Initial feedback parameter (default 2)");
    app.add_option("--out", g.out, "Output path (default stdout)");

    // prepare-state
    auto *prep = app.add_subcommand("prepare-state", "Write a benchmark or random state");
    std::string prep_tag;
    std::string prep_random;
    int prep_n = 2;
    prep->add_option("--n", prep_n, "Qubit count")->capture_default_str();
    auto *tag_opt = prep->add_option("--tag", prep_tag, "psi1..psi10 (n=2), psi1n..psi5n, ghz, w");
    prep->add_option("--random", prep_random, "separable | arbitrary")
        ->excludes(tag_opt)
        ->check(CLI::IsMember({"separable", "arbitrary"}));

    // run-protocol
    auto *proto = app.add_subcommand("run-protocol", "Simulate the 3n ptychographic circuits");
    std::string proto_state;
    double proto_eps = 0.0;
    std::string proto_csv;
    proto->add_option("--state", proto_state, "State file")->required();
    proto->add_option("--readout-error", proto_eps, "Symmetric per-bit flip probability")
        ->capture_default_str();
    proto->add_option("--csv", proto_csv, "Also export counts as CSV (xi,q,s,j,count)");

    // calibrate
    auto *calib = app.add_subcommand("calibrate", "Simulate readout calibration circuits");
    int calib_n = 2;
    double calib_eps = 0.0;
    calib->add_option("--n", calib_n, "Qubit count")->required();
    calib->add_option("--readout-error", calib_eps, "Symmetric per-bit flip probability")
        ->capture_default_str();

    // mitigate
    auto *mit = app.add_subcommand("mitigate", "Apply calibration-matrix readout mitigation");
    std::string mit_dataset;
    std::string mit_cal;
    mit->add_option("--dataset", mit_dataset, "Dataset file")->required();
    mit->add_option("--calibration", mit_cal, "Calibration file")->required();

    // estimate
    auto *est = app.add_subcommand("estimate", "Reconstruct a state with PIE");
    std::string est_dataset;
    std::string est_reference;
    std::string est_trace;
    bool est_shuffle = false;
    std::optional<double> est_stop;
    est->add_option("--dataset", est_dataset, "Dataset file")->required();
    est->add_option("--reference", est_reference, "True state file (enables fidelity column)");
    est->add_option("--trace", est_trace, "Trace CSV path");
    est->add_flag("--shuffle", est_shuffle, "Shuffle projector order every iteration");
    est->add_option("--early-stop", est_stop, "Stop once the trace distance drops below this");

    // sweep
    auto *sweep = app.add_subcommand("sweep", "Shot-limited fidelity sweep over random states");
    std::vector<int> sweep_n = {2, 3, 4};
    std::string sweep_ens = "arbitrary";
    int sweep_states = 20;
    int sweep_runs = 20;
    std::vector<std::uint64_t> sweep_shots = {8192, 20000, 100000};
    bool sweep_paper = false;
    sweep->add_option("--n-range", sweep_n, "Qubit counts")->delimiter(',')->capture_default_str();
    sweep->add_option("--ensemble", sweep_ens, "separable | arbitrary | table")
        ->check(CLI::IsMember({"separable", "arbitrary", "table"}))
        ->capture_default_str();
    sweep->add_option("--states", sweep_states, "States per n")->capture_default_str();
    sweep->add_option("--runs", sweep_runs, "PIE runs per state")->capture_default_str();
    sweep->add_option("--shot-list", sweep_shots, "Shot counts (overridden by --shots)")
        ->delimiter(',')
        ->capture_default_str();
    sweep->add_flag("--paper-scale", sweep_paper, "100 states x 100 runs");

    // aqft-study
    auto *aqft = app.add_subcommand("aqft-study", "Benchmark states under AQFT of degree m");
    std::vector<int> aqft_n = {3, 4, 5, 6};
    std::vector<int> aqft_m = {1, 2, 3, 4};
    int aqft_runs = 10;
    aqft->add_option("--n-range", aqft_n, "Qubit counts")->delimiter(',')->capture_default_str();
    aqft->add_option("--m-list", aqft_m, "AQFT degrees")->delimiter(',')->capture_default_str();
    aqft->add_option("--runs", aqft_runs, "PIE runs per state")->capture_default_str();

    // bench
    auto *bench = app.add_subcommand("bench", "Time PIE post-processing");
    std::vector<int> bench_n = {2, 4, 6, 8, 10};
    int bench_runs = 10;
    bench->add_option("--n-range", bench_n, "Qubit counts")->delimiter(',')->capture_default_str();
    bench->add_option("--runs", bench_runs, "Timed runs per n")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e);
    } catch (const CLI::Error &e) {
        std::cerr << error_line("usage", e.what());
        return 2;
    }

    try {
        if (*prep) {
            io::StateProvenance prov;
            StateVector s;
            if (!prep_tag.empty()) {
                s = named_state(prep_tag, prep_n);
                prov = {"named", prep_tag, std::nullopt};
            } else if (!prep_random.empty()) {
                Rng rng(g.seed);
                s = prep_random == "separable" ? random_separable(prep_n, rng)
                                               : random_arbitrary(prep_n, rng);
                prov = {"random_" + prep_random, std::nullopt, g.seed};
            } else {
                throw UsageError("prepare-state needs --tag or --random");
            }
            emit(g, io::dump(io::to_json(s, prov)));
        } else if (*proto) {
            const auto psi = io::state_from_json(io::read_json_file(proto_state));
            const auto u = parse_unitary(g.unitary, psi.qubits(), g.seed);
            const auto ds = generate_dataset(psi, u, g.shots.value_or(100000),
                                             noise_model(proto_eps, psi.qubits() + 1), g.seed);
            emit(g, io::dump(io::to_json(ds)));
            if (!proto_csv.empty()) {
                std::ostringstream os;
                io::write_dataset_csv(os, ds);
                write_file(proto_csv, os.str());
            }
        } else if (*calib) {
            const auto model = ReadoutNoiseModel::symmetric(calib_n + 1, calib_eps);
            const auto cal = build_calibration(calib_n, model, g.shots.value_or(100000), g.seed);
            emit(g, io::dump(io::to_json(cal)));
        } else if (*mit) {
            const auto ds = io::dataset_from_json(io::read_json_file(mit_dataset));
            const auto cal = io::calibration_from_json(io::read_json_file(mit_cal));
            emit(g, io::dump(io::to_json(mitigate_dataset(ds, cal))));
        } else if (*est) {
            const auto ds = io::dataset_from_json(io::read_json_file(est_dataset));
            std::optional<StateVector> ref;
            if (!est_reference.empty()) {
                ref = io::state_from_json(io::read_json_file(est_reference));
            }
            auto cfg = pie_config(g, g.seed);
            if (est_shuffle) {
                cfg.order = ProjectorOrder::Shuffled;
                cfg.shuffle_seed = derive_seed(g.seed, {0x5F});
            }
            cfg.early_stop_distance = est_stop;
            const auto res = pie_run(ds, cfg, ref);
            emit(g, io::dump(io::to_json(res.estimate, io::StateProvenance{"estimate", std::nullopt, g.seed})));
            if (!est_trace.empty()) {
                std::ostringstream os;
                io::write_trace_csv(os, res.trace);
                write_file(est_trace, os.str());
            }
        } else if (*sweep) {
            experiments::SweepConfig cfg;
            cfg.n_range = sweep_n;
            cfg.ensemble = sweep_ens == "separable"   ? experiments::Ensemble::RandomSeparable
                           : sweep_ens == "arbitrary" ? experiments::Ensemble::RandomArbitrary
                                                      : experiments::Ensemble::Benchmark;
            cfg.states_per_n = sweep_states;
            cfg.runs_per_state = sweep_runs;
            if (sweep_paper) {
                cfg.paper_scale();
            }
            cfg.shots = g.shots ? std::vector<std::uint64_t>{*g.shots} : sweep_shots;
            const auto u = parse_unitary(g.unitary, 1, g.seed);
            cfg.unitary = u.kind == UnitarySpec::Kind::Qft        ? experiments::UnitaryFamily::Qft
                          : u.kind == UnitarySpec::Kind::Aqft     ? experiments::UnitaryFamily::Aqft
                          : u.kind == UnitarySpec::Kind::Hadamard ? experiments::UnitaryFamily::Hadamard
                                                                  : experiments::UnitaryFamily::SeparableRandom;
            cfg.aqft_degree = u.m;
            // sweeps default to the 20-iteration schedule unless told otherwise
            Globals sg = g;
            if (app.get_option("--delta-beta")->count() == 0) {
                sg.delta_beta = 0.1;
            }
            cfg.pie = pie_config(sg, 0);
            cfg.master_seed = g.seed;
            std::ostringstream os;
            experiments::write_sweep_csv(os, experiments::run_fidelity_sweep(cfg));
            emit(g, os.str());
        } else if (*aqft) {
            experiments::AqftStudyConfig cfg;
            cfg.n_range = aqft_n;
            cfg.m_list = aqft_m;
            cfg.runs = aqft_runs;
            cfg.shots = g.shots.value_or(20000);
            cfg.pie = pie_config(g, 0);
            cfg.master_seed = g.seed;
            std::ostringstream os;
            experiments::write_aqft_csv(os, experiments::run_aqft_study(cfg));
            emit(g, os.str());
        } else if (*bench) {
            std::ostringstream os;
            experiments::write_timing_csv(
                os, experiments::run_timing_bench(bench_n, g.iterations.value_or(20), bench_runs, g.seed));
            emit(g, os.str());
        }
    } catch (const UsageError &e) {
        std::cerr << error_line("usage", e.what());
        return 2;
    } catch (const io::FormatError &e) {
        std::cerr << error_line("format", e.what());
        return 3;
    } catch (const SingularCalibrationError &e) {
        std::cerr << error_line("singular_calibration", e.what());
        return 4;
    } catch (const std::exception &e) {
        std::cerr << error_line("runtime", e.what());
        return 1;
    }
    return 0;
}
