// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fail.
//
//   acceptance                 criteria 1-10 (criterion 2 at desk scale)
//   acceptance --paper-scale   criterion 2 at 100 states x 100 runs
//   acceptance --only 5        a single criterion

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "oracles.hpp"
#include "qpty/experiments.hpp"
#include "qpty/mitigation.hpp"
#include "qpty/pie.hpp"

using namespace qpty;
namespace fs = std::filesystem;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v, int prec = 6) {
    std::ostringstream os;
    os.precision(prec);
    os << v;
    return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1. exact-data reconstruction of every benchmark state, n = 2..5, QFT
Verdict exact_reconstruction() {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 1.0;
    std::string worst_at;
    int runs = 0;
    for (int n = 2; n <= 5; ++n) {
        for (const auto &tag : table_tags(n)) {
            const auto psi = named_state(tag, n);
            const auto ds = generate_dataset(psi, UnitarySpec::qft(), 0, std::nullopt, 0);
            const auto targets = normalize_dataset(ds);
            for (std::uint64_t r = 0; r < 10; ++r) {
                const auto cfg = PieConfig::variable(0.04, derive_seed(1, {static_cast<std::uint64_t>(n), r}));
                const double f = fidelity(psi, pie_run(targets, ds.unitary, cfg).estimate);
                ++runs;
                if (f < worst) {
                    worst = f;
                    worst_at = tag + " n=" + std::to_string(n);
                }
            }
        }
    }
    const double secs = seconds_since(t0);
    return {worst > 1 - 1e-4 && secs < 120.0,
            std::to_string(runs) + " runs, min F = " + fmt(worst, 12) + " (" + worst_at +
                "), need > 0.9999; " + fmt(secs, 3) + " s, need < 120 s"};
}

// 2. n = 10, 2^13 shots, arbitrary and separable ensembles
Verdict fig3_cell(bool paper_scale) {
    const auto t0 = std::chrono::steady_clock::now();
    experiments::SweepConfig cfg;
    cfg.n_range = {10};
    cfg.shots = {8192};
    cfg.states_per_n = 20;
    cfg.runs_per_state = 20;
    if (paper_scale) {
        cfg.paper_scale();
    }
    cfg.pie = PieConfig::variable(0.1);
    cfg.master_seed = 2;
    const double tol = paper_scale ? 0.01 : 0.02;

    cfg.ensemble = experiments::Ensemble::RandomArbitrary;
    const auto arb = experiments::run_fidelity_sweep(cfg)[0];
    cfg.ensemble = experiments::Ensemble::RandomSeparable;
    const auto sep = experiments::run_fidelity_sweep(cfg)[0];
    const double secs = seconds_since(t0);

    const bool ok_arb = std::abs(arb.mean_fidelity - 0.992) <= tol;
    const bool ok_sep = std::abs(sep.mean_fidelity - 0.989) <= tol;
    const bool ok_time = paper_scale || secs < 15 * 60.0;
    return {ok_arb && ok_sep && ok_time,
            std::string(paper_scale ? "paper scale 100x100" : "desk scale 20x20") +
                ": arbitrary mean F = " + fmt(arb.mean_fidelity) + " (std " + fmt(arb.std_fidelity, 3) +
                ", target 0.992 +- " + fmt(tol) + "), separable mean F = " + fmt(sep.mean_fidelity) +
                " (std " + fmt(sep.std_fidelity, 3) + ", target 0.989 +- " + fmt(tol) + "); " +
                fmt(secs, 4) + " s" + (paper_scale ? "" : ", need < 900 s")};
}

// 3. mean F non-decreasing in shots within one pooled standard deviation
Verdict shot_monotonicity() {
    experiments::SweepConfig cfg;
    cfg.n_range = {6, 8};
    cfg.shots = {8192, 20000, 100000};
    cfg.states_per_n = 20;
    cfg.runs_per_state = 20;
    cfg.ensemble = experiments::Ensemble::RandomArbitrary;
    cfg.pie = PieConfig::variable(0.1);
    cfg.master_seed = 3;
    const auto rows = experiments::run_fidelity_sweep(cfg);
    bool ok = true;
    std::string detail;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        detail += "n=" + std::to_string(rows[i].n) + " Ns=" + std::to_string(rows[i].shots) + " F=" +
                  fmt(rows[i].mean_fidelity) + "+-" + fmt(rows[i].std_fidelity, 2) + "; ";
        if (i > 0 && rows[i].n == rows[i - 1].n) {
            const double pooled =
                std::sqrt(0.5 * (rows[i].std_fidelity * rows[i].std_fidelity +
                                 rows[i - 1].std_fidelity * rows[i - 1].std_fidelity));
            ok = ok && rows[i].mean_fidelity >= rows[i - 1].mean_fidelity - pooled;
        }
    }
    return {ok, detail + "non-decreasing within pooled std"};
}

// 4. dense AQFT(n) == QFT and AQFT unitarity, n <= 5
Verdict aqft_exactness() {
    double dev_qft = 0.0;
    double dev_unitary = 0.0;
    for (int n = 1; n <= 5; ++n) {
        const std::size_t d = std::size_t{1} << n;
        dev_qft = std::max(dev_qft, oracle::max_abs_diff(unitary_matrix(UnitarySpec::aqft(n), n),
                                                         unitary_matrix(UnitarySpec::qft(), n)));
        for (int m = 1; m <= n; ++m) {
            oracle::Dense u(d);
            u.a = unitary_matrix(UnitarySpec::aqft(m), n);
            const auto prod = oracle::multiply(oracle::dagger(u), u);
            dev_unitary = std::max(dev_unitary, oracle::max_abs_diff(prod.a, oracle::identity(d).a));
        }
    }
    return {dev_qft < 1e-12 && dev_unitary < 1e-12,
            "max |AQFT(n) - QFT| = " + fmt(dev_qft, 3) + ", max |U^dag U - I| = " + fmt(dev_unitary, 3) +
                ", need < 1e-12"};
}

// 5. AQFT degree study, 2e4 shots, delta beta 0.04, 10 runs per state
Verdict aqft_study() {
    const auto t0 = std::chrono::steady_clock::now();
    experiments::AqftStudyConfig cfg;
    cfg.n_range = {3, 4, 5, 6};
    cfg.m_list = {1, 2, 3, 4};
    cfg.shots = 20000;
    cfg.runs = 10;
    cfg.pie = PieConfig::variable(0.04);
    cfg.master_seed = 5;
    const auto rows = experiments::run_aqft_study(cfg);
    const double secs = seconds_since(t0);

    double min_m2 = 1.0;
    double min_sep_m1 = 1.0;
    double ghz4 = -1.0, w3 = -1.0, w4 = -1.0;
    for (const auto &r : rows) {
        if (r.m >= 2) {
            min_m2 = std::min(min_m2, r.mean_fidelity);
        } else {
            if (r.tag == "psi1n" || r.tag == "psi2n" || r.tag == "psi3n") {
                min_sep_m1 = std::min(min_sep_m1, r.mean_fidelity);
            }
            if (r.tag == "psi4n" && r.n == 4) {
                ghz4 = r.mean_fidelity;
            }
            if (r.tag == "psi5n" && r.n == 3) {
                w3 = r.mean_fidelity;
            }
            if (r.tag == "psi5n" && r.n == 4) {
                w4 = r.mean_fidelity;
            }
        }
    }
    const bool a = min_m2 > 0.97;
    const bool b = ghz4 < 0.9 && min_sep_m1 > 0.99;
    const bool c = w3 - w4 >= 0.05;
    return {a && b && c && secs < 1800.0,
            "(a) min F at m>=2 = " + fmt(min_m2) + " need > 0.97; (b) m=1 GHZ_4 F = " + fmt(ghz4) +
                " need < 0.9, min separable F = " + fmt(min_sep_m1) + " need > 0.99; (c) m=1 W_3 - W_4 = " +
                fmt(w3) + " - " + fmt(w4) + " need >= 0.05; " + fmt(secs, 4) + " s, need < 1800 s"};
}

double total_variation(const std::vector<double> &a, const std::vector<double> &b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += std::abs(a[i] - b[i]);
    }
    return 0.5 * s;
}

// 6. mitigation round trip and PIE gain on GHZ_3
Verdict mitigation_round_trip() {
    const double eps = 0.025;
    const std::uint64_t shots = 100000;
    double worst_ratio = 0.0;
    std::string worst_at;
    for (int n = 1; n <= 4; ++n) {
        const auto model = ReadoutNoiseModel::symmetric(n + 1, eps);
        const Mitigator mit(build_calibration(n, model, 0, 0));
        const double bound = 3.0 * std::sqrt(static_cast<double>(std::size_t{2} << n) / shots);
        std::vector<StateVector> states;
        for (std::uint64_t i = 0; i < 5; ++i) {
            Rng rng(derive_seed(6, {static_cast<std::uint64_t>(n), i}));
            states.push_back(random_arbitrary(n, rng));
        }
        if (n >= 2) {
            for (const auto &tag : table_tags(n)) {
                states.push_back(named_state(tag, n));
            }
        }
        for (std::size_t s = 0; s < states.size(); ++s) {
            const auto ds = generate_dataset(states[s], UnitarySpec::qft(), shots, model,
                                             derive_seed(60, {static_cast<std::uint64_t>(n), s}));
            for (const auto &rec : ds.records) {
                auto x = mit.apply(rec.counts);
                for (auto &v : x) {
                    v /= static_cast<double>(shots);
                }
                const auto p = exact_joint_distribution(states[s], rec.xi, rec.q, ds.unitary);
                const double ratio = total_variation(x, p) / bound;
                if (ratio > worst_ratio) {
                    worst_ratio = ratio;
                    worst_at = "n=" + std::to_string(n);
                }
            }
        }
    }

    const auto ghz = named_state("ghz", 3);
    const auto model = ReadoutNoiseModel::symmetric(4, eps);
    const auto cal = build_calibration(3, model, 0, 0);
    double f_raw = 0.0, f_mit = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto ds = generate_dataset(ghz, UnitarySpec::qft(), shots, model, derive_seed(61, {seed}));
        const auto cfg = PieConfig::variable(0.04, derive_seed(62, {seed}));
        f_raw += fidelity(ghz, pie_run(ds, cfg).estimate) / 10.0;
        f_mit += fidelity(ghz, pie_run(mitigate_dataset(ds, cal), cfg).estimate) / 10.0;
    }
    return {worst_ratio < 1.0 && f_mit > f_raw,
            "max TV / 3 sqrt(2^(n+1)/Ns) = " + fmt(worst_ratio, 4) + " (" + worst_at +
                ") need < 1; GHZ_3 mean F mitigated = " + fmt(f_mit) + " vs raw = " + fmt(f_raw) +
                " need mitigated > raw"};
}

// 7. variable vs constant feedback on a noisy Bell dataset
Verdict variable_beta() {
    const auto bell = named_state("bell", 2);
    const auto ds =
        generate_dataset(bell, UnitarySpec::qft(), 100000, ReadoutNoiseModel::symmetric(3, 0.05), 7);
    const auto targets = normalize_dataset(ds);
    double f_var = 0.0, f_const = 0.0, worst_d = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto var = pie_run(targets, ds.unitary, PieConfig::variable(0.04, derive_seed(70, {seed})), bell);
        const auto con =
            pie_run(targets, ds.unitary, PieConfig::constant(1.5, 50, derive_seed(70, {seed})), bell);
        f_var += *var.trace.rows.back().fidelity / 20.0;
        f_const += *con.trace.rows.back().fidelity / 20.0;
        worst_d = std::max(worst_d, var.trace.rows.back().distance);
    }
    return {f_var >= f_const && worst_d < 0.05,
            "mean final F variable = " + fmt(f_var) + " vs constant 1.5 = " + fmt(f_const) +
                "; max final D (variable) = " + fmt(worst_d, 3) + " need < 0.05"};
}

// 8. pie_run at n = 10 with 20 iterations
Verdict timing() {
    Rng rng(8);
    const auto psi = random_arbitrary(10, rng);
    const auto ds = generate_dataset(psi, UnitarySpec::qft(), 8192, std::nullopt, 8);
    auto cfg = PieConfig::variable(0.1, 8);
    const auto t0 = std::chrono::steady_clock::now();
    const auto res = pie_run(ds, cfg);
    const double secs = seconds_since(t0);
    return {secs < 60.0 && res.trace.rows.size() == 20,
            "n=10, 20 iterations: " + fmt(secs, 4) + " s (F = " + fmt(fidelity(psi, res.estimate)) +
                "), need < 60 s"};
}

// 9. protocol probabilities vs dense matrix pipeline
Verdict oracle_equivalence() {
    double worst = 0.0;
    int checked = 0;
    for (int n = 1; n <= 3; ++n) {
        for (std::uint64_t i = 0; i < 50; ++i) {
            Rng rng(derive_seed(9, {static_cast<std::uint64_t>(n), i}));
            const auto psi = random_arbitrary(n, rng);
            std::vector<EulerAngles> angles;
            for (int k = 0; k < n; ++k) {
                angles.push_back(haar_angles(rng));
            }
            std::vector<UnitarySpec> specs = {UnitarySpec::qft(), UnitarySpec::hadamard(),
                                              UnitarySpec::separable(angles)};
            for (int m = 1; m <= n; ++m) {
                specs.push_back(UnitarySpec::aqft(m));
            }
            for (const auto &spec : specs) {
                const auto ds = generate_dataset(psi, spec, 0, std::nullopt, 0);
                for (const auto &rec : ds.records) {
                    const auto want = oracle::joint_distribution(psi.data(), rec.xi, rec.q, spec, n);
                    for (std::size_t o = 0; o < want.size(); ++o) {
                        worst = std::max(worst, std::abs(rec.counts[o] - want[o]));
                    }
                    ++checked;
                }
            }
        }
    }
    return {worst < 1e-12, std::to_string(checked) + " circuits, max |p - p_dense| = " + fmt(worst, 3) +
                               ", need < 1e-12"};
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// 10. CLI determinism
Verdict cli_determinism() {
    const fs::path root = fs::temp_directory_path() / ("qpty_accept_" + std::to_string(::getpid()));
    fs::remove_all(root);
    fs::create_directories(root / "a");
    fs::create_directories(root / "b");
    {
        std::ofstream cfg(root / "sweep.toml");
        cfg << "seed = 21\n[sweep]\nn-range = [2, 3]\nstates = 3\nruns = 2\nshot-list = [1000, 4000]\n";
    }
    const std::string cli = QPTY_CLI_PATH;
    // {command line, outputs compared}; bench is checked on its n column only
    const std::vector<std::pair<std::string, std::vector<std::string>>> steps = {
        {"prepare-state --tag ghz --n 3 --out {d}/ghz.json", {"ghz.json"}},
        {"prepare-state --random arbitrary --n 3 --seed 4 --out {d}/rand.json", {"rand.json"}},
        {"run-protocol --state {d}/ghz.json --shots 5000 --seed 5 --readout-error 0.025 --csv {d}/ds.csv "
         "--out {d}/ds.json",
         {"ds.json", "ds.csv"}},
        {"run-protocol --state {d}/rand.json --unitary separable --shots 0 --seed 6 --out {d}/sep.json",
         {"sep.json"}},
        {"calibrate --n 3 --readout-error 0.025 --shots 5000 --seed 7 --out {d}/cal.json", {"cal.json"}},
        {"mitigate --dataset {d}/ds.json --calibration {d}/cal.json --out {d}/mit.json", {"mit.json"}},
        {"estimate --dataset {d}/mit.json --reference {d}/ghz.json --seed 8 --trace {d}/trace.csv "
         "--out {d}/est.json",
         {"est.json", "trace.csv"}},
        {"estimate --dataset {d}/sep.json --shuffle --delta-beta 0.1 --seed 9 --out {d}/est2.json",
         {"est2.json"}},
        {"sweep --config " + (root / "sweep.toml").string() + " --out {d}/sweep.csv", {"sweep.csv"}},
        {"aqft-study --n-range 3 --m-list 1,2 --runs 2 --shots 2000 --seed 10 --out {d}/aqft.csv",
         {"aqft.csv"}},
        {"bench --n-range 2,3 --runs 2 --seed 11 --out {d}/bench.csv", {}},
    };
    std::vector<std::string> mismatched;
    int compared = 0;
    for (const auto &[args, outs] : steps) {
        for (const char *sub : {"a", "b"}) {
            std::string line = args;
            const std::string dir = (root / sub).string();
            for (std::size_t pos; (pos = line.find("{d}")) != std::string::npos;) {
                line.replace(pos, 3, dir);
            }
            const std::string cmd = "\"" + cli + "\" " + line + " 2>>\"" + (root / "stderr.txt").string() + "\"";
            if (std::system(cmd.c_str()) != 0) {
                return {false, "command failed: " + line + "; " + slurp(root / "stderr.txt")};
            }
        }
        for (const auto &f : outs) {
            const auto a = slurp(root / "a" / f);
            if (a.empty() || a != slurp(root / "b" / f)) {
                mismatched.push_back(f);
            }
            ++compared;
        }
    }
    // bench: identical header and n column; timings are wall-clock
    const auto first_col = [](const std::string &s) {
        std::istringstream in(s);
        std::string out, line;
        while (std::getline(in, line)) {
            out += line.substr(0, line.find(',')) + "\n";
        }
        return out;
    };
    const auto ba = slurp(root / "a" / "bench.csv");
    if (ba.rfind("n,mean_seconds,std_seconds\n", 0) != 0 || first_col(ba) != first_col(slurp(root / "b" / "bench.csv"))) {
        mismatched.push_back("bench.csv (n column)");
    }
    fs::remove_all(root);
    std::string detail = std::to_string(compared) + " output files byte-compared across 11 command lines "
                                                    "(bench: timing columns excluded)";
    if (!mismatched.empty()) {
        detail += "; differing:";
        for (const auto &m : mismatched) {
            detail += " " + m;
        }
    }
    return {mismatched.empty(), detail};
}

} // namespace

int main(int argc, char **argv) {
    bool paper = false;
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--paper-scale") {
            paper = true;
        } else if (a == "--only" && i + 1 < argc) {
            only = std::atoi(argv[++i]);
        } else {
            std::cerr << "usage: acceptance [--paper-scale] [--only K]\n";
            return 2;
        }
    }

    std::vector<std::pair<int, std::function<Verdict()>>> criteria;
    if (paper) {
        criteria.emplace_back(2, [] { return fig3_cell(true); });
    } else {
        criteria = {{1, exact_reconstruction},
                    {2, [] { return fig3_cell(false); }},
                    {3, shot_monotonicity},
                    {4, aqft_exactness},
                    {5, aqft_study},
                    {6, mitigation_round_trip},
                    {7, variable_beta},
                    {8, timing},
                    {9, oracle_equivalence},
                    {10, cli_determinism}};
    }

    int failures = 0;
    for (const auto &[k, fn] : criteria) {
        if (only != 0 && k != only) {
            continue;
        }
        Verdict v;
        try {
            v = fn();
        } catch (const std::exception &e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        std::cout << "criterion " << k << ": " << (v.pass ? "PASS" : "FAIL") << "  " << v.detail << std::endl;
        failures += v.pass ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
