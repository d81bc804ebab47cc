#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qpty/io.hpp"
#include "qpty/pie.hpp"
#include "qpty/protocol.hpp"
#include "qpty/random.hpp"
#include "qpty/stateprep.hpp"
#include "qpty/transforms.hpp"

// Seed splitting shared by all harness runs. For qubit count n and state
// index i (the position in the benchmark table for the table ensemble):
//
//   state draw            derive_seed(master, {n, i, 0})
//   separable unitary     derive_seed(master, {n, i, 1})
//   dataset (N_s shots)   derive_seed(master, {n, i, 2, N_s})
//   PIE init of run r     derive_seed(master, {n, i, 3, N_s, r})
//
// The AQFT study inserts the degree m after n: {n, m, i, ...}.

namespace qpty::experiments {

enum class Ensemble { RandomSeparable, RandomArbitrary, Benchmark };

enum class UnitaryFamily { Qft, Aqft, Hadamard, SeparableRandom };

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;
};

/// Mean and sample standard deviation (0 for a single value).
inline MeanStd mean_std(const std::vector<double> &v) {
    if (v.empty()) {
        return {};
    }
    double sum = 0.0;
    for (double x : v) {
        sum += x;
    }
    const double mean = sum / static_cast<double>(v.size());
    if (v.size() < 2) {
        return {mean, 0.0};
    }
    double ss = 0.0;
    for (double x : v) {
        ss += (x - mean) * (x - mean);
    }
    return {mean, std::sqrt(ss / static_cast<double>(v.size() - 1))};
}

inline constexpr int kMaxQubits = 16;

struct SweepConfig {
    std::vector<int> n_range = {2, 3, 4};
    Ensemble ensemble = Ensemble::RandomArbitrary;
    int states_per_n = 20;
    int runs_per_state = 20;
    std::vector<std::uint64_t> shots = {8192};
    UnitaryFamily unitary = UnitaryFamily::Qft;
    int aqft_degree = 2;
    PieConfig pie = PieConfig::variable(0.1);
    std::uint64_t master_seed = 0;

    /// 100 states x 100 runs per cell.
    void paper_scale() {
        states_per_n = 100;
        runs_per_state = 100;
    }

    void validate() const {
        if (n_range.empty() || shots.empty()) {
            throw std::invalid_argument("sweep: n_range and shots must be non-empty");
        }
        for (int n : n_range) {
            if (n < 1 || n > kMaxQubits || (ensemble == Ensemble::Benchmark && n < 2)) {
                throw std::invalid_argument("sweep: qubit count " + std::to_string(n) +
                                            " out of range");
            }
            if (unitary == UnitaryFamily::Aqft && (aqft_degree < 1 || aqft_degree > n)) {
                throw std::invalid_argument("sweep: AQFT degree exceeds n=" + std::to_string(n));
            }
        }
        if (states_per_n < 1 || runs_per_state < 1) {
            throw std::invalid_argument("sweep: counts must be >= 1");
        }
        pie.validate();
    }
};

struct SweepRow {
    int n = 0;
    std::uint64_t shots = 0;
    double mean_fidelity = 0.0;
    double std_fidelity = 0.0;
};

namespace detail {

inline UnitarySpec make_unitary(UnitaryFamily fam, int m, int n, std::uint64_t seed) {
    switch (fam) {
    case UnitaryFamily::Qft:
        return UnitarySpec::qft();
    case UnitaryFamily::Aqft:
        return UnitarySpec::aqft(m);
    case UnitaryFamily::Hadamard:
        return UnitarySpec::hadamard();
    case UnitaryFamily::SeparableRandom: {
        Rng rng(seed);
        std::vector<EulerAngles> angles;
        for (int q = 0; q < n; ++q) {
            angles.push_back(haar_angles(rng));
        }
        return UnitarySpec::separable(std::move(angles));
    }
    }
    throw std::logic_error("unreachable");
}

inline std::uint64_t u64(int v) { return static_cast<std::uint64_t>(v); }

} // namespace detail

/// Mean fidelity over `runs` PIE runs on one dataset.
inline double mean_run_fidelity(const PtychoDataset &ds, const StateVector &truth, PieConfig pie,
                                int runs, const std::function<std::uint64_t(int)> &init_seed) {
    const auto targets = normalize_dataset(ds);
    double acc = 0.0;
    for (int r = 0; r < runs; ++r) {
        pie.init_seed = init_seed(r);
        acc += fidelity(truth, pie_run(targets, ds.unitary, pie).estimate);
    }
    return acc / runs;
}

/**
 * @brief Shot-limited fidelity sweep.
 *
 * For every (n, N_s): draw the ensemble, simulate noiseless data with N_s shots,
 * run PIE `runs_per_state` times per state from distinct initial estimates,
 * average per state, then report mean and standard deviation across states.
 */
inline std::vector<SweepRow> run_fidelity_sweep(const SweepConfig &cfg) {
    cfg.validate();
    std::vector<SweepRow> rows;
    for (int n : cfg.n_range) {
        const auto tags = table_tags(n);
        const int states =
            cfg.ensemble == Ensemble::Benchmark ? static_cast<int>(tags.size()) : cfg.states_per_n;
        for (std::uint64_t shots : cfg.shots) {
            std::vector<double> per_state;
            for (int i = 0; i < states; ++i) {
                const std::uint64_t ni = detail::u64(n);
                const std::uint64_t ii = detail::u64(i);
                StateVector psi;
                if (cfg.ensemble == Ensemble::Benchmark) {
                    psi = named_state(tags[static_cast<std::size_t>(i)], n);
                } else {
                    Rng rng(derive_seed(cfg.master_seed, {ni, ii, 0}));
                    psi = cfg.ensemble == Ensemble::RandomSeparable ? random_separable(n, rng)
                                                                    : random_arbitrary(n, rng);
                }
                const auto u = detail::make_unitary(cfg.unitary, cfg.aqft_degree, n,
                                                    derive_seed(cfg.master_seed, {ni, ii, 1}));
                try {
                    const auto ds = generate_dataset(psi, u, shots, std::nullopt,
                                                     derive_seed(cfg.master_seed, {ni, ii, 2, shots}));
                    per_state.push_back(mean_run_fidelity(ds, psi, cfg.pie, cfg.runs_per_state, [&](int r) {
                        return derive_seed(cfg.master_seed, {ni, ii, 3, shots, detail::u64(r)});
                    }));
                } catch (const std::exception &e) {
                    throw std::runtime_error("sweep cell n=" + std::to_string(n) + " shots=" +
                                             std::to_string(shots) + " state=" + std::to_string(i) +
                                             ": " + e.what());
                }
            }
            const auto ms = mean_std(per_state);
            rows.push_back({n, shots, ms.mean, ms.std});
        }
    }
    return rows;
}

inline void write_sweep_csv(std::ostream &os, const std::vector<SweepRow> &rows) {
    os << "n,shots,mean_fidelity,std_fidelity\n";
    for (const auto &r : rows) {
        os << r.n << ',' << r.shots << ',' << io::format_double(r.mean_fidelity) << ','
           << io::format_double(r.std_fidelity) << '\n';
    }
}

struct AqftStudyConfig {
    std::vector<int> n_range = {3, 4, 5, 6};
    std::vector<int> m_list = {1, 2, 3, 4};
    std::uint64_t shots = 20000;
    int runs = 10;
    PieConfig pie = PieConfig::variable(0.04);
    std::uint64_t master_seed = 0;
};

struct AqftRow {
    std::string tag;
    int n = 0;
    int m = 0;
    double mean_fidelity = 0.0;
    double std_fidelity = 0.0;
};

/// Benchmark states psi1n..psi5n under AQFT of each degree m <= n; mean and
/// standard deviation over `runs` PIE runs on one dataset per (state, n, m).
inline std::vector<AqftRow> run_aqft_study(const AqftStudyConfig &cfg) {
    cfg.pie.validate();
    if (cfg.runs < 1) {
        throw std::invalid_argument("aqft study: runs must be >= 1");
    }
    std::vector<AqftRow> rows;
    const auto tags = multiqubit_tags();
    for (int n : cfg.n_range) {
        if (n < 2 || n > kMaxQubits) {
            throw std::invalid_argument("aqft study: n out of range");
        }
        for (int m : cfg.m_list) {
            if (m < 1) {
                throw std::invalid_argument("aqft study: m must be >= 1");
            }
            if (m > n) {
                continue;
            }
            for (std::size_t i = 0; i < tags.size(); ++i) {
                const auto psi = named_state(tags[i], n);
                const std::uint64_t key_n = detail::u64(n);
                const std::uint64_t key_m = detail::u64(m);
                const auto ds = generate_dataset(psi, UnitarySpec::aqft(m), cfg.shots, std::nullopt,
                                                 derive_seed(cfg.master_seed, {key_n, key_m, i, 2}));
                const auto targets = normalize_dataset(ds);
                std::vector<double> fids;
                PieConfig pie = cfg.pie;
                for (int r = 0; r < cfg.runs; ++r) {
                    pie.init_seed = derive_seed(cfg.master_seed, {key_n, key_m, i, 3, detail::u64(r)});
                    fids.push_back(fidelity(psi, pie_run(targets, ds.unitary, pie).estimate));
                }
                const auto ms = mean_std(fids);
                rows.push_back({tags[i], n, m, ms.mean, ms.std});
            }
        }
    }
    return rows;
}

inline void write_aqft_csv(std::ostream &os, const std::vector<AqftRow> &rows) {
    os << "state,n,m,mean_fidelity,std_fidelity\n";
    for (const auto &r : rows) {
        os << r.tag << ',' << r.n << ',' << r.m << ',' << io::format_double(r.mean_fidelity) << ','
           << io::format_double(r.std_fidelity) << '\n';
    }
}

struct TimingRow {
    int n = 0;
    double mean_seconds = 0.0;
    double std_seconds = 0.0;
};

/**
 * Wall time of PIE post-processing (target normalization plus the iterations)
 * on a random arbitrary state with 2^13-shot QFT data. Dataset generation is
 * not timed.
 */
inline std::vector<TimingRow> run_timing_bench(const std::vector<int> &n_range, int iterations = 20,
                                               int runs = 10, std::uint64_t master_seed = 0) {
    if (runs < 1 || iterations < 1) {
        throw std::invalid_argument("bench: runs and iterations must be >= 1");
    }
    std::vector<TimingRow> rows;
    for (int n : n_range) {
        if (n < 1 || n > kMaxQubits) {
            throw std::invalid_argument("bench: n out of range");
        }
        const std::uint64_t key_n = detail::u64(n);
        Rng rng(derive_seed(master_seed, {key_n, 0, 0}));
        const auto psi = random_arbitrary(n, rng);
        const auto ds = generate_dataset(psi, UnitarySpec::qft(), 8192, std::nullopt,
                                         derive_seed(master_seed, {key_n, 0, 2, 8192}));
        PieConfig pie = PieConfig::variable(2.0 / iterations);
        pie.iterations = iterations;
        // untimed warm-up so the first timed run does not pay for cold caches
        pie.init_seed = derive_seed(master_seed, {key_n, 0, 4});
        (void)pie_run(ds, pie);
        std::vector<double> secs;
        for (int r = 0; r < runs; ++r) {
            pie.init_seed = derive_seed(master_seed, {key_n, 0, 3, 8192, detail::u64(r)});
            const auto t0 = std::chrono::steady_clock::now();
            const auto res = pie_run(ds, pie);
            const auto t1 = std::chrono::steady_clock::now();
            if (!res.estimate.normalized()) {
                throw std::runtime_error("bench: PIE returned an unnormalized estimate");
            }
            secs.push_back(std::chrono::duration<double>(t1 - t0).count());
        }
        const auto ms = mean_std(secs);
        rows.push_back({n, ms.mean, ms.std});
    }
    return rows;
}

inline void write_timing_csv(std::ostream &os, const std::vector<TimingRow> &rows) {
    os << "n,mean_seconds,std_seconds\n";
    for (const auto &r : rows) {
        os << r.n << ',' << io::format_double(r.mean_seconds) << ','
           << io::format_double(r.std_seconds) << '\n';
    }
}

} // namespace qpty::experiments
