#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qpty/random.hpp"
#include "qpty/readout.hpp"
#include "qpty/sampling.hpp"
#include "qpty/state.hpp"
#include "qpty/transforms.hpp"

namespace qpty {

/// Counts of one ptychographic circuit (one Pauli axis on one qubit). Entry
/// o = s * 2^n + j holds intermediate outcome s (0 for +, 1 for -) and final
/// register value j.
struct CircuitRecord {
    Pauli xi = Pauli::Z;
    int q = 0;
    std::vector<double> counts;
};

/**
 * @brief Measurement data of the 3n ptychographic circuits.
 *
 * `shots == 0` marks exact data: each record then stores the joint outcome
 * probabilities themselves.
 */
struct PtychoDataset {
    int n = 0;
    UnitarySpec unitary;
    std::uint64_t shots = 0;
    std::uint64_t seed = 0;
    std::optional<std::string> noise_model_id;
    bool mitigated = false;
    std::vector<CircuitRecord> records;

    [[nodiscard]] std::size_t outcome_count() const { return std::size_t{2} << n; }

    [[nodiscard]] const CircuitRecord &record(Pauli xi, int q) const {
        for (const auto &r : records) {
            if (r.xi == xi && r.q == q) {
                return r;
            }
        }
        throw std::invalid_argument(std::string("dataset has no record for (") + to_char(xi) +
                                    ", " + std::to_string(q) + ")");
    }

    /// Throws unless there is exactly one well-sized record per (xi, q).
    void validate() const {
        if (n < 1) {
            throw std::invalid_argument("dataset: n must be >= 1");
        }
        unitary.validate(n);
        if (records.size() != static_cast<std::size_t>(3 * n)) {
            throw std::invalid_argument("dataset: expected " + std::to_string(3 * n) +
                                        " records, found " + std::to_string(records.size()));
        }
        std::vector<int> seen(static_cast<std::size_t>(3 * n), 0);
        for (const auto &r : records) {
            if (r.q < 0 || r.q >= n) {
                throw std::invalid_argument("dataset: record qubit out of range");
            }
            if (r.counts.size() != outcome_count()) {
                throw std::invalid_argument("dataset: record length " +
                                            std::to_string(r.counts.size()) + " != 2^(n+1)");
            }
            ++seen[static_cast<std::size_t>(static_cast<int>(r.xi) * n + r.q)];
        }
        for (int c : seen) {
            if (c != 1) {
                throw std::invalid_argument("dataset: missing or duplicated (xi, q) record");
            }
        }
    }
};

/// |<j| U Pi^s |psi>|^2 laid out as o = s * 2^n + j.
inline std::vector<double> exact_joint_distribution(const StateVector &state, Pauli xi, int q,
                                                    const Transform &unitary) {
    if (unitary.qubits() != state.qubits()) {
        throw std::invalid_argument("exact_joint_distribution: qubit count mismatch");
    }
    detail::check_qubit(q, state.qubits());
    const std::size_t dim = state.dim();
    std::vector<double> p(2 * dim);
    std::vector<cplx> buf(dim);
    for (int s = 0; s < 2; ++s) {
        detail::project_into(state.amplitudes(), buf, ProjectorId{xi, q, s == 0 ? +1 : -1});
        unitary.apply(buf);
        for (std::size_t j = 0; j < dim; ++j) {
            p[static_cast<std::size_t>(s) * dim + j] = std::norm(buf[j]);
        }
    }
    return p;
}

inline std::vector<double> exact_joint_distribution(const StateVector &state, Pauli xi, int q,
                                                    const UnitarySpec &unitary) {
    return exact_joint_distribution(state, xi, q, Transform(unitary, state.qubits()));
}

/**
 * @brief Simulates all 3n circuits.
 *
 * Per circuit: exact joint distribution, optional readout corruption over the
 * n + 1 outcome bits, then `shots` multinomial samples (or the probabilities
 * themselves when shots == 0). Circuit (xi, q) draws from the substream
 * derive_seed(seed, {xi, q}).
 */
inline PtychoDataset generate_dataset(const StateVector &state, const UnitarySpec &unitary,
                                      std::uint64_t shots,
                                      const std::optional<ReadoutNoiseModel> &noise,
                                      std::uint64_t seed) {
    if (!state.normalized()) {
        throw std::invalid_argument("generate_dataset: state is not normalized");
    }
    const int n = state.qubits();
    if (noise) {
        if (noise->size() != n + 1) {
            throw std::invalid_argument("generate_dataset: noise model must cover n+1 bits");
        }
        noise->validate();
    }
    const Transform t(unitary, n);
    PtychoDataset ds;
    ds.n = n;
    ds.unitary = unitary;
    ds.shots = shots;
    ds.seed = seed;
    if (noise) {
        ds.noise_model_id = noise->id;
    }
    for (Pauli xi : {Pauli::X, Pauli::Y, Pauli::Z}) {
        for (int q = 0; q < n; ++q) {
            std::vector<double> p = exact_joint_distribution(state, xi, q, t);
            if (noise) {
                p = corrupt_counts(p, *noise);
            }
            CircuitRecord rec{xi, q, {}};
            if (shots == 0) {
                rec.counts = std::move(p);
            } else {
                Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(xi),
                                           static_cast<std::uint64_t>(q)}));
                const auto c = sample_shots(p, shots, rng);
                rec.counts.assign(c.begin(), c.end());
            }
            ds.records.push_back(std::move(rec));
        }
    }
    return ds;
}

/// Per-projector data: Omega_l (joint-normalized) and the amplitude target sqrt(Omega_l).
struct ProjectorTargets {
    int n = 0;
    std::vector<ProjectorId> ids;
    std::vector<std::vector<double>> omega;
    std::vector<std::vector<double>> amplitude;

    [[nodiscard]] std::size_t index_of(const ProjectorId &id) const {
        for (std::size_t i = 0; i < ids.size(); ++i) {
            if (ids[i] == id) {
                return i;
            }
        }
        throw std::out_of_range("no target for requested projector");
    }

    [[nodiscard]] const std::vector<double> &amplitude_of(const ProjectorId &id) const {
        return amplitude[index_of(id)];
    }
    [[nodiscard]] const std::vector<double> &omega_of(const ProjectorId &id) const {
        return omega[index_of(id)];
    }
};

/**
 * Omega_l[j] = count(s, j) / N_s over both sign blocks of a circuit, so the two
 * projectors of one circuit share a single normalization. Negative entries
 * (possible after mitigation) are clipped to zero before the square root.
 */
inline ProjectorTargets normalize_dataset(const PtychoDataset &ds) {
    ds.validate();
    const double denom = ds.shots == 0 ? 1.0 : static_cast<double>(ds.shots);
    const std::size_t dim = std::size_t{1} << ds.n;
    ProjectorTargets t;
    t.n = ds.n;
    t.ids = all_projectors(ds.n);
    for (const auto &id : t.ids) {
        const auto &rec = ds.record(id.xi, id.q);
        const std::size_t off = id.sign > 0 ? 0 : dim;
        std::vector<double> om(dim);
        std::vector<double> amp(dim);
        for (std::size_t j = 0; j < dim; ++j) {
            om[j] = rec.counts[off + j] / denom;
            amp[j] = std::sqrt(std::max(om[j], 0.0));
        }
        t.omega.push_back(std::move(om));
        t.amplitude.push_back(std::move(amp));
    }
    return t;
}

} // namespace qpty
