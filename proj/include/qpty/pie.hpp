#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qpty/protocol.hpp"
#include "qpty/random.hpp"
#include "qpty/state.hpp"
#include "qpty/stateprep.hpp"
#include "qpty/transforms.hpp"

namespace qpty {

/// sqrt(1 - |<a|b>|^2) between the normalized versions of a and b.
inline double trace_distance(const StateVector &a, const StateVector &b) {
    const double na = a.norm_squared();
    const double nb = b.norm_squared();
    if (!(na > 0.0) || !(nb > 0.0)) {
        throw std::invalid_argument("trace_distance: zero vector");
    }
    const double overlap = std::norm(inner_product(a, b)) / (na * nb);
    return std::sqrt(std::clamp(1.0 - overlap, 0.0, 1.0));
}

/// |<psi|phi>|^2 between the normalized versions of psi and phi.
inline double fidelity(const StateVector &psi, const StateVector &phi) {
    const double na = psi.norm_squared();
    const double nb = phi.norm_squared();
    if (!(na > 0.0) || !(nb > 0.0)) {
        throw std::invalid_argument("fidelity: zero vector");
    }
    return std::clamp(std::norm(inner_product(psi, phi)) / (na * nb), 0.0, 1.0);
}

enum class ProjectorOrder { Deterministic, Shuffled };

/**
 * @brief Settings of the iterative engine.
 *
 * The feedback parameter follows beta_i = beta0 - (i - 1) * delta_beta for
 * iteration i = 1..iterations, and must stay positive throughout.
 * delta_beta = 0 gives a constant-beta run.
 */
struct PieConfig {
    double beta0 = 2.0;
    double delta_beta = 0.04;
    int iterations = 50;
    ProjectorOrder order = ProjectorOrder::Deterministic;
    std::uint64_t shuffle_seed = 0;
    std::optional<double> early_stop_distance;
    std::uint64_t init_seed = 0;

    /// Schedule from 2 down to delta_beta: iterations = round(2 / delta_beta).
    static PieConfig variable(double delta_beta, std::uint64_t init_seed = 0) {
        if (!(delta_beta > 0.0)) {
            throw std::invalid_argument("variable schedule needs delta_beta > 0");
        }
        PieConfig c;
        c.delta_beta = delta_beta;
        c.iterations = static_cast<int>(std::lround(c.beta0 / delta_beta));
        c.init_seed = init_seed;
        return c;
    }

    static PieConfig constant(double beta, int iterations, std::uint64_t init_seed = 0) {
        PieConfig c;
        c.beta0 = beta;
        c.delta_beta = 0.0;
        c.iterations = iterations;
        c.init_seed = init_seed;
        return c;
    }

    void validate() const {
        if (iterations < 1) {
            throw std::invalid_argument("PIE needs at least one iteration");
        }
        if (delta_beta < 0.0) {
            throw std::invalid_argument("delta_beta must be non-negative");
        }
        const double last = beta0 - (iterations - 1) * delta_beta;
        if (!(last > 1e-12)) {
            throw std::invalid_argument("feedback schedule reaches beta <= 0 at iteration " +
                                        std::to_string(iterations));
        }
    }
};

inline double beta_schedule(int i, const PieConfig &cfg) {
    if (i < 1 || i > cfg.iterations) {
        throw std::out_of_range("beta_schedule: iteration " + std::to_string(i) +
                                " outside [1, " + std::to_string(cfg.iterations) + "]");
    }
    return cfg.beta0 - (i - 1) * cfg.delta_beta;
}

struct PieTraceRow {
    int iteration = 0;
    double beta = 0.0;
    double distance = 0.0;
    std::optional<double> fidelity;
};

struct PieTrace {
    std::vector<PieTraceRow> rows;
    double wall_seconds = 0.0;
};

struct PieResult {
    StateVector estimate; ///< normalized
    PieTrace trace;
};

namespace detail {

// Buffers for one correction step, reused across steps of a run.
struct PieWorkspace {
    explicit PieWorkspace(std::size_t dim) : projected(dim), work(dim) {}
    std::vector<cplx> projected;
    std::vector<cplx> work;
};

// phi <- phi + beta * Pi (U^dag correct(U Pi phi) - Pi phi); the working
// estimate is never renormalized.
inline void pie_step_inplace(std::span<cplx> phi, const ProjectorId &id,
                             std::span<const double> target, const Transform &u, double beta,
                             PieWorkspace &ws) {
    project_into(phi, ws.projected, id);
    std::copy(ws.projected.begin(), ws.projected.end(), ws.work.begin());
    u.apply(ws.work);
    for (std::size_t j = 0; j < ws.work.size(); ++j) {
        const double mag = std::abs(ws.work[j]);
        ws.work[j] = mag > 0.0 ? ws.work[j] * (target[j] / mag) : cplx{target[j], 0.0};
    }
    u.apply(ws.work, true);
    project_inplace(ws.work, id);
    for (std::size_t j = 0; j < phi.size(); ++j) {
        phi[j] += beta * (ws.work[j] - ws.projected[j]);
    }
}

} // namespace detail

/**
 * @brief One projector update of the engine.
 *
 * phi_l = Pi_l phi, phi~ = U phi_l, phi~corr_j = target_j e^{i arg phi~_j}
 * (phase 0 where phi~_j = 0), phi_corr = U^dag phi~corr, and the result is
 * phi + beta Pi_l (phi_corr - phi_l).
 */
inline StateVector pie_correction_step(const StateVector &estimate, const ProjectorId &id,
                                       std::span<const double> target, const Transform &unitary,
                                       double beta) {
    detail::check_qubit(id.q, estimate.qubits());
    if (unitary.qubits() != estimate.qubits() || target.size() != estimate.dim()) {
        throw std::invalid_argument("pie_correction_step: dimension mismatch");
    }
    for (double t : target) {
        if (t < 0.0) {
            throw std::invalid_argument("pie_correction_step: negative target amplitude");
        }
    }
    StateVector out = estimate;
    detail::PieWorkspace ws(estimate.dim());
    detail::pie_step_inplace(out.amplitudes(), id, target, unitary, beta, ws);
    return out;
}

/// Runs the engine on precomputed targets. See pie_run(PtychoDataset, ...).
inline PieResult pie_run(const ProjectorTargets &targets, const UnitarySpec &unitary,
                         const PieConfig &cfg, const std::optional<StateVector> &reference = {}) {
    cfg.validate();
    const int n = targets.n;
    if (targets.ids.size() != static_cast<std::size_t>(6 * n)) {
        throw std::invalid_argument("pie_run: expected targets for all 6n projectors");
    }
    if (reference && reference->qubits() != n) {
        throw std::invalid_argument("pie_run: reference has the wrong qubit count");
    }
    const auto start = std::chrono::steady_clock::now();
    const Transform u(unitary, n);

    Rng init_rng(cfg.init_seed);
    StateVector phi = random_arbitrary(n, init_rng);
    detail::PieWorkspace ws(phi.dim());

    std::vector<std::size_t> order(targets.ids.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }

    PieResult result;
    for (int it = 1; it <= cfg.iterations; ++it) {
        const double beta = beta_schedule(it, cfg);
        if (cfg.order == ProjectorOrder::Shuffled) {
            Rng shuffle_rng(derive_seed(cfg.shuffle_seed, {static_cast<std::uint64_t>(it)}));
            for (std::size_t i = order.size() - 1; i > 0; --i) {
                const auto k = static_cast<std::size_t>(shuffle_rng.uniform() * static_cast<double>(i + 1));
                std::swap(order[i], order[std::min(k, i)]);
            }
        }
        const StateVector previous = phi;
        for (std::size_t k : order) {
            detail::pie_step_inplace(phi.amplitudes(), targets.ids[k], targets.amplitude[k], u, beta,
                                     ws);
        }
        if (!(phi.norm_squared() > 0.0)) {
            throw std::runtime_error("pie_run: estimate collapsed to the zero vector");
        }
        PieTraceRow row{it, beta, trace_distance(previous, phi), std::nullopt};
        if (reference) {
            row.fidelity = fidelity(*reference, phi);
        }
        result.trace.rows.push_back(row);
        if (cfg.early_stop_distance && row.distance < *cfg.early_stop_distance) {
            break;
        }
    }
    result.estimate = phi.normalized_copy();
    result.trace.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

/**
 * @brief Reconstructs a pure state from ptychographic data.
 *
 * Starts from a Haar-random estimate drawn from `init_seed`, sweeps all 6n
 * projectors per iteration, and records the trace distance between the
 * estimates before and after each iteration (plus the fidelity against
 * `reference` when given). Stops after `iterations` or once the distance drops
 * below `early_stop_distance`.
 */
inline PieResult pie_run(const PtychoDataset &dataset, const PieConfig &cfg,
                         const std::optional<StateVector> &reference = {}) {
    return pie_run(normalize_dataset(dataset), dataset.unitary, cfg, reference);
}

} // namespace qpty
