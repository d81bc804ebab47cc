#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qpty/protocol.hpp"
#include "qpty/random.hpp"
#include "qpty/readout.hpp"
#include "qpty/sampling.hpp"

namespace qpty {

inline constexpr double kMaxCalibrationCondition = 1e12;

/**
 * @brief Estimated readout confusion matrices.
 *
 * `m1` is the 2x2 matrix of the intermediate outcome bit, `mn` the 2^n x 2^n
 * matrix of the final register. Column k of each is the (normalized) outcome
 * distribution observed after preparing basis state k. The matrix acting on a
 * ptychographic record is m1 (x) mn, with the intermediate bit most significant.
 */
struct CalibrationMatrix {
    struct Provenance {
        std::string model_id;
        std::uint64_t shots = 0;
        std::uint64_t seed = 0;
    };

    int n = 0;
    Eigen::Matrix2d m1 = Eigen::Matrix2d::Identity();
    Eigen::MatrixXd mn;
    Provenance provenance;

    /// Dense m1 (x) mn, 2^(n+1) square.
    [[nodiscard]] Eigen::MatrixXd global() const {
        const Eigen::Index d = mn.rows();
        Eigen::MatrixXd g(2 * d, 2 * d);
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
                g.block(a * d, b * d, d, d) = m1(a, b) * mn;
            }
        }
        return g;
    }

    void validate() const {
        const Eigen::Index d = Eigen::Index{1} << n;
        if (n < 1 || mn.rows() != d || mn.cols() != d) {
            throw std::invalid_argument("calibration: register matrix must be 2^n x 2^n");
        }
    }
};

namespace detail {

inline std::vector<double> calibration_column(std::size_t prepared, const ReadoutNoiseModel &model,
                                              std::uint64_t shots, std::uint64_t seed) {
    std::vector<double> p(std::size_t{1} << model.size(), 0.0);
    p[prepared] = 1.0;
    p = corrupt_counts(p, model);
    if (shots == 0) {
        return p;
    }
    Rng rng(seed);
    const auto counts = sample_shots(p, shots, rng);
    double total = 0.0;
    for (auto c : counts) {
        total += static_cast<double>(c);
    }
    if (total <= 0.0) {
        throw std::runtime_error("calibration: empty shot distribution");
    }
    std::vector<double> col(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
        col[i] = static_cast<double>(counts[i]) / total;
    }
    return col;
}

} // namespace detail

/**
 * @brief Simulated calibration runs.
 *
 * Prepares every register basis state (2^n circuits) and both intermediate
 * states (2 circuits), corrupts with `model` (n + 1 bits, bit n being the
 * intermediate outcome), samples `shots` each (0 = exact), and normalizes each
 * outcome histogram into a column. Register circuit j uses substream
 * derive_seed(seed, {0, j}); intermediate circuit s uses derive_seed(seed, {1, s}).
 */
inline CalibrationMatrix build_calibration(int n, const ReadoutNoiseModel &model,
                                           std::uint64_t shots, std::uint64_t seed) {
    if (model.size() != n + 1) {
        throw std::invalid_argument("build_calibration: noise model must cover n+1 bits");
    }
    model.validate();
    ReadoutNoiseModel reg{{model.bits.begin(), model.bits.begin() + n}, model.id};
    ReadoutNoiseModel mid{{model.bits[static_cast<std::size_t>(n)]}, model.id};

    CalibrationMatrix cal;
    cal.n = n;
    cal.provenance = {model.id, shots, seed};
    const std::size_t dim = std::size_t{1} << n;
    cal.mn.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t j = 0; j < dim; ++j) {
        const auto col = detail::calibration_column(j, reg, shots, derive_seed(seed, {0, j}));
        for (std::size_t i = 0; i < dim; ++i) {
            cal.mn(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[i];
        }
    }
    for (std::size_t s = 0; s < 2; ++s) {
        const auto col = detail::calibration_column(s, mid, shots, derive_seed(seed, {1, s}));
        cal.m1(0, static_cast<Eigen::Index>(s)) = col[0];
        cal.m1(1, static_cast<Eigen::Index>(s)) = col[1];
    }
    return cal;
}

class SingularCalibrationError : public std::runtime_error {
  public:
    explicit SingularCalibrationError(double cond)
        : std::runtime_error("calibration matrix is numerically singular (condition number " +
                             std::to_string(cond) + "); re-run calibration with more shots"),
          condition(cond) {}
    double condition;
};

/**
 * Factorizes a calibration once and solves (m1 (x) mn) x = record for any
 * number of records. The Kronecker structure is exploited: the register block
 * is solved against mn by LU, then the 2x2 intermediate system.
 */
class Mitigator {
  public:
    explicit Mitigator(const CalibrationMatrix &cal)
        : n_(cal.n), lu_mn_(checked(cal).mn), lu_m1_(cal.m1) {
        const double rc_n = lu_mn_.rcond();
        const double rc_1 = lu_m1_.rcond();
        condition_ = (rc_n > 0.0 && rc_1 > 0.0) ? 1.0 / (rc_n * rc_1)
                                                 : std::numeric_limits<double>::infinity();
        if (!(condition_ <= kMaxCalibrationCondition)) {
            throw SingularCalibrationError(condition_);
        }
    }

    /// 1-norm condition number estimate of m1 (x) mn.
    [[nodiscard]] double condition_number() const noexcept { return condition_; }

    [[nodiscard]] std::vector<double> apply(std::span<const double> record) const {
        const Eigen::Index d = Eigen::Index{1} << n_;
        if (record.size() != static_cast<std::size_t>(2 * d)) {
            throw std::invalid_argument("mitigate: record length must be 2^(n+1)");
        }
        // Y = m1 X mn^T with rows of Y/X indexed by the intermediate bit.
        Eigen::MatrixXd yt(d, 2);
        for (Eigen::Index s = 0; s < 2; ++s) {
            for (Eigen::Index j = 0; j < d; ++j) {
                yt(j, s) = record[static_cast<std::size_t>(s * d + j)];
            }
        }
        const Eigen::MatrixXd zt = lu_mn_.solve(yt);          // mn^{-1} Y^T
        const Eigen::MatrixXd xt = lu_m1_.solve(zt.transpose()); // m1^{-1} (mn^{-1} Y^T)^T
        std::vector<double> out(record.size());
        for (Eigen::Index s = 0; s < 2; ++s) {
            for (Eigen::Index j = 0; j < d; ++j) {
                out[static_cast<std::size_t>(s * d + j)] = xt(s, j);
            }
        }
        return out;
    }

  private:
    static const CalibrationMatrix &checked(const CalibrationMatrix &cal) {
        cal.validate();
        return cal;
    }

    int n_;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_mn_;
    Eigen::PartialPivLU<Eigen::Matrix2d> lu_m1_;
    double condition_ = 0.0;
};

/// Omega' = (m1 (x) mn)^{-1} Omega. Output may contain negative entries.
inline std::vector<double> mitigate(std::span<const double> record, const CalibrationMatrix &cal) {
    return Mitigator(cal).apply(record);
}

/// Every record mitigated; the result is flagged `mitigated`.
inline PtychoDataset mitigate_dataset(const PtychoDataset &ds, const CalibrationMatrix &cal) {
    ds.validate();
    if (cal.n != ds.n) {
        throw std::invalid_argument("mitigate_dataset: calibration is for n=" +
                                    std::to_string(cal.n) + ", dataset has n=" +
                                    std::to_string(ds.n));
    }
    const Mitigator mit(cal);
    PtychoDataset out = ds;
    for (auto &rec : out.records) {
        rec.counts = mit.apply(rec.counts);
    }
    out.mitigated = true;
    return out;
}

} // namespace qpty
