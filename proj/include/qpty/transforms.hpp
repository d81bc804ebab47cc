#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qpty/state.hpp"

namespace qpty {

using EulerAngles = std::array<double, 3>; ///< (theta, phi, lambda), radians

/**
 * @brief Final-measurement unitary applied before the computational-basis readout.
 *
 * All kinds are defined as index-space matrices:
 *  - Qft:       U_jk = e^{2 pi i jk / 2^n} / sqrt(2^n)
 *  - Aqft(m):   U_jk = e^{2 pi i Y^m_jk / 2^n} / sqrt(2^n), Y^m_jk = sum j_a k_b 2^{a+b}
 *               restricted to n-m <= a+b <= n-1
 *  - Hadamard:  H on every qubit
 *  - Separable: u3(theta_l, phi_l, lambda_l) on qubit l
 */
struct UnitarySpec {
    enum class Kind { Qft, Aqft, Hadamard, Separable };

    Kind kind = Kind::Qft;
    int m = 0;
    std::vector<EulerAngles> angles;

    static UnitarySpec qft() { return {}; }
    static UnitarySpec aqft(int degree) { return {Kind::Aqft, degree, {}}; }
    static UnitarySpec hadamard() { return {Kind::Hadamard, 0, {}}; }
    static UnitarySpec separable(std::vector<EulerAngles> a) {
        return {Kind::Separable, 0, std::move(a)};
    }

    /// Throws std::invalid_argument if the spec cannot act on n qubits.
    void validate(int n) const {
        if (kind == Kind::Aqft && (m < 1 || m > n)) {
            throw std::invalid_argument("AQFT degree m=" + std::to_string(m) +
                                        " outside [1, n=" + std::to_string(n) + "]");
        }
        if (kind == Kind::Separable && angles.size() != static_cast<std::size_t>(n)) {
            throw std::invalid_argument("separable unitary needs " + std::to_string(n) +
                                        " angle triples, got " + std::to_string(angles.size()));
        }
    }

    [[nodiscard]] std::string label() const {
        switch (kind) {
        case Kind::Qft:
            return "qft";
        case Kind::Aqft:
            return "aqft:" + std::to_string(m);
        case Kind::Hadamard:
            return "hadamard";
        case Kind::Separable:
            return "separable";
        }
        return "?";
    }

    friend bool operator==(const UnitarySpec &, const UnitarySpec &) = default;
};

/// e^{i(phi+lambda)/2} Rz(phi) Ry(theta) Rz(lambda)
inline Gate2 u3_matrix(double theta, double phi, double lambda) {
    const Gate2 m = gates::multiply(gates::rz(phi), gates::multiply(gates::ry(theta), gates::rz(lambda)));
    return gates::scale(m, std::polar(1.0, (phi + lambda) / 2));
}

inline Gate2 u3_matrix(const EulerAngles &a) { return u3_matrix(a[0], a[1], a[2]); }

inline std::size_t reverse_bits(std::size_t x, int n) {
    std::size_t r = 0;
    for (int b = 0; b < n; ++b) {
        r = (r << 1) | ((x >> b) & 1U);
    }
    return r;
}

/**
 * @brief A UnitarySpec bound to a qubit count, with its tables precomputed.
 *
 * QFT runs as a radix-2 FFT. AQFT runs as the swapless Coppersmith circuit
 * (Hadamard plus controlled phases 2 pi / 2^d for d <= m on each qubit) followed
 * by a bit-reversal permutation, which is exactly the index-space matrix above.
 * The QFT, AQFT and Hadamard matrices are symmetric, so their adjoints are the
 * entrywise conjugates.
 */
class Transform {
  public:
    Transform(UnitarySpec spec, int n) : spec_(std::move(spec)), n_(n) {
        if (n < 1) {
            throw std::invalid_argument("Transform: n must be >= 1");
        }
        spec_.validate(n);
        const std::size_t dim = std::size_t{1} << n;
        switch (spec_.kind) {
        case UnitarySpec::Kind::Qft:
            roots_.resize(dim / 2 + 1);
            for (std::size_t k = 0; k < roots_.size(); ++k) {
                roots_[k] = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(k) /
                                                static_cast<double>(dim));
            }
            build_bitrev();
            break;
        case UnitarySpec::Kind::Aqft:
            build_aqft_tables();
            build_bitrev();
            break;
        case UnitarySpec::Kind::Hadamard:
            break;
        case UnitarySpec::Kind::Separable:
            for (const auto &a : spec_.angles) {
                gates_.push_back(u3_matrix(a));
            }
            break;
        }
    }

    [[nodiscard]] int qubits() const noexcept { return n_; }
    [[nodiscard]] const UnitarySpec &spec() const noexcept { return spec_; }

    void apply(std::span<cplx> amps, bool adjoint = false) const {
        if (amps.size() != (std::size_t{1} << n_)) {
            throw std::invalid_argument("Transform::apply: dimension mismatch");
        }
        switch (spec_.kind) {
        case UnitarySpec::Kind::Qft:
            fft(amps, adjoint);
            break;
        case UnitarySpec::Kind::Aqft:
            aqft(amps, adjoint);
            break;
        case UnitarySpec::Kind::Hadamard:
            for (int q = 0; q < n_; ++q) {
                detail::apply_gate_inplace(amps, q, gates::hadamard());
            }
            break;
        case UnitarySpec::Kind::Separable:
            for (int q = 0; q < n_; ++q) {
                const auto &g = gates_[static_cast<std::size_t>(q)];
                detail::apply_gate_inplace(amps, q, adjoint ? gates::adjoint(g) : g);
            }
            break;
        }
    }

    [[nodiscard]] StateVector apply(const StateVector &state, bool adjoint = false) const {
        StateVector out = state;
        apply(out.amplitudes(), adjoint);
        return out;
    }

  private:
    void build_bitrev() {
        const std::size_t dim = std::size_t{1} << n_;
        bitrev_.resize(dim);
        for (std::size_t j = 0; j < dim; ++j) {
            bitrev_[j] = reverse_bits(j, n_);
        }
    }

    void permute_bitrev(std::span<cplx> a) const {
        for (std::size_t j = 0; j < a.size(); ++j) {
            const std::size_t r = bitrev_[j];
            if (r > j) {
                std::swap(a[j], a[r]);
            }
        }
    }

    // out_j = N^{-1/2} sum_k e^{+-2 pi i jk/N} in_k
    void fft(std::span<cplx> a, bool adjoint) const {
        const std::size_t dim = a.size();
        permute_bitrev(a);
        for (std::size_t len = 2; len <= dim; len <<= 1) {
            const std::size_t half = len / 2;
            const std::size_t step = dim / len;
            for (std::size_t base = 0; base < dim; base += len) {
                for (std::size_t k = 0; k < half; ++k) {
                    const cplx w = adjoint ? std::conj(roots_[k * step]) : roots_[k * step];
                    const cplx u = a[base + k];
                    const cplx v = w * a[base + k + half];
                    a[base + k] = u + v;
                    a[base + k + half] = u - v;
                }
            }
        }
        const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
        for (auto &x : a) {
            x *= scale;
        }
    }

    // For qubit p, the controlled phases couple bit p with bits p-1 .. p-L,
    // L = min(m, p+1) - 1; the table is indexed by those L bits.
    void build_aqft_tables() {
        phase_tables_.resize(static_cast<std::size_t>(n_));
        for (int p = 0; p < n_; ++p) {
            const int dmax = std::min(spec_.m, p + 1);
            const int lower_bits = dmax - 1;
            auto &table = phase_tables_[static_cast<std::size_t>(p)];
            table.assign(std::size_t{1} << lower_bits, cplx{1.0});
            for (std::size_t lower = 0; lower < table.size(); ++lower) {
                double angle = 0.0;
                for (int d = 2; d <= dmax; ++d) {
                    // control qubit p-d+1 sits at offset L-d+1 within `lower`
                    if ((lower >> (lower_bits - d + 1)) & 1U) {
                        angle += 2.0 * std::numbers::pi / std::ldexp(1.0, d);
                    }
                }
                table[lower] = std::polar(1.0, angle);
            }
        }
    }

    void aqft(std::span<cplx> a, bool adjoint) const {
        const double r = 1.0 / std::sqrt(2.0);
        const std::size_t dim = a.size();
        for (int p = n_ - 1; p >= 0; --p) {
            const auto &table = phase_tables_[static_cast<std::size_t>(p)];
            const int lower_bits = std::min(spec_.m, p + 1) - 1;
            const std::size_t mask = (std::size_t{1} << lower_bits) - 1;
            const int shift = p - lower_bits;
            const std::size_t stride = std::size_t{1} << p;
            for (std::size_t base = 0; base < dim; base += 2 * stride) {
                for (std::size_t i = base; i < base + stride; ++i) {
                    const cplx a0 = a[i];
                    const cplx a1 = a[i + stride];
                    cplx ph = table[(i >> shift) & mask];
                    if (adjoint) {
                        ph = std::conj(ph);
                    }
                    a[i] = r * (a0 + a1);
                    a[i + stride] = ph * (r * (a0 - a1));
                }
            }
        }
        permute_bitrev(a);
    }

    UnitarySpec spec_;
    int n_;
    std::vector<cplx> roots_;
    std::vector<std::size_t> bitrev_;
    std::vector<std::vector<cplx>> phase_tables_;
    std::vector<Gate2> gates_;
};

inline StateVector qft_apply(const StateVector &state, bool adjoint = false) {
    return Transform(UnitarySpec::qft(), state.qubits()).apply(state, adjoint);
}

inline StateVector aqft_apply(const StateVector &state, int m, bool adjoint = false) {
    return Transform(UnitarySpec::aqft(m), state.qubits()).apply(state, adjoint);
}

inline StateVector hadamard_apply(const StateVector &state, bool adjoint = false) {
    return Transform(UnitarySpec::hadamard(), state.qubits()).apply(state, adjoint);
}

inline StateVector separable_apply(const StateVector &state, const std::vector<EulerAngles> &angles,
                                   bool adjoint = false) {
    return Transform(UnitarySpec::separable(angles), state.qubits()).apply(state, adjoint);
}

inline StateVector apply_unitary(const StateVector &state, const UnitarySpec &spec,
                                 bool adjoint = false) {
    return Transform(spec, state.qubits()).apply(state, adjoint);
}

/// Row-major dense matrix of the transform, built column by column from basis states.
inline std::vector<cplx> unitary_matrix(const UnitarySpec &spec, int n, bool adjoint = false) {
    const Transform t(spec, n);
    const std::size_t dim = std::size_t{1} << n;
    std::vector<cplx> mat(dim * dim);
    std::vector<cplx> col(dim);
    for (std::size_t k = 0; k < dim; ++k) {
        std::fill(col.begin(), col.end(), cplx{});
        col[k] = 1.0;
        t.apply(col, adjoint);
        for (std::size_t j = 0; j < dim; ++j) {
            mat[j * dim + k] = col[j];
        }
    }
    return mat;
}

} // namespace qpty
