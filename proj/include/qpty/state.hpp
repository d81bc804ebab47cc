#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qpty {

using cplx = std::complex<double>;

/// Row-major 2x2 complex matrix: {g00, g01, g10, g11}.
using Gate2 = std::array<cplx, 4>;

inline constexpr double kNormTolerance = 1e-10;

/**
 * @brief Pure n-qubit state as 2^n complex amplitudes.
 *
 * Basis index j = sum_k j_k 2^k, where qubit k owns bit weight 2^k (qubit 0
 * is the least significant bit). A vector may be unnormalized; the
 * `normalized()` flag is computed, never stored.
 */
class StateVector {
  public:
    StateVector() = default;

    explicit StateVector(int n) : n_(check_qubits(n)), amps_(dim_of(n), cplx{}) {}

    StateVector(int n, std::vector<cplx> amps) : n_(check_qubits(n)), amps_(std::move(amps)) {
        if (amps_.size() != dim_of(n_)) {
            throw std::invalid_argument("StateVector: amplitude count " +
                                        std::to_string(amps_.size()) + " != 2^" +
                                        std::to_string(n_));
        }
    }

    /// Computational basis state |index>.
    static StateVector basis(int n, std::size_t index) {
        StateVector s(n);
        if (index >= s.dim()) {
            throw std::out_of_range("StateVector::basis: index out of range");
        }
        s.amps_[index] = 1.0;
        return s;
    }

    /// Infers n from the amplitude count, which must be a power of two >= 2.
    static StateVector from_amplitudes(std::vector<cplx> amps) {
        int n = 0;
        while ((std::size_t{1} << n) < amps.size()) {
            ++n;
        }
        if (n == 0 || (std::size_t{1} << n) != amps.size()) {
            throw std::invalid_argument("StateVector: length " + std::to_string(amps.size()) +
                                        " is not 2^n with n >= 1");
        }
        return StateVector(n, std::move(amps));
    }

    [[nodiscard]] int qubits() const noexcept { return n_; }
    [[nodiscard]] std::size_t dim() const noexcept { return amps_.size(); }

    [[nodiscard]] std::span<const cplx> amplitudes() const noexcept { return amps_; }
    [[nodiscard]] std::span<cplx> amplitudes() noexcept { return amps_; }
    [[nodiscard]] const std::vector<cplx> &data() const noexcept { return amps_; }

    cplx &operator[](std::size_t j) { return amps_[j]; }
    const cplx &operator[](std::size_t j) const { return amps_[j]; }

    [[nodiscard]] double norm_squared() const noexcept {
        double acc = 0.0;
        for (const auto &a : amps_) {
            acc += std::norm(a);
        }
        return acc;
    }

    [[nodiscard]] double norm() const noexcept { return std::sqrt(norm_squared()); }

    [[nodiscard]] bool normalized() const noexcept {
        return std::abs(norm_squared() - 1.0) < kNormTolerance;
    }

    /// Copy scaled to unit norm. Throws on the zero vector.
    [[nodiscard]] StateVector normalized_copy() const {
        const double nrm = norm();
        if (!(nrm > 0.0)) {
            throw std::invalid_argument("StateVector: cannot normalize the zero vector");
        }
        StateVector out = *this;
        for (auto &a : out.amps_) {
            a /= nrm;
        }
        return out;
    }

    static std::size_t dim_of(int n) { return std::size_t{1} << n; }

  private:
    static int check_qubits(int n) {
        if (n < 1 || n > 24) {
            throw std::invalid_argument("StateVector: qubit count must be in [1, 24], got " +
                                        std::to_string(n));
        }
        return n;
    }

    int n_ = 0;
    std::vector<cplx> amps_;
};

enum class Pauli { X, Y, Z };

inline char to_char(Pauli p) {
    switch (p) {
    case Pauli::X:
        return 'X';
    case Pauli::Y:
        return 'Y';
    case Pauli::Z:
        return 'Z';
    }
    return '?';
}

inline Pauli pauli_from_char(char c) {
    switch (c) {
    case 'X':
    case 'x':
        return Pauli::X;
    case 'Y':
    case 'y':
        return Pauli::Y;
    case 'Z':
    case 'z':
        return Pauli::Z;
    default:
        throw std::invalid_argument(std::string("unknown Pauli axis '") + c + "'");
    }
}

/// Label of one overlapping projector: Pauli axis, target qubit, eigenvalue sign.
struct ProjectorId {
    Pauli xi = Pauli::Z;
    int q = 0;
    int sign = +1; ///< +1 or -1

    friend bool operator==(const ProjectorId &, const ProjectorId &) = default;
};

/// Default projector order: xi in {X, Y, Z} outer, q ascending, sign + then -.
inline std::vector<ProjectorId> all_projectors(int n) {
    std::vector<ProjectorId> ids;
    ids.reserve(static_cast<std::size_t>(6 * n));
    for (Pauli xi : {Pauli::X, Pauli::Y, Pauli::Z}) {
        for (int q = 0; q < n; ++q) {
            ids.push_back({xi, q, +1});
            ids.push_back({xi, q, -1});
        }
    }
    return ids;
}

/// Eigenvector |xi^sign> of the Pauli operator, as (v0, v1).
inline std::array<cplx, 2> pauli_eigenvector(Pauli xi, int sign) {
    const double r = 1.0 / std::sqrt(2.0);
    const double s = sign > 0 ? 1.0 : -1.0;
    switch (xi) {
    case Pauli::X:
        return {cplx{r, 0.0}, cplx{s * r, 0.0}};
    case Pauli::Y:
        return {cplx{r, 0.0}, cplx{0.0, s * r}};
    case Pauli::Z:
        break;
    }
    return sign > 0 ? std::array<cplx, 2>{cplx{1.0}, cplx{0.0}}
                    : std::array<cplx, 2>{cplx{0.0}, cplx{1.0}};
}

namespace detail {

inline void check_qubit(int q, int n) {
    if (q < 0 || q >= n) {
        throw std::out_of_range("qubit index " + std::to_string(q) + " out of range for n=" +
                                std::to_string(n));
    }
}

inline void apply_gate_inplace(std::span<cplx> amps, int q, const Gate2 &g) {
    const std::size_t stride = std::size_t{1} << q;
    const std::size_t dim = amps.size();
    for (std::size_t base = 0; base < dim; base += 2 * stride) {
        for (std::size_t i = base; i < base + stride; ++i) {
            const cplx a0 = amps[i];
            const cplx a1 = amps[i + stride];
            amps[i] = g[0] * a0 + g[1] * a1;
            amps[i + stride] = g[2] * a0 + g[3] * a1;
        }
    }
}

// out = |v><v| (x) I on qubit q, with v the eigenvector selected by id.
inline void project_inplace(std::span<cplx> amps, const ProjectorId &id) {
    const auto v = pauli_eigenvector(id.xi, id.sign);
    const cplx c0 = std::conj(v[0]);
    const cplx c1 = std::conj(v[1]);
    const std::size_t stride = std::size_t{1} << id.q;
    const std::size_t dim = amps.size();
    for (std::size_t base = 0; base < dim; base += 2 * stride) {
        for (std::size_t i = base; i < base + stride; ++i) {
            const cplx overlap = c0 * amps[i] + c1 * amps[i + stride];
            amps[i] = v[0] * overlap;
            amps[i + stride] = v[1] * overlap;
        }
    }
}

inline void project_into(std::span<const cplx> in, std::span<cplx> out, const ProjectorId &id) {
    const auto v = pauli_eigenvector(id.xi, id.sign);
    const cplx c0 = std::conj(v[0]);
    const cplx c1 = std::conj(v[1]);
    const std::size_t stride = std::size_t{1} << id.q;
    const std::size_t dim = in.size();
    for (std::size_t base = 0; base < dim; base += 2 * stride) {
        for (std::size_t i = base; i < base + stride; ++i) {
            const cplx overlap = c0 * in[i] + c1 * in[i + stride];
            out[i] = v[0] * overlap;
            out[i + stride] = v[1] * overlap;
        }
    }
}

} // namespace detail

/// Applies g to qubit q: each amplitude pair differing only in bit q is mapped by g.
inline StateVector apply_single_qubit(const StateVector &state, int q, const Gate2 &g) {
    detail::check_qubit(q, state.qubits());
    StateVector out = state;
    detail::apply_gate_inplace(out.amplitudes(), q, g);
    return out;
}

/// Pi_{xi q}^{sign} |psi>, generally unnormalized; its squared norm is the Born
/// probability of the outcome.
inline StateVector apply_pauli_projector(const StateVector &state, const ProjectorId &id) {
    detail::check_qubit(id.q, state.qubits());
    if (id.sign != 1 && id.sign != -1) {
        throw std::invalid_argument("ProjectorId: sign must be +1 or -1");
    }
    StateVector out = state;
    detail::project_inplace(out.amplitudes(), id);
    return out;
}

/// sum_j conj(a_j) b_j
inline cplx inner_product(const StateVector &a, const StateVector &b) {
    if (a.dim() != b.dim()) {
        throw std::invalid_argument("inner_product: dimension mismatch");
    }
    cplx acc{};
    for (std::size_t j = 0; j < a.dim(); ++j) {
        acc += std::conj(a[j]) * b[j];
    }
    return acc;
}

/// |alpha_j|^2 for every basis index. No renormalization.
inline std::vector<double> born_distribution(const StateVector &state) {
    std::vector<double> p(state.dim());
    for (std::size_t j = 0; j < state.dim(); ++j) {
        p[j] = std::norm(state[j]);
    }
    return p;
}

namespace gates {

inline Gate2 identity() { return {cplx{1}, cplx{0}, cplx{0}, cplx{1}}; }
inline Gate2 pauli_x() { return {cplx{0}, cplx{1}, cplx{1}, cplx{0}}; }
inline Gate2 pauli_y() { return {cplx{0}, cplx{0, -1}, cplx{0, 1}, cplx{0}}; }
inline Gate2 pauli_z() { return {cplx{1}, cplx{0}, cplx{0}, cplx{-1}}; }
inline Gate2 hadamard() {
    const double r = 1.0 / std::sqrt(2.0);
    return {cplx{r}, cplx{r}, cplx{r}, cplx{-r}};
}
inline Gate2 sqrt_x() {
    return {cplx{0.5, 0.5}, cplx{0.5, -0.5}, cplx{0.5, -0.5}, cplx{0.5, 0.5}};
}
inline Gate2 rz(double a) {
    return {std::polar(1.0, -a / 2), cplx{0}, cplx{0}, std::polar(1.0, a / 2)};
}
inline Gate2 ry(double a) {
    const double c = std::cos(a / 2);
    const double s = std::sin(a / 2);
    return {cplx{c}, cplx{-s}, cplx{s}, cplx{c}};
}

inline Gate2 multiply(const Gate2 &a, const Gate2 &b) {
    return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
            a[2] * b[1] + a[3] * b[3]};
}

inline Gate2 adjoint(const Gate2 &g) {
    return {std::conj(g[0]), std::conj(g[2]), std::conj(g[1]), std::conj(g[3])};
}

inline Gate2 scale(const Gate2 &g, cplx c) { return {c * g[0], c * g[1], c * g[2], c * g[3]}; }

} // namespace gates

} // namespace qpty
