#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qpty/random.hpp"
#include "qpty/state.hpp"
#include "qpty/transforms.hpp"

namespace qpty {

// Seeds of the random members of the benchmark state table. psi9 and psi10
// (two-qubit random states) use Rng(kPsi9Seed) and Rng(kPsi10Seed); the
// n-qubit random separable state psi3n uses Rng(derive_seed(kPsi3nSeed, {n})).
inline constexpr std::uint64_t kPsi9Seed = 9;
inline constexpr std::uint64_t kPsi10Seed = 10;
inline constexpr std::uint64_t kPsi3nSeed = 3;

/// Haar-random element of U(2) up to global phase, in (theta, phi, lambda) form.
inline EulerAngles haar_angles(Rng &rng) {
    const double theta = std::acos(1.0 - 2.0 * rng.uniform());
    const double phi = 2.0 * std::numbers::pi * rng.uniform();
    const double lambda = 2.0 * std::numbers::pi * rng.uniform();
    return {theta, phi, lambda};
}

/// Product state with qubit-k factor `factors[k]`.
inline StateVector product_state(const std::vector<std::array<cplx, 2>> &factors) {
    const int n = static_cast<int>(factors.size());
    StateVector s(n);
    for (std::size_t j = 0; j < s.dim(); ++j) {
        cplx a{1.0};
        for (int k = 0; k < n; ++k) {
            a *= factors[static_cast<std::size_t>(k)][(j >> k) & 1U];
        }
        s[j] = a;
    }
    return s;
}

/// Independent Haar-random single-qubit unitary on each qubit of |0...0>.
inline StateVector random_separable(int n, Rng &rng) {
    std::vector<std::array<cplx, 2>> factors;
    for (int k = 0; k < n; ++k) {
        const Gate2 g = u3_matrix(haar_angles(rng));
        factors.push_back({g[0], g[2]});
    }
    return product_state(factors);
}

/// Normalized vector of 2^n i.i.d. standard complex Gaussians.
inline StateVector random_arbitrary(int n, Rng &rng) {
    StateVector s(n);
    for (std::size_t j = 0; j < s.dim(); ++j) {
        const double re = rng.normal();
        const double im = rng.normal();
        s[j] = {re, im};
    }
    return s.normalized_copy();
}

inline StateVector ghz_state(int n) {
    StateVector s(n);
    const double r = 1.0 / std::sqrt(2.0);
    s[0] = r;
    s[s.dim() - 1] = r;
    return s;
}

inline StateVector w_state(int n) {
    StateVector s(n);
    const double r = 1.0 / std::sqrt(static_cast<double>(n));
    for (int k = 0; k < n; ++k) {
        s[std::size_t{1} << k] = r;
    }
    return s;
}

namespace detail {

inline StateVector uniform_product(int n, cplx one_amp) {
    const double r = 1.0 / std::sqrt(2.0);
    return product_state(std::vector<std::array<cplx, 2>>(
        static_cast<std::size_t>(n), {cplx{r}, r * one_amp}));
}

inline StateVector two_qubit(std::initializer_list<std::pair<std::size_t, double>> entries) {
    StateVector s(2);
    const double r = 1.0 / std::sqrt(2.0);
    for (auto [j, sign] : entries) {
        s[j] = sign * r;
    }
    return s;
}

} // namespace detail

/// Tags of the two-qubit benchmark states.
inline std::vector<std::string> two_qubit_tags() {
    return {"psi1", "psi2", "psi3", "psi4", "psi5", "psi6", "psi7", "psi8", "psi9", "psi10"};
}

/// Tags of the n-qubit benchmark states: two phased products, a random
/// product state, GHZ_n and W_n.
inline std::vector<std::string> multiqubit_tags() {
    return {"psi1n", "psi2n", "psi3n", "psi4n", "psi5n"};
}

/// The benchmark set used by the sweeps: the two-qubit table at n = 2, the
/// n-qubit table otherwise.
inline std::vector<std::string> table_tags(int n) {
    return n == 2 ? two_qubit_tags() : multiqubit_tags();
}

/**
 * @brief Benchmark state by tag.
 *
 * Two-qubit tags psi1..psi10 need n = 2. n-qubit tags psi1n..psi5n accept any
 * n >= 2; "ghz", "w" and "bell" are aliases of psi4n, psi5n and psi5.
 */
inline StateVector named_state(std::string_view tag, int n) {
    const cplx e_pi4 = std::polar(1.0, std::numbers::pi / 4);
    const auto need_two = [&] {
        if (n != 2) {
            throw std::invalid_argument("state '" + std::string(tag) + "' is defined for n=2 only");
        }
    };
    const auto need_multi = [&] {
        if (n < 2) {
            throw std::invalid_argument("state '" + std::string(tag) + "' needs n >= 2");
        }
    };

    if (tag == "psi1") {
        need_two();
        return detail::uniform_product(2, 1.0);
    }
    if (tag == "psi2") {
        need_two();
        return detail::uniform_product(2, -1.0);
    }
    if (tag == "psi3") {
        need_two();
        return detail::uniform_product(2, e_pi4);
    }
    if (tag == "psi4") {
        need_two();
        return detail::uniform_product(2, -e_pi4);
    }
    if (tag == "psi5" || tag == "bell") {
        need_two();
        return detail::two_qubit({{0, 1.0}, {3, 1.0}});
    }
    if (tag == "psi6") {
        need_two();
        return detail::two_qubit({{0, 1.0}, {3, -1.0}});
    }
    // |01> and |10> in j_1 j_0 notation are indices 1 and 2
    if (tag == "psi7") {
        need_two();
        return detail::two_qubit({{1, 1.0}, {2, 1.0}});
    }
    if (tag == "psi8") {
        need_two();
        return detail::two_qubit({{1, 1.0}, {2, -1.0}});
    }
    if (tag == "psi9") {
        need_two();
        Rng rng(kPsi9Seed);
        return random_arbitrary(2, rng);
    }
    if (tag == "psi10") {
        need_two();
        Rng rng(kPsi10Seed);
        return random_arbitrary(2, rng);
    }
    if (tag == "psi1n") {
        need_multi();
        return detail::uniform_product(n, e_pi4);
    }
    if (tag == "psi2n") {
        need_multi();
        return detail::uniform_product(n, -e_pi4);
    }
    if (tag == "psi3n") {
        need_multi();
        Rng rng(derive_seed(kPsi3nSeed, {static_cast<std::uint64_t>(n)}));
        return random_separable(n, rng);
    }
    if (tag == "psi4n" || tag == "ghz") {
        need_multi();
        return ghz_state(n);
    }
    if (tag == "psi5n" || tag == "w") {
        need_multi();
        return w_state(n);
    }
    throw std::invalid_argument("unknown state tag '" + std::string(tag) + "'");
}

inline bool is_entangled_tag(std::string_view tag) {
    return tag == "psi4n" || tag == "psi5n" || tag == "ghz" || tag == "w" || tag == "psi5" ||
           tag == "psi6" || tag == "psi7" || tag == "psi8" || tag == "bell" || tag == "psi9" ||
           tag == "psi10";
}

} // namespace qpty
