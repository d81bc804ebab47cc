#pragma once

#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qpty {

/// Column-stochastic 2x2 readout channel, row-major:
/// {p(0|0), p(0|1), p(1|0), p(1|1)}.
using Confusion2 = std::array<double, 4>;

inline Confusion2 symmetric_flip(double eps) { return {1.0 - eps, eps, eps, 1.0 - eps}; }

/// Independent per-bit readout error model. `bits[k]` is the channel of the
/// outcome bit with weight 2^k. For ptychographic records of n qubits there
/// are n + 1 bits, and bit n (most significant) is the intermediate outcome.
struct ReadoutNoiseModel {
    std::vector<Confusion2> bits;
    std::string id = "custom";

    static ReadoutNoiseModel identity(int k) {
        return {std::vector<Confusion2>(static_cast<std::size_t>(k), symmetric_flip(0.0)),
                "identity"};
    }

    static ReadoutNoiseModel symmetric(int k, double eps) {
        if (!(eps >= 0.0 && eps <= 1.0)) {
            throw std::invalid_argument("flip probability must lie in [0, 1]");
        }
        return {std::vector<Confusion2>(static_cast<std::size_t>(k), symmetric_flip(eps)),
                "symmetric:" + format_eps(eps)};
    }

    [[nodiscard]] int size() const noexcept { return static_cast<int>(bits.size()); }

    void validate() const {
        for (const auto &c : bits) {
            for (double v : c) {
                if (!(v >= 0.0 && v <= 1.0)) {
                    throw std::invalid_argument("confusion entries must lie in [0, 1]");
                }
            }
            if (std::abs(c[0] + c[2] - 1.0) > 1e-12 || std::abs(c[1] + c[3] - 1.0) > 1e-12) {
                throw std::invalid_argument("confusion matrix columns must sum to 1");
            }
        }
    }

  private:
    static std::string format_eps(double eps) {
        std::string s = std::to_string(eps);
        while (s.size() > 1 && s.back() == '0') {
            s.pop_back();
        }
        if (!s.empty() && s.back() == '.') {
            s.pop_back();
        }
        return s;
    }
};

namespace detail {

inline void apply_channel_inplace(std::span<double> p, int bit, const Confusion2 &c) {
    const std::size_t stride = std::size_t{1} << bit;
    for (std::size_t base = 0; base < p.size(); base += 2 * stride) {
        for (std::size_t i = base; i < base + stride; ++i) {
            const double p0 = p[i];
            const double p1 = p[i + stride];
            p[i] = c[0] * p0 + c[1] * p1;
            p[i + stride] = c[2] * p0 + c[3] * p1;
        }
    }
}

} // namespace detail

/// (kron of per-bit channels) * p. Works on probabilities or raw counts.
inline std::vector<double> corrupt_counts(std::span<const double> p, const ReadoutNoiseModel &model) {
    if (p.size() != (std::size_t{1} << model.size())) {
        throw std::invalid_argument("corrupt_counts: vector length " + std::to_string(p.size()) +
                                    " does not match " + std::to_string(model.size()) +
                                    "-bit noise model");
    }
    std::vector<double> out(p.begin(), p.end());
    for (int b = 0; b < model.size(); ++b) {
        detail::apply_channel_inplace(out, b, model.bits[static_cast<std::size_t>(b)]);
    }
    return out;
}

} // namespace qpty
