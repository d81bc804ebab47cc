#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qpty/random.hpp"

namespace qpty {

/// One multinomial draw of `shots` trials over the outcomes of `p`.
/// Entries in [-1e-12, 0) are treated as zero.
inline std::vector<std::uint64_t> sample_shots(std::span<const double> p, std::uint64_t shots,
                                               Rng &rng) {
    if (shots < 1) {
        throw std::invalid_argument("sample_shots: shot count must be >= 1");
    }
    if (p.empty()) {
        throw std::invalid_argument("sample_shots: empty distribution");
    }
    std::vector<double> cdf(p.size());
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] < -1e-12) {
            throw std::invalid_argument("sample_shots: negative probability " +
                                        std::to_string(p[i]) + " at outcome " + std::to_string(i));
        }
        total += std::max(p[i], 0.0);
        cdf[i] = total;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw std::invalid_argument("sample_shots: probabilities sum to " + std::to_string(total));
    }

    std::vector<std::uint64_t> counts(p.size(), 0);
    for (std::uint64_t s = 0; s < shots; ++s) {
        const double u = rng.uniform() * total;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        if (it == cdf.end()) {
            it = std::lower_bound(cdf.begin(), cdf.end(), total);
        }
        ++counts[static_cast<std::size_t>(it - cdf.begin())];
    }
    return counts;
}

} // namespace qpty
