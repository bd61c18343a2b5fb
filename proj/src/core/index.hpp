#pragma once

#include <cstdint>
#include <stdexcept>

namespace mlbicgstabt {

/// Position of a flat iteration counter k inside the n-periodic cycle
/// structure: k = n * cycle + phase with 1 <= phase <= n.
struct IndexPair {
    std::int64_t cycle;
    std::int64_t phase;
};

/// floor((k - 1) / n). Integer division in C++ truncates toward zero, so the
/// negative branch is corrected by hand.
constexpr std::int64_t cycle_index(std::int64_t n, std::int64_t k) {
    if (n <= 0) {
        throw std::invalid_argument("index functions need n >= 1");
    }
    const std::int64_t num = k - 1;
    std::int64_t q = num / n;
    if (num % n != 0 && num < 0) {
        --q;
    }
    return q;
}

/// k - n * cycle_index(n, k); always in {1, ..., n}.
constexpr std::int64_t phase_index(std::int64_t n, std::int64_t k) {
    return k - n * cycle_index(n, k);
}

constexpr IndexPair split_index(std::int64_t n, std::int64_t k) {
    const std::int64_t cycle = cycle_index(n, k);
    return {cycle, k - n * cycle};
}

}  // namespace mlbicgstabt
