#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <vector>

namespace spperm {

/// g-th reflected binary Gray code.
constexpr std::uint64_t grayCode(std::uint64_t g) { return g ^ (g >> 1); }

/// One step of a Gray-code walk: the bit that flips and its direction.
struct ScbsEntry {
    int column = 0;
    int sign = 1;  // +1: 0 -> 1 (inclusion), -1: 1 -> 0 (exclusion)

    bool inclusion() const { return sign > 0; }

    /// Dense id: 2*column for inclusion, 2*column+1 for exclusion.
    int kernelId() const { return 2 * column + (sign < 0 ? 1 : 0); }

    friend auto operator<=>(const ScbsEntry&, const ScbsEntry&) = default;
};

/// Closed-form entry at 1-based position i: the column is the number of
/// trailing zeros of i, and the sign is + when (i - 2^j) / 2^(j+1) is even.
/// Throws Error for i = 0.
ScbsEntry scbsEntry(std::uint64_t i);

/// Reflected construction [S(k-1), +(k-1), -S(k-1)^R], length 2^k - 1.
/// Position i (1-based) lives at index i - 1. Accepts 1 <= bits <= 24.
std::vector<ScbsEntry> scbsRecursive(int bits);

/// Occurrences of column j in the (n-1)-bit sequence: 2^(n-j-2).
std::uint64_t appearanceCount(int n, int j);

struct Ratio {
    std::uint64_t num = 0;
    std::uint64_t den = 1;

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    friend bool operator==(const Ratio&, const Ratio&) = default;
};

/// Reduces num/den by their gcd. den must be nonzero.
Ratio makeRatio(std::uint64_t num, std::uint64_t den);

struct UpdateProbability {
    Ratio exact;   // sum of 2^(n-j-2) over cols, divided by 2^(n-1) - 1
    Ratio approx;  // sum of 2^-(j+1) over cols
};

/// Chance that a row with nonzeros in `cols` is touched in a Gray-code step
/// of an n x n permanent computation. Column n-1 never flips and is rejected.
UpdateProbability updateProbability(int n, std::span<const int> cols);

}  // namespace spperm
