#include "spperm/graycode.hpp"

#include <bit>
#include <numeric>
#include <string>

#include "spperm/matrix.hpp"

namespace spperm {

ScbsEntry scbsEntry(std::uint64_t i) {
    if (i == 0)
        throw Error("signed changed-bit positions start at 1");
    const int j = std::countr_zero(i);
    const bool even = ((i >> (j + 1)) & 1U) == 0;
    return {j, even ? 1 : -1};
}

std::vector<ScbsEntry> scbsRecursive(int bits) {
    if (bits < 1 || bits > 24)
        throw Error("scbsRecursive: bit width must be in [1, 24], got " + std::to_string(bits));
    std::vector<ScbsEntry> seq{{0, 1}};
    seq.reserve((std::size_t{1} << bits) - 1);
    for (int k = 2; k <= bits; ++k) {
        const std::size_t prev = seq.size();
        seq.push_back({k - 1, 1});
        for (std::size_t r = prev; r-- > 0;)
            seq.push_back({seq[r].column, -seq[r].sign});
    }
    return seq;
}

std::uint64_t appearanceCount(int n, int j) {
    if (n < 2 || n > 64 || j < 0 || j >= n - 1)
        throw Error("appearanceCount: need 0 <= j < n-1 (n=" + std::to_string(n) + ", j=" + std::to_string(j) + ")");
    return std::uint64_t{1} << (n - j - 2);
}

Ratio makeRatio(std::uint64_t num, std::uint64_t den) {
    if (den == 0)
        throw Error("zero denominator");
    const std::uint64_t g = std::gcd(num, den);
    if (g == 0)
        return {0, 1};
    return {num / g, den / g};
}

UpdateProbability updateProbability(int n, std::span<const int> cols) {
    if (n < 2 || n > 64)
        throw Error("updateProbability: n must be in [2, 64]");
    std::uint64_t sum = 0;
    std::uint64_t seen = 0;
    for (int j : cols) {
        if (j < 0 || j >= n - 1)
            throw Error("updateProbability: column " + std::to_string(j) + " never flips for n=" + std::to_string(n));
        if ((seen >> j) & 1U)
            throw Error("updateProbability: repeated column " + std::to_string(j));
        seen |= std::uint64_t{1} << j;
        sum += appearanceCount(n, j);
    }
    const std::uint64_t steps = (std::uint64_t{1} << (n - 1)) - 1;
    // 2^-(j+1) == 2^(n-j-2) / 2^(n-1)
    return {makeRatio(sum, steps), makeRatio(sum, std::uint64_t{1} << (n - 1))};
}

}  // namespace spperm
