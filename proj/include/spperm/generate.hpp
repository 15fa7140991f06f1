#pragma once

#include <cstdint>

#include "spperm/matrix.hpp"

namespace spperm {

struct ErdosRenyiParams {
    Index n = 0;
    double p = 0.0;
    std::uint64_t seed = 0;
    int maxAttempts = 1000;
};

/// Samples n x n matrices where every cell is independently nonzero with
/// probability p and values are uniform on (0, 1], retrying until the
/// pattern has full structural rank.
///
/// The stream is std::mt19937_64 seeded with `seed`; cells are visited in
/// row-major order and each draws one 64-bit word for the Bernoulli trial
/// and, when nonzero, one for the value. Both are converted with the top 53
/// bits, so a seed yields the same matrix on every platform. Attempts
/// continue the same stream. Throws Error once `maxAttempts` samples were
/// all structurally rank-deficient.
SparseMatrix generateErdosRenyi(const ErdosRenyiParams& params, int* attemptsUsed = nullptr);

inline SparseMatrix generateErdosRenyi(Index n, double p, std::uint64_t seed) {
    return generateErdosRenyi(ErdosRenyiParams{n, p, seed, 1000});
}

}  // namespace spperm
