#include "spperm/generate.hpp"

#include <random>
#include <vector>

namespace spperm {

namespace {

constexpr double kTwoPow53Inv = 1.0 / 9007199254740992.0;

// [0, 1)
double unitOpen(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * kTwoPow53Inv; }

// (0, 1]
double unitPositive(std::mt19937_64& rng) { return static_cast<double>((rng() >> 11) + 1) * kTwoPow53Inv; }

}  // namespace

SparseMatrix generateErdosRenyi(const ErdosRenyiParams& params, int* attemptsUsed) {
    if (params.n < 2)
        throw Error("Erdos-Renyi generation needs n >= 2");
    if (!(params.p > 0.0 && params.p <= 1.0))
        throw Error("Erdos-Renyi density must lie in (0, 1]");
    if (params.maxAttempts < 1)
        throw Error("Erdos-Renyi attempt cap must be positive");

    std::mt19937_64 rng(params.seed);
    std::vector<Triplet> entries;
    for (int attempt = 1; attempt <= params.maxAttempts; ++attempt) {
        entries.clear();
        for (Index i = 0; i < params.n; ++i) {
            for (Index j = 0; j < params.n; ++j) {
                if (unitOpen(rng) < params.p)
                    entries.push_back({i, j, unitPositive(rng)});
            }
        }
        SparseMatrix m = SparseMatrix::fromTriplets(params.n, entries);
        if (structuralRank(m) == params.n) {
            if (attemptsUsed)
                *attemptsUsed = attempt;
            return m;
        }
    }
    throw Error("Erdos-Renyi: no structurally full-rank matrix after " + std::to_string(params.maxAttempts) +
                " attempts (n=" + std::to_string(params.n) + ", p=" + std::to_string(params.p) + ")");
}

}  // namespace spperm
