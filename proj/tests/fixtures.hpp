#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "spperm/generate.hpp"
#include "spperm/matrix.hpp"

namespace fixtures {

using spperm::Index;
using spperm::SparseMatrix;
using spperm::Triplet;

// 6x6 toy whose ordered form has the four-region layout with k = 4, c = 3.
// Column 0 carries 11.6, 2.6, 1.8, 9.9 on rows 0, 2, 3, 5.
inline SparseMatrix toy() {
    const std::vector<Triplet> t = {
        {0, 0, 11.6}, {0, 1, 3.4}, {0, 3, 5.2}, {0, 5, 7.1}, {1, 1, 4.3}, {1, 2, 8.8},
        {2, 0, 2.6},  {2, 3, 6.5}, {2, 4, 0.7}, {3, 0, 1.8}, {3, 5, 2.9}, {4, 1, 1.5},
        {4, 2, 3.3},  {5, 0, 9.9}, {5, 3, 4.4}, {5, 4, 7.7},
    };
    return SparseMatrix::fromTriplets(6, t);
}

// Exact rational permanent of toy(): 39341634717 / 500000.
inline constexpr double kToyPermanent = 78683.269434;

inline const std::vector<Index> kToyRowPerm = {1, 4, 0, 3, 2, 5};
inline const std::vector<Index> kToyColPerm = {2, 1, 5, 0, 3, 4};

inline SparseMatrix fromDense(const std::vector<std::vector<double>>& rows) {
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            if (rows[i][j] != 0.0)
                t.push_back({static_cast<Index>(i), static_cast<Index>(j), rows[i][j]});
    return SparseMatrix::fromTriplets(static_cast<Index>(rows.size()), t);
}

inline SparseMatrix identity(Index n) {
    std::vector<Triplet> t;
    for (Index i = 0; i < n; ++i)
        t.push_back({i, i, 1.0});
    return SparseMatrix::fromTriplets(n, t);
}

inline SparseMatrix allOnes(Index n) {
    std::vector<Triplet> t;
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j)
            t.push_back({i, j, 1.0});
    return SparseMatrix::fromTriplets(n, t);
}

// Same pattern with every value replaced by 1.
inline SparseMatrix binarized(const SparseMatrix& m) {
    auto t = m.triplets();
    for (auto& e : t)
        e.value = 1.0;
    return SparseMatrix::fromTriplets(m.dim(), t);
}

// Random pattern without the full-rank rejection loop; may be singular.
inline SparseMatrix randomPattern(Index n, double p, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Triplet> t;
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j)
            if (u(rng) < p)
                t.push_back({i, j, 0.5 + u(rng)});
    return SparseMatrix::fromTriplets(n, t);
}

inline spperm::Permutation randomPermutation(Index n, std::mt19937_64& rng) {
    std::vector<Index> map(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i)
        map[static_cast<std::size_t>(i)] = i;
    std::shuffle(map.begin(), map.end(), rng);
    return spperm::Permutation(map);
}

inline double relErr(double got, double want) {
    const double scale = std::max(std::abs(want), 1e-300);
    return std::abs(got - want) / scale;
}

inline std::filesystem::path tempDir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("spperm_test_" + name);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace fixtures
