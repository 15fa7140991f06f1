#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "spperm/matrix.hpp"

namespace spperm {

/// Running row sums of the Nijenhuis-Wilf walk with an exact count of
/// entries that are currently zero.
class RowSums {
public:
    RowSums() = default;
    explicit RowSums(std::vector<double> x);

    std::span<const double> values() const { return x_; }
    double operator[](Index i) const { return x_[static_cast<std::size_t>(i)]; }
    Index size() const { return static_cast<Index>(x_.size()); }
    Index zeroCount() const { return zeros_; }

    void add(Index i, double delta) {
        double& v = x_[static_cast<std::size_t>(i)];
        zeros_ -= (v == 0.0);
        v += delta;
        zeros_ += (v == 0.0);
    }

    /// Left-to-right product of all entries.
    double product() const;

    friend bool operator==(const RowSums&, const RowSums&) = default;

private:
    std::vector<double> x_;
    Index zeros_ = 0;
};

/// Sum over all permutations of the products of selected entries. n <= 13.
double naivePermanent(const SparseMatrix& m);

/// Inclusion-exclusion over all 2^n column subsets. n <= 30.
double ryserPermanent(const SparseMatrix& m);

/// x[i] = a(i, n-1) - (sum of row i) / 2, with a(i, n-1) = 0 when absent.
RowSums initRowSums(const SparseMatrix& m);

/// Row sums a walk holds just before iteration gStart: `base` plus every
/// column whose bit is set in grayCode(gStart - 1).
RowSums initThreadState(const SparseMatrix& m, const RowSums& base, std::uint64_t gStart);

struct SparseOptions {
    bool zeroSkip = false;
    bool degreeSort = false;
    /// Returns 0 without iterating when the pattern is structurally singular.
    bool rankShortcut = true;
    Index maxDimension = 30;
};

struct PermanentResult {
    double value = 0.0;
    std::uint64_t iterations = 0;
    /// Iterations whose product was skipped because some x entry was zero.
    std::uint64_t skipped = 0;
    bool structurallySingular = false;
};

/// One thread's slice [gStart, gEnd] of the Gray-code iteration space.
struct ThreadChunk {
    std::uint64_t gStart = 1;
    std::uint64_t gEnd = 0;
    RowSums initialX;
    double partialSum = 0.0;
    std::uint64_t skipped = 0;
};

/// Sequential Gray-code walk over CSC columns.
PermanentResult sparsePermanent(const SparseMatrix& m, const SparseOptions& opts = {});

/// Evaluated per-thread chunks of the parallel walk, in thread order.
/// Chunk size is ceil((2^(n-1) - 1) / threads); thread 0 also carries the
/// product of the initial row sums.
std::vector<ThreadChunk> sparsePermanentChunks(const SparseMatrix& m, int threads, const SparseOptions& opts = {});

/// Ordered fold of chunk partials, scaled to the permanent.
double reduceChunks(Index n, std::span<const ThreadChunk> chunks);

PermanentResult parallelSparsePermanent(const SparseMatrix& m, int threads, const SparseOptions& opts = {});

/// Final Nijenhuis-Wilf scale factor 4*(n mod 2) - 2.
inline double permanentScale(Index n) { return 4.0 * static_cast<double>(n % 2) - 2.0; }

}  // namespace spperm
