#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace spperm {

using Index = std::int32_t;

/// Raised for invalid input anywhere in the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Triplet {
    Index row = 0;
    Index col = 0;
    double value = 0.0;

    friend bool operator==(const Triplet&, const Triplet&) = default;
};

/// A bijection on {0..n-1}. `map[i]` is the source index placed at position i.
class Permutation {
public:
    Permutation() = default;
    explicit Permutation(std::vector<Index> map);

    static Permutation identity(Index n);

    Index size() const { return static_cast<Index>(map_.size()); }
    Index operator[](Index i) const { return map_[static_cast<std::size_t>(i)]; }
    std::span<const Index> map() const { return map_; }

    Permutation inverse() const;

    friend bool operator==(const Permutation&, const Permutation&) = default;

private:
    std::vector<Index> map_;
};

/// Square sparse matrix held simultaneously in CSR and CSC form.
///
/// Immutable after construction. Within each row (column) the column (row)
/// indices are strictly increasing, and every stored value is finite and
/// nonzero.
class SparseMatrix {
public:
    SparseMatrix() = default;

    /// Builds both views from coordinate entries in any order.
    /// Throws Error on out-of-range indices, duplicates, zeros or non-finite values.
    static SparseMatrix fromTriplets(Index n, std::span<const Triplet> entries);

    Index dim() const { return n_; }
    std::size_t nnz() const { return cids_.size(); }

    std::span<const Index> rowPtrs() const { return rptrs_; }
    std::span<const Index> colIds() const { return cids_; }
    std::span<const double> rowVals() const { return rvals_; }
    std::span<const Index> colPtrs() const { return cptrs_; }
    std::span<const Index> rowIds() const { return rids_; }
    std::span<const double> colVals() const { return cvals_; }

    std::span<const Index> rowCols(Index i) const;
    std::span<const double> rowValues(Index i) const;
    std::span<const Index> colRows(Index j) const;
    std::span<const double> colValues(Index j) const;

    Index rowDegree(Index i) const { return rptrs_[i + 1] - rptrs_[i]; }
    Index colDegree(Index j) const { return cptrs_[j + 1] - cptrs_[j]; }

    /// Entry (i, j), or 0 when not stored.
    double at(Index i, Index j) const;

    /// Row-major list of stored entries.
    std::vector<Triplet> triplets() const;

    SparseMatrix transposed() const;

    /// Row-major dense copy.
    std::vector<double> toDense() const;

    friend bool operator==(const SparseMatrix&, const SparseMatrix&) = default;

private:
    Index n_ = 0;
    std::vector<Index> rptrs_{0};
    std::vector<Index> cids_;
    std::vector<double> rvals_;
    std::vector<Index> cptrs_{0};
    std::vector<Index> rids_;
    std::vector<double> cvals_;
};

/// Result(i, j) = m(rowPerm[i], colPerm[j]).
SparseMatrix permute(const SparseMatrix& m, const Permutation& rowPerm, const Permutation& colPerm);

/// Columns by ascending nonzero count; ties keep the original index order.
Permutation degreeSortAscending(const SparseMatrix& m);

/// Maximum bipartite matching between rows and columns of the nonzero
/// pattern (Hopcroft-Karp). Entry i is the column matched to row i, or -1.
std::vector<Index> maximumMatching(const SparseMatrix& m);

Index structuralRank(const SparseMatrix& m);

// Plain dense text: n on the first line followed by n rows of n values.
SparseMatrix readDense(std::istream& in);
SparseMatrix readDenseText(const std::string& text);
std::string writeDense(const SparseMatrix& m);

/// Formats a double with 17 significant digits (round-trip exact).
std::string formatExact(double v);

}  // namespace spperm
