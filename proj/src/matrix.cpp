#include "spperm/matrix.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>

namespace spperm {

Permutation::Permutation(std::vector<Index> map) : map_(std::move(map)) {
    std::vector<char> seen(map_.size(), 0);
    for (Index v : map_) {
        if (v < 0 || static_cast<std::size_t>(v) >= map_.size() || seen[static_cast<std::size_t>(v)])
            throw Error("not a permutation: index " + std::to_string(v) + " is out of range or repeated");
        seen[static_cast<std::size_t>(v)] = 1;
    }
}

Permutation Permutation::identity(Index n) {
    std::vector<Index> map(static_cast<std::size_t>(n));
    std::iota(map.begin(), map.end(), Index{0});
    return Permutation(std::move(map));
}

Permutation Permutation::inverse() const {
    std::vector<Index> inv(map_.size());
    for (std::size_t i = 0; i < map_.size(); ++i)
        inv[static_cast<std::size_t>(map_[i])] = static_cast<Index>(i);
    return Permutation(std::move(inv));
}

SparseMatrix SparseMatrix::fromTriplets(Index n, std::span<const Triplet> entries) {
    if (n < 0)
        throw Error("negative dimension");
    for (const auto& e : entries) {
        if (e.row < 0 || e.row >= n || e.col < 0 || e.col >= n)
            throw Error("entry (" + std::to_string(e.row) + ", " + std::to_string(e.col) +
                        ") out of range for n=" + std::to_string(n));
        if (!std::isfinite(e.value))
            throw Error("non-finite value at (" + std::to_string(e.row) + ", " + std::to_string(e.col) + ")");
        if (e.value == 0.0)
            throw Error("explicit zero at (" + std::to_string(e.row) + ", " + std::to_string(e.col) + ")");
    }

    std::vector<Triplet> sorted(entries.begin(), entries.end());
    std::sort(sorted.begin(), sorted.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    for (std::size_t k = 1; k < sorted.size(); ++k) {
        if (sorted[k].row == sorted[k - 1].row && sorted[k].col == sorted[k - 1].col)
            throw Error("duplicate entry (" + std::to_string(sorted[k].row) + ", " +
                        std::to_string(sorted[k].col) + ")");
    }

    SparseMatrix m;
    const auto un = static_cast<std::size_t>(n);
    m.n_ = n;
    m.rptrs_.assign(un + 1, 0);
    m.cptrs_.assign(un + 1, 0);
    m.cids_.reserve(sorted.size());
    m.rvals_.reserve(sorted.size());
    for (const auto& e : sorted) {
        ++m.rptrs_[static_cast<std::size_t>(e.row) + 1];
        ++m.cptrs_[static_cast<std::size_t>(e.col) + 1];
        m.cids_.push_back(e.col);
        m.rvals_.push_back(e.value);
    }
    std::partial_sum(m.rptrs_.begin(), m.rptrs_.end(), m.rptrs_.begin());
    std::partial_sum(m.cptrs_.begin(), m.cptrs_.end(), m.cptrs_.begin());

    // Row-major traversal fills each column in increasing row order.
    m.rids_.resize(sorted.size());
    m.cvals_.resize(sorted.size());
    std::vector<Index> next(m.cptrs_.begin(), m.cptrs_.end() - 1);
    for (const auto& e : sorted) {
        const auto pos = static_cast<std::size_t>(next[static_cast<std::size_t>(e.col)]++);
        m.rids_[pos] = e.row;
        m.cvals_[pos] = e.value;
    }
    return m;
}

std::span<const Index> SparseMatrix::rowCols(Index i) const {
    return std::span<const Index>(cids_).subspan(static_cast<std::size_t>(rptrs_[i]),
                                                 static_cast<std::size_t>(rowDegree(i)));
}

std::span<const double> SparseMatrix::rowValues(Index i) const {
    return std::span<const double>(rvals_).subspan(static_cast<std::size_t>(rptrs_[i]),
                                                   static_cast<std::size_t>(rowDegree(i)));
}

std::span<const Index> SparseMatrix::colRows(Index j) const {
    return std::span<const Index>(rids_).subspan(static_cast<std::size_t>(cptrs_[j]),
                                                 static_cast<std::size_t>(colDegree(j)));
}

std::span<const double> SparseMatrix::colValues(Index j) const {
    return std::span<const double>(cvals_).subspan(static_cast<std::size_t>(cptrs_[j]),
                                                   static_cast<std::size_t>(colDegree(j)));
}

double SparseMatrix::at(Index i, Index j) const {
    auto cols = rowCols(i);
    auto it = std::lower_bound(cols.begin(), cols.end(), j);
    if (it == cols.end() || *it != j)
        return 0.0;
    return rowValues(i)[static_cast<std::size_t>(it - cols.begin())];
}

std::vector<Triplet> SparseMatrix::triplets() const {
    std::vector<Triplet> out;
    out.reserve(nnz());
    for (Index i = 0; i < n_; ++i) {
        auto cols = rowCols(i);
        auto vals = rowValues(i);
        for (std::size_t p = 0; p < cols.size(); ++p)
            out.push_back({i, cols[p], vals[p]});
    }
    return out;
}

SparseMatrix SparseMatrix::transposed() const {
    SparseMatrix t;
    t.n_ = n_;
    t.rptrs_ = cptrs_;
    t.cids_ = rids_;
    t.rvals_ = cvals_;
    t.cptrs_ = rptrs_;
    t.rids_ = cids_;
    t.cvals_ = rvals_;
    return t;
}

std::vector<double> SparseMatrix::toDense() const {
    const auto un = static_cast<std::size_t>(n_);
    std::vector<double> dense(un * un, 0.0);
    for (const auto& e : triplets())
        dense[static_cast<std::size_t>(e.row) * un + static_cast<std::size_t>(e.col)] = e.value;
    return dense;
}

SparseMatrix permute(const SparseMatrix& m, const Permutation& rowPerm, const Permutation& colPerm) {
    const Index n = m.dim();
    if (rowPerm.size() != n || colPerm.size() != n)
        throw Error("permutation size does not match matrix dimension " + std::to_string(n));
    const Permutation rowInv = rowPerm.inverse();
    const Permutation colInv = colPerm.inverse();
    std::vector<Triplet> entries = m.triplets();
    for (auto& e : entries) {
        e.row = rowInv[e.row];
        e.col = colInv[e.col];
    }
    return SparseMatrix::fromTriplets(n, entries);
}

Permutation degreeSortAscending(const SparseMatrix& m) {
    std::vector<Index> cols(static_cast<std::size_t>(m.dim()));
    std::iota(cols.begin(), cols.end(), Index{0});
    std::stable_sort(cols.begin(), cols.end(),
                     [&](Index a, Index b) { return m.colDegree(a) < m.colDegree(b); });
    return Permutation(std::move(cols));
}

namespace {

// Hopcroft-Karp over rows (left) and columns (right) using the CSR pattern.
class HopcroftKarp {
public:
    explicit HopcroftKarp(const SparseMatrix& m)
        : m_(m),
          n_(static_cast<std::size_t>(m.dim())),
          rowMate_(n_, -1),
          colMate_(n_, -1),
          level_(n_, kInf) {}

    std::vector<Index> run() {
        while (bfs()) {
            for (std::size_t r = 0; r < n_; ++r) {
                if (rowMate_[r] == -1)
                    dfs(static_cast<Index>(r));
            }
        }
        return rowMate_;
    }

private:
    static constexpr Index kInf = std::numeric_limits<Index>::max();

    bool bfs() {
        std::queue<Index> queue;
        for (std::size_t r = 0; r < n_; ++r) {
            if (rowMate_[r] == -1) {
                level_[r] = 0;
                queue.push(static_cast<Index>(r));
            } else {
                level_[r] = kInf;
            }
        }
        bool foundFree = false;
        while (!queue.empty()) {
            const Index r = queue.front();
            queue.pop();
            for (Index c : m_.rowCols(r)) {
                const Index mate = colMate_[static_cast<std::size_t>(c)];
                if (mate == -1) {
                    foundFree = true;
                } else if (level_[static_cast<std::size_t>(mate)] == kInf) {
                    level_[static_cast<std::size_t>(mate)] = level_[static_cast<std::size_t>(r)] + 1;
                    queue.push(mate);
                }
            }
        }
        return foundFree;
    }

    bool dfs(Index r) {
        for (Index c : m_.rowCols(r)) {
            const Index mate = colMate_[static_cast<std::size_t>(c)];
            if (mate == -1 || (level_[static_cast<std::size_t>(mate)] ==
                                   level_[static_cast<std::size_t>(r)] + 1 &&
                               dfs(mate))) {
                rowMate_[static_cast<std::size_t>(r)] = c;
                colMate_[static_cast<std::size_t>(c)] = r;
                return true;
            }
        }
        level_[static_cast<std::size_t>(r)] = kInf;
        return false;
    }

    const SparseMatrix& m_;
    std::size_t n_;
    std::vector<Index> rowMate_;
    std::vector<Index> colMate_;
    std::vector<Index> level_;
};

}  // namespace

std::vector<Index> maximumMatching(const SparseMatrix& m) { return HopcroftKarp(m).run(); }

Index structuralRank(const SparseMatrix& m) {
    const auto mates = maximumMatching(m);
    return static_cast<Index>(std::count_if(mates.begin(), mates.end(), [](Index c) { return c >= 0; }));
}

SparseMatrix readDense(std::istream& in) {
    long long n = -1;
    if (!(in >> n) || n < 0 || n > std::numeric_limits<Index>::max())
        throw Error("dense format: missing or invalid dimension");
    std::vector<Triplet> entries;
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            double v = 0.0;
            if (!(in >> v))
                throw Error("dense format: expected " + std::to_string(n * n) + " values");
            if (v != 0.0)
                entries.push_back({i, j, v});
        }
    }
    return SparseMatrix::fromTriplets(static_cast<Index>(n), entries);
}

SparseMatrix readDenseText(const std::string& text) {
    std::istringstream in(text);
    return readDense(in);
}

std::string writeDense(const SparseMatrix& m) {
    std::string out = std::to_string(m.dim()) + "\n";
    const auto dense = m.toDense();
    const auto n = static_cast<std::size_t>(m.dim());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (j)
                out += ' ';
            out += formatExact(dense[i * n + j]);
        }
        out += '\n';
    }
    return out;
}

std::string formatExact(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

}  // namespace spperm
