#include "spperm/permanent.hpp"

#include <algorithm>
#include <bit>
#include <thread>

#include "spperm/graycode.hpp"

namespace spperm {

RowSums::RowSums(std::vector<double> x) : x_(std::move(x)) {
    zeros_ = static_cast<Index>(std::count(x_.begin(), x_.end(), 0.0));
}

double RowSums::product() const {
    double p = 1.0;
    for (double v : x_)
        p *= v;
    return p;
}

namespace {

void requireDimension(const SparseMatrix& m, Index cap, const char* what) {
    if (m.dim() > cap)
        throw Error(std::string(what) + ": n=" + std::to_string(m.dim()) + " exceeds the cap of " +
                    std::to_string(cap));
}

struct NaiveWalker {
    const SparseMatrix& m;
    std::vector<char> used;

    double walk(Index row, double prefix) {
        if (row == m.dim())
            return prefix;
        double sum = 0.0;
        auto cols = m.rowCols(row);
        auto vals = m.rowValues(row);
        for (std::size_t p = 0; p < cols.size(); ++p) {
            auto c = static_cast<std::size_t>(cols[p]);
            if (used[c])
                continue;
            used[c] = 1;
            sum += walk(row + 1, prefix * vals[p]);
            used[c] = 0;
        }
        return sum;
    }
};

std::uint64_t lastIteration(Index n) { return n == 0 ? 0 : (std::uint64_t{1} << (n - 1)) - 1; }

struct ChunkOutcome {
    double partial;
    std::uint64_t skipped;
};

// Iterations [gStart, gEnd] of the Gray-code walk, starting from x.
ChunkOutcome walkChunk(const SparseMatrix& m, RowSums& x, std::uint64_t gStart, std::uint64_t gEnd,
                       double partial, bool zeroSkip) {
    std::uint64_t skipped = 0;
    std::uint64_t prevGray = grayCode(gStart - 1);
    for (std::uint64_t g = gStart; g <= gEnd; ++g) {
        const std::uint64_t gray = grayCode(g);
        const int j = std::countr_zero(gray ^ prevGray);
        const double s = ((gray >> j) & 1U) ? 1.0 : -1.0;
        prevGray = gray;

        auto rows = m.colRows(j);
        auto vals = m.colValues(j);
        for (std::size_t p = 0; p < rows.size(); ++p)
            x.add(rows[p], s * vals[p]);

        if (zeroSkip && x.zeroCount() > 0) {
            ++skipped;
            continue;
        }
        const double prod = x.product();
        if (g & 1U)
            partial -= prod;
        else
            partial += prod;
    }
    return {partial, skipped};
}

}  // namespace

double naivePermanent(const SparseMatrix& m) {
    requireDimension(m, 13, "naivePermanent");
    if (m.dim() == 0)
        return 1.0;
    NaiveWalker w{m, std::vector<char>(static_cast<std::size_t>(m.dim()), 0)};
    return w.walk(0, 1.0);
}

double ryserPermanent(const SparseMatrix& m) {
    requireDimension(m, 30, "ryserPermanent");
    const Index n = m.dim();
    const auto un = static_cast<std::size_t>(n);
    const auto dense = m.toDense();
    std::vector<std::size_t> members;
    members.reserve(un);
    double total = 0.0;
    for (std::uint64_t subset = 0; subset < (std::uint64_t{1} << n); ++subset) {
        members.clear();
        for (std::size_t j = 0; j < un; ++j)
            if ((subset >> j) & 1U)
                members.push_back(j);
        double prod = 1.0;
        for (std::size_t i = 0; i < un && prod != 0.0; ++i) {
            double rowSum = 0.0;
            for (std::size_t j : members)
                rowSum += dense[i * un + j];
            prod *= rowSum;
        }
        if (members.size() % 2)
            total -= prod;
        else
            total += prod;
    }
    return (n % 2) ? -total : total;
}

RowSums initRowSums(const SparseMatrix& m) {
    const Index n = m.dim();
    std::vector<double> x(static_cast<std::size_t>(n), 0.0);
    for (Index i = 0; i < n; ++i) {
        double sum = 0.0;
        for (double v : m.rowValues(i))
            sum += v;
        auto cols = m.rowCols(i);
        const double last = (!cols.empty() && cols.back() == n - 1) ? m.rowValues(i).back() : 0.0;
        x[static_cast<std::size_t>(i)] = last - sum / 2.0;
    }
    return RowSums(std::move(x));
}

RowSums initThreadState(const SparseMatrix& m, const RowSums& base, std::uint64_t gStart) {
    if (gStart < 1)
        throw Error("initThreadState: gStart must be >= 1");
    RowSums x = base;
    std::uint64_t bits = grayCode(gStart - 1);
    while (bits) {
        const int j = std::countr_zero(bits);
        bits &= bits - 1;
        if (j >= m.dim())
            throw Error("initThreadState: gStart beyond the iteration space");
        auto rows = m.colRows(j);
        auto vals = m.colValues(j);
        for (std::size_t p = 0; p < rows.size(); ++p)
            x.add(rows[p], vals[p]);
    }
    return x;
}

namespace {

// Applies the degree-sort option; returns m itself when no reordering is requested.
SparseMatrix prepare(const SparseMatrix& m, const SparseOptions& opts) {
    if (!opts.degreeSort)
        return m;
    return permute(m, Permutation::identity(m.dim()), degreeSortAscending(m));
}

}  // namespace

PermanentResult sparsePermanent(const SparseMatrix& input, const SparseOptions& opts) {
    requireDimension(input, std::min<Index>(opts.maxDimension, 63), "sparsePermanent");
    if (input.dim() == 0)
        return {1.0, 0, 0, false};
    if (opts.rankShortcut && structuralRank(input) < input.dim())
        return {0.0, 0, 0, true};

    const SparseMatrix m = prepare(input, opts);
    const Index n = m.dim();
    RowSums x = initRowSums(m);
    const std::uint64_t last = lastIteration(n);
    const auto out = walkChunk(m, x, 1, last, x.product(), opts.zeroSkip);
    return {out.partial * permanentScale(n), last, out.skipped, false};
}

std::vector<ThreadChunk> sparsePermanentChunks(const SparseMatrix& input, int threads, const SparseOptions& opts) {
    if (threads < 1)
        throw Error("thread count must be >= 1");
    requireDimension(input, std::min<Index>(opts.maxDimension, 63), "parallelSparsePermanent");
    const SparseMatrix m = prepare(input, opts);
    const Index n = m.dim();
    const RowSums base = initRowSums(m);
    const std::uint64_t last = lastIteration(n);
    const auto tau = static_cast<std::uint64_t>(threads);
    const std::uint64_t delta = (last + tau - 1) / tau;

    std::vector<ThreadChunk> chunks;
    if (last == 0) {
        chunks.push_back({1, 0, base, base.product(), 0});
        return chunks;
    }
    for (std::uint64_t t = 0; t < tau; ++t) {
        const std::uint64_t start = t * delta + 1;
        if (start > last)
            break;
        ThreadChunk c;
        c.gStart = start;
        c.gEnd = std::min(last, start + delta - 1);
        c.initialX = initThreadState(m, base, start);
        c.partialSum = (t == 0) ? base.product() : 0.0;
        chunks.push_back(std::move(c));
    }

    {
        std::vector<std::jthread> workers;
        workers.reserve(chunks.size());
        for (auto& c : chunks) {
            workers.emplace_back([&m, &c, zeroSkip = opts.zeroSkip] {
                RowSums x = c.initialX;
                const auto out = walkChunk(m, x, c.gStart, c.gEnd, c.partialSum, zeroSkip);
                c.partialSum = out.partial;
                c.skipped = out.skipped;
            });
        }
    }
    return chunks;
}

double reduceChunks(Index n, std::span<const ThreadChunk> chunks) {
    double p = 0.0;
    for (const auto& c : chunks)
        p += c.partialSum;
    return p * permanentScale(n);
}

PermanentResult parallelSparsePermanent(const SparseMatrix& m, int threads, const SparseOptions& opts) {
    if (threads < 1)
        throw Error("thread count must be >= 1");
    if (m.dim() == 0)
        return {1.0, 0, 0, false};
    if (opts.rankShortcut && structuralRank(m) < m.dim())
        return {0.0, 0, 0, true};
    const auto chunks = sparsePermanentChunks(m, threads, opts);
    PermanentResult r;
    r.value = reduceChunks(m.dim(), chunks);
    for (const auto& c : chunks) {
        r.iterations += c.gEnd + 1 - c.gStart;
        r.skipped += c.skipped;
    }
    return r;
}

}  // namespace spperm
