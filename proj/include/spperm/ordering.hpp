#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spperm/matrix.hpp"

namespace spperm {

struct Ordering {
    Permutation rows;
    Permutation cols;
};

/// Greedy row/column ordering that pushes nonzeros of early columns into
/// early rows. Each step picks the unselected column with the fewest
/// nonzeros on not-yet-ordered rows (lowest index on ties), then orders its
/// untouched rows in CSC order. Rows never reached go last, in original order.
Ordering permanentOrdering(const SparseMatrix& m);

/// Register-file model standing in for an occupancy calculator.
/// Defaults describe an A100.
struct GpuModel {
    std::int64_t regsPerSM = 65536;
    std::int64_t numSMs = 108;
    std::int64_t maxThreadsPerSM = 2048;
    std::int64_t maxRegsPerThread = 255;
    std::int64_t overheadRegsPerThread = 32;
    std::int64_t warpSize = 32;
    double grRatio = 16.0;

    /// Throws Error unless all fields are positive and overhead < maxRegsPerThread.
    void validate() const;

    static GpuModel fromJson(const std::string& text);
    static GpuModel fromFile(const std::string& path);
    std::string toJson() const;
};

/// Resident threads across the device when each thread keeps `nregisters`
/// 32-bit registers for x on top of the fixed overhead:
/// numSMs * min(maxThreadsPerSM, warpSize * floor(regsPerSM / (nregisters + overhead) / warpSize)),
/// or 0 when the per-thread total exceeds maxRegsPerThread.
std::int64_t calculateNoThreads(std::int64_t nregisters, const GpuModel& gpu);

struct ColumnScore {
    Index column = 0;
    Index nrows = 0;
    std::int64_t nregisters = 0;
    double regCost = 0.0;
    double globCost = 0.0;
    std::int64_t tau = 0;
    double score = 0.0;
    bool accepted = false;
};

/// Split of an ordered matrix: x[0..k) live in registers and columns
/// [0, c) only touch those rows.
struct Partition {
    Index k = 0;
    Index c = 0;
    double bestScore = 0.0;
    std::vector<ColumnScore> columns;

    std::int64_t nregisters() const { return 2 * static_cast<std::int64_t>(k); }
};

/// Column scan scoring tau / (regCost + globCost) for each prefix of
/// columns; a column is taken when it beats the best score so far or adds
/// no new rows.
Partition partition(const SparseMatrix& ordered, const GpuModel& gpu = {});

/// True when no nonzero lies in a column < c and a row >= k.
bool partitionRegionHolds(const SparseMatrix& m, Index k, Index c);

}  // namespace spperm
