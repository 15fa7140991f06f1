#include "spperm/ordering.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>

#include <json.hpp>

namespace spperm {

Ordering permanentOrdering(const SparseMatrix& m) {
    const Index n = m.dim();
    const auto un = static_cast<std::size_t>(n);
    std::vector<Index> cdeg(un);
    for (Index j = 0; j < n; ++j)
        cdeg[static_cast<std::size_t>(j)] = m.colDegree(j);
    std::vector<char> selected(un, 0);
    std::vector<char> rmark(un, 0);

    std::vector<Index> rowPerm;
    std::vector<Index> colPerm;
    rowPerm.reserve(un);
    colPerm.reserve(un);

    for (Index step = 0; step < n; ++step) {
        std::optional<Index> col;
        for (Index j = 0; j < n; ++j) {
            const auto uj = static_cast<std::size_t>(j);
            if (!selected[uj] && (!col || cdeg[uj] < cdeg[static_cast<std::size_t>(*col)]))
                col = j;
        }
        colPerm.push_back(*col);
        selected[static_cast<std::size_t>(*col)] = 1;

        for (Index row : m.colRows(*col)) {
            const auto ur = static_cast<std::size_t>(row);
            if (rmark[ur])
                continue;
            rmark[ur] = 1;
            rowPerm.push_back(row);
            for (Index other : m.rowCols(row))
                --cdeg[static_cast<std::size_t>(other)];
        }
    }
    for (Index i = 0; i < n; ++i)
        if (!rmark[static_cast<std::size_t>(i)])
            rowPerm.push_back(i);

    return {Permutation(std::move(rowPerm)), Permutation(std::move(colPerm))};
}

void GpuModel::validate() const {
    if (regsPerSM <= 0 || numSMs <= 0 || maxThreadsPerSM <= 0 || maxRegsPerThread <= 0 ||
        overheadRegsPerThread <= 0 || warpSize <= 0 || !(grRatio > 0.0))
        throw Error("GPU model: all parameters must be positive");
    if (overheadRegsPerThread >= maxRegsPerThread)
        throw Error("GPU model: overhead registers must be below maxRegsPerThread");
}

GpuModel GpuModel::fromJson(const std::string& text) {
    GpuModel g;
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("GPU model: ") + e.what());
    }
    if (!j.is_object())
        throw Error("GPU model: expected a JSON object");
    auto read = [&](const char* key, auto& field) {
        if (j.contains(key))
            field = j.at(key).get<std::remove_reference_t<decltype(field)>>();
    };
    try {
        read("regsPerSM", g.regsPerSM);
        read("numSMs", g.numSMs);
        read("maxThreadsPerSM", g.maxThreadsPerSM);
        read("maxRegsPerThread", g.maxRegsPerThread);
        read("overheadRegsPerThread", g.overheadRegsPerThread);
        read("warpSize", g.warpSize);
        read("grRatio", g.grRatio);
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("GPU model: ") + e.what());
    }
    g.validate();
    return g;
}

GpuModel GpuModel::fromFile(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open GPU model " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return fromJson(ss.str());
}

std::string GpuModel::toJson() const {
    nlohmann::json j{{"regsPerSM", regsPerSM},
                     {"numSMs", numSMs},
                     {"maxThreadsPerSM", maxThreadsPerSM},
                     {"maxRegsPerThread", maxRegsPerThread},
                     {"overheadRegsPerThread", overheadRegsPerThread},
                     {"warpSize", warpSize},
                     {"grRatio", grRatio}};
    return j.dump();
}

std::int64_t calculateNoThreads(std::int64_t nregisters, const GpuModel& gpu) {
    if (nregisters < 0)
        throw Error("register count must be non-negative");
    const std::int64_t perThread = nregisters + gpu.overheadRegsPerThread;
    if (perThread > gpu.maxRegsPerThread)
        return 0;
    const std::int64_t warps = gpu.regsPerSM / perThread / gpu.warpSize;
    return gpu.numSMs * std::min(gpu.maxThreadsPerSM, gpu.warpSize * warps);
}

Partition partition(const SparseMatrix& m, const GpuModel& gpu) {
    gpu.validate();
    const Index n = m.dim();
    Partition part;
    Index nrows = 0;
    for (Index j = 0; j < n; ++j) {
        auto rows = m.colRows(j);
        if (!rows.empty())
            nrows = std::max(nrows, rows.back() + 1);

        ColumnScore s;
        s.column = j;
        s.nrows = nrows;
        s.nregisters = 2 * static_cast<std::int64_t>(nrows);
        const double untouched = std::ldexp(1.0, -(j + 1));
        s.regCost = static_cast<double>(s.nregisters) * (1.0 - untouched);
        s.globCost = static_cast<double>(n - nrows) * untouched * gpu.grRatio;
        s.tau = calculateNoThreads(s.nregisters, gpu);
        const double cost = s.regCost + s.globCost;
        s.score = cost > 0.0 ? static_cast<double>(s.tau) / cost : 0.0;

        if (s.score > part.bestScore || nrows == part.k) {
            part.bestScore = s.score;
            part.k = nrows;
            part.c = j + 1;
            s.accepted = true;
        }
        part.columns.push_back(s);
    }
    return part;
}

bool partitionRegionHolds(const SparseMatrix& m, Index k, Index c) {
    for (Index j = 0; j < std::min(c, m.dim()); ++j) {
        auto rows = m.colRows(j);
        if (!rows.empty() && rows.back() >= k)
            return false;
    }
    return true;
}

}  // namespace spperm
