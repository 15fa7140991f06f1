#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "spperm/codegen.hpp"
#include "spperm/launch.hpp"
#include "spperm/ordering.hpp"
#include "spperm/simt.hpp"

namespace spperm {

/// Error tagged with the pipeline stage that raised it.
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& what) : Error(stage + ": " + what), stage_(std::move(stage)) {}
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

struct AutoConfig {
    GpuModel gpu;
    /// Thread count for the launch plan; defaults to the model's estimate.
    std::optional<std::uint64_t> tau;
    std::uint64_t minChunk = 1024;
    int warpSize = 32;
    int workers = 1;
};

struct AutoReport {
    double permanent = 0.0;
    Index n = 0;
    std::size_t nnz = 0;
    bool structurallySingular = false;
    std::string note;
    Partition partition;
    std::int64_t nregisters = 0;
    std::uint64_t tau = 0;
    LaunchPlan plan;
    DivergenceReport divergence;
    std::uint64_t iterations = 0;
    double overheadSeconds = 0.0;  // ordering + partitioning + code generation
    double executionSeconds = 0.0;
};

/// Order, partition, generate hybrid kernels, plan launches and execute them
/// on the simulator. Failures are rethrown as StageError.
AutoReport runPipeline(const SparseMatrix& m, const AutoConfig& config = {});

}  // namespace spperm
