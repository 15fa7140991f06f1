#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "spperm/codegen.hpp"
#include "spperm/launch.hpp"

namespace spperm {

/// A warp lockstep step where live threads called more than one kernel.
struct DivergentStep {
    std::size_t launch = 0;
    std::uint64_t warp = 0;
    std::uint64_t localIteration = 0;  // 1-based position inside the chunk
    int distinct = 0;
};

struct DivergenceReport {
    /// distinct signed kernels per lockstep step -> number of such steps
    std::map<int, std::uint64_t> histogram;
    std::uint64_t totalSteps = 0;
    std::uint64_t divergentIterations = 0;
    /// Sum over steps of (distinct - 1).
    std::uint64_t serializationCost = 0;
    std::vector<DivergentStep> divergentSteps;

    void record(std::size_t launch, std::uint64_t warp, std::uint64_t local, int distinct, bool keepStep = true);
    void merge(const DivergenceReport& other);
};

struct LaunchStats {
    std::uint64_t liveThreads = 0;
    std::uint64_t minIterations = 0;
    std::uint64_t maxIterations = 0;
};

struct SimtOptions {
    int warpSize = 32;
    /// Worker threads over warps; the result is bitwise independent of it.
    int workers = 1;
    /// Keep the list of divergent steps (the histogram is always kept).
    bool recordSteps = true;
};

struct ExecutionResult {
    double permanent = 0.0;
    DivergenceReport report;
    std::uint64_t iterationsExecuted = 0;
    std::vector<LaunchStats> launches;
};

/// Runs every (launch, thread) chunk of `plan` through the program's kernels
/// in warp lockstep. Thread t of a launch keeps k register sums plus n - k
/// global slots laid out at nthreads * slot + t; its state starts from the
/// program's initial x with the inclusion kernels of the set bits of
/// grayCode(first - 1) applied. Partials are folded in launch/thread order.
ExecutionResult executeProgram(const GeneratedProgram& program, const LaunchPlan& plan, const SimtOptions& opts = {});

/// Kernel-call pattern of `tau` threads with consecutive chunks of `chunk`
/// iterations starting at 1, without arithmetic. Threads past 2^(n-1) - 1
/// are idle and not counted.
DivergenceReport divergenceOfSchedule(int n, std::uint64_t chunk, std::uint64_t tau, int warpSize = 32);

}  // namespace spperm
