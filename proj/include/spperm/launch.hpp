#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace spperm {

/// One kernel launch: every thread t walks `delta` iterations starting at
/// start + t * delta. `end` is the exclusive bound 2^(n-1).
struct LaunchSpec {
    std::uint64_t start = 1;
    std::uint64_t delta = 1024;
    std::uint64_t end = 0;

    friend bool operator==(const LaunchSpec&, const LaunchSpec&) = default;
};

struct LaunchPlan {
    std::vector<LaunchSpec> specs;
    std::uint64_t tau = 0;
    int n = 0;

    /// Last valid iteration index, 2^(n-1) - 1.
    std::uint64_t lastIteration() const { return (std::uint64_t{1} << (n - 1)) - 1; }
};

/// Inclusive range of iterations a thread executes.
struct IterationRange {
    std::uint64_t first = 0;
    std::uint64_t last = 0;

    std::uint64_t size() const { return last - first + 1; }
    friend bool operator==(const IterationRange&, const IterationRange&) = default;
};

/// Power-of-two chunking of [1, 2^(n-1)). Each launch takes the largest
/// power of two delta >= minChunk with delta * tau fitting in what is left;
/// once no such delta exists a final launch with delta = minChunk covers the
/// tail, leaving trailing threads idle. minChunk must be a power of two >= 2.
LaunchPlan generateLaunchParameters(std::uint64_t tau, int n, std::uint64_t minChunk = 1024);

/// Iterations of thread `threadIdx` in launch `launchIdx`, clipped to
/// 2^(n-1) - 1; empty for threads that start past the end.
std::optional<IterationRange> chunkOf(const LaunchPlan& plan, std::size_t launchIdx, std::uint64_t threadIdx);

}  // namespace spperm
