#include "spperm/launch.hpp"

#include <algorithm>
#include <bit>
#include <string>

#include "spperm/matrix.hpp"

namespace spperm {

LaunchPlan generateLaunchParameters(std::uint64_t tau, int n, std::uint64_t minChunk) {
    if (tau < 1)
        throw Error("launch planning needs tau >= 1");
    if (n < 2 || n > 63)
        throw Error("launch planning needs 2 <= n <= 63, got " + std::to_string(n));
    if (minChunk < 2 || !std::has_single_bit(minChunk))
        throw Error("minimum chunk must be a power of two >= 2");

    LaunchPlan plan;
    plan.tau = tau;
    plan.n = n;
    std::uint64_t start = 1;
    const std::uint64_t end = std::uint64_t{1} << (n - 1);
    while (end > start) {
        // delta * tau <= end - start, written to avoid overflow.
        const std::uint64_t fit = (end - start) / tau;
        std::uint64_t delta = minChunk;
        while (delta <= fit)
            delta *= 2;
        delta /= 2;

        if (delta == minChunk / 2) {
            plan.specs.push_back({start, minChunk, end});
            break;
        }
        plan.specs.push_back({start, delta, end});
        start += tau * delta;
    }
    return plan;
}

std::optional<IterationRange> chunkOf(const LaunchPlan& plan, std::size_t launchIdx, std::uint64_t threadIdx) {
    if (launchIdx >= plan.specs.size() || threadIdx >= plan.tau)
        throw Error("chunkOf: launch or thread index out of range");
    const LaunchSpec& spec = plan.specs[launchIdx];
    const std::uint64_t last = plan.lastIteration();
    const std::uint64_t first = spec.start + threadIdx * spec.delta;
    if (first > last)
        return std::nullopt;
    return IterationRange{first, std::min(first + spec.delta - 1, last)};
}

}  // namespace spperm
