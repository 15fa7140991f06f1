#include "spperm/simt.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <thread>

namespace spperm {

void DivergenceReport::record(std::size_t launch, std::uint64_t warp, std::uint64_t local, int distinct,
                              bool keepStep) {
    ++histogram[distinct];
    ++totalSteps;
    if (distinct >= 2) {
        ++divergentIterations;
        serializationCost += static_cast<std::uint64_t>(distinct - 1);
        if (keepStep)
            divergentSteps.push_back({launch, warp, local, distinct});
    }
}

void DivergenceReport::merge(const DivergenceReport& other) {
    for (const auto& [distinct, count] : other.histogram)
        histogram[distinct] += count;
    totalSteps += other.totalSteps;
    divergentIterations += other.divergentIterations;
    serializationCost += other.serializationCost;
    divergentSteps.insert(divergentSteps.end(), other.divergentSteps.begin(), other.divergentSteps.end());
}

namespace {

// Set of signed kernel ids (< 128) seen in one lockstep step.
class KernelSet {
public:
    void clear() { bits_[0] = bits_[1] = 0; }
    void insert(int id) { bits_[id >> 6] |= std::uint64_t{1} << (id & 63); }
    int size() const { return std::popcount(bits_[0]) + std::popcount(bits_[1]); }

private:
    std::uint64_t bits_[2] = {0, 0};
};

std::uint64_t lastIteration(int n) { return (std::uint64_t{1} << (n - 1)) - 1; }

std::uint64_t liveThreadCount(std::uint64_t start, std::uint64_t delta, std::uint64_t tau, std::uint64_t last) {
    if (start > last)
        return 0;
    return std::min(tau, (last - start) / delta + 1);
}

// Per-launch thread state; thread t owns regs[t*k .. t*k+k) and global
// slots at nthreads * slot + t.
struct LaunchState {
    const GeneratedProgram& program;
    std::uint64_t nthreads;
    std::vector<double> regs;
    std::vector<double> global;
    std::vector<double> globalProduct;
    std::vector<double> partial;
    std::vector<std::uint64_t> executed;

    LaunchState(const GeneratedProgram& p, std::uint64_t live)
        : program(p),
          nthreads(live),
          regs(static_cast<std::size_t>(live) * static_cast<std::size_t>(p.k)),
          global(static_cast<std::size_t>(live) * static_cast<std::size_t>(p.globalSlots())),
          globalProduct(live, 1.0),
          partial(live, 0.0),
          executed(live, 0) {}

    double* threadRegs(std::uint64_t t) { return regs.data() + t * static_cast<std::uint64_t>(program.k); }
    double& slot(std::uint64_t t, Index s) { return global[nthreads * static_cast<std::uint64_t>(s) + t]; }

    void recomputeGlobalProduct(std::uint64_t t) {
        double gp = 1.0;
        for (Index s = 0; s < program.globalSlots(); ++s)
            gp *= slot(t, s);
        globalProduct[t] = gp;
    }

    // Applies the kernel's updates and returns the x product it reduces.
    double apply(std::uint64_t t, const KernelIR& kernel) {
        const double sign = static_cast<double>(kernel.sign);
        double* r = threadRegs(t);
        for (const auto& op : kernel.regOps)
            r[op.reg] += sign * op.value;
        if (kernel.touchesGlobal) {
            for (const auto& op : kernel.globOps)
                slot(t, op.slot) += sign * op.value;
            recomputeGlobalProduct(t);
        }
        double product = 1.0;
        for (Index i = 0; i < program.k; ++i)
            product *= r[i];
        if (program.mode == CodegenMode::hybrid)
            product *= globalProduct[t];
        return product;
    }

    void init(std::uint64_t t, std::uint64_t first) {
        double* r = threadRegs(t);
        for (Index i = 0; i < program.k; ++i)
            r[i] = program.initialX[i];
        for (Index s = 0; s < program.globalSlots(); ++s)
            slot(t, s) = program.initialX[program.k + s];
        std::uint64_t bits = grayCode(first - 1);
        while (bits) {
            const int j = std::countr_zero(bits);
            bits &= bits - 1;
            const KernelIR& inc = program.kernels[static_cast<std::size_t>(2 * j)];
            for (const auto& op : inc.regOps)
                r[op.reg] += op.value;
            for (const auto& op : inc.globOps)
                slot(t, op.slot) += op.value;
        }
        recomputeGlobalProduct(t);
    }
};

// Runs one warp of a launch in lockstep.
void runWarp(LaunchState& state, const LaunchSpec& spec, std::size_t launchIdx, std::uint64_t warp,
             std::uint64_t warpSize, std::uint64_t last, bool recordSteps, DivergenceReport& report) {
    const std::uint64_t t0 = warp * warpSize;
    const std::uint64_t t1 = std::min(t0 + warpSize, state.nthreads);
    for (std::uint64_t t = t0; t < t1; ++t)
        state.init(t, spec.start + t * spec.delta);

    KernelSet kernels;
    for (std::uint64_t local = 1; local <= spec.delta; ++local) {
        kernels.clear();
        int live = 0;
        for (std::uint64_t t = t0; t < t1; ++t) {
            const std::uint64_t g = spec.start + t * spec.delta + local - 1;
            if (g > last)
                continue;
            ++live;
            const ScbsEntry e = scbsEntry(g);
            kernels.insert(e.kernelId());
            const double product = state.apply(t, state.program.kernel(e));
            if (g & 1U)
                state.partial[t] -= product;
            else
                state.partial[t] += product;
            ++state.executed[t];
        }
        if (live == 0)
            break;
        report.record(launchIdx, warp, local, kernels.size(), recordSteps);
    }
}

}  // namespace

ExecutionResult executeProgram(const GeneratedProgram& program, const LaunchPlan& plan, const SimtOptions& opts) {
    if (plan.n != program.n)
        throw Error("launch plan is for n=" + std::to_string(plan.n) + " but the program has n=" +
                    std::to_string(program.n));
    if (program.n < 2 || program.n > 63)
        throw Error("simulation needs 2 <= n <= 63");
    if (program.kernels.size() != 2 * static_cast<std::size_t>(program.n - 1))
        throw Error("program does not hold 2*(n-1) kernels");
    if (opts.warpSize < 1 || opts.workers < 1)
        throw Error("warp size and worker count must be positive");

    const std::uint64_t last = lastIteration(program.n);
    const auto warpSize = static_cast<std::uint64_t>(opts.warpSize);

    // Base term: product of the initial row sums, reduced like the kernels do.
    double total = 1.0;
    for (Index i = 0; i < program.k; ++i)
        total *= program.initialX[i];
    if (program.mode == CodegenMode::hybrid) {
        double gp = 1.0;
        for (Index s = 0; s < program.globalSlots(); ++s)
            gp *= program.initialX[program.k + s];
        total *= gp;
    }

    ExecutionResult result;
    for (std::size_t launchIdx = 0; launchIdx < plan.specs.size(); ++launchIdx) {
        const LaunchSpec& spec = plan.specs[launchIdx];
        const std::uint64_t live = liveThreadCount(spec.start, spec.delta, plan.tau, last);
        LaunchStats stats;
        stats.liveThreads = live;
        if (live == 0) {
            result.launches.push_back(stats);
            continue;
        }

        LaunchState state(program, live);
        const std::uint64_t warps = (live + warpSize - 1) / warpSize;
        std::vector<DivergenceReport> reports(warps);

        const auto workers = std::min<std::uint64_t>(static_cast<std::uint64_t>(opts.workers), warps);
        if (workers <= 1) {
            for (std::uint64_t w = 0; w < warps; ++w)
                runWarp(state, spec, launchIdx, w, warpSize, last, opts.recordSteps, reports[w]);
        } else {
            std::atomic<std::uint64_t> next{0};
            std::vector<std::jthread> pool;
            for (std::uint64_t i = 0; i < workers; ++i) {
                pool.emplace_back([&] {
                    for (std::uint64_t w = next++; w < warps; w = next++)
                        runWarp(state, spec, launchIdx, w, warpSize, last, opts.recordSteps, reports[w]);
                });
            }
        }

        for (const auto& r : reports)
            result.report.merge(r);
        for (std::uint64_t t = 0; t < live; ++t)
            total += state.partial[t];
        stats.minIterations = *std::min_element(state.executed.begin(), state.executed.end());
        stats.maxIterations = *std::max_element(state.executed.begin(), state.executed.end());
        for (auto e : state.executed)
            result.iterationsExecuted += e;
        result.launches.push_back(stats);
    }
    result.permanent = total * permanentScale(program.n);
    return result;
}

DivergenceReport divergenceOfSchedule(int n, std::uint64_t chunk, std::uint64_t tau, int warpSize) {
    if (n < 2 || n > 63)
        throw Error("divergence analysis needs 2 <= n <= 63");
    if (chunk < 1 || tau < 1 || warpSize < 1)
        throw Error("chunk, tau and warp size must be positive");
    const std::uint64_t last = lastIteration(n);
    const std::uint64_t live = liveThreadCount(1, chunk, tau, last);
    const auto ws = static_cast<std::uint64_t>(warpSize);

    DivergenceReport report;
    KernelSet kernels;
    for (std::uint64_t warp = 0; warp * ws < live; ++warp) {
        const std::uint64_t t1 = std::min(warp * ws + ws, live);
        for (std::uint64_t local = 1; local <= chunk; ++local) {
            kernels.clear();
            int count = 0;
            for (std::uint64_t t = warp * ws; t < t1; ++t) {
                const std::uint64_t g = 1 + t * chunk + local - 1;
                if (g > last)
                    continue;
                kernels.insert(scbsEntry(g).kernelId());
                ++count;
            }
            if (count == 0)
                break;
            report.record(0, warp, local, kernels.size());
        }
    }
    return report;
}

}  // namespace spperm
