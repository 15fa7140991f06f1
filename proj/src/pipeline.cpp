#include "spperm/pipeline.hpp"

#include <chrono>

namespace spperm {

namespace {

template <class F>
auto stage(const char* name, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(name, e.what());
    }
}

double secondsSince(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

AutoReport runPipeline(const SparseMatrix& m, const AutoConfig& config) {
    AutoReport report;
    report.n = m.dim();
    report.nnz = m.nnz();

    stage("config", [&] { config.gpu.validate(); });
    if (m.dim() < 2) {
        report.permanent = m.dim() == 0 ? 1.0 : m.at(0, 0);
        report.note = "dimension below 2; permanent read directly";
        return report;
    }
    if (m.dim() > 63)
        throw StageError("input", "dimension " + std::to_string(m.dim()) + " is beyond the 64-bit iteration space");
    if (structuralRank(m) < m.dim()) {
        report.structurallySingular = true;
        report.note = "structurally singular: no perfect matching exists, so the permanent is 0";
        return report;
    }

    const auto t0 = std::chrono::steady_clock::now();
    const Ordering ord = stage("order", [&] { return permanentOrdering(m); });
    const SparseMatrix ordered = stage("order", [&] { return permute(m, ord.rows, ord.cols); });
    report.partition = stage("partition", [&] { return partition(ordered, config.gpu); });
    const GeneratedProgram program = stage("codegen", [&] {
        return buildProgram(ordered, report.partition, CodegenMode::hybrid, config.gpu);
    });
    report.overheadSeconds = secondsSince(t0);

    report.nregisters = registerBudget(program);
    report.tau = config.tau ? *config.tau
                            : static_cast<std::uint64_t>(calculateNoThreads(report.nregisters, config.gpu));
    if (report.tau == 0)
        throw StageError("plan", "the GPU model admits no threads at " + std::to_string(report.nregisters) +
                                     " registers per thread");
    report.plan = stage("plan", [&] { return generateLaunchParameters(report.tau, m.dim(), config.minChunk); });

    const auto t1 = std::chrono::steady_clock::now();
    SimtOptions opts;
    opts.warpSize = config.warpSize;
    opts.workers = config.workers;
    opts.recordSteps = false;
    const ExecutionResult exec = stage("simulate", [&] { return executeProgram(program, report.plan, opts); });
    report.executionSeconds = secondsSince(t1);
    report.permanent = exec.permanent;
    report.divergence = exec.report;
    report.iterations = exec.iterationsExecuted;
    return report;
}

}  // namespace spperm
