// spperm command-line driver. Every report is one JSON object per line.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include "spperm/codegen.hpp"
#include "spperm/generate.hpp"
#include "spperm/graycode.hpp"
#include "spperm/launch.hpp"
#include "spperm/matrix_market.hpp"
#include "spperm/ordering.hpp"
#include "spperm/permanent.hpp"
#include "spperm/pipeline.hpp"
#include "spperm/simt.hpp"

using nlohmann::json;
using namespace spperm;

namespace {

constexpr const char* kGpuEnv = "SPPERM_GPU_MODEL";

void emit(const json& j) { std::cout << j.dump() << '\n'; }

double secondsSince(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void writeText(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot open " + path + " for writing");
    out << text;
    if (!out)
        throw Error("failed writing " + path);
}

// --gpu wins, then the environment variable, then the built-in A100 model.
GpuModel loadGpu(const std::string& path) {
    if (!path.empty())
        return GpuModel::fromFile(path);
    if (const char* env = std::getenv(kGpuEnv); env && *env)
        return GpuModel::fromFile(env);
    return GpuModel{};
}

json histogramJson(const DivergenceReport& r) {
    json h = json::object();
    for (const auto& [distinct, count] : r.histogram)
        h[std::to_string(distinct)] = count;
    return h;
}

json divergenceJson(const DivergenceReport& r) {
    return {{"totalSteps", r.totalSteps},
            {"divergentIterations", r.divergentIterations},
            {"serializationCost", r.serializationCost},
            {"histogram", histogramJson(r)}};
}

json planJson(const LaunchPlan& plan) {
    json specs = json::array();
    for (const auto& s : plan.specs)
        specs.push_back({{"start", s.start}, {"delta", s.delta}, {"end", s.end}});
    return specs;
}

json permJson(const Permutation& p) { return json(std::vector<Index>(p.map().begin(), p.map().end())); }

struct Options {
    std::string input;
    bool patternAsOnes = false;
    std::string engine = "sparse";
    int threads = 1;
    bool zeroSkip = false;
    bool degreeSort = false;
    Index n = 0;
    double p = 0.0;
    std::uint64_t seed = 0;
    int seeds = 1;
    std::string out;
    std::string perms;
    std::string gpu;
    std::string mode = "hybrid";
    std::string ir;
    std::uint64_t tau = 0;
    std::uint64_t chunk = 0;
    std::uint64_t minChunk = 1024;
    int warp = 32;
    int workers = 1;
    int bits = 0;
    bool closedForm = false;
    bool recursive = false;
};

SparseMatrix loadInput(const Options& o) { return readMatrixFile(o.input, MatrixMarketOptions{o.patternAsOnes}); }

void cmdCompute(const Options& o) {
    const SparseMatrix m = loadInput(o);
    SparseOptions opts;
    opts.zeroSkip = o.zeroSkip;
    opts.degreeSort = o.degreeSort;
    const auto t0 = std::chrono::steady_clock::now();
    PermanentResult r;
    if (o.engine == "naive") {
        r.value = naivePermanent(m);
    } else if (o.engine == "ryser") {
        r.value = ryserPermanent(m);
        r.iterations = std::uint64_t{1} << m.dim();
    } else if (o.engine == "sparse") {
        r = sparsePermanent(m, opts);
    } else if (o.engine == "parallel") {
        r = parallelSparsePermanent(m, o.threads, opts);
    } else {
        throw Error("unknown engine '" + o.engine + "'");
    }
    emit({{"command", "compute"},
          {"engine", o.engine},
          {"n", m.dim()},
          {"nnz", m.nnz()},
          {"permanent", r.value},
          {"iterations", r.iterations},
          {"skipped", r.skipped},
          {"structurallySingular", r.structurallySingular},
          {"wallTime", secondsSince(t0)}});
}

void cmdGenMatrix(const Options& o) {
    int attempts = 0;
    const SparseMatrix m = generateErdosRenyi({o.n, o.p, o.seed}, &attempts);
    if (o.out.empty())
        throw Error("--out is required");
    writeMatrixMarketFile(o.out, m);
    emit({{"command", "gen-matrix"},
          {"n", m.dim()},
          {"nnz", m.nnz()},
          {"seed", o.seed},
          {"attempts", attempts},
          {"out", o.out}});
}

void cmdOrder(const Options& o) {
    const SparseMatrix m = loadInput(o);
    const Ordering ord = permanentOrdering(m);
    const SparseMatrix ordered = permute(m, ord.rows, ord.cols);
    if (!o.out.empty())
        writeMatrixMarketFile(o.out, ordered);
    const json perms = {{"rowPerm", permJson(ord.rows)}, {"colPerm", permJson(ord.cols)}};
    if (!o.perms.empty())
        writeText(o.perms, perms.dump(2) + "\n");
    json report = {{"command", "order"}, {"n", m.dim()}, {"nnz", m.nnz()}};
    report.update(perms);
    if (!o.out.empty())
        report["out"] = o.out;
    emit(report);
}

void cmdPartition(const Options& o) {
    const SparseMatrix m = loadInput(o);
    const GpuModel gpu = loadGpu(o.gpu);
    const Partition part = partition(m, gpu);
    json scores = json::array();
    for (const auto& s : part.columns)
        scores.push_back({{"column", s.column},
                          {"nrows", s.nrows},
                          {"nregisters", s.nregisters},
                          {"regCost", s.regCost},
                          {"globCost", s.globCost},
                          {"tau", s.tau},
                          {"score", s.score},
                          {"accepted", s.accepted}});
    emit({{"command", "partition"},
          {"k", part.k},
          {"c", part.c},
          {"nregisters", part.nregisters()},
          {"tau", calculateNoThreads(part.nregisters(), gpu)},
          {"score", part.bestScore},
          {"perColumnScores", scores}});
}

void cmdPlan(const Options& o) {
    const LaunchPlan plan = generateLaunchParameters(o.tau, o.n, o.minChunk);
    emit({{"command", "plan"}, {"n", o.n}, {"tau", o.tau}, {"launches", planJson(plan)}});
}

void cmdCodegen(const Options& o) {
    const SparseMatrix m = loadInput(o);
    const GpuModel gpu = loadGpu(o.gpu);
    const CodegenMode mode = parseCodegenMode(o.mode);
    std::optional<Partition> part;
    if (mode == CodegenMode::hybrid)
        part = partition(m, gpu);
    const GeneratedProgram program = buildProgram(m, part, mode, gpu);
    const std::string source = emitDeviceSource(program);
    if (!o.out.empty())
        writeText(o.out, source);
    if (!o.ir.empty())
        writeText(o.ir, programToJson(program));
    json report = {{"command", "codegen"},
                   {"mode", toString(mode)},
                   {"n", program.n},
                   {"k", program.k},
                   {"c", program.c},
                   {"nregisters", registerBudget(program)},
                   {"kernels", program.kernels.size()},
                   {"sourceBytes", source.size()}};
    if (!o.out.empty())
        report["out"] = o.out;
    if (!o.ir.empty())
        report["ir"] = o.ir;
    emit(report);
}

std::string readText(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void cmdSimulate(const Options& o) {
    const GeneratedProgram program = programFromJson(readText(o.ir));
    if (o.n != 0 && o.n != program.n)
        throw Error("--n " + std::to_string(o.n) + " does not match the program (n=" + std::to_string(program.n) + ")");
    const LaunchPlan plan = generateLaunchParameters(o.tau, program.n, o.minChunk);
    SimtOptions opts;
    opts.warpSize = o.warp;
    opts.workers = o.workers;
    opts.recordSteps = false;
    const auto t0 = std::chrono::steady_clock::now();
    const ExecutionResult r = executeProgram(program, plan, opts);
    json report = {{"command", "simulate"},
                   {"n", program.n},
                   {"tau", o.tau},
                   {"permanent", r.permanent},
                   {"iterations", r.iterationsExecuted},
                   {"wallTime", secondsSince(t0)}};
    report.update(divergenceJson(r.report));
    emit(report);
}

void cmdDivergence(const Options& o) {
    const DivergenceReport r = divergenceOfSchedule(o.n, o.chunk, o.tau, o.warp);
    json steps = json::array();
    for (const auto& s : r.divergentSteps)
        steps.push_back({{"warp", s.warp}, {"local", s.localIteration}, {"distinct", s.distinct}});
    json report = {{"command", "divergence"}, {"n", o.n}, {"chunk", o.chunk}, {"tau", o.tau}, {"warp", o.warp}};
    report.update(divergenceJson(r));
    report["divergentSteps"] = steps;
    emit(report);
}

json autoJson(const AutoReport& r) {
    json j = {{"permanent", r.permanent},
              {"n", r.n},
              {"nnz", r.nnz},
              {"structurallySingular", r.structurallySingular},
              {"k", r.partition.k},
              {"c", r.partition.c},
              {"nregisters", r.nregisters},
              {"tau", r.tau},
              {"launches", planJson(r.plan)},
              {"iterations", r.iterations},
              {"divergence", divergenceJson(r.divergence)},
              {"overheadTime", r.overheadSeconds},
              {"executionTime", r.executionSeconds}};
    if (!r.note.empty())
        j["note"] = r.note;
    return j;
}

AutoConfig autoConfig(const Options& o) {
    AutoConfig cfg;
    cfg.gpu = loadGpu(o.gpu);
    if (o.tau != 0)
        cfg.tau = o.tau;
    cfg.minChunk = o.minChunk;
    cfg.warpSize = o.warp;
    cfg.workers = o.workers;
    return cfg;
}

void cmdAuto(const Options& o) {
    const SparseMatrix m = [&] {
        try {
            return loadInput(o);
        } catch (const std::exception& e) {
            throw StageError("read", e.what());
        }
    }();
    json report = {{"command", "auto"}};
    report.update(autoJson(runPipeline(m, autoConfig(o))));
    emit(report);
}

template <class F>
double timed(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    return secondsSince(t0);
}

void cmdBench(const Options& o) {
    const AutoConfig cfg = autoConfig(o);
    const int threads = o.threads > 0 ? o.threads : static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
    double totalSparse = 0.0, totalParallel = 0.0, totalAuto = 0.0;
    for (int s = 0; s < o.seeds; ++s) {
        const std::uint64_t seed = o.seed + static_cast<std::uint64_t>(s);
        const SparseMatrix m = generateErdosRenyi({o.n, o.p, seed});
        json times = json::object();
        PermanentResult sparse, parallel;
        AutoReport simulated;
        if (m.dim() <= 10)
            times["naive"] = timed([&] { naivePermanent(m); });
        if (m.dim() <= 20)
            times["ryser"] = timed([&] { ryserPermanent(m); });
        times["sparse"] = timed([&] { sparse = sparsePermanent(m); });
        times["parallel"] = timed([&] { parallel = parallelSparsePermanent(m, threads); });
        times["auto"] = timed([&] { simulated = runPipeline(m, cfg); });
        totalSparse += times["sparse"].get<double>();
        totalParallel += times["parallel"].get<double>();
        totalAuto += times["auto"].get<double>();
        emit({{"command", "bench"},
              {"seed", seed},
              {"n", m.dim()},
              {"nnz", m.nnz()},
              {"permanent", sparse.value},
              {"parallelPermanent", parallel.value},
              {"autoPermanent", simulated.permanent},
              {"threads", threads},
              {"k", simulated.partition.k},
              {"c", simulated.partition.c},
              {"tau", simulated.tau},
              {"times", times},
              {"overheadTime", simulated.overheadSeconds},
              {"divergence", divergenceJson(simulated.divergence)}});
    }
    const double count = o.seeds;
    emit({{"command", "bench"},
          {"summary", true},
          {"seeds", o.seeds},
          {"meanTimes", {{"sparse", totalSparse / count}, {"parallel", totalParallel / count}, {"auto", totalAuto / count}}}});
}

void cmdScbs(const Options& o) {
    if (o.closedForm && o.recursive)
        throw Error("--closed-form and --recursive are exclusive");
    if (o.bits < 1 || o.bits > 24)
        throw Error("--bits must be in [1, 24]");
    std::vector<ScbsEntry> seq;
    if (o.recursive) {
        seq = scbsRecursive(o.bits);
    } else {
        const std::uint64_t count = (std::uint64_t{1} << o.bits) - 1;
        seq.reserve(count);
        for (std::uint64_t i = 1; i <= count; ++i)
            seq.push_back(scbsEntry(i));
    }
    json entries = json::array();
    for (const auto& e : seq)
        entries.push_back((e.sign > 0 ? "+" : "-") + std::to_string(e.column));
    emit({{"command", "scbs"},
          {"bits", o.bits},
          {"method", o.recursive ? "recursive" : "closed-form"},
          {"sequence", entries}});
}

void emitError(const std::string& what, const std::string& stage = {}) {
    json err = {{"error", what}};
    if (!stage.empty())
        err["stage"] = stage;
    std::cerr << err.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse matrix permanent toolkit"};
    app.require_subcommand(1);
    Options o;

    auto inputOpts = [&](CLI::App* sub) {
        sub->add_option("--input", o.input, "Matrix Market or dense text matrix")->required();
        sub->add_flag("--pattern-as-ones", o.patternAsOnes, "Read pattern Matrix Market entries as 1");
    };
    auto gpuOpt = [&](CLI::App* sub) {
        sub->add_option("--gpu", o.gpu, std::string("GPU model JSON (default: $") + kGpuEnv + " or A100)");
    };
    auto simOpts = [&](CLI::App* sub) {
        sub->add_option("--warp", o.warp, "Warp size")->check(CLI::PositiveNumber);
        sub->add_option("--workers", o.workers, "Simulator worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--min-chunk", o.minChunk, "Smallest launch chunk (power of two)");
    };

    auto* compute = app.add_subcommand("compute", "Compute a permanent with a reference engine");
    inputOpts(compute);
    compute->add_option("--engine", o.engine)->check(CLI::IsMember({"naive", "ryser", "sparse", "parallel"}));
    compute->add_option("--threads", o.threads)->check(CLI::PositiveNumber);
    compute->add_flag("--zero-skip", o.zeroSkip);
    compute->add_flag("--degree-sort", o.degreeSort);
    compute->callback([&] { cmdCompute(o); });

    auto* gen = app.add_subcommand("gen-matrix", "Generate a full-rank Erdos-Renyi matrix");
    gen->add_option("--n", o.n)->required();
    gen->add_option("--p", o.p)->required();
    gen->add_option("--seed", o.seed);
    gen->add_option("--out", o.out)->required();
    gen->callback([&] { cmdGenMatrix(o); });

    auto* order = app.add_subcommand("order", "Reorder rows and columns for partitioning");
    inputOpts(order);
    order->add_option("--out", o.out, "Ordered matrix (Matrix Market)");
    order->add_option("--perms", o.perms, "Row/column permutations (JSON)");
    order->callback([&] { cmdOrder(o); });

    auto* part = app.add_subcommand("partition", "Choose the register/global split");
    inputOpts(part);
    gpuOpt(part);
    part->callback([&] { cmdPartition(o); });

    auto* plan = app.add_subcommand("plan", "Generate launch parameters");
    plan->add_option("--n", o.n)->required();
    plan->add_option("--tau", o.tau)->required();
    plan->add_option("--min-chunk", o.minChunk);
    plan->callback([&] { cmdPlan(o); });

    auto* codegen = app.add_subcommand("codegen", "Emit matrix-specific kernels");
    inputOpts(codegen);
    gpuOpt(codegen);
    codegen->add_option("--mode", o.mode)->check(CLI::IsMember({"pure", "hybrid"}));
    codegen->add_option("--out", o.out, "Device source output");
    codegen->add_option("--ir", o.ir, "Program IR output (JSON)");
    codegen->callback([&] { cmdCodegen(o); });

    auto* simulate = app.add_subcommand("simulate", "Run a generated program on the SIMT simulator");
    simulate->add_option("--ir", o.ir)->required();
    simulate->add_option("--n", o.n);
    simulate->add_option("--tau", o.tau)->required();
    simOpts(simulate);
    simulate->callback([&] { cmdSimulate(o); });

    auto* divergence = app.add_subcommand("divergence", "Schedule-only divergence analysis");
    divergence->add_option("--n", o.n)->required();
    divergence->add_option("--chunk", o.chunk)->required();
    divergence->add_option("--tau", o.tau)->required();
    divergence->add_option("--warp", o.warp)->check(CLI::PositiveNumber);
    divergence->callback([&] { cmdDivergence(o); });

    auto* autoCmd = app.add_subcommand("auto", "Order, partition, generate and simulate end to end");
    inputOpts(autoCmd);
    gpuOpt(autoCmd);
    autoCmd->add_option("--tau", o.tau, "Override the thread count");
    simOpts(autoCmd);
    autoCmd->callback([&] { cmdAuto(o); });

    auto* bench = app.add_subcommand("bench", "Time engines on seeded random matrices");
    bench->add_option("--n", o.n)->required();
    bench->add_option("--p", o.p)->required();
    bench->add_option("--seeds", o.seeds)->check(CLI::PositiveNumber);
    bench->add_option("--seed", o.seed, "First seed");
    bench->add_option("--threads", o.threads, "Parallel engine threads (default: hardware)");
    gpuOpt(bench);
    bench->add_option("--tau", o.tau, "Override the simulated thread count");
    simOpts(bench);
    bench->callback([&] {
        if (o.threads == 1 && !bench->count("--threads"))
            o.threads = 0;
        cmdBench(o);
    });

    auto* scbs = app.add_subcommand("scbs", "Print the signed changed-bit sequence");
    scbs->add_option("--bits", o.bits)->required();
    scbs->add_flag("--closed-form", o.closedForm);
    scbs->add_flag("--recursive", o.recursive);
    scbs->callback([&] { cmdScbs(o); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        emitError(e.what(), "arguments");
        return 2;
    } catch (const StageError& e) {
        emitError(e.what(), e.stage());
        return 1;
    } catch (const std::exception& e) {
        emitError(e.what());
        return 1;
    }
    return 0;
}
