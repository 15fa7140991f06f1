// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <array>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "spperm/codegen.hpp"
#include "spperm/generate.hpp"
#include "spperm/graycode.hpp"
#include "spperm/launch.hpp"
#include "spperm/ordering.hpp"
#include "spperm/permanent.hpp"
#include "spperm/simt.hpp"

using namespace spperm;
using fixtures::relErr;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok && pass) {
            pass = false;
            detail = what;
        }
    }
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

Outcome oracleEquivalence() {
    Outcome o;
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const Index n = 3 + i % 8;
        const double p = 0.2 + 0.1 * (i % 7);
        const auto m = generateErdosRenyi(n, p, 1000 + static_cast<std::uint64_t>(i));
        const double want = naivePermanent(m);
        std::vector<double> got = {ryserPermanent(m), sparsePermanent(m).value};
        for (int t : {1, 2, 7, 16})
            got.push_back(parallelSparsePermanent(m, t).value);
        for (double g : got) {
            worst = std::max(worst, relErr(g, want));
            o.require(relErr(g, want) <= 1e-9,
                      "seed " + std::to_string(1000 + i) + " differs by " + fmt(relErr(g, want)));
        }
    }
    if (o.pass)
        o.detail = "50 matrices, 6 engines/settings each, max rel err " + fmt(worst);
    return o;
}

Outcome generatedCode() {
    Outcome o;
    double worst = 0.0;
    int runs = 0;
    for (Index n : {10, 16, 20, 24}) {
        for (double p : {0.2, 0.5}) {
            const auto raw = generateErdosRenyi(n, p, static_cast<std::uint64_t>(n * 10 + p * 10));
            const double want = sparsePermanent(raw).value;
            const auto ord = permanentOrdering(raw);
            const auto ordered = permute(raw, ord.rows, ord.cols);
            const auto pure = buildProgram(raw, std::nullopt, CodegenMode::pure);
            const auto hybrid = buildProgram(ordered, partition(ordered), CodegenMode::hybrid);
            for (std::uint64_t tau : {64ULL, 1024ULL}) {
                const auto plan = generateLaunchParameters(tau, n);
                SimtOptions opts;
                opts.recordSteps = false;
                for (const auto* prog : {&pure, &hybrid}) {
                    const auto r = executeProgram(*prog, plan, opts);
                    const double err = relErr(r.permanent, want);
                    worst = std::max(worst, err);
                    ++runs;
                    o.require(err <= 1e-9, std::string(toString(prog->mode)) + " n=" + std::to_string(n) +
                                               " tau=" + std::to_string(tau) + " rel err " + fmt(err));
                    o.require(r.iterationsExecuted == (1ULL << (n - 1)) - 1, "iteration count mismatch");
                }
            }
        }
    }
    if (o.pass)
        o.detail = std::to_string(runs) + " simulated runs, max rel err " + fmt(worst);
    return o;
}

Outcome closedFormScbs() {
    Outcome o;
    std::uint64_t checked = 0;
    for (int k = 1; k <= 20; ++k) {
        const auto seq = scbsRecursive(k);
        o.require(seq.size() == (std::size_t{1} << k) - 1, "length mismatch at k=" + std::to_string(k));
        for (std::size_t i = 0; i < seq.size(); ++i) {
            if (!(scbsEntry(i + 1) == seq[i])) {
                o.require(false, "k=" + std::to_string(k) + " i=" + std::to_string(i + 1));
                break;
            }
            ++checked;
        }
    }
    if (o.pass)
        o.detail = std::to_string(checked) + " entries";
    return o;
}

Outcome appearanceCounts() {
    Outcome o;
    for (int k = 1; k <= 20; ++k) {
        std::vector<std::uint64_t> count(static_cast<std::size_t>(k), 0);
        for (const auto& e : scbsRecursive(k))
            ++count[static_cast<std::size_t>(e.column)];
        for (int j = 0; j < k; ++j) {
            const std::uint64_t want = std::uint64_t{1} << (k + 1 - j - 2);
            o.require(count[static_cast<std::size_t>(j)] == want,
                      "k=" + std::to_string(k) + " j=" + std::to_string(j));
            o.require(appearanceCount(k + 1, j) == want, "appearanceCount k=" + std::to_string(k));
        }
    }
    if (o.pass)
        o.detail = "k = 1..20, every column";
    return o;
}

Outcome divergenceBound() {
    Outcome o;
    const auto table = divergenceOfSchedule(5, 3, 5, 32);
    std::vector<int> steps(3, 1);
    for (const auto& s : table.divergentSteps)
        steps[s.localIteration - 1] = s.distinct;
    o.require(steps == std::vector<int>{4, 5, 4}, "5x5 table is not [4, 5, 4]");

    int schedules = 0;
    for (int n = 2; n <= 18; ++n) {
        for (int kc = 1; kc <= 12; ++kc) {
            const std::uint64_t chunk = 1ULL << kc;
            const std::uint64_t fullThreads = ((1ULL << (n - 1)) - 1) / chunk;
            if (fullThreads == 0)
                continue;
            const std::uint64_t tau = std::min<std::uint64_t>(fullThreads, 256);
            const auto r = divergenceOfSchedule(n, chunk, tau, 32);
            std::map<std::uint64_t, int> perWarp;
            for (const auto& s : r.divergentSteps) {
                ++perWarp[s.warp];
                o.require(s.localIteration == chunk / 2 || s.localIteration == chunk,
                          "n=" + std::to_string(n) + " chunk=" + std::to_string(chunk) + " diverges at " +
                              std::to_string(s.localIteration));
            }
            for (const auto& [warp, count] : perWarp)
                o.require(count <= 2, "more than two divergent steps in one chunk");
            ++schedules;
        }
    }
    if (o.pass)
        o.detail = "table [4, 5, 4]; " + std::to_string(schedules) + " power-of-two schedules";
    return o;
}

Outcome launchCover() {
    Outcome o;
    for (std::uint64_t tau : {4ULL, 32ULL, 1024ULL}) {
        for (int n : {12, 16, 22}) {
            const auto plan = generateLaunchParameters(tau, n);
            const auto hits = oracles::coverCounts(plan);
            bool exact = hits[0] == 0;
            for (std::size_t g = 1; g < hits.size(); ++g)
                exact = exact && hits[g] == 1;
            o.require(exact, "cover fails for tau=" + std::to_string(tau) + " n=" + std::to_string(n));
            for (const auto& s : plan.specs)
                o.require(std::has_single_bit(s.delta) && s.delta >= 1024, "bad delta");
        }
    }
    const auto plan = generateLaunchParameters(4, 16);
    const std::vector<std::array<std::uint64_t, 3>> want = {
        {1, 4096, 32768}, {16385, 2048, 32768}, {24577, 1024, 32768}, {28673, 1024, 32768}};
    std::vector<std::array<std::uint64_t, 3>> got;
    for (const auto& s : plan.specs)
        got.push_back({s.start, s.delta, s.end});
    o.require(got == want, "plan for tau=4, n=16 differs from the hand trace");
    if (o.pass)
        o.detail = "9 (tau, n) pairs covered exactly; hand-traced plan matches";
    return o;
}

Outcome orderingPartition() {
    Outcome o;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto m = generateErdosRenyi(static_cast<Index>(4 + seed % 7), 0.3 + 0.02 * seed, 500 + seed);
        const auto ord = permanentOrdering(m);
        const auto om = permute(m, ord.rows, ord.cols);
        o.require(relErr(naivePermanent(om), naivePermanent(m)) <= 1e-12, "ordering changed a permanent");
        const auto part = partition(om);
        o.require(partitionRegionHolds(om, part.k, part.c), "region invariant violated");
    }
    const auto toy = fixtures::toy();
    const auto ord = permanentOrdering(toy);
    const auto part = partition(permute(toy, ord.rows, ord.cols));
    o.require(part.k == 4 && part.c == 3,
              "toy partition is (k=" + std::to_string(part.k) + ", c=" + std::to_string(part.c) + ")");

    std::ostringstream trend;
    for (double p : {0.1, 0.2, 0.3, 0.4, 0.5}) {
        double withOrder = 0.0, without = 0.0;
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const auto m = generateErdosRenyi(40, p, seed);
            const auto mo = permanentOrdering(m);
            const auto om = permute(m, mo.rows, mo.cols);
            const auto op = partition(om);
            o.require(partitionRegionHolds(om, op.k, op.c), "region invariant violated at n=40");
            withOrder += static_cast<double>(op.nregisters());
            without += static_cast<double>(partition(m).nregisters());
        }
        o.require(withOrder <= without, "ordering raised the mean budget at p=" + fmt(p));
        trend << " p=" << fmt(p) << ":" << fmt(withOrder / 20) << "<=" << fmt(without / 20);
    }
    if (o.pass)
        o.detail = "toy (k=4, c=3); mean registers" + trend.str();
    return o;
}

std::vector<std::string> bodyOf(const std::string& source, const std::string& name) {
    std::istringstream in(source);
    std::string line;
    std::vector<std::string> body;
    bool inside = false;
    while (std::getline(in, line)) {
        if (!inside) {
            inside = line.find("void " + name + "(") != std::string::npos;
            continue;
        }
        if (line == "}")
            break;
        if (line.find("+=") != std::string::npos || line.find("-=") != std::string::npos)
            body.push_back(line);
    }
    return body;
}

Outcome codegenGolden() {
    Outcome o;
    const auto toy = fixtures::toy();
    const auto pure = buildProgram(toy, std::nullopt, CodegenMode::pure);
    const auto pureSrc = emitDeviceSource(pure);
    o.require(bodyOf(pureSrc, "c0_inc") == std::vector<std::string>{"    reg0 += 11.600000;", "    reg2 += 2.600000;",
                                                                     "    reg3 += 1.800000;", "    reg5 += 9.900000;"},
              "c0_inc updates differ");

    const auto ord = permanentOrdering(toy);
    const auto ordered = permute(toy, ord.rows, ord.cols);
    const auto hybrid = buildProgram(ordered, partition(ordered), CodegenMode::hybrid);
    const auto hybridSrc = emitDeviceSource(hybrid);
    o.require(bodyOf(hybridSrc, "hybrid_c3_inc") ==
                  std::vector<std::string>{"    reg2 += 11.600000;", "    reg3 += 1.800000;",
                                           "    x[nthreads * 0 + tid] += 2.600000;",
                                           "    x[nthreads * 1 + tid] += 9.900000;"},
              "hybrid_c3_inc updates differ");
    o.require(emitDeviceSource(pure) == pureSrc && emitDeviceSource(hybrid) == hybridSrc,
              "emission is not deterministic");
    o.require(emitDeviceSource(buildProgram(toy, std::nullopt, CodegenMode::pure)) == pureSrc,
              "rebuild changes the source");
    if (o.pass)
        o.detail = "c0_inc and hybrid_c3_inc match; repeated emission identical";
    return o;
}

Outcome zeroSkip() {
    Outcome o;
    SparseOptions skip;
    skip.zeroSkip = true;
    std::ostringstream rates;
    for (Index n : {8, 12, 16, 20}) {
        const auto m = fixtures::binarized(generateErdosRenyi(n, 0.2, 300 + static_cast<std::uint64_t>(n)));
        const auto plain = sparsePermanent(m);
        const auto skipped = sparsePermanent(m, skip);
        o.require(plain.value == skipped.value, "values differ at n=" + std::to_string(n));
        o.require(skipped.skipped > 0, "no skipped iterations at n=" + std::to_string(n));
        rates << " n=" << n << ":" << fmt(100.0 * static_cast<double>(skipped.skipped) /
                                          static_cast<double>(skipped.iterations))
              << "%";
    }
    if (o.pass)
        o.detail = "identical values; skip rates" + rates.str();
    return o;
}

struct Criterion {
    int id;
    const char* name;
    double budgetSeconds;
    std::function<Outcome()> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "oracle equivalence", 30, oracleEquivalence},
        {2, "generated-code correctness", 120, generatedCode},
        {3, "closed-form SCBS equals recursion (k <= 20)", 5, closedFormScbs},
        {4, "column appearance counts (k <= 20)", 0, appearanceCounts},
        {5, "divergence table and power-of-two chunk bound", 0, divergenceBound},
        {6, "launch-plan cover", 0, launchCover},
        {7, "ordering and partition properties", 0, orderingPartition},
        {8, "codegen golden text", 0, codegenGolden},
        {9, "zero-skip consistency", 0, zeroSkip},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (out.pass && c.budgetSeconds > 0 && secs > c.budgetSeconds) {
            out.pass = false;
            out.detail = "took " + fmt(secs) + " s, budget " + fmt(c.budgetSeconds) + " s";
        }
        failed += !out.pass;
        std::printf("[%s] criterion %d: %s (%.2f s) - %s\n", out.pass ? "PASS" : "FAIL", c.id, c.name, secs,
                    out.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed;
}
