#include "spperm/codegen.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace spperm {

const char* toString(CodegenMode mode) { return mode == CodegenMode::pure ? "pure" : "hybrid"; }

CodegenMode parseCodegenMode(std::string_view text) {
    if (text == "pure")
        return CodegenMode::pure;
    if (text == "hybrid")
        return CodegenMode::hybrid;
    throw Error("unknown codegen mode '" + std::string(text) + "' (expected pure or hybrid)");
}

GeneratedProgram buildProgram(const SparseMatrix& m, const std::optional<Partition>& part, CodegenMode mode,
                              const GpuModel& gpu) {
    const Index n = m.dim();
    GeneratedProgram p;
    p.n = n;
    p.mode = mode;
    if (mode == CodegenMode::pure) {
        if (calculateNoThreads(2 * static_cast<std::int64_t>(n), gpu) == 0)
            throw Error("pure-register kernels need " + std::to_string(2 * n) + " registers per thread plus " +
                        std::to_string(gpu.overheadRegsPerThread) + " overhead, above the limit of " +
                        std::to_string(gpu.maxRegsPerThread) + "; use hybrid mode");
        p.k = n;
        p.c = std::max<Index>(n - 1, 0);
    } else {
        if (!part)
            throw Error("hybrid code generation needs a partition");
        if (part->k < 0 || part->k > n || part->c < 0 || part->c > n)
            throw Error("partition (k, c) out of range for n=" + std::to_string(n));
        if (!partitionRegionHolds(m, part->k, part->c))
            throw Error("matrix has a nonzero below row k in one of the first c columns; order and partition it first");
        p.k = part->k;
        p.c = part->c;
    }
    p.initialX = initRowSums(m);

    for (Index j = 0; j + 1 < n; ++j) {
        KernelIR inc;
        inc.column = j;
        inc.sign = 1;
        auto rows = m.colRows(j);
        auto vals = m.colValues(j);
        for (std::size_t q = 0; q < rows.size(); ++q) {
            if (rows[q] < p.k)
                inc.regOps.push_back({rows[q], vals[q]});
            else
                inc.globOps.push_back({rows[q] - p.k, vals[q]});
        }
        inc.touchesGlobal = !inc.globOps.empty();
        KernelIR exc = inc;
        exc.sign = -1;
        p.kernels.push_back(std::move(inc));
        p.kernels.push_back(std::move(exc));
    }
    return p;
}

std::int64_t registerBudget(const GeneratedProgram& p) { return 2 * static_cast<std::int64_t>(p.k); }

std::string kernelName(const GeneratedProgram& p, const KernelIR& kernel) {
    std::string name = p.mode == CodegenMode::hybrid ? "hybrid_c" : "c";
    name += std::to_string(kernel.column);
    name += kernel.sign > 0 ? "_inc" : "_exc";
    return name;
}

namespace {

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::string reg(Index i) { return "reg" + std::to_string(i); }

std::string globalRef(Index slot) { return "x[nthreads * " + std::to_string(slot) + " + tid]"; }

std::string joinRegs(Index k, const char* prefix) {
    std::string out;
    for (Index i = 0; i < k; ++i)
        out += std::string(prefix) + reg(i) + (i + 1 < k ? ", " : "");
    return out;
}

std::string argList(Index k) {
    std::string out;
    for (Index i = 0; i < k; ++i)
        out += ", " + reg(i);
    return out;
}

const char* kThreadParams = "C* x, const volatile unsigned& nthreads, const volatile unsigned& tid";

std::string kernelParams(const GeneratedProgram& p, const KernelIR& kernel) {
    std::vector<char> written(static_cast<std::size_t>(p.k), 0);
    for (const auto& op : kernel.regOps)
        written[static_cast<std::size_t>(op.reg)] = 1;
    std::string out = p.mode == CodegenMode::hybrid ? "C& product, C& globalProduct" : "C& product";
    for (Index i = 0; i < p.k; ++i)
        out += std::string(written[static_cast<std::size_t>(i)] ? ", C& " : ", const C& ") + reg(i);
    if (p.mode == CodegenMode::hybrid)
        out += std::string(", ") + kThreadParams;
    return out;
}

void emitReduce(std::ostringstream& os, const GeneratedProgram& p) {
    if (p.mode == CodegenMode::pure) {
        os << "__device__ __inline__ void prodReduce(C& product" << (p.k ? ", " : "") << joinRegs(p.k, "const C& ")
           << ") {\n";
    } else {
        os << "__device__ __inline__ void hybridProdReduce(C& product, const C& globalProduct"
           << (p.k ? ", " : "") << joinRegs(p.k, "const C& ") << ") {\n";
    }
    for (Index i = 0; i < p.k; ++i)
        os << "    product *= " << reg(i) << ";\n";
    if (p.mode == CodegenMode::hybrid)
        os << "    product *= globalProduct;\n";
    os << "}\n\n";
}

void emitKernel(std::ostringstream& os, const GeneratedProgram& p, const KernelIR& kernel) {
    const char* op = kernel.sign > 0 ? " += " : " -= ";
    os << "__device__ __inline__ void " << kernelName(p, kernel) << "(" << kernelParams(p, kernel) << ") {\n";
    for (const auto& r : kernel.regOps)
        os << "    " << reg(r.reg) << op << fixed6(r.value) << ";\n";
    if (kernel.touchesGlobal) {
        // Recompute the product of every global slot after the update.
        std::vector<const GlobalOp*> bySlot(static_cast<std::size_t>(p.globalSlots()), nullptr);
        for (const auto& g : kernel.globOps)
            bySlot[static_cast<std::size_t>(g.slot)] = &g;
        os << "\n    globalProduct = 1;\n";
        for (Index s = 0; s < p.globalSlots(); ++s) {
            if (const GlobalOp* g = bySlot[static_cast<std::size_t>(s)])
                os << "    " << globalRef(s) << op << fixed6(g->value) << ";\n";
            os << "    globalProduct *= " << globalRef(s) << ";\n";
        }
    }
    os << "\n";
    if (p.mode == CodegenMode::pure)
        os << "    prodReduce(product" << argList(p.k) << ");\n";
    else
        os << "    hybridProdReduce(product, globalProduct" << argList(p.k) << ");\n";
    os << "}\n\n";
}

void emitDispatch(std::ostringstream& os, const GeneratedProgram& p) {
    const bool hybrid = p.mode == CodegenMode::hybrid;
    os << "__device__ __inline__ void applyKernel(int kernel, C& product" << (hybrid ? ", C& globalProduct" : "")
       << (p.k ? ", " : "") << joinRegs(p.k, "C& ") << (hybrid ? std::string(", ") + kThreadParams : "")
       << ") {\n";
    os << "    switch (kernel) {\n";
    for (const auto& kernel : p.kernels) {
        os << "    case " << kernel.kernelId() << ": " << kernelName(p, kernel) << "(product"
           << (hybrid ? ", globalProduct" : "") << argList(p.k) << (hybrid ? ", x, nthreads, tid" : "")
           << "); break;\n";
    }
    os << "    default: break;\n";
    os << "    }\n";
    os << "}\n\n";
}

void emitDriver(std::ostringstream& os, const GeneratedProgram& p) {
    const bool hybrid = p.mode == CodegenMode::hybrid;
    const std::string call = std::string("(product") + (hybrid ? ", globalProduct" : "") + argList(p.k) +
                             (hybrid ? ", x, nthreads, tid" : "") + ");\n";
    os << "// Host side: permanent = (prod(initial x) + sum of *result over all launches) * "
       << permanentScale(p.n) << "\n";
    os << "__global__ void permanentKernel(C* result, C* x, unsigned long long start, unsigned long long delta, "
          "unsigned long long end) {\n";
    os << "    volatile unsigned nthreads = gridDim.x * blockDim.x;\n";
    os << "    volatile unsigned tid = blockIdx.x * blockDim.x + threadIdx.x;\n";
    os << "    const unsigned long long first = start + (unsigned long long)tid * delta;\n";
    os << "    if (first >= end) return;\n";
    os << "    const unsigned long long stop = min(first + delta, end);\n\n";
    os << "    C product = 1;\n";
    if (hybrid)
        os << "    C globalProduct = 1;\n";
    for (Index i = 0; i < p.k; ++i)
        os << "    C " << reg(i) << " = " << formatExact(p.initialX[i]) << ";\n";
    for (Index s = 0; s < p.globalSlots(); ++s)
        os << "    " << globalRef(s) << " = " << formatExact(p.initialX[p.k + s]) << ";\n";
    os << "\n    unsigned long long bits = (first - 1) ^ ((first - 1) >> 1);\n";
    os << "    while (bits) {\n";
    os << "        const int j = __ffsll((long long)bits) - 1;\n";
    os << "        bits &= bits - 1;\n";
    os << "        applyKernel(2 * j, " << call.substr(1);
    os << "    }\n";
    if (hybrid) {
        os << "    globalProduct = 1;\n";
        for (Index s = 0; s < p.globalSlots(); ++s)
            os << "    globalProduct *= " << globalRef(s) << ";\n";
    }
    os << "\n    C partial = 0;\n";
    os << "    for (unsigned long long g = first; g < stop; ++g) {\n";
    os << "        const int j = __ffsll((long long)g) - 1;\n";
    os << "        const int kernel = 2 * j + (int)((g >> (j + 1)) & 1);\n";
    os << "        product = 1;\n";
    os << "        applyKernel(kernel, " << call.substr(1);
    os << "        partial += (g & 1) ? -product : product;\n";
    os << "    }\n";
    os << "    atomicAdd(result, partial);\n";
    os << "}\n";
}

}  // namespace

std::string emitDeviceSource(const GeneratedProgram& p) {
    std::ostringstream os;
    os << "// n = " << p.n << ", mode = " << toString(p.mode) << ", k = " << p.k << ", c = " << p.c << "\n";
    os << "#define C double\n\n";
    emitReduce(os, p);
    for (const auto& kernel : p.kernels)
        emitKernel(os, p, kernel);
    emitDispatch(os, p);
    emitDriver(os, p);
    return os.str();
}

namespace {

std::vector<std::string> splitParams(const std::string& list) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(list);
    while (std::getline(in, cur, ',')) {
        const auto b = cur.find_first_not_of(" \t\n");
        const auto e = cur.find_last_not_of(" \t\n");
        out.push_back(b == std::string::npos ? std::string() : cur.substr(b, e - b + 1));
    }
    return out;
}

// Parameter list and body of `void name(...) { ... }`, if present.
std::optional<std::pair<std::string, std::string>> findFunction(std::string_view source, const std::string& name) {
    const std::string head = "void " + name + "(";
    const auto at = source.find(head);
    if (at == std::string_view::npos)
        return std::nullopt;
    const auto open = at + head.size();
    const auto close = source.find(')', open);
    const auto bodyOpen = source.find('{', close);
    const auto bodyClose = source.find("\n}", bodyOpen);
    if (close == std::string_view::npos || bodyOpen == std::string_view::npos || bodyClose == std::string_view::npos)
        return std::nullopt;
    return std::make_pair(std::string(source.substr(open, close - open)),
                          std::string(source.substr(bodyOpen + 1, bodyClose - bodyOpen)));
}

}  // namespace

std::vector<std::string> checkDeviceSource(std::string_view source, const GeneratedProgram& p) {
    std::vector<std::string> problems;
    const bool hybrid = p.mode == CodegenMode::hybrid;

    const std::string reduceName = hybrid ? "hybridProdReduce" : "prodReduce";
    if (auto fn = findFunction(source, reduceName)) {
        for (Index i = 0; i < p.k; ++i)
            if (fn->second.find("product *= " + reg(i) + ";") == std::string::npos)
                problems.push_back(reduceName + " does not multiply " + reg(i));
        if (hybrid && fn->second.find("product *= globalProduct;") == std::string::npos)
            problems.push_back(reduceName + " does not multiply globalProduct");
    } else {
        problems.push_back("missing " + reduceName);
    }

    for (const auto& kernel : p.kernels) {
        const std::string name = kernelName(p, kernel);
        auto fn = findFunction(source, name);
        if (!fn) {
            problems.push_back("missing kernel " + name);
            continue;
        }
        const auto params = splitParams(fn->first);
        std::vector<char> written(static_cast<std::size_t>(p.k), 0);
        for (const auto& op : kernel.regOps)
            written[static_cast<std::size_t>(op.reg)] = 1;
        for (Index i = 0; i < p.k; ++i) {
            const std::string want = (written[static_cast<std::size_t>(i)] ? "C& " : "const C& ") + reg(i);
            if (std::find(params.begin(), params.end(), want) == params.end())
                problems.push_back(name + ": expected parameter '" + want + "'");
        }
        const char* op = kernel.sign > 0 ? " += " : " -= ";
        for (const auto& r : kernel.regOps)
            if (fn->second.find(reg(r.reg) + op) == std::string::npos)
                problems.push_back(name + ": no update of " + reg(r.reg));
        if (hybrid) {
            if (std::find(params.begin(), params.end(), "const volatile unsigned& nthreads") == params.end() ||
                std::find(params.begin(), params.end(), "const volatile unsigned& tid") == params.end())
                problems.push_back(name + ": nthreads/tid must be const volatile references");
            for (const auto& g : kernel.globOps)
                if (fn->second.find(globalRef(g.slot) + op) == std::string::npos)
                    problems.push_back(name + ": no coalesced update of global slot " + std::to_string(g.slot));
        } else if (fn->second.find("x[") != std::string::npos) {
            problems.push_back(name + ": pure-register kernel touches global memory");
        }
    }
    return problems;
}

std::string programToJson(const GeneratedProgram& p) {
    nlohmann::json kernels = nlohmann::json::array();
    for (const auto& kernel : p.kernels) {
        nlohmann::json regOps = nlohmann::json::array();
        for (const auto& r : kernel.regOps)
            regOps.push_back({r.reg, r.value});
        nlohmann::json globOps = nlohmann::json::array();
        for (const auto& g : kernel.globOps)
            globOps.push_back({g.slot, g.value});
        kernels.push_back({{"name", kernelName(p, kernel)},
                           {"column", kernel.column},
                           {"sign", kernel.sign},
                           {"regOps", regOps},
                           {"globOps", globOps},
                           {"touchesGlobal", kernel.touchesGlobal}});
    }
    std::vector<double> x(p.initialX.values().begin(), p.initialX.values().end());
    nlohmann::json j{{"format", "spperm-ir"},
                     {"version", 1},
                     {"n", p.n},
                     {"mode", toString(p.mode)},
                     {"k", p.k},
                     {"c", p.c},
                     {"constantsEmbedded", p.constantsEmbedded},
                     {"initialX", x},
                     {"kernels", kernels}};
    return j.dump(1);
}

GeneratedProgram programFromJson(std::string_view text) {
    GeneratedProgram p;
    try {
        const auto j = nlohmann::json::parse(text);
        if (j.value("format", "") != "spperm-ir" || j.value("version", 0) != 1)
            throw Error("IR: unsupported format or version");
        p.n = j.at("n").get<Index>();
        p.mode = parseCodegenMode(j.at("mode").get<std::string>());
        p.k = j.at("k").get<Index>();
        p.c = j.at("c").get<Index>();
        p.constantsEmbedded = j.value("constantsEmbedded", true);
        p.initialX = RowSums(j.at("initialX").get<std::vector<double>>());
        for (const auto& jk : j.at("kernels")) {
            KernelIR kernel;
            kernel.column = jk.at("column").get<Index>();
            kernel.sign = jk.at("sign").get<int>();
            for (const auto& r : jk.at("regOps"))
                kernel.regOps.push_back({r.at(0).get<Index>(), r.at(1).get<double>()});
            for (const auto& g : jk.at("globOps"))
                kernel.globOps.push_back({g.at(0).get<Index>(), g.at(1).get<double>()});
            kernel.touchesGlobal = jk.at("touchesGlobal").get<bool>();
            p.kernels.push_back(std::move(kernel));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("IR: ") + e.what());
    }

    // Structural validation so the simulator can trust indices.
    if (p.n < 1 || p.k < 0 || p.k > p.n || p.c < 0 || p.c > p.n)
        throw Error("IR: dimensions out of range");
    if (p.initialX.size() != p.n)
        throw Error("IR: initialX has wrong length");
    if (p.kernels.size() != 2 * static_cast<std::size_t>(p.n - 1))
        throw Error("IR: expected 2*(n-1) kernels");
    for (std::size_t q = 0; q < p.kernels.size(); ++q) {
        const auto& kernel = p.kernels[q];
        if (kernel.kernelId() != static_cast<int>(q) || (kernel.sign != 1 && kernel.sign != -1))
            throw Error("IR: kernel " + std::to_string(q) + " is out of order");
        for (const auto& r : kernel.regOps)
            if (r.reg < 0 || r.reg >= p.k)
                throw Error("IR: register index out of range in kernel " + std::to_string(q));
        for (const auto& g : kernel.globOps)
            if (g.slot < 0 || g.slot >= p.globalSlots())
                throw Error("IR: global slot out of range in kernel " + std::to_string(q));
        if (kernel.touchesGlobal != !kernel.globOps.empty())
            throw Error("IR: touchesGlobal flag inconsistent in kernel " + std::to_string(q));
    }
    return p;
}

}  // namespace spperm
