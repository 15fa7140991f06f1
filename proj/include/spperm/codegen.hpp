#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spperm/graycode.hpp"
#include "spperm/matrix.hpp"
#include "spperm/ordering.hpp"
#include "spperm/permanent.hpp"

namespace spperm {

enum class CodegenMode { pure, hybrid };

const char* toString(CodegenMode mode);
CodegenMode parseCodegenMode(std::string_view text);

/// x[reg] += sign * value, reg < k.
struct RegisterOp {
    Index reg = 0;
    double value = 0.0;
    friend bool operator==(const RegisterOp&, const RegisterOp&) = default;
};

/// Global slot `slot` (row k + slot) += sign * value.
struct GlobalOp {
    Index slot = 0;
    double value = 0.0;
    friend bool operator==(const GlobalOp&, const GlobalOp&) = default;
};

/// Update body of one inclusion (sign +1) or exclusion (sign -1) kernel.
/// Ops hold the raw column entries; the sign is applied at execution.
struct KernelIR {
    Index column = 0;
    int sign = 1;
    std::vector<RegisterOp> regOps;
    std::vector<GlobalOp> globOps;
    bool touchesGlobal = false;

    int kernelId() const { return ScbsEntry{column, sign}.kernelId(); }
    friend bool operator==(const KernelIR&, const KernelIR&) = default;
};

/// Matrix-specific kernels for every column but the last.
/// kernels[2j] includes column j, kernels[2j+1] excludes it.
struct GeneratedProgram {
    Index n = 0;
    CodegenMode mode = CodegenMode::pure;
    Index k = 0;  // x entries kept in registers
    Index c = 0;  // leading columns whose kernels touch registers only
    std::vector<KernelIR> kernels;
    RowSums initialX;
    bool constantsEmbedded = true;

    Index globalSlots() const { return n - k; }
    const KernelIR& kernel(const ScbsEntry& e) const { return kernels[static_cast<std::size_t>(e.kernelId())]; }

    friend bool operator==(const GeneratedProgram&, const GeneratedProgram&) = default;
};

/// Pure mode keeps all n row sums in registers (k = n, c = n - 1) and fails
/// when 2n registers do not fit the GPU model. Hybrid mode takes (k, c) from
/// `part`, which must describe `m` (no nonzero in a column < c at a row >= k).
GeneratedProgram buildProgram(const SparseMatrix& m, const std::optional<Partition>& part, CodegenMode mode,
                              const GpuModel& gpu = {});

/// 32-bit registers spent on x: 2 * k.
std::int64_t registerBudget(const GeneratedProgram& p);

/// "c{j}_{inc|exc}" in pure mode, "hybrid_c{j}_{inc|exc}" in hybrid mode.
std::string kernelName(const GeneratedProgram& p, const KernelIR& kernel);

/// CUDA-style device source: the product reduction, one inline device
/// function per kernel, a dispatcher and a driver kernel. Deterministic.
std::string emitDeviceSource(const GeneratedProgram& p);

/// Structural check of emitted source against its program. Returns a list of
/// problems; empty means the source is consistent.
std::vector<std::string> checkDeviceSource(std::string_view source, const GeneratedProgram& p);

/// JSON form consumed by the simulator. Doubles round-trip exactly.
std::string programToJson(const GeneratedProgram& p);
GeneratedProgram programFromJson(std::string_view text);

}  // namespace spperm
