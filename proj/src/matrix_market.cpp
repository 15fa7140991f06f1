#include "spperm/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

namespace spperm {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

enum class Symmetry { general, symmetric, skew };

}  // namespace

SparseMatrix readMatrixMarket(std::string_view text, const MatrixMarketOptions& opts) {
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line))
        throw Error("Matrix Market: empty input");

    std::istringstream banner(line);
    std::string tag, object, format, field, symmetry;
    banner >> tag >> object >> format >> field >> symmetry;
    if (tag != "%%MatrixMarket" || symmetry.empty())
        throw Error("Matrix Market: malformed header '" + line + "'");
    object = lower(object);
    format = lower(format);
    field = lower(field);
    symmetry = lower(symmetry);
    if (object != "matrix" || format != "coordinate")
        throw Error("Matrix Market: only 'matrix coordinate' is supported");

    bool pattern = false;
    if (field == "pattern") {
        if (!opts.patternAsOnes)
            throw Error("Matrix Market: pattern-only matrices are not supported");
        pattern = true;
    } else if (field != "real" && field != "integer" && field != "double") {
        throw Error("Matrix Market: unsupported field '" + field + "'");
    }

    Symmetry sym;
    if (symmetry == "general")
        sym = Symmetry::general;
    else if (symmetry == "symmetric")
        sym = Symmetry::symmetric;
    else if (symmetry == "skew-symmetric")
        sym = Symmetry::skew;
    else
        throw Error("Matrix Market: unsupported symmetry '" + symmetry + "'");

    // Skip comments and blank lines up to the size line.
    long long rows = -1, cols = -1, entries = -1;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '%' ||
            line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        std::istringstream size(line);
        if (!(size >> rows >> cols >> entries))
            throw Error("Matrix Market: malformed size line '" + line + "'");
        break;
    }
    if (rows < 0 || cols < 0 || entries < 0)
        throw Error("Matrix Market: missing size line");
    if (rows != cols)
        throw Error("Matrix Market: matrix is not square (" + std::to_string(rows) + "x" +
                    std::to_string(cols) + ")");
    if (rows > std::numeric_limits<Index>::max())
        throw Error("Matrix Market: dimension too large");

    const auto n = static_cast<Index>(rows);
    std::vector<Triplet> triplets;
    triplets.reserve(static_cast<std::size_t>(entries) * (sym == Symmetry::general ? 1 : 2));
    long long read = 0;
    while (read < entries && std::getline(in, line)) {
        if (line.empty() || line[0] == '%' ||
            line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        std::istringstream entry(line);
        long long i = 0, j = 0;
        double v = 1.0;
        if (!(entry >> i >> j) || (!pattern && !(entry >> v)))
            throw Error("Matrix Market: malformed entry line '" + line + "'");
        if (i < 1 || i > rows || j < 1 || j > cols)
            throw Error("Matrix Market: entry (" + std::to_string(i) + ", " + std::to_string(j) +
                        ") out of range");
        ++read;
        if (v == 0.0)
            continue;
        const auto r = static_cast<Index>(i - 1);
        const auto c = static_cast<Index>(j - 1);
        triplets.push_back({r, c, v});
        if (sym != Symmetry::general && r != c)
            triplets.push_back({c, r, sym == Symmetry::skew ? -v : v});
    }
    if (read != entries)
        throw Error("Matrix Market: expected " + std::to_string(entries) + " entries, found " +
                    std::to_string(read));
    return SparseMatrix::fromTriplets(n, triplets);
}

SparseMatrix readMatrixMarketFile(const std::string& path, const MatrixMarketOptions& opts) {
    return readMatrixMarket(slurp(path), opts);
}

std::string writeMatrixMarket(const SparseMatrix& m) {
    std::string out = "%%MatrixMarket matrix coordinate real general\n";
    out += std::to_string(m.dim()) + " " + std::to_string(m.dim()) + " " + std::to_string(m.nnz()) + "\n";
    for (const auto& e : m.triplets()) {
        out += std::to_string(e.row + 1) + " " + std::to_string(e.col + 1) + " " + formatExact(e.value) + "\n";
    }
    return out;
}

void writeMatrixMarketFile(const std::string& path, const SparseMatrix& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write " + path);
    out << writeMatrixMarket(m);
}

SparseMatrix readMatrixFile(const std::string& path, const MatrixMarketOptions& opts) {
    const std::string text = slurp(path);
    if (text.rfind("%%MatrixMarket", 0) == 0)
        return readMatrixMarket(text, opts);
    return readDenseText(text);
}

}  // namespace spperm
