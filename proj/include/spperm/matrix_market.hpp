#pragma once

#include <string>
#include <string_view>

#include "spperm/matrix.hpp"

namespace spperm {

struct MatrixMarketOptions {
    /// Pattern files are rejected unless this is set, in which case every
    /// listed entry gets the value 1.
    bool patternAsOnes = false;
};

/// Parses coordinate-format Matrix Market text (real or integer field;
/// general, symmetric or skew-symmetric). Explicit zero entries are dropped.
SparseMatrix readMatrixMarket(std::string_view text, const MatrixMarketOptions& opts = {});
SparseMatrix readMatrixMarketFile(const std::string& path, const MatrixMarketOptions& opts = {});

/// Coordinate real general, 1-based, 17 significant digits.
std::string writeMatrixMarket(const SparseMatrix& m);
void writeMatrixMarketFile(const std::string& path, const SparseMatrix& m);

/// Reads either Matrix Market or the dense text format, chosen by the
/// leading "%%MatrixMarket" banner.
SparseMatrix readMatrixFile(const std::string& path, const MatrixMarketOptions& opts = {});

}  // namespace spperm
