#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "hyperpower/dense.hpp"
#include "hyperpower/generators.hpp"
#include "hyperpower/solver.hpp"

namespace hyperpower {

enum class TraceFormat { csv, json };

inline TraceFormat parse_trace_format(const std::string& name) {
    if (name == "csv") return TraceFormat::csv;
    if (name == "json") return TraceFormat::json;
    throw std::invalid_argument("unknown trace format '" + name + "' (expected csv or json)");
}

/// Read a Matrix Market file. Supports array and coordinate formats, real
/// and complex fields, general and symmetric symmetry (symmetric inputs are
/// expanded from the stored lower triangle). Indices are 1-based and array
/// data is column-major, per the format definition. Malformed input throws
/// std::runtime_error carrying the offending line number.
MatrixVariant read_matrix_market(const std::string& path);

/// Write in dense `array` format, `general` symmetry, 17-significant-digit
/// entries so a read of the written file reproduces the matrix bit for bit.
void write_matrix_market(const RealMatrix& m, const std::string& path);
void write_matrix_market(const ComplexMatrix& m, const std::string& path);
void write_matrix_market(const MatrixVariant& m, const std::string& path);

/// Export a run's per-iteration trace.
/// CSV: `# key=value` metadata lines (method, n, epsilon, seed when the
/// matrix was generated), then the fixed header `k,alpha,beta,res_norm,
/// fallback,wall_ns` and one row per iteration (fallback as 0/1).
/// JSON: one object mirroring the SolveReport field names (method, n,
/// epsilon, seed, final_res, iterations, converged, matmul_count, reason,
/// trace); the inverse itself is not embedded — write it with
/// write_matrix_market. All floats printed with 17 significant digits.
void export_trace(const RealSolveReport& report, TraceFormat format,
                  const std::string& path,
                  std::optional<std::uint64_t> seed = std::nullopt);
void export_trace(const ComplexSolveReport& report, TraceFormat format,
                  const std::string& path,
                  std::optional<std::uint64_t> seed = std::nullopt);

}  // namespace hyperpower
