#pragma once

// CSV interchange: comma separated, one header row, decimal point, no
// thousands separators. Values are written in shortest round-trip form.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "xclust/core.hpp"
#include "xclust/extremes.hpp"
#include "xclust/factor_models.hpp"

namespace xclust {

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

/// Parses a numeric table. Cells must be finite decimal numbers; errors name
/// the offending row (1-based, header excluded) and column.
DataMatrix parse_csv(std::istream& in, const std::string& source = "<input>");
DataMatrix read_csv(const std::filesystem::path& path);

void write_csv(std::ostream& out, const Matrix& values, const std::vector<std::string>& header);
void write_csv(const std::filesystem::path& path, const Matrix& values,
               const std::vector<std::string>& header);
inline void write_csv(const std::filesystem::path& path, const DataMatrix& data) {
  write_csv(path, data.values, data.column_names);
}

/// Coefficient matrix with header b1..bk.
void write_coefficients(const std::filesystem::path& path, const Matrix& b);
Matrix read_coefficients(const std::filesystem::path& path);

/// Model config JSON: {"alpha": ..., "type": "max-linear"|"sum-linear",
/// "noise": {"alpha": ..., "scale": ...}} (noise optional).
FactorCoefficients read_model(const std::filesystem::path& coefficients_csv,
                              const std::filesystem::path& config_json = {});
void write_model_config(const std::filesystem::path& path, const FactorCoefficients& model);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace xclust
