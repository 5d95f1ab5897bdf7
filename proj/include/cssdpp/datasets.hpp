#pragma once

#include "cssdpp/types.hpp"

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace cssdpp {

/// Dense matrix from comma-separated text, one observation per line.
/// Blank lines are skipped; every row must have the same width.
Matrix read_csv(std::istream& in, bool skip_header = false);
Matrix read_csv_file(const std::string& path, bool skip_header = false);

/// Writes with 17 significant digits so values round-trip exactly.
void write_csv(std::ostream& out, const Matrix& X);
void write_csv_file(const std::string& path, const Matrix& X);

/// Centers every column and scales it to unit standard deviation; constant
/// columns are only centered.
Matrix standardize_columns(const Matrix& X);

/// Built-in spectrum of a toy dataset.
struct ToySpectrum {
  std::string name;
  Vector sigma;  // d singular values, decreasing
  Index k = 0;   // rank the spectrum was designed for (0 when it has none)
};

/// proj-3, proj-5, smooth-3, smooth-5, identity-20 or diag:v1,v2,...
ToySpectrum toy_spectrum(std::string_view name);
std::vector<std::string> toy_names();

}  // namespace cssdpp
