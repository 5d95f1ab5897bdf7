#pragma once

#include <Eigen/Dense>

#include <string_view>

namespace cssdpp {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class Norm { Frobenius, Spectral };

constexpr std::string_view to_string(Norm norm) {
  return norm == Norm::Frobenius ? "frobenius" : "spectral";
}

/// Relative cutoff below which singular values are treated as zero.
inline constexpr double kRankCutoff = 1e-12;

/// Absolute threshold under which a k-leverage score counts as zero.
inline constexpr double kZeroLeverage = 1e-12;

}  // namespace cssdpp
