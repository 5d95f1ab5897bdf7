#pragma once

#include "cssdpp/linalg.hpp"
#include "cssdpp/rng.hpp"
#include "cssdpp/subsets.hpp"

#include <functional>
#include <vector>

namespace testutil {

using cssdpp::Index;
using cssdpp::Matrix;
using cssdpp::Vector;

inline Matrix gaussian(Index rows, Index cols, cssdpp::Rng& rng) {
  Matrix G(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      G(i, j) = rng.normal();
    }
  }
  return G;
}

inline Matrix orthonormal_columns(Index rows, Index cols, cssdpp::Rng& rng) {
  const Matrix G = gaussian(rows, cols, rng);
  return Eigen::HouseholderQR<Matrix>(G).householderQ() * Matrix::Identity(rows, cols);
}

inline Matrix diag(std::initializer_list<double> values) {
  Vector v(static_cast<Index>(values.size()));
  Index i = 0;
  for (double x : values) {
    v(i++) = x;
  }
  return v.asDiagonal();
}

/// Calls fn on every k-subset of [0, n) by plain recursion (independent of
/// the library's lexicographic successor).
inline void for_each_subset(Index n, Index k, const std::function<void(const std::vector<Index>&)>& fn) {
  std::vector<Index> cur;
  std::function<void(Index)> rec = [&](Index start) {
    if (static_cast<Index>(cur.size()) == k) {
      fn(cur);
      return;
    }
    for (Index i = start; i < n; ++i) {
      cur.push_back(i);
      rec(i + 1);
      cur.pop_back();
    }
  };
  rec(0);
}

/// e_ell by summing products over all ell-subsets.
inline double brute_elementary(const Vector& x, Index ell) {
  if (ell == 0) {
    return 1.0;
  }
  double sum = 0.0;
  for_each_subset(x.size(), ell, [&](const std::vector<Index>& S) {
    double prod = 1.0;
    for (Index i : S) {
      prod *= x(i);
    }
    sum += prod;
  });
  return sum;
}

inline Matrix rows_of(const Matrix& A, const std::vector<Index>& rows) {
  Matrix out(static_cast<Index>(rows.size()), A.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Index>(i)) = A.row(rows[i]);
  }
  return out;
}

inline Matrix cols_of(const Matrix& A, const std::vector<Index>& cols) {
  Matrix out(A.rows(), static_cast<Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    out.col(static_cast<Index>(j)) = A.col(cols[j]);
  }
  return out;
}

/// Total variation between an empirical histogram and a law, both indexed by
/// lexicographic subset rank.
inline double total_variation(const std::vector<double>& counts, const std::vector<double>& law) {
  double n = 0.0;
  for (double c : counts) {
    n += c;
  }
  double tv = 0.0;
  for (std::size_t i = 0; i < law.size(); ++i) {
    tv += std::abs(counts[i] / n - law[i]);
  }
  return 0.5 * tv;
}

}  // namespace testutil
