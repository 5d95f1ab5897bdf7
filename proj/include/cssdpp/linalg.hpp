#pragma once

#include "cssdpp/types.hpp"

#include <span>
#include <vector>

namespace cssdpp {

/// Dense N x d data matrix with finite entries. Immutable after construction.
class DataMatrix {
 public:
  explicit DataMatrix(Matrix values);

  const Matrix& values() const { return values_; }
  Index n_rows() const { return values_.rows(); }
  Index n_cols() const { return values_.cols(); }

 private:
  Matrix values_;
};

/// Thin SVD truncated to numerical rank: X = U diag(sigma) V^T.
struct SvdBundle {
  Matrix U;      ///< N x r, orthonormal columns
  Vector sigma;  ///< r singular values, decreasing, all > kRankCutoff * sigma_1
  Matrix V;      ///< d x r, orthonormal columns
  Index rank = 0;

  Index n_rows() const { return U.rows(); }
  Index n_cols() const { return V.rows(); }
  /// sigma_j for 0-based j, zero beyond the rank.
  double singular_value(Index j) const { return j < rank ? sigma(j) : 0.0; }
};

struct KLeverageProfile {
  Index k = 0;
  Vector scores;         ///< d-vector of squared row norms of V_k
  Index sparsity_p = 0;  ///< number of scores >= kZeroLeverage
  double beta = 1.0;     ///< flatness of the spectrum past k

  Index d() const { return scores.size(); }
};

/// Column index set S of a d-column matrix, stored sorted.
///
/// Multinomial samplers may draw a column several times; those selections are
/// built with allow_duplicates and keep the repeats.
class SubsetSelection {
 public:
  SubsetSelection() = default;
  SubsetSelection(std::vector<Index> indices, Index d, bool allow_duplicates = false);

  std::span<const Index> indices() const { return indices_; }
  Index size() const { return static_cast<Index>(indices_.size()); }
  Index d() const { return d_; }
  bool allow_duplicates() const { return allow_duplicates_; }
  bool contains(Index column) const;
  std::vector<Index> distinct() const;
  /// d x |S| matrix with a single one per column.
  Matrix sampling_matrix() const;

  friend bool operator==(const SubsetSelection&, const SubsetSelection&) = default;

 private:
  std::vector<Index> indices_;
  Index d_ = 0;
  bool allow_duplicates_ = false;
};

SvdBundle compute_svd(const DataMatrix& X);

KLeverageProfile k_leverage_scores(const SvdBundle& svd, Index k);

/// sigma_{k+1}^2 over the mean of the squared tail sigma_{k+1..d}; 1 for an all-zero tail.
/// `sigma` may be shorter than d, missing entries are zero.
double flatness_beta(const Vector& sigma, Index k, Index d);

/// Column indices ordered by decreasing score, ties by smallest index.
std::vector<Index> order_by_score(const Vector& scores);

/// Smallest q such that the q largest scores sum to at least k - 1 + 1/theta.
Index effective_sparsity(const KLeverageProfile& profile, double theta);

/// e_ell(values) by the additive recurrence e_j += x * e_{j-1}.
double elementary_symmetric(const Vector& values, Index ell);

/// (e_0, ..., e_max_ell) of the values.
Vector elementary_symmetric_all(const Vector& values, Index max_ell);

/// sqrt(e_q(squared singular values of A)).
double spanned_volume(const Matrix& A, Index q);

Matrix pseudo_inverse(const Matrix& A);

/// Orthonormal basis of the column space, rank decided by kRankCutoff.
Matrix column_space_basis(const Matrix& A);

/// ||X - C C^+ X|| with C = X[:, S] (repeated columns collapse).
double frobenius_projection_residual(const DataMatrix& X, const SubsetSelection& S, Norm norm);

/// Residual of the best rank-k approximation of X inside span(X[:, S]).
/// Equal to frobenius_projection_residual when S has at most k distinct columns.
double rank_k_projection_residual(const DataMatrix& X, const SubsetSelection& S, Index k,
                                  Norm norm);

/// ||X - Pi_k X||: sigma_{k+1} for the spectral norm, tail root-sum-square for Frobenius.
double best_rank_k_error(const SvdBundle& svd, Index k, Norm norm);

/// Squared projection residuals evaluated in the d x d coordinates diag(sigma) V^T.
///
/// The left factor U has orthonormal columns, so residual norms of X and of
/// diag(sigma) V^T coincide; this makes per-subset evaluation independent of N.
class ResidualEvaluator {
 public:
  explicit ResidualEvaluator(const SvdBundle& svd);

  double residual_sq(std::span<const Index> columns, Norm norm) const;
  double rank_k_residual_sq(std::span<const Index> columns, Index k, Norm norm) const;
  double total_sq() const { return total_sq_; }

 private:
  Matrix reduced_;  // r x d
  double total_sq_ = 0.0;
};

/// Principal angles between span(P) and span(Q), increasing, in [0, pi/2].
/// Requires orthonormal columns and Q.cols() <= P.cols().
Vector principal_angles(const Matrix& P, const Matrix& Q);

/// Tr(Z_S Z_S^T) with Z_S = V_{d-k}^T S (V_k^T S)^{-1}, V a d x d orthogonal matrix.
double tangent_trace(const Matrix& V, const SubsetSelection& S, Index k);

/// Squared spectral norm (largest eigenvalue of A A^T or A^T A).
double spectral_norm_sq(const Matrix& A);

}  // namespace cssdpp
