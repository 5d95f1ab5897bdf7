#include "cssdpp/linalg.hpp"

#include "cssdpp/error.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace cssdpp {

namespace {

// Number of singular values above the relative cutoff.
Index numerical_rank(const Vector& sigma) {
  if (sigma.size() == 0 || !(sigma(0) > 0.0)) {
    return 0;
  }
  const double cutoff = kRankCutoff * sigma(0);
  Index r = 0;
  while (r < sigma.size() && sigma(r) > cutoff) {
    ++r;
  }
  return r;
}

Matrix gather_columns(const Matrix& A, std::span<const Index> columns) {
  Matrix out(A.rows(), static_cast<Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) {
    out.col(static_cast<Index>(j)) = A.col(columns[j]);
  }
  return out;
}

double norm_sq(const Matrix& R, Norm norm) {
  return norm == Norm::Frobenius ? R.squaredNorm() : spectral_norm_sq(R);
}

// Residual of Y after projecting onto span(Q), optionally keeping only the best
// rank-k part of the projection.
Matrix projected_residual(const Matrix& Y, const Matrix& Q, Index k) {
  if (Q.cols() == 0) {
    return Y;
  }
  const Matrix B = Q.transpose() * Y;
  if (k < 0 || Q.cols() <= k) {
    return Y - Q * B;
  }
  Eigen::JacobiSVD<Matrix> svd(B, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Matrix Bk = svd.matrixU().leftCols(k) * svd.singularValues().head(k).asDiagonal() *
                    svd.matrixV().leftCols(k).transpose();
  return Y - Q * Bk;
}

}  // namespace

DataMatrix::DataMatrix(Matrix values) : values_(std::move(values)) {
  if (values_.rows() < 1 || values_.cols() < 1) {
    throw InputError("data matrix must have at least one row and one column");
  }
  if (!values_.allFinite()) {
    throw InputError("data matrix contains non-finite entries");
  }
}

SubsetSelection::SubsetSelection(std::vector<Index> indices, Index d, bool allow_duplicates)
    : indices_(std::move(indices)), d_(d), allow_duplicates_(allow_duplicates) {
  std::sort(indices_.begin(), indices_.end());
  for (Index i : indices_) {
    if (i < 0 || i >= d_) {
      std::ostringstream msg;
      msg << "column index " << i << " out of range [0, " << d_ << ")";
      throw InputError(msg.str());
    }
  }
  if (!allow_duplicates_ && std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end()) {
    throw InputError("duplicate column index in a selection without duplicates");
  }
}

bool SubsetSelection::contains(Index column) const {
  return std::binary_search(indices_.begin(), indices_.end(), column);
}

std::vector<Index> SubsetSelection::distinct() const {
  std::vector<Index> out = indices_;
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Matrix SubsetSelection::sampling_matrix() const {
  Matrix S = Matrix::Zero(d_, size());
  for (Index j = 0; j < size(); ++j) {
    S(indices_[static_cast<std::size_t>(j)], j) = 1.0;
  }
  return S;
}

SvdBundle compute_svd(const DataMatrix& X) {
  Eigen::BDCSVD<Matrix> svd(X.values(), Eigen::ComputeThinU | Eigen::ComputeThinV);
  SvdBundle out;
  out.rank = numerical_rank(svd.singularValues());
  out.sigma = svd.singularValues().head(out.rank);
  out.U = svd.matrixU().leftCols(out.rank);
  out.V = svd.matrixV().leftCols(out.rank);
  // Sign convention: first clearly nonzero entry of each right vector is positive.
  for (Index j = 0; j < out.rank; ++j) {
    for (Index i = 0; i < out.V.rows(); ++i) {
      const double v = out.V(i, j);
      if (std::abs(v) > 1e-8) {
        if (v < 0.0) {
          out.V.col(j) *= -1.0;
          out.U.col(j) *= -1.0;
        }
        break;
      }
    }
  }
  return out;
}

KLeverageProfile k_leverage_scores(const SvdBundle& svd, Index k) {
  if (k < 1) {
    throw InputError("k must be at least 1");
  }
  if (k > svd.rank) {
    std::ostringstream msg;
    msg << "k = " << k << " exceeds the numerical rank " << svd.rank;
    throw RankError(msg.str());
  }
  KLeverageProfile profile;
  profile.k = k;
  profile.scores = svd.V.leftCols(k).rowwise().squaredNorm();
  profile.sparsity_p = (profile.scores.array() >= kZeroLeverage).count();
  profile.beta = k < svd.n_cols() ? flatness_beta(svd.sigma, k, svd.n_cols()) : 1.0;
  return profile;
}

double flatness_beta(const Vector& sigma, Index k, Index d) {
  if (k < 0 || k >= d) {
    throw InputError("flatness requires 0 <= k < d");
  }
  double tail = 0.0;
  for (Index j = k; j < std::min<Index>(d, sigma.size()); ++j) {
    tail += sigma(j) * sigma(j);
  }
  if (!(tail > 0.0)) {
    return 1.0;
  }
  const double head = k < sigma.size() ? sigma(k) * sigma(k) : 0.0;
  return head / (tail / static_cast<double>(d - k));
}

std::vector<Index> order_by_score(const Vector& scores) {
  std::vector<Index> order(static_cast<std::size_t>(scores.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return scores(a) > scores(b); });
  return order;
}

Index effective_sparsity(const KLeverageProfile& profile, double theta) {
  if (!(theta > 1.0)) {
    throw InputError("effective sparsity needs theta > 1");
  }
  const double threshold = static_cast<double>(profile.k) - 1.0 + 1.0 / theta;
  double cumulative = 0.0;
  Index q = 0;
  for (Index j : order_by_score(profile.scores)) {
    cumulative += profile.scores(j);
    ++q;
    if (cumulative >= threshold) {
      return q;
    }
  }
  // The scores sum to k, so only rounding can leave the threshold unmet.
  if (cumulative >= threshold - 1e-10) {
    return profile.d();
  }
  throw InvariantViolation("leverage scores sum below k - 1 + 1/theta");
}

Vector elementary_symmetric_all(const Vector& values, Index max_ell) {
  Vector e = Vector::Zero(max_ell + 1);
  e(0) = 1.0;
  for (Index i = 0; i < values.size(); ++i) {
    const double x = values(i);
    for (Index j = std::min(max_ell, i + 1); j >= 1; --j) {
      e(j) += x * e(j - 1);
    }
  }
  return e;
}

double elementary_symmetric(const Vector& values, Index ell) {
  if (ell < 0) {
    throw InputError("elementary symmetric polynomial order must be nonnegative");
  }
  if (ell > values.size()) {
    return 0.0;
  }
  return elementary_symmetric_all(values, ell)(ell);
}

double spanned_volume(const Matrix& A, Index q) {
  const Vector sigma = Eigen::JacobiSVD<Matrix>(A).singularValues();
  const Index r = numerical_rank(sigma);
  if (q < 1 || q > r) {
    std::ostringstream msg;
    msg << "volume order " << q << " outside [1, rank = " << r << "]";
    throw RankError(msg.str());
  }
  return std::sqrt(elementary_symmetric(sigma.head(r).array().square().matrix(), q));
}

Matrix pseudo_inverse(const Matrix& A) {
  Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Index r = numerical_rank(svd.singularValues());
  const Vector inv = svd.singularValues().head(r).cwiseInverse();
  return svd.matrixV().leftCols(r) * inv.asDiagonal() * svd.matrixU().leftCols(r).transpose();
}

Matrix column_space_basis(const Matrix& A) {
  if (A.cols() == 0) {
    return Matrix(A.rows(), 0);
  }
  Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeThinU);
  return svd.matrixU().leftCols(numerical_rank(svd.singularValues()));
}

double frobenius_projection_residual(const DataMatrix& X, const SubsetSelection& S, Norm norm) {
  if (S.size() == 0) {
    throw InputError("projection residual needs a nonempty selection");
  }
  const std::vector<Index> cols = S.distinct();
  const Matrix C = gather_columns(X.values(), cols);
  const Matrix R = X.values() - C * (pseudo_inverse(C) * X.values());
  return std::sqrt(norm_sq(R, norm));
}

double rank_k_projection_residual(const DataMatrix& X, const SubsetSelection& S, Index k,
                                  Norm norm) {
  if (S.size() == 0) {
    throw InputError("projection residual needs a nonempty selection");
  }
  const std::vector<Index> cols = S.distinct();
  const Matrix Q = column_space_basis(gather_columns(X.values(), cols));
  return std::sqrt(norm_sq(projected_residual(X.values(), Q, k), norm));
}

double best_rank_k_error(const SvdBundle& svd, Index k, Norm norm) {
  if (k < 0 || k > svd.rank) {
    throw RankError("best rank-k error needs k <= rank");
  }
  if (norm == Norm::Spectral) {
    return svd.singular_value(k);
  }
  return svd.sigma.tail(svd.rank - k).norm();
}

ResidualEvaluator::ResidualEvaluator(const SvdBundle& svd)
    : reduced_(svd.sigma.asDiagonal() * svd.V.transpose()), total_sq_(svd.sigma.squaredNorm()) {}

double ResidualEvaluator::residual_sq(std::span<const Index> columns, Norm norm) const {
  return rank_k_residual_sq(columns, -1, norm);
}

double ResidualEvaluator::rank_k_residual_sq(std::span<const Index> columns, Index k,
                                             Norm norm) const {
  if (reduced_.rows() == 0) {
    return 0.0;
  }
  const Matrix Q = column_space_basis(gather_columns(reduced_, columns));
  const Matrix R = projected_residual(reduced_, Q, k);
  if (norm == Norm::Frobenius) {
    return R.squaredNorm();
  }
  return spectral_norm_sq(R);
}

double spectral_norm_sq(const Matrix& A) {
  if (A.size() == 0) {
    return 0.0;
  }
  const Matrix G = A.rows() <= A.cols() ? Matrix(A * A.transpose()) : Matrix(A.transpose() * A);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(G, Eigen::EigenvaluesOnly);
  return std::max(0.0, eig.eigenvalues().maxCoeff());
}

namespace {

void require_orthonormal(const Matrix& A, const char* name) {
  const Matrix gram = A.transpose() * A;
  const double err = (gram - Matrix::Identity(A.cols(), A.cols())).cwiseAbs().maxCoeff();
  if (A.cols() > 0 && err > 1e-8) {
    std::ostringstream msg;
    msg << name << " does not have orthonormal columns (max deviation " << err << ")";
    throw InputError(msg.str());
  }
}

}  // namespace

Vector principal_angles(const Matrix& P, const Matrix& Q) {
  if (P.rows() != Q.rows()) {
    throw InputError("principal angles need subspaces of the same ambient space");
  }
  if (Q.cols() > P.cols()) {
    throw InputError("principal angles need dim(Q) <= dim(P)");
  }
  require_orthonormal(P, "P");
  require_orthonormal(Q, "Q");
  const Vector cosines = Eigen::JacobiSVD<Matrix>(Q.transpose() * P).singularValues();
  Vector angles(Q.cols());
  for (Index i = 0; i < Q.cols(); ++i) {
    const double c = i < cosines.size() ? std::clamp(cosines(i), 0.0, 1.0) : 0.0;
    angles(i) = std::acos(c);
  }
  return angles;
}

double tangent_trace(const Matrix& V, const SubsetSelection& S, Index k) {
  const Index d = V.rows();
  if (V.cols() != d || k < 1 || k > d) {
    throw InputError("tangent trace needs a square V and 1 <= k <= d");
  }
  const std::vector<Index> cols = S.distinct();
  if (static_cast<Index>(cols.size()) != k) {
    throw InputError("tangent trace needs exactly k distinct columns");
  }
  Matrix A(k, k);      // V_k^T S
  Matrix B(d - k, k);  // V_{d-k}^T S
  for (Index j = 0; j < k; ++j) {
    const Index row = cols[static_cast<std::size_t>(j)];
    A.col(j) = V.row(row).head(k).transpose();
    B.col(j) = V.row(row).tail(d - k).transpose();
  }
  Eigen::FullPivLU<Matrix> lu(A);
  if (std::abs(lu.determinant()) <= 1e-12) {
    throw SingularityError("V_k^T S is singular");
  }
  // Z = B A^{-1}, so Z^T solves A^T Z^T = B^T.
  const Matrix Zt = A.transpose().fullPivLu().solve(B.transpose());
  return Zt.squaredNorm();
}

}  // namespace cssdpp
