#include "cssdpp/oracle.hpp"

#include "cssdpp/error.hpp"
#include "cssdpp/parallel.hpp"
#include "cssdpp/samplers.hpp"
#include "cssdpp/subsets.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cssdpp {

namespace {

constexpr std::uint64_t kChunk = 4096;

std::uint64_t checked_count(Index d, Index k) {
  if (k < 1 || k > d) {
    throw InputError("enumeration needs 1 <= k <= d");
  }
  const std::uint64_t count = binomial(d, k);
  if (count > kEnumerationCap) {
    std::ostringstream msg;
    msg << "C(" << d << ", " << k << ") = " << count << " subsets exceeds the enumeration cap of "
        << kEnumerationCap;
    throw CapacityError(msg.str());
  }
  return count;
}

double gram_determinant(const Matrix& A) {
  // det(A^T A) as the squared product of the R diagonal of a QR factorization.
  const Eigen::HouseholderQR<Matrix> qr(A);
  double det = 1.0;
  for (Index i = 0; i < A.cols(); ++i) {
    const double r = qr.matrixQR()(i, i);
    det *= r * r;
  }
  return det;
}

}  // namespace

std::vector<Index> SubsetLaw::subset(std::uint64_t rank) const {
  return unrank_combination(rank, d, k);
}

double SubsetLaw::probability(const std::vector<Index>& sorted_subset) const {
  return weights[rank_combination(sorted_subset, d)];
}

std::vector<double> map_subsets(Index d, Index k,
                                const std::function<double(const std::vector<Index>&)>& fn) {
  const std::uint64_t count = checked_count(d, k);
  std::vector<double> values(count);
  const std::uint64_t n_chunks = (count + kChunk - 1) / kChunk;
  parallel_tasks(n_chunks, [&](std::size_t chunk) {
    const std::uint64_t begin = chunk * kChunk;
    const std::uint64_t end = std::min(count, begin + kChunk);
    std::vector<Index> subset = unrank_combination(begin, d, k);
    for (std::uint64_t rank = begin; rank < end; ++rank) {
      values[rank] = fn(subset);
      next_combination(subset, d);
    }
  });
  return values;
}

std::vector<double> law_weights(const SvdBundle& svd, Index k, LawKind kind) {
  if (k > svd.rank) {
    throw RankError("law needs k <= rank");
  }
  const Index d = svd.n_cols();
  if (kind == LawKind::Dpp) {
    const Matrix Vk = svd.V.leftCols(k);
    return map_subsets(d, k, [&](const std::vector<Index>& S) {
      Matrix block(k, k);
      for (Index i = 0; i < k; ++i) {
        block.row(i) = Vk.row(S[static_cast<std::size_t>(i)]);
      }
      const double det = block.partialPivLu().determinant();
      return det * det;
    });
  }
  const Matrix Y = svd.sigma.asDiagonal() * svd.V.transpose();
  return map_subsets(d, k, [&](const std::vector<Index>& S) {
    Matrix cols(Y.rows(), k);
    for (Index i = 0; i < k; ++i) {
      cols.col(i) = Y.col(S[static_cast<std::size_t>(i)]);
    }
    return gram_determinant(cols);
  });
}

SubsetLaw enumerate_law(const SvdBundle& svd, Index k, LawKind kind) {
  SubsetLaw law;
  law.k = k;
  law.d = svd.n_cols();
  law.weights = law_weights(svd, k, kind);
  double total = 0.0;
  for (double w : law.weights) {
    total += w;
  }
  const double expected =
      kind == LawKind::Dpp ? 1.0 : elementary_symmetric(svd.sigma.array().square().matrix(), k);
  if (std::abs(total - expected) > 1e-8 * expected) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "enumerated normalizer " << total << " differs from " << expected;
    throw ConsistencyError(msg.str());
  }
  law.normalizer = total;
  for (double& w : law.weights) {
    w /= total;
  }
  return law;
}

SubsetLaw enumerate_law(const DataMatrix& X, Index k, LawKind kind) {
  return enumerate_law(compute_svd(X), k, kind);
}

std::vector<double> subset_errors(const SvdBundle& svd, Index k, Norm norm) {
  const ResidualEvaluator evaluator(svd);
  return map_subsets(svd.n_cols(), k, [&](const std::vector<Index>& S) {
    return evaluator.residual_sq(S, norm);
  });
}

double expectation(const SubsetLaw& law, const std::vector<double>& values) {
  if (values.size() != law.weights.size()) {
    throw InputError("expectation needs one value per subset");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    sum += law.weights[i] * values[i];
  }
  return sum;
}

SubsetLaw condition_on_avoiding(const SubsetLaw& law, const std::vector<Index>& avoided) {
  std::vector<bool> banned(static_cast<std::size_t>(law.d), false);
  for (Index j : avoided) {
    banned[static_cast<std::size_t>(j)] = true;
  }
  SubsetLaw out = law;
  std::vector<Index> S = first_combination(law.k);
  double total = 0.0;
  for (double& w : out.weights) {
    if (std::any_of(S.begin(), S.end(), [&](Index j) { return banned[static_cast<std::size_t>(j)]; })) {
      w = 0.0;
    }
    total += w;
    next_combination(S, law.d);
  }
  if (!(total > 0.0)) {
    throw InvariantViolation("no subset avoids the excluded columns");
  }
  out.normalizer = total;
  for (double& w : out.weights) {
    w /= total;
  }
  return out;
}

double exact_expected_error(const SvdBundle& svd, Index k, LawKind kind, Norm norm) {
  return expectation(enumerate_law(svd, k, kind), subset_errors(svd, k, norm));
}

double exact_expected_error(const DataMatrix& X, Index k, LawKind kind, Norm norm) {
  return exact_expected_error(compute_svd(X), k, kind, norm);
}

AvoidingProbability avoiding_probability_paths(const Matrix& Vk, const KLeverageProfile& profile,
                                               double theta) {
  const Index d = Vk.rows();
  const Index k = Vk.cols();
  const std::vector<Index> avoided = avoided_columns(profile, theta);
  std::vector<Index> kept;
  for (Index j = 0, a = 0; j < d; ++j) {
    if (a < static_cast<Index>(avoided.size()) && avoided[static_cast<std::size_t>(a)] == j) {
      ++a;
    } else {
      kept.push_back(j);
    }
  }
  const auto q = static_cast<Index>(kept.size());
  Matrix Vp(q, k);
  for (Index i = 0; i < q; ++i) {
    Vp.row(i) = Vk.row(kept[static_cast<std::size_t>(i)]);
  }

  AvoidingProbability out;
  if (q >= k) {
    const std::vector<double> dets = map_subsets(q, k, [&](const std::vector<Index>& S) {
      Matrix block(k, k);
      for (Index i = 0; i < k; ++i) {
        block.row(i) = Vp.row(S[static_cast<std::size_t>(i)]);
      }
      const double det = block.partialPivLu().determinant();
      return det * det;
    });
    for (double w : dets) {
      out.enumerated += w;
    }
    // Nonzero spectrum of Vp Vp^T equals that of Vp^T Vp, whose e_k is its determinant.
    const Vector eig =
        Eigen::SelfAdjointEigenSolver<Matrix>(Vp.transpose() * Vp, Eigen::EigenvaluesOnly)
            .eigenvalues();
    out.spectral = elementary_symmetric(eig, k);
  }
  if (std::abs(out.enumerated - out.spectral) > 1e-8) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "avoiding probability disagrees: enumerated " << out.enumerated << ", spectral "
        << out.spectral;
    throw ConsistencyError(msg.str());
  }
  return out;
}

double exact_avoiding_probability(const Matrix& Vk, const KLeverageProfile& profile,
                                  double theta) {
  return avoiding_probability_paths(Vk, profile, theta).enumerated;
}

double exact_conditional_expected_error(const SvdBundle& svd, Index k, double theta, Norm norm) {
  const KLeverageProfile profile = k_leverage_scores(svd, k);
  const SubsetLaw law =
      condition_on_avoiding(enumerate_law(svd, k, LawKind::Dpp), avoided_columns(profile, theta));
  return expectation(law, subset_errors(svd, k, norm));
}

std::vector<double> reweighted_dpp_law(const Matrix& Vk, const Vector& w) {
  const Index k = Vk.cols();
  if (w.size() != k || (w.array() <= 0.0).any()) {
    throw InputError("reweighting needs k positive weights");
  }
  std::vector<double> weights = map_subsets(Vk.rows(), k, [&](const std::vector<Index>& S) {
    Matrix block(k, k);
    for (Index i = 0; i < k; ++i) {
      block.row(i) = Vk.row(S[static_cast<std::size_t>(i)]);
    }
    return Matrix(block * w.asDiagonal() * block.transpose()).determinant();
  });
  double total = 0.0;
  for (double x : weights) {
    total += x;
  }
  for (double& x : weights) {
    x /= total;
  }
  return weights;
}

}  // namespace cssdpp
