#pragma once

#include "cssdpp/linalg.hpp"
#include "cssdpp/rng.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cssdpp {

enum class SelectorKind {
  ProjectionDpp,
  VolumeSampling,
  LeverageMultinomial,
  LengthSquare,
  LargestLeverage,
  ThresholdSelect,
  PivotedQr,
  DoublePhase,
  RejectionDpp,
};

/// Selector plus its parameters. Zero / unset parameters take defaults
/// relative to k when the selector runs.
struct SelectorSpec {
  SelectorKind kind = SelectorKind::ProjectionDpp;
  Index draws = 0;                   // multinomial sample size s, default k
  Index c = 0;                       // double-phase preselection size, default 10k
  double theta = 2.0;                // rejection DPP
  std::optional<double> threshold;   // threshold selection, default k - 1/2

  bool randomized() const;
  /// True for selectors that may return repeated or more than k columns.
  bool variable_size() const;
};

std::string_view selector_name(SelectorKind kind);
SelectorKind parse_selector(std::string_view name);

/// Chain-rule sampler for the projection DPP with marginal kernel Vk Vk^T.
///
/// Holds its workspace so repeated draws from the same kernel do not allocate.
class ProjectionDppSampler {
 public:
  explicit ProjectionDppSampler(Matrix Vk);

  SubsetSelection sample(Rng& rng);
  /// Sorted indices written into `out`.
  void sample_into(Rng& rng, std::vector<Index>& out);

  Index d() const { return Vk_.rows(); }
  Index k() const { return Vk_.cols(); }

 private:
  friend class VolumeSampler;
  void run(const Matrix& basis, Rng& rng, std::vector<Index>& out);

  Matrix Vk_;
  Matrix W_;
  Vector row_mass_;
  Vector v_;
};

/// Volume sampling as a mixture of projection DPPs over k-subsets T of the
/// right singular vectors, T drawn with probability proportional to the
/// product of the squared singular values in T.
class VolumeSampler {
 public:
  VolumeSampler(const SvdBundle& svd, Index k);

  SubsetSelection sample(Rng& rng);
  void sample_into(Rng& rng, std::vector<Index>& out);
  /// Draws only the mixture component T (sorted indices into [0, r)).
  std::vector<Index> sample_component(Rng& rng) const;

 private:
  Matrix V_;
  Vector lambda_;   // sigma^2 / sigma_1^2
  Matrix tail_e_;   // tail_e_(i, j) = e_j(lambda_i, ..., lambda_{r-1})
  Index k_;
  ProjectionDppSampler dpp_;
  Matrix basis_;
};

SubsetSelection projection_dpp_sample(const Matrix& Vk, Rng& rng);
SubsetSelection volume_sampling_sample(const SvdBundle& svd, Index k, Rng& rng);
SubsetSelection volume_sampling_sample(const DataMatrix& X, Index k, Rng& rng);

/// Normalized mixture weights over the k-subsets of [0, r), lexicographic order.
std::vector<double> mixture_weights(const Vector& sigma, Index k);

SubsetSelection leverage_multinomial_sample(const KLeverageProfile& profile, Index s, Rng& rng);
SubsetSelection length_square_sample(const DataMatrix& X, Index s, Rng& rng);
SubsetSelection largest_leverage_select(const KLeverageProfile& profile, Index k);

/// The c(theta) columns of largest score, c(theta) the first count whose
/// cumulative score exceeds theta. Requires k - 1 < theta <= k.
SubsetSelection threshold_select(const KLeverageProfile& profile, double theta);

/// First k pivots of column-pivoted QR (greedy maximal residual norm).
SubsetSelection pivoted_qr_select(const Matrix& A, Index k);
SubsetSelection pivoted_qr_select(const DataMatrix& X, Index k);

SubsetSelection double_phase_select(const SvdBundle& svd, Index k, Index c, Rng& rng);

/// Columns beyond the p_eff(theta) largest scores.
std::vector<Index> avoided_columns(const KLeverageProfile& profile, double theta);

struct RejectionResult {
  SubsetSelection selection;
  Index attempts = 0;
};

RejectionResult rejection_dpp_sample(const Matrix& Vk, const KLeverageProfile& profile,
                                     double theta, Rng& rng);

/// Runs any selector. `svd` must be compute_svd(X).
SubsetSelection select(const SelectorSpec& spec, const DataMatrix& X, const SvdBundle& svd,
                       Index k, Rng& rng);

}  // namespace cssdpp
