#pragma once

#include "cssdpp/linalg.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace cssdpp {

/// Largest number of k-subsets the oracle will enumerate.
inline constexpr std::uint64_t kEnumerationCap = 2'000'000;

enum class LawKind { Dpp, VolumeSampling };

/// Probability of every k-subset of [0, d), indexed by lexicographic rank.
struct SubsetLaw {
  Index k = 0;
  Index d = 0;
  std::vector<double> weights;
  double normalizer = 1.0;  ///< sum of the unnormalized weights

  std::vector<Index> subset(std::uint64_t rank) const;
  double probability(const std::vector<Index>& sorted_subset) const;
};

/// Evaluates fn(subset) for every k-subset of [0, d) in lexicographic order.
/// Work is split into fixed chunks, so the result does not depend on the
/// number of threads.
std::vector<double> map_subsets(Index d, Index k,
                                const std::function<double(const std::vector<Index>&)>& fn);

/// Unnormalized weights: det(V_{S,[k]})^2 for the DPP, det(X_S^T X_S) for volume sampling.
std::vector<double> law_weights(const SvdBundle& svd, Index k, LawKind kind);

/// Normalized law. The DPP normalizer must be 1 and the volume sampling one
/// e_k(sigma^2); a mismatch beyond 1e-8 relative raises ConsistencyError.
SubsetLaw enumerate_law(const SvdBundle& svd, Index k, LawKind kind);
SubsetLaw enumerate_law(const DataMatrix& X, Index k, LawKind kind);

/// Squared residual ||X - Pi_S X||^2 of every k-subset.
std::vector<double> subset_errors(const SvdBundle& svd, Index k, Norm norm);

double expectation(const SubsetLaw& law, const std::vector<double>& values);

/// Restriction of the law to subsets avoiding `avoided`, renormalized.
SubsetLaw condition_on_avoiding(const SubsetLaw& law, const std::vector<Index>& avoided);

double exact_expected_error(const SvdBundle& svd, Index k, LawKind kind, Norm norm);
double exact_expected_error(const DataMatrix& X, Index k, LawKind kind, Norm norm);

struct AvoidingProbability {
  double enumerated = 0.0;  ///< sum of det^2 over avoiding subsets
  double spectral = 0.0;    ///< e_k of the kernel restricted to the kept rows
};

/// Both routes to P(S avoids the columns past p_eff(theta)); raises
/// ConsistencyError if they differ by more than 1e-8.
AvoidingProbability avoiding_probability_paths(const Matrix& Vk, const KLeverageProfile& profile,
                                               double theta);
double exact_avoiding_probability(const Matrix& Vk, const KLeverageProfile& profile,
                                  double theta);

double exact_conditional_expected_error(const SvdBundle& svd, Index k, double theta, Norm norm);

/// Normalized weights proportional to det(V_{S,[k]} diag(w) V_{S,[k]}^T).
std::vector<double> reweighted_dpp_law(const Matrix& Vk, const Vector& w);

}  // namespace cssdpp
