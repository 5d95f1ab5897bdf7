#pragma once

#include "cssdpp/linalg.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cssdpp {

// All factors multiply a squared PCA error ||X - Pi_k X||^2.

/// Volume sampling. The spectral factor multiplies the squared Frobenius PCA
/// error, not the spectral one.
double vs_bound(Index k, Index d, Norm norm);

/// Projection DPP without structural assumptions, either norm.
double dpp_generic_bound(Index k, Index d);

struct SparseFactors {
  double spectral = 0.0;
  double frobenius = 0.0;
};

/// Projection DPP when only p leverage scores are nonzero.
SparseFactors dpp_sparse_bounds(Index k, Index d, Index p, double beta);

struct EffectiveSparsityFactors {
  double spectral = 0.0;
  double frobenius = 0.0;
  double accept_prob_lb = 0.0;
};

/// Projection DPP conditioned on avoiding the columns past p_eff(theta).
EffectiveSparsityFactors dpp_peff_bounds(Index k, Index d, Index p_eff, double theta,
                                         double beta);

enum class RiskBoundKind { CssSubset, Dpp, DppConditional, Pcr, Ols };

struct RiskBoundParams {
  Index k = 0;
  Index p = 0;            // dpp
  Index p_eff = 0;        // dpp_conditional
  double theta = 2.0;     // dpp_conditional
  double max_tan_sq = 0;  // css_subset: max_i tan^2 of principal angles
  Index rank = 0;         // ols
  Index n_rows = 1;
  double w_norm = 0.0;      // ||w*||
  double sigma_next = 0.0;  // sigma_{k+1}
  double noise_var = 0.0;   // v
};

double excess_risk_bound(RiskBoundKind kind, const RiskBoundParams& params);

/// Column count sufficient for the relative-error guarantee of leverage
/// multinomial sampling: ceil(4000 k^2 / eps^2 * log(1/delta)).
std::uint64_t drmamu_sample_size(Index k, double eps, double delta);

struct BoundReport {
  std::string selector;
  Norm norm = Norm::Frobenius;
  double bound_factor = 1.0;
  double reference_sq = 0.0;  // squared PCA error the factor multiplies
  double bound_value = 0.0;   // bound_factor * reference_sq
  Index k = 0;
  Index d = 0;
  Index p = 0;
  Index p_eff = 0;
  double theta = 0.0;
  double beta = 1.0;
};

/// Every approximation bound that applies to (svd, k), with theta used for
/// the effective-sparsity bounds.
std::vector<BoundReport> bound_reports(const SvdBundle& svd, Index k, double theta);

}  // namespace cssdpp
