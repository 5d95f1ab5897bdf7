#include "cssdpp/bounds.hpp"

#include "cssdpp/error.hpp"

#include <cmath>

namespace cssdpp {

namespace {

void require_k_d(Index k, Index d) {
  if (k < 1 || k > d) {
    throw InputError("bounds need 1 <= k <= d");
  }
}

double as_real(Index n) { return static_cast<double>(n); }

}  // namespace

double vs_bound(Index k, Index d, Norm norm) {
  require_k_d(k, d);
  if (k == d) {
    throw InputError("volume sampling bound needs k < d");
  }
  const double base = as_real(k) + 1.0;
  return norm == Norm::Frobenius ? base : as_real(d - k) * base;
}

double dpp_generic_bound(Index k, Index d) {
  require_k_d(k, d);
  return as_real(k) * as_real(d + 1 - k);
}

SparseFactors dpp_sparse_bounds(Index k, Index d, Index p, double beta) {
  require_k_d(k, d);
  if (p < k || p > d) {
    throw InputError("sparsity level must lie in [k, d]");
  }
  SparseFactors f;
  // The sharper-looking k(p - k) is exceeded on projection spectra (for
  // k = 3, p = 5 the exact expectation can reach 6.8 sigma_{k+1}^2); the
  // double-sum argument only yields k(p - k + 1).
  f.spectral = as_real(k) * as_real(p - k + 1);
  f.frobenius = k == d ? 1.0 : 1.0 + beta * as_real(k) * as_real(p - k) / as_real(d - k);
  return f;
}

EffectiveSparsityFactors dpp_peff_bounds(Index k, Index d, Index p_eff, double theta,
                                         double beta) {
  require_k_d(k, d);
  if (!(theta > 1.0)) {
    throw InputError("effective sparsity bounds need theta > 1");
  }
  if (p_eff < k || p_eff > d) {
    throw InputError("effective sparsity must lie in [k, d]");
  }
  const double spread = as_real(p_eff - k + 1) * (as_real(k) - 1.0 + theta);
  EffectiveSparsityFactors f;
  f.spectral = spread;
  f.frobenius = k == d ? 1.0 : 1.0 + beta * spread / as_real(d - k);
  f.accept_prob_lb = 1.0 / theta;
  return f;
}

double excess_risk_bound(RiskBoundKind kind, const RiskBoundParams& q) {
  if (q.n_rows < 1) {
    throw InputError("risk bounds need N >= 1");
  }
  const double n = as_real(q.n_rows);
  const double bias_unit = q.w_norm * q.w_norm * q.sigma_next * q.sigma_next / n;
  const double variance = q.noise_var * as_real(q.k) / n;
  switch (kind) {
    case RiskBoundKind::Ols:
      return q.noise_var * as_real(q.rank) / n;
    case RiskBoundKind::Pcr:
      return bias_unit + variance;
    case RiskBoundKind::CssSubset:
      return (1.0 + q.max_tan_sq) * bias_unit + variance;
    case RiskBoundKind::Dpp:
      if (q.p < q.k) {
        throw InputError("dpp risk bound needs p >= k");
      }
      return (1.0 + as_real(q.k) * as_real(q.p - q.k)) * bias_unit + variance;
    case RiskBoundKind::DppConditional:
      if (q.p_eff < q.k || !(q.theta > 1.0)) {
        throw InputError("conditional dpp risk bound needs p_eff >= k and theta > 1");
      }
      return (1.0 + (as_real(q.k) - 1.0 + q.theta) * as_real(q.p_eff - q.k + 1)) * bias_unit +
             variance;
  }
  throw InputError("unhandled risk bound kind");
}

std::uint64_t drmamu_sample_size(Index k, double eps, double delta) {
  if (k < 1 || !(eps > 0.0) || !(delta > 0.0) || delta > 1.0) {
    throw InputError("sample size needs k >= 1, eps > 0 and delta in (0, 1]");
  }
  const double s = 4000.0 * as_real(k) * as_real(k) / (eps * eps) * std::log(1.0 / delta);
  // log(1/e) is not exactly -1 in floating point; forgive a few ulps before rounding up.
  return static_cast<std::uint64_t>(std::ceil(s * (1.0 - 1e-12)));
}

std::vector<BoundReport> bound_reports(const SvdBundle& svd, Index k, double theta) {
  const KLeverageProfile profile = k_leverage_scores(svd, k);
  const Index d = svd.n_cols();
  const Index p_eff = effective_sparsity(profile, theta);
  const double fro_sq = std::pow(best_rank_k_error(svd, k, Norm::Frobenius), 2);
  const double spe_sq = std::pow(best_rank_k_error(svd, k, Norm::Spectral), 2);

  std::vector<BoundReport> out;
  auto add = [&](std::string selector, Norm norm, double factor, double reference_sq) {
    BoundReport r;
    r.selector = std::move(selector);
    r.norm = norm;
    r.bound_factor = factor;
    r.reference_sq = reference_sq;
    r.bound_value = factor * reference_sq;
    r.k = k;
    r.d = d;
    r.p = profile.sparsity_p;
    r.p_eff = p_eff;
    r.theta = theta;
    r.beta = profile.beta;
    out.push_back(std::move(r));
  };

  if (k < d) {
    add("vs", Norm::Frobenius, vs_bound(k, d, Norm::Frobenius), fro_sq);
    add("vs", Norm::Spectral, vs_bound(k, d, Norm::Spectral), fro_sq);
  }
  add("dpp-generic", Norm::Frobenius, dpp_generic_bound(k, d), fro_sq);
  add("dpp-generic", Norm::Spectral, dpp_generic_bound(k, d), spe_sq);
  const SparseFactors sparse = dpp_sparse_bounds(k, d, profile.sparsity_p, profile.beta);
  add("dpp-sparse", Norm::Frobenius, sparse.frobenius, fro_sq);
  add("dpp-sparse", Norm::Spectral, sparse.spectral, spe_sq);
  const EffectiveSparsityFactors eff = dpp_peff_bounds(k, d, p_eff, theta, profile.beta);
  add("dpp-conditional", Norm::Frobenius, eff.frobenius, fro_sq);
  add("dpp-conditional", Norm::Spectral, eff.spectral, spe_sq);
  return out;
}

}  // namespace cssdpp
