#include "cssdpp/samplers.hpp"

#include "cssdpp/error.hpp"
#include "cssdpp/subsets.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace cssdpp {

namespace {

struct NamedSelector {
  std::string_view name;
  SelectorKind kind;
};

constexpr std::array<NamedSelector, 9> kSelectorNames{{
    {"dpp", SelectorKind::ProjectionDpp},
    {"vs", SelectorKind::VolumeSampling},
    {"leverage", SelectorKind::LeverageMultinomial},
    {"length-square", SelectorKind::LengthSquare},
    {"largest-leverage", SelectorKind::LargestLeverage},
    {"threshold", SelectorKind::ThresholdSelect},
    {"pivoted-qr", SelectorKind::PivotedQr},
    {"double-phase", SelectorKind::DoublePhase},
    {"rejection-dpp", SelectorKind::RejectionDpp},
}};

std::span<const double> as_span(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

void require_rank(const SvdBundle& svd, Index k) {
  if (k < 1) {
    throw InputError("k must be at least 1");
  }
  if (k > svd.rank) {
    std::ostringstream msg;
    msg << "k = " << k << " exceeds the numerical rank " << svd.rank;
    throw RankError(msg.str());
  }
}

SubsetSelection multinomial(const Vector& weights, Index s, Rng& rng) {
  if (s < 1) {
    throw InputError("multinomial sample size must be at least 1");
  }
  std::vector<Index> draws(static_cast<std::size_t>(s));
  for (auto& j : draws) {
    j = static_cast<Index>(rng.categorical(as_span(weights)));
  }
  return SubsetSelection(std::move(draws), weights.size(), true);
}

}  // namespace

bool SelectorSpec::randomized() const {
  return kind != SelectorKind::LargestLeverage && kind != SelectorKind::ThresholdSelect &&
         kind != SelectorKind::PivotedQr;
}

bool SelectorSpec::variable_size() const {
  return kind == SelectorKind::LeverageMultinomial || kind == SelectorKind::LengthSquare ||
         kind == SelectorKind::ThresholdSelect;
}

std::string_view selector_name(SelectorKind kind) {
  for (const auto& entry : kSelectorNames) {
    if (entry.kind == kind) {
      return entry.name;
    }
  }
  return "unknown";
}

SelectorKind parse_selector(std::string_view name) {
  for (const auto& entry : kSelectorNames) {
    if (entry.name == name) {
      return entry.kind;
    }
  }
  throw InputError("unknown algorithm '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Projection DPP

ProjectionDppSampler::ProjectionDppSampler(Matrix Vk) : Vk_(std::move(Vk)) {
  if (Vk_.cols() < 1 || Vk_.cols() > Vk_.rows()) {
    throw InputError("projection DPP needs a d x k basis with 1 <= k <= d");
  }
  const Matrix gram = Vk_.transpose() * Vk_;
  if ((gram - Matrix::Identity(k(), k())).cwiseAbs().maxCoeff() > 1e-8) {
    throw InputError("projection DPP basis must have orthonormal columns");
  }
  W_.resize(Vk_.rows(), Vk_.cols());
  row_mass_.resize(Vk_.rows());
  v_.resize(Vk_.rows());
}

SubsetSelection ProjectionDppSampler::sample(Rng& rng) {
  std::vector<Index> out;
  sample_into(rng, out);
  return SubsetSelection(std::move(out), d());
}

void ProjectionDppSampler::sample_into(Rng& rng, std::vector<Index>& out) {
  run(Vk_, rng, out);
}

void ProjectionDppSampler::run(const Matrix& basis, Rng& rng, std::vector<Index>& out) {
  const Index k = basis.cols();
  W_ = basis;
  out.clear();
  Index m = k;  // active columns are W_.leftCols(m)
  for (Index step = 0; step < k; ++step) {
    row_mass_ = W_.leftCols(m).rowwise().squaredNorm();
    for (Index chosen : out) {
      row_mass_(chosen) = 0.0;
    }
    const auto i = static_cast<Index>(rng.categorical(as_span(row_mass_)));
    out.push_back(i);
    if (m == 1) {
      break;
    }

    // v spans the image of e_i under the current projection. Dropping the
    // column with the largest coefficient on row i keeps a spanning set of
    // the remaining space once v is projected out.
    const double norm_w = W_.row(i).head(m).norm();
    Index drop = 0;
    W_.row(i).head(m).cwiseAbs().maxCoeff(&drop);
    v_.noalias() = W_.leftCols(m) * W_.row(i).head(m).transpose();
    v_ /= norm_w;
    W_.col(drop).swap(W_.col(m - 1));
    --m;

    for (Index j = 0; j < m; ++j) {
      auto c = W_.col(j);
      for (int pass = 0; pass < 2; ++pass) {
        c -= v_ * v_.dot(c);
        for (Index l = 0; l < j; ++l) {
          c -= W_.col(l) * W_.col(l).dot(c);
        }
      }
      const double norm_c = c.norm();
      if (!(norm_c > 1e-10)) {
        throw InvariantViolation("projection DPP basis lost rank during conditioning");
      }
      c /= norm_c;
    }
  }
  std::sort(out.begin(), out.end());
}

SubsetSelection projection_dpp_sample(const Matrix& Vk, Rng& rng) {
  return ProjectionDppSampler(Vk).sample(rng);
}

// ---------------------------------------------------------------------------
// Volume sampling

VolumeSampler::VolumeSampler(const SvdBundle& svd, Index k)
    : V_(svd.V), k_(k), dpp_((require_rank(svd, k), Matrix(svd.V.leftCols(k)))) {
  const Index r = svd.rank;
  lambda_ = (svd.sigma / svd.sigma(0)).array().square().matrix();
  tail_e_ = Matrix::Zero(r + 1, k + 1);
  tail_e_(r, 0) = 1.0;
  for (Index i = r - 1; i >= 0; --i) {
    tail_e_(i, 0) = 1.0;
    for (Index j = 1; j <= k; ++j) {
      tail_e_(i, j) = tail_e_(i + 1, j) + lambda_(i) * tail_e_(i + 1, j - 1);
    }
  }
  if (!(tail_e_(0, k) > 0.0) || !std::isfinite(tail_e_(0, k))) {
    throw InvariantViolation("volume sampling normalizer underflowed");
  }
  basis_.resize(V_.rows(), k);
}

std::vector<Index> VolumeSampler::sample_component(Rng& rng) const {
  // Decide membership of 0, 1, ..., r-1 in turn from the exact conditional
  // inclusion probabilities lambda_i e_{m-1}(tail after i) / e_m(tail from i).
  const Index r = lambda_.size();
  std::vector<Index> T;
  T.reserve(static_cast<std::size_t>(k_));
  Index m = k_;
  for (Index i = 0; i < r && m > 0; ++i) {
    if (r - i == m) {
      T.push_back(i);
      --m;
      continue;
    }
    const double denom = tail_e_(i, m);
    const double p = denom > 0.0 ? lambda_(i) * tail_e_(i + 1, m - 1) / denom : 0.0;
    if (rng.uniform() < p) {
      T.push_back(i);
      --m;
    }
  }
  return T;
}

void VolumeSampler::sample_into(Rng& rng, std::vector<Index>& out) {
  const std::vector<Index> T = sample_component(rng);
  for (Index j = 0; j < k_; ++j) {
    basis_.col(j) = V_.col(T[static_cast<std::size_t>(j)]);
  }
  dpp_.run(basis_, rng, out);
}

SubsetSelection VolumeSampler::sample(Rng& rng) {
  std::vector<Index> out;
  sample_into(rng, out);
  return SubsetSelection(std::move(out), V_.rows());
}

SubsetSelection volume_sampling_sample(const SvdBundle& svd, Index k, Rng& rng) {
  return VolumeSampler(svd, k).sample(rng);
}

SubsetSelection volume_sampling_sample(const DataMatrix& X, Index k, Rng& rng) {
  return volume_sampling_sample(compute_svd(X), k, rng);
}

std::vector<double> mixture_weights(const Vector& sigma, Index k) {
  const Index r = sigma.size();
  if (k < 1) {
    throw InputError("mixture weights need k >= 1");
  }
  if (k > r) {
    throw RankError("mixture weights need k <= r");
  }
  if (r > 30 || binomial(r, k) > 2'000'000) {
    throw CapacityError("mixture weights are only materialized for r <= 30");
  }
  const double scale = sigma.cwiseAbs().maxCoeff();
  if (!(scale > 0.0)) {
    throw InvariantViolation("mixture weights of an all-zero spectrum");
  }
  const Vector lambda = (sigma / scale).array().square().matrix();
  std::vector<double> weights;
  weights.reserve(binomial(r, k));
  std::vector<Index> T = first_combination(k);
  double total = 0.0;
  do {
    double w = 1.0;
    for (Index i : T) {
      w *= lambda(i);
    }
    weights.push_back(w);
    total += w;
  } while (next_combination(T, r));
  for (double& w : weights) {
    w /= total;
  }
  return weights;
}

// ---------------------------------------------------------------------------
// Multinomial and deterministic score-based selectors

SubsetSelection leverage_multinomial_sample(const KLeverageProfile& profile, Index s, Rng& rng) {
  return multinomial(profile.scores, s, rng);
}

SubsetSelection length_square_sample(const DataMatrix& X, Index s, Rng& rng) {
  return multinomial(X.values().colwise().squaredNorm().transpose(), s, rng);
}

SubsetSelection largest_leverage_select(const KLeverageProfile& profile, Index k) {
  if (k < 1 || k > profile.d()) {
    throw InputError("largest-leverage selection needs 1 <= k <= d");
  }
  std::vector<Index> order = order_by_score(profile.scores);
  order.resize(static_cast<std::size_t>(k));
  return SubsetSelection(std::move(order), profile.d());
}

SubsetSelection threshold_select(const KLeverageProfile& profile, double theta) {
  const double gap = static_cast<double>(profile.k) - theta;
  if (!(gap >= 0.0 && gap < 1.0)) {
    throw InputError("threshold selection needs k - 1 < theta <= k");
  }
  const std::vector<Index> order = order_by_score(profile.scores);
  double cumulative = 0.0;
  std::vector<Index> chosen;
  for (Index j : order) {
    cumulative += profile.scores(j);
    chosen.push_back(j);
    if (cumulative > theta) {
      return SubsetSelection(std::move(chosen), profile.d());
    }
  }
  // theta = k up to rounding: every column with a nonzero score is needed.
  chosen.clear();
  for (Index j : order) {
    if (profile.scores(j) >= kZeroLeverage) {
      chosen.push_back(j);
    }
  }
  return SubsetSelection(std::move(chosen), profile.d());
}

// ---------------------------------------------------------------------------
// Pivoted QR

SubsetSelection pivoted_qr_select(const Matrix& A, Index k) {
  const Index n = A.cols();
  if (k < 1) {
    throw InputError("k must be at least 1");
  }
  if (k > std::min(A.rows(), n)) {
    throw RankError("pivoted QR cannot produce more pivots than min(rows, cols)");
  }
  Matrix R = A;
  const Vector original = R.colwise().squaredNorm().transpose();
  Vector current = original;
  const double max_norm = std::sqrt(original.maxCoeff());
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  std::vector<Index> pivots;
  for (Index step = 0; step < k; ++step) {
    Index best = -1;
    for (Index j = 0; j < n; ++j) {
      if (!used[static_cast<std::size_t>(j)] && (best < 0 || current(j) > current(best))) {
        best = j;
      }
    }
    const double pivot_norm = R.col(best).norm();
    if (!(max_norm > 0.0) || pivot_norm <= kRankCutoff * max_norm) {
      std::ostringstream msg;
      msg << "matrix is rank deficient after " << step << " pivots (k = " << k << ")";
      throw RankError(msg.str());
    }
    used[static_cast<std::size_t>(best)] = true;
    pivots.push_back(best);
    const Vector q = R.col(best) / pivot_norm;
    for (Index j = 0; j < n; ++j) {
      if (used[static_cast<std::size_t>(j)]) {
        continue;
      }
      const double r = q.dot(R.col(j));
      R.col(j) -= r * q;
      current(j) -= r * r;
      // Downdating loses relative accuracy once most of the norm is gone.
      if (current(j) < 1e-6 * original(j)) {
        current(j) = R.col(j).squaredNorm();
      }
    }
  }
  return SubsetSelection(std::move(pivots), n);
}

SubsetSelection pivoted_qr_select(const DataMatrix& X, Index k) {
  return pivoted_qr_select(X.values(), k);
}

// ---------------------------------------------------------------------------
// Double phase

SubsetSelection double_phase_select(const SvdBundle& svd, Index k, Index c, Rng& rng) {
  if (c <= k) {
    throw InputError("double phase needs c > k");
  }
  const KLeverageProfile profile = k_leverage_scores(svd, k);
  const Vector p = profile.scores / static_cast<double>(k);
  const Matrix Vk = svd.V.leftCols(k);
  constexpr int kAttempts = 100;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    const std::vector<Index> drawn = multinomial(profile.scores, c, rng).distinct();
    if (static_cast<Index>(drawn.size()) < k) {
      continue;
    }
    Matrix sketch(k, static_cast<Index>(drawn.size()));
    for (std::size_t t = 0; t < drawn.size(); ++t) {
      const Index j = drawn[t];
      sketch.col(static_cast<Index>(t)) =
          Vk.row(j).transpose() / std::sqrt(static_cast<double>(c) * p(j));
    }
    try {
      const SubsetSelection local = pivoted_qr_select(sketch, k);
      std::vector<Index> chosen;
      for (Index t : local.indices()) {
        chosen.push_back(drawn[static_cast<std::size_t>(t)]);
      }
      return SubsetSelection(std::move(chosen), svd.n_cols());
    } catch (const RankError&) {
      // The drawn rows of V_k do not span R^k; draw again.
    }
  }
  throw RejectionBudgetError("double phase drew a rank-deficient preselection 100 times");
}

// ---------------------------------------------------------------------------
// Rejection DPP

std::vector<Index> avoided_columns(const KLeverageProfile& profile, double theta) {
  const Index q = effective_sparsity(profile, theta);
  std::vector<Index> order = order_by_score(profile.scores);
  std::vector<Index> avoided(order.begin() + q, order.end());
  std::sort(avoided.begin(), avoided.end());
  return avoided;
}

RejectionResult rejection_dpp_sample(const Matrix& Vk, const KLeverageProfile& profile,
                                     double theta, Rng& rng) {
  const std::vector<Index> avoided = avoided_columns(profile, theta);
  std::vector<bool> banned(static_cast<std::size_t>(profile.d()), false);
  for (Index j : avoided) {
    banned[static_cast<std::size_t>(j)] = true;
  }
  ProjectionDppSampler sampler(Vk);
  const auto budget = static_cast<Index>(std::ceil(100.0 * theta));
  std::vector<Index> draw;
  for (Index attempt = 1; attempt <= budget; ++attempt) {
    sampler.sample_into(rng, draw);
    const bool accepted = std::none_of(draw.begin(), draw.end(), [&](Index j) {
      return banned[static_cast<std::size_t>(j)];
    });
    if (accepted) {
      return {SubsetSelection(draw, profile.d()), attempt};
    }
  }
  std::ostringstream msg;
  msg << "rejection DPP exhausted its budget of " << budget << " attempts";
  throw RejectionBudgetError(msg.str());
}

// ---------------------------------------------------------------------------

SubsetSelection select(const SelectorSpec& spec, const DataMatrix& X, const SvdBundle& svd,
                       Index k, Rng& rng) {
  require_rank(svd, k);
  const Index draws = spec.draws > 0 ? spec.draws : k;
  switch (spec.kind) {
    case SelectorKind::ProjectionDpp:
      return projection_dpp_sample(svd.V.leftCols(k), rng);
    case SelectorKind::VolumeSampling:
      return volume_sampling_sample(svd, k, rng);
    case SelectorKind::LeverageMultinomial:
      return leverage_multinomial_sample(k_leverage_scores(svd, k), draws, rng);
    case SelectorKind::LengthSquare:
      return length_square_sample(X, draws, rng);
    case SelectorKind::LargestLeverage:
      return largest_leverage_select(k_leverage_scores(svd, k), k);
    case SelectorKind::ThresholdSelect:
      return threshold_select(k_leverage_scores(svd, k),
                              spec.threshold.value_or(static_cast<double>(k) - 0.5));
    case SelectorKind::PivotedQr:
      return pivoted_qr_select(X, k);
    case SelectorKind::DoublePhase:
      return double_phase_select(svd, k, spec.c > 0 ? spec.c : 10 * k, rng);
    case SelectorKind::RejectionDpp:
      return rejection_dpp_sample(svd.V.leftCols(k), k_leverage_scores(svd, k), spec.theta, rng)
          .selection;
  }
  throw InputError("unhandled selector");
}

}  // namespace cssdpp
