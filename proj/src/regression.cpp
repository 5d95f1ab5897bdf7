#include "cssdpp/regression.hpp"

#include "cssdpp/bounds.hpp"
#include "cssdpp/error.hpp"
#include "cssdpp/parallel.hpp"

#include <cmath>
#include <limits>

namespace cssdpp {

namespace {

Vector noisy_response(const RegressionProblem& problem, const Vector& signal, Rng& rng) {
  const double scale = std::sqrt(problem.noise_variance);
  Vector y = signal;
  for (Index i = 0; i < y.size(); ++i) {
    y(i) += scale * rng.normal();
  }
  return y;
}

RiskEstimate summarize(const std::vector<double>& losses) {
  RiskEstimate out;
  out.trials = static_cast<Index>(losses.size());
  double sum = 0.0;
  for (double x : losses) {
    sum += x;
  }
  out.mean = sum / static_cast<double>(losses.size());
  double ss = 0.0;
  for (double x : losses) {
    ss += (x - out.mean) * (x - out.mean);
  }
  const double n = static_cast<double>(losses.size());
  out.std_error = std::sqrt(ss / (n - 1.0) / n);
  return out;
}

void require_trials(Index trials) {
  if (trials < 2) {
    throw InputError("Monte Carlo risk needs at least 2 trials");
  }
}

}  // namespace

Vector sparse_ols(const Matrix& X, const Vector& y, const SubsetSelection& S) {
  if (S.size() == 0) {
    throw InputError("sparse OLS needs a nonempty selection");
  }
  if (y.size() != X.rows()) {
    throw InputError("response length differs from the number of rows");
  }
  const std::vector<Index> cols = S.distinct();
  Matrix C(X.rows(), static_cast<Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    C.col(static_cast<Index>(j)) = X.col(cols[j]);
  }
  const Vector wS = pseudo_inverse(C) * y;
  Vector w = Vector::Zero(X.cols());
  for (std::size_t j = 0; j < cols.size(); ++j) {
    w(cols[j]) = wS(static_cast<Index>(j));
  }
  return w;
}

double excess_loss(const RegressionProblem& problem, const Vector& w) {
  const Matrix& X = problem.X.values();
  return (X * (problem.w_star - w)).squaredNorm() / static_cast<double>(problem.n_rows());
}

RiskEstimate excess_risk_mc(const RegressionProblem& problem, const SubsetDrawer& selector,
                            Index trials, const Rng& rng) {
  require_trials(trials);
  const Matrix& X = problem.X.values();
  const Vector signal = X * problem.w_star;
  std::vector<double> losses(static_cast<std::size_t>(trials));
  parallel_tasks(losses.size(), [&](std::size_t t) {
    Rng trial = rng.substream(t);
    const SubsetSelection S = selector(trial);
    const Vector y = noisy_response(problem, signal, trial);
    losses[t] = excess_loss(problem, sparse_ols(X, y, S));
  });
  return summarize(losses);
}

RiskEstimate ols_risk_mc(const RegressionProblem& problem, Index trials, const Rng& rng) {
  require_trials(trials);
  const Matrix& X = problem.X.values();
  const Vector signal = X * problem.w_star;
  const Matrix pinv = pseudo_inverse(X);
  std::vector<double> losses(static_cast<std::size_t>(trials));
  parallel_tasks(losses.size(), [&](std::size_t t) {
    Rng trial = rng.substream(t);
    const Vector y = noisy_response(problem, signal, trial);
    losses[t] = excess_loss(problem, pinv * y);
  });
  return summarize(losses);
}

double max_tangent_sq(const Matrix& Vk, const SubsetSelection& S) {
  const std::vector<Index> cols = S.distinct();
  const Matrix E = SubsetSelection(cols, Vk.rows()).sampling_matrix();
  if (E.cols() > Vk.cols()) {
    throw InputError("principal angles need |S| <= k");
  }
  const Vector angles = principal_angles(Vk, E);
  const double largest = angles.size() > 0 ? angles.maxCoeff() : 0.0;
  const double c = std::cos(largest);
  if (c <= 1e-12) {
    return std::numeric_limits<double>::infinity();
  }
  const double s = std::sin(largest);
  return (s * s) / (c * c);
}

double css_risk_bound_for_subset(const SvdBundle& svd, const SubsetSelection& S,
                                 const Vector& w_star, double noise_variance, Index k) {
  RiskBoundParams params;
  params.k = k;
  params.max_tan_sq = max_tangent_sq(svd.V.leftCols(k), S);
  params.n_rows = svd.n_rows();
  params.w_norm = w_star.norm();
  params.sigma_next = svd.singular_value(k);
  params.noise_var = noise_variance;
  return excess_risk_bound(RiskBoundKind::CssSubset, params);
}

}  // namespace cssdpp
