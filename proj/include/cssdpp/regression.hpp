#pragma once

#include "cssdpp/linalg.hpp"
#include "cssdpp/rng.hpp"

#include <functional>

namespace cssdpp {

/// y = X w* + xi with xi i.i.d. N(0, noise_variance).
struct RegressionProblem {
  DataMatrix X;
  Vector w_star;
  double noise_variance = 0.0;

  Index n_rows() const { return X.n_rows(); }
};

/// Least squares restricted to the columns in S, embedded back into R^d.
Vector sparse_ols(const Matrix& X, const Vector& y, const SubsetSelection& S);

/// ||X w* - X w||^2 / N.
double excess_loss(const RegressionProblem& problem, const Vector& w);

struct RiskEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  Index trials = 0;
};

/// Draws a column subset for one trial.
using SubsetDrawer = std::function<SubsetSelection(Rng&)>;

/// Monte Carlo excess risk of sparse OLS: every trial draws a fresh subset
/// and fresh noise from its own substream of `rng`, so the estimate does not
/// depend on the number of threads.
RiskEstimate excess_risk_mc(const RegressionProblem& problem, const SubsetDrawer& selector,
                            Index trials, const Rng& rng);

/// Same for the ordinary least squares estimator X^+ y.
RiskEstimate ols_risk_mc(const RegressionProblem& problem, Index trials, const Rng& rng);

/// Largest tan^2 of the principal angles between span{e_j : j in S} and span(V_k).
double max_tangent_sq(const Matrix& Vk, const SubsetSelection& S);

/// Excess-risk bound for sparse OLS on a fixed subset of k columns.
double css_risk_bound_for_subset(const SvdBundle& svd, const SubsetSelection& S,
                                 const Vector& w_star, double noise_variance, Index k);

}  // namespace cssdpp
