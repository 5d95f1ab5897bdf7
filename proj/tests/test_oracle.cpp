#include "helpers.hpp"

#include "cssdpp/bounds.hpp"
#include "cssdpp/datasets.hpp"
#include "cssdpp/error.hpp"
#include "cssdpp/matrixgen.hpp"
#include "cssdpp/oracle.hpp"
#include "cssdpp/samplers.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <numeric>

using namespace cssdpp;
using testutil::diag;

namespace {

DataMatrix toy_matrix(const std::string& name, Index p, Rng& rng) {
  const ToySpectrum spec = toy_spectrum(name);
  const Vector ell = dirichlet_leverage_profile(spec.k, p, spec.sigma.size(), rng);
  return matrix_generator(ell, spec.sigma, 100, rng).X;
}

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

TEST_CASE("volume sampling law of the identity is uniform") {
  const SubsetLaw law = enumerate_law(DataMatrix(Matrix::Identity(5, 5)), 2, LawKind::VolumeSampling);
  REQUIRE(law.weights.size() == 10);
  for (double w : law.weights) {
    CHECK(w == doctest::Approx(0.1));
  }
}

TEST_CASE("normalizers") {
  Rng rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    const SvdBundle s = compute_svd(DataMatrix(testutil::gaussian(10, 8, rng)));
    const std::vector<double> dpp = law_weights(s, 3, LawKind::Dpp);
    CHECK(std::abs(sum(dpp) - 1.0) < 1e-10);
    const std::vector<double> vs = law_weights(s, 3, LawKind::VolumeSampling);
    const double ek = testutil::brute_elementary(s.sigma.array().square().matrix(), 3);
    CHECK(std::abs(sum(vs) - ek) <= 1e-8 * ek);
    const SubsetLaw law = enumerate_law(s, 3, LawKind::VolumeSampling);
    CHECK(std::abs(sum(law.weights) - 1.0) < 1e-10);
    CHECK(law.normalizer == doctest::Approx(ek).epsilon(1e-8));
  }
}

TEST_CASE("VS normalizer on the steep toy spectrum") {
  Rng rng(2);
  const DataMatrix X = toy_matrix("smooth-5", 12, rng);
  const SubsetLaw law = enumerate_law(X, 5, LawKind::VolumeSampling);
  CHECK(std::abs(sum(law.weights) - 1.0) < 1e-10);
}

TEST_CASE("law lookup by subset") {
  const SubsetLaw law = enumerate_law(DataMatrix(diag({2, std::sqrt(2.0), 1})), 2,
                                      LawKind::VolumeSampling);
  CHECK(law.probability({0, 1}) == doctest::Approx(8.0 / 14));
  CHECK(law.probability({1, 2}) == doctest::Approx(2.0 / 14));
  CHECK(law.subset(1) == std::vector<Index>{0, 2});
}

TEST_CASE("capacity guard") {
  Rng rng(3);
  const SvdBundle s = compute_svd(DataMatrix(testutil::gaussian(40, 40, rng)));
  CHECK_THROWS_AS(enumerate_law(s, 10, LawKind::Dpp), CapacityError);
}

TEST_CASE("expected error of a rank-k matrix is zero") {
  Rng rng(4);
  const DataMatrix X(testutil::gaussian(9, 3, rng) * testutil::gaussian(3, 7, rng));
  for (LawKind kind : {LawKind::Dpp, LawKind::VolumeSampling}) {
    CHECK(exact_expected_error(X, 3, kind, Norm::Frobenius) < 1e-12 * X.values().squaredNorm());
    CHECK(exact_expected_error(X, 3, kind, Norm::Spectral) < 1e-12 * X.values().squaredNorm());
  }
}

TEST_CASE("subset errors match direct residuals") {
  Rng rng(5);
  const DataMatrix X(testutil::gaussian(10, 6, rng));
  const SvdBundle s = compute_svd(X);
  const std::vector<double> errs = subset_errors(s, 2, Norm::Frobenius);
  std::size_t r = 0;
  testutil::for_each_subset(6, 2, [&](const std::vector<Index>& S) {
    const double direct = frobenius_projection_residual(X, SubsetSelection(S, 6), Norm::Frobenius);
    CHECK(errs[r++] == doctest::Approx(direct * direct).epsilon(1e-9));
  });
}

TEST_CASE("Monte Carlo agrees with the exact expectation") {
  Rng rng(6);
  const DataMatrix X(testutil::gaussian(10, 8, rng) * diag({5, 4, 3, 1, 0.8, 0.5, 0.3, 0.1}));
  const SvdBundle s = compute_svd(X);
  const ResidualEvaluator eval(s);
  const Index k = 3;
  for (LawKind kind : {LawKind::Dpp, LawKind::VolumeSampling}) {
    const double exact = exact_expected_error(s, k, kind, Norm::Frobenius);
    ProjectionDppSampler dpp(s.V.leftCols(k));
    VolumeSampler vs(s, k);
    const int n = 10000;
    double m1 = 0.0;
    double m2 = 0.0;
    std::vector<Index> S;
    for (int i = 0; i < n; ++i) {
      if (kind == LawKind::Dpp) {
        dpp.sample_into(rng, S);
      } else {
        vs.sample_into(rng, S);
      }
      const double e = eval.residual_sq(S, Norm::Frobenius);
      m1 += e;
      m2 += e * e;
    }
    const double mean = m1 / n;
    const double se = std::sqrt((m2 / n - mean * mean) / n);
    CHECK(std::abs(mean - exact) <= 3.0 * se);
  }
}

TEST_CASE("avoiding probability") {
  Rng rng(7);
  SUBCASE("nothing avoided") {
    Matrix Vk = Matrix::Zero(5, 2);
    Vk(0, 0) = 1.0;
    Vk(1, 1) = 1.0;
    const SvdBundle s = compute_svd(DataMatrix(diag({3, 2, 0, 0, 0})));
    const KLeverageProfile prof = k_leverage_scores(s, 2);
    CHECK(exact_avoiding_probability(s.V.leftCols(2), prof, 2.0) == doctest::Approx(1.0));
  }
  SUBCASE("lower bound, path agreement and monotone curve") {
    for (int trial = 0; trial < 5; ++trial) {
      const SvdBundle s = compute_svd(toy_matrix("proj-3", 15, rng));
      const KLeverageProfile prof = k_leverage_scores(s, 3);
      const Matrix Vk = s.V.leftCols(3);
      double previous = 2.0;
      // The acceptance probability falls as theta grows, staying above 1/theta.
      for (double theta = 1.05; theta <= 5.0; theta += 0.25) {
        const AvoidingProbability both = avoiding_probability_paths(Vk, prof, theta);
        CHECK(both.enumerated >= 1.0 / theta - 1e-12);
        CHECK(std::abs(both.enumerated - both.spectral) <= 1e-8);
        CHECK(both.enumerated <= previous + 1e-12);
        previous = both.enumerated;
      }
    }
  }
}

TEST_CASE("conditioning restricts and renormalizes") {
  Rng rng(8);
  const SvdBundle s = compute_svd(DataMatrix(testutil::gaussian(9, 7, rng)));
  const SubsetLaw law = enumerate_law(s, 2, LawKind::Dpp);
  const SubsetLaw cond = condition_on_avoiding(law, {5, 6});
  CHECK(std::abs(sum(cond.weights) - 1.0) < 1e-12);
  double kept = 0.0;
  for (std::size_t r = 0; r < law.weights.size(); ++r) {
    const std::vector<Index> S = law.subset(r);
    if (S.back() < 5) {
      kept += law.weights[r];
    } else {
      CHECK(cond.weights[r] == 0.0);
    }
  }
  for (std::size_t r = 0; r < law.weights.size(); ++r) {
    if (law.subset(r).back() < 5) {
      CHECK(cond.weights[r] == doctest::Approx(law.weights[r] / kept).epsilon(1e-12));
    }
  }
}

TEST_CASE("conditional expectation with nothing avoided is the plain one") {
  // Equiangular frame: every 2-leverage score is 2/3.
  Matrix X(3, 3);
  X << 1.0, -0.5, -0.5, 0.0, std::sqrt(0.75), -std::sqrt(0.75), 0.1, 0.1, 0.1;
  const SvdBundle s = compute_svd(DataMatrix(X));
  const KLeverageProfile prof = k_leverage_scores(s, 2);
  const double theta = 1.5;
  REQUIRE(avoided_columns(prof, theta).empty());
  CHECK(exact_conditional_expected_error(s, 2, theta, Norm::Frobenius) ==
        doctest::Approx(exact_expected_error(s, 2, LawKind::Dpp, Norm::Frobenius)));
}

TEST_CASE("reweighted law equals the DPP law") {
  Rng rng(9);
  const Matrix Vk = testutil::orthonormal_columns(8, 3, rng);
  const SvdBundle s = [&] {
    SvdBundle b;
    b.V = Vk;
    b.sigma = Vector::Ones(3);
    b.rank = 3;
    b.U = Matrix::Identity(3, 3);
    return b;
  }();
  const std::vector<double> base = law_weights(s, 3, LawKind::Dpp);
  for (int trial = 0; trial < 5; ++trial) {
    Vector w(3);
    for (Index i = 0; i < 3; ++i) {
      w(i) = rng.uniform(0.01, 100.0);
    }
    const std::vector<double> re = reweighted_dpp_law(Vk, w);
    for (std::size_t r = 0; r < base.size(); ++r) {
      CHECK(std::abs(re[r] - base[r]) < 1e-10);
    }
  }
}

TEST_CASE("results do not depend on the number of threads") {
  Rng rng(10);
  const SvdBundle s = compute_svd(toy_matrix("smooth-3", 12, rng));
  setenv("CSSDPP_THREADS", "1", 1);
  const double one = exact_expected_error(s, 3, LawKind::Dpp, Norm::Frobenius);
  const std::vector<double> w1 = law_weights(s, 3, LawKind::VolumeSampling);
  setenv("CSSDPP_THREADS", "4", 1);
  const double four = exact_expected_error(s, 3, LawKind::Dpp, Norm::Frobenius);
  const std::vector<double> w4 = law_weights(s, 3, LawKind::VolumeSampling);
  unsetenv("CSSDPP_THREADS");
  CHECK(one == four);
  CHECK(w1 == w4);
}

TEST_CASE("bounds hold on toy matrices") {
  Rng rng(11);
  for (const std::string name : {"proj-3", "smooth-3", "proj-5", "smooth-5"}) {
    const Index k = toy_spectrum(name).k;
    for (Index p : {k, k + 2, Index{10}, Index{20}}) {
      CAPTURE(name);
      CAPTURE(p);
      const SvdBundle s = compute_svd(toy_matrix(name, p, rng));
      const KLeverageProfile prof = k_leverage_scores(s, k);
      CHECK(prof.sparsity_p == p);
      const double theta = 2.0;
      for (const BoundReport& r : bound_reports(s, k, theta)) {
        CAPTURE(r.selector);
        CAPTURE(to_string(r.norm));
        double exact = 0.0;
        if (r.selector == "vs") {
          exact = exact_expected_error(s, k, LawKind::VolumeSampling, r.norm);
        } else if (r.selector == "dpp-conditional") {
          exact = exact_conditional_expected_error(s, k, theta, r.norm);
        } else {
          exact = exact_expected_error(s, k, LawKind::Dpp, r.norm);
        }
        CHECK(exact <= r.bound_value * (1.0 + 1e-9));
        CHECK(exact >= r.reference_sq * (1.0 - 1e-9));
      }
    }
  }
}

TEST_CASE("spectral DPP error can exceed k(p - k) but not k(p - k + 1)") {
  Rng rng(12);
  const Index k = 3;
  const Index p = 5;
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const SvdBundle s = compute_svd(toy_matrix("proj-3", p, rng));
    const double ratio = exact_expected_error(s, k, LawKind::Dpp, Norm::Spectral) /
                         std::pow(s.singular_value(k), 2);
    CHECK(ratio <= dpp_sparse_bounds(k, 20, p, 1.0).spectral * (1.0 + 1e-9));
    worst = std::max(worst, ratio);
  }
  CHECK(worst > static_cast<double>(k * (p - k)));
}
