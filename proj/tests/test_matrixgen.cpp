#include "helpers.hpp"

#include "cssdpp/error.hpp"
#include "cssdpp/matrixgen.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>

using namespace cssdpp;

namespace {

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Index>(values.size()));
  Index i = 0;
  for (double x : values) {
    v(i++) = x;
  }
  return v;
}

Vector sorted_desc(Vector v) {
  std::sort(v.data(), v.data() + v.size(), std::greater<>());
  return v;
}

// Partial-sum majorization test written out directly.
bool majorizes(Vector big, Vector small) {
  const Index d = std::max(big.size(), small.size());
  Vector a = Vector::Zero(d);
  Vector b = Vector::Zero(d);
  a.head(big.size()) = big;
  b.head(small.size()) = small;
  a = sorted_desc(a);
  b = sorted_desc(b);
  double sa = 0.0;
  double sb = 0.0;
  for (Index i = 0; i < d; ++i) {
    sa += a(i);
    sb += b(i);
    if (sb > sa + 1e-12) {
      return false;
    }
  }
  return std::abs(sa - sb) <= 1e-8;
}

Vector frame_spectrum(const Matrix& F) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(F * F.transpose());
  return sorted_desc(eig.eigenvalues());
}

// A random feasible target: ell = diag of a random frame with spectrum sigma_sq.
struct Target {
  Vector ell;
  Vector sigma_sq;
};

Target random_target(Index k, Index d, Rng& rng) {
  Vector sigma_sq(k);
  for (Index i = 0; i < k; ++i) {
    sigma_sq(i) = rng.uniform(0.2, 3.0);
  }
  sigma_sq = sorted_desc(sigma_sq);
  const Matrix W = testutil::orthonormal_columns(d, k, rng);
  const Matrix F = sigma_sq.cwiseSqrt().asDiagonal() * W.transpose();
  return {sorted_desc(F.colwise().squaredNorm().transpose()), sigma_sq};
}

}  // namespace

TEST_CASE("majorization checks") {
  CHECK(check_majorization(vec({1, 1, 1}), vec({3, 0, 0})).feasible);
  CHECK(check_majorization(vec({1, 1, 1}), vec({3})).feasible);
  CHECK(check_majorization(Vector::Constant(10, 0.3), vec({1, 1, 1})).feasible);
  const MajorizationCheck too_big = check_majorization(vec({2.5, 0.5, 0, 0}), vec({2, 1}));
  CHECK_FALSE(too_big.feasible);
  CHECK_FALSE(too_big.reason.empty());
  const MajorizationCheck bad_sum = check_majorization(vec({1, 1, 1}), vec({2, 0.5}));
  CHECK_FALSE(bad_sum);
  CHECK_FALSE(bad_sum.reason.empty());
  CHECK_THROWS_AS(check_majorization(vec({1, -1}), vec({0})), InputError);
}

TEST_CASE("Schur-Horn completeness on a grid") {
  const Vector sigma_sq = vec({1.5, 0.5});
  Rng rng(1);
  int feasible = 0;
  int infeasible = 0;
  const double step = 0.25;
  for (int a = 0; a <= 8; ++a) {
    for (int b = 0; b <= a; ++b) {
      for (int c = 0; c <= b; ++c) {
        const int rest = 8 - a - b - c;
        if (rest < 0 || rest > c) {
          continue;
        }
        const Vector ell = vec({a * step, b * step, c * step, rest * step});
        const bool expected = majorizes(sigma_sq, ell);
        CAPTURE(ell.transpose());
        CHECK(check_majorization(ell, sigma_sq).feasible == expected);
        if (expected) {
          ++feasible;
          const EigenstepMatrix steps = random_eigensteps(ell, sigma_sq, rng);
          const Matrix F = reconstruct_frame(steps, ell, rng);
          CHECK((F.colwise().squaredNorm().transpose() - ell).cwiseAbs().maxCoeff() < 1e-8);
          CHECK((frame_spectrum(F) - sigma_sq).cwiseAbs().maxCoeff() < 1e-8);
        } else {
          ++infeasible;
          CHECK_THROWS_AS(random_eigensteps(ell, sigma_sq, rng), InfeasibleError);
        }
      }
    }
  }
  CHECK(feasible > 0);
  CHECK(infeasible > 0);
}

TEST_CASE("eigensteps of the worked example") {
  Matrix F(2, 4);
  F << 1, 0, -1, 0, 0, 1, 0, -1;
  const EigenstepMatrix steps = compute_eigensteps(F);
  Matrix expected(2, 4);
  expected << 1, 1, 2, 2, 0, 1, 1, 2;
  CHECK((steps.values - expected).cwiseAbs().maxCoeff() < 1e-12);

  const Vector ell = vec({1, 1, 1, 1});
  CHECK(eigenstep_violation(steps, ell, vec({2, 2})).empty());
  Rng rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix G = reconstruct_frame(steps, ell, rng);
    CHECK((compute_eigensteps(G).values - expected).cwiseAbs().maxCoeff() < 1e-7);
    CHECK((G.colwise().squaredNorm().transpose() - ell).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("random eigensteps") {
  Rng rng(3);
  SUBCASE("square case has no freedom") {
    const Vector sq = vec({3, 2, 1});
    const EigenstepMatrix a = random_eigensteps(sq, sq, rng);
    const EigenstepMatrix b = random_eigensteps(sq, sq, rng);
    CHECK((a.values - b.values).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(eigenstep_violation(a, sq, sq).empty());
  }
  SUBCASE("column sums telescope") {
    const EigenstepMatrix e = random_eigensteps(vec({1, 1, 1, 1}), vec({2, 2}), rng);
    for (Index r = 0; r < 4; ++r) {
      CHECK(e.values.col(r).sum() == doctest::Approx(static_cast<double>(r + 1)));
    }
  }
  SUBCASE("validator accepts outputs and rejects corruptions") {
    for (int trial = 0; trial < 100; ++trial) {
      const Index k = 1 + static_cast<Index>(rng.next_u64() % 4);
      const Index d = k + static_cast<Index>(rng.next_u64() % (11 - k));
      const Target t = random_target(k, d, rng);
      const EigenstepMatrix e = random_eigensteps(t.ell, t.sigma_sq, rng);
      CHECK(eigenstep_violation(e, t.ell, t.sigma_sq).empty());
      CHECK((e.values.col(d - 1) - t.sigma_sq).cwiseAbs().maxCoeff() < 1e-9);

      // Shift one interior entry: the trace identity of its column breaks.
      EigenstepMatrix bad = e;
      const auto r = static_cast<Index>(rng.next_u64() % static_cast<std::uint64_t>(d));
      bad.values(0, r) += 0.05;
      CHECK_FALSE(eigenstep_violation(bad, t.ell, t.sigma_sq).empty());

      // Swap mass between two rows of a column: sums survive, interlacing or
      // ordering does not.
      if (k >= 2 && d >= 3) {
        EigenstepMatrix swapped = e;
        const Index c = d - 2;
        swapped.values(0, c) += 1.0;
        swapped.values(1, c) -= 1.0;
        CHECK_FALSE(eigenstep_violation(swapped, t.ell, t.sigma_sq).empty());
      }
    }
    // A negative entry is caught even when sums are restored.
    EigenstepMatrix e = random_eigensteps(vec({1, 1, 1, 1}), vec({2, 2}), rng);
    e.values(1, 0) = -0.5;
    e.values(0, 0) = 1.5;
    CHECK_FALSE(eigenstep_violation(e, vec({1, 1, 1, 1}), vec({2, 2})).empty());
  }
  CHECK_THROWS_AS(random_eigensteps(vec({0.5, 1.5}), vec({2}), rng), InputError);
}

TEST_CASE("frame reconstruction round trip") {
  Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const Index k = 1 + static_cast<Index>(rng.next_u64() % 4);
    const Index d = k + static_cast<Index>(rng.next_u64() % (11 - k));
    CAPTURE(k);
    CAPTURE(d);
    const Target t = random_target(k, d, rng);
    const EigenstepMatrix e = random_eigensteps(t.ell, t.sigma_sq, rng);
    const Matrix F = reconstruct_frame(e, t.ell, rng);
    CHECK((compute_eigensteps(F).values - e.values).cwiseAbs().maxCoeff() < 1e-7);
    CHECK((F.colwise().squaredNorm().transpose() - t.ell).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((frame_spectrum(F) - t.sigma_sq).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("rank-one frames") {
  Rng rng(5);
  const Vector ell = vec({0.5, 0.3, 0.2});
  const EigenstepMatrix e = random_eigensteps(ell, vec({1.0}), rng);
  const Matrix F = reconstruct_frame(e, ell, rng);
  REQUIRE(F.rows() == 1);
  for (Index j = 0; j < 3; ++j) {
    CHECK(std::abs(F(0, j)) == doctest::Approx(std::sqrt(ell(j))));
  }
  CHECK(F.squaredNorm() == doctest::Approx(1.0));
}

TEST_CASE("different seeds give different frames with the same invariants") {
  const Vector ell = vec({0.8, 0.6, 0.3, 0.2, 0.1});
  const Vector sq = vec({1.2, 0.8});
  Rng a(6);
  Rng b(7);
  const Matrix Fa = reconstruct_frame(random_eigensteps(ell, sq, a), ell, a);
  const Matrix Fb = reconstruct_frame(random_eigensteps(ell, sq, b), ell, b);
  CHECK((Fa - Fb).cwiseAbs().maxCoeff() > 1e-3);
  CHECK((Fa.colwise().squaredNorm() - Fb.colwise().squaredNorm()).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((frame_spectrum(Fa) - frame_spectrum(Fb)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("Givens frames") {
  SUBCASE("diagonal start is kept") {
    const Matrix F = givens_frame(vec({4, 1, 0, 0}), vec({2, 1}));
    Matrix expected = Matrix::Zero(2, 4);
    expected(0, 0) = 2;
    expected(1, 1) = 1;
    CHECK((F - expected).cwiseAbs().maxCoeff() < 1e-15);
  }
  SUBCASE("targets are met") {
    Rng rng(8);
    for (int trial = 0; trial < 50; ++trial) {
      const Index k = 1 + static_cast<Index>(rng.next_u64() % 4);
      const Index d = k + static_cast<Index>(rng.next_u64() % (11 - k));
      const Target t = random_target(k, d, rng);
      // Unsorted targets are fine too.
      Vector ell = t.ell;
      std::reverse(ell.data(), ell.data() + d);
      const Matrix F = givens_frame(ell, t.sigma_sq.cwiseSqrt());
      CHECK((F.colwise().squaredNorm().transpose() - ell).cwiseAbs().maxCoeff() < 1e-8);
      CHECK((frame_spectrum(F) - t.sigma_sq).cwiseAbs().maxCoeff() < 1e-8);
    }
  }
  SUBCASE("uniform profile on the circle") {
    const Matrix F = givens_frame(Vector::Constant(10, 0.2), vec({1, 1}));
    for (Index j = 0; j < 10; ++j) {
      CHECK(F.col(j).squaredNorm() == doctest::Approx(0.2));
    }
    CHECK((F * F.transpose() - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-10);
  }
  CHECK_THROWS_AS(givens_frame(vec({2.5, 0.5, 0, 0}), vec({std::sqrt(2.0), 1})), InfeasibleError);
}

TEST_CASE("matrix generator") {
  Rng rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    const Index k = 1 + static_cast<Index>(rng.next_u64() % 4);
    const Index d = k + 1 + static_cast<Index>(rng.next_u64() % (12 - k));
    const Index p = k + static_cast<Index>(rng.next_u64() % static_cast<std::uint64_t>(d - k + 1));
    const Vector ell = dirichlet_leverage_profile(k, p, d, rng);
    Vector sigma(d);
    for (Index i = 0; i < d; ++i) {
      sigma(i) = rng.uniform(0.1, 10.0);
    }
    sigma = sorted_desc(sigma);
    // The profile can be applied in any column order.
    Vector shuffled = ell;
    std::reverse(shuffled.data(), shuffled.data() + d);
    const GeneratedMatrix g = matrix_generator(shuffled, sigma, 3 * d, rng);
    const SvdBundle s = compute_svd(g.X);
    CHECK((s.sigma - sigma).cwiseAbs().maxCoeff() < 1e-8 * sigma(0));
    const KLeverageProfile prof = k_leverage_scores(s, k);
    CHECK((prof.scores - shuffled).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((g.V.transpose() * g.V - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((g.U.transpose() * g.U - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-10);
  }
  CHECK_THROWS_AS(matrix_generator(vec({1, 1, 0}), vec({3, 2, 1}), 2, rng), InputError);
  CHECK_THROWS_AS(matrix_generator(vec({1.5, 0.5, 0}), vec({3, 2, 1}), 5, rng), InputError);
  CHECK_THROWS_AS(matrix_generator(vec({0.6, 0.6, 0}), vec({3, 2, 1}), 5, rng), InputError);
}

TEST_CASE("Dirichlet leverage profiles") {
  Rng rng(10);
  const Vector full = dirichlet_leverage_profile(3, 3, 8, rng);
  for (Index j = 0; j < 3; ++j) {
    CHECK(full(j) == doctest::Approx(1.0));
  }
  CHECK(full.tail(5).cwiseAbs().maxCoeff() == 0.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const Index k = 1 + static_cast<Index>(trial % 5);
    const Index p = k + static_cast<Index>(trial % 7);
    const Vector ell = dirichlet_leverage_profile(k, p, 20, rng);
    CHECK(std::abs(ell.sum() - static_cast<double>(k)) < 1e-10);
    CHECK(ell.maxCoeff() <= 1.0);
    CHECK((ell.array() > 0.0).count() == p);
    CHECK(check_majorization(ell, Vector::Ones(k)).feasible);
    for (Index j = 1; j < 20; ++j) {
      CHECK(ell(j) <= ell(j - 1));
    }
  }
  CHECK_THROWS_AS(dirichlet_leverage_profile(3, 2, 8, rng), InfeasibleError);
}

TEST_CASE("Haar orthonormal factors") {
  Rng rng(11);
  const Matrix Q = haar_orthonormal(9, 4, rng);
  CHECK((Q.transpose() * Q - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
  // Mean of one entry is zero and its variance 1/n.
  double m1 = 0.0;
  double m2 = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double x = haar_orthonormal(5, 2, rng)(0, 0);
    m1 += x;
    m2 += x * x;
  }
  CHECK(std::abs(m1 / n) < 4.0 * std::sqrt(0.2 / n));
  CHECK(m2 / n == doctest::Approx(0.2).epsilon(0.05));
  CHECK_THROWS_AS(haar_orthonormal(3, 4, rng), InputError);
}
