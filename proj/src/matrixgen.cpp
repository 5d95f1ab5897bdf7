#include "cssdpp/matrixgen.hpp"

#include "cssdpp/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace cssdpp {

namespace {

double spectrum_scale(const Vector& sigma_sq) {
  return std::max(1.0, sigma_sq.size() > 0 ? sigma_sq.maxCoeff() : 0.0);
}

Vector sorted_decreasing(Vector v) {
  std::sort(v.data(), v.data() + v.size(), std::greater<>());
  return v;
}

std::vector<Index> decreasing_order(const Vector& v) {
  std::vector<Index> order(static_cast<std::size_t>(v.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return v(a) > v(b); });
  return order;
}

/// Eigenpairs of a symmetric matrix, eigenvalues decreasing.
void eigen_decreasing(const Matrix& C, Vector& values, Matrix& vectors) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(C);
  values = eig.eigenvalues().reverse();
  vectors = eig.eigenvectors().rowwise().reverse();
}

Vector gaussian_vector(Index n, Rng& rng) {
  Vector g(n);
  for (Index i = 0; i < n; ++i) {
    g(i) = rng.normal();
  }
  return g;
}

}  // namespace

MajorizationCheck check_majorization(const Vector& ell, const Vector& sigma_sq) {
  const Index d = ell.size();
  if ((ell.array() < 0.0).any() || (sigma_sq.array() < 0.0).any()) {
    throw InputError("majorization check needs nonnegative vectors");
  }
  if (sigma_sq.size() > d) {
    return {false, "spectrum has more entries than there are columns"};
  }
  const double total = ell.sum();
  const double tol = 1e-8 * std::max(1.0, std::abs(total));
  if (std::abs(total - sigma_sq.sum()) > tol) {
    std::ostringstream msg;
    msg << "sums differ: " << total << " vs " << sigma_sq.sum();
    return {false, msg.str()};
  }
  const Vector a = sorted_decreasing(ell);
  Vector b = Vector::Zero(d);
  b.head(sigma_sq.size()) = sorted_decreasing(sigma_sq);
  double sa = 0.0;
  double sb = 0.0;
  for (Index q = 0; q < d; ++q) {
    sa += a(q);
    sb += b(q);
    if (sa > sb + tol) {
      std::ostringstream msg;
      msg << "partial sum " << q + 1 << " of the diagonal exceeds that of the spectrum";
      return {false, msg.str()};
    }
  }
  return {true, ""};
}

std::string eigenstep_violation(const EigenstepMatrix& steps, const Vector& ell,
                                const Vector& sigma_sq, double tol) {
  const Index k = steps.k;
  const Index d = steps.d;
  std::ostringstream msg;
  if (steps.values.rows() != k || steps.values.cols() != d || ell.size() != d ||
      sigma_sq.size() != k) {
    return "dimension mismatch";
  }
  tol *= spectrum_scale(sigma_sq);
  const Vector target = sorted_decreasing(sigma_sq);
  if ((steps.values.col(d - 1) - target).cwiseAbs().maxCoeff() > tol) {
    return "last column differs from the spectrum";
  }
  Vector prev = Vector::Zero(k);
  double trace = 0.0;
  for (Index r = 0; r < d; ++r) {
    const auto cur = steps.values.col(r);
    trace += ell(r);
    if (std::abs(cur.sum() - trace) > tol) {
      msg << "trace of column " << r + 1 << " is " << cur.sum() << ", expected " << trace;
      return msg.str();
    }
    for (Index i = 0; i < k; ++i) {
      const double below = i + 1 < k ? cur(i + 1) : 0.0;
      if (cur(i) < -tol) {
        msg << "negative eigenstep at (" << i + 1 << ", " << r + 1 << ")";
        return msg.str();
      }
      if (prev(i) < below - tol || prev(i) > cur(i) + tol) {
        msg << "interlacing fails between columns " << r << " and " << r + 1 << " at row " << i + 1;
        return msg.str();
      }
    }
    prev = cur;
  }
  return {};
}

EigenstepMatrix random_eigensteps(const Vector& ell, const Vector& sigma_sq, Rng& rng) {
  const Index d = ell.size();
  const Index k = sigma_sq.size();
  if (k < 1 || k > d) {
    throw InputError("eigensteps need 1 <= k <= d");
  }
  for (Index i = 1; i < d; ++i) {
    if (ell(i) > ell(i - 1)) {
      throw InputError("eigensteps need the diagonal sorted in decreasing order");
    }
  }
  if (const MajorizationCheck check = check_majorization(ell, sigma_sq); !check) {
    throw InfeasibleError("infeasible diagonal/spectrum pair: " + check.reason);
  }
  const double slack = 1e-9 * spectrum_scale(sigma_sq);

  // prefix(n) = ell_1 + ... + ell_n, 1-based.
  Vector prefix = Vector::Zero(d + 1);
  for (Index n = 1; n <= d; ++n) {
    prefix(n) = prefix(n - 1) + ell(n - 1);
  }

  EigenstepMatrix out{k, d, Matrix::Zero(k, d)};
  out.values.col(d - 1) = sorted_decreasing(sigma_sq);

  // Level m holds lambda_{m;1..m}; only the first k can be nonzero.
  for (Index m = d; m >= 2; --m) {
    const Vector cur = out.values.col(m - 1);
    auto at = [&](Index n) { return n <= k ? cur(n - 1) : 0.0; };
    Vector next = Vector::Zero(k);
    double next_tail = 0.0;  // lambda_{m-1;kk+1} + ... + lambda_{m-1;m-1}
    double cur_tail = 0.0;   // lambda_{m;kk+1} + ... + lambda_{m;m}
    for (Index n = std::min(m, k); n > std::min(m - 1, k); --n) {
      cur_tail += at(n);
    }
    for (Index kk = std::min(m - 1, k); kk >= 1; --kk) {
      cur_tail += at(kk);  // now lambda_{m;kk} + ... + lambda_{m;m}
      const double lower = std::max(at(kk + 1), cur_tail - next_tail - ell(m - 1));
      double upper = at(kk);
      double inner = 0.0;  // lambda_{m;l+1} + ... + lambda_{m;kk}
      for (Index l = kk; l >= 1; --l) {
        upper = std::min(upper, (prefix(m - 1) - prefix(l - 1)) - inner - next_tail);
        inner += at(l);
      }
      double value = 0.0;
      if (lower > upper + slack) {
        std::ostringstream msg;
        msg << "empty eigenstep interval [" << lower << ", " << upper << "] at level " << m - 1
            << ", index " << kk;
        throw InfeasibleError(msg.str());
      }
      if (lower >= upper) {
        value = 0.5 * (lower + upper);
      } else {
        value = lower + (upper - lower) * rng.uniform();
      }
      next(kk - 1) = value;
      next_tail += value;
    }
    out.values.col(m - 2) = next;
  }
  return out;
}

EigenstepMatrix compute_eigensteps(const Matrix& F) {
  const Index k = F.rows();
  const Index d = F.cols();
  EigenstepMatrix out{k, d, Matrix::Zero(k, d)};
  Matrix C = Matrix::Zero(k, k);
  for (Index r = 0; r < d; ++r) {
    C.noalias() += F.col(r) * F.col(r).transpose();
    out.values.col(r) =
        Eigen::SelfAdjointEigenSolver<Matrix>(C, Eigen::EigenvaluesOnly).eigenvalues().reverse();
  }
  return out;
}

Matrix reconstruct_frame(const EigenstepMatrix& steps, const Vector& ell, Rng& rng) {
  const Index k = steps.k;
  const Index d = steps.d;
  const Vector sigma_sq = steps.values.col(d - 1);
  if (const std::string why = eigenstep_violation(steps, ell, sigma_sq, 1e-8); !why.empty()) {
    throw InputError("invalid eigensteps: " + why);
  }
  const double scale = spectrum_scale(sigma_sq);
  const double match_tol = 1e-9 * scale;

  Matrix F = Matrix::Zero(k, d);
  Matrix C = Matrix::Zero(k, k);
  Vector cur = Vector::Zero(k);
  Vector computed;
  Matrix U;
  for (Index r = 0; r < d; ++r) {
    const Vector next = steps.values.col(r);
    eigen_decreasing(C, computed, U);

    // Cancel the common roots of the characteristic polynomials of C_r and
    // C_{r+1}; the remaining ones (I from C_r, J from C_{r+1}) give the
    // eigenspace components of the new vector in closed form.
    std::vector<bool> cancelled(static_cast<std::size_t>(k), false);
    std::vector<double> J;
    for (Index j = 0; j < k; ++j) {
      bool matched = false;
      for (Index i = 0; i < k; ++i) {
        if (!cancelled[static_cast<std::size_t>(i)] && std::abs(cur(i) - next(j)) <= match_tol) {
          cancelled[static_cast<std::size_t>(i)] = true;
          matched = true;
          break;
        }
      }
      if (!matched) {
        J.push_back(next(j));
      }
    }
    std::vector<Index> I;
    for (Index i = 0; i < k; ++i) {
      if (!cancelled[static_cast<std::size_t>(i)]) {
        I.push_back(i);
      }
    }

    Vector f = Vector::Zero(k);
    for (Index i : I) {
      const double lambda = cur(i);
      double w = -1.0;
      for (double mu : J) {
        w *= lambda - mu;
      }
      for (Index other : I) {
        if (other != i) {
          w /= lambda - cur(other);
        }
      }
      if (w < -1e-10 * scale) {
        std::ostringstream msg;
        msg << "negative eigenspace weight " << w << " at step " << r + 1;
        throw InfeasibleError(msg.str());
      }
      w = std::max(w, 0.0);
      if (w == 0.0) {
        continue;
      }
      // Eigenspace of lambda in C_r: the run of equal eigenvalues around i.
      Index lo = i;
      Index hi = i;
      while (lo > 0 && std::abs(cur(lo - 1) - lambda) <= match_tol) {
        --lo;
      }
      while (hi + 1 < k && std::abs(cur(hi + 1) - lambda) <= match_tol) {
        ++hi;
      }
      const Index dim = hi - lo + 1;
      Vector direction;
      if (dim == 1) {
        direction = U.col(i);
      } else {
        Vector z = gaussian_vector(dim, rng);
        z.normalize();
        direction = U.middleCols(lo, dim) * z;
      }
      f += std::sqrt(w) * direction;
    }
    F.col(r) = f;
    C.noalias() += f * f.transpose();
    cur = next;
  }
  return F;
}

Matrix givens_frame(const Vector& ell, const Vector& sigma) {
  const Index d = ell.size();
  const Index k = sigma.size();
  if (k < 1 || k > d) {
    throw InputError("frame needs 1 <= k <= d");
  }
  const Vector sigma_desc = sorted_decreasing(sigma.cwiseAbs());
  const Vector sigma_sq = sigma_desc.array().square().matrix();
  if (const MajorizationCheck check = check_majorization(ell, sigma_sq); !check) {
    throw InfeasibleError("infeasible diagonal/spectrum pair: " + check.reason);
  }
  const std::vector<Index> order = decreasing_order(ell);
  Vector target(d);
  for (Index i = 0; i < d; ++i) {
    target(i) = ell(order[static_cast<std::size_t>(i)]);
  }

  Matrix G = Matrix::Zero(k, d);
  G.leftCols(k) = sigma_desc.asDiagonal();
  Vector norms = Vector::Zero(d);
  norms.head(k) = sigma_sq;
  const double tol = 1e-12 * spectrum_scale(sigma_sq);

  for (Index step = 0; step <= d; ++step) {
    Index j = -1;
    for (Index i = d - 1; i >= 0; --i) {
      if (norms(i) > target(i) + tol) {
        j = i;
        break;
      }
    }
    if (j < 0) {
      break;
    }
    Index m = -1;
    for (Index i = j + 1; i < d; ++i) {
      if (norms(i) < target(i) - tol) {
        m = i;
        break;
      }
    }
    if (m < 0) {
      throw InfeasibleError("no column can absorb the excess norm");
    }
    const double delta = std::min(norms(j) - target(j), target(m) - norms(m));
    const double goal = norms(j) - delta;

    // Rotating columns x, y by t gives ||x'||^2 = mean + R cos(2t - phi).
    const Vector x = G.col(j);
    const Vector y = G.col(m);
    const double nx = x.squaredNorm();
    const double ny = y.squaredNorm();
    const double half_diff = 0.5 * (nx - ny);
    const double cross = x.dot(y);
    const double radius = std::hypot(half_diff, cross);
    const double phi = std::atan2(cross, half_diff);
    const double cosine = std::clamp((goal - 0.5 * (nx + ny)) / radius, -1.0, 1.0);
    const double t = 0.5 * (phi + std::acos(cosine));
    G.col(j) = std::cos(t) * x + std::sin(t) * y;
    G.col(m) = -std::sin(t) * x + std::cos(t) * y;
    norms(j) = goal;
    norms(m) += delta;
  }

  Matrix F(k, d);
  for (Index i = 0; i < d; ++i) {
    F.col(order[static_cast<std::size_t>(i)]) = G.col(i);
  }
  return F;
}

Matrix haar_orthonormal(Index n, Index m, Rng& rng) {
  if (m > n || m < 0) {
    throw InputError("orthonormal frame needs m <= n");
  }
  Matrix G(n, m);
  for (Index j = 0; j < m; ++j) {
    for (Index i = 0; i < n; ++i) {
      G(i, j) = rng.normal();
    }
  }
  const Eigen::HouseholderQR<Matrix> qr(G);
  Matrix Q = qr.householderQ() * Matrix::Identity(n, m);
  for (Index j = 0; j < m; ++j) {
    if (qr.matrixQR()(j, j) < 0.0) {
      Q.col(j) *= -1.0;
    }
  }
  return Q;
}

GeneratedMatrix matrix_generator(const Vector& ell, const Vector& sigma, Index n_rows, Rng& rng) {
  const Index d = ell.size();
  if (sigma.size() != d) {
    throw InputError("generator needs d singular values");
  }
  if (n_rows < d) {
    throw InputError("generator needs N >= d");
  }
  for (Index i = 1; i < d; ++i) {
    if (sigma(i) > sigma(i - 1) || sigma(i) < 0.0) {
      throw InputError("singular values must be nonnegative and decreasing");
    }
  }
  if ((ell.array() < -1e-12).any() || (ell.array() > 1.0 + 1e-12).any()) {
    throw InputError("leverage scores must lie in [0, 1]");
  }
  const double total = ell.sum();
  const Index k = std::llround(total);
  if (k < 1 || std::abs(total - static_cast<double>(k)) > 1e-8) {
    throw InputError("leverage scores must sum to a positive integer k");
  }

  const std::vector<Index> order = decreasing_order(ell);
  Vector mu(d);
  for (Index i = 0; i < d; ++i) {
    mu(i) = std::max(0.0, ell(order[static_cast<std::size_t>(i)]));
  }
  const Vector ones = Vector::Ones(k);
  const EigenstepMatrix steps = random_eigensteps(mu, ones, rng);
  const Matrix F = reconstruct_frame(steps, mu, rng);

  Matrix V(d, d);
  for (Index i = 0; i < d; ++i) {
    V.row(order[static_cast<std::size_t>(i)]).head(k) = F.col(i).transpose();
  }
  for (Index j = k; j < d; ++j) {
    Vector g = gaussian_vector(d, rng);
    for (int pass = 0; pass < 2; ++pass) {
      g -= V.leftCols(j) * (V.leftCols(j).transpose() * g);
    }
    V.col(j) = g.normalized();
  }
  Matrix U = haar_orthonormal(n_rows, d, rng);
  Matrix X = U * sigma.asDiagonal() * V.transpose();
  return GeneratedMatrix{DataMatrix(std::move(X)), std::move(U), sigma, std::move(V), ell};
}

Vector dirichlet_leverage_profile(Index k, Index p, Index d, Rng& rng) {
  if (k < 1 || p < k || p > d) {
    throw InfeasibleError("leverage profile needs 1 <= k <= p <= d");
  }
  Vector scores = Vector::Zero(d);
  if (p == k) {
    scores.head(k).setOnes();
    return scores;
  }
  auto draw_scaled = [&] {
    Vector s(p);
    for (Index i = 0; i < p; ++i) {
      s(i) = rng.exponential();
    }
    s *= static_cast<double>(k) / s.sum();
    return s;
  };
  // Redraw until every score is at most one: the Dirichlet law conditioned on
  // being a leverage profile. Clipping instead would pin scores at exactly
  // one, which forces those columns into every DPP sample.
  constexpr int kRejectionDraws = 200000;
  for (int draw = 0; draw < kRejectionDraws; ++draw) {
    const Vector s = draw_scaled();
    if (s.maxCoeff() <= 1.0 && s.minCoeff() >= kZeroLeverage) {
      scores.head(p) = sorted_decreasing(s);
      return scores;
    }
  }
  // Acceptance is tiny only for p barely above a large k; fall back to capping.
  constexpr int kDraws = 1000;
  constexpr int kPasses = 20;
  for (int draw = 0; draw < kDraws; ++draw) {
    Vector s = draw_scaled();
    // Cap at one and hand the excess to the uncapped entries in proportion to their size.
    bool capped = false;
    for (int pass = 0; pass < kPasses && !capped; ++pass) {
      double excess = 0.0;
      double free_mass = 0.0;
      for (Index i = 0; i < p; ++i) {
        if (s(i) > 1.0) {
          excess += s(i) - 1.0;
          s(i) = 1.0;
        } else if (s(i) < 1.0) {
          free_mass += s(i);
        }
      }
      if (excess <= 1e-15) {
        capped = true;
        break;
      }
      if (!(free_mass > 0.0)) {
        break;
      }
      for (Index i = 0; i < p; ++i) {
        if (s(i) < 1.0) {
          s(i) += excess * s(i) / free_mass;
        }
      }
    }
    if (!capped || !(s.minCoeff() >= kZeroLeverage)) {
      continue;
    }
    scores.head(p) = sorted_decreasing(s.cwiseMin(1.0));
    return scores;
  }
  throw InfeasibleError("could not draw a capped leverage profile");
}

}  // namespace cssdpp
