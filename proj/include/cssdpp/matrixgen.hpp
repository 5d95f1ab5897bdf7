#pragma once

#include "cssdpp/linalg.hpp"
#include "cssdpp/rng.hpp"

#include <string>

namespace cssdpp {

struct MajorizationCheck {
  bool feasible = false;
  std::string reason;

  explicit operator bool() const { return feasible; }
};

/// Whether a k x d frame with squared column norms `ell` and frame-operator
/// spectrum `sigma_sq` exists, i.e. whether sigma_sq padded with zeros to
/// length d majorizes ell.
MajorizationCheck check_majorization(const Vector& ell, const Vector& sigma_sq);

/// Outer eigensteps of a k x d frame: column r-1 holds the k largest
/// eigenvalues of C_r = f_1 f_1^T + ... + f_r f_r^T, in decreasing order.
struct EigenstepMatrix {
  Index k = 0;
  Index d = 0;
  Matrix values;  // k x d
};

/// Checks nonnegativity, interlacing of consecutive columns (including the
/// zero column before the first), the trace identity against `ell`, and
/// that the last column equals `sigma_sq`. Returns an empty string when
/// valid, otherwise the first failed condition.
std::string eigenstep_violation(const EigenstepMatrix& steps, const Vector& ell,
                                const Vector& sigma_sq, double tol = 1e-9);

/// Random point of the eigenstep polytope, built one level at a time from
/// the top down with each coordinate uniform on its admissible interval.
/// `ell` must be sorted in decreasing order.
EigenstepMatrix random_eigensteps(const Vector& ell, const Vector& sigma_sq, Rng& rng);

EigenstepMatrix compute_eigensteps(const Matrix& F);

/// A k x d frame whose eigensteps are `steps` and whose squared column norms are `ell`.
/// The first column and every repeated eigenspace are rotated at random.
Matrix reconstruct_frame(const EigenstepMatrix& steps, const Vector& ell, Rng& rng);

/// Deterministic frame from [diag(sigma) | 0] by column rotations, each of
/// which fixes at least one more column norm.
Matrix givens_frame(const Vector& ell, const Vector& sigma);

struct GeneratedMatrix {
  DataMatrix X;
  Matrix U;      // N x d
  Vector sigma;  // d
  Matrix V;      // d x d orthogonal, V_k = first k columns
  Vector ell;    // k-leverage scores of X
};

/// X = U diag(sigma) V^T with Haar U, V_k carrying the leverage profile `ell`
/// (k = sum of ell) and the rest of V completed at random.
GeneratedMatrix matrix_generator(const Vector& ell, const Vector& sigma, Index n_rows, Rng& rng);

/// Random k-leverage profile on d columns with p nonzero entries, each at most
/// one, sorted in decreasing order.
Vector dirichlet_leverage_profile(Index k, Index p, Index d, Rng& rng);

/// Haar-distributed n x m matrix with orthonormal columns (m <= n).
Matrix haar_orthonormal(Index n, Index m, Rng& rng);

}  // namespace cssdpp
