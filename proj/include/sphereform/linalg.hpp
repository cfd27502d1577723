#pragma once

#include <Eigen/Dense>
#include <Eigen/Cholesky>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace sphereform {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Point in model coordinates (length ambient_dim, or ambient_dim+1 for the
/// hyperboloid chart). Validity is checked by validate_point().
using AmbientPoint = Eigen::VectorXd;

/// Ideal-boundary point in ball coordinates: a Euclidean unit vector on S^n.
using BoundaryPoint = Eigen::VectorXd;

namespace detail {

inline Mat lorentz_form(int dim) {
  Mat J = Mat::Identity(dim, dim);
  J(dim - 1, dim - 1) = -1.0;
  return J;
}

inline double lorentz_dot(const Vec& a, const Vec& b) {
  const int m = static_cast<int>(a.size());
  double s = a.head(m - 1).dot(b.head(m - 1));
  return s - a(m - 1) * b(m - 1);
}

}  // namespace detail

/// Generalized cross product: given k linearly independent columns of A
/// ((k+1) x k), returns w orthogonal to all of them with
/// det[A | w] = |w|^2 > 0.
inline Vec generalized_cross(const Mat& A) {
  const int m = static_cast<int>(A.rows());
  const int k = static_cast<int>(A.cols());
  if (m != k + 1) throw std::invalid_argument("generalized_cross: need (k+1) x k input");
  Vec w(m);
  Mat minor(k, k);
  for (int a = 0; a < m; ++a) {
    int r = 0;
    for (int i = 0; i < m; ++i) {
      if (i == a) continue;
      minor.row(r++) = A.row(i);
    }
    const double sign = ((a + k) % 2 == 0) ? 1.0 : -1.0;
    w(a) = sign * minor.determinant();
  }
  return w;
}

struct EigPencil {
  Vec lambdas;     // ascending
  Mat directions;  // columns, g-orthonormal
};

/// Solves h v = lambda g v for symmetric h and SPD g via Cholesky reduction
/// (g = L L^T, then a symmetric eigensolve of L^-1 h L^-T). Throws if g is
/// not positive definite.
inline EigPencil sym_eig_pencil(const Mat& h, const Mat& g) {
  Eigen::LLT<Mat> llt(g);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("sym_eig_pencil: metric not positive definite");
  Mat L = llt.matrixL();
  Mat B = L.triangularView<Eigen::Lower>().solve(h);
  B = L.triangularView<Eigen::Lower>().solve(B.transpose()).transpose();
  B = 0.5 * (B + B.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(B);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("sym_eig_pencil: eigensolver failed");
  EigPencil out;
  out.lambdas = es.eigenvalues();
  out.directions = L.transpose().triangularView<Eigen::Upper>().solve(es.eigenvectors());
  return out;
}

/// Angle between two nonzero vectors, in radians.
inline double angle_between(const Vec& a, const Vec& b) {
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) throw std::invalid_argument("angle_between: zero vector");
  double c = a.dot(b) / (na * nb);
  c = std::clamp(c, -1.0, 1.0);
  return std::acos(c);
}

/// Value + first + second derivatives of a smooth map between coordinate
/// spaces; H[a] is the Hessian of output component a.
struct MapJet {
  Vec value;
  Mat J;
  std::vector<Mat> H;

  /// Chain rule: jet of (outer o inner), evaluated where `inner` was.
  static MapJet compose(const MapJet& outer, const MapJet& inner) {
    MapJet r;
    r.value = outer.value;
    r.J = outer.J * inner.J;
    const int out_dim = static_cast<int>(outer.value.size());
    const int in_dim = static_cast<int>(inner.J.cols());
    r.H.assign(out_dim, Mat::Zero(in_dim, in_dim));
    for (int a = 0; a < out_dim; ++a) {
      r.H[a] = inner.J.transpose() * outer.H[a] * inner.J;
      for (int b = 0; b < static_cast<int>(inner.value.size()); ++b)
        r.H[a] += outer.J(a, b) * inner.H[b];
    }
    return r;
  }

  static MapJet affine(const Mat& A, const Vec& b, const Vec& at) {
    MapJet r;
    r.value = A * at + b;
    r.J = A;
    r.H.assign(A.rows(), Mat::Zero(A.cols(), A.cols()));
    return r;
  }
};

}  // namespace sphereform
