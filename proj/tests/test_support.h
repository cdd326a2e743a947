#pragma once

// Random inputs and independent oracles for the test suites. Nothing here
// goes through the library's own eigensolver: random frames come from
// Eigen's Householder QR and reference spectra from Eigen's
// SelfAdjointEigenSolver.

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "covgeom/spectral.h"

namespace covgeom::testing {

using Rng = std::mt19937_64;

inline Matrix RandomOrthogonal(Rng& rng, Index d) {
  std::normal_distribution<double> normal;
  Matrix g(d, d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) g(i, j) = normal(rng);
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  // Fix the column signs so the distribution is Haar.
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < d; ++j) {
    if (r(j, j) < 0) q.col(j) *= -1.0;
  }
  return q;
}

inline Matrix RandomSymmetric(Rng& rng, Index d, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Matrix a(d, d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = i; j < d; ++j) a(i, j) = a(j, i) = normal(rng);
  }
  return a;
}

/// Q diag(lambda) Q^T with lambda uniform on [lo, hi].
inline Matrix RandomSpdMatrix(Rng& rng, Index d, double lo = 0.1, double hi = 4.0) {
  std::uniform_real_distribution<double> unif(lo, hi);
  const Matrix q = RandomOrthogonal(rng, d);
  Vector lambda(d);
  for (Index i = 0; i < d; ++i) lambda(i) = unif(rng);
  Matrix m = q * lambda.asDiagonal() * q.transpose();
  return 0.5 * (m + m.transpose());
}

inline Covariance RandomSpd(Rng& rng, Index d, double lo = 0.1, double hi = 4.0) {
  return make_covariance(RandomSpdMatrix(rng, d, lo, hi));
}

/// Rank-r PSD matrix with exactly zero eigenvalues in a random frame.
inline Matrix RandomPsdRankMatrix(Rng& rng, Index d, Index r, double lo = 0.5,
                                  double hi = 3.0) {
  std::uniform_real_distribution<double> unif(lo, hi);
  const Matrix q = RandomOrthogonal(rng, d);
  Vector lambda = Vector::Zero(d);
  for (Index i = 0; i < r; ++i) lambda(i) = unif(rng);
  Matrix m = q * lambda.asDiagonal() * q.transpose();
  return 0.5 * (m + m.transpose());
}

/// Members share the eigenbasis `frame`, so they commute.
inline std::vector<Covariance> CommutingFamily(Rng& rng, const Matrix& frame, Index n,
                                               double lo = 0.1, double hi = 4.0) {
  std::uniform_real_distribution<double> unif(lo, hi);
  std::vector<Covariance> out;
  for (Index k = 0; k < n; ++k) {
    Vector lambda(frame.cols());
    for (Index i = 0; i < lambda.size(); ++i) lambda(i) = unif(rng);
    Matrix m = frame * lambda.asDiagonal() * frame.transpose();
    out.push_back(make_covariance(0.5 * (m + m.transpose())));
  }
  return out;
}

/// Square root through Eigen's eigensolver.
inline Matrix ReferenceSqrt(const Matrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(s);
  return es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
         es.eigenvectors().transpose();
}

/// Pi^2 for 2x2 inputs from the closed-form maximum of tr(U L2 L1) over
/// rotations and reflections: a linear form in (cos, sin) peaks at the norm
/// of its coefficient vector.
inline double ProcrustesSquared2x2(const Matrix& s1, const Matrix& s2) {
  const Matrix l1 = ReferenceSqrt(s1);
  const Matrix l2 = ReferenceSqrt(s2);
  const Matrix n = l2 * l1;
  const double rot = std::hypot(n(0, 0) + n(1, 1), n(0, 1) - n(1, 0));
  const double refl = std::hypot(n(0, 0) - n(1, 1), n(0, 1) + n(1, 0));
  return s1.trace() + s2.trace() - 2.0 * std::max(rot, refl);
}

/// Sum of singular values via Eigen's SVD.
inline double NuclearNorm(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues().sum();
}

/// Commuting closed form: ||S1^{1/2} - S2^{1/2}||_HS.
inline double RootHsDistance(const Matrix& s1, const Matrix& s2) {
  return (ReferenceSqrt(s1) - ReferenceSqrt(s2)).norm();
}

}  // namespace covgeom::testing
