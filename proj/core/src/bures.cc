#include "covgeom/bures.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "covgeom/error.h"

namespace covgeom {
namespace {

constexpr double kCancellationRatio = 1e-4;

void RequireSameDim(const Covariance& a, const Covariance& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorCode::kDimMismatch,
                "dimensions " + std::to_string(a.dim()) + " and " +
                    std::to_string(b.dim()) + " differ");
  }
}

// Orthonormal basis of the eigenvectors of s with lambda <= threshold.
Matrix KernelBasis(const Covariance& s, double rel_tol) {
  const double threshold = rel_tol * s.lambda_max();
  const Spectrum& spec = s.spectrum();
  Index count = 0;
  for (Index k = 0; k < spec.values.size(); ++k) {
    if (spec.values(k) <= threshold) ++count;
  }
  return spec.vectors.rightCols(count);
}

}  // namespace

double procrustes_distance(const Covariance& s1, const Covariance& s2) {
  RequireSameDim(s1, s2);
  const SymMatrix root2 = sqrt_psd(s2);
  const double cross = trace_sqrt(assume_psd(sandwich(root2.matrix(), s1)));
  const double total = s1.trace() + s2.trace();
  const double squared = total - 2.0 * cross;
  if (squared > kCancellationRatio * total) return std::sqrt(squared);
  // Nearly equal inputs: the trace formula cancels catastrophically, while the
  // aligned root difference is computed without subtraction of large terms.
  const Matrix root1 = sqrt_psd(s1).matrix();
  return (root1 - polar_factor(root1 * root2.matrix()) * root2.matrix()).norm();
}

AlignmentResult procrustes_distance_via_alignment(const Covariance& s1,
                                                  const Covariance& s2) {
  RequireSameDim(s1, s2);
  const Matrix root1 = sqrt_psd(s1).matrix();
  const Matrix root2 = sqrt_psd(s2).matrix();
  AlignmentResult out;
  out.rotation = polar_factor(root1 * root2);
  out.distance = (root1 - out.rotation * root2).norm();
  return out;
}

double gaussian_w2(const Vector& m1, const Covariance& s1, const Vector& m2,
                   const Covariance& s2) {
  RequireSameDim(s1, s2);
  if (m1.size() != s1.dim() || m2.size() != s2.dim()) {
    throw Error(ErrorCode::kDimMismatch, "mean vector length differs from covariance dimension");
  }
  const double cov = procrustes_distance(s1, s2);
  return std::sqrt((m1 - m2).squaredNorm() + cov * cov);
}

bool kernel_condition(const Covariance& s1, const Covariance& s2,
                      std::optional<double> rank_tol) {
  RequireSameDim(s1, s2);
  const double tol = rank_tol.value_or(default_rel_tol(s1.dim()));
  const Matrix kernel = KernelBasis(s1, tol);
  if (kernel.cols() == 0) return true;
  const SymMatrix compressed(kernel.transpose() * s2.matrix() * kernel);
  return norms(compressed).op_norm <= tol * (1.0 + s2.trace());
}

TransportMap optimal_map(const Covariance& s1, const Covariance& s2,
                         std::optional<double> rank_tol) {
  RequireSameDim(s1, s2);
  const double tol = rank_tol.value_or(default_rel_tol(s1.dim()));
  if (!kernel_condition(s1, s2, tol)) {
    throw KernelConditionError("target does not vanish on the kernel of the source");
  }
  const SymMatrix root = sqrt_psd(s1);
  const SymMatrix inv_root = pinv_sqrt(s1, tol);
  const SymMatrix middle = sqrt_psd(assume_psd(sandwich(root.matrix(), s2)));
  TransportMap out;
  out.map = sandwich(inv_root.matrix(), middle) + null_projector(s1, tol);
  out.source_rank_tol = tol;
  return out;
}

double map_condition_number(const TransportMap& t) {
  const Spectrum spec = sym_eigen(t.map);
  const Index d = spec.values.size();
  if (d == 0 || spec.values(0) <= 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  const double floor = default_rel_tol(d) * spec.values(0);
  double smallest = spec.values(0);
  for (Index k = 0; k < d; ++k) {
    if (spec.values(k) > floor) smallest = spec.values(k);
  }
  return spec.values(0) / smallest;
}

}  // namespace covgeom
