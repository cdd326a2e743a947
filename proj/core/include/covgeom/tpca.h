#pragma once

// Principal component analysis in the tangent space at a Frechet mean.
//
// Members are lifted by the log map, centred at their tangent average, and
// decomposed through the N x N Gram matrix of the inner product
// <A, B> = tr(A S B). Components are dense symmetric matrices, orthonormal
// under that inner product. Reconstruction retracts a truncated expansion
// back to the cone through the exponential map.

#include <optional>
#include <span>
#include <vector>

#include "covgeom/geometry.h"
#include "covgeom/spectral.h"

namespace covgeom {

struct PcaResult {
  Covariance base;
  std::vector<SymMatrix> components;  // effective_rank of them
  std::vector<double> variances;      // k requested, descending, >= 0
  Matrix scores;                      // N x effective_rank
  SymMatrix lifted_mean;              // tangent average of the lifts
  double lifted_mean_norm = 0.0;
  double total_variance = 0.0;        // (1/N) sum ||A_i - mean||^2
  Index effective_rank = 0;
};

/// log_map(mean, S_i) for every member. Throws KernelConditionError with the
/// member index when a log does not exist.
std::vector<TangentVector> lift(std::span<const Covariance> family, const Covariance& mean,
                                std::optional<double> rank_tol = std::nullopt);

/// Requires k <= min(N, d(d+1)/2) and that every lift is based at `mean`.
/// Components whose Gram eigenvalue is negligible are not formed; their
/// variances are reported as 0 and effective_rank shrinks accordingly.
PcaResult tangent_pca(std::span<const TangentVector> lifted, const Covariance& mean,
                      Index k);

/// exp_map(base, s * component). On failure the LeavesConeError carries the
/// admissible interval of s.
Covariance principal_geodesic(const Covariance& base, const SymMatrix& component, double s);

/// exp_map(mean, lifted_mean + sum_{a<k} scores(i, a) component_a).
Covariance reconstruct(const Covariance& mean, const PcaResult& pca, Index i, Index k);

}  // namespace covgeom
