#pragma once

// Procrustes / Bures-Wasserstein distance between covariances and the
// optimal linear transport map between centred Gaussians.

#include <optional>

#include "covgeom/spectral.h"

namespace covgeom {

/// Optimal map t from N(0, S1) to N(0, S2): t S1 t = S2. On the numerical
/// kernel of S1 the map is the identity.
struct TransportMap {
  SymMatrix map;
  double source_rank_tol = 0.0;
};

struct AlignmentResult {
  double distance = 0.0;
  Matrix rotation;  // orthogonal U minimizing ||S1^{1/2} - U S2^{1/2}||_HS
};

/// sqrt(max(0, tr S1 + tr S2 - 2 tr (S2^{1/2} S1 S2^{1/2})^{1/2})).
double procrustes_distance(const Covariance& s1, const Covariance& s2);

/// Same distance computed by explicitly solving the orthogonal Procrustes
/// problem between the square roots (polar factor of S1^{1/2} S2^{1/2}).
AlignmentResult procrustes_distance_via_alignment(const Covariance& s1,
                                                  const Covariance& s2);

/// 2-Wasserstein distance between N(m1, S1) and N(m2, S2).
double gaussian_w2(const Vector& m1, const Covariance& s1, const Vector& m2,
                   const Covariance& s2);

/// ker(S1) within ker(S2), numerically: the compression of S2 to the
/// eigenvectors of S1 with lambda <= rank_tol * lambda_max(S1) must have
/// operator norm <= rank_tol * (1 + tr S2).
bool kernel_condition(const Covariance& s1, const Covariance& s2,
                      std::optional<double> rank_tol = std::nullopt);

/// S1^{-1/2} (S1^{1/2} S2 S1^{1/2})^{1/2} S1^{-1/2}, plus the identity on
/// ker(S1). Throws KernelConditionError when kernel_condition fails.
TransportMap optimal_map(const Covariance& s1, const Covariance& s2,
                         std::optional<double> rank_tol = std::nullopt);

/// lambda_max(t) / smallest positive eigenvalue of t. Infinite when t == 0.
double map_condition_number(const TransportMap& t);

}  // namespace covgeom
