#pragma once

// Tangent-bundle calculus at a covariance S: inner product tr(A S B),
// exponential retraction (I+A) S (I+A), log map t - I, and the McCann
// geodesic between two covariances.

#include <optional>

#include "covgeom/spectral.h"

namespace covgeom {

struct TangentVector {
  Covariance base;
  SymMatrix direction;
};

double tangent_inner(const Covariance& s, const SymMatrix& a, const SymMatrix& b);

double tangent_norm(const Covariance& s, const SymMatrix& a);

/// (I + A) S (I + A). Throws LeavesConeError if I + A has an eigenvalue
/// below -psd_tol.
Covariance exp_map(const Covariance& s, const SymMatrix& a);

/// optimal_map(S0, S1) - I. Throws KernelConditionError if the map does not
/// exist.
TangentVector log_map(const Covariance& s0, const Covariance& s1,
                      std::optional<double> rank_tol = std::nullopt);

/// Point at parameter t in [0, 1] on the constant-speed geodesic from S0 to
/// S1, evaluated as (I + tA) S0 (I + tA) with A = log_map(S0, S1). The
/// endpoints are returned verbatim.
Covariance geodesic(const Covariance& s0, const Covariance& s1, double t,
                    std::optional<double> rank_tol = std::nullopt);

}  // namespace covgeom
