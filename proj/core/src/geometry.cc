#include "covgeom/geometry.h"

#include <cmath>
#include <string>

#include "covgeom/bures.h"
#include "covgeom/error.h"

namespace covgeom {
namespace {

void RequireDim(Index expected, const SymMatrix& m) {
  if (m.dim() != expected) {
    throw Error(ErrorCode::kDimMismatch,
                "tangent direction has dimension " + std::to_string(m.dim()) +
                    ", base has " + std::to_string(expected));
  }
}

}  // namespace

double tangent_inner(const Covariance& s, const SymMatrix& a, const SymMatrix& b) {
  RequireDim(s.dim(), a);
  RequireDim(s.dim(), b);
  // tr(A S B) = sum_ij (A S)_ij B_ji, and B is symmetric.
  return (a.matrix() * s.matrix()).cwiseProduct(b.matrix()).sum();
}

double tangent_norm(const Covariance& s, const SymMatrix& a) {
  return std::sqrt(std::max(0.0, tangent_inner(s, a, a)));
}

Covariance exp_map(const Covariance& s, const SymMatrix& a) {
  RequireDim(s.dim(), a);
  const SymMatrix shifted = SymMatrix::Identity(s.dim()) + a;
  const Spectrum spec = sym_eigen(shifted);
  if (spec.values.size() > 0) {
    const double lambda_min = spec.values(spec.values.size() - 1);
    const double psd_tol =
        default_rel_tol(s.dim()) * spec.values.cwiseAbs().maxCoeff();
    if (lambda_min < -psd_tol) throw LeavesConeError(lambda_min);
  }
  return assume_psd(sandwich(shifted.matrix(), s));
}

TangentVector log_map(const Covariance& s0, const Covariance& s1,
                      std::optional<double> rank_tol) {
  const TransportMap t = optimal_map(s0, s1, rank_tol);
  return TangentVector{s0, t.map - SymMatrix::Identity(s0.dim())};
}

Covariance geodesic(const Covariance& s0, const Covariance& s1, double t,
                    std::optional<double> rank_tol) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw Error(ErrorCode::kOutOfRange,
                "geodesic parameter " + std::to_string(t) + " is outside [0, 1]");
  }
  const TangentVector log = log_map(s0, s1, rank_tol);
  if (t == 0.0) return s0;
  if (t == 1.0) return s1;
  return exp_map(s0, t * log.direction);
}

}  // namespace covgeom
