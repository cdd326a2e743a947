#pragma once

// Experiments: Gaussian sampling, the random-deformation generative model,
// finite-rank projections, metric-equivalence diagnostics, the family whose
// mean cannot be dominated by its members, and the Gaussian fourth-moment
// identity. Everything random is a pure function of an RngSpec.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "covgeom/barycenter.h"
#include "covgeom/rng.h"
#include "covgeom/spectral.h"

namespace covgeom {

/// n x d array whose rows are S^{1/2} z with z standard normal. Row r uses
/// draw indices [r d, (r+1) d).
Matrix sample_gaussian(const Covariance& s, Index n, const RngSpec& rng);

/// Deformations T_i = I + A_i of a template, with sum_i A_i = 0 and
/// max_i ||A_i||_op = eps, and the deformed covariances T_i S T_i.
struct DeformationFamily {
  Covariance templ;
  std::vector<SymMatrix> maps;
  std::vector<Covariance> deformed;
};

/// n >= 2, eps in [0, 1). Entries of the raw perturbations are uniform on
/// [-1, 1] (upper triangle, mirrored).
DeformationFamily deformation_family(const Covariance& s, Index n, double eps,
                                     const RngSpec& rng);

/// Which orthonormal frame a rank-r projection keeps: the first r standard
/// coordinates, or the top-r eigenvectors of a reference covariance (the
/// projected matrix itself when no reference is given).
struct Basis {
  enum class Kind { kStandard, kEigen };

  Kind kind = Kind::kStandard;
  std::optional<Covariance> reference;

  static Basis Standard() { return {}; }
  static Basis Eigen(std::optional<Covariance> reference = std::nullopt) {
    return {Kind::kEigen, std::move(reference)};
  }
};

/// d x r orthonormal frame. `fallback` supplies the eigen reference when the
/// basis carries none.
Matrix projection_frame(Index dim, Index r, const Basis& basis,
                        const Covariance* fallback = nullptr);

/// P S P for the rank-r projector P of `basis`. Throws OutOfRange unless
/// 1 <= r <= d.
Covariance project(const Covariance& s, Index r, const Basis& basis);

/// tr((I - P) S), which equals Pi^2(S, P S P).
double projection_error(const Covariance& s, Index r, const Basis& basis);

struct ProjectionRow {
  Index rank = 0;
  /// ||mean of projected family - full mean||_1; empty when the solver failed.
  std::optional<double> mean_trace_distance;
  /// sup_{i<j} |Pi(P S_i P, P S_j P) - Pi(S_i, S_j)|.
  double pairwise_discrepancy = 0.0;
  /// sup_i tr((I - P) S_i), the tail mass left out by the projection.
  double max_tail = 0.0;
  std::vector<double> projection_errors;
  int solver_iterations = 0;
  std::string solver_error;
};

struct ProjectionStabilityReport {
  Covariance full_mean;
  std::vector<ProjectionRow> rows;
  /// Every recorded discrepancy is <= its predecessor + 1e-8.
  bool monotone = true;
};

/// For each rank (strictly increasing, within [1, d]) solve for the mean of
/// the compressed family and compare with the full-dimensional mean. The
/// eigen basis defaults to the Euclidean mean of the family. Solver errors
/// at a rank are recorded in the row, not thrown.
ProjectionStabilityReport projection_stability_experiment(
    std::span<const Covariance> family, std::span<const Index> ranks, const Basis& basis,
    const MeanConfig& cfg = {});

struct EquivalenceReport {
  double wasserstein = 0.0;  // Pi(A, B)
  double root_hs = 0.0;      // ||A^{1/2} - B^{1/2}||_HS
  double trace_dist = 0.0;   // ||A - B||_1
  /// sqrt(1 + tr B) + sqrt(tr B); the trace-distance bound
  /// ||A - B||_1 <= C(B) Pi(A, B) applies when tr A <= tr B + 1.
  double bound_constant = 0.0;
  bool bound_applicable = false;
  bool bound_holds = false;
  /// (sqrt(tr A) + sqrt(tr B)) Pi(A, B), valid without restriction.
  double unconditional_bound = 0.0;
};

EquivalenceReport convergence_equivalence(const Covariance& a, const Covariance& b);

struct CounterexampleFamily {
  Covariance mean;
  Covariance s1;
  Covariance s2;
  SymMatrix deformation;  // T; s1 = T mean T, s2 = (2I - T) mean (2I - T)
  std::vector<double> lambdas;
  std::vector<double> mus;
  std::vector<double> couplings;  // b_k
  /// thresholds[k] = mu_k / (mu_k + b_k^2 lambda_k): the largest c with
  /// <(mean - c s1) f_k, f_k> >= 0.
  std::vector<double> thresholds;
  Covariance recovered;
  double recovery_distance = 0.0;
  int solver_iterations = 0;
};

/// Dimension 2m, mean = diag(lambda_1, mu_1, ..., lambda_m, mu_m) with
/// lambda_k = 2^-k and mu_k = 0.9 lambda_k / ratio^k, coupling b_k = b0 2^-k
/// between e_k and f_k. Requires 1 <= m <= 15, ratio >= 5, b0 in (0, 1].
/// Throws Degenerate when mu_m is below the numerical rank threshold.
CounterexampleFamily counterexample_family(int m, double ratio = 5.0, double b0 = 1.0,
                                           const MeanConfig& cfg = {});

struct FourthMomentReport {
  double exact = 0.0;        // (tr S)^2 + 2 ||S||_HS^2
  double upper_bound = 0.0;  // 3 (tr S)^2
  double estimate = 0.0;
  double std_error = 0.0;
  double z_score = 0.0;
  Index sample_size = 0;
  Index rank = 0;
  bool within_tolerance = false;  // |z| <= 5
  bool bound_holds = false;
  bool equality_case = false;     // exact == upper bound (rank <= 1)
};

/// Monte Carlo E||X||^4 for X ~ N(0, S) against the closed form. n >= 1e4.
FourthMomentReport fourth_moment_check(const Covariance& s, Index n, const RngSpec& rng);

}  // namespace covgeom
