#pragma once

// Frechet means of finite covariance families under the Procrustes metric.
//
// Two solvers are provided. mean_fixed_point() is the Wasserstein
// steepest-descent iteration S <- T S T, where T averages the optimal maps
// from the current iterate to each member. mean_procrustes_averaging() is
// generalized Procrustes analysis on square roots: rotate each root onto the
// running average, re-average, repeat.
//
// Both record per-iterate diagnostics. The Frechet functional is
// non-increasing and tr(S^k) non-decreasing along either iteration; callers
// can check those traces rather than trusting the solver.

#include <optional>
#include <span>
#include <vector>

#include "covgeom/error.h"
#include "covgeom/spectral.h"

namespace covgeom {

enum class MeanInit {
  kEuclideanMean,    // (1/N) sum S_i
  kRootMeanSquare,   // ((1/N) sum S_i^{1/2})^2
  kExplicit,         // MeanConfig::explicit_init
};

struct MeanConfig {
  int max_iter = 200;
  /// Convergence on the relative change of the Frechet functional (descent,
  /// using the decrease the next step could still achieve) or of the
  /// averaged root in HS norm (Procrustes averaging).
  double rel_tol = 1e-9;
  /// Descent only: the step ||T - I|| measured at the iterate, which is the
  /// gradient norm of F, must be <= grad_tol * (1 + sqrt(tr S)).
  double grad_tol = 1e-9;
  /// The returned mean must also certify itself: fixed_point_residual <=
  /// residual_tol * (1 + tr mean).
  double residual_tol = 1e-6;
  MeanInit init = MeanInit::kEuclideanMean;
  std::optional<Covariance> explicit_init;
  std::optional<double> rank_tol;

  /// Throws OutOfRange on max_iter < 1, non-positive tolerances, or a
  /// missing explicit initializer.
  void Validate() const;
};

struct MeanResult {
  Covariance mean;
  int iterations = 0;
  bool converged = false;
  /// Entry k belongs to the k-th iterate; entry 0 is the initial point.
  std::vector<double> functional_trace;
  std::vector<double> residual_trace;
  std::vector<double> trace_of_iterates;
  std::vector<double> min_eigenvalue_trace;
  /// Dimension of the subspace the solver ran in, after removing the common
  /// kernel of the family.
  Index active_dim = 0;
};

/// Raised when max_iter is exhausted; carries the last iterate.
class MaxIterExceeded : public Error {
 public:
  explicit MaxIterExceeded(MeanResult best);

  const MeanResult& best() const noexcept { return best_; }

 private:
  MeanResult best_;
};

/// (1/2N) sum_i Pi^2(S, S_i).
double frechet_functional(const Covariance& s, std::span<const Covariance> family);

MeanResult mean_fixed_point(std::span<const Covariance> family,
                            const MeanConfig& cfg = {});

MeanResult mean_procrustes_averaging(std::span<const Covariance> family,
                                     const MeanConfig& cfg = {});

/// Orthogonal R maximizing tr(R^T L2^T L1), i.e. minimizing ||L1 - L2 R||_HS.
Matrix pairwise_alignment(const Matrix& l1, const Matrix& l2);

/// Trace norm of S - (1/N) sum_i (S^{1/2} S_i S^{1/2})^{1/2}. Zero exactly
/// at a Frechet mean.
double fixed_point_residual(const Covariance& s, std::span<const Covariance> family);

/// Covariance of (t_1(Z), ..., t_N(Z)) for Z ~ N(0, mean), stored as one
/// (N d) x (N d) matrix of d x d blocks t_i mean t_j.
class JointCovariance {
 public:
  JointCovariance(Index count, Index dim, Matrix full);

  Index count() const { return count_; }
  Index dim() const { return dim_; }
  const Matrix& full() const { return full_; }
  Matrix block(Index i, Index j) const;

 private:
  Index count_;
  Index dim_;
  Matrix full_;
};

/// Gaussian multicoupling built from the optimal maps out of `mean`.
/// Throws KernelConditionError carrying the offending member index.
JointCovariance multicoupling(const Covariance& mean, std::span<const Covariance> family,
                              std::optional<double> rank_tol = std::nullopt);

/// (1/2N^2) sum_{i<j} E||Y_i - Y_j||^2 under the coupling.
double multicoupling_cost(const JointCovariance& joint);

}  // namespace covgeom
