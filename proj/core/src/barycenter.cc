#include "covgeom/barycenter.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "covgeom/bures.h"

namespace covgeom {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void RequireFamily(std::span<const Covariance> family) {
  if (family.empty()) throw Error(ErrorCode::kEmptyFamily, "family has no members");
  const Index d = family.front().dim();
  for (std::size_t i = 1; i < family.size(); ++i) {
    if (family[i].dim() != d) {
      throw Error(ErrorCode::kDimMismatch,
                  "member " + std::to_string(i) + " has dimension " +
                      std::to_string(family[i].dim()) + ", member 0 has " +
                      std::to_string(d));
    }
  }
}

double AverageTrace(std::span<const Covariance> family) {
  double sum = 0.0;
  for (const auto& s : family) sum += s.trace();
  return sum / static_cast<double>(family.size());
}

SymMatrix EuclideanMean(std::span<const Covariance> family) {
  Matrix sum = Matrix::Zero(family.front().dim(), family.front().dim());
  for (const auto& s : family) sum += s.matrix();
  return SymMatrix(sum / static_cast<double>(family.size()));
}

// Level below which changes in F are indistinguishable from roundoff.
double FunctionalNoise(std::span<const Covariance> family) {
  return 16.0 * kEps * static_cast<double>(family.front().dim()) *
         (1.0 + AverageTrace(family));
}

bool Certified(double residual, const Covariance& s, const MeanConfig& cfg) {
  return residual <= cfg.residual_tol * (1.0 + s.trace());
}

// Orthonormal basis of the range of the Euclidean mean, which is the
// orthogonal complement of the common kernel of the family.
Matrix CommonRange(std::span<const Covariance> family, double rank_tol) {
  const Covariance euclid = assume_psd(EuclideanMean(family));
  const double threshold = rank_tol * euclid.lambda_max();
  Index rank = 0;
  for (Index k = 0; k < euclid.dim(); ++k) {
    if (euclid.spectrum().values(k) > threshold) ++rank;
  }
  return euclid.spectrum().vectors.leftCols(rank);
}

Covariance Compress(const Covariance& s, const Matrix& basis) {
  return assume_psd(SymMatrix(basis.transpose() * s.matrix() * basis));
}

Covariance Embed(const Covariance& s, const Matrix& basis) {
  return assume_psd(SymMatrix(basis * s.matrix() * basis.transpose()));
}

// Restricts the family to its common range. Returns false (leaving `out`
// untouched) when no restriction is needed.
bool Deflate(std::span<const Covariance> family, double rank_tol, Matrix& basis,
             std::vector<Covariance>& out) {
  basis = CommonRange(family, rank_tol);
  if (basis.cols() == family.front().dim()) return false;
  out.clear();
  out.reserve(family.size());
  for (const auto& s : family) out.push_back(Compress(s, basis));
  return true;
}

void Record(MeanResult& r, const Covariance& iterate, double functional,
            double residual) {
  r.functional_trace.push_back(functional);
  r.residual_trace.push_back(residual);
  r.trace_of_iterates.push_back(iterate.trace());
  r.min_eigenvalue_trace.push_back(iterate.lambda_min());
}

struct IterateEval {
  double functional = 0.0;
  double residual = 0.0;
  double step = 0.0;  // tangent norm of T - I, the gradient norm of F
  SymMatrix average_map;
};

// One pass over the family at the current iterate: the functional, the
// fixed-point residual and the averaged optimal map all share the roots
// (S^{1/2} S_i S^{1/2})^{1/2}.
IterateEval EvaluateIterate(const Covariance& s, std::span<const Covariance> family,
                            double rank_tol, std::size_t iterate) {
  const Index d = s.dim();
  const SymMatrix root = sqrt_psd(s);
  const SymMatrix inv_root = pinv_sqrt(s, rank_tol);
  const SymMatrix kernel = null_projector(s, rank_tol);
  Matrix root_sum = Matrix::Zero(d, d);
  Matrix map_sum = Matrix::Zero(d, d);
  double functional = 0.0;
  for (const auto& target : family) {
    if (!kernel_condition(s, target, rank_tol)) {
      throw KernelConditionError("iterate no longer covers the range of a family member",
                                 iterate);
    }
    const Covariance middle = assume_psd(sandwich(root.matrix(), target));
    const SymMatrix middle_root = sqrt_psd(middle);
    root_sum += middle_root.matrix();
    map_sum += sandwich(inv_root.matrix(), middle_root).matrix() + kernel.matrix();
    functional += std::max(0.0, s.trace() + target.trace() - 2.0 * trace_sqrt(middle));
  }
  const double n = static_cast<double>(family.size());
  IterateEval out;
  out.functional = functional / (2.0 * n);
  out.residual = norms(SymMatrix(s.matrix() - root_sum / n)).trace_norm;
  out.average_map = SymMatrix(map_sum / n);
  const SymMatrix direction = out.average_map - SymMatrix::Identity(d);
  out.step = std::sqrt(std::max(
      0.0, (direction.matrix() * s.matrix() * direction.matrix()).trace()));
  return out;
}

// A unit descent step decreases F by at least step^2 / 2, so that is the
// change the next iteration could still achieve.
bool Settled(const IterateEval& eval, const Covariance& s, const MeanConfig& cfg,
             double noise) {
  const double predicted_change = 0.5 * eval.step * eval.step;
  return predicted_change <= cfg.rel_tol * eval.functional + noise &&
         eval.step <= cfg.grad_tol * (1.0 + std::sqrt(s.trace())) &&
         Certified(eval.residual, s, cfg);
}

Covariance InitialPoint(std::span<const Covariance> family, const MeanConfig& cfg,
                        const Matrix* basis) {
  switch (cfg.init) {
    case MeanInit::kEuclideanMean:
      return assume_psd(EuclideanMean(family));
    case MeanInit::kRootMeanSquare: {
      Matrix sum = Matrix::Zero(family.front().dim(), family.front().dim());
      for (const auto& s : family) sum += sqrt_psd(s).matrix();
      const Matrix avg = sum / static_cast<double>(family.size());
      return assume_psd(SymMatrix(avg * avg));
    }
    case MeanInit::kExplicit:
      break;
  }
  const Covariance& init = *cfg.explicit_init;
  if (basis != nullptr) {
    if (init.dim() != basis->rows()) {
      throw Error(ErrorCode::kDimMismatch, "explicit initial point has the wrong dimension");
    }
    return Compress(init, *basis);
  }
  if (init.dim() != family.front().dim()) {
    throw Error(ErrorCode::kDimMismatch, "explicit initial point has the wrong dimension");
  }
  return init;
}

MeanResult FinishDeflated(MeanResult reduced, const Matrix& basis) {
  MeanResult out = std::move(reduced);
  out.mean = Embed(out.mean, basis);
  out.active_dim = basis.cols();
  return out;
}

MeanResult ZeroMean(std::span<const Covariance> family) {
  const Covariance zero = assume_psd(SymMatrix::Zero(family.front().dim()));
  MeanResult out{zero};
  out.converged = true;
  Record(out, zero, 0.0, 0.0);
  return out;
}

MeanResult FixedPointInActiveSpace(std::span<const Covariance> family,
                                   const MeanConfig& cfg, double rank_tol,
                                   Covariance current) {
  if (current.lambda_min() <= rank_tol * current.lambda_max()) {
    throw KernelConditionError("initial point is not injective", 0);
  }
  const double noise = FunctionalNoise(family);
  IterateEval eval = EvaluateIterate(current, family, rank_tol, 0);
  MeanResult result{current};
  result.active_dim = current.dim();
  Record(result, current, eval.functional, eval.residual);
  result.converged = Settled(eval, current, cfg, noise);
  for (int k = 1; k <= cfg.max_iter && !result.converged; ++k) {
    current = assume_psd(sandwich(eval.average_map.matrix(), current));
    eval = EvaluateIterate(current, family, rank_tol, static_cast<std::size_t>(k));
    Record(result, current, eval.functional, eval.residual);
    result.iterations = k;
    result.converged = Settled(eval, current, cfg, noise);
  }
  result.mean = current;
  return result;
}

}  // namespace

void MeanConfig::Validate() const {
  if (max_iter < 1) throw Error(ErrorCode::kOutOfRange, "max_iter must be at least 1");
  if (!(rel_tol > 0.0)) throw Error(ErrorCode::kOutOfRange, "rel_tol must be positive");
  if (!(grad_tol > 0.0)) throw Error(ErrorCode::kOutOfRange, "grad_tol must be positive");
  if (!(residual_tol > 0.0)) {
    throw Error(ErrorCode::kOutOfRange, "residual_tol must be positive");
  }
  if (rank_tol && !(*rank_tol >= 0.0)) {
    throw Error(ErrorCode::kOutOfRange, "rank_tol must be non-negative");
  }
  if (init == MeanInit::kExplicit && !explicit_init) {
    throw Error(ErrorCode::kOutOfRange, "explicit initializer requested but not given");
  }
}

MaxIterExceeded::MaxIterExceeded(MeanResult best)
    : Error(ErrorCode::kMaxIterExceeded,
            "no convergence after " + std::to_string(best.iterations) + " iterations"),
      best_(std::move(best)) {}

double frechet_functional(const Covariance& s, std::span<const Covariance> family) {
  RequireFamily(family);
  double sum = 0.0;
  for (const auto& member : family) {
    const double d = procrustes_distance(s, member);
    sum += d * d;
  }
  return sum / (2.0 * static_cast<double>(family.size()));
}

MeanResult mean_fixed_point(std::span<const Covariance> family, const MeanConfig& cfg) {
  RequireFamily(family);
  cfg.Validate();
  const Index d = family.front().dim();
  const double rank_tol = cfg.rank_tol.value_or(default_rel_tol(d));

  Matrix basis;
  std::vector<Covariance> reduced;
  const bool deflated = Deflate(family, rank_tol, basis, reduced);
  if (deflated && basis.cols() == 0) return ZeroMean(family);
  std::span<const Covariance> active = deflated ? std::span<const Covariance>(reduced) : family;

  Covariance init = InitialPoint(active, cfg, deflated ? &basis : nullptr);
  MeanResult result = FixedPointInActiveSpace(active, cfg, rank_tol, std::move(init));
  if (deflated) result = FinishDeflated(std::move(result), basis);
  if (!result.converged) throw MaxIterExceeded(std::move(result));
  return result;
}

MeanResult mean_procrustes_averaging(std::span<const Covariance> family,
                                     const MeanConfig& cfg) {
  RequireFamily(family);
  cfg.Validate();
  const Index d = family.front().dim();

  std::vector<Matrix> roots;
  roots.reserve(family.size());
  for (const auto& s : family) roots.push_back(sqrt_psd(s).matrix());
  const double n = static_cast<double>(family.size());

  Matrix average = Matrix::Zero(d, d);
  if (cfg.init == MeanInit::kExplicit) {
    if (cfg.explicit_init->dim() != d) {
      throw Error(ErrorCode::kDimMismatch, "explicit initial point has the wrong dimension");
    }
    average = sqrt_psd(*cfg.explicit_init).matrix();
  } else {
    for (const auto& l : roots) average += l;
    average /= n;
  }

  const double noise = FunctionalNoise(family);
  auto evaluate = [&](const Matrix& avg, MeanResult* r) {
    Covariance iterate = assume_psd(SymMatrix(avg * avg.transpose()));
    const double f = frechet_functional(iterate, family);
    const double res = fixed_point_residual(iterate, family);
    if (r != nullptr) Record(*r, iterate, f, res);
    return std::tuple{std::move(iterate), f, res};
  };

  auto [iterate, f0, res0] = evaluate(average, nullptr);
  MeanResult result{iterate};
  result.active_dim = d;
  Record(result, iterate, f0, res0);
  if (f0 <= noise && Certified(res0, iterate, cfg)) {
    result.converged = true;
    return result;
  }

  for (int k = 1; k <= cfg.max_iter; ++k) {
    Matrix next = Matrix::Zero(d, d);
    for (auto& l : roots) {
      l = l * pairwise_alignment(average, l);
      next += l;
    }
    next /= n;
    const double change = (next - average).norm() / std::max(average.norm(), kEps);
    average = std::move(next);
    auto [cur, f, res] = evaluate(average, &result);
    result.mean = std::move(cur);
    result.iterations = k;
    if (change <= cfg.rel_tol && Certified(res, result.mean, cfg)) {
      result.converged = true;
      break;
    }
  }
  if (!result.converged) throw MaxIterExceeded(std::move(result));
  return result;
}

Matrix pairwise_alignment(const Matrix& l1, const Matrix& l2) {
  if (l1.rows() != l2.rows() || l1.cols() != l2.cols()) {
    throw Error(ErrorCode::kDimMismatch, "alignment needs equally shaped operands");
  }
  return polar_factor(l2.transpose() * l1);
}

double fixed_point_residual(const Covariance& s, std::span<const Covariance> family) {
  RequireFamily(family);
  if (s.dim() != family.front().dim()) {
    throw Error(ErrorCode::kDimMismatch, "candidate and family dimensions differ");
  }
  const Index d = s.dim();
  const SymMatrix root = sqrt_psd(s);
  Matrix sum = Matrix::Zero(d, d);
  for (const auto& member : family) {
    sum += sqrt_psd(assume_psd(sandwich(root.matrix(), member))).matrix();
  }
  return norms(SymMatrix(s.matrix() - sum / static_cast<double>(family.size())))
      .trace_norm;
}

JointCovariance::JointCovariance(Index count, Index dim, Matrix full)
    : count_(count), dim_(dim), full_(std::move(full)) {}

Matrix JointCovariance::block(Index i, Index j) const {
  return full_.block(i * dim_, j * dim_, dim_, dim_);
}

JointCovariance multicoupling(const Covariance& mean, std::span<const Covariance> family,
                              std::optional<double> rank_tol) {
  RequireFamily(family);
  const Index d = mean.dim();
  if (family.front().dim() != d) {
    throw Error(ErrorCode::kDimMismatch, "mean and family dimensions differ");
  }
  const Index n = static_cast<Index>(family.size());
  std::vector<Matrix> maps;
  maps.reserve(family.size());
  for (std::size_t i = 0; i < family.size(); ++i) {
    if (!kernel_condition(mean, family[i], rank_tol)) {
      throw KernelConditionError("no optimal map from the mean to member", i);
    }
    maps.push_back(optimal_map(mean, family[i], rank_tol).map.matrix());
  }
  Matrix full(n * d, n * d);
  for (Index i = 0; i < n; ++i) {
    const Matrix left = maps[i] * mean.matrix();
    for (Index j = 0; j < n; ++j) full.block(i * d, j * d, d, d) = left * maps[j];
  }
  full = 0.5 * (full + full.transpose()).eval();
  return JointCovariance(n, d, std::move(full));
}

double multicoupling_cost(const JointCovariance& joint) {
  const Index n = joint.count();
  double sum = 0.0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      sum += joint.block(i, i).trace() + joint.block(j, j).trace() -
             2.0 * joint.block(i, j).trace();
    }
  }
  const double nn = static_cast<double>(n);
  return sum / (2.0 * nn * nn);
}

}  // namespace covgeom
