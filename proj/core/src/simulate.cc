#include "covgeom/simulate.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "covgeom/bures.h"
#include "covgeom/error.h"

namespace covgeom {
namespace {

constexpr int kMaxCounterexampleBlocks = 15;
constexpr double kSafetyFactor = 0.9;
constexpr double kMonotoneSlack = 1e-8;
constexpr double kZLimit = 5.0;

void ThrowRange(const std::string& what) { throw Error(ErrorCode::kOutOfRange, what); }

void CheckRank(Index r, Index d) {
  if (r < 1 || r > d) {
    ThrowRange("rank " + std::to_string(r) + " outside [1, " + std::to_string(d) + "]");
  }
}

Covariance Compress(const Covariance& s, const Matrix& frame) {
  return assume_psd(SymMatrix(frame.transpose() * s.matrix() * frame));
}

}  // namespace

Matrix sample_gaussian(const Covariance& s, Index n, const RngSpec& rng) {
  if (n < 1) ThrowRange("sample size must be positive");
  const Index d = s.dim();
  const CounterRng gen(rng);
  const Matrix root = sqrt_psd(s).matrix();
  Matrix z(d, n);
  for (Index r = 0; r < n; ++r) {
    for (Index j = 0; j < d; ++j) {
      z(j, r) = gen.Normal(static_cast<std::uint64_t>(r * d + j));
    }
  }
  return (root * z).transpose();
}

DeformationFamily deformation_family(const Covariance& s, Index n, double eps,
                                     const RngSpec& rng) {
  if (n < 2) ThrowRange("a deformation family needs at least two members");
  if (!(eps >= 0.0 && eps < 1.0)) ThrowRange("eps must lie in [0, 1)");
  const Index d = s.dim();
  const CounterRng gen(rng);

  std::vector<Matrix> raw(static_cast<std::size_t>(n), Matrix::Zero(d, d));
  Matrix avg = Matrix::Zero(d, d);
  for (Index i = 0; i < n; ++i) {
    for (Index p = 0; p < d; ++p) {
      for (Index q = p; q < d; ++q) {
        const double u = gen.Uniform(static_cast<std::uint64_t>((i * d + p) * d + q));
        raw[i](p, q) = raw[i](q, p) = 2.0 * u - 1.0;
      }
    }
    avg += raw[i];
  }
  avg /= static_cast<double>(n);

  double largest = 0.0;
  for (auto& g : raw) {
    g -= avg;
    largest = std::max(largest, norms(SymMatrix(g)).op_norm);
  }
  const double scale = largest > 0.0 ? eps / largest : 0.0;

  DeformationFamily out{s};
  for (const auto& g : raw) {
    SymMatrix t(Matrix::Identity(d, d) + scale * g);
    out.deformed.push_back(assume_psd(sandwich(t.matrix(), s)));
    out.maps.push_back(std::move(t));
  }
  return out;
}

Matrix projection_frame(Index dim, Index r, const Basis& basis, const Covariance* fallback) {
  CheckRank(r, dim);
  if (basis.kind == Basis::Kind::kStandard) return Matrix::Identity(dim, dim).leftCols(r);
  const Covariance* ref = basis.reference ? &*basis.reference : fallback;
  if (ref == nullptr) ThrowRange("eigen basis needs a reference covariance");
  if (ref->dim() != dim) {
    throw Error(ErrorCode::kDimMismatch, "eigen basis reference has the wrong dimension");
  }
  return ref->spectrum().vectors.leftCols(r);
}

Covariance project(const Covariance& s, Index r, const Basis& basis) {
  const Matrix frame = projection_frame(s.dim(), r, basis, &s);
  const Matrix p = frame * frame.transpose();
  return assume_psd(SymMatrix(p * s.matrix() * p));
}

double projection_error(const Covariance& s, Index r, const Basis& basis) {
  const Matrix frame = projection_frame(s.dim(), r, basis, &s);
  const double kept = (frame.transpose() * s.matrix() * frame).trace();
  return std::max(0.0, s.trace() - kept);
}

ProjectionStabilityReport projection_stability_experiment(
    std::span<const Covariance> family, std::span<const Index> ranks, const Basis& basis,
    const MeanConfig& cfg) {
  if (family.empty()) throw Error(ErrorCode::kEmptyFamily, "family has no members");
  const Index d = family.front().dim();
  for (std::size_t k = 0; k < ranks.size(); ++k) {
    CheckRank(ranks[k], d);
    if (k > 0 && ranks[k] <= ranks[k - 1]) ThrowRange("ranks must be strictly increasing");
  }

  std::optional<Covariance> euclid;
  if (basis.kind == Basis::Kind::kEigen && !basis.reference) {
    Matrix sum = Matrix::Zero(d, d);
    for (const auto& s : family) sum += s.matrix();
    euclid = assume_psd(SymMatrix(sum / static_cast<double>(family.size())));
  }

  const MeanResult full = mean_fixed_point(family, cfg);
  ProjectionStabilityReport report{full.mean};

  const std::size_t n = family.size();
  std::vector<double> full_pairs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      full_pairs.push_back(procrustes_distance(family[i], family[j]));
    }
  }

  for (const Index r : ranks) {
    ProjectionRow row;
    row.rank = r;
    const Matrix frame = projection_frame(d, r, basis, euclid ? &*euclid : nullptr);
    std::vector<Covariance> compressed;
    compressed.reserve(n);
    for (const auto& s : family) {
      compressed.push_back(Compress(s, frame));
      const double tail = std::max(0.0, s.trace() - compressed.back().trace());
      row.projection_errors.push_back(tail);
      row.max_tail = std::max(row.max_tail, tail);
    }
    std::size_t pair = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j, ++pair) {
        const double projected = procrustes_distance(compressed[i], compressed[j]);
        row.pairwise_discrepancy =
            std::max(row.pairwise_discrepancy, std::abs(projected - full_pairs[pair]));
      }
    }
    try {
      const MeanResult projected = mean_fixed_point(compressed, cfg);
      const SymMatrix embedded(frame * projected.mean.matrix() * frame.transpose());
      row.mean_trace_distance = norms(embedded - full.mean.sym()).trace_norm;
      row.solver_iterations = projected.iterations;
    } catch (const Error& e) {
      row.solver_error = e.what();
    }
    if (!report.rows.empty()) {
      const ProjectionRow& prev = report.rows.back();
      if (row.pairwise_discrepancy > prev.pairwise_discrepancy + kMonotoneSlack) {
        report.monotone = false;
      }
      if (row.mean_trace_distance && prev.mean_trace_distance &&
          *row.mean_trace_distance > *prev.mean_trace_distance + kMonotoneSlack) {
        report.monotone = false;
      }
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

EquivalenceReport convergence_equivalence(const Covariance& a, const Covariance& b) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::kDimMismatch, "dimensions differ");
  EquivalenceReport out;
  out.wasserstein = procrustes_distance(a, b);
  out.root_hs = (sqrt_psd(a).matrix() - sqrt_psd(b).matrix()).norm();
  out.trace_dist = norms(a.sym() - b.sym()).trace_norm;
  const double tb = std::max(0.0, b.trace());
  const double ta = std::max(0.0, a.trace());
  out.bound_constant = std::sqrt(1.0 + tb) + std::sqrt(tb);
  out.bound_applicable = ta <= tb + 1.0;
  out.bound_holds = out.trace_dist <= out.bound_constant * out.wasserstein + 1e-8;
  out.unconditional_bound = (std::sqrt(ta) + std::sqrt(tb)) * out.wasserstein;
  return out;
}

CounterexampleFamily counterexample_family(int m, double ratio, double b0,
                                           const MeanConfig& cfg) {
  if (m < 1) ThrowRange("m must be at least 1");
  if (m > kMaxCounterexampleBlocks) {
    throw Error(ErrorCode::kDegenerate,
                "m = " + std::to_string(m) + " exceeds the double-precision cap of " +
                    std::to_string(kMaxCounterexampleBlocks));
  }
  if (!(ratio >= 5.0) || !std::isfinite(ratio)) ThrowRange("ratio must be at least 5");
  if (!(b0 > 0.0 && b0 <= 1.0)) ThrowRange("b0 must lie in (0, 1]");

  const Index d = 2 * m;
  Vector diag(d);
  Matrix t = Matrix::Identity(d, d);
  std::vector<double> lambdas, mus, couplings, thresholds;
  for (int k = 1; k <= m; ++k) {
    const double lambda = std::ldexp(1.0, -k);
    const double mu = kSafetyFactor * lambda / std::pow(ratio, k);
    const double b = b0 * std::ldexp(1.0, -k);
    const Index e = 2 * (k - 1);
    const Index f = e + 1;
    diag(e) = lambda;
    diag(f) = mu;
    t(e, f) = t(f, e) = b;
    lambdas.push_back(lambda);
    mus.push_back(mu);
    couplings.push_back(b);
    thresholds.push_back(mu / (mu + b * b * lambda));
  }
  // The smallest eigenvalue must stay clear of the numerical kernel or the
  // mean is no longer identifiable in floating point.
  if (mus.back() <= 1e3 * default_rel_tol(d) * lambdas.front()) {
    throw Error(ErrorCode::kDegenerate,
                "mu_m = " + std::to_string(mus.back()) +
                    " is indistinguishable from zero at this precision");
  }

  const Covariance mean = validate_psd(SymMatrix::Diagonal(diag));
  const Matrix reflected = 2.0 * Matrix::Identity(d, d) - t;
  const Covariance s1 = assume_psd(sandwich(t, mean));
  const Covariance s2 = assume_psd(sandwich(reflected, mean));
  const std::vector<Covariance> pair = {s1, s2};
  const MeanResult solved = mean_fixed_point(pair, cfg);

  CounterexampleFamily out{mean, s1, s2, SymMatrix(t), std::move(lambdas), std::move(mus),
                           std::move(couplings), std::move(thresholds), solved.mean};
  out.recovery_distance = procrustes_distance(solved.mean, mean);
  out.solver_iterations = solved.iterations;
  return out;
}

FourthMomentReport fourth_moment_check(const Covariance& s, Index n, const RngSpec& rng) {
  if (n < 10000) ThrowRange("fourth moment check needs at least 1e4 samples");
  const Matrix x = sample_gaussian(s, n, rng);

  FourthMomentReport out;
  out.sample_size = n;
  const double tr = s.trace();
  const double hs2 = s.matrix().squaredNorm();
  out.exact = tr * tr + 2.0 * hs2;
  out.upper_bound = 3.0 * tr * tr;
  out.bound_holds = out.exact <= out.upper_bound + 1e-12;
  out.equality_case = out.upper_bound - out.exact <= 1e-12 * (1.0 + out.upper_bound);
  const double rank_floor = default_rel_tol(s.dim()) * s.lambda_max();
  for (Index k = 0; k < s.dim(); ++k) {
    if (s.spectrum().values(k) > rank_floor) ++out.rank;
  }

  // Welford accumulation of ||X||^4.
  double mean = 0.0;
  double m2 = 0.0;
  for (Index r = 0; r < n; ++r) {
    const double sq = x.row(r).squaredNorm();
    const double v = sq * sq;
    const double delta = v - mean;
    mean += delta / static_cast<double>(r + 1);
    m2 += delta * (v - mean);
  }
  out.estimate = mean;
  const double variance = m2 / static_cast<double>(n - 1);
  out.std_error = std::sqrt(variance / static_cast<double>(n));
  out.z_score = out.std_error > 0.0 ? (out.estimate - out.exact) / out.std_error : 0.0;
  out.within_tolerance = std::abs(out.z_score) <= kZLimit;
  return out;
}

}  // namespace covgeom
