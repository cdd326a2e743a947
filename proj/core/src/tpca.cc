#include "covgeom/tpca.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "covgeom/error.h"

namespace covgeom {
namespace {

// Gram eigenvalues below this fraction of the largest one are treated as
// roundoff (the centred lifts always have at least one exact dependency).
constexpr double kGramRelTol = 1e-10;

void ThrowRange(const std::string& what) { throw Error(ErrorCode::kOutOfRange, what); }

}  // namespace

std::vector<TangentVector> lift(std::span<const Covariance> family, const Covariance& mean,
                                std::optional<double> rank_tol) {
  std::vector<TangentVector> out;
  out.reserve(family.size());
  for (std::size_t i = 0; i < family.size(); ++i) {
    try {
      out.push_back(log_map(mean, family[i], rank_tol));
    } catch (const KernelConditionError&) {
      throw KernelConditionError("log map from the mean to member does not exist", i);
    }
  }
  return out;
}

PcaResult tangent_pca(std::span<const TangentVector> lifted, const Covariance& mean,
                      Index k) {
  const Index n = static_cast<Index>(lifted.size());
  const Index d = mean.dim();
  if (n == 0) throw Error(ErrorCode::kEmptyFamily, "no lifted vectors");
  if (k < 0 || k > std::min(n, d * (d + 1) / 2)) {
    ThrowRange("k = " + std::to_string(k) + " exceeds min(N, d(d+1)/2)");
  }
  for (const auto& v : lifted) {
    if (v.base.dim() != d || v.direction.dim() != d) {
      throw Error(ErrorCode::kDimMismatch, "lifted vector dimension differs from the mean");
    }
    if (max_abs(v.base.matrix() - mean.matrix()) >
        1e-12 * (1.0 + max_abs(mean.matrix()))) {
      throw Error(ErrorCode::kOutOfRange, "lifted vectors are not based at the mean");
    }
  }

  Matrix avg = Matrix::Zero(d, d);
  for (const auto& v : lifted) avg += v.direction.matrix();
  const SymMatrix lifted_mean(avg / static_cast<double>(n));

  std::vector<SymMatrix> centred;
  centred.reserve(lifted.size());
  for (const auto& v : lifted) centred.push_back(v.direction - lifted_mean);

  Matrix gram(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i; j < n; ++j) {
      gram(i, j) = gram(j, i) = tangent_inner(mean, centred[i], centred[j]);
    }
  }
  const Spectrum gram_spec = sym_eigen(SymMatrix(gram));

  PcaResult out{mean};
  out.lifted_mean = lifted_mean;
  out.lifted_mean_norm = tangent_norm(mean, lifted_mean);
  out.total_variance = std::max(0.0, gram.trace()) / static_cast<double>(n);

  const double floor = kGramRelTol * std::max(gram_spec.values(0), 0.0);
  for (Index a = 0; a < k; ++a) {
    const double gamma = gram_spec.values(a);
    if (!(gamma > floor) || gamma <= 0.0) break;
    Matrix comp = Matrix::Zero(d, d);
    for (Index i = 0; i < n; ++i) comp += gram_spec.vectors(i, a) * centred[i].matrix();
    SymMatrix candidate(comp / std::sqrt(gamma));
    // Gram-Schmidt under tr(A S B), twice, against the accepted components.
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& prev : out.components) {
        candidate -= tangent_inner(mean, candidate, prev) * prev;
      }
    }
    const double norm = tangent_norm(mean, candidate);
    if (!(norm > 0.0)) break;
    out.components.push_back(candidate * (1.0 / norm));
  }
  out.effective_rank = static_cast<Index>(out.components.size());

  out.scores.resize(n, out.effective_rank);
  for (Index i = 0; i < n; ++i) {
    for (Index a = 0; a < out.effective_rank; ++a) {
      out.scores(i, a) = tangent_inner(mean, centred[i], out.components[a]);
    }
  }
  out.variances.assign(static_cast<std::size_t>(k), 0.0);
  for (Index a = 0; a < k; ++a) {
    out.variances[a] = std::max(0.0, gram_spec.values(a)) / static_cast<double>(n);
  }
  return out;
}

Covariance principal_geodesic(const Covariance& base, const SymMatrix& component, double s) {
  try {
    return exp_map(base, s * component);
  } catch (const LeavesConeError& e) {
    const Spectrum spec = sym_eigen(component);
    const double inf = std::numeric_limits<double>::infinity();
    const double top = spec.values.size() ? spec.values(0) : 0.0;
    const double bottom = spec.values.size() ? spec.values(spec.values.size() - 1) : 0.0;
    const double s_hi = bottom < 0.0 ? -1.0 / bottom : inf;
    const double s_lo = top > 0.0 ? -1.0 / top : -inf;
    throw LeavesConeError(e.lambda_min(), s_lo, s_hi);
  }
}

Covariance reconstruct(const Covariance& mean, const PcaResult& pca, Index i, Index k) {
  if (i < 0 || i >= pca.scores.rows()) ThrowRange("member index " + std::to_string(i));
  if (k < 0 || k > pca.effective_rank) {
    ThrowRange("k = " + std::to_string(k) + " exceeds the " +
               std::to_string(pca.effective_rank) + " available components");
  }
  SymMatrix direction = pca.lifted_mean;
  for (Index a = 0; a < k; ++a) direction += pca.scores(i, a) * pca.components[a];
  return exp_map(mean, direction);
}

}  // namespace covgeom
