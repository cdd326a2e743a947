#include "covgeom/spectral.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "covgeom/error.h"

namespace covgeom {
namespace {

// Exact when a == b; avoids overflow near the top of the range and keeps
// subnormals.
double Midpoint(double a, double b) {
  if (a == b) return a;
  if (std::abs(a) > 1.0 && std::abs(b) > 1.0) return 0.5 * a + 0.5 * b;
  return 0.5 * (a + b);
}


constexpr int kMaxSweeps = 100;
constexpr double kOffDiagonalRelTol = 1e-14;
constexpr double kEps = std::numeric_limits<double>::epsilon();

double OffDiagonalNorm(const Matrix& a) {
  double sum = 0.0;
  for (Index j = 0; j < a.cols(); ++j) {
    for (Index i = 0; i < a.rows(); ++i) {
      if (i != j) sum += a(i, j) * a(i, j);
    }
  }
  return std::sqrt(sum);
}

// Zeroes a(p, q) with a plane rotation J: a <- J^T a J, v <- v J.
void Rotate(Matrix& a, Matrix& v, Index p, Index q) {
  const double apq = a(p, q);
  if (apq == 0.0) return;
  const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
  double t;
  if (std::abs(theta) > 1e150) {
    t = 0.5 / theta;
  } else {
    t = (theta >= 0.0 ? 1.0 : -1.0) /
        (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  }
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  const Index d = a.rows();
  for (Index k = 0; k < d; ++k) {
    const double akp = a(k, p);
    const double akq = a(k, q);
    a(k, p) = c * akp - s * akq;
    a(k, q) = s * akp + c * akq;
  }
  for (Index k = 0; k < d; ++k) {
    const double apk = a(p, k);
    const double aqk = a(q, k);
    a(p, k) = c * apk - s * aqk;
    a(q, k) = s * apk + c * aqk;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  for (Index k = 0; k < d; ++k) {
    const double vkp = v(k, p);
    const double vkq = v(k, q);
    v(k, p) = c * vkp - s * vkq;
    v(k, q) = s * vkp + c * vkq;
  }
}

Index DominantIndex(const Matrix& v, Index col) {
  Index best = 0;
  double best_abs = -1.0;
  for (Index i = 0; i < v.rows(); ++i) {
    const double a = std::abs(v(i, col));
    if (a > best_abs) {
      best_abs = a;
      best = i;
    }
  }
  return best;
}

double ResolveRankTol(std::optional<double> rank_tol, Index dim) {
  return rank_tol.value_or(default_rel_tol(dim));
}

}  // namespace

SymMatrix::SymMatrix(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::kDimMismatch,
                "matrix is " + std::to_string(m.rows()) + "x" +
                    std::to_string(m.cols()) + ", expected square");
  }
  if (!m.allFinite()) {
    throw Error(ErrorCode::kNonFinite, "matrix has NaN or Inf entries");
  }
  m_ = m;
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = j + 1; i < m.rows(); ++i) {
      m_(i, j) = m_(j, i) = Midpoint(m(i, j), m(j, i));
    }
  }
}

SymMatrix SymMatrix::Zero(Index dim) { return SymMatrix(Matrix::Zero(dim, dim)); }

SymMatrix SymMatrix::Identity(Index dim) {
  return SymMatrix(Matrix::Identity(dim, dim));
}

SymMatrix SymMatrix::Diagonal(const Vector& diag) {
  return SymMatrix(Matrix(diag.asDiagonal()));
}

SymMatrix SymMatrix::Diagonal(std::initializer_list<double> diag) {
  Vector v(static_cast<Index>(diag.size()));
  Index i = 0;
  for (double x : diag) v(i++) = x;
  return Diagonal(v);
}

SymMatrix SymMatrix::operator-() const {
  SymMatrix out = *this;
  out.m_ = -out.m_;
  return out;
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& other) {
  if (dim() != other.dim()) {
    throw Error(ErrorCode::kDimMismatch, "cannot add matrices of different size");
  }
  m_ += other.m_;
  return *this;
}

SymMatrix& SymMatrix::operator-=(const SymMatrix& other) {
  if (dim() != other.dim()) {
    throw Error(ErrorCode::kDimMismatch,
                "cannot subtract matrices of different size");
  }
  m_ -= other.m_;
  return *this;
}

SymMatrix& SymMatrix::operator*=(double s) {
  m_ *= s;
  return *this;
}

double Covariance::lambda_max() const {
  return spectrum_.values.size() ? spectrum_.values(0) : 0.0;
}

double Covariance::lambda_min() const {
  const Index n = spectrum_.values.size();
  return n ? spectrum_.values(n - 1) : 0.0;
}

Spectrum sym_eigen(const SymMatrix& m) {
  const Index d = m.dim();
  Matrix a = m.matrix();
  Matrix v = Matrix::Identity(d, d);

  const double target = kOffDiagonalRelTol * a.norm();
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    if (OffDiagonalNorm(a) <= target) break;
    for (Index p = 0; p + 1 < d; ++p) {
      for (Index q = p + 1; q < d; ++q) Rotate(a, v, p, q);
    }
  }

  std::vector<Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), Index{0});
  std::vector<Index> dominant(order.size());
  for (Index k = 0; k < d; ++k) dominant[k] = DominantIndex(v, k);
  std::stable_sort(order.begin(), order.end(), [&](Index x, Index y) {
    if (a(x, x) != a(y, y)) return a(x, x) > a(y, y);
    return dominant[x] < dominant[y];
  });

  Spectrum out;
  out.values.resize(d);
  out.vectors.resize(d, d);
  for (Index k = 0; k < d; ++k) {
    const Index src = order[k];
    out.values(k) = a(src, src);
    out.vectors.col(k) = v.col(src);
    if (out.vectors(dominant[src], k) < 0.0) out.vectors.col(k) *= -1.0;
  }
  return out;
}

double default_rel_tol(Index dim) { return static_cast<double>(dim) * kEps; }

Covariance validate_psd(const SymMatrix& m, std::optional<double> psd_tol) {
  Spectrum spec = sym_eigen(m);
  const Index d = m.dim();
  const double scale = d ? spec.values.cwiseAbs().maxCoeff() : 0.0;
  const double tol = psd_tol.value_or(default_rel_tol(d) * scale);
  const double lambda_min = d ? spec.values(d - 1) : 0.0;
  if (lambda_min < -tol) throw NotPsdError(lambda_min, tol);
  if (lambda_min >= 0.0) return Covariance(m, std::move(spec));
  spec.values = spec.values.cwiseMax(0.0);
  SymMatrix clamped = spec.Reconstruct();
  return Covariance(std::move(clamped), std::move(spec));
}

Covariance assume_psd(const SymMatrix& m) {
  Spectrum spec = sym_eigen(m);
  const Index d = m.dim();
  if (d == 0 || spec.values(d - 1) >= 0.0) return Covariance(m, std::move(spec));
  spec.values = spec.values.cwiseMax(0.0);
  SymMatrix clamped = spec.Reconstruct();
  return Covariance(std::move(clamped), std::move(spec));
}

// Eigenvalues inside the roundoff band of the largest one are zeros that
// picked up noise; their square roots (~1e-8) would dominate the error.
namespace {
double RootFloor(const Covariance& s) { return default_rel_tol(s.dim()) * s.lambda_max(); }
}  // namespace

Covariance make_covariance(const Matrix& m) { return validate_psd(SymMatrix(m)); }

SymMatrix sqrt_psd(const Covariance& s) {
  const double floor = RootFloor(s);
  return s.spectrum().Apply([floor](double v) { return v > floor ? std::sqrt(v) : 0.0; });
}

SymMatrix pinv_sqrt(const Covariance& s, std::optional<double> rank_tol) {
  const double threshold = ResolveRankTol(rank_tol, s.dim()) * s.lambda_max();
  return s.spectrum().Apply(
      [threshold](double v) { return v > threshold ? 1.0 / std::sqrt(v) : 0.0; });
}

SymMatrix null_projector(const Covariance& s, std::optional<double> rank_tol) {
  const double threshold = ResolveRankTol(rank_tol, s.dim()) * s.lambda_max();
  return s.spectrum().Apply(
      [threshold](double v) { return v > threshold ? 0.0 : 1.0; });
}

double trace_sqrt(const Covariance& s) {
  const double floor = RootFloor(s);
  double sum = 0.0;
  for (Index k = 0; k < s.spectrum().values.size(); ++k) {
    const double v = s.spectrum().values(k);
    if (v > floor) sum += std::sqrt(v);
  }
  return sum;
}

Norms norms(const SymMatrix& a) {
  const Spectrum spec = sym_eigen(a);
  Norms out;
  for (Index k = 0; k < spec.values.size(); ++k) {
    const double v = std::abs(spec.values(k));
    out.op_norm = std::max(out.op_norm, v);
    out.hs_norm += v * v;
    out.trace_norm += v;
  }
  out.hs_norm = std::sqrt(out.hs_norm);
  return out;
}

SymMatrix sandwich(const Matrix& a, const SymMatrix& s) {
  return SymMatrix(a * s.matrix() * a.transpose());
}

Matrix polar_factor(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::kDimMismatch, "polar factor needs a square matrix");
  }
  const Index d = m.rows();
  const Spectrum gram = sym_eigen(SymMatrix(m.transpose() * m));
  const double threshold =
      default_rel_tol(d) * (d ? std::max(gram.values(0), 0.0) : 0.0);

  // Right singular vectors v_k with sigma_k^2 above threshold give left
  // vectors w_k = M v_k / sigma_k; Q = sum w_k v_k^T on that range.
  Matrix left(d, d);
  Matrix right(d, d);
  Index rank = 0;
  for (Index k = 0; k < d; ++k) {
    if (gram.values(k) > threshold && gram.values(k) > 0.0) {
      right.col(rank) = gram.vectors.col(k);
      left.col(rank) = m * gram.vectors.col(k) / std::sqrt(gram.values(k));
      ++rank;
    }
  }

  // Complete the left frame: try each kernel vector itself, then the
  // standard basis, keeping whatever survives Gram-Schmidt.
  auto orthogonalize = [&](Vector x, Index filled) {
    for (int pass = 0; pass < 2; ++pass) {
      for (Index j = 0; j < filled; ++j) x -= left.col(j).dot(x) * left.col(j);
    }
    return x;
  };
  for (Index k = 0; k < d; ++k) {
    if (gram.values(k) > threshold && gram.values(k) > 0.0) continue;
    const Vector kernel_vec = gram.vectors.col(k);
    Vector candidate = orthogonalize(kernel_vec, rank);
    for (Index e = 0; candidate.norm() < 0.5 && e < d; ++e) {
      candidate = orthogonalize(Vector::Unit(d, e), rank);
    }
    right.col(rank) = kernel_vec;
    left.col(rank) = candidate.normalized();
    ++rank;
  }

  Matrix q = left * right.transpose();
  // One symmetric orthogonalization pass absorbs the roundoff carried in by
  // small singular values: Q <- Q (Q^T Q)^{-1/2}.
  const Spectrum qq = sym_eigen(SymMatrix(q.transpose() * q));
  const SymMatrix inv_root =
      qq.Apply([](double v) { return v > 0.0 ? 1.0 / std::sqrt(v) : 0.0; });
  return q * inv_root.matrix();
}

double max_abs(const Matrix& m) {
  return m.size() ? m.cwiseAbs().maxCoeff() : 0.0;
}

}  // namespace covgeom
