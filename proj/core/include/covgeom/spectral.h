#pragma once

// Dense symmetric matrices, their eigendecomposition, and the PSD matrix
// functions (square root, pseudo-inverse square root, trace of the root)
// used by every other part of the library.

#include <initializer_list>
#include <optional>

#include <Eigen/Core>

namespace covgeom {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Square real matrix that is symmetric bit-for-bit. Construction from an
/// arbitrary square matrix replaces it by (M + M^T) / 2 and rejects NaN/Inf.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(const Matrix& m);

  static SymMatrix Zero(Index dim);
  static SymMatrix Identity(Index dim);
  static SymMatrix Diagonal(const Vector& diag);
  static SymMatrix Diagonal(std::initializer_list<double> diag);

  Index dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }
  double operator()(Index i, Index j) const { return m_(i, j); }
  double trace() const { return m_.trace(); }

  SymMatrix operator-() const;
  SymMatrix& operator+=(const SymMatrix& other);
  SymMatrix& operator-=(const SymMatrix& other);
  SymMatrix& operator*=(double s);

  friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
  friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
  friend SymMatrix operator*(SymMatrix a, double s) { return a *= s; }
  friend SymMatrix operator*(double s, SymMatrix a) { return a *= s; }

 private:
  Matrix m_;
};

/// Eigenpairs of a symmetric matrix. `values` are sorted descending and the
/// columns of `vectors` are the matching orthonormal eigenvectors, each with
/// its largest-magnitude component positive.
struct Spectrum {
  Vector values;
  Matrix vectors;

  /// V f(diag) V^T, symmetrized.
  template <typename F>
  SymMatrix Apply(F&& f) const {
    Vector mapped(values.size());
    for (Index k = 0; k < values.size(); ++k) mapped(k) = f(values(k));
    return SymMatrix(vectors * mapped.asDiagonal() * vectors.transpose());
  }

  SymMatrix Reconstruct() const {
    return Apply([](double v) { return v; });
  }
};

/// Symmetric positive semi-definite matrix together with its (clamped)
/// spectrum. Only obtainable through validate_psd() or assume_psd().
class Covariance {
 public:
  const SymMatrix& sym() const { return sym_; }
  const Matrix& matrix() const { return sym_.matrix(); }
  const Spectrum& spectrum() const { return spectrum_; }
  Index dim() const { return sym_.dim(); }
  double trace() const { return sym_.trace(); }
  double lambda_max() const;
  double lambda_min() const;

  operator const SymMatrix&() const { return sym_; }  // NOLINT

 private:
  Covariance(SymMatrix sym, Spectrum spectrum)
      : sym_(std::move(sym)), spectrum_(std::move(spectrum)) {}

  friend Covariance validate_psd(const SymMatrix&, std::optional<double>);
  friend Covariance assume_psd(const SymMatrix&);

  SymMatrix sym_;
  Spectrum spectrum_;
};

/// Cyclic Jacobi eigensolver. Deterministic: fixed sweep order, stable sort
/// by value, ties broken by the index of the dominant eigenvector entry.
Spectrum sym_eigen(const SymMatrix& m);

/// Relative tolerance factor d * machine-epsilon shared by psd and rank
/// decisions; absolute thresholds multiply it by the largest eigenvalue.
double default_rel_tol(Index dim);

/// Accepts M when lambda_min >= -psd_tol and clamps eigenvalues in
/// [-psd_tol, 0) to zero. psd_tol defaults to d * eps * max|lambda|.
/// Throws NotPsdError otherwise, NonFinite via SymMatrix.
Covariance validate_psd(const SymMatrix& m,
                        std::optional<double> psd_tol = std::nullopt);

/// For matrices that are PSD by construction (congruences, products of
/// roots): clamps any negative roundoff eigenvalue without checking.
Covariance assume_psd(const SymMatrix& m);

/// Convenience: validate_psd(SymMatrix(m)).
Covariance make_covariance(const Matrix& m);

SymMatrix sqrt_psd(const Covariance& s);

/// lambda -> 1/sqrt(lambda) for lambda > rank_tol * lambda_max, else 0.
/// rank_tol is relative and defaults to default_rel_tol(dim).
SymMatrix pinv_sqrt(const Covariance& s,
                    std::optional<double> rank_tol = std::nullopt);

/// Orthogonal projector onto the eigenvectors with
/// lambda <= rank_tol * lambda_max (the numerical kernel).
SymMatrix null_projector(const Covariance& s,
                         std::optional<double> rank_tol = std::nullopt);

double trace_sqrt(const Covariance& s);

struct Norms {
  double op_norm = 0.0;
  double hs_norm = 0.0;
  double trace_norm = 0.0;
};

Norms norms(const SymMatrix& a);

/// A * S * A^T, symmetrized.
SymMatrix sandwich(const Matrix& a, const SymMatrix& s);

/// Orthogonal factor Q of the polar decomposition M = Q (M^T M)^{1/2}.
/// Q maximizes tr(Q^T M) over orthogonal matrices. On ker(M) the partial
/// isometry is completed to an orthogonal matrix, starting from the kernel
/// vectors themselves so that Q acts as the identity wherever it can.
Matrix polar_factor(const Matrix& m);

/// Largest absolute entry.
double max_abs(const Matrix& m);

}  // namespace covgeom
