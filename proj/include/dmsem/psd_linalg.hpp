#pragma once

// Dense real symmetric positive semi-definite matrices used as word and
// phrase meanings: construction, spectral decomposition, square roots,
// von Neumann entropy and the trace inner product.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "dmsem/errors.hpp"

namespace dmsem {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Relative tolerance below which negative eigenvalues count as round-off.
inline constexpr double kEigenClampTolerance = 1e-8;
/// Relative tolerance for grouping (near-)equal eigenvalues into one eigenspace.
inline constexpr double kEigenGroupTolerance = 1e-8;
/// Maximum asymmetry accepted on construction, relative to the largest entry.
inline constexpr double kSymmetryTolerance = 1e-10;

namespace detail {

inline void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw NumericError(std::string(what) + ": non-finite entries");
}

inline void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw DataError(std::string(what) + ": expected a non-empty square matrix, got " +
                    std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
}

inline void require_symmetric(const Matrix& m, const char* what) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTolerance * scale)
    throw NumericError(std::string(what) + ": matrix is not symmetric (max |A-A^T| = " +
                       std::to_string(asym) + ")");
}

/// Eigen-decomposition of a symmetric matrix with eigenvalues sorted in
/// descending order and tiny negative values clamped to zero. Values below
/// -kEigenClampTolerance * lambda_max are rejected.
struct SortedEigen {
  Vector values;   // descending, >= 0
  Matrix vectors;  // columns match values
};

inline SortedEigen sorted_psd_eigen(const Matrix& sym, const char* what) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) throw NumericError(std::string(what) + ": eigensolver failed");
  const Eigen::Index n = sym.rows();
  SortedEigen out{Vector(n), Matrix(n, n)};
  // Eigen returns ascending order.
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values[i] = solver.eigenvalues()[n - 1 - i];
    out.vectors.col(i) = solver.eigenvectors().col(n - 1 - i);
  }
  const double lmax = out.values[0];
  const double lmin = out.values[n - 1];
  if (lmin < 0.0 && lmin < -kEigenClampTolerance * std::max(lmax, 0.0))
    throw NumericError(std::string(what) + ": matrix is not positive semi-definite (eigenvalue " +
                       std::to_string(lmin) + ", largest " + std::to_string(lmax) + ")");
  for (Eigen::Index i = 0; i < n; ++i) out.values[i] = std::max(out.values[i], 0.0);
  return out;
}

inline Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

}  // namespace detail

/// A symmetric PSD matrix with unit trace: a probabilistic mixture of
/// (sense) vectors. Immutable after construction.
class DensityMatrix {
 public:
  /// Validates, symmetrizes, clamps round-off negative eigenvalues and
  /// normalizes the trace of `m`.
  explicit DensityMatrix(const Matrix& m) {
    detail::require_square(m, "DensityMatrix");
    detail::require_finite(m, "DensityMatrix");
    detail::require_symmetric(m, "DensityMatrix");
    Matrix sym = detail::symmetrized(m);

    Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
    if (solver.info() != Eigen::Success) throw NumericError("DensityMatrix: eigensolver failed");
    const double lmin = solver.eigenvalues().minCoeff();
    const double lmax = solver.eigenvalues().maxCoeff();
    if (lmax <= 0.0) throw NumericError("DensityMatrix: matrix has no positive spectrum (zero trace)");
    if (lmin < -kEigenClampTolerance * lmax)
      throw NumericError("DensityMatrix: matrix is not positive semi-definite (eigenvalue " +
                         std::to_string(lmin) + ")");
    if (lmin < 0.0) {
      const Vector clamped = solver.eigenvalues().cwiseMax(0.0);
      sym = detail::symmetrized(solver.eigenvectors() * clamped.asDiagonal() *
                                solver.eigenvectors().transpose());
    }

    raw_trace_ = sym.trace();
    if (!(raw_trace_ > 0.0) || !std::isfinite(raw_trace_))
      throw NumericError("DensityMatrix: trace is not positive");
    data_ = sym / raw_trace_;
  }

  /// The maximally mixed state I/d.
  static DensityMatrix maximally_mixed(Eigen::Index dim) {
    return DensityMatrix(Matrix::Identity(dim, dim));
  }

  /// The pure state |v><v| / <v|v>.
  static DensityMatrix pure(const Vector& v) { return DensityMatrix(v * v.transpose()); }

  Eigen::Index dim() const noexcept { return data_.rows(); }
  const Matrix& data() const noexcept { return data_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return data_(i, j); }
  double trace() const { return data_.trace(); }
  /// Trace of the matrix handed to the constructor, before normalization.
  double raw_trace() const noexcept { return raw_trace_; }

 private:
  Matrix data_;
  double raw_trace_ = 1.0;
};

/// d x m matrix B whose columns are sense embeddings; A = B B^T.
class SenseMatrix {
 public:
  explicit SenseMatrix(Matrix columns) : columns_(std::move(columns)) {
    if (columns_.rows() < 1 || columns_.cols() < 1)
      throw DataError("SenseMatrix: need at least one sense column of positive dimension");
    detail::require_finite(columns_, "SenseMatrix");
  }

  Eigen::Index dim() const noexcept { return columns_.rows(); }
  Eigen::Index senses() const noexcept { return columns_.cols(); }
  const Matrix& columns() const noexcept { return columns_; }
  auto column(Eigen::Index i) const { return columns_.col(i); }

 private:
  Matrix columns_;
};

struct WeightedVector {
  Vector vector;
  double weight = 1.0;
};

/// Trace-normalized sum of weight * |v><v|.
inline DensityMatrix build_density(std::span<const WeightedVector> parts) {
  if (parts.empty()) throw DataError("build_density: no vectors");
  const Eigen::Index d = parts.front().vector.size();
  if (d == 0) throw DataError("build_density: zero-dimensional vector");
  Matrix acc = Matrix::Zero(d, d);
  bool any_weight = false;
  for (const auto& p : parts) {
    if (p.vector.size() != d)
      throw DataError("build_density: dimension mismatch (" + std::to_string(p.vector.size()) +
                      " vs " + std::to_string(d) + ")");
    if (!(p.weight >= 0.0) || !std::isfinite(p.weight))
      throw DataError("build_density: weights must be finite and nonnegative");
    if (!p.vector.allFinite()) throw NumericError("build_density: non-finite vector entries");
    if (p.weight == 0.0) continue;
    any_weight = true;
    acc.noalias() += p.weight * p.vector * p.vector.transpose();
  }
  if (!any_weight) throw NumericError("build_density: all weights are zero");
  if (!(acc.trace() > 0.0)) throw NumericError("build_density: all-zero input has no normalization");
  return DensityMatrix(acc);
}

/// A = B B^T with unit weight per column.
inline DensityMatrix build_density(const SenseMatrix& senses) {
  const Matrix& b = senses.columns();
  const Matrix acc = b * b.transpose();
  if (!(acc.trace() > 0.0)) throw NumericError("build_density: sense matrix is all zero");
  return DensityMatrix(acc);
}

/// One eigenvalue together with an orthonormal basis of its eigenspace.
struct Eigenspace {
  double value = 0.0;
  Matrix basis;  // d x k, orthonormal columns

  Matrix projector() const { return basis * basis.transpose(); }
};

struct EigenSystem {
  Vector eigenvalues;              // all eigenvalues, descending, >= 0
  std::vector<Eigenspace> spaces;  // grouped, descending by value

  Matrix reconstruct() const {
    const Eigen::Index d = eigenvalues.size();
    Matrix out = Matrix::Zero(d, d);
    for (const auto& g : spaces) out.noalias() += g.value * g.projector();
    return out;
  }
};

/// Spectral decomposition of a symmetric PSD matrix, with degenerate
/// eigenvalues grouped into eigenspaces.
inline EigenSystem eigendecompose(const Matrix& a) {
  detail::require_square(a, "eigendecompose");
  detail::require_finite(a, "eigendecompose");
  const auto eig = detail::sorted_psd_eigen(detail::symmetrized(a), "eigendecompose");
  const Eigen::Index n = eig.values.size();
  const double tol = kEigenGroupTolerance * eig.values[0];

  EigenSystem out;
  out.eigenvalues = eig.values;
  Eigen::Index start = 0;
  while (start < n) {
    Eigen::Index end = start + 1;
    while (end < n && eig.values[end - 1] - eig.values[end] <= tol) ++end;
    Eigenspace g;
    g.value = eig.values.segment(start, end - start).mean();
    g.basis = eig.vectors.middleCols(start, end - start);
    out.spaces.push_back(std::move(g));
    start = end;
  }
  return out;
}

inline EigenSystem eigendecompose(const DensityMatrix& a) { return eigendecompose(a.data()); }

/// Symmetric PSD square root S with S * S = A.
inline Matrix psd_sqrt(const Matrix& a) {
  detail::require_square(a, "psd_sqrt");
  detail::require_finite(a, "psd_sqrt");
  const auto eig = detail::sorted_psd_eigen(detail::symmetrized(a), "psd_sqrt");
  // eigenvalues at the round-off floor count as zero
  const double floor = static_cast<double>(a.rows()) * std::numeric_limits<double>::epsilon() *
                       std::max(eig.values[0], 0.0);
  const Vector roots = eig.values.unaryExpr([floor](double l) { return l > floor ? std::sqrt(l) : 0.0; });
  return detail::symmetrized(eig.vectors * roots.asDiagonal() * eig.vectors.transpose());
}

inline Matrix psd_sqrt(const DensityMatrix& a) { return psd_sqrt(a.data()); }

/// -sum(lambda ln lambda), in nats.
inline double von_neumann_entropy(const DensityMatrix& a) {
  const double tr = a.trace();
  if (std::abs(tr - 1.0) > 1e-8)
    throw NumericError("von_neumann_entropy: trace is " + std::to_string(tr) + ", expected 1");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.data(), Eigen::EigenvaluesOnly);
  double h = 0.0;
  for (double l : solver.eigenvalues()) {
    if (l > 0.0) h -= l * std::log(l);
  }
  return std::clamp(h, 0.0, std::log(static_cast<double>(a.dim())));
}

enum class SimMode { trace, cosine };

inline const char* to_string(SimMode m) { return m == SimMode::trace ? "trace" : "cosine"; }

inline SimMode sim_mode_from_string(const std::string& s) {
  if (s == "trace") return SimMode::trace;
  if (s == "cosine" || s == "frobenius_cosine") return SimMode::cosine;
  throw UsageError("unknown similarity mode '" + s + "' (expected trace or cosine)");
}

/// Tr(A^T B), optionally divided by the Frobenius norms of A and B.
inline double similarity(const DensityMatrix& a, const DensityMatrix& b, SimMode mode = SimMode::trace) {
  if (a.dim() != b.dim())
    throw DataError("similarity: dimension mismatch (" + std::to_string(a.dim()) + " vs " +
                    std::to_string(b.dim()) + ")");
  const double inner = (a.data().array() * b.data().array()).sum();
  if (mode == SimMode::trace) return inner;
  return inner / std::sqrt(a.data().squaredNorm() * b.data().squaredNorm());
}

}  // namespace dmsem
