#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <random>
#include <vector>

namespace sharp {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;
using Rng = std::mt19937_64;

/// Scalar field of the underlying inner-product space. Real-field objects
/// are stored in complex containers with vanishing imaginary parts.
enum class Field { real, complex };

namespace linalg {

inline constexpr double kHermitianTol = 1e-10;

/// Ascending eigenvalues with matching eigenvector columns.
struct EigenSystem {
  RealVector values;
  Matrix vectors;
};

inline Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

inline double hermiticity_defect(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline double max_imag(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return m.imag().cwiseAbs().maxCoeff();
}

inline EigenSystem hermitian_eig(const Matrix& m) {
  if (m.rows() == 0) return {RealVector(0), Matrix(0, 0)};
  const Matrix h = hermitian_part(m);
  if (max_imag(h) == 0.0) {
    // Real symmetric input: keep the eigenvectors real.
    Eigen::SelfAdjointEigenSolver<RealMatrix> solver(h.real());
    return {solver.eigenvalues(), solver.eigenvectors().cast<cplx>()};
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  return {solver.eigenvalues(), solver.eigenvectors()};
}

/// Multiplies v by a unit phase so that its largest-magnitude entry (first
/// one on ties) is real and positive. Makes eigenvector output reproducible.
inline Vector canonical_phase(Vector v) {
  if (v.size() == 0) return v;
  Eigen::Index best = 0;
  double best_abs = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v(i));
    if (a > best_abs + 1e-12) {
      best_abs = a;
      best = i;
    }
  }
  if (best_abs <= 0.0) return v;
  const cplx phase = std::conj(v(best)) / best_abs;
  v *= phase;
  v(best) = cplx(std::abs(v(best)), 0.0);
  return v;
}

/// f(M) = sum_i f(lambda_i) |v_i><v_i| for Hermitian M.
inline Matrix spectral_map(const Matrix& m, const std::function<double(double)>& f) {
  const auto es = hermitian_eig(m);
  RealVector fv(es.values.size());
  for (Eigen::Index i = 0; i < fv.size(); ++i) fv(i) = f(es.values(i));
  return es.vectors * fv.asDiagonal() * es.vectors.adjoint();
}

inline Matrix psd_sqrt(const Matrix& m) {
  return spectral_map(m, [](double x) { return x > 0.0 ? std::sqrt(x) : 0.0; });
}

inline double frobenius(const Matrix& m) { return m.norm(); }

inline Matrix ginibre(Eigen::Index rows, Eigen::Index cols, Field field, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = field == Field::complex ? normal(rng) : 0.0;
      g(i, j) = cplx(re, im);
    }
  return g;
}

inline Vector random_unit_vector(Eigen::Index n, Field field, Rng& rng) {
  Vector v = ginibre(n, 1, field, rng).col(0);
  return v / v.norm();
}

/// Haar-distributed unitary (orthogonal for the real field): QR of a
/// Ginibre matrix with the phases of R's diagonal absorbed into Q.
inline Matrix haar_unitary(Eigen::Index n, Field field, Rng& rng) {
  if (n == 0) return Matrix(0, 0);
  const Matrix z = ginibre(n, n, field, rng);
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j) {
    const double a = std::abs(r(j, j));
    const cplx phase = a > 0.0 ? r(j, j) / a : cplx(1.0, 0.0);
    q.col(j) *= phase;
  }
  if (field == Field::real) q = q.real().cast<cplx>();
  return q;
}

/// Orthonormal basis of the orthogonal complement of span(columns of basis)
/// inside C^n. basis columns must be orthonormal.
inline Matrix orthogonal_complement(const Matrix& basis, Eigen::Index n) {
  const Eigen::Index k = basis.cols();
  if (k == 0) return Matrix::Identity(n, n);
  if (k >= n) return Matrix(n, 0);
  Eigen::HouseholderQR<Matrix> qr(basis);
  const Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  return q.rightCols(n - k);
}

inline double unitarity_defect(const Matrix& u) {
  if (u.size() == 0) return 0.0;
  return (u.adjoint() * u - Matrix::Identity(u.cols(), u.cols())).cwiseAbs().maxCoeff();
}

}  // namespace linalg
}  // namespace sharp
