#pragma once

// Dense-matrix reference computations. They work on full n x n matrices and
// share no code path with the sector-wise routines they are compared against.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "sharp/linalg.hpp"
#include "sharp/sectors.hpp"
#include "sharp/statespace.hpp"

namespace sharp::oracle {

/// Full n x n matrix of a block operator.
template <Role R>
Matrix dense(const BlockOperator<R>& x) {
  const auto& sys = x.system();
  const auto n = static_cast<Eigen::Index>(sys.dim());
  Matrix m = Matrix::Zero(n, n);
  for (std::size_t i = 0; i < sys.dim(); ++i)
    for (std::size_t j = 0; j < sys.dim(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = x.entry(i, j);
  return m;
}

inline Vector dense(const PureVector& v) {
  const auto n = static_cast<Eigen::Index>(v.system().dim());
  Vector out(n);
  for (Eigen::Index i = 0; i < n; ++i) out(i) = v.amplitude(static_cast<std::size_t>(i));
  return out;
}

/// Eigenvalues of a dense Hermitian matrix, non-increasing.
inline std::vector<double> eigenvalues(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  std::vector<double> v(solver.eigenvalues().data(), solver.eigenvalues().data() + solver.eigenvalues().size());
  std::sort(v.begin(), v.end(), std::greater<>());
  return v;
}

/// Tr_B or Tr_A of a dense matrix on C^{na} (x) C^{nb}, index i * nb + j.
inline Matrix partial_trace(const Matrix& m, std::size_t na, std::size_t nb, bool keep_a) {
  const auto NA = static_cast<Eigen::Index>(na), NB = static_cast<Eigen::Index>(nb);
  if (keep_a) {
    Matrix out = Matrix::Zero(NA, NA);
    for (Eigen::Index i = 0; i < NA; ++i)
      for (Eigen::Index k = 0; k < NA; ++k)
        for (Eigen::Index j = 0; j < NB; ++j) out(i, k) += m(i * NB + j, k * NB + j);
    return out;
  }
  Matrix out = Matrix::Zero(NB, NB);
  for (Eigen::Index j = 0; j < NB; ++j)
    for (Eigen::Index l = 0; l < NB; ++l)
      for (Eigen::Index i = 0; i < NA; ++i) out(j, l) += m(i * NB + j, i * NB + l);
  return out;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Natural-log matrix logarithm of a positive definite matrix.
inline Matrix log_pd(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> s(0.5 * (m + m.adjoint()));
  Eigen::VectorXd l = s.eigenvalues();
  for (Eigen::Index i = 0; i < l.size(); ++i) l(i) = std::log(l(i));
  return s.eigenvectors() * l.asDiagonal() * s.eigenvectors().adjoint();
}

/// Tr rho (log rho - log sigma) for full-rank dense matrices, natural log;
/// 0 log 0 handled by restricting rho's logarithm to its support.
inline double relative_entropy(const Matrix& rho, const Matrix& sigma) {
  Eigen::SelfAdjointEigenSolver<Matrix> s(0.5 * (rho + rho.adjoint()));
  double self = 0.0;
  for (Eigen::Index i = 0; i < s.eigenvalues().size(); ++i) {
    const double p = s.eigenvalues()(i);
    if (p > 0.0) self += p * std::log(p);
  }
  return self - (rho * log_pd(sigma)).trace().real();
}

inline double entropy(const Matrix& rho) {
  double h = 0.0;
  for (double p : eigenvalues(rho))
    if (p > 0.0) h -= p * std::log2(p);
  return h;
}

}  // namespace sharp::oracle
