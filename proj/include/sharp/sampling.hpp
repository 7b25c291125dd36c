#pragma once

#include <cstddef>
#include <random>
#include <utility>
#include <vector>

#include "sharp/channels.hpp"
#include "sharp/linalg.hpp"
#include "sharp/random.hpp"
#include "sharp/sectors.hpp"
#include "sharp/statespace.hpp"

namespace sharp {

inline PureVector random_pure(const SystemDescriptor& system, Rng& rng);

/// Random state of the given rank (0 = full rank). Full-rank states are
/// W W^dagger per sector for Ginibre W, normalized jointly; lower ranks mix
/// that many random pure states with flat Dirichlet weights.
inline State random_state(const SystemDescriptor& system, Rng& rng, std::size_t rank = 0) {
  std::vector<Matrix> blocks;
  if (rank == 0 || rank >= system.dim()) {
    double total = 0.0;
    for (std::size_t s = 0; s < system.sector_count(); ++s) {
      const auto n = static_cast<Eigen::Index>(system.sector_dim(s));
      const Matrix w = linalg::ginibre(n, n, system.field(), rng);
      Matrix b = w * w.adjoint();
      total += b.trace().real();
      blocks.push_back(std::move(b));
    }
    for (auto& b : blocks) b /= total;
    return State(system, std::move(blocks));
  }
  blocks = State::zero(system).blocks();
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> w(rank);
  double total = 0.0;
  for (auto& x : w) total += (x = expo(rng));
  for (std::size_t k = 0; k < rank; ++k) {
    const PureVector v = random_pure(system, rng);
    blocks[v.sector()] += (w[k] / total) * v.projector_block();
  }
  return State(system, std::move(blocks));
}

/// Pure vector in a sector chosen with probability proportional to its
/// dimension, with a uniformly random direction inside it.
inline PureVector random_pure(const SystemDescriptor& system, Rng& rng) {
  const std::size_t index = uniform_index(rng, system.dim());
  const std::size_t s = system.locate(index).sector;
  return PureVector(system, s,
                    linalg::random_unit_vector(static_cast<Eigen::Index>(system.sector_dim(s)),
                                               system.field(), rng));
}

/// Effect with Haar eigenbasis and eigenvalues uniform in [0, 1] per sector.
inline Effect random_effect(const SystemDescriptor& system, Rng& rng) {
  std::vector<Matrix> blocks;
  for (std::size_t s = 0; s < system.sector_count(); ++s) {
    const auto n = static_cast<Eigen::Index>(system.sector_dim(s));
    const Matrix u = linalg::haar_unitary(n, system.field(), rng);
    RealVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = uniform(rng);
    blocks.push_back(u * v.asDiagonal() * u.adjoint());
  }
  return Effect(system, std::move(blocks));
}

/// Hermitian part of a Ginibre matrix per sector.
inline Observable random_observable(const SystemDescriptor& system, Rng& rng) {
  std::vector<Matrix> blocks;
  for (std::size_t s = 0; s < system.sector_count(); ++s) {
    const auto n = static_cast<Eigen::Index>(system.sector_dim(s));
    blocks.push_back(linalg::hermitian_part(linalg::ginibre(n, n, system.field(), rng)));
  }
  return Observable(system, std::move(blocks));
}

/// Canonical basis vectors ordered by (sector, position in sector).
inline std::vector<PureVector> maximal_set(const SystemDescriptor& system) {
  std::vector<PureVector> out;
  for (const auto& sec : system.sectors())
    for (std::size_t i : sec) out.push_back(PureVector::basis(system, i));
  return out;
}

/// Image of the canonical maximal set under a random reversible channel.
inline std::vector<PureVector> random_maximal_set(const SystemDescriptor& system, Rng& rng) {
  const Matrix u = random_reversible_unitary(system, rng);
  std::vector<PureVector> out;
  for (const auto& sec : system.sectors())
    for (std::size_t i : sec) out.push_back(pure_from_global(system, u.col(static_cast<Eigen::Index>(i))));
  return out;
}

/// Mixture of a random maximal set with strictly positive random weights.
inline State random_complete_state(const SystemDescriptor& system, Rng& rng) {
  const auto set = random_maximal_set(system, rng);
  std::vector<double> w(set.size());
  double total = 0.0;
  for (auto& x : w) total += (x = uniform(rng, 0.05, 1.0));
  auto blocks = StateVector::zero(system).blocks();
  for (std::size_t i = 0; i < set.size(); ++i) blocks[set[i].sector()] += (w[i] / total) * set[i].projector_block();
  return State(system, std::move(blocks));
}

/// Random pure observation-test: in each sector a Haar isometry W (m x n,
/// n <= m <= 2n) whose rows w_k give rank-one effects |w_k><w_k|, i.e.
/// lambda_k alpha_k^dagger with lambda_k = |w_k|^2.
inline std::vector<Effect> random_pure_test(const SystemDescriptor& system, Rng& rng) {
  std::vector<Effect> out;
  for (std::size_t s = 0; s < system.sector_count(); ++s) {
    const auto n = static_cast<Eigen::Index>(system.sector_dim(s));
    const auto m = n + static_cast<Eigen::Index>(uniform_index(rng, static_cast<std::size_t>(n) + 1));
    const Matrix w = linalg::haar_unitary(m, system.field(), rng).leftCols(n);
    for (Eigen::Index k = 0; k < m; ++k) {
      auto blocks = StateVector::zero(system).blocks();
      const Vector row = w.row(k).adjoint();
      blocks[s] = row * row.adjoint();
      out.emplace_back(system, std::move(blocks));
    }
  }
  return out;
}

/// Random observation-test with the given number of outcomes:
/// a_i = S^{-1/2} G_i^dagger G_i S^{-1/2} with S = sum_i G_i^dagger G_i.
inline std::vector<Effect> random_test(const SystemDescriptor& system, std::size_t outcomes, Rng& rng) {
  std::vector<std::vector<Matrix>> parts(outcomes);
  for (std::size_t s = 0; s < system.sector_count(); ++s) {
    const auto n = static_cast<Eigen::Index>(system.sector_dim(s));
    std::vector<Matrix> g;
    Matrix total = Matrix::Zero(n, n);
    for (std::size_t i = 0; i < outcomes; ++i) {
      const Matrix gi = linalg::ginibre(n, n, system.field(), rng);
      g.push_back(gi.adjoint() * gi);
      total += g.back();
    }
    const Matrix inv_root =
        linalg::spectral_map(total, [](double x) { return x > 0.0 ? 1.0 / std::sqrt(x) : 0.0; });
    for (std::size_t i = 0; i < outcomes; ++i)
      parts[i].push_back(linalg::hermitian_part(inv_root * g[i] * inv_root));
  }
  std::vector<Effect> out;
  for (auto& p : parts) out.emplace_back(system, std::move(p));
  return out;
}

/// Mixture of a random maximal set whose weights are drawn from a small pool
/// of values, so that eigenvalues repeat.
inline State random_degenerate_state(const SystemDescriptor& system, Rng& rng) {
  const auto set = random_maximal_set(system, rng);
  const std::size_t pool = 1 + uniform_index(rng, 3);
  std::vector<double> values(pool);
  for (auto& v : values) v = uniform(rng, 0.1, 1.0);
  std::vector<double> w(set.size());
  double total = 0.0;
  for (auto& x : w) total += (x = values[uniform_index(rng, pool)]);
  auto blocks = StateVector::zero(system).blocks();
  for (std::size_t i = 0; i < set.size(); ++i) blocks[set[i].sector()] += (w[i] / total) * set[i].projector_block();
  return State(system, std::move(blocks));
}

namespace detail {

/// Per-sector orthonormal columns spanning the given vectors.
inline std::vector<Matrix> span_by_sector(const SystemDescriptor& system, const std::vector<PureVector>& vectors) {
  std::vector<Matrix> cols(system.sector_count());
  for (std::size_t s = 0; s < cols.size(); ++s) cols[s] = Matrix(static_cast<Eigen::Index>(system.sector_dim(s)), 0);
  for (const auto& v : vectors) {
    auto& m = cols[v.sector()];
    m.conservativeResize(m.rows(), m.cols() + 1);
    m.col(m.cols() - 1) = v.amplitudes();
  }
  return cols;
}

}  // namespace detail

/// Orthogonal projector onto the span of mutually orthogonal pure vectors.
inline Effect projector_onto(const SystemDescriptor& system, const std::vector<PureVector>& vectors) {
  auto blocks = StateVector::zero(system).blocks();
  for (const auto& v : vectors) blocks[v.sector()] += v.projector_block();
  return Effect(system, std::move(blocks));
}

/// Random normalized state supported on the span of mutually orthogonal
/// pure vectors (coherences allowed inside each sector).
inline State random_state_on(const SystemDescriptor& system, const std::vector<PureVector>& vectors, Rng& rng) {
  const auto cols = detail::span_by_sector(system, vectors);
  std::vector<Matrix> blocks;
  double total = 0.0;
  for (const auto& v : cols) {
    const Matrix g = linalg::ginibre(v.cols(), v.cols(), system.field(), rng);
    Matrix b = v * (g * g.adjoint()) * v.adjoint();
    total += b.trace().real();
    blocks.push_back(std::move(b));
  }
  for (auto& b : blocks) b /= total;
  return State(system, std::move(blocks));
}

/// Random effect supported on the span of mutually orthogonal pure vectors.
inline Effect random_effect_on(const SystemDescriptor& system, const std::vector<PureVector>& vectors, Rng& rng) {
  const auto cols = detail::span_by_sector(system, vectors);
  std::vector<Matrix> blocks;
  for (const auto& v : cols) {
    const Matrix u = linalg::haar_unitary(v.cols(), system.field(), rng);
    RealVector c(v.cols());
    for (Eigen::Index k = 0; k < c.size(); ++k) c(k) = uniform(rng);
    const Matrix w = v * u;
    blocks.push_back(w * c.asDiagonal() * w.adjoint());
  }
  return Effect(system, std::move(blocks));
}

/// Observable with energies uniform in [lo, hi] on a random maximal set.
inline Observable random_hamiltonian(const SystemDescriptor& system, Rng& rng, double lo = 0.0, double hi = 1.0) {
  const auto set = random_maximal_set(system, rng);
  auto blocks = StateVector::zero(system).blocks();
  for (const auto& v : set) blocks[v.sector()] += uniform(rng, lo, hi) * v.projector_block();
  return Observable(system, std::move(blocks));
}

}  // namespace sharp
