#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "sharp/error.hpp"
#include "sharp/linalg.hpp"
#include "sharp/sectors.hpp"

namespace sharp {

/// What a block-diagonal operator stands for. The role fixes the validity
/// checks applied on construction.
enum class Role {
  state,       // PSD blocks, trace <= 1
  effect,      // 0 <= block <= 1
  observable,  // Hermitian blocks
  vector,      // Hermitian blocks, element of the real span of the states
};

inline constexpr double kPsdTol = 1e-10;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kNormTol = 1e-10;

/// A sector-wise Hermitian operator; one dense block per sector of the
/// system. Full n x n matrices are never formed.
template <Role R>
class BlockOperator {
 public:
  BlockOperator(SystemDescriptor system, std::vector<Matrix> blocks)
      : system_(std::move(system)), blocks_(std::move(blocks)) {
    validate();
  }

  static BlockOperator zero(const SystemDescriptor& system) {
    std::vector<Matrix> blocks;
    for (std::size_t s = 0; s < system.sector_count(); ++s) {
      const auto n = static_cast<Eigen::Index>(system.sector_dim(s));
      blocks.push_back(Matrix::Zero(n, n));
    }
    return BlockOperator(system, std::move(blocks));
  }

  static BlockOperator identity(const SystemDescriptor& system)
    requires(R != Role::state)
  {
    std::vector<Matrix> blocks;
    for (std::size_t s = 0; s < system.sector_count(); ++s) {
      const auto n = static_cast<Eigen::Index>(system.sector_dim(s));
      blocks.push_back(Matrix::Identity(n, n));
    }
    return BlockOperator(system, std::move(blocks));
  }

  [[nodiscard]] const SystemDescriptor& system() const noexcept { return system_; }
  [[nodiscard]] const std::vector<Matrix>& blocks() const noexcept { return blocks_; }
  [[nodiscard]] const Matrix& block(std::size_t s) const { return blocks_.at(s); }

  [[nodiscard]] double trace() const {
    double t = 0.0;
    for (const auto& b : blocks_) t += b.trace().real();
    return t;
  }

  /// Matrix element between two canonical basis indices (zero across sectors).
  [[nodiscard]] cplx entry(std::size_t i, std::size_t j) const {
    const auto li = system_.locate(i);
    const auto lj = system_.locate(j);
    if (li.sector != lj.sector) return cplx(0.0, 0.0);
    return blocks_[li.sector](static_cast<Eigen::Index>(li.offset),
                              static_cast<Eigen::Index>(lj.offset));
  }

  /// Re-validates the same blocks under another role.
  template <Role S>
  [[nodiscard]] BlockOperator<S> as() const {
    return BlockOperator<S>(system_, blocks_);
  }

 private:
  void validate() {
    if (blocks_.size() != system_.sector_count())
      throw Error(Errc::invalid_state, "expected " + std::to_string(system_.sector_count()) +
                                           " blocks, got " + std::to_string(blocks_.size()));
    for (std::size_t s = 0; s < blocks_.size(); ++s) {
      auto& b = blocks_[s];
      const auto n = static_cast<Eigen::Index>(system_.sector_dim(s));
      if (b.rows() != n || b.cols() != n)
        throw Error(Errc::invalid_state, "block " + std::to_string(s) + " must be " +
                                             std::to_string(n) + "x" + std::to_string(n));
      const double scale = std::max(1.0, b.size() ? b.cwiseAbs().maxCoeff() : 0.0);
      const double herm_tol = (R == Role::state || R == Role::effect) ? kPsdTol : 1e-12 * scale;
      if (linalg::hermiticity_defect(b) > herm_tol)
        throw Error(Errc::invalid_state, "block " + std::to_string(s) + " is not Hermitian");
      if (system_.field() == Field::real) {
        if (linalg::max_imag(b) > herm_tol)
          throw Error(Errc::invalid_state, "real-field block has imaginary entries");
        b = b.real().template cast<cplx>();
      }
      b = linalg::hermitian_part(b);
      if constexpr (R == Role::state || R == Role::effect) clip_spectrum(b, s);
    }
    if constexpr (R == Role::state) {
      if (trace() > 1.0 + kTraceTol)
        throw Error(Errc::invalid_state, "state trace " + std::to_string(trace()) + " exceeds 1");
    }
  }

  void clip_spectrum(Matrix& b, std::size_t s) {
    if (b.rows() == 0) return;
    const auto es = linalg::hermitian_eig(b);
    const double lo = es.values.minCoeff();
    const double hi = es.values.maxCoeff();
    if (lo < -kPsdTol)
      throw Error(Errc::invalid_state,
                  "block " + std::to_string(s) + " has eigenvalue " + std::to_string(lo) + " < 0");
    const bool upper = R == Role::effect;
    if (upper && hi > 1.0 + kPsdTol)
      throw Error(Errc::invalid_state,
                  "effect block " + std::to_string(s) + " has eigenvalue " + std::to_string(hi) +
                      " > 1");
    if (lo < 0.0 || (upper && hi > 1.0)) {
      RealVector v = es.values.cwiseMax(0.0);
      if (upper) v = v.cwiseMin(1.0);
      b = es.vectors * v.asDiagonal() * es.vectors.adjoint();
    }
  }

  SystemDescriptor system_;
  std::vector<Matrix> blocks_;
};

using State = BlockOperator<Role::state>;
using Effect = BlockOperator<Role::effect>;
using Observable = BlockOperator<Role::observable>;
using StateVector = BlockOperator<Role::vector>;

/// Unit vector confined to one sector. The same vector is a normalized pure
/// state alpha and, through the dagger, the pure effect alpha^dagger.
class PureVector {
 public:
  PureVector(SystemDescriptor system, std::size_t sector, Vector amplitudes)
      : system_(std::move(system)), sector_(sector), amplitudes_(std::move(amplitudes)) {
    if (sector_ >= system_.sector_count())
      throw Error(Errc::invalid_state, "sector index out of range");
    if (amplitudes_.size() != static_cast<Eigen::Index>(system_.sector_dim(sector_)))
      throw Error(Errc::invalid_state, "amplitude count does not match sector dimension");
    const double norm = amplitudes_.norm();
    if (std::abs(norm - 1.0) > kNormTol)
      throw Error(Errc::invalid_state, "pure vector norm " + std::to_string(norm) + " != 1");
    if (system_.field() == Field::real) {
      if (amplitudes_.imag().cwiseAbs().maxCoeff() > kNormTol)
        throw Error(Errc::invalid_state, "real-field pure vector has imaginary amplitudes");
      amplitudes_ = amplitudes_.real().cast<cplx>();
    }
    amplitudes_ /= amplitudes_.norm();
  }

  /// Canonical basis vector |index>.
  static PureVector basis(const SystemDescriptor& system, std::size_t index) {
    const auto loc = system.locate(index);
    Vector v = Vector::Zero(static_cast<Eigen::Index>(system.sector_dim(loc.sector)));
    v(static_cast<Eigen::Index>(loc.offset)) = 1.0;
    return PureVector(system, loc.sector, std::move(v));
  }

  [[nodiscard]] const SystemDescriptor& system() const noexcept { return system_; }
  [[nodiscard]] std::size_t sector() const noexcept { return sector_; }
  [[nodiscard]] const Vector& amplitudes() const noexcept { return amplitudes_; }

  /// Amplitude on a canonical basis index (zero outside the sector).
  [[nodiscard]] cplx amplitude(std::size_t index) const {
    const auto loc = system_.locate(index);
    return loc.sector == sector_ ? amplitudes_(static_cast<Eigen::Index>(loc.offset)) : cplx(0.0);
  }

  [[nodiscard]] Matrix projector_block() const { return amplitudes_ * amplitudes_.adjoint(); }

  [[nodiscard]] State state() const { return as<Role::state>(); }
  /// The pure effect alpha^dagger.
  [[nodiscard]] Effect effect() const { return as<Role::effect>(); }

  template <Role R>
  [[nodiscard]] BlockOperator<R> as(double weight = 1.0) const {
    auto op = BlockOperator<R>::zero(system_).blocks();
    op[sector_] = weight * projector_block();
    return BlockOperator<R>(system_, std::move(op));
  }

 private:
  SystemDescriptor system_;
  std::size_t sector_;
  Vector amplitudes_;
};

/// <x|y>; zero for vectors in different sectors.
inline cplx inner(const PureVector& x, const PureVector& y) {
  if (x.sector() != y.sector()) return cplx(0.0);
  return x.amplitudes().dot(y.amplitudes());
}

inline void require_same_system(const SystemDescriptor& a, const SystemDescriptor& b) {
  if (!(a == b))
    throw Error(Errc::incompatible_systems, "system mismatch: " + a.label() + " vs " + b.label());
}

/// (a|rho) = sum over sectors of Tr(a_s rho_s).
template <Role R>
  requires(R == Role::effect || R == Role::observable)
double pair(const BlockOperator<R>& a, const State& rho) {
  require_same_system(a.system(), rho.system());
  double p = 0.0;
  for (std::size_t s = 0; s < rho.blocks().size(); ++s)
    p += (a.block(s).cwiseProduct(rho.block(s).transpose())).sum().real();
  return p;
}

/// Pairing of any Hermitian block operator with any other (used for
/// observables against state-space vectors).
template <Role R, Role S>
double pair_any(const BlockOperator<R>& a, const BlockOperator<S>& x) {
  require_same_system(a.system(), x.system());
  double p = 0.0;
  for (std::size_t s = 0; s < x.blocks().size(); ++s)
    p += (a.block(s).cwiseProduct(x.block(s).transpose())).sum().real();
  return p;
}

/// (alpha^dagger | rho).
inline double pair(const PureVector& alpha_dagger, const State& rho) {
  require_same_system(alpha_dagger.system(), rho.system());
  const Vector& v = alpha_dagger.amplitudes();
  return v.dot(rho.block(alpha_dagger.sector()) * v).real();
}

template <Role R>
double distance(const BlockOperator<R>& x, const BlockOperator<R>& y) {
  require_same_system(x.system(), y.system());
  double sq = 0.0;
  for (std::size_t s = 0; s < x.blocks().size(); ++s)
    sq += (x.block(s) - y.block(s)).squaredNorm();
  return std::sqrt(sq);
}

/// sum_k c_k X_k, re-validated as role R.
template <Role R, Role S>
BlockOperator<R> combine(const std::vector<std::pair<double, const BlockOperator<S>*>>& terms,
                         const SystemDescriptor& system) {
  auto blocks = BlockOperator<Role::vector>::zero(system).blocks();
  for (const auto& [c, x] : terms) {
    require_same_system(system, x->system());
    for (std::size_t s = 0; s < blocks.size(); ++s) blocks[s] += c * x->block(s);
  }
  return BlockOperator<R>(system, std::move(blocks));
}

inline Effect unit_effect(const SystemDescriptor& system) { return Effect::identity(system); }

/// The invariant state chi: identity / n on every sector.
inline State invariant_state(const SystemDescriptor& system) {
  auto blocks = Observable::identity(system).blocks();
  const double n = static_cast<double>(system.dim());
  for (auto& b : blocks) b /= n;
  return State(system, std::move(blocks));
}

inline bool is_normalized(const State& rho, double tol = kNormTol) {
  return std::abs(rho.trace() - 1.0) <= tol;
}

/// Pure iff exactly one block carries weight and that block has rank one.
inline bool is_pure(const State& rho, double tol = kNormTol) {
  std::size_t nonzero = 0;
  for (const auto& b : rho.blocks()) {
    const double t = b.trace().real();
    if (t <= tol) continue;
    ++nonzero;
    const auto es = linalg::hermitian_eig(b);
    if (es.values.size() > 1 && es.values(es.values.size() - 2) > tol * std::max(1.0, t))
      return false;
  }
  return nonzero == 1;
}

/// Unit vector and weight of a pure (possibly subnormalized) state.
inline std::pair<PureVector, double> pure_vector_of(const State& rho) {
  if (!is_pure(rho)) throw Error(Errc::not_pure, "state is not pure");
  for (std::size_t s = 0; s < rho.blocks().size(); ++s) {
    const double t = rho.block(s).trace().real();
    if (t <= kNormTol) continue;
    const auto es = linalg::hermitian_eig(rho.block(s));
    Vector v = linalg::canonical_phase(es.vectors.col(es.vectors.cols() - 1));
    return {PureVector(rho.system(), s, std::move(v)), t};
  }
  throw Error(Errc::not_pure, "state is zero");
}

enum class Keep { a, b };

/// Tr_other[(I (x) e) X] for a block operator X on a composite, with e an
/// operator on the discarded factor (the deterministic effect gives the
/// marginal). The result is re-validated as role R' on the kept factor.
template <Role Out, Role R, Role E>
BlockOperator<Out> contract(const BlockOperator<R>& x, Keep keep, const BlockOperator<E>* local) {
  const SystemDescriptor& sys = x.system();
  if (!sys.is_composite())
    throw Error(Errc::not_a_composite, "system " + sys.label() + " is not a composite");
  const SystemDescriptor& kept = sys.factor(keep == Keep::a ? 0 : 1);
  const SystemDescriptor& other = sys.factor(keep == Keep::a ? 1 : 0);
  if (local) require_same_system(local->system(), other);

  auto out = BlockOperator<Role::vector>::zero(kept).blocks();
  double leak = 0.0;
  for (std::size_t c = 0; c < sys.sector_count(); ++c) {
    const auto& idx = sys.sectors()[c];
    const Matrix& blk = x.block(c);
    for (std::size_t p = 0; p < idx.size(); ++p) {
      const auto [i, j] = sys.split(idx[p]);
      for (std::size_t q = 0; q < idx.size(); ++q) {
        const auto [i2, j2] = sys.split(idx[q]);
        const std::size_t k_row = keep == Keep::a ? i : j;
        const std::size_t k_col = keep == Keep::a ? i2 : j2;
        const std::size_t o_row = keep == Keep::a ? j : i;
        const std::size_t o_col = keep == Keep::a ? j2 : i2;
        cplx w;
        if (local) {
          w = local->entry(o_col, o_row);
        } else {
          w = o_row == o_col ? cplx(1.0) : cplx(0.0);
        }
        if (w == cplx(0.0)) continue;
        const cplx v = blk(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) * w;
        const auto lr = kept.locate(k_row);
        const auto lc = kept.locate(k_col);
        if (lr.sector != lc.sector) {
          leak = std::max(leak, std::abs(v));
          continue;
        }
        out[lr.sector](static_cast<Eigen::Index>(lr.offset), static_cast<Eigen::Index>(lc.offset)) += v;
      }
    }
  }
  if (leak > 1e-9)
    throw Error(Errc::invalid_state, "reduced operator is not block-diagonal on " + kept.label());
  return BlockOperator<Out>(kept, std::move(out));
}

inline State marginal(const State& rho, Keep keep) {
  return contract<Role::state, Role::state, Role::effect>(rho, keep, nullptr);
}

/// Unnormalized conditional state Tr_other[(I (x) e) rho] for a local effect e.
inline State conditional(const State& rho, Keep keep, const Effect& e) {
  return contract<Role::state, Role::state, Role::effect>(rho, keep, &e);
}

/// X (x) Y re-indexed into the composite's sectors.
template <Role R>
BlockOperator<R> tensor(const BlockOperator<R>& x, const BlockOperator<R>& y) {
  const SystemDescriptor sys = compose(x.system(), y.system());
  std::vector<Matrix> blocks;
  blocks.reserve(sys.sector_count());
  for (std::size_t c = 0; c < sys.sector_count(); ++c) {
    const auto& idx = sys.sectors()[c];
    const auto n = static_cast<Eigen::Index>(idx.size());
    Matrix b(n, n);
    for (Eigen::Index p = 0; p < n; ++p) {
      const auto [i, j] = sys.split(idx[static_cast<std::size_t>(p)]);
      for (Eigen::Index q = 0; q < n; ++q) {
        const auto [i2, j2] = sys.split(idx[static_cast<std::size_t>(q)]);
        b(p, q) = x.entry(i, i2) * y.entry(j, j2);
      }
    }
    blocks.push_back(std::move(b));
  }
  return BlockOperator<R>(sys, std::move(blocks));
}

/// Tensor product of pure vectors; both live in a single composite sector.
inline PureVector tensor(const PureVector& x, const PureVector& y) {
  const SystemDescriptor sys = compose(x.system(), y.system());
  const std::size_t nb = y.system().dim();
  const auto& sx = x.system().sectors()[x.sector()];
  const auto& sy = y.system().sectors()[y.sector()];
  const auto loc = sys.locate(sx.front() * nb + sy.front());
  Vector v = Vector::Zero(static_cast<Eigen::Index>(sys.sector_dim(loc.sector)));
  for (std::size_t p = 0; p < sx.size(); ++p)
    for (std::size_t q = 0; q < sy.size(); ++q) {
      const auto l = sys.locate(sx[p] * nb + sy[q]);
      v(static_cast<Eigen::Index>(l.offset)) =
          x.amplitudes()(static_cast<Eigen::Index>(p)) * y.amplitudes()(static_cast<Eigen::Index>(q));
    }
  return PureVector(sys, loc.sector, std::move(v));
}

/// Pure vector from amplitudes given on canonical basis indices; all
/// nonzero amplitudes must fall into one sector.
inline PureVector pure_from_global(const SystemDescriptor& system, const Vector& global) {
  std::size_t sector = system.sector_count();
  for (Eigen::Index i = 0; i < global.size(); ++i) {
    if (std::abs(global(i)) <= 1e-14) continue;
    const auto loc = system.locate(static_cast<std::size_t>(i));
    if (sector == system.sector_count()) sector = loc.sector;
    if (loc.sector != sector)
      throw Error(Errc::invalid_state, "amplitudes span more than one sector of " + system.label());
  }
  if (sector == system.sector_count()) throw Error(Errc::invalid_state, "zero vector");
  Vector v(static_cast<Eigen::Index>(system.sector_dim(sector)));
  const auto& idx = system.sectors()[sector];
  for (std::size_t k = 0; k < idx.size(); ++k) v(static_cast<Eigen::Index>(k)) = global(static_cast<Eigen::Index>(idx[k]));
  return PureVector(system, sector, std::move(v));
}

}  // namespace sharp
