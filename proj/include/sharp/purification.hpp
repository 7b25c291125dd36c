#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "sharp/channels.hpp"
#include "sharp/error.hpp"
#include "sharp/linalg.hpp"
#include "sharp/sectors.hpp"
#include "sharp/statespace.hpp"

namespace sharp {

struct Purification {
  SystemDescriptor partner;
  SystemDescriptor composite;  // system (x) partner
  PureVector vector;
  State state;
};

/// Purifying partner of a system: quantum(d) for quantum systems, coherent(d)
/// for classical and coherent systems, a mirror system with the same sector
/// dimensions otherwise. In every case the pairs (s, s) of equal sector labels
/// lie inside one composite sector.
inline SystemDescriptor purifying_partner(const SystemDescriptor& a) {
  switch (a.kind()) {
    case SystemKind::quantum: return SystemDescriptor::quantum(a.dim(), a.field());
    case SystemKind::classical:
    case SystemKind::coherent: return SystemDescriptor::coherent(a.dim(), a.field());
    default: {
      std::vector<std::size_t> dims;
      for (std::size_t s = 0; s < a.sector_count(); ++s) dims.push_back(a.sector_dim(s));
      return SystemDescriptor::mirror(dims, a.field());
    }
  }
}

/// Psi = sum_s sum_{k,l} (sqrt rho_s)_{kl} |s,k> (x) |s,l>, which equals
/// sum_i sqrt(p_i) alpha_i (x) conj(alpha_i) over an eigenbasis of rho.
inline Purification purify(const State& rho) {
  if (!is_normalized(rho)) throw Error(Errc::not_normalized, "only normalized states are purified");
  const SystemDescriptor& a = rho.system();
  SystemDescriptor partner = purifying_partner(a);
  SystemDescriptor composite = compose(a, partner);
  const std::size_t np = partner.dim();
  Vector global = Vector::Zero(static_cast<Eigen::Index>(composite.dim()));
  for (std::size_t s = 0; s < a.sector_count(); ++s) {
    const Matrix root = linalg::psd_sqrt(rho.block(s));
    const auto& ia = a.sectors()[s];
    const auto& ip = partner.sectors()[s];
    for (std::size_t k = 0; k < ia.size(); ++k)
      for (std::size_t l = 0; l < ip.size(); ++l)
        global(static_cast<Eigen::Index>(ia[k] * np + ip[l])) =
            root(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l));
  }
  global /= global.norm();
  PureVector v = pure_from_global(composite, global);
  State st = v.state();
  return {std::move(partner), std::move(composite), std::move(v), std::move(st)};
}

struct PurificationMatch {
  bool equivalent = false;
  std::optional<Channel> witness;  // reversible channel on the purifying factor
  double residual = 0.0;           // ||(I (x) V) Psi - Psi'||_F of the states
};

namespace detail {

/// n_A x n_B amplitude matrix of a pure vector on A (x) B.
inline Matrix amplitude_matrix(const PureVector& psi) {
  const auto& sys = psi.system();
  const auto na = static_cast<Eigen::Index>(sys.factor(0).dim());
  const auto nb = static_cast<Eigen::Index>(sys.factor(1).dim());
  Matrix m = Matrix::Zero(na, nb);
  for (std::size_t idx : sys.sectors()[psi.sector()]) {
    const auto [i, j] = sys.split(idx);
    m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = psi.amplitude(idx);
  }
  return m;
}

}  // namespace detail

inline constexpr double kCopurificationTol = 1e-8;

/// Decides whether two purifications of the same state differ by a
/// reversible channel on the second factor and recovers it. Writing M for
/// the amplitude matrix, (I (x) V) acts as M -> M V^T. Sectors of the
/// purifying factor are matched by their A-side Gram matrices M_b M_b^dagger,
/// then each matched pair is aligned by orthogonal Procrustes.
inline PurificationMatch purifications_equivalent(const State& psi, const State& psi2) {
  require_same_system(psi.system(), psi2.system());
  const auto& sys = psi.system();
  if (!sys.is_composite()) throw Error(Errc::not_a_composite, "purifications live on composites");
  if (!is_pure(psi) || !is_pure(psi2)) throw Error(Errc::not_pure, "both states must be pure");
  if (distance(marginal(psi, Keep::a), marginal(psi2, Keep::a)) > kCopurificationTol)
    throw Error(Errc::not_copurifications, "the marginals on the first factor differ");

  const auto& B = sys.factor(1);
  const Matrix m1 = detail::amplitude_matrix(pure_vector_of(psi).first);
  const Matrix m2 = detail::amplitude_matrix(pure_vector_of(psi2).first);
  const std::size_t nsec = B.sector_count();
  auto cols = [&](const Matrix& m, std::size_t s) {
    return Matrix(m(Eigen::all, detail::as_index(B.sectors()[s])));
  };

  std::vector<std::size_t> target(nsec, nsec);
  std::vector<bool> used(nsec, false);
  PurificationMatch out;
  for (std::size_t s = 0; s < nsec; ++s) {
    const Matrix ms = cols(m1, s);
    if (ms.norm() <= 1e-12) continue;
    const Matrix g = ms * ms.adjoint();
    double best = std::numeric_limits<double>::infinity();
    std::size_t pick = nsec;
    for (std::size_t t = 0; t < nsec; ++t) {
      if (used[t] || B.sector_dim(t) != B.sector_dim(s)) continue;
      const Matrix mt = cols(m2, t);
      const double gap = (g - mt * mt.adjoint()).norm();
      if (gap < best) {
        best = gap;
        pick = t;
      }
    }
    if (pick == nsec || best > kCopurificationTol) return out;
    target[s] = pick;
    used[pick] = true;
  }
  for (std::size_t s = 0; s < nsec; ++s) {
    if (target[s] != nsec) continue;
    for (std::size_t t = 0; t < nsec; ++t)
      if (!used[t] && B.sector_dim(t) == B.sector_dim(s)) {
        target[s] = t;
        used[t] = true;
        break;
      }
    if (target[s] == nsec) return out;
  }

  const auto n = static_cast<Eigen::Index>(B.dim());
  Matrix v = Matrix::Zero(n, n);
  for (std::size_t s = 0; s < nsec; ++s) {
    const auto in = detail::as_index(B.sectors()[s]);
    const auto to = detail::as_index(B.sectors()[target[s]]);
    const auto k = static_cast<Eigen::Index>(in.size());
    Matrix w = Matrix::Identity(k, k);  // M_s W ~ M'_t with W = V_s^T
    const Matrix ms = cols(m1, s);
    if (ms.norm() > 1e-12) {
      const Matrix c = ms.adjoint() * cols(m2, target[s]);
      if (B.field() == Field::real) {
        Eigen::JacobiSVD<RealMatrix> svd(c.real(), Eigen::ComputeFullU | Eigen::ComputeFullV);
        w = (svd.matrixU() * svd.matrixV().transpose()).cast<cplx>();
      } else {
        Eigen::JacobiSVD<Matrix> svd(c, Eigen::ComputeFullU | Eigen::ComputeFullV);
        w = svd.matrixU() * svd.matrixV().adjoint();
      }
    }
    v(to, in) = w.transpose();
  }
  std::optional<Channel> local;
  try {
    local.emplace(local_unitary(sys, Keep::b, v));
  } catch (const Error&) {
    return out;  // the matched sector permutation does not act locally here
  }
  out.residual = distance(apply(*local, psi), psi2);
  out.equivalent = out.residual <= kCopurificationTol;
  if (out.equivalent) out.witness = Channel::unitary(B, v);
  return out;
}

}  // namespace sharp
