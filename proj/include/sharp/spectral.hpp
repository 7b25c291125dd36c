#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "sharp/error.hpp"
#include "sharp/linalg.hpp"
#include "sharp/random.hpp"
#include "sharp/sectors.hpp"
#include "sharp/statespace.hpp"

namespace sharp {

inline constexpr double kDegeneracyTol = 1e-10;
inline constexpr double kGroupTol = 1e-9;

struct MaxEigenpair {
  double p;
  PureVector alpha;
};

namespace detail {

/// Top eigenpair of P_s R_s P_s over all sectors, where P_s projects out the
/// columns of chosen[s]. Deterministic choice: lowest sector among those
/// within kDegeneracyTol of the maximum, last eigenvector column there. With
/// an rng, a random sector and a random unit vector of the degenerate space.
inline std::pair<double, PureVector> top_eigenpair(const SystemDescriptor& sys,
                                                   const std::vector<Matrix>& residual,
                                                   const std::vector<Matrix>& chosen, Rng* rng) {
  struct Candidate {
    std::size_t sector;
    linalg::EigenSystem es;
  };
  std::vector<Candidate> cands;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < residual.size(); ++s) {
    const auto n = static_cast<Eigen::Index>(sys.sector_dim(s));
    if (chosen[s].cols() >= n) continue;
    Matrix proj = Matrix::Identity(n, n);
    if (chosen[s].cols() > 0) proj -= chosen[s] * chosen[s].adjoint();
    auto es = linalg::hermitian_eig(proj * residual[s] * proj);
    // Discard directions already chosen (they carry eigenvalue ~0 after projection).
    const Eigen::Index free = n - chosen[s].cols();
    Matrix basis = es.vectors;
    RealVector vals = es.values;
    if (chosen[s].cols() > 0) {
      std::vector<std::pair<double, Eigen::Index>> keep;
      for (Eigen::Index k = 0; k < n; ++k) {
        const double overlap = (chosen[s].adjoint() * es.vectors.col(k)).squaredNorm();
        keep.emplace_back(overlap, k);
      }
      std::stable_sort(keep.begin(), keep.end(),
                       [](const auto& x, const auto& y) { return x.first < y.first; });
      std::vector<Eigen::Index> cols;
      for (Eigen::Index k = 0; k < free; ++k) cols.push_back(keep[static_cast<std::size_t>(k)].second);
      std::sort(cols.begin(), cols.end());
      basis = es.vectors(Eigen::all, cols);
      vals = es.values(cols);
    }
    best = std::max(best, vals.maxCoeff());
    cands.push_back({s, {std::move(vals), std::move(basis)}});
  }
  if (cands.empty()) throw Error(Errc::zero_state, "no directions left to diagonalize");

  std::vector<std::size_t> hits;
  for (std::size_t c = 0; c < cands.size(); ++c)
    if (cands[c].es.values.maxCoeff() >= best - kDegeneracyTol) hits.push_back(c);
  const Candidate& pick = cands[rng ? hits[uniform_index(*rng, hits.size())] : hits.front()];
  const auto& vals = pick.es.values;
  Vector v;
  if (rng) {
    std::vector<Eigen::Index> deg;
    for (Eigen::Index k = 0; k < vals.size(); ++k)
      if (vals(k) >= best - kDegeneracyTol) deg.push_back(k);
    const Matrix space = pick.es.vectors(Eigen::all, deg);
    v = space * linalg::random_unit_vector(static_cast<Eigen::Index>(deg.size()), sys.field(), *rng);
  } else {
    const Eigen::Index k = vals.size() - 1;
    v = pick.es.vectors.col(k);
  }
  if (chosen[pick.sector].cols() > 0) v -= chosen[pick.sector] * (chosen[pick.sector].adjoint() * v);
  v /= v.norm();
  if (sys.field() == Field::real) {
    v = v.real().cast<cplx>();
    v /= v.norm();
  }
  v = linalg::canonical_phase(v);
  const double p = v.dot(residual[pick.sector] * v).real();
  return {p, PureVector(sys, pick.sector, std::move(v))};
}

inline void append_column(Matrix& m, const Vector& v) {
  m.conservativeResize(v.size(), m.cols() + 1);
  m.col(m.cols() - 1) = v;
}

}  // namespace detail

/// Largest block eigenvalue p* with its eigenvector; (alpha^dagger|rho) = p*.
inline MaxEigenpair max_eigenpair(const State& rho, Rng* rng = nullptr) {
  if (rho.trace() <= 0.0) throw Error(Errc::zero_state, "state is zero");
  const auto& sys = rho.system();
  std::vector<Matrix> chosen(sys.sector_count());
  for (std::size_t s = 0; s < chosen.size(); ++s)
    chosen[s] = Matrix(static_cast<Eigen::Index>(sys.sector_dim(s)), 0);
  auto [p, alpha] = detail::top_eigenpair(sys, rho.blocks(), chosen, rng);
  return {p, std::move(alpha)};
}

struct EigenGroup {
  double lambda;
  Observable projector;
};

struct Diagonalization {
  SystemDescriptor system;
  std::vector<double> eigenvalues;     // non-increasing, length d
  std::vector<PureVector> eigenstates;  // mutually orthogonal maximal set
  std::vector<double> max_eigenvalues;  // p*_i of the normalized residuals
  std::vector<EigenGroup> grouped;      // strictly decreasing lambda

  [[nodiscard]] StateVector reconstruct() const {
    auto blocks = StateVector::zero(system).blocks();
    for (std::size_t i = 0; i < eigenstates.size(); ++i)
      blocks[eigenstates[i].sector()] += eigenvalues[i] * eigenstates[i].projector_block();
    return StateVector(system, std::move(blocks));
  }
};

namespace detail {

inline std::vector<EigenGroup> group_spectrum(const SystemDescriptor& sys,
                                              const std::vector<double>& values,
                                              const std::vector<PureVector>& vectors) {
  std::vector<EigenGroup> out;
  std::size_t i = 0;
  while (i < values.size()) {
    std::size_t j = i;
    double sum = 0.0;
    auto blocks = Observable::zero(sys).blocks();
    while (j < values.size() && std::abs(values[j] - values[i]) <= kGroupTol) {
      sum += values[j];
      blocks[vectors[j].sector()] += vectors[j].projector_block();
      ++j;
    }
    out.push_back({sum / static_cast<double>(j - i), Observable(sys, std::move(blocks))});
    i = j;
  }
  return out;
}

}  // namespace detail

/// Peel-off diagonalization: repeatedly take the maximum eigenpair of the
/// residual, subtract it and continue on the orthogonal complement. The
/// residual is kept unnormalized, so the eigenvalue recorded at step i is
/// p*_i prod_{j<i} (1 - p*_j) directly. Stops when the residual trace drops
/// below 1e-12 of the input trace or when p*_i reaches 1; the remaining
/// directions complete the maximal set with eigenvalue 0.
///
/// A seed randomizes the choice inside degenerate eigenspaces.
inline Diagonalization diagonalize(const State& rho, std::optional<std::uint64_t> seed = std::nullopt) {
  const auto& sys = rho.system();
  const double total = rho.trace();
  if (total <= 0.0) throw Error(Errc::zero_state, "cannot diagonalize the zero state");
  std::optional<Rng> rng;
  if (seed) rng.emplace(make_rng(*seed, stream_id("diagonalize")));

  std::vector<Matrix> residual = rho.blocks();
  std::vector<Matrix> chosen(sys.sector_count());
  for (std::size_t s = 0; s < chosen.size(); ++s)
    chosen[s] = Matrix(static_cast<Eigen::Index>(sys.sector_dim(s)), 0);

  Diagonalization out{sys, {}, {}, {}, {}};
  double remaining = total;
  while (out.eigenstates.size() < sys.dim()) {
    if (remaining < 1e-12 * total) break;
    auto [p, alpha] = detail::top_eigenpair(sys, residual, chosen, rng ? &*rng : nullptr);
    p = std::max(p, 0.0);
    const double pstar = std::min(1.0, p / remaining);
    out.max_eigenvalues.push_back(pstar);
    out.eigenvalues.push_back(p);
    auto& r = residual[alpha.sector()];
    r -= p * alpha.projector_block();
    r = linalg::hermitian_part(r);
    // Re-clip tiny negative residue from the subtraction.
    const auto es = linalg::hermitian_eig(r);
    if (es.values.size() && es.values.minCoeff() < 0.0) {
      if (es.values.minCoeff() < -kPsdTol * std::max(1.0, total))
        throw Error(Errc::invalid_state, "residual lost positivity during deflation");
      r = es.vectors * es.values.cwiseMax(0.0).asDiagonal() * es.vectors.adjoint();
    }
    detail::append_column(chosen[alpha.sector()], alpha.amplitudes());
    out.eigenstates.push_back(std::move(alpha));
    remaining = 0.0;
    for (const auto& b : residual) remaining += b.trace().real();
    if (pstar >= 1.0 - 1e-15) break;
  }
  for (std::size_t s = 0; s < sys.sector_count(); ++s) {
    const auto n = static_cast<Eigen::Index>(sys.sector_dim(s));
    const Matrix comp = linalg::orthogonal_complement(chosen[s], n);
    for (Eigen::Index k = 0; k < comp.cols(); ++k) {
      Vector v = comp.col(k);
      if (sys.field() == Field::real) v = v.real().cast<cplx>();
      out.eigenstates.emplace_back(sys, s, linalg::canonical_phase(v));
      out.eigenvalues.push_back(0.0);
    }
  }
  for (std::size_t i = 1; i < out.eigenvalues.size(); ++i)
    out.eigenvalues[i] = std::min(out.eigenvalues[i], out.eigenvalues[i - 1]);
  out.grouped = detail::group_spectrum(sys, out.eigenvalues, out.eigenstates);
  return out;
}

/// Eigenvalues only, non-increasing.
inline std::vector<double> spectrum(const State& rho) { return diagonalize(rho).eigenvalues; }

/// The dagger on normalized pure states. Pure states and pure effects share
/// the unit vector representation, so the map is the identity on it.
inline PureVector dagger(const PureVector& x) { return x; }

struct SignedDiagonalization {
  SystemDescriptor system;
  std::vector<double> values;  // descending
  std::vector<PureVector> vectors;

  template <Role R>
  [[nodiscard]] BlockOperator<R> rebuild(const std::function<double(double)>& f) const {
    auto blocks = BlockOperator<Role::vector>::zero(system).blocks();
    for (std::size_t i = 0; i < vectors.size(); ++i)
      blocks[vectors[i].sector()] += f(values[i]) * vectors[i].projector_block();
    return BlockOperator<R>(system, std::move(blocks));
  }
};

namespace detail {

template <Role R>
SignedDiagonalization signed_diagonalize(const BlockOperator<R>& x) {
  const auto& sys = x.system();
  std::vector<std::pair<double, PureVector>> all;
  for (std::size_t s = 0; s < sys.sector_count(); ++s) {
    const auto es = linalg::hermitian_eig(x.block(s));
    for (Eigen::Index k = es.values.size(); k-- > 0;) {
      Vector v = es.vectors.col(k);
      if (sys.field() == Field::real) v = v.real().cast<cplx>();
      all.emplace_back(es.values(k), PureVector(sys, s, linalg::canonical_phase(v)));
    }
  }
  std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  SignedDiagonalization out{sys, {}, {}};
  for (auto& [v, a] : all) {
    out.values.push_back(v);
    out.vectors.push_back(std::move(a));
  }
  return out;
}

}  // namespace detail

/// xi = sum_i x_i alpha_i for a vector of the real span of the states.
inline SignedDiagonalization diagonalize_vector(const StateVector& xi) { return detail::signed_diagonalize(xi); }

/// X = sum_i x_i alpha_i^dagger.
inline SignedDiagonalization diagonalize_observable(const Observable& x) { return detail::signed_diagonalize(x); }

/// xi^dagger = sum_i x_i alpha_i^dagger.
inline Observable dagger_extend(const StateVector& xi) {
  return diagonalize_vector(xi).rebuild<Role::observable>([](double v) { return v; });
}

inline StateVector dagger_extend(const Observable& x) {
  return diagonalize_observable(x).rebuild<Role::vector>([](double v) { return v; });
}

/// f(X) = sum_i f(x_i) alpha_i^dagger. A non-finite f(x_i) is a domain error.
inline Observable functional_calculus(const Observable& x, const std::function<double(double)>& f) {
  const auto d = diagonalize_observable(x);
  for (double v : d.values)
    if (!std::isfinite(f(v)))
      throw Error(Errc::domain_error, "function undefined at eigenvalue " + std::to_string(v));
  return d.rebuild<Role::observable>(f);
}

inline constexpr double kSupportTol = 1e-12;

/// -log rho^dagger restricted to the support of rho (zero on the kernel).
inline Observable surprisal(const State& rho, double log_base = 2.0) {
  const auto d = diagonalize(rho);
  const double scale = std::log(log_base);
  auto blocks = Observable::zero(rho.system()).blocks();
  for (std::size_t i = 0; i < d.eigenstates.size(); ++i) {
    const double p = d.eigenvalues[i];
    if (p <= kSupportTol) continue;
    blocks[d.eigenstates[i].sector()] += (-std::log(p) / scale) * d.eigenstates[i].projector_block();
  }
  return Observable(rho.system(), std::move(blocks));
}

/// T_ij = (alpha_i^dagger | alpha'_j).
inline RealMatrix transition_matrix(const std::vector<PureVector>& s1, const std::vector<PureVector>& s2) {
  if (s1.empty() || s2.empty()) throw Error(Errc::not_maximal, "empty set");
  const auto& sys = s1.front().system();
  for (const auto* set : {&s1, &s2}) {
    if (set->size() != sys.dim())
      throw Error(Errc::not_maximal, "maximal sets have " + std::to_string(sys.dim()) + " elements");
    for (const auto& v : *set) require_same_system(v.system(), sys);
  }
  const auto d = static_cast<Eigen::Index>(sys.dim());
  RealMatrix t(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      t(i, j) = std::norm(inner(s1[static_cast<std::size_t>(i)], s2[static_cast<std::size_t>(j)]));
  return t;
}

/// Checks that the set has d mutually orthogonal members.
inline void require_maximal(const std::vector<PureVector>& set) {
  if (set.empty()) throw Error(Errc::not_maximal, "empty set");
  const auto& sys = set.front().system();
  if (set.size() != sys.dim())
    throw Error(Errc::not_maximal, "maximal sets have " + std::to_string(sys.dim()) + " elements");
  for (std::size_t i = 0; i < set.size(); ++i)
    for (std::size_t j = i + 1; j < set.size(); ++j)
      if (std::abs(inner(set[i], set[j])) > 1e-8)
        throw Error(Errc::not_maximal, "set members are not perfectly distinguishable");
}

/// {alpha_i^dagger} for a maximal set.
inline std::vector<Effect> pure_sharp_measurement(const std::vector<PureVector>& set) {
  require_maximal(set);
  std::vector<Effect> out;
  for (const auto& v : set) out.push_back(dagger(v).effect());
  return out;
}

struct SchmidtDecomposition {
  std::vector<PureVector> a;  // maximal set on A; the first rank entries are correlated
  std::vector<PureVector> b;  // maximal set on B
  std::vector<double> p;      // p_1 >= ... >= p_rank > 0
  std::size_t rank = 0;
};

inline constexpr double kSchmidtRankTol = 1e-13;

/// Biorthogonal decomposition of a pure bipartite state. The composite
/// sector of Psi pairs each A-sector with at most one B-sector, so the
/// amplitude matrix splits into independent blocks; an SVD of each gives
/// psi = sum_k s_k u_k (x) conj(v_k) and p_k = s_k^2.
inline SchmidtDecomposition schmidt(const State& psi_state) {
  const auto& sys = psi_state.system();
  if (!sys.is_composite()) throw Error(Errc::not_a_composite, "Schmidt needs a composite system");
  if (!is_pure(psi_state)) throw Error(Errc::not_pure, "Schmidt decomposition needs a pure state");
  if (!is_normalized(psi_state)) throw Error(Errc::not_normalized, "state is not normalized");
  const PureVector psi = pure_vector_of(psi_state).first;
  const auto& A = sys.factor(0);
  const auto& B = sys.factor(1);
  const std::size_t nb = B.dim();

  struct Term {
    double p;
    PureVector a;
    PureVector b;
  };
  std::vector<Term> terms;
  std::vector<bool> seen(A.sector_count() * B.sector_count(), false);
  for (std::size_t idx : sys.sectors()[psi.sector()]) {
    const auto [i, j] = sys.split(idx);
    const std::size_t sa = A.locate(i).sector;
    const std::size_t sb = B.locate(j).sector;
    if (seen[sa * B.sector_count() + sb]) continue;
    seen[sa * B.sector_count() + sb] = true;
    const auto& ia = A.sectors()[sa];
    const auto& ib = B.sectors()[sb];
    Matrix m(static_cast<Eigen::Index>(ia.size()), static_cast<Eigen::Index>(ib.size()));
    for (std::size_t x = 0; x < ia.size(); ++x)
      for (std::size_t y = 0; y < ib.size(); ++y)
        m(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) = psi.amplitude(ia[x] * nb + ib[y]);
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    for (Eigen::Index k = 0; k < s.size(); ++k) {
      const double p = s(k) * s(k);
      if (p <= kSchmidtRankTol) continue;
      Vector u = svd.matrixU().col(k);
      Vector v = svd.matrixV().col(k).conjugate();
      if (sys.field() == Field::real) {
        u = u.real().cast<cplx>();
        v = v.real().cast<cplx>();
      }
      // Move the phase of u into v so that u has canonical phase.
      const Vector uc = linalg::canonical_phase(u);
      const Eigen::Index piv = [&] {
        Eigen::Index best = 0;
        uc.cwiseAbs().maxCoeff(&best);
        return best;
      }();
      const cplx ph = u(piv) / uc(piv);
      v *= ph;
      terms.push_back({p, PureVector(A, sa, uc), PureVector(B, sb, v)});
    }
  }
  std::stable_sort(terms.begin(), terms.end(), [](const Term& x, const Term& y) { return x.p > y.p; });

  SchmidtDecomposition out;
  std::vector<Matrix> ca(A.sector_count()), cb(B.sector_count());
  for (std::size_t s = 0; s < ca.size(); ++s) ca[s] = Matrix(static_cast<Eigen::Index>(A.sector_dim(s)), 0);
  for (std::size_t s = 0; s < cb.size(); ++s) cb[s] = Matrix(static_cast<Eigen::Index>(B.sector_dim(s)), 0);
  for (auto& t : terms) {
    out.p.push_back(t.p);
    detail::append_column(ca[t.a.sector()], t.a.amplitudes());
    detail::append_column(cb[t.b.sector()], t.b.amplitudes());
    out.a.push_back(std::move(t.a));
    out.b.push_back(std::move(t.b));
  }
  out.rank = out.p.size();
  auto complete = [](const SystemDescriptor& f, const std::vector<Matrix>& c, std::vector<PureVector>& set) {
    for (std::size_t s = 0; s < f.sector_count(); ++s) {
      const Matrix comp = linalg::orthogonal_complement(c[s], static_cast<Eigen::Index>(f.sector_dim(s)));
      for (Eigen::Index k = 0; k < comp.cols(); ++k) {
        Vector v = comp.col(k);
        if (f.field() == Field::real) v = v.real().cast<cplx>();
        set.emplace_back(f, s, linalg::canonical_phase(v));
      }
    }
  };
  complete(A, ca, out.a);
  complete(B, cb, out.b);
  return out;
}

}  // namespace sharp
