#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "sharp/error.hpp"
#include "sharp/linalg.hpp"
#include "sharp/random.hpp"
#include "sharp/sectors.hpp"
#include "sharp/statespace.hpp"

namespace sharp {

enum class ChannelKind { reversible, rare, general };

constexpr std::string_view to_string(ChannelKind k) noexcept {
  switch (k) {
    case ChannelKind::reversible: return "reversible";
    case ChannelKind::rare: return "rare";
    case ChannelKind::general: return "general";
  }
  return "general";
}

inline constexpr double kChannelTol = 1e-10;

namespace detail {

inline std::vector<Eigen::Index> as_index(const SystemDescriptor::Sector& s) {
  return {s.begin(), s.end()};
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Dense n x n matrix of a block-diagonal operator. Only used for Kraus
/// operators, never for stored states.
template <Role R>
Matrix dense_kraus(const BlockOperator<R>& x) {
  const auto& sys = x.system();
  const auto n = static_cast<Eigen::Index>(sys.dim());
  Matrix out = Matrix::Zero(n, n);
  for (std::size_t s = 0; s < sys.sector_count(); ++s) {
    const auto idx = as_index(sys.sectors()[s]);
    out(idx, idx) = x.block(s);
  }
  return out;
}

}  // namespace detail

/// Completely positive trace-non-increasing map given by Kraus operators
/// (dense n_out x n_in matrices) that send block-diagonal states of the input
/// to block-diagonal states of the output.
class Channel {
 public:
  Channel(SystemDescriptor input, SystemDescriptor output, std::vector<Matrix> kraus,
          ChannelKind kind = ChannelKind::general, std::vector<double> rare_weights = {},
          std::vector<Matrix> rare_unitaries = {})
      : input_(std::move(input)),
        output_(std::move(output)),
        kraus_(std::move(kraus)),
        kind_(kind),
        rare_weights_(std::move(rare_weights)),
        rare_unitaries_(std::move(rare_unitaries)) {
    const auto ni = static_cast<Eigen::Index>(input_.dim());
    const auto no = static_cast<Eigen::Index>(output_.dim());
    if (kraus_.empty()) throw Error(Errc::invalid_state, "channel needs at least one Kraus operator");
    for (auto& k : kraus_) {
      if (k.rows() != no || k.cols() != ni)
        throw Error(Errc::incompatible_systems, "Kraus operator has the wrong shape");
      if (input_.field() == Field::real) {
        if (linalg::max_imag(k) > kChannelTol)
          throw Error(Errc::invalid_state, "real-field channel has complex Kraus entries");
        k = k.real().cast<cplx>();
      }
    }
    if (completeness_excess() > kChannelTol)
      throw Error(Errc::invalid_state, "sum of K^dagger K exceeds the identity");
    if (block_preservation_defect() > kChannelTol)
      throw Error(Errc::invalid_state, "channel does not preserve the sector structure");
    if (kind_ == ChannelKind::reversible) {
      if (!(input_ == output_) || kraus_.size() != 1 || linalg::unitarity_defect(kraus_[0]) > kChannelTol)
        throw Error(Errc::not_reversible, "reversible channels are single unitary Kraus operators");
    }
  }

  static Channel identity(const SystemDescriptor& system) {
    const auto n = static_cast<Eigen::Index>(system.dim());
    return Channel(system, system, {Matrix::Identity(n, n)}, ChannelKind::reversible);
  }

  static Channel unitary(const SystemDescriptor& system, Matrix u) {
    return Channel(system, system, {std::move(u)}, ChannelKind::reversible);
  }

  [[nodiscard]] const SystemDescriptor& input() const noexcept { return input_; }
  [[nodiscard]] const SystemDescriptor& output() const noexcept { return output_; }
  [[nodiscard]] const std::vector<Matrix>& kraus() const noexcept { return kraus_; }
  [[nodiscard]] ChannelKind kind() const noexcept { return kind_; }
  [[nodiscard]] const std::vector<double>& rare_weights() const noexcept { return rare_weights_; }
  [[nodiscard]] const std::vector<Matrix>& rare_unitaries() const noexcept { return rare_unitaries_; }
  [[nodiscard]] bool is_reversible() const noexcept { return kind_ == ChannelKind::reversible; }

  /// Largest eigenvalue of sum K^dagger K - I (positive means not
  /// trace-non-increasing).
  [[nodiscard]] double completeness_excess() const {
    const Matrix g = gram();
    const auto es = linalg::hermitian_eig(g - Matrix::Identity(g.rows(), g.cols()));
    return es.values.size() ? es.values.maxCoeff() : 0.0;
  }

  [[nodiscard]] bool is_trace_preserving(double tol = kChannelTol) const {
    const Matrix g = gram();
    return (g - Matrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff() <= tol;
  }

  /// Largest cross-sector entry produced from a sector-diagonal basis
  /// operator |i><j| (i, j in the same input sector).
  [[nodiscard]] double block_preservation_defect() const {
    if (output_.sector_count() == 1) return 0.0;
    double worst = 0.0;
    const auto no = static_cast<std::size_t>(output_.dim());
    for (const auto& sec : input_.sectors())
      for (std::size_t i : sec)
        for (std::size_t j : sec) {
          Matrix o = Matrix::Zero(static_cast<Eigen::Index>(no), static_cast<Eigen::Index>(no));
          for (const auto& k : kraus_)
            o += k.col(static_cast<Eigen::Index>(i)) * k.col(static_cast<Eigen::Index>(j)).adjoint();
          for (std::size_t r = 0; r < no; ++r)
            for (std::size_t c = 0; c < no; ++c)
              if (output_.locate(r).sector != output_.locate(c).sector)
                worst = std::max(worst, std::abs(o(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c))));
        }
    return worst;
  }

 private:
  [[nodiscard]] Matrix gram() const {
    const auto ni = static_cast<Eigen::Index>(input_.dim());
    Matrix g = Matrix::Zero(ni, ni);
    for (const auto& k : kraus_) g += k.adjoint() * k;
    return g;
  }

  SystemDescriptor input_;
  SystemDescriptor output_;
  std::vector<Matrix> kraus_;
  ChannelKind kind_;
  std::vector<double> rare_weights_;
  std::vector<Matrix> rare_unitaries_;
};

/// sum_K K rho K^dagger, evaluated sector by sector.
inline State apply(const Channel& c, const State& rho) {
  require_same_system(c.input(), rho.system());
  const auto& in = c.input();
  const auto& out = c.output();
  std::vector<Matrix> blocks;
  for (std::size_t t = 0; t < out.sector_count(); ++t) {
    const auto rows = detail::as_index(out.sectors()[t]);
    const auto n = static_cast<Eigen::Index>(rows.size());
    Matrix b = Matrix::Zero(n, n);
    for (const auto& k : c.kraus())
      for (std::size_t s = 0; s < in.sector_count(); ++s) {
        const auto cols = detail::as_index(in.sectors()[s]);
        const Matrix ks = k(rows, cols);
        if (ks.cwiseAbs().maxCoeff() == 0.0) continue;
        b += ks * rho.block(s) * ks.adjoint();
      }
    blocks.push_back(std::move(b));
  }
  return State(out, std::move(blocks));
}

/// Heisenberg-picture action e -> sum_K K^dagger e K; the effect "e after C".
inline Effect pullback(const Channel& c, const Effect& e) {
  require_same_system(c.output(), e.system());
  const auto& in = c.input();
  const auto& out = c.output();
  std::vector<Matrix> blocks;
  for (std::size_t s = 0; s < in.sector_count(); ++s) {
    const auto cols = detail::as_index(in.sectors()[s]);
    const auto n = static_cast<Eigen::Index>(cols.size());
    Matrix b = Matrix::Zero(n, n);
    for (const auto& k : c.kraus())
      for (std::size_t t = 0; t < out.sector_count(); ++t) {
        const auto rows = detail::as_index(out.sectors()[t]);
        const Matrix ks = k(rows, cols);
        b += ks.adjoint() * e.block(t) * ks;
      }
    blocks.push_back(std::move(b));
  }
  return Effect(in, std::move(blocks));
}

/// second o first.
inline Channel then(const Channel& first, const Channel& second) {
  require_same_system(first.output(), second.input());
  std::vector<Matrix> kraus;
  for (const auto& k2 : second.kraus())
    for (const auto& k1 : first.kraus()) kraus.push_back(k2 * k1);
  const bool rev = first.is_reversible() && second.is_reversible();
  return Channel(first.input(), second.output(), std::move(kraus),
                 rev ? ChannelKind::reversible : ChannelKind::general);
}

/// Unitary of the admissible reversible family: a Haar unitary (orthogonal
/// for real fields) inside every sector, composed with probability 1/2 with a
/// uniformly random permutation among sectors of equal dimension.
inline Matrix random_reversible_unitary(const SystemDescriptor& system, Rng& rng) {
  const std::size_t m = system.sector_count();
  std::vector<std::size_t> target(m);
  std::iota(target.begin(), target.end(), std::size_t{0});
  if (uniform(rng) < 0.5) {
    std::map<std::size_t, std::vector<std::size_t>> by_dim;
    for (std::size_t s = 0; s < m; ++s) by_dim[system.sector_dim(s)].push_back(s);
    for (auto& [dim, group] : by_dim) {
      std::vector<std::size_t> shuffled = group;
      std::shuffle(shuffled.begin(), shuffled.end(), rng);
      for (std::size_t k = 0; k < group.size(); ++k) target[group[k]] = shuffled[k];
    }
  }
  const auto n = static_cast<Eigen::Index>(system.dim());
  Matrix u = Matrix::Zero(n, n);
  for (std::size_t s = 0; s < m; ++s) {
    const auto cols = detail::as_index(system.sectors()[s]);
    const auto rows = detail::as_index(system.sectors()[target[s]]);
    u(rows, cols) = linalg::haar_unitary(static_cast<Eigen::Index>(cols.size()), system.field(), rng);
  }
  return u;
}

inline Channel random_reversible(const SystemDescriptor& system, Rng& rng) {
  return Channel::unitary(system, random_reversible_unitary(system, rng));
}

inline Channel random_reversible(const SystemDescriptor& system, std::uint64_t seed) {
  Rng rng = make_rng(seed, stream_id("random_reversible"));
  return random_reversible(system, rng);
}

/// R = sum_i p_i U_i for reversible U_i.
inline Channel rare_channel(const std::vector<std::pair<double, Channel>>& mixture) {
  if (mixture.empty()) throw Error(Errc::invalid_distribution, "empty mixture");
  double total = 0.0;
  for (const auto& [p, u] : mixture) {
    if (!(p >= -1e-12)) throw Error(Errc::invalid_distribution, "negative probability");
    if (!u.is_reversible()) throw Error(Errc::not_reversible, "RaRe components must be reversible");
    require_same_system(u.input(), mixture.front().second.input());
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw Error(Errc::invalid_distribution, "probabilities sum to " + std::to_string(total));
  std::vector<Matrix> kraus;
  std::vector<double> weights;
  std::vector<Matrix> unitaries;
  for (const auto& [p, u] : mixture) {
    const double w = std::max(p, 0.0);
    weights.push_back(w);
    unitaries.push_back(u.kraus().front());
    if (w > 0.0) kraus.push_back(std::sqrt(w) * u.kraus().front());
  }
  const auto& sys = mixture.front().second.input();
  if (mixture.size() == 1) return Channel::unitary(sys, unitaries.front());
  return Channel(sys, sys, std::move(kraus), ChannelKind::rare, std::move(weights), std::move(unitaries));
}

/// Random RaRe channel with the given number of reversible components and
/// uniformly random (normalized) weights.
inline Channel random_rare(const SystemDescriptor& system, std::size_t components, Rng& rng) {
  std::vector<double> w(components);
  std::exponential_distribution<double> expo(1.0);
  double total = 0.0;
  for (auto& x : w) total += (x = expo(rng));
  std::vector<std::pair<double, Channel>> mix;
  double acc = 0.0;
  for (std::size_t i = 0; i < components; ++i) {
    const double p = i + 1 == components ? 1.0 - acc : w[i] / total;
    acc += p;
    mix.emplace_back(p, random_reversible(system, rng));
  }
  return rare_channel(mix);
}

/// rho -> Tr(rho) psi, with Kraus operators |psi><j|.
inline Channel replace_channel(const SystemDescriptor& system, const PureVector& psi) {
  require_same_system(system, psi.system());
  const auto n = static_cast<Eigen::Index>(system.dim());
  Vector g = Vector::Zero(n);
  const auto& idx = system.sectors()[psi.sector()];
  for (std::size_t k = 0; k < idx.size(); ++k)
    g(static_cast<Eigen::Index>(idx[k])) = psi.amplitudes()(static_cast<Eigen::Index>(k));
  std::vector<Matrix> kraus;
  for (Eigen::Index j = 0; j < n; ++j) {
    Matrix k = Matrix::Zero(n, n);
    k.col(j) = g;
    kraus.push_back(std::move(k));
  }
  return Channel(system, system, std::move(kraus));
}

/// I (x) U or U (x) I on a composite, for a unitary U on one factor.
inline Channel local_unitary(const SystemDescriptor& composite, Keep which, const Matrix& u) {
  const auto& a = composite.factor(0);
  const auto& b = composite.factor(1);
  const auto na = static_cast<Eigen::Index>(a.dim());
  const auto nb = static_cast<Eigen::Index>(b.dim());
  const Matrix k = which == Keep::a ? detail::kron(u, Matrix::Identity(nb, nb))
                                    : detail::kron(Matrix::Identity(na, na), u);
  return Channel::unitary(composite, k);
}

/// (X^m (x) X^n) exp(-i Theta) on cbit (x) cobit, Theta = diag(theta_kl).
inline Channel extended_classical_unitary(const SystemDescriptor& cbit_cobit, int m, int n,
                                          const std::array<double, 4>& theta) {
  if (cbit_cobit.dim() != 4 || !cbit_cobit.is_composite())
    throw Error(Errc::incompatible_systems, "expected a cbit (x) cobit composite");
  Matrix x(2, 2);
  x << 0, 1, 1, 0;
  const Matrix id = Matrix::Identity(2, 2);
  const Matrix flips = detail::kron(m ? x : id, n ? x : id);
  Matrix phase = Matrix::Zero(4, 4);
  for (int k = 0; k < 4; ++k) phase(k, k) = std::exp(cplx(0.0, -theta[static_cast<std::size_t>(k)]));
  return Channel::unitary(cbit_cobit, flips * phase);
}

/// C(chi) = chi and C trace-preserving.
inline bool is_doubly_stochastic(const Channel& c, double tol = kChannelTol) {
  if (!(c.input() == c.output())) return false;
  if (!c.is_trace_preserving(tol)) return false;
  const State chi = invariant_state(c.input());
  return distance(apply(c, chi), chi) <= tol;
}

/// Pure transformation T with Kraus operator sqrt(a), blockwise. When
/// (a|rho) = 1 it acts as the identity on the support of rho and never
/// occurs with higher probability than a.
inline Channel minimally_disturbing(const Effect& a, const State& rho) {
  require_same_system(a.system(), rho.system());
  const double p = pair(a, rho);
  if (p < rho.trace() - 1e-10)
    throw Error(Errc::effect_not_certain, "(a|rho) = " + std::to_string(p) + " < Tr(rho)");
  auto blocks = a.blocks();
  for (auto& b : blocks) b = linalg::psd_sqrt(b);
  const Observable root(a.system(), std::move(blocks));
  return Channel(a.system(), a.system(), {detail::dense_kraus(root)});
}

struct NaimarkDilation {
  SystemDescriptor ancilla;
  PureVector ancilla_state;
  SystemDescriptor joint;  // system (x) ancilla
  Matrix unitary;
  std::vector<Channel> projectors;  // Pi_i on the joint system
  std::vector<Effect> reproduced;   // (u (x) u) Pi_i (. (x) phi0)
  double orthogonality_residual = 0.0;  // max_ij ||Pi_i Pi_j - delta_ij Pi_i||_F
  double effect_residual = 0.0;         // max_i ||reproduced_i - a_i||_F
};

/// Dilates an observation-test {a_i} on a quantum system to orthogonal
/// projective pure transformations on system (x) ancilla: the isometry
/// V|psi> = sum_i sqrt(a_i)|psi> (x) |i> is completed to a unitary W, the
/// ancilla starts in |0> and Pi_i = W^dagger (I (x) |i><i|) W.
inline NaimarkDilation naimark(const std::vector<Effect>& test) {
  if (test.empty()) throw Error(Errc::not_a_test, "empty test");
  const SystemDescriptor& sys = test.front().system();
  if (sys.kind() != SystemKind::quantum)
    throw Error(Errc::unsupported, "Naimark dilation is implemented for quantum systems only");
  auto total = BlockOperator<Role::vector>::zero(sys).blocks();
  for (const auto& a : test) {
    require_same_system(a.system(), sys);
    total[0] += a.block(0);
  }
  const auto d = static_cast<Eigen::Index>(sys.dim());
  if ((total[0] - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-10)
    throw Error(Errc::not_a_test, "effects do not sum to the deterministic effect");

  const auto n = static_cast<Eigen::Index>(test.size());
  SystemDescriptor ancilla = SystemDescriptor::quantum(static_cast<std::size_t>(n), sys.field());
  SystemDescriptor joint = compose(sys, ancilla);
  const Eigen::Index dn = d * n;

  Matrix iso = Matrix::Zero(dn, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Matrix root = linalg::psd_sqrt(test[static_cast<std::size_t>(i)].block(0));
    for (Eigen::Index x = 0; x < d; ++x)
      for (Eigen::Index k = 0; k < d; ++k) iso(x * n + i, k) = root(x, k);
  }
  const Matrix complement = linalg::orthogonal_complement(iso, dn);
  Matrix w(dn, dn);
  Eigen::Index next = 0;
  for (Eigen::Index k = 0; k < d; ++k)
    for (Eigen::Index j = 0; j < n; ++j)
      w.col(k * n + j) = j == 0 ? Vector(iso.col(k)) : Vector(complement.col(next++));
  if (sys.field() == Field::real) w = w.real().cast<cplx>();

  std::vector<Channel> projectors;
  std::vector<Matrix> pis;
  std::vector<Effect> reproduced;
  double eff_res = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    Matrix outcome = Matrix::Zero(dn, dn);
    for (Eigen::Index x = 0; x < d; ++x) outcome(x * n + i, x * n + i) = 1.0;
    Matrix pi = w.adjoint() * outcome * w;
    pi = linalg::hermitian_part(pi);
    Matrix a = Matrix::Zero(d, d);
    for (Eigen::Index x = 0; x < d; ++x)
      for (Eigen::Index y = 0; y < d; ++y) a(x, y) = pi(x * n, y * n);
    eff_res = std::max(eff_res, (a - test[static_cast<std::size_t>(i)].block(0)).norm());
    reproduced.emplace_back(sys, std::vector<Matrix>{a});
    pis.push_back(pi);
    projectors.emplace_back(joint, joint, std::vector<Matrix>{pi});
  }
  double orth = 0.0;
  for (std::size_t i = 0; i < pis.size(); ++i)
    for (std::size_t j = 0; j < pis.size(); ++j) {
      const Matrix r = pis[i] * pis[j] - (i == j ? pis[i] : Matrix::Zero(dn, dn));
      orth = std::max(orth, r.norm());
    }
  PureVector phi0 = PureVector::basis(ancilla, 0);
  return NaimarkDilation{std::move(ancilla), std::move(phi0), std::move(joint), std::move(w),
                         std::move(projectors), std::move(reproduced), orth, eff_res};
}

struct DistinguishingTest {
  std::vector<Effect> effects;     // e_1..e_n
  std::vector<Channel> perp;       // A_1^perp .. A_{n-1}^perp
  double residual = 0.0;           // max_ij |(e_i|rho_j) - delta_ij|
};

/// Builds a perfectly distinguishing observation-test from effects with
/// (a_i|rho_j) = 0 for j > i and (a_i|rho_i) = 1: A_i^perp is the minimally
/// disturbing transformation of u - a_i for the average of the later states,
/// t_i = a_i after A_{i-1}^perp ... A_1^perp, and the test is
/// {t_1, ..., t_{n-1}, u - t_1 - ... - t_{n-1}}.
inline DistinguishingTest distinguishability_protocol(const std::vector<State>& states,
                                                      const std::vector<Effect>& effects) {
  if (states.empty() || states.size() != effects.size())
    throw Error(Errc::triangularity_failed, "need one effect per state");
  const SystemDescriptor& sys = states.front().system();
  const std::size_t n = states.size();
  for (std::size_t i = 0; i < n; ++i) {
    require_same_system(states[i].system(), sys);
    require_same_system(effects[i].system(), sys);
    if (!is_normalized(states[i])) throw Error(Errc::not_normalized, "states must be normalized");
  }
  const Effect u = unit_effect(sys);
  DistinguishingTest out;
  if (n == 1) {
    out.effects.push_back(u);
    return out;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (pair(effects[i], states[j]) > 1e-10)
        throw Error(Errc::triangularity_failed, "(a_" + std::to_string(i + 1) + "|rho_" +
                                                    std::to_string(j + 1) + ") > 0");
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (pair(effects[i], states[i]) < 1.0 - 1e-10)
      throw Error(Errc::triangularity_failed,
                  "(a_" + std::to_string(i + 1) + "|rho_" + std::to_string(i + 1) + ") < 1");

  for (std::size_t i = 0; i + 1 < n; ++i) {
    std::vector<Matrix> later = BlockOperator<Role::vector>::zero(sys).blocks();
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t s = 0; s < later.size(); ++s)
        later[s] += states[j].block(s) / static_cast<double>(n - i - 1);
    const State average(sys, std::move(later));
    auto rest = u.blocks();
    for (std::size_t s = 0; s < rest.size(); ++s) rest[s] -= effects[i].block(s);
    out.perp.push_back(minimally_disturbing(Effect(sys, std::move(rest)), average));
  }
  auto remainder = u.blocks();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    Effect t = effects[i];
    for (std::size_t k = i; k-- > 0;) t = pullback(out.perp[k], t);
    for (std::size_t s = 0; s < remainder.size(); ++s) remainder[s] -= t.block(s);
    out.effects.push_back(std::move(t));
  }
  out.effects.emplace_back(sys, std::move(remainder));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      out.residual = std::max(out.residual, std::abs(pair(out.effects[i], states[j]) - (i == j ? 1.0 : 0.0)));
  return out;
}

}  // namespace sharp
