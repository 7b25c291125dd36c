#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "sharp/channels.hpp"
#include "sharp/entropy.hpp"
#include "sharp/error.hpp"
#include "sharp/random.hpp"
#include "sharp/sampling.hpp"
#include "sharp/spectral.hpp"
#include "sharp/statespace.hpp"

namespace sharp {

inline constexpr double kNatural = std::numbers::e;

inline double natural_entropy(const State& rho) { return shannon(spectrum(rho), kNatural); }

/// Observable H = sum_i E_i phi_i^dagger with cached ascending energies.
class Hamiltonian {
 public:
  explicit Hamiltonian(Observable h) : h_(std::move(h)) {
    auto d = diagonalize_observable(h_);
    for (std::size_t i = d.values.size(); i-- > 0;) {
      energies_.push_back(d.values[i]);
      eigenstates_.push_back(d.vectors[i]);
    }
  }

  [[nodiscard]] const Observable& observable() const noexcept { return h_; }
  [[nodiscard]] const SystemDescriptor& system() const noexcept { return h_.system(); }
  [[nodiscard]] const std::vector<double>& energies() const noexcept { return energies_; }
  [[nodiscard]] const std::vector<PureVector>& eigenstates() const noexcept { return eigenstates_; }
  [[nodiscard]] double e_min() const { return energies_.front(); }
  [[nodiscard]] double e_max() const { return energies_.back(); }
  [[nodiscard]] double spread() const { return e_max() - e_min(); }
  [[nodiscard]] bool fully_degenerate() const {
    return spread() <= 1e-12 * std::max(1.0, std::max(std::abs(e_min()), std::abs(e_max())));
  }
  [[nodiscard]] double expectation(const State& rho) const { return pair(h_, rho); }

 private:
  Observable h_;
  std::vector<double> energies_;
  std::vector<PureVector> eigenstates_;
};

struct ThermoConfig {
  double k_b = 1.0;

  [[nodiscard]] double temperature(double beta) const { return 1.0 / (k_b * beta); }
};

namespace detail {

/// Boltzmann weights normalized to sum 1, with the exponent shifted by the
/// extremal energy on the side that dominates. Infinite beta selects the
/// extremal eigenspace.
inline std::vector<double> gibbs_weights(const Hamiltonian& h, double beta) {
  const auto& e = h.energies();
  std::vector<double> w(e.size(), 0.0);
  if (std::isinf(beta)) {
    const double target = beta > 0 ? h.e_min() : h.e_max();
    for (std::size_t i = 0; i < e.size(); ++i)
      if (std::abs(e[i] - target) <= kGroupTol * std::max(1.0, std::abs(target))) w[i] = 1.0;
  } else {
    const double shift = beta >= 0 ? h.e_min() : h.e_max();
    for (std::size_t i = 0; i < e.size(); ++i) w[i] = std::exp(-beta * (e[i] - shift));
  }
  double z = 0.0;
  for (double x : w) z += x;
  for (double& x : w) x /= z;
  return w;
}

}  // namespace detail

inline State gibbs_state(const Hamiltonian& h, double beta) {
  if (std::isnan(beta)) throw Error(Errc::invalid_temperature, "beta is NaN");
  const auto w = detail::gibbs_weights(h, beta);
  auto blocks = StateVector::zero(h.system()).blocks();
  for (std::size_t i = 0; i < w.size(); ++i)
    blocks[h.eigenstates()[i].sector()] += w[i] * h.eigenstates()[i].projector_block();
  return State(h.system(), std::move(blocks));
}

/// ln Z for finite beta, Z = sum_i exp(-beta E_i).
inline double log_partition(const Hamiltonian& h, double beta) {
  if (!std::isfinite(beta)) throw Error(Errc::invalid_temperature, "ln Z needs a finite beta");
  const double shift = beta >= 0 ? h.e_min() : h.e_max();
  double z = 0.0;
  for (double e : h.energies()) z += std::exp(-beta * (e - shift));
  return -beta * shift + std::log(z);
}

inline double energy_of_beta(const Hamiltonian& h, double beta) {
  const auto w = detail::gibbs_weights(h, beta);
  double e = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) e += w[i] * h.energies()[i];
  return e;
}

/// Inverts the strictly decreasing E(beta) by bisection. The bracket starts
/// at +-64 / (E_max - E_min) and doubles at most 20 times; bisection then runs
/// until the bracket cannot shrink further in double precision.
inline double beta_of_energy(const Hamiltonian& h, double energy) {
  if (h.fully_degenerate()) throw Error(Errc::not_invertible, "fully degenerate Hamiltonian");
  if (!(energy > h.e_min() && energy < h.e_max()))
    throw Error(Errc::energy_out_of_range, "energy must lie strictly between E_min and E_max");
  double cap = 64.0 / h.spread();
  for (int k = 0; k < 20; ++k) {
    if (energy_of_beta(h, cap) < energy && energy_of_beta(h, -cap) > energy) break;
    cap *= 2.0;
  }
  double lo = -cap, hi = cap;  // E(lo) > energy > E(hi)
  if (!(energy_of_beta(h, hi) <= energy && energy_of_beta(h, lo) >= energy))
    throw Error(Errc::energy_out_of_range, "energy too close to the spectrum edge to bracket");
  for (int it = 0; it < 4096; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double em = energy_of_beta(h, mid);
    if (em == energy) return mid;
    (em > energy ? lo : hi) = mid;
  }
  const double elo = energy_of_beta(h, lo) - energy;
  const double ehi = energy_of_beta(h, hi) - energy;
  return std::abs(elo) <= std::abs(ehi) ? lo : hi;
}

struct MaxEntropyReport {
  double beta = 0.0;
  double gibbs_entropy = 0.0;
  std::size_t samples = 0;
  double min_gap = 0.0;               // min S(gibbs) - S(rho), should be >= 0
  double max_identity_residual = 0.0;  // max |gap - S(rho || gibbs)|
  double max_energy_residual = 0.0;    // max |<H>_rho - E|
  bool pass = false;
};

/// Constrained state with <H> = E: random state mixed with a partner on the
/// other side of E at the closed-form weight.
inline State random_state_at_energy(const Hamiltonian& h, double energy, Rng& rng) {
  const auto& sys = h.system();
  State a = random_state(sys, rng);
  double ea = h.expectation(a);
  std::optional<State> b;
  for (int tries = 0; tries < 64 && !b; ++tries) {
    State c = random_state(sys, rng);
    const double ec = h.expectation(c);
    if ((ea - energy) * (ec - energy) < 0.0) b.emplace(std::move(c));
  }
  if (!b) {
    // Fall back to an extremal eigenstate on the other side.
    const auto& ev = h.eigenstates();
    b.emplace(ea > energy ? ev.front().state() : ev.back().state());
  }
  const double eb = h.expectation(*b);
  if (ea == eb) return a;
  const double t = std::clamp((energy - eb) / (ea - eb), 0.0, 1.0);
  return combine<Role::state, Role::state>({{t, &a}, {1.0 - t, &*b}}, sys);
}

inline MaxEntropyReport max_entropy_check(const Hamiltonian& h, double energy, std::size_t trials,
                                          std::uint64_t seed, double tol = 1e-9) {
  MaxEntropyReport r;
  r.beta = beta_of_energy(h, energy);
  const State g = gibbs_state(h, r.beta);
  r.gibbs_entropy = natural_entropy(g);
  r.min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng = make_rng(seed, stream_id("max-entropy"), t);
    const State rho = random_state_at_energy(h, energy, rng);
    const double gap = r.gibbs_entropy - natural_entropy(rho);
    const double kl = kl_divergence(rho, g);
    r.min_gap = std::min(r.min_gap, gap);
    r.max_identity_residual = std::max(r.max_identity_residual, std::abs(gap - kl));
    r.max_energy_residual = std::max(r.max_energy_residual, std::abs(h.expectation(rho) - energy));
    ++r.samples;
  }
  if (trials == 0) r.min_gap = 0.0;
  r.pass = r.min_gap >= -tol && r.max_identity_residual <= tol;
  return r;
}

struct SecondLawReport {
  double entropy_increase = 0.0;  // S(rho'_S) + S(rho'_E) - S(rho_S) - S(rho_E)
  double mutual_info = 0.0;       // I(S:E) of rho'
  double residual = 0.0;          // |increase - mutual_info|
};

/// Natural-log entropies throughout.
inline SecondLawReport second_law_lemma_check(const State& rho_s, const State& rho_e, const Channel& u) {
  if (!u.is_reversible()) throw Error(Errc::not_reversible, "the interaction must be reversible");
  const State joint = tensor(rho_s, rho_e);
  require_same_system(u.input(), joint.system());
  const State after = apply(u, joint);
  SecondLawReport r;
  r.entropy_increase = natural_entropy(marginal(after, Keep::a)) + natural_entropy(marginal(after, Keep::b)) -
                       natural_entropy(rho_s) - natural_entropy(rho_e);
  r.mutual_info = mutual_information(after, kNatural);
  r.residual = std::abs(r.entropy_increase - r.mutual_info);
  return r;
}

struct LandauerReport {
  double beta = 0.0;
  double lhs = 0.0;           // <H_E>' - <H_E>
  double entropy_drop = 0.0;  // S(rho_S) - S(rho'_S)
  double mutual_info = 0.0;   // I(S:E) of rho'
  double divergence = 0.0;    // S(rho'_E || rho_{E,beta})
  double rhs = 0.0;           // k_B T (drop + I + D)
  double residual = 0.0;      // |lhs - rhs|
  double bound_slack = 0.0;   // lhs - k_B T drop
};

/// The environment starts in the Gibbs state of H_E at inverse temperature
/// beta; U acts on system (x) environment. Energies are in units where
/// k_B T = 1 / beta.
inline LandauerReport landauer_report(const State& rho_s, const Hamiltonian& h_e, double beta, const Channel& u,
                                      const ThermoConfig& config = {}) {
  if (!std::isfinite(beta) || beta <= 0.0)
    throw Error(Errc::invalid_temperature, "Landauer's equality needs a finite beta > 0");
  if (!u.is_reversible()) throw Error(Errc::not_reversible, "the interaction must be reversible");
  const State rho_e = gibbs_state(h_e, beta);
  const State joint = tensor(rho_s, rho_e);
  require_same_system(u.input(), joint.system());
  const State after = apply(u, joint);
  const State after_s = marginal(after, Keep::a);
  const State after_e = marginal(after, Keep::b);
  LandauerReport r;
  r.beta = beta;
  r.lhs = h_e.expectation(after_e) - h_e.expectation(rho_e);
  r.entropy_drop = natural_entropy(rho_s) - natural_entropy(after_s);
  r.mutual_info = mutual_information(after, kNatural);
  r.divergence = kl_divergence(after_e, rho_e);
  const double kt = config.k_b * config.temperature(beta);
  r.rhs = kt * (r.entropy_drop + r.mutual_info + r.divergence);
  r.residual = std::abs(r.lhs - r.rhs);
  r.bound_slack = r.lhs - kt * r.entropy_drop;
  return r;
}

}  // namespace sharp
