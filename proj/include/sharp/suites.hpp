#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "sharp/channels.hpp"
#include "sharp/entropy.hpp"
#include "sharp/error.hpp"
#include "sharp/io.hpp"
#include "sharp/oracle.hpp"
#include "sharp/purification.hpp"
#include "sharp/random.hpp"
#include "sharp/sampling.hpp"
#include "sharp/sectors.hpp"
#include "sharp/spectral.hpp"
#include "sharp/statespace.hpp"
#include "sharp/thermo.hpp"

namespace sharp::suites {

using io::json;

struct TrialOutcome {
  double residual = 0.0;
  json input;        // serialized inputs, kept for failing trials
  std::string note;  // set when the trial threw
};

struct SuiteFailure {
  std::size_t trial;
  std::uint64_t trial_seed;
  double residual;
  std::string note;
  json input;
};

struct SuiteReport {
  std::string suite;
  std::string theorem;
  std::string theory;  // label of the requested theory
  std::string system;  // label of the system the trials ran on
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  double tol = 0.0;
  double max_residual = 0.0;
  bool pass = false;
  std::vector<SuiteFailure> failures;
  double seconds = 0.0;  // timing, excluded from the JSON payload
};

using TrialFn = std::function<TrialOutcome(const SystemDescriptor&, Rng&, std::size_t)>;

struct SuiteSpec {
  std::string name;
  std::string theorem;  // the verified statement, in words
  std::string module;   // library module the statement belongs to
  double tol;
  std::function<SystemDescriptor(const SystemDescriptor&)> system;  // throws unsupported
  TrialFn trial;
};

inline constexpr std::size_t kMaxRecordedFailures = 16;

/// Theories exercised by `verify --all`.
inline std::vector<SystemDescriptor> default_theories() {
  std::vector<SystemDescriptor> out;
  for (std::size_t d = 2; d <= 8; ++d) out.push_back(SystemDescriptor::quantum(d));
  for (std::size_t d = 2; d <= 4; ++d) out.push_back(SystemDescriptor::quantum(d, Field::real));
  for (std::size_t d = 2; d <= 8; ++d) out.push_back(SystemDescriptor::classical(d));
  out.push_back(compose(SystemDescriptor::classical(2), SystemDescriptor::coherent(2)));
  out.push_back(compose(SystemDescriptor::classical(3), SystemDescriptor::coherent(3)));
  return out;
}

/// A composite on which bipartite statements are tested: the theory itself
/// when it is already composite, otherwise the theory joined with a partner
/// of dimension min(d, 4).
inline SystemDescriptor bipartite_of(const SystemDescriptor& t) {
  if (t.is_composite()) return t;
  const std::size_t k = std::min<std::size_t>(t.dim(), 4);
  switch (t.kind()) {
    case SystemKind::quantum: return compose(t, SystemDescriptor::quantum(k, t.field()));
    case SystemKind::classical:
    case SystemKind::coherent: return compose(t, SystemDescriptor::coherent(k, t.field()));
    default: return compose(t, purifying_partner(t));
  }
}

namespace detail {

inline SystemDescriptor same(const SystemDescriptor& t) { return t; }

inline SystemDescriptor quantum_only(const SystemDescriptor& t) {
  if (t.kind() != SystemKind::quantum)
    throw Error(Errc::unsupported, "this suite runs on quantum systems only, got " + t.label());
  return t;
}

inline double pos(double x) { return std::isnan(x) ? std::numeric_limits<double>::infinity() : std::max(0.0, x); }

inline double orthogonality_defect(const std::vector<PureVector>& v) {
  double r = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j)
      r = std::max(r, std::abs(std::abs(inner(v[i], v[j])) - (i == j ? 1.0 : 0.0)));
  return r;
}

inline std::vector<double> padded(std::vector<double> v, std::size_t n) {
  v.resize(std::max(v.size(), n), 0.0);
  std::sort(v.begin(), v.end(), std::greater<>());
  return v;
}

inline double vector_gap(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = std::max(a.size(), b.size());
  const auto x = padded(a, n), y = padded(b, n);
  double r = 0.0;
  for (std::size_t i = 0; i < n; ++i) r = std::max(r, std::abs(x[i] - y[i]));
  return r;
}

/// Random state of a varying kind: full rank, reduced rank, or degenerate.
inline State varied_state(const SystemDescriptor& sys, Rng& rng, std::size_t index) {
  switch (index % 4) {
    case 0: return random_state(sys, rng);
    case 1: return random_state(sys, rng, 1 + uniform_index(rng, std::max<std::size_t>(1, sys.dim() / 2)));
    case 2: return random_degenerate_state(sys, rng);
    default: return random_complete_state(sys, rng);
  }
}

// ---- trials ------------------------------------------------------------------

inline TrialOutcome probability_balance(const SystemDescriptor& sys, Rng& rng, std::size_t) {
  const State psi = random_pure(sys, rng).state();
  const State ra = marginal(psi, Keep::a);
  const State rb = marginal(psi, Keep::b);
  const auto ma = max_eigenpair(ra);
  const auto mb = max_eigenpair(rb);
  double r = std::abs(ma.p - mb.p);
  if (ma.p < 1.0 - 1e-12) {
    // (alpha^dagger | sigma) for the residual sigma = (rho - p* alpha) / (1 - p*).
    const Vector& v = ma.alpha.amplitudes();
    const double overlap = v.dot(ra.block(ma.alpha.sector()) * v).real();
    r = std::max(r, pos((overlap - ma.p) / (1.0 - ma.p)));
  }
  return {r, io::to_json(psi), {}};
}

inline TrialOutcome diagonalization(const SystemDescriptor& sys, Rng& rng, std::size_t index) {
  const State rho = varied_state(sys, rng, index);
  const auto d = diagonalize(rho);
  double r = 0.0;
  if (d.eigenvalues.size() != sys.dim()) r = std::numeric_limits<double>::infinity();
  r = std::max(r, vector_gap(d.eigenvalues, oracle::eigenvalues(oracle::dense(rho))));
  r = std::max(r, (oracle::dense(d.reconstruct()) - oracle::dense(rho)).norm());
  r = std::max(r, orthogonality_defect(d.eigenstates));
  for (std::size_t i = 0; i < d.eigenstates.size(); ++i)
    r = std::max(r, std::abs(d.eigenvalues[i] - pair(d.eigenstates[i], rho)));
  for (std::size_t i = 1; i < d.eigenvalues.size(); ++i) r = std::max(r, pos(d.eigenvalues[i] - d.eigenvalues[i - 1]));
  if (!d.eigenvalues.empty()) r = std::max(r, std::abs(d.eigenvalues.front() - max_eigenpair(rho).p));
  return {r, io::to_json(rho), {}};
}

inline TrialOutcome schmidt_trial(const SystemDescriptor& sys, Rng& rng, std::size_t) {
  const State psi = random_pure(sys, rng).state();
  const auto s = schmidt(psi);
  double r = 0.0;
  for (std::size_t i = 0; i < s.rank; ++i)
    for (std::size_t j = 0; j < s.rank; ++j) {
      const PureVector ab = tensor(s.a[i], s.b[j]);
      r = std::max(r, std::abs(pair(ab, psi) - (i == j ? s.p[i] : 0.0)));
    }
  const State ra = marginal(psi, Keep::a);
  const State rb = marginal(psi, Keep::b);
  auto ba = StateVector::zero(ra.system()).blocks();
  auto bb = StateVector::zero(rb.system()).blocks();
  for (std::size_t i = 0; i < s.rank; ++i) {
    ba[s.a[i].sector()] += s.p[i] * s.a[i].projector_block();
    bb[s.b[i].sector()] += s.p[i] * s.b[i].projector_block();
  }
  r = std::max(r, distance(StateVector(ra.system(), std::move(ba)), ra.as<Role::vector>()));
  r = std::max(r, distance(StateVector(rb.system(), std::move(bb)), rb.as<Role::vector>()));
  r = std::max(r, vector_gap(spectrum(ra), spectrum(rb)));
  for (std::size_t i = 1; i < s.rank; ++i) r = std::max(r, pos(s.p[i] - s.p[i - 1]));
  return {r, io::to_json(psi), {}};
}

inline TrialOutcome uniqueness(const SystemDescriptor& sys, Rng& rng, std::size_t index) {
  const State rho = index % 2 ? varied_state(sys, rng, index) : random_degenerate_state(sys, rng);
  const auto s1 = rng();
  const auto s2 = rng();
  const auto d0 = diagonalize(rho);
  double r = 0.0;
  for (auto seed : {s1, s2}) {
    const auto d = diagonalize(rho, seed);
    if (d.grouped.size() != d0.grouped.size()) return {std::numeric_limits<double>::infinity(), io::to_json(rho), "group count differs"};
    for (std::size_t k = 0; k < d.grouped.size(); ++k) {
      r = std::max(r, std::abs(d.grouped[k].lambda - d0.grouped[k].lambda));
      r = std::max(r, distance(d.grouped[k].projector, d0.grouped[k].projector));
    }
  }
  return {r, io::to_json(rho), {}};
}

inline TrialOutcome majorization_necessity(const SystemDescriptor& sys, Rng& rng, std::size_t) {
  const State sigma = random_state(sys, rng);
  const Channel rare = random_rare(sys, 2 + uniform_index(rng, 3), rng);
  const auto p = spectrum(apply(rare, sigma));
  const auto q = spectrum(sigma);
  double r = pos(-majorization_slack(q, p));
  // Mutual majorization forces equal spectra.
  if (majorizes(p, q) && majorizes(q, p)) r = std::max(r, vector_gap(p, q) > 1e-9 ? vector_gap(p, q) : 0.0);
  return {r, io::to_json(sigma), {}};
}

inline TrialOutcome measurement_preparation(const SystemDescriptor& sys, Rng& rng, std::size_t index) {
  const State rho = varied_state(sys, rng, index);
  const std::uint64_t seed = rng();
  double r = 0.0;
  for (const auto& f : {SchurConcaveFunction::shannon_entropy(), SchurConcaveFunction::renyi_entropy(2.0)}) {
    const auto m = measurement_monotone_estimate(f, rho, 6, seed);
    const auto p = preparation_monotone_estimate(f, rho, 6, seed);
    r = std::max({r, pos(-m.min_gap), pos(-p.min_gap), m.eigen_gap, std::abs(m.estimate - m.spectral),
                  std::abs(p.estimate - p.spectral)});
  }
  return {r, io::to_json(rho), {}};
}

inline TrialOutcome double_stochasticity(const SystemDescriptor& sys, Rng& rng, std::size_t index) {
  const auto s1 = index % 3 == 0 ? maximal_set(sys) : random_maximal_set(sys, rng);
  const auto s2 = random_maximal_set(sys, rng);
  const RealMatrix t = transition_matrix(s1, s2);
  double r = pos(-t.minCoeff());
  for (Eigen::Index i = 0; i < t.rows(); ++i) {
    r = std::max(r, std::abs(t.row(i).sum() - 1.0));
    r = std::max(r, std::abs(t.col(i).sum() - 1.0));
  }
  json in = json::array();
  for (const auto& v : s2) in.push_back(io::to_json(v));
  return {r, in, {}};
}

inline TrialOutcome klein(const SystemDescriptor& sys, Rng& rng, std::size_t index) {
  const State rho = index % 3 == 1 ? random_state(sys, rng, 1 + uniform_index(rng, sys.dim())) : random_state(sys, rng);
  State sigma = random_state(sys, rng);
  if (index % 3 == 2) {
    const double t = uniform(rng, 0.0, 1e-3);
    sigma = combine<Role::state, Role::state>({{1.0 - t, &rho}, {t, &sigma}}, sys);
  }
  const double kl = kl_divergence(rho, sigma);
  const double self = kl_divergence(rho, rho);
  double r = std::max(pos(-kl), std::abs(self));
  if (kl <= 1e-10 && distance(rho, sigma) > 1e-4) r = std::numeric_limits<double>::infinity();
  return {r, json{{"rho", io::to_json(rho)}, {"sigma", io::to_json(sigma)}}, {}};
}

inline TrialOutcome minimal_disturbance(const SystemDescriptor& sys, Rng& rng, std::size_t) {
  auto set = random_maximal_set(sys, rng);
  std::shuffle(set.begin(), set.end(), rng);
  const std::size_t k = 1 + uniform_index(rng, sys.dim());
  std::vector<PureVector> supp(set.begin(), set.begin() + static_cast<std::ptrdiff_t>(k));
  std::vector<PureVector> q;
  for (std::size_t i = k; i < set.size(); ++i)
    if (uniform(rng) < 0.5) q.push_back(set[i]);
  const Effect p = projector_onto(sys, supp);
  const Effect qe = projector_onto(sys, q);
  const Effect a = combine<Role::effect, Role::effect>({{1.0, &p}, {0.3, &qe}}, sys);
  const State rho = random_state_on(sys, supp, rng);
  const Channel t = minimally_disturbing(a, rho);
  const State inside = random_state_on(sys, supp, rng);
  const State any = random_state(sys, rng);
  double r = distance(apply(t, inside), inside);
  r = std::max(r, distance(apply(t, rho), rho));
  r = std::max(r, pos(apply(t, any).trace() - pair(a, any)));
  return {r, json{{"effect", io::to_json(a)}, {"rho", io::to_json(rho)}}, {}};
}

inline TrialOutcome invariant_spectrum(const SystemDescriptor& sys, Rng&, std::size_t) {
  const State chi = invariant_state(sys);
  const auto d = diagonalize(chi);
  double r = d.eigenvalues.size() == sys.dim() ? 0.0 : std::numeric_limits<double>::infinity();
  for (double p : d.eigenvalues) r = std::max(r, std::abs(p - 1.0 / static_cast<double>(sys.dim())));
  return {r, io::to_json(chi), {}};
}

inline TrialOutcome naimark_trial(const SystemDescriptor& sys, Rng& rng, std::size_t) {
  const std::size_t n = 2 + uniform_index(rng, 3);
  const auto test = random_test(sys, n, rng);
  const auto dil = naimark(test);
  json in = json::array();
  for (const auto& a : test) in.push_back(io::blocks_json(a));
  return {std::max(dil.orthogonality_residual, dil.effect_residual), in, {}};
}

inline TrialOutcome measurement_majorization(const SystemDescriptor& sys, Rng& rng, std::size_t index) {
  const State rho = varied_state(sys, rng, index);
  const auto test = index % 2 ? random_pure_test(sys, rng) : pure_sharp_measurement(random_maximal_set(sys, rng));
  Distribution q;
  for (const auto& a : test) q.push_back(pair(a, rho));
  return {pos(-majorization_slack(spectrum(rho), q)), io::to_json(rho), {}};
}

inline TrialOutcome subadditivity(const SystemDescriptor& sys, Rng& rng, std::size_t index) {
  if (index % 2) {
    const State a = random_state(sys.factor(0), rng);
    const State b = random_state(sys.factor(1), rng);
    const State ab = tensor(a, b);
    return {std::abs(mutual_information(ab)), io::to_json(ab), {}};
  }
  const State ab = random_state(sys, rng, index % 4 == 0 ? 0 : 1 + uniform_index(rng, 2));
  const double sa = shannon_vn(marginal(ab, Keep::a));
  const double sb = shannon_vn(marginal(ab, Keep::b));
  const double s = shannon_vn(ab);
  const double r = std::max(pos(s - sa - sb), pos(std::abs(sa - sb) - s));
  return {r, io::to_json(ab), {}};
}

inline SystemDescriptor with_environment(const SystemDescriptor& t, std::size_t env) {
  return compose(t, SystemDescriptor::quantum(env, t.field()));
}

inline TrialOutcome landauer(const SystemDescriptor& sys, Rng& rng, std::size_t) {
  const State rho_s = random_state(sys.factor(0), rng);
  const Hamiltonian h(random_hamiltonian(sys.factor(1), rng));
  const double beta = uniform(rng, 0.1, 5.0);
  const Channel u = random_reversible(sys, rng);
  const auto rep = landauer_report(rho_s, h, beta, u);
  const double r = std::max({rep.residual, pos(-rep.mutual_info), pos(-rep.divergence), pos(-rep.bound_slack)});
  return {r, json{{"rho_s", io::to_json(rho_s)}, {"hamiltonian", io::to_json(h.observable())}, {"beta", beta}}, {}};
}

inline TrialOutcome second_law(const SystemDescriptor& sys, Rng& rng, std::size_t) {
  const State rs = random_state(sys.factor(0), rng);
  const State re = random_state(sys.factor(1), rng);
  const Channel u = random_reversible(sys, rng);
  const auto rep = second_law_lemma_check(rs, re, u);
  return {std::max(pos(-rep.entropy_increase), rep.residual), json{{"rho_s", io::to_json(rs)}, {"rho_e", io::to_json(re)}}, {}};
}

inline TrialOutcome distinguishability(const SystemDescriptor& sys, Rng& rng, std::size_t) {
  auto set = random_maximal_set(sys, rng);
  std::shuffle(set.begin(), set.end(), rng);
  const std::size_t n = 1 + uniform_index(rng, sys.dim());
  std::vector<std::vector<PureVector>> groups(n);
  std::vector<PureVector> leftover;
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (i < n) {
      groups[i].push_back(set[i]);
    } else {
      const std::size_t g = uniform_index(rng, n + 1);
      (g == n ? leftover : groups[g]).push_back(set[i]);
    }
  }
  std::vector<State> states;
  std::vector<Effect> effects;
  std::vector<PureVector> earlier = leftover;
  for (std::size_t i = 0; i < n; ++i) {
    states.push_back(random_state_on(sys, groups[i], rng));
    const Effect p = projector_onto(sys, groups[i]);
    const Effect x = random_effect_on(sys, earlier, rng);
    effects.push_back(combine<Role::effect, Role::effect>({{1.0, &p}, {1.0, &x}}, sys));
    earlier.insert(earlier.end(), groups[i].begin(), groups[i].end());
  }
  const auto test = distinguishability_protocol(states, effects);
  json in = json::array();
  for (const auto& s : states) in.push_back(io::blocks_json(s));
  return {test.residual, in, {}};
}

inline TrialOutcome gibbs_max_entropy(const SystemDescriptor& sys, Rng& rng, std::size_t) {
  const Hamiltonian h(random_observable(sys, rng));
  double r = 0.0;
  if (h.fully_degenerate()) return {0.0, io::to_json(h.observable()), {}};
  const double beta = uniform(rng, -6.0, 6.0) / h.spread();
  const State g = gibbs_state(h, beta);
  const double e = energy_of_beta(h, beta);
  r = std::max(r, std::abs(natural_entropy(g) - (beta * e + log_partition(h, beta))));
  // beta carries units of 1 / energy, so the round trip is compared on the scale 1 / spread.
  const double back = beta_of_energy(h, e);
  r = std::max({r, std::abs(back - beta) * h.spread(), std::abs(energy_of_beta(h, back) - e)});
  const double target = h.e_min() + uniform(rng, 0.2, 0.8) * h.spread();
  const auto rep = max_entropy_check(h, target, 2, rng());
  r = std::max({r, pos(-rep.min_gap), rep.max_identity_residual});
  return {r, json{{"hamiltonian", io::to_json(h.observable())}, {"beta", beta}, {"energy", target}}, {}};
}

}  // namespace detail

inline const std::vector<SuiteSpec>& registry() {
  static const std::vector<SuiteSpec> specs = [] {
    using namespace detail;
    auto env = [](std::size_t k) {
      return [k](const SystemDescriptor& t) { return with_environment(t, k); };
    };
    return std::vector<SuiteSpec>{
        {"thm1-probability-balance", "the two marginals of a pure bipartite state have the same maximum eigenvalue",
         "statespace", 1e-10, bipartite_of, probability_balance},
        {"thm3-diagonalization", "every state is diagonalized by a set of perfectly distinguishable pure states",
         "spectral", 1e-9, same, diagonalization},
        {"thm4-schmidt", "every pure bipartite state has a Schmidt decomposition", "spectral", 1e-9, bipartite_of,
         schmidt_trial},
        {"thm5-uniqueness", "the grouped spectrum and eigenprojectors of a state are unique", "spectral", 1e-8, same,
         uniqueness},
        {"thm6-majorization", "RaRe channels can only produce majorized spectra", "entropy", 1e-9, same,
         majorization_necessity},
        {"thm7-measurement-preparation",
         "measurement and preparation monotones equal the spectral monotone for reducible Schur-concave functions",
         "entropy", 1e-9, same, measurement_preparation},
        {"lemma2-double-stochasticity", "transition matrices between maximal sets are doubly stochastic", "spectral",
         1e-9, same, double_stochasticity},
        {"lemma3-klein", "Klein's inequality for the relative entropy", "thermo", 1e-11, same, klein},
        {"prop13-minimal-disturbance", "an effect certain on rho has a pure transformation acting as the identity on rho",
         "channels", 1e-9, same, minimal_disturbance},
        {"prop14-invariant-spectrum", "the invariant state has all eigenvalues equal to 1/d", "spectral", 1e-12, same,
         invariant_spectrum},
        {"prop19-naimark", "every observation-test dilates to orthogonal projective pure transformations", "channels",
         1e-9, quantum_only, naimark_trial},
        {"prop26-measurement-majorization", "outcome distributions of pure tests are majorized by the spectrum",
         "entropy", 1e-9, same, measurement_majorization},
        {"prop27-subadditivity", "Shannon-von Neumann entropy is subadditive and obeys the triangle inequality",
         "thermo", 1e-9, bipartite_of, subadditivity},
        {"landauer-equality", "Landauer's equality and bound for a Gibbs environment", "thermo", 1e-8, env(4),
         landauer},
        {"second-law-lemma", "reversible interactions cannot decrease the sum of marginal entropies", "thermo", 1e-9,
         env(3), second_law},
        {"appB-distinguishability", "triangular families of states are perfectly distinguishable", "channels", 1e-9,
         same, distinguishability},
        {"gibbs-max-entropy", "Gibbs states maximize the entropy at fixed energy", "thermo", 1e-8, same,
         gibbs_max_entropy},
    };
  }();
  return specs;
}

inline const SuiteSpec& find_suite(const std::string& name) {
  for (const auto& s : registry())
    if (s.name == name) return s;
  throw Error(Errc::unknown_suite, "no suite named \"" + name + "\"");
}

/// Runs a suite. Trial t draws from derive_seed(seed, stream_id(name), t), so
/// the report does not depend on the thread count or scheduling.
inline SuiteReport run_suite(const std::string& name, const SystemDescriptor& theory, std::size_t trials,
                             std::uint64_t seed, std::optional<double> tol = std::nullopt, unsigned threads = 0) {
  const SuiteSpec& spec = find_suite(name);
  if (trials == 0) throw Error(Errc::invalid_dimension, "trials must be at least 1");
  const SystemDescriptor sys = spec.system(theory);
  const auto start = std::chrono::steady_clock::now();
  std::vector<TrialOutcome> outcomes(trials);
  auto work = [&](std::size_t t) {
    Rng rng(derive_seed(seed, stream_id(name), t));
    try {
      outcomes[t] = spec.trial(sys, rng, t);
      if (std::isnan(outcomes[t].residual)) outcomes[t].residual = std::numeric_limits<double>::infinity();
    } catch (const std::exception& e) {
      outcomes[t] = {std::numeric_limits<double>::infinity(), json(), e.what()};
    }
  };
  if (threads == 0) threads = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, trials));
  if (threads <= 1) {
    for (std::size_t t = 0; t < trials; ++t) work(t);
  } else {
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < threads; ++k)
      pool.emplace_back([&, k] {
        for (std::size_t t = k; t < trials; t += threads) work(t);
      });
    for (auto& th : pool) th.join();
  }

  SuiteReport rep;
  rep.suite = spec.name;
  rep.theorem = spec.theorem;
  rep.theory = theory.label();
  rep.system = sys.label();
  rep.trials = trials;
  rep.seed = seed;
  rep.tol = tol.value_or(spec.tol);
  for (std::size_t t = 0; t < trials; ++t) {
    const auto& o = outcomes[t];
    rep.max_residual = std::max(rep.max_residual, o.residual);
    if (o.residual > rep.tol && rep.failures.size() < kMaxRecordedFailures)
      rep.failures.push_back({t, derive_seed(seed, stream_id(name), t), o.residual, o.note, o.input});
  }
  rep.pass = rep.max_residual <= rep.tol;
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

inline json residual_json(double x) {
  if (std::isinf(x)) return "inf";
  return x;
}

inline json to_json(const SuiteReport& r) {
  json failures = json::array();
  for (const auto& f : r.failures) {
    json j{{"trial", f.trial}, {"trial_seed", f.trial_seed}, {"residual", residual_json(f.residual)}, {"input", f.input}};
    if (!f.note.empty()) j["error"] = f.note;
    failures.push_back(std::move(j));
  }
  return json{{"suite", r.suite},
              {"theorem", r.theorem},
              {"theory", r.theory},
              {"system", r.system},
              {"trials", r.trials},
              {"seed", r.seed},
              {"tol", r.tol},
              {"max_residual", residual_json(r.max_residual)},
              {"pass", r.pass},
              {"failures", std::move(failures)}};
}

}  // namespace sharp::suites
