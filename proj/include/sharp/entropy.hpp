#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "sharp/error.hpp"
#include "sharp/purification.hpp"
#include "sharp/random.hpp"
#include "sharp/sampling.hpp"
#include "sharp/spectral.hpp"
#include "sharp/statespace.hpp"

namespace sharp {

using Distribution = std::vector<double>;

inline constexpr double kMajorizationTol = 1e-9;

namespace detail {

inline double log_in(double x, double base) {
  return base == std::numbers::e ? std::log(x) : std::log(x) / std::log(base);
}

inline Distribution sorted_desc(Distribution p, std::size_t length) {
  p.resize(std::max(p.size(), length), 0.0);
  std::sort(p.begin(), p.end(), std::greater<>());
  return p;
}

}  // namespace detail

/// min_k (sum_{i<=k} q_i - sum_{i<=k} p_i) over sorted, zero-padded vectors.
/// Non-negative iff p is majorized by q.
inline double majorization_slack(const Distribution& q, const Distribution& p) {
  const std::size_t n = std::max(p.size(), q.size());
  const Distribution qs = detail::sorted_desc(q, n);
  const Distribution ps = detail::sorted_desc(p, n);
  const double tq = std::accumulate(qs.begin(), qs.end(), 0.0);
  const double tp = std::accumulate(ps.begin(), ps.end(), 0.0);
  if (std::abs(tq - tp) > kMajorizationTol)
    throw Error(Errc::not_comparable, "totals differ: " + std::to_string(tq) + " vs " + std::to_string(tp));
  double slack = std::numeric_limits<double>::infinity();
  double sq = 0.0, sp = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    sq += qs[k];
    sp += ps[k];
    slack = std::min(slack, sq - sp);
  }
  return n > 1 ? slack : 0.0;
}

/// q majorizes p, i.e. p is majorized by q.
inline bool majorizes(const Distribution& q, const Distribution& p, double tol = kMajorizationTol) {
  return majorization_slack(q, p) >= -tol;
}

inline bool is_majorized_by(const Distribution& p, const Distribution& q, double tol = kMajorizationTol) {
  return majorizes(q, p, tol);
}

inline double shannon(const Distribution& p, double base = 2.0) {
  double h = 0.0;
  for (double x : p)
    if (x > 0.0) h -= x * detail::log_in(x, base);
  return h;
}

/// H_alpha; alpha = 1 is Shannon, alpha = 0 the log of the support size,
/// alpha = inf -log max p.
inline double renyi(const Distribution& p, double alpha, double base = 2.0) {
  if (!(alpha >= 0.0)) throw Error(Errc::invalid_order, "Renyi order must be >= 0");
  if (std::abs(alpha - 1.0) < 1e-12) return shannon(p, base);
  if (alpha == 0.0) {
    const auto rank = std::count_if(p.begin(), p.end(), [](double x) { return x > kSupportTol; });
    return detail::log_in(static_cast<double>(rank), base);
  }
  if (std::isinf(alpha)) return -detail::log_in(*std::max_element(p.begin(), p.end()), base);
  double s = 0.0;
  for (double x : p)
    if (x > 0.0) s += std::pow(x, alpha);
  return detail::log_in(s, base) / (1.0 - alpha);
}

/// Schur-concave function on probability vectors of any length.
struct SchurConcaveFunction {
  std::string name;
  std::function<double(const Distribution&)> f;
  bool reducible = true;
  bool additive = false;

  double operator()(const Distribution& p) const { return f(p); }

  static SchurConcaveFunction shannon_entropy(double base = 2.0) {
    return {"shannon", [base](const Distribution& p) { return shannon(p, base); }, true, true};
  }
  static SchurConcaveFunction renyi_entropy(double alpha, double base = 2.0) {
    if (!(alpha >= 0.0)) throw Error(Errc::invalid_order, "Renyi order must be >= 0");
    return {"renyi-" + std::to_string(alpha), [alpha, base](const Distribution& p) { return renyi(p, alpha, base); },
            true, true};
  }
  /// V(p) = (1/d)(1 - sum p_i^2); Schur-concave but sensitive to appended zeros.
  static SchurConcaveFunction v_function() {
    return {"V",
            [](const Distribution& p) {
              double s = 0.0;
              for (double x : p) s += x * x;
              return (1.0 - s) / static_cast<double>(p.size());
            },
            false, false};
  }
};

inline double shannon_vn(const State& rho, double base = 2.0) { return shannon(spectrum(rho), base); }

inline double renyi(const State& rho, double alpha, double base = 2.0) {
  if (!(alpha >= 0.0)) throw Error(Errc::invalid_order, "Renyi order must be >= 0");
  return renyi(spectrum(rho), alpha, base);
}

inline double monotone(const SchurConcaveFunction& f, const State& rho) { return f(spectrum(rho)); }

/// S(rho || sigma) = sum_i p_i log p_i - sum_j (beta_j^dagger|rho) log q_j with
/// sigma = sum_j q_j beta_j; +inf when rho has weight above 1e-10 on the
/// kernel of sigma. Natural log unless a base is given.
inline double kl_divergence(const State& rho, const State& sigma, double base = std::numbers::e) {
  require_same_system(rho.system(), sigma.system());
  const auto ds = diagonalize(sigma);
  const double lb = base == std::numbers::e ? 1.0 : std::log(base);
  double cross = 0.0;
  double leaked = 0.0;
  for (std::size_t j = 0; j < ds.eigenstates.size(); ++j) {
    const double w = pair(ds.eigenstates[j], rho);
    if (ds.eigenvalues[j] <= 1e-10) {
      leaked += w;
      continue;
    }
    cross += w * std::log(ds.eigenvalues[j]);
  }
  if (leaked > 1e-10) return std::numeric_limits<double>::infinity();
  double self = 0.0;
  for (double p : spectrum(rho))
    if (p > 0.0) self += p * std::log(p);
  return (self - cross) / lb;
}

inline double mutual_information(const State& rho_ab, double base = 2.0) {
  if (!rho_ab.system().is_composite())
    throw Error(Errc::not_a_composite, "mutual information needs a composite system");
  return shannon_vn(marginal(rho_ab, Keep::a), base) + shannon_vn(marginal(rho_ab, Keep::b), base) -
         shannon_vn(rho_ab, base);
}

struct MonotoneEstimate {
  double estimate = 0.0;     // smallest f over the samples (eigenbasis included)
  double spectral = 0.0;     // monotone(f, rho)
  double min_gap = 0.0;      // min over samples of f(sample) - spectral
  double eigen_gap = 0.0;    // |f(eigenbasis) - spectral|
  std::size_t achiever = 0;  // sample index of the estimate; 0 is the eigenbasis
  std::size_t samples = 0;
};

namespace detail {

inline void require_reducible(const SchurConcaveFunction& f) {
  if (!f.reducible) throw Error(Errc::inapplicable_function, f.name + " is not reducible");
}

inline void record(MonotoneEstimate& e, std::size_t index, double value) {
  e.min_gap = index == 0 ? value - e.spectral : std::min(e.min_gap, value - e.spectral);
  if (index == 0 || value < e.estimate) {
    e.estimate = value;
    e.achiever = index;
  }
  ++e.samples;
}

/// Outcome distribution of a test on rho.
inline Distribution outcome_distribution(const std::vector<Effect>& test, const State& rho) {
  Distribution q;
  for (const auto& a : test) q.push_back(std::max(0.0, pair(a, rho)));
  return q;
}

}  // namespace detail

/// Sampled infimum of f(q), q_i = (a_i|rho), over pure observation-tests. Sample
/// 0 is the eigenbasis measurement; the others alternate between random
/// maximal sets (sharp tests) and random rank-one refinements.
inline MonotoneEstimate measurement_monotone_estimate(const SchurConcaveFunction& f, const State& rho,
                                                      std::size_t trials, std::uint64_t seed) {
  detail::require_reducible(f);
  MonotoneEstimate e;
  const auto diag = diagonalize(rho);
  e.spectral = f(diag.eigenvalues);
  const double eig = f(detail::outcome_distribution(pure_sharp_measurement(diag.eigenstates), rho));
  e.eigen_gap = std::abs(eig - e.spectral);
  detail::record(e, 0, eig);
  for (std::size_t t = 1; t <= trials; ++t) {
    Rng rng = make_rng(seed, stream_id("measurement-monotone"), t);
    const auto test = t % 2 ? pure_sharp_measurement(random_maximal_set(rho.system(), rng))
                            : random_pure_test(rho.system(), rng);
    detail::record(e, t, f(detail::outcome_distribution(test, rho)));
  }
  return e;
}

/// Sampled infimum of f(pi) over pure-state decompositions rho = sum_k pi_k psi_k,
/// obtained by purifying rho and measuring a random pure test on the partner.
/// Sample 0 is the diagonal decomposition.
inline MonotoneEstimate preparation_monotone_estimate(const SchurConcaveFunction& f, const State& rho,
                                                      std::size_t trials, std::uint64_t seed) {
  detail::require_reducible(f);
  MonotoneEstimate e;
  const auto diag = diagonalize(rho);
  e.spectral = f(diag.eigenvalues);
  e.eigen_gap = 0.0;
  detail::record(e, 0, e.spectral);
  const Purification pur = purify(rho);
  for (std::size_t t = 1; t <= trials; ++t) {
    Rng rng = make_rng(seed, stream_id("preparation-monotone"), t);
    const auto test = t % 2 ? pure_sharp_measurement(random_maximal_set(pur.partner, rng))
                            : random_pure_test(pur.partner, rng);
    Distribution prior;
    for (const auto& b : test) prior.push_back(conditional(pur.state, Keep::a, b).trace());
    detail::record(e, t, f(prior));
  }
  return e;
}

/// Pure-state decomposition induced on the first factor by a test on the
/// partner: the conditional states Tr_B[(I (x) b_k) Psi] with their weights.
inline std::vector<std::pair<double, State>> induced_ensemble(const Purification& pur,
                                                              const std::vector<Effect>& partner_test) {
  std::vector<std::pair<double, State>> out;
  for (const auto& b : partner_test) {
    State c = conditional(pur.state, Keep::a, b);
    out.emplace_back(c.trace(), std::move(c));
  }
  return out;
}

struct ReducibilityReport {
  double v_two = 0.0;     // V(1/2, 1/2)
  double v_three = 0.0;   // V(1/2, 1/2, 0)
  double shannon_two = 0.0;
  double shannon_three = 0.0;
  bool v_reducible = false;
  bool shannon_reducible = false;
};

inline ReducibilityReport reducibility_counterexample() {
  const Distribution p{0.5, 0.5};
  const Distribution pt{0.5, 0.5, 0.0};
  const auto v = SchurConcaveFunction::v_function();
  ReducibilityReport r;
  r.v_two = v(p);
  r.v_three = v(pt);
  r.shannon_two = shannon(p);
  r.shannon_three = shannon(pt);
  r.v_reducible = r.v_two == r.v_three;
  r.shannon_reducible = r.shannon_two == r.shannon_three;
  return r;
}

}  // namespace sharp
