// Acceptance checks: one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "sharp/sharp.hpp"

using namespace sharp;

namespace {

struct Line {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Line()>& check) {
  Line l;
  try {
    l = check();
  } catch (const std::exception& e) {
    l = {false, std::string("exception: ") + e.what()};
  }
  if (!l.pass) ++failures;
  std::printf("%s [%d] %s: %s\n", l.pass ? "PASS" : "FAIL", id, name.c_str(), l.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double pos(double x) { return std::isnan(x) ? std::numeric_limits<double>::infinity() : std::max(0.0, x); }

double list_gap(std::vector<double> a, std::vector<double> b) {
  const std::size_t n = std::max(a.size(), b.size());
  a.resize(n, 0.0);
  b.resize(n, 0.0);
  std::sort(a.begin(), a.end(), std::greater<>());
  std::sort(b.begin(), b.end(), std::greater<>());
  double r = 0.0;
  for (std::size_t i = 0; i < n; ++i) r = std::max(r, std::abs(a[i] - b[i]));
  return r;
}

std::vector<SystemDescriptor> bipartites() {
  return {io::parse_theory("qubit*qubit"),        io::parse_theory("qubit*qutrit"),
          io::parse_theory("quantum:3*quantum:4"), io::parse_theory("real:2*real:3"),
          io::parse_theory("cbit*cobit"),         io::parse_theory("classical:3*coherent:3"),
          io::parse_theory("classical:2*coherent:3"), io::parse_theory("qubit*cbit")};
}

State cbit_state(double p0) {
  return State(SystemDescriptor::classical(2), {Matrix::Constant(1, 1, p0), Matrix::Constant(1, 1, 1.0 - p0)});
}

Line diagonalization_oracle() {
  double worst_eig = 0.0, worst_rec = 0.0, worst_time = 0.0;
  std::string slowest;
  for (const auto& t : suites::default_theories()) {
    Rng rng = make_rng(101, stream_id(t.label()));
    const auto t0 = std::chrono::steady_clock::now();
    for (int k = 0; k < 1000; ++k) {
      const State rho = k % 4 == 1 ? random_state(t, rng, 1 + uniform_index(rng, t.dim())) : random_state(t, rng);
      const auto d = diagonalize(rho);
      const Matrix dense = oracle::dense(rho);
      worst_eig = std::max(worst_eig, list_gap(d.eigenvalues, oracle::eigenvalues(dense)));
      worst_rec = std::max(worst_rec, (oracle::dense(d.reconstruct()) - dense).norm());
    }
    const double s = seconds_since(t0);
    if (s > worst_time) {
      worst_time = s;
      slowest = t.label();
    }
  }
  return {worst_eig <= 1e-9 && worst_rec <= 1e-9 && worst_time < 5.0,
          "19 theories x 1000 states, max eigenvalue error " + fmt(worst_eig) + ", max reconstruction error " +
              fmt(worst_rec) + ", slowest theory " + slowest + " " + fmt(worst_time) + " s"};
}

Line invariant_spectrum() {
  double worst = 0.0;
  for (const auto& t : suites::default_theories()) {
    const auto d = diagonalize(invariant_state(t));
    if (d.eigenvalues.size() != t.dim()) return {false, t.label() + " returned the wrong number of eigenvalues"};
    for (double p : d.eigenvalues) worst = std::max(worst, std::abs(p - 1.0 / static_cast<double>(t.dim())));
  }
  return {worst <= 1e-12, "max |lambda - 1/d| " + fmt(worst)};
}

Line double_stochasticity() {
  double worst = 0.0, most_negative = 0.0;
  for (const auto& t : suites::default_theories()) {
    Rng rng = make_rng(103, stream_id(t.label()));
    for (int k = 0; k < 100; ++k) {
      const RealMatrix m = transition_matrix(random_maximal_set(t, rng), random_maximal_set(t, rng));
      most_negative = std::min(most_negative, m.minCoeff());
      for (Eigen::Index i = 0; i < m.rows(); ++i)
        worst = std::max({worst, std::abs(m.row(i).sum() - 1.0), std::abs(m.col(i).sum() - 1.0)});
    }
  }
  return {worst <= 1e-9 && most_negative >= -1e-9,
          "100 pairs per theory, max |row/column sum - 1| " + fmt(worst) + ", min entry " + fmt(most_negative)};
}

Line schmidt_balance() {
  Rng rng = make_rng(104);
  const auto systems = bipartites();
  double bio = 0.0, spec = 0.0, maxgap = 0.0;
  for (int k = 0; k < 500; ++k) {
    const auto& s = systems[static_cast<std::size_t>(k) % systems.size()];
    const State psi = random_pure(s, rng).state();
    const auto sd = schmidt(psi);
    for (std::size_t i = 0; i < sd.rank; ++i)
      for (std::size_t j = 0; j < sd.rank; ++j)
        bio = std::max(bio, std::abs(pair(tensor(sd.a[i], sd.b[j]), psi) - (i == j ? sd.p[i] : 0.0)));
    const State ra = marginal(psi, Keep::a), rb = marginal(psi, Keep::b);
    spec = std::max(spec, list_gap(spectrum(ra), spectrum(rb)));
    maxgap = std::max(maxgap, std::abs(max_eigenpair(ra).p - max_eigenpair(rb).p));
  }
  return {bio <= 1e-9 && spec <= 1e-9 && maxgap <= 1e-9,
          "500 pure states on 8 composites, biorthogonality " + fmt(bio) + ", marginal spectra " + fmt(spec) +
              ", max eigenvalues " + fmt(maxgap)};
}

Line klein() {
  Rng rng = make_rng(105);
  const auto theories = suites::default_theories();
  double min_kl = std::numeric_limits<double>::infinity(), self = 0.0, worst_close = 0.0;
  int close = 0;
  for (int k = 0; k < 1000; ++k) {
    const auto& t = theories[static_cast<std::size_t>(k) % theories.size()];
    const State rho = random_state(t, rng);
    State sigma = random_state(t, rng);
    if (k % 4 == 3) {
      // Near pairs exercise the small-divergence implication.
      const double eps = std::pow(10.0, -uniform(rng, 4.0, 9.0));
      sigma = combine<Role::state, Role::state>({{1.0 - eps, &rho}, {eps, &sigma}}, t);
    }
    const double kl = kl_divergence(rho, sigma);
    min_kl = std::min(min_kl, kl);
    self = std::max(self, std::abs(kl_divergence(rho, rho)));
    if (kl <= 1e-10) {
      ++close;
      worst_close = std::max(worst_close, distance(rho, sigma));
    }
  }
  return {min_kl >= -1e-12 && self <= 1e-11 && worst_close <= 1e-4,
          "1000 pairs, min S(rho||sigma) " + fmt(min_kl) + ", max |S(rho||rho)| " + fmt(self) + ", " +
              std::to_string(close) + " pairs with S <= 1e-10, max distance among them " + fmt(worst_close)};
}

Line subadditivity() {
  Rng rng = make_rng(106);
  const auto systems = bipartites();
  double sub = 0.0, tri = 0.0, prod = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const auto& s = systems[static_cast<std::size_t>(k) % systems.size()];
    const State ab = random_state(s, rng, k % 3 == 0 ? 1 + uniform_index(rng, 3) : 0);
    const double sa = shannon_vn(marginal(ab, Keep::a)), sb = shannon_vn(marginal(ab, Keep::b)), h = shannon_vn(ab);
    sub = std::max(sub, pos(h - sa - sb));
    tri = std::max(tri, pos(std::abs(sa - sb) - h));
  }
  for (int k = 0; k < 200; ++k) {
    const auto& s = systems[static_cast<std::size_t>(k) % systems.size()];
    const State ab = tensor(random_state(s.factor(0), rng), random_state(s.factor(1), rng));
    prod = std::max(prod, std::abs(mutual_information(ab)));
  }
  return {sub <= 1e-9 && tri <= 1e-9 && prod <= 1e-10,
          "1000 states, subadditivity violation " + fmt(sub) + ", triangle violation " + fmt(tri) +
              "; 200 products, max |I(A:B)| " + fmt(prod)};
}

Line majorization() {
  Rng rng = make_rng(107);
  const auto theories = suites::default_theories();
  double rare = std::numeric_limits<double>::infinity(), test = rare;
  for (int k = 0; k < 1000; ++k) {
    const auto& t = theories[static_cast<std::size_t>(k) % theories.size()];
    const State rho = random_state(t, rng);
    rare = std::min(rare, majorization_slack(spectrum(rho), spectrum(apply(random_rare(t, 2 + k % 3, rng), rho))));
    Distribution q;
    for (const auto& a : random_pure_test(t, rng)) q.push_back(pair(a, rho));
    test = std::min(test, majorization_slack(spectrum(rho), q));
  }
  return {rare >= -1e-9 && test >= -1e-9,
          "1000 RaRe trials min slack " + fmt(rare) + ", 1000 pure-test trials min slack " + fmt(test)};
}

Line monotones() {
  Rng rng = make_rng(108);
  const auto theories = suites::default_theories();
  double undercut = 0.0, eig = 0.0;
  std::size_t samples = 0;
  for (const auto& f : {SchurConcaveFunction::shannon_entropy(), SchurConcaveFunction::renyi_entropy(2.0)}) {
    for (int k = 0; k < 50; ++k) {
      const auto& t = theories[static_cast<std::size_t>(k) % theories.size()];
      const State rho = random_state(t, rng, k % 2 ? 0 : 1 + uniform_index(rng, t.dim()));
      const auto m = measurement_monotone_estimate(f, rho, 10, rng());
      const auto p = preparation_monotone_estimate(f, rho, 10, rng());
      undercut = std::max({undercut, pos(-m.min_gap), pos(-p.min_gap)});
      eig = std::max(eig, m.eigen_gap);
      samples += m.samples + p.samples - 2;
    }
  }
  const auto r = reducibility_counterexample();
  const bool v_exact = r.v_two == 0.25 && r.v_three == 1.0 / 6.0;
  return {undercut <= 1e-9 && eig <= 1e-10 && v_exact && samples >= 500,
          std::to_string(samples) + " sampled tests/decompositions, max undercut " + fmt(undercut) +
              ", eigenbasis gap " + fmt(eig) + ", V = " + fmt(r.v_two) + " vs " + fmt(r.v_three)};
}

Line gibbs() {
  Rng rng = make_rng(109);
  const auto theories = suites::default_theories();
  double ident = 0.0, trip = 0.0, gap = std::numeric_limits<double>::infinity(), kl = 0.0;
  std::size_t samples = 0;
  for (int k = 0; k < 100; ++k) {
    const auto& t = theories[static_cast<std::size_t>(k) % theories.size()];
    const Hamiltonian h(random_hamiltonian(t, rng));
    if (h.fully_degenerate()) continue;
    const double beta = uniform(rng, -5.0, 5.0);
    const double e = energy_of_beta(h, beta);
    ident = std::max(ident, std::abs(natural_entropy(gibbs_state(h, beta)) - (beta * e + log_partition(h, beta))));
    trip = std::max(trip, std::abs(beta_of_energy(h, e) - beta));
    const double target = h.e_min() + uniform(rng, 0.1, 0.9) * h.spread();
    const auto m = max_entropy_check(h, target, 5, rng());
    gap = std::min(gap, m.min_gap);
    kl = std::max(kl, m.max_identity_residual);
    samples += m.samples;
  }
  return {ident <= 1e-10 && trip <= 1e-8 && gap >= -1e-9 && kl <= 1e-9 && samples >= 500,
          "S = beta E + ln Z residual " + fmt(ident) + ", beta round trip " + fmt(trip) + "; " +
              std::to_string(samples) + " constrained samples, min S(gibbs) - S(rho) " + fmt(gap) +
              ", max |gap - KL| " + fmt(kl)};
}

Line landauer() {
  Rng rng = make_rng(110);
  const auto sys = SystemDescriptor::quantum(2), env = SystemDescriptor::quantum(4);
  const auto joint = compose(sys, env);
  double residual = 0.0, terms = std::numeric_limits<double>::infinity(), bound = terms;
  const auto t0 = std::chrono::steady_clock::now();
  for (int k = 0; k < 500; ++k) {
    const Hamiltonian h(random_hamiltonian(env, rng));
    const double beta = uniform(rng, 0.1, 5.0);
    const auto r = landauer_report(random_state(sys, rng), h, beta, random_reversible(joint, rng));
    residual = std::max(residual, r.residual);
    terms = std::min({terms, r.mutual_info, r.divergence});
    bound = std::min(bound, r.bound_slack);
  }
  const double s = seconds_since(t0);
  return {residual <= 1e-8 && terms >= -1e-9 && bound >= -1e-8 && s < 10.0,
          "500 trials, equality residual " + fmt(residual) + ", min of I and D " + fmt(terms) +
              ", min bound slack " + fmt(bound) + ", " + fmt(s) + " s"};
}

Line naimark_check() {
  Rng rng = make_rng(111);
  double orth = 0.0, eff = 0.0;
  for (int k = 0; k < 100; ++k) {
    const auto s = SystemDescriptor::quantum(2 + static_cast<std::size_t>(k % 2));
    const auto d = naimark(random_test(s, 2 + uniform_index(rng, 3), rng));
    orth = std::max(orth, d.orthogonality_residual);
    eff = std::max(eff, d.effect_residual);
  }
  return {orth <= 1e-9 && eff <= 1e-9,
          "100 tests, max ||Pi_i Pi_j - delta_ij Pi_i|| " + fmt(orth) + ", max effect error " + fmt(eff)};
}

Line disturbance_and_protocol() {
  const auto theories = suites::default_theories();
  double fix = 0.0, excess = 0.0;
  for (int k = 0; k < 200; ++k) {
    Rng rng = make_rng(112, 0, static_cast<std::uint64_t>(k));
    const auto& t = theories[static_cast<std::size_t>(k) % theories.size()];
    auto set = random_maximal_set(t, rng);
    std::shuffle(set.begin(), set.end(), rng);
    const std::size_t n = 1 + uniform_index(rng, t.dim());
    const std::vector<PureVector> supp(set.begin(), set.begin() + static_cast<std::ptrdiff_t>(n));
    const std::vector<PureVector> rest(set.begin() + static_cast<std::ptrdiff_t>(n), set.end());
    const Effect p = projector_onto(t, supp);
    const Effect q = random_effect_on(t, rest, rng);
    const Effect a = combine<Role::effect, Role::effect>({{1.0, &p}, {1.0, &q}}, t);
    const Channel tr = minimally_disturbing(a, random_state_on(t, supp, rng));
    const State inside = random_state_on(t, supp, rng);
    fix = std::max(fix, distance(apply(tr, inside), inside));
    const State any = random_state(t, rng);
    excess = std::max(excess, apply(tr, any).trace() - pair(a, any));
  }
  double protocol = 0.0;
  for (int k = 0; k < 200; ++k) {
    const auto& t = theories[static_cast<std::size_t>(k) % theories.size()];
    Rng rng = make_rng(113, 0, static_cast<std::uint64_t>(k));
    protocol = std::max(protocol, suites::detail::distinguishability(t, rng, static_cast<std::size_t>(k)).residual);
  }
  return {fix <= 1e-9 && excess <= 1e-12 && protocol <= 1e-9,
          "200 transformations, max ||T(sigma) - sigma|| " + fmt(fix) + ", max (u|T|sigma) - (a|sigma) " +
              fmt(excess) + "; 200 protocols, max |(e_i|rho_j) - delta_ij| " + fmt(protocol)};
}

Line extended_classical_purification() {
  const auto p = purify(cbit_state(0.3));
  double amp = std::abs(p.vector.amplitude(0) - std::sqrt(0.3)) + std::abs(p.vector.amplitude(3) - std::sqrt(0.7)) +
               std::abs(p.vector.amplitude(1)) + std::abs(p.vector.amplitude(2));
  const double marg = distance(marginal(p.state, Keep::a), cbit_state(0.3));
  Matrix x(2, 2);
  x << 0, 1, 1, 0;
  const State flipped = apply(local_unitary(p.composite, Keep::b, x), p.state);
  const auto m = purifications_equivalent(p.state, flipped);
  const double wit = m.witness ? (m.witness->kraus().front() - x).norm() : std::numeric_limits<double>::infinity();
  return {amp <= 1e-12 && marg <= 1e-12 && m.equivalent && wit <= 1e-12,
          "amplitude error " + fmt(amp) + ", marginal error " + fmt(marg) + ", flipped copy " +
              (m.equivalent ? "equivalent" : "not equivalent") + ", witness distance from X " + fmt(wit)};
}

Line local_indistinguishability() {
  const auto s = io::parse_theory("cbit*cobit");
  Matrix phase = Matrix::Zero(2, 2);
  phase(0, 0) = std::exp(cplx(0, -std::numbers::pi / 2));
  phase(1, 1) = std::exp(cplx(0, std::numbers::pi / 2));
  const Channel u = local_unitary(s, Keep::b, phase);
  Rng rng = make_rng(114);
  double worst = 0.0;
  std::vector<State> products;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      products.push_back(tensor(PureVector::basis(s.factor(0), i).state(), PureVector::basis(s.factor(1), j).state()));
  for (int k = 0; k < 200; ++k)
    products.push_back(tensor(random_state(s.factor(0), rng), random_state(s.factor(1), rng)));
  for (const auto& rho : products) {
    const State out = apply(u, rho);
    worst = std::max({worst, distance(marginal(out, Keep::a), marginal(rho, Keep::a)),
                      distance(marginal(out, Keep::b), marginal(rho, Keep::b))});
  }
  const State psi = purify(cbit_state(0.3)).state;
  const double moved = distance(apply(u, psi), psi);
  return {worst <= 1e-12 && moved > 1e-6,
          std::to_string(products.size()) + " product states, max marginal change " + fmt(worst) +
              ", entangled state moved by " + fmt(moved)};
}

}  // namespace

int main() {
  report(1, "diagonalization matches dense oracle", diagonalization_oracle);
  report(2, "invariant state has uniform spectrum", invariant_spectrum);
  report(3, "transition matrices are doubly stochastic", double_stochasticity);
  report(4, "Schmidt decomposition and probability balance", schmidt_balance);
  report(5, "Klein inequality", klein);
  report(6, "subadditivity, triangle inequality, product equality", subadditivity);
  report(7, "RaRe and measurement majorization", majorization);
  report(8, "measurement and preparation monotones equal the spectral monotone", monotones);
  report(9, "Gibbs state maximizes entropy", gibbs);
  report(10, "Landauer equality and bound", landauer);
  report(11, "Naimark dilation", naimark_check);
  report(12, "minimally disturbing transformation and distinguishability protocol", disturbance_and_protocol);
  report(13, "extended classical purification", extended_classical_purification);
  report(14, "local indistinguishability of a cobit phase", local_indistinguishability);
  std::printf("%d of 14 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
