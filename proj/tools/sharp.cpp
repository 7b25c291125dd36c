// Command-line front end over JSON inputs and outputs.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <iterator>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sharp/sharp.hpp"

namespace {

using sharp::io::json;

struct Globals {
  std::uint64_t seed = 42;
  std::size_t trials = 100;
  std::optional<double> tol;
  std::string theory;
  std::string format = "json";
  std::string output;
  std::string log_base = "2";
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json read_json(const std::string& path) {
  std::string text;
  if (path.empty() || path == "-") {
    text.assign(std::istreambuf_iterator<char>(std::cin), {});
  } else {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open " + path);
    text.assign(std::istreambuf_iterator<char>(in), {});
  }
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw sharp::Error(sharp::Errc::schema_error,
                       "at /: malformed JSON in " + (path.empty() ? std::string("stdin") : path) + ": " + e.what());
  }
}

double parse_base(const std::string& s) {
  if (s == "e") return std::numbers::e;
  try {
    std::size_t used = 0;
    const double b = std::stod(s, &used);
    if (used == s.size() && b > 0.0 && b != 1.0) return b;
  } catch (const std::exception&) {
  }
  throw UsageError("log base must be a positive number other than 1, or \"e\"");
}

json base_json(const std::string& s) {
  if (s == "e") return "e";
  return parse_base(s);
}

json finite_or_string(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  return x;
}

std::optional<sharp::SystemDescriptor> theory_of(const Globals& g) {
  if (g.theory.empty()) return std::nullopt;
  return sharp::io::parse_theory(g.theory);
}

sharp::State read_state(const std::string& path, const Globals& g, const std::string& where = "") {
  const json j = read_json(path);
  const auto sys = theory_of(g);
  return sharp::io::operator_from_json<sharp::Role::state>(j, where, sys ? &*sys : nullptr);
}

void emit(const json& j, const Globals& g) {
  const std::string text = g.format == "pretty" ? j.dump(2) : j.dump();
  if (g.output.empty() || g.output == "-") {
    std::cout << text << '\n';
  } else {
    std::ofstream out(g.output, std::ios::app);
    if (!out) throw UsageError("cannot write " + g.output);
    out << text << '\n';
  }
}

// ---- subcommands -----------------------------------------------------------------

int cmd_diagonalize(const Globals& g, const std::string& input, bool randomize) {
  const auto rho = read_state(input, g);
  const auto d = randomize ? sharp::diagonalize(rho, g.seed) : sharp::diagonalize(rho);
  emit(sharp::io::to_json(d), g);
  return 0;
}

int cmd_recompose(const Globals& g, const std::string& input) {
  emit(sharp::io::to_json(sharp::io::recompose_from_json(read_json(input))), g);
  return 0;
}

int cmd_schmidt(const Globals& g, const std::string& input) {
  const auto psi = read_state(input, g);
  emit(sharp::io::to_json(sharp::schmidt(psi), psi.system()), g);
  return 0;
}

int cmd_entropy(const Globals& g, const std::string& input, std::optional<double> alpha, const std::string& other) {
  const double base = parse_base(g.log_base);
  const auto rho = read_state(input, g);
  const auto d = sharp::diagonalize(rho);
  json out{{"system", sharp::io::to_json(rho.system())}, {"eigenvalues", d.eigenvalues}, {"log_base", base_json(g.log_base)}};
  if (alpha) {
    out["alpha"] = finite_or_string(*alpha);
    out["entropy"] = sharp::renyi(d.eigenvalues, *alpha, base);
  } else {
    out["entropy"] = sharp::shannon(d.eigenvalues, base);
  }
  if (!other.empty()) {
    const auto sigma = read_state(other, g, "");
    out["divergence"] = finite_or_string(sharp::kl_divergence(rho, sigma, base));
  }
  emit(out, g);
  return 0;
}

int cmd_gibbs(const Globals& g, const std::string& hpath, std::optional<double> beta, std::optional<double> energy) {
  if (beta.has_value() == energy.has_value()) throw UsageError("gibbs needs exactly one of --beta or --energy");
  const json j = read_json(hpath);
  const auto sys = theory_of(g);
  const sharp::Hamiltonian h(sharp::io::operator_from_json<sharp::Role::observable>(j, "", sys ? &*sys : nullptr));
  const double b = beta ? *beta : sharp::beta_of_energy(h, *energy);
  const auto rho = sharp::gibbs_state(h, b);
  json out = sharp::io::to_json(rho);
  out["beta"] = finite_or_string(b);
  out["energy"] = sharp::energy_of_beta(h, b);
  if (std::isfinite(b)) out["log_partition"] = sharp::log_partition(h, b);
  out["entropy"] = sharp::natural_entropy(rho);
  out["log_base"] = "e";
  emit(out, g);
  return 0;
}

int cmd_landauer(const Globals& g, double beta, std::size_t env_dim, const std::string& state_path,
                 const std::string& h_path) {
  const auto system = theory_of(g).value_or(sharp::io::parse_theory("qubit"));
  const double tol = g.tol.value_or(1e-8);
  std::optional<sharp::State> fixed_state;
  std::optional<sharp::Hamiltonian> fixed_h;
  if (!state_path.empty())
    fixed_state = sharp::io::operator_from_json<sharp::Role::state>(read_json(state_path), "", &system);
  sharp::SystemDescriptor env = sharp::SystemDescriptor::quantum(env_dim, system.field());
  if (!h_path.empty()) {
    fixed_h.emplace(sharp::io::operator_from_json<sharp::Role::observable>(read_json(h_path)));
    env = fixed_h->system();
  }
  const auto joint = sharp::compose(system, env);
  json rows = json::array();
  double max_residual = 0.0, min_slack = std::numeric_limits<double>::infinity(), min_term = min_slack;
  for (std::size_t t = 0; t < g.trials; ++t) {
    auto rng = sharp::make_rng(g.seed, sharp::stream_id("cli-landauer"), t);
    const sharp::State rho_s = fixed_state ? *fixed_state : sharp::random_state(system, rng);
    const sharp::Hamiltonian h = fixed_h ? *fixed_h : sharp::Hamiltonian(sharp::random_hamiltonian(env, rng));
    const auto u = sharp::random_reversible(joint, rng);
    const auto r = sharp::landauer_report(rho_s, h, beta, u);
    max_residual = std::max(max_residual, r.residual);
    min_slack = std::min(min_slack, r.bound_slack);
    min_term = std::min({min_term, r.mutual_info, r.divergence});
    rows.push_back(json{{"trial", t},
                        {"energy_change", r.lhs},
                        {"kT", 1.0 / beta},
                        {"entropy_drop", r.entropy_drop},
                        {"mutual_information", r.mutual_info},
                        {"relative_entropy", r.divergence},
                        {"rhs", r.rhs},
                        {"residual", r.residual},
                        {"bound_slack", r.bound_slack}});
  }
  const bool pass = max_residual <= tol && min_slack >= -tol && min_term >= -tol;
  emit(json{{"system", system.label()},
            {"environment", env.label()},
            {"beta", beta},
            {"seed", g.seed},
            {"trials", g.trials},
            {"log_base", "e"},
            {"tol", tol},
            {"max_residual", max_residual},
            {"min_bound_slack", min_slack},
            {"min_nonnegative_term", min_term},
            {"pass", pass},
            {"terms", std::move(rows)}},
       g);
  return pass ? 0 : 1;
}

std::vector<sharp::Effect> read_effects(const json& j, const sharp::SystemDescriptor& sys, const std::string& key) {
  const json& arr = sharp::io::detail::member(j, key, "");
  if (!arr.is_array() || arr.empty()) sharp::io::detail::schema("/" + key, "expected a non-empty array");
  std::vector<sharp::Effect> out;
  for (std::size_t i = 0; i < arr.size(); ++i)
    out.push_back(sharp::io::operator_from_json<sharp::Role::effect>(arr[i], "/" + key + "/" + std::to_string(i), &sys));
  return out;
}

sharp::SystemDescriptor system_of(const json& j, const Globals& g) {
  if (auto t = theory_of(g); t && !(j.is_object() && j.contains("system"))) return *t;
  return sharp::io::descriptor_from_json(sharp::io::detail::member(j, "system", ""), "/system");
}

int cmd_naimark(const Globals& g, const std::string& input) {
  const json j = read_json(input);
  const auto sys = system_of(j, g);
  const auto test = read_effects(j, sys, "effects");
  const auto d = sharp::naimark(test);
  json projectors = json::array(), reproduced = json::array();
  for (const auto& p : d.projectors) projectors.push_back(sharp::io::matrix_json(p.kraus().front(), sys.field()));
  for (const auto& e : d.reproduced) reproduced.push_back(sharp::io::blocks_json(e));
  emit(json{{"system", sharp::io::to_json(sys)},
            {"ancilla", sharp::io::to_json(d.ancilla)},
            {"ancilla_state", sharp::io::to_json(d.ancilla_state)},
            {"unitary", sharp::io::matrix_json(d.unitary, sys.field())},
            {"projectors", std::move(projectors)},
            {"reproduced", std::move(reproduced)},
            {"orthogonality_residual", d.orthogonality_residual},
            {"effect_residual", d.effect_residual}},
       g);
  return 0;
}

int cmd_distinguish(const Globals& g, const std::string& input) {
  const json j = read_json(input);
  const auto sys = system_of(j, g);
  const json& arr = sharp::io::detail::member(j, "states", "");
  if (!arr.is_array() || arr.empty()) sharp::io::detail::schema("/states", "expected a non-empty array");
  std::vector<sharp::State> states;
  for (std::size_t i = 0; i < arr.size(); ++i)
    states.push_back(sharp::io::operator_from_json<sharp::Role::state>(arr[i], "/states/" + std::to_string(i), &sys));
  const auto effects = read_effects(j, sys, "effects");
  const auto t = sharp::distinguishability_protocol(states, effects);
  json out_effects = json::array(), table = json::array();
  for (const auto& e : t.effects) {
    out_effects.push_back(sharp::io::blocks_json(e));
    json row = json::array();
    for (const auto& s : states) row.push_back(sharp::pair(e, s));
    table.push_back(std::move(row));
  }
  emit(json{{"system", sharp::io::to_json(sys)},
            {"effects", std::move(out_effects)},
            {"probabilities", std::move(table)},
            {"residual", t.residual}},
       g);
  return 0;
}

int cmd_purify(const Globals& g, const std::string& input, const std::string& compare) {
  const auto rho = read_state(input, g);
  if (!compare.empty()) {
    // Input and comparand are both pure states on the same composite.
    const auto other = read_state(compare, g);
    const auto m = sharp::purifications_equivalent(rho, other);
    json out{{"equivalent", m.equivalent}, {"residual", m.residual}};
    if (m.witness) out["witness"] = sharp::io::to_json(*m.witness);
    emit(out, g);
    return 0;
  }
  const auto p = sharp::purify(rho);
  const auto back = sharp::marginal(p.state, sharp::Keep::a);
  emit(json{{"partner", sharp::io::to_json(p.partner)},
            {"composite", sharp::io::to_json(p.composite)},
            {"vector", sharp::io::to_json(p.vector)},
            {"state", sharp::io::to_json(p.state)},
            {"marginal_residual", sharp::distance(back, rho)}},
       g);
  return 0;
}

json merge_reports(const std::string& name, const std::vector<sharp::suites::SuiteReport>& reports) {
  json theories = json::array(), failures = json::array();
  double max_residual = 0.0;
  bool pass = true;
  for (const auto& r : reports) {
    const json one = sharp::suites::to_json(r);
    max_residual = std::max(max_residual, r.max_residual);
    pass = pass && r.pass;
    theories.push_back(json{{"theory", r.theory}, {"system", r.system}, {"max_residual", one["max_residual"]}, {"pass", r.pass}});
    for (auto f : one["failures"]) {
      f["theory"] = r.theory;
      failures.push_back(std::move(f));
    }
  }
  const auto& spec = sharp::suites::find_suite(name);
  return json{{"suite", name},
              {"theorem", spec.theorem},
              {"theory", "default"},
              {"trials", reports.empty() ? 0 : reports.front().trials},
              {"seed", reports.empty() ? 0 : reports.front().seed},
              {"tol", reports.empty() ? spec.tol : reports.front().tol},
              {"max_residual", sharp::suites::residual_json(max_residual)},
              {"pass", pass},
              {"theories", std::move(theories)},
              {"failures", std::move(failures)}};
}

int cmd_verify(const Globals& g, bool all, const std::string& suite, bool list) {
  namespace su = sharp::suites;
  if (list) {
    for (const auto& s : su::registry())
      emit(json{{"suite", s.name}, {"theorem", s.theorem}, {"module", s.module}, {"tol", s.tol}}, g);
    return 0;
  }
  if (all == !suite.empty()) throw UsageError("verify needs exactly one of --all or --suite");
  std::vector<std::string> names;
  if (all) {
    for (const auto& s : su::registry()) names.push_back(s.name);
  } else {
    su::find_suite(suite);
    names.push_back(suite);
  }
  const auto explicit_theory = theory_of(g);
  const auto theories = explicit_theory ? std::vector{*explicit_theory} : su::default_theories();
  bool pass = true;
  for (const auto& name : names) {
    std::vector<su::SuiteReport> reports;
    for (const auto& t : theories) {
      try {
        reports.push_back(su::run_suite(name, t, g.trials, g.seed, g.tol));
      } catch (const sharp::Error& e) {
        if (e.code() != sharp::Errc::unsupported) throw;
        if (explicit_theory) throw;
        std::cerr << "note: " << name << " skipped on " << t.label() << " (" << e.what() << ")\n";
      }
    }
    if (explicit_theory) {
      emit(su::to_json(reports.front()), g);
      pass = pass && reports.front().pass;
    } else {
      const json merged = merge_reports(name, reports);
      pass = pass && merged["pass"].get<bool>();
      emit(merged, g);
    }
  }
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical toolkit for sharp theories with purification"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "master seed")->capture_default_str();
  app.add_option("--trials", g.trials, "number of trials")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--tol", g.tol, "tolerance override")->check(CLI::PositiveNumber);
  app.add_option("--theory", g.theory, "preset, theory expression or descriptor JSON");
  app.add_option("--format", g.format, "output format")->check(CLI::IsMember({"json", "pretty"}))->capture_default_str();
  app.add_option("--log-base,--base", g.log_base, "logarithm base for entropies: a number or e")->capture_default_str();
  app.add_option("-o,--output", g.output, "output file (appended), default standard output");
  app.fallthrough();

  std::string input;
  auto add_input = [&input](CLI::App* sub) { sub->add_option("input", input, "input JSON file, default standard input"); };

  auto* diag = app.add_subcommand("diagonalize", "eigenvalues and eigenstates of a state");
  bool randomize = false;
  add_input(diag);
  diag->add_flag("--randomize", randomize, "pick eigenvectors in degenerate spaces at random from --seed");

  auto* recompose = app.add_subcommand("recompose", "state from a diagonalize record");
  add_input(recompose);

  auto* schmidt = app.add_subcommand("schmidt", "Schmidt decomposition of a pure bipartite state");
  add_input(schmidt);

  auto* entropy = app.add_subcommand("entropy", "Shannon-von Neumann or Renyi entropy of a state");
  std::optional<double> alpha;
  std::string divergence;
  add_input(entropy);
  entropy->add_option("--alpha", alpha, "Renyi order");
  entropy->add_option("--divergence", divergence, "second state; also report S(rho || sigma)");

  auto* gibbs = app.add_subcommand("gibbs", "Gibbs state of a Hamiltonian");
  std::string hamiltonian;
  std::optional<double> beta, energy;
  gibbs->add_option("--hamiltonian", hamiltonian, "Hamiltonian JSON, default standard input");
  gibbs->add_option("--beta", beta, "inverse temperature");
  gibbs->add_option("--energy", energy, "target mean energy");

  auto* landauer = app.add_subcommand("landauer", "itemized Landauer equality over random interactions");
  double lbeta = 1.0;
  std::size_t env_dim = 4;
  std::string lstate;
  std::string lham;
  landauer->add_option("--beta", lbeta, "inverse temperature")->check(CLI::PositiveNumber)->capture_default_str();
  landauer->add_option("--env-dim", env_dim, "environment dimension")->check(CLI::PositiveNumber)->capture_default_str();
  landauer->add_option("--state", lstate, "fixed system state JSON");
  landauer->add_option("--hamiltonian", lham, "fixed environment Hamiltonian JSON");

  auto* naimark = app.add_subcommand("naimark", "projective dilation of a quantum observation-test");
  add_input(naimark);

  auto* distinguish = app.add_subcommand("distinguish", "distinguishing test for a triangular family");
  add_input(distinguish);

  auto* verify = app.add_subcommand("verify", "run seeded verification suites");
  bool all = false, list = false;
  std::string suite;
  verify->add_flag("--all", all, "every suite");
  verify->add_option("--suite", suite, "one suite by name");
  verify->add_flag("--list", list, "list suites");

  auto* purify = app.add_subcommand("purify", "purification of a state");
  std::string compare;
  add_input(purify);
  purify->add_option("--compare", compare, "second purification; test equivalence with the input");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e, std::cerr, std::cerr);
    return 2;
  }

  try {
    if (*diag) return cmd_diagonalize(g, input, randomize);
    if (*recompose) return cmd_recompose(g, input);
    if (*schmidt) return cmd_schmidt(g, input);
    if (*entropy) return cmd_entropy(g, input, alpha, divergence);
    if (*gibbs) return cmd_gibbs(g, hamiltonian, beta, energy);
    if (*landauer) return cmd_landauer(g, lbeta, env_dim, lstate, lham);
    if (*naimark) return cmd_naimark(g, input);
    if (*distinguish) return cmd_distinguish(g, input);
    if (*verify) return cmd_verify(g, all, suite, list);
    if (*purify) return cmd_purify(g, input, compare);
  } catch (const sharp::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
