#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include <json.hpp>

using json = nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
};

std::string cli() {
  const char* p = std::getenv("SHARP_CLI");
  return p ? p : SHARP_CLI_PATH;
}

std::string data(const std::string& name) {
  const char* p = std::getenv("SHARP_DATA");
  return std::string(p ? p : SHARP_DATA_DIR) + "/" + name;
}

Run run(const std::string& args, const std::string& stdin_text = "") {
  std::string cmd = cli() + " " + args + " 2>/dev/null";
  std::string tmp;
  if (!stdin_text.empty()) {
    tmp = testing::TempDir() + "sharp_stdin.json";
    std::ofstream(tmp) << stdin_text;
    cmd += " < " + tmp;
  }
  FILE* f = popen(cmd.c_str(), "r");
  if (!f) return {-1, {}};
  std::string out;
  std::array<char, 4096> buf{};
  while (std::size_t n = fread(buf.data(), 1, buf.size(), f)) out.append(buf.data(), n);
  const int status = pclose(f);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

}  // namespace

TEST(Cli, DiagonalizeInvariantState) {
  std::ifstream in(data("chi4.json"));
  const std::string text((std::istreambuf_iterator<char>(in)), {});
  const auto r = run("diagonalize", text);
  ASSERT_EQ(r.code, 0);
  const json j = json::parse(r.out);
  ASSERT_EQ(j["eigenvalues"].size(), 4u);
  for (const auto& p : j["eigenvalues"]) EXPECT_NEAR(p.get<double>(), 0.25, 1e-15);
}

TEST(Cli, RecomposeRoundTrip) {
  const auto d = run("diagonalize " + data("qubit.json"));
  ASSERT_EQ(d.code, 0);
  const auto r = run("recompose", d.out);
  ASSERT_EQ(r.code, 0);
  std::ifstream in(data("qubit.json"));
  const json orig = json::parse(in);
  const json back = json::parse(r.out);
  const auto& a = orig["blocks"][0];
  const auto& b = back["blocks"][0];
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < 2; ++k) EXPECT_NEAR(a[i][k].get<double>(), b[i][k].get<double>(), 1e-9);
}

TEST(Cli, GibbsAtZeroBetaIsInvariant) {
  const auto r = run("gibbs --hamiltonian " + data("h.json") + " --beta 0");
  ASSERT_EQ(r.code, 0);
  const json j = json::parse(r.out);
  EXPECT_NEAR(j["blocks"][0][0][0].get<double>(), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(j["blocks"][0][4][0].get<double>(), 1.0 / 3.0, 1e-15);
  EXPECT_EQ(j["blocks"][0][1][0].get<double>(), 0.0);
}

TEST(Cli, GibbsEnergyRoundTrip) {
  const auto r = run("gibbs --hamiltonian " + data("h.json") + " --energy 0.8");
  ASSERT_EQ(r.code, 0);
  EXPECT_NEAR(json::parse(r.out)["energy"].get<double>(), 0.8, 1e-10);
  EXPECT_EQ(run("gibbs --hamiltonian " + data("h.json") + " --energy 9").code, 2);
  EXPECT_EQ(run("gibbs --hamiltonian " + data("h.json")).code, 2);
}

TEST(Cli, EntropyReportsBaseAndDivergence) {
  const auto r = run("entropy " + data("chi4.json") + " --base 2 --divergence " + data("chi4.json"));
  ASSERT_EQ(r.code, 0);
  const json j = json::parse(r.out);
  EXPECT_NEAR(j["entropy"].get<double>(), 2.0, 1e-12);
  EXPECT_NEAR(j["divergence"].get<double>(), 0.0, 1e-12);
  EXPECT_EQ(j["log_base"], 2.0);
  const auto e = run("entropy " + data("chi4.json") + " --log-base e --alpha 2");
  EXPECT_NEAR(json::parse(e.out)["entropy"].get<double>(), std::log(4.0), 1e-12);
}

TEST(Cli, PurifyCbit) {
  const auto r = run("purify " + data("cbit.json"));
  ASSERT_EQ(r.code, 0);
  const json j = json::parse(r.out);
  EXPECT_LT(j["marginal_residual"].get<double>(), 1e-12);
  EXPECT_EQ(j["partner"]["kind"], "coherent");
}

TEST(Cli, SchmidtOfPurification) {
  const auto p = run("purify " + data("qubit.json"));
  ASSERT_EQ(p.code, 0);
  const auto r = run("schmidt", json::parse(p.out)["state"].dump());
  ASSERT_EQ(r.code, 0);
  const json j = json::parse(r.out);
  EXPECT_EQ(j["rank"], 2);
  EXPECT_NEAR(j["p"][0].get<double>(), 0.8, 1e-12);
}

TEST(Cli, NaimarkAndUnsupported) {
  const auto r = run("naimark " + data("povm3.json"));
  ASSERT_EQ(r.code, 0);
  const json j = json::parse(r.out);
  EXPECT_LT(j["orthogonality_residual"].get<double>(), 1e-9);
  EXPECT_LT(j["effect_residual"].get<double>(), 1e-9);
  const auto bad = run("naimark", R"({"system":"cbit","effects":[[[1],[0]],[[0],[1]]]})");
  EXPECT_EQ(bad.code, 2);
}

TEST(Cli, Distinguish) {
  const auto r = run("distinguish " + data("triangular.json"));
  ASSERT_EQ(r.code, 0);
  EXPECT_LT(json::parse(r.out)["residual"].get<double>(), 1e-9);
}

TEST(Cli, LandauerPasses) {
  const auto r = run("landauer --beta 0.5 --trials 5 --seed 3");
  ASSERT_EQ(r.code, 0);
  const json j = json::parse(r.out);
  EXPECT_TRUE(j["pass"].get<bool>());
  EXPECT_EQ(j["terms"].size(), 5u);
  EXPECT_EQ(j["log_base"], "e");
}

TEST(Cli, VerifySuite) {
  const auto r = run("verify --suite prop14-invariant-spectrum --theory cbit-cobit --trials 1 --seed 0");
  ASSERT_EQ(r.code, 0);
  const json j = json::parse(r.out);
  EXPECT_TRUE(j["pass"].get<bool>());
  EXPECT_EQ(j["theory"], "classical:2*coherent:2");
  EXPECT_EQ(run("verify --suite nope").code, 2);
}

TEST(Cli, VerifyFailureExitsOne) {
  const auto r = run("verify --suite thm3-diagonalization --theory qutrit --trials 5 --tol 1e-300");
  const json j = json::parse(r.out);
  EXPECT_EQ(r.code, j["pass"].get<bool>() ? 0 : 1);
}

TEST(Cli, VerifyListsRegistry) {
  const auto r = run("verify --list");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("landauer-equality"), std::string::npos);
}

TEST(Cli, IdempotentOutput) {
  const std::string args = "verify --suite thm6-majorization --theory qubit --trials 4 --seed 9";
  EXPECT_EQ(run(args).out, run(args).out);
  const std::string d = "diagonalize --randomize --seed 5 " + data("chi4.json");
  EXPECT_EQ(run(d).out, run(d).out);
}

TEST(Cli, UsageAndSchemaErrorsExitTwo) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("diagonalize --no-such-flag " + data("chi4.json")).code, 2);
  EXPECT_EQ(run("diagonalize", "{not json").code, 2);
  EXPECT_EQ(run("diagonalize", R"({"system":"qubit","blocks":[[1,0]]})").code, 2);
  EXPECT_EQ(run("diagonalize /no/such/file.json").code, 2);
  EXPECT_EQ(run("verify --all --trials 0").code, 2);
  EXPECT_EQ(run("verify --suite thm3-diagonalization --tol -1").code, 2);
}
