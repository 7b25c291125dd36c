#include <gtest/gtest.h>

#include <numbers>
#include <numeric>

#include "sharp/channels.hpp"
#include "sharp/oracle.hpp"
#include "sharp/random.hpp"
#include "sharp/sampling.hpp"

using namespace sharp;

namespace {

SystemDescriptor cbit_cobit() { return compose(SystemDescriptor::classical(2), SystemDescriptor::coherent(2)); }

template <class F>
Errc code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::schema_error;
}

}  // namespace

TEST(Channels, IdentityLeavesStatesAlone) {
  Rng rng = make_rng(30);
  const auto s = cbit_cobit();
  const State rho = random_state(s, rng);
  EXPECT_LT(distance(apply(Channel::identity(s), rho), rho), 1e-15);
}

TEST(Channels, RandomReversibleIsBlockPreservingUnitary) {
  Rng rng = make_rng(31);
  for (const auto& s : {SystemDescriptor::quantum(3), SystemDescriptor::classical(4), cbit_cobit(),
                        compose(SystemDescriptor::classical(3), SystemDescriptor::coherent(3))}) {
    for (int t = 0; t < 10; ++t) {
      const Channel u = random_reversible(s, rng);
      EXPECT_TRUE(u.is_reversible());
      EXPECT_LT(linalg::unitarity_defect(u.kraus().front()), 1e-12);
      const State rho = random_state(s, rng);
      const State out = apply(u, rho);
      EXPECT_NEAR(out.trace(), 1.0, 1e-12);
      EXPECT_TRUE(is_doubly_stochastic(u));
      // Spectrum is invariant under reversible channels.
      const auto a = oracle::eigenvalues(oracle::dense(rho));
      const auto b = oracle::eigenvalues(oracle::dense(out));
      for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-12);
    }
  }
}

TEST(Channels, CrossSectorUnitaryRejected) {
  const auto c = SystemDescriptor::classical(2);
  Matrix h(2, 2);
  h << 1, 1, 1, -1;
  h /= std::sqrt(2.0);
  EXPECT_EQ(code_of([&] { Channel::unitary(c, h); }), Errc::invalid_state);
}

TEST(Channels, NonTracePreservingKrausRejected) {
  const auto q = SystemDescriptor::quantum(2);
  EXPECT_EQ(code_of([&] { Channel(q, q, {Matrix(2.0 * Matrix::Identity(2, 2))}); }), Errc::invalid_state);
  EXPECT_NO_THROW(Channel(q, q, {Matrix::Identity(2, 2)}, ChannelKind::reversible));
  EXPECT_EQ(code_of([&] { Channel(q, q, {Matrix(0.5 * Matrix::Identity(2, 2))}, ChannelKind::reversible); }),
            Errc::not_reversible);
}

TEST(Channels, PullbackIsAdjointOfApply) {
  Rng rng = make_rng(32);
  const auto s = SystemDescriptor::quantum(3);
  const Channel c = random_rare(s, 3, rng);
  const State rho = random_state(s, rng);
  const Effect e = random_effect(s, rng);
  EXPECT_NEAR(pair(e, apply(c, rho)), pair(pullback(c, e), rho), 1e-12);
}

TEST(Channels, ThenComposesInOrder) {
  Rng rng = make_rng(33);
  const auto s = cbit_cobit();
  const Channel a = random_reversible(s, rng), b = random_rare(s, 2, rng);
  const State rho = random_state(s, rng);
  EXPECT_LT(distance(apply(then(a, b), rho), apply(b, apply(a, rho))), 1e-12);
}

TEST(Channels, RareChannelsAreUnital) {
  Rng rng = make_rng(34);
  const auto s = SystemDescriptor::quantum(4);
  const Channel r = random_rare(s, 4, rng);
  EXPECT_EQ(r.kind(), ChannelKind::rare);
  EXPECT_TRUE(is_doubly_stochastic(r));
  EXPECT_NEAR(std::accumulate(r.rare_weights().begin(), r.rare_weights().end(), 0.0), 1.0, 1e-15);
}

TEST(Channels, ReplaceChannelOutputsTarget) {
  Rng rng = make_rng(35);
  const auto s = SystemDescriptor::quantum(3);
  const PureVector psi = random_pure(s, rng);
  const State out = apply(replace_channel(s, psi), random_state(s, rng));
  EXPECT_LT(distance(out, psi.state()), 1e-12);
}

TEST(Channels, ExtendedClassicalPhaseIsLocalOnProducts) {
  const auto s = cbit_cobit();
  const double h = std::numbers::pi / 2;
  const Channel phase = extended_classical_unitary(s, 0, 0, {0, h, 0, h});
  EXPECT_TRUE(phase.is_reversible());
  const Channel flip = extended_classical_unitary(s, 1, 1, {0, 0, 0, 0});
  const State rho = tensor(invariant_state(s.factor(0)), invariant_state(s.factor(1)));
  EXPECT_LT(distance(apply(flip, rho), rho), 1e-15);
}

TEST(Channels, LocalUnitaryOnFactor) {
  Rng rng = make_rng(36);
  const auto s = compose(SystemDescriptor::quantum(2), SystemDescriptor::quantum(3));
  const Matrix u = linalg::haar_unitary(3, Field::complex, rng);
  const State a = random_state(s.factor(0), rng), b = random_state(s.factor(1), rng);
  const State out = apply(local_unitary(s, Keep::b, u), tensor(a, b));
  EXPECT_LT(distance(marginal(out, Keep::a), a), 1e-12);
}

TEST(Channels, MinimallyDisturbingFixesSupport) {
  Rng rng = make_rng(37);
  const auto s = SystemDescriptor::quantum(4);
  const auto set = random_maximal_set(s, rng);
  const std::vector<PureVector> supp(set.begin(), set.begin() + 2), rest(set.begin() + 2, set.end());
  const Effect p = projector_onto(s, supp), q = projector_onto(s, rest);
  const Effect a = combine<Role::effect, Role::effect>({{1.0, &p}, {0.3, &q}}, s);
  const State rho = random_state_on(s, supp, rng);
  const Channel t = minimally_disturbing(a, rho);
  const State sigma = random_state_on(s, supp, rng);
  EXPECT_LT(distance(apply(t, sigma), sigma), 1e-12);
  const State any = random_state(s, rng);
  EXPECT_LE(apply(t, any).trace(), pair(a, any) + 1e-12);
  EXPECT_EQ(code_of([&] { minimally_disturbing(a, random_state(s, rng)); }), Errc::effect_not_certain);
}

TEST(Channels, NaimarkDilation) {
  Rng rng = make_rng(38);
  for (std::size_t d : {2u, 3u})
    for (std::size_t n : {2u, 3u, 4u}) {
      const auto s = SystemDescriptor::quantum(d);
      const auto test = random_test(s, n, rng);
      const auto dil = naimark(test);
      EXPECT_EQ(dil.projectors.size(), n);
      EXPECT_LT(dil.orthogonality_residual, 1e-10);
      EXPECT_LT(dil.effect_residual, 1e-10);
      EXPECT_LT(linalg::unitarity_defect(dil.unitary), 1e-10);
    }
}

TEST(Channels, NaimarkRejectsInvalidInput) {
  Rng rng = make_rng(39);
  const auto c = SystemDescriptor::classical(2);
  EXPECT_EQ(code_of([&] { naimark(random_test(c, 2, rng)); }), Errc::unsupported);
  const auto q = SystemDescriptor::quantum(2);
  EXPECT_EQ(code_of([&] { naimark({random_effect(q, rng)}); }), Errc::not_a_test);
}

TEST(Channels, DistinguishabilityProtocolOnTriangularFamily) {
  Rng rng = make_rng(40);
  const auto s = SystemDescriptor::quantum(3);
  const auto set = random_maximal_set(s, rng);
  // rho_i on e_i; a_1 = P_0, a_2 = P_1 + 0.5 P_0, a_3 = u.
  std::vector<State> states;
  for (const auto& v : set) states.push_back(v.state());
  const Effect p0 = set[0].effect(), p1 = set[1].effect();
  const Effect a2 = combine<Role::effect, Role::effect>({{1.0, &p1}, {0.5, &p0}}, s);
  const auto res = distinguishability_protocol(states, {p0, a2, unit_effect(s)});
  EXPECT_LT(res.residual, 1e-10);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(pair(res.effects[i], states[j]), i == j ? 1.0 : 0.0, 1e-10);
}

TEST(Channels, DistinguishabilityRequiresTriangularity) {
  const auto s = SystemDescriptor::quantum(2);
  const auto set = maximal_set(s);
  const std::vector<State> states{set[0].state(), set[1].state()};
  EXPECT_EQ(code_of([&] { distinguishability_protocol(states, {unit_effect(s), unit_effect(s)}); }),
            Errc::triangularity_failed);
}
