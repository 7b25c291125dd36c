#include <gtest/gtest.h>

#include <numbers>

#include "sharp/channels.hpp"
#include "sharp/purification.hpp"
#include "sharp/random.hpp"
#include "sharp/sampling.hpp"

using namespace sharp;

namespace {

State cbit_state(double p0) {
  const auto c = SystemDescriptor::classical(2);
  return State(c, {Matrix::Constant(1, 1, p0), Matrix::Constant(1, 1, 1.0 - p0)});
}

Matrix pauli_x() {
  Matrix x(2, 2);
  x << 0, 1, 1, 0;
  return x;
}

}  // namespace

TEST(Purification, PartnerKinds) {
  EXPECT_EQ(purifying_partner(SystemDescriptor::quantum(3)), SystemDescriptor::quantum(3));
  EXPECT_EQ(purifying_partner(SystemDescriptor::classical(3)), SystemDescriptor::coherent(3));
  const auto cc = compose(SystemDescriptor::classical(2), SystemDescriptor::coherent(2));
  EXPECT_EQ(purifying_partner(cc).kind(), SystemKind::mirror);
}

TEST(Purification, CbitPurifiesToCorrelatedCobit) {
  const auto p = purify(cbit_state(0.3));
  EXPECT_EQ(p.partner, SystemDescriptor::coherent(2));
  EXPECT_NEAR(p.vector.amplitude(0).real(), std::sqrt(0.3), 1e-15);
  EXPECT_NEAR(p.vector.amplitude(3).real(), std::sqrt(0.7), 1e-15);
  EXPECT_EQ(p.vector.amplitude(1), cplx(0.0));
  EXPECT_EQ(p.vector.amplitude(2), cplx(0.0));
  EXPECT_LT(distance(marginal(p.state, Keep::a), cbit_state(0.3)), 1e-12);
}

TEST(Purification, MarginalsReproduced) {
  Rng rng = make_rng(50);
  for (const auto& s : {SystemDescriptor::quantum(3), SystemDescriptor::quantum(2, Field::real),
                        SystemDescriptor::classical(4),
                        compose(SystemDescriptor::classical(2), SystemDescriptor::coherent(2))}) {
    const State rho = random_state(s, rng);
    const auto p = purify(rho);
    EXPECT_TRUE(is_pure(p.state));
    EXPECT_LT(distance(marginal(p.state, Keep::a), rho), 1e-12) << s.label();
  }
}

TEST(Purification, RejectsSubnormalizedStates) {
  try {
    purify(State(SystemDescriptor::classical(2), {Matrix::Constant(1, 1, 0.2), Matrix::Constant(1, 1, 0.2)}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::not_normalized);
  }
}

TEST(Purification, BitFlippedCopurificationEquivalent) {
  const auto p = purify(cbit_state(0.3));
  const State flipped = apply(local_unitary(p.composite, Keep::b, pauli_x()), p.state);
  const auto m = purifications_equivalent(p.state, flipped);
  ASSERT_TRUE(m.equivalent);
  ASSERT_TRUE(m.witness.has_value());
  const Matrix& w = m.witness->kraus().front();
  EXPECT_LT((w - pauli_x()).norm(), 1e-12);
  EXPECT_LT(m.residual, 1e-12);
}

TEST(Purification, RandomLocalUnitariesRecovered) {
  Rng rng = make_rng(51);
  for (const auto& s : {SystemDescriptor::quantum(2), SystemDescriptor::quantum(3, Field::real),
                        SystemDescriptor::classical(3)}) {
    for (int t = 0; t < 5; ++t) {
      const auto p = purify(random_state(s, rng));
      const Matrix u = random_reversible_unitary(p.partner, rng);
      Channel local = Channel::identity(p.composite);
      try {
        local = local_unitary(p.composite, Keep::b, u);
      } catch (const Error&) {
        continue;  // sector permutations that do not act locally on this composite
      }
      const auto m = purifications_equivalent(p.state, apply(local, p.state));
      EXPECT_TRUE(m.equivalent) << s.label();
      EXPECT_LT(m.residual, 1e-9);
    }
  }
}

TEST(Purification, DifferentMarginalsRejected) {
  const auto a = purify(cbit_state(0.3)), b = purify(cbit_state(0.4));
  try {
    purifications_equivalent(a.state, b.state);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::not_copurifications);
  }
}

TEST(Purification, LocalPhaseInvisibleOnProductsVisibleOnEntangled) {
  const auto s = compose(SystemDescriptor::classical(2), SystemDescriptor::coherent(2));
  Matrix phase = Matrix::Zero(2, 2);
  phase(0, 0) = std::exp(cplx(0, -std::numbers::pi / 2));
  phase(1, 1) = std::exp(cplx(0, std::numbers::pi / 2));
  const Channel u = local_unitary(s, Keep::b, phase);
  Rng rng = make_rng(52);
  for (int t = 0; t < 10; ++t) {
    const State prod = tensor(random_state(s.factor(0), rng), random_state(s.factor(1), rng));
    const State out = apply(u, prod);
    EXPECT_LT(distance(marginal(out, Keep::a), marginal(prod, Keep::a)), 1e-12);
    EXPECT_LT(distance(marginal(out, Keep::b), marginal(prod, Keep::b)), 1e-12);
    EXPECT_LT(distance(out, prod), 1e-12);
  }
  const auto p = purify(cbit_state(0.3));
  EXPECT_GT(distance(apply(u, p.state), p.state), 1e-6);
}
