#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "sharp/channels.hpp"
#include "sharp/entropy.hpp"
#include "sharp/oracle.hpp"
#include "sharp/random.hpp"
#include "sharp/sampling.hpp"

using namespace sharp;

TEST(Entropy, MajorizationBasics) {
  EXPECT_TRUE(majorizes({1.0, 0.0}, {0.5, 0.5}));
  EXPECT_FALSE(majorizes({0.5, 0.5}, {1.0, 0.0}));
  EXPECT_TRUE(is_majorized_by({0.5, 0.5}, {0.7, 0.3}));
  EXPECT_TRUE(majorizes({0.6, 0.4}, {0.4, 0.6}));
  EXPECT_NEAR(majorization_slack({0.7, 0.3}, {0.5, 0.5}), 0.2, 1e-15);
  // Zero padding makes different lengths comparable.
  EXPECT_TRUE(majorizes({1.0}, {0.5, 0.25, 0.25}));
  try {
    majorization_slack({1.0}, {0.5});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::not_comparable);
  }
}

TEST(Entropy, ShannonAndRenyiValues) {
  const Distribution u{0.25, 0.25, 0.25, 0.25};
  EXPECT_NEAR(shannon(u), 2.0, 1e-15);
  EXPECT_NEAR(shannon(u, std::numbers::e), std::log(4.0), 1e-15);
  EXPECT_NEAR(renyi(u, 2.0), 2.0, 1e-14);
  const Distribution p{0.5, 0.25, 0.25, 0.0};
  EXPECT_NEAR(renyi(p, 0.0), std::log2(3.0), 1e-15);
  EXPECT_NEAR(renyi(p, 1.0), 1.5, 1e-15);
  EXPECT_NEAR(renyi(p, std::numeric_limits<double>::infinity()), 1.0, 1e-15);
  EXPECT_NEAR(renyi(p, 2.0), -std::log2(0.375), 1e-14);
  EXPECT_THROW(renyi(p, -1.0), Error);
}

TEST(Entropy, VonNeumannMatchesOracle) {
  Rng rng = make_rng(60);
  for (const auto& s : {SystemDescriptor::quantum(4), SystemDescriptor::classical(3),
                        compose(SystemDescriptor::classical(2), SystemDescriptor::coherent(2))}) {
    const State rho = random_state(s, rng);
    EXPECT_NEAR(shannon_vn(rho), oracle::entropy(oracle::dense(rho)), 1e-12);
  }
  EXPECT_NEAR(shannon_vn(invariant_state(SystemDescriptor::quantum(8))), 3.0, 1e-12);
}

TEST(Entropy, KleinAndOracleDivergence) {
  Rng rng = make_rng(61);
  const auto s = SystemDescriptor::quantum(3);
  for (int t = 0; t < 20; ++t) {
    const State rho = random_state(s, rng), sigma = random_state(s, rng);
    const double kl = kl_divergence(rho, sigma);
    EXPECT_GE(kl, -1e-12);
    EXPECT_NEAR(kl, oracle::relative_entropy(oracle::dense(rho), oracle::dense(sigma)), 1e-9);
    EXPECT_NEAR(kl_divergence(rho, rho), 0.0, 1e-11);
  }
}

TEST(Entropy, DivergenceInfiniteOffSupport) {
  const auto c = SystemDescriptor::classical(2);
  const State a(c, {Matrix::Constant(1, 1, 0.5), Matrix::Constant(1, 1, 0.5)});
  const State b(c, {Matrix::Constant(1, 1, 1.0), Matrix::Zero(1, 1)});
  EXPECT_TRUE(std::isinf(kl_divergence(a, b)));
  EXPECT_NEAR(kl_divergence(b, a), std::log(2.0), 1e-15);
  EXPECT_NEAR(kl_divergence(b, a, 2.0), 1.0, 1e-15);
}

TEST(Entropy, MutualInformation) {
  Rng rng = make_rng(62);
  const auto s = compose(SystemDescriptor::quantum(2), SystemDescriptor::quantum(2));
  const State prod = tensor(random_state(s.factor(0), rng), random_state(s.factor(1), rng));
  EXPECT_NEAR(mutual_information(prod), 0.0, 1e-12);
  Vector bell = Vector::Zero(4);
  bell(0) = bell(3) = std::sqrt(0.5);
  EXPECT_NEAR(mutual_information(pure_from_global(s, bell).state()), 2.0, 1e-12);
  EXPECT_THROW(mutual_information(invariant_state(SystemDescriptor::quantum(2))), Error);
}

TEST(Entropy, RareOutputsAreMajorized) {
  Rng rng = make_rng(63);
  const auto s = compose(SystemDescriptor::classical(3), SystemDescriptor::coherent(3));
  for (int t = 0; t < 10; ++t) {
    const State rho = random_state(s, rng);
    const State out = apply(random_rare(s, 3, rng), rho);
    EXPECT_TRUE(majorizes(spectrum(rho), spectrum(out)));
    EXPECT_GE(shannon_vn(out), shannon_vn(rho) - 1e-12);
  }
}

TEST(Entropy, MonotoneEstimatesNeverUndercut) {
  Rng rng = make_rng(64);
  const auto s = SystemDescriptor::quantum(3);
  const State rho = random_state(s, rng);
  for (const auto& f : {SchurConcaveFunction::shannon_entropy(), SchurConcaveFunction::renyi_entropy(2.0)}) {
    const auto m = measurement_monotone_estimate(f, rho, 12, 7);
    const auto p = preparation_monotone_estimate(f, rho, 12, 7);
    EXPECT_GE(m.min_gap, -1e-9);
    EXPECT_GE(p.min_gap, -1e-9);
    EXPECT_LT(m.eigen_gap, 1e-10);
    EXPECT_NEAR(m.estimate, monotone(f, rho), 1e-10);
    EXPECT_EQ(m.samples, 13u);
  }
}

TEST(Entropy, MonotoneEstimateRequiresReducible) {
  const State rho = invariant_state(SystemDescriptor::quantum(2));
  try {
    measurement_monotone_estimate(SchurConcaveFunction::v_function(), rho, 2, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::inapplicable_function);
  }
}

TEST(Entropy, ReducibilityCounterexample) {
  const auto r = reducibility_counterexample();
  EXPECT_EQ(r.v_two, 0.25);
  EXPECT_DOUBLE_EQ(r.v_three, 1.0 / 6.0);
  EXPECT_FALSE(r.v_reducible);
  EXPECT_TRUE(r.shannon_reducible);
}

TEST(Entropy, InducedEnsembleAveragesToState) {
  Rng rng = make_rng(65);
  const auto s = SystemDescriptor::quantum(3);
  const State rho = random_state(s, rng);
  const auto p = purify(rho);
  const auto ens = induced_ensemble(p, random_pure_test(p.partner, rng));
  auto blocks = StateVector::zero(s).blocks();
  for (const auto& [w, c] : ens) {
    (void)w;
    blocks[0] += c.block(0);
    EXPECT_TRUE(c.trace() < 1e-14 || is_pure(c, 1e-9));
  }
  EXPECT_LT(distance(StateVector(s, std::move(blocks)), rho.as<Role::vector>()), 1e-12);
}
