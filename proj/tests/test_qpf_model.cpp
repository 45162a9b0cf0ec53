#include <qpf/qpf_model.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace qpf;

namespace {

// Brute-force numpy oracle output (tests/oracles/aqft_oracle.py), physical variant.
struct SFixture {
  int L;
  std::uint64_t r;
  int d_max;
  double s;
};

constexpr SFixture kOracleS[] = {
    {4, 10, 0, 0.117340087890625},       {4, 10, 1, 0.388336181640625},
    {4, 10, 2, 0.68128207612412339},     {4, 10, 3, 0.76659089286133408},
    {4, 10, 4, 0.78347324521318151},     {4, 10, 5, 0.78616774872899864},
    {4, 10, 8, 0.78643293566169337},     {5, 18, 0, 0.05767822265625},
    {5, 18, 2, 0.66253219665321539},     {5, 18, 3, 0.79468548682605333},
    {5, 18, 10, 0.83489907537566688},    {6, 34, 0, 0.030284881591796875},
    {6, 34, 1, 0.19232845306396484},     {6, 34, 2, 0.62041654153239501},
    {6, 34, 3, 0.80994093165051373},     {6, 34, 7, 0.87004845231286942},
    {6, 34, 12, 0.87013225210187228},
};

}  // namespace

TEST(AqftPhase, ZeroRow) {
  const AqftSpec spec{4, 8};
  for (std::uint64_t k = 0; k < 256; ++k) EXPECT_EQ(aqft_phase(0, k, spec), 0.0);
}

TEST(AqftPhase, CutoffRemovesEverything) {
  EXPECT_EQ(aqft_phase(1, 1, {4, 0}), 0.0);
}

TEST(AqftPhase, FullDepthIsProductModulo) {
  EXPECT_NEAR(aqft_phase(255, 255, {4, 8}), 2.0 * std::numbers::pi / 256, 1e-15);
  for (int d : {7, 8}) {
    const AqftSpec spec{4, d};
    for (std::uint64_t j = 0; j < 256; j += 7)
      for (std::uint64_t k = 0; k < 256; k += 5) EXPECT_EQ(aqft_phase_numerator(j, k, spec), (j * k) % 256);
  }
}

TEST(AqftPhase, RejectsOutOfRange) {
  EXPECT_THROW(aqft_phase(256, 0, {4, 8}), std::out_of_range);
  EXPECT_THROW(aqft_phase(0, 256, {4, 8}), std::out_of_range);
  EXPECT_THROW(aqft_phase(0, 0, {4, 10}), std::invalid_argument);
  EXPECT_THROW(aqft_phase(0, 0, {1, 1}), std::invalid_argument);
}

TEST(AqftPhase, KeptPairs) {
  const AqftSpec phys{4, 1, BoundVariant::physical};
  EXPECT_TRUE(phys.keeps(7, 0));   // Hadamard pair
  EXPECT_TRUE(phys.keeps(6, 0));   // controlled pi/2
  EXPECT_FALSE(phys.keeps(5, 0));  // controlled pi/4
  EXPECT_FALSE(phys.keeps(8, 0));
  const AqftSpec lit{4, 1, BoundVariant::paper_literal};
  EXPECT_EQ(lit.lower_pair_sum(), 8);
  EXPECT_FALSE(lit.keeps(7, 0));
}

TEST(ProbJ, Figure2aComb) {
  const AqftSpec spec = AqftSpec::exact(4);
  EXPECT_NEAR(prob_j(32, 8, spec), 1.0 / 8, 1e-15);
  EXPECT_NEAR(prob_j(33, 8, spec), 0.0, 1e-12);
}

TEST(ProbJ, OracleFixtures) {
  EXPECT_NEAR(prob_j(26, 10, AqftSpec::exact(4)), 0.05618371102064193, 1e-12);
  EXPECT_NEAR(prob_j(26, 10, {4, 2}), 0.049777274491963619, 1e-12);
}

TEST(ProbJ, FastKernelMatchesReference) {
  std::mt19937_64 rng(5);
  for (int L : {3, 4, 5, 6}) {
    const std::uint64_t q = std::uint64_t{1} << (2 * L);
    std::uniform_int_distribution<std::uint64_t> pick_j(0, q - 1), pick_r(2, (std::uint64_t{1} << L) - 1);
    for (int d = 0; d <= 2 * L; ++d) {
      for (auto variant : {BoundVariant::physical, BoundVariant::paper_literal}) {
        const AqftSpec spec{L, d, variant};
        for (int i = 0; i < 8; ++i) {
          const auto j = pick_j(rng), r = pick_r(rng);
          EXPECT_NEAR(prob_j(j, r, spec), prob_j_reference(j, r, spec), 1e-12);
        }
      }
    }
  }
}

TEST(ProbJ, FastKernelMatchesReferenceUnderNoise) {
  const AqftSpec spec{5, 3};
  const NoiseDraw draw = draw_noise(spec, std::numbers::pi / 32, 11, 0);
  for (std::uint64_t j = 0; j < 1024; j += 37)
    EXPECT_NEAR(prob_j(j, 18, spec, &draw), prob_j_reference(j, 18, spec, &draw), 1e-12);
}

TEST(ProbJ, RejectsBadPeriod) {
  EXPECT_THROW(prob_j(0, 1, {4, 8}), std::invalid_argument);
  EXPECT_THROW(prob_j(0, 16, {4, 8}), std::invalid_argument);
}

TEST(UsefulSet, Examples) {
  EXPECT_EQ(useful_j_set(2, 4), std::vector<std::uint64_t>({128}));
  EXPECT_EQ(useful_j_set(8, 4), std::vector<std::uint64_t>({32, 64, 96, 128, 160, 192, 224}));
  EXPECT_EQ(useful_j_set(10, 4), std::vector<std::uint64_t>({25, 26, 51, 52, 76, 77, 102, 103, 128, 153, 154, 179,
                                                             180, 204, 205, 230, 231}));
}

TEST(UsefulSet, SizeBoundAndOrder) {
  for (int L = 2; L <= 9; ++L)
    for (std::uint64_t r = 2; r < (std::uint64_t{1} << L); ++r) {
      const auto js = useful_j_set(r, L);
      EXPECT_LE(js.size(), 2 * (r - 1));
      for (std::size_t i = 1; i < js.size(); ++i) EXPECT_LT(js[i - 1], js[i]);
    }
}

TEST(ProbUseful, ExactDivisor) {
  EXPECT_NEAR(prob_useful(8, AqftSpec::exact(4)), 7.0 / 8, 1e-14);
}

TEST(ProbUseful, OracleFixtures) {
  for (const auto& f : kOracleS)
    EXPECT_NEAR(prob_useful(f.r, {f.L, f.d_max}), f.s, 1e-12) << "L=" << f.L << " d=" << f.d_max;
}

TEST(ProbUseful, LiteralVariantFixtures) {
  // With d_max <= 1 the literal bound drops Hadamard phases; the map is no
  // longer unitary and s can exceed 1.
  EXPECT_NEAR(prob_useful(10, {4, 1, BoundVariant::paper_literal}), 1.621246337890625, 1e-12);
  EXPECT_NEAR(prob_useful(10, {4, 2, BoundVariant::paper_literal}), 0.117340087890625, 1e-12);
  EXPECT_NEAR(prob_useful(10, {4, 3, BoundVariant::paper_literal}), 0.388336181640625, 1e-12);
}

TEST(ProbUseful, CharacteristicPointBelowExact) {
  const std::uint64_t r = (1u << 3) + 2;
  EXPECT_LT(prob_useful(r, {4, 0}), prob_useful(r, AqftSpec::exact(4)));
}

TEST(ProbUseful, ThreadCountInvariant) {
  const AqftSpec spec{7, 3};
  const double one = prob_useful(66, spec, 1);
  EXPECT_EQ(one, prob_useful(66, spec, 2));
  EXPECT_EQ(one, prob_useful(66, spec, 5));
}

TEST(Noise, ZeroSigmaIsExact) {
  const AqftSpec spec{5, 2};
  const auto est = prob_useful_noisy(18, spec, {0.0, 7, 3});
  EXPECT_EQ(est.mean, prob_useful(18, spec));
  EXPECT_EQ(est.std_error, 0.0);
}

TEST(Noise, FactorOfTwoBand) {
  const AqftSpec spec{4, 3};
  const double clean = prob_useful(10, spec);
  const auto est = prob_useful_noisy(10, spec, {std::numbers::pi / 32, 200, 2024});
  EXPECT_GE(est.mean, clean / 2);
  EXPECT_LE(est.mean, clean * 2);
  EXPECT_GT(est.std_error, 0.0);
}

TEST(Noise, ReproducibleAcrossThreads) {
  const AqftSpec spec{4, 3};
  const NoiseModel noise{std::numbers::pi / 32, 40, 77};
  const auto a = prob_useful_noisy(10, spec, noise, 1);
  const auto b = prob_useful_noisy(10, spec, noise, 3);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.per_trial, b.per_trial);
}

TEST(Noise, DrawsOnlyControlledPairs) {
  const AqftSpec spec{4, 3};
  const NoiseDraw d = draw_noise(spec, 0.1, 1, 0);
  for (int m = 0; m < 8; ++m)
    for (int n = 0; n < 8; ++n) {
      const bool noisy = spec.keeps(m, n) && m + n <= 6;
      if (!noisy) EXPECT_EQ(d.at(m, n), 0.0);
      else EXPECT_NE(d.at(m, n), 0.0);
    }
  const NoiseDraw again = draw_noise(spec, 0.1, 1, 0);
  EXPECT_EQ(d.delta, again.delta);
  EXPECT_NE(d.delta, draw_noise(spec, 0.1, 1, 1).delta);
}

TEST(Noise, RejectsZeroTrials) {
  EXPECT_THROW(prob_useful_noisy(10, {4, 3}, {0.1, 0, 1}), std::invalid_argument);
  EXPECT_THROW(prob_useful_noisy(10, {4, 3}, {-0.1, 1, 1}), std::invalid_argument);
}

TEST(Distribution, Figure2a) {
  const Distribution d = full_distribution(8, AqftSpec::exact(4));
  ASSERT_EQ(d.probabilities.size(), 256u);
  for (std::size_t j = 0; j < 256; ++j) EXPECT_NEAR(d.probabilities[j], j % 32 == 0 ? 0.125 : 0.0, 1e-12);
}

TEST(Distribution, Figure2bPeaksNearMultiples) {
  const Distribution d = full_distribution(10, AqftSpec::exact(4));
  for (int c = 1; c < 10; ++c) {
    const double centre = c * 25.6;
    std::size_t best = 0;
    double best_p = -1.0;
    for (std::size_t j = 0; j < 256; ++j)
      if (std::abs(static_cast<double>(j) - centre) < 13 && d.probabilities[j] > best_p) {
        best = j;
        best_p = d.probabilities[j];
      }
    EXPECT_LT(std::abs(static_cast<double>(best) - centre), 1.0);
  }
}

TEST(Distribution, NormalizationEverywhere) {
  for (int L = 2; L <= 5; ++L)
    for (std::uint64_t r = 2; r < (std::uint64_t{1} << L); ++r)
      for (int d = 0; d <= 2 * L; ++d) {
        const Distribution dist = full_distribution(r, {L, d});
        EXPECT_NEAR(dist.total(), expected_mass(r, L), 1e-10);
        for (double p : dist.probabilities) {
          EXPECT_GE(p, 0.0);
          EXPECT_LE(p, 1.0 + 1e-12);
        }
      }
}

TEST(Distribution, NormalizationUnderNoise) {
  const AqftSpec spec{4, 3};
  const Distribution d = noisy_distribution(10, spec, {0.2, 5, 9});
  EXPECT_NEAR(d.total(), expected_mass(10, 4), 1e-10);
}

TEST(Distribution, FullDepthMatchesExactQft) {
  for (std::uint64_t r : {3u, 6u, 10u, 13u}) {
    const Distribution d = full_distribution(r, AqftSpec::exact(4));
    const std::uint64_t M = 256 / r;
    for (std::size_t j = 0; j < 256; ++j) {
      cplx acc{0.0};
      for (std::uint64_t p = 0; p < M; ++p)
        acc += std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>((j * p * r) % 256) / 256);
      EXPECT_NEAR(d.probabilities[j], static_cast<double>(r) * std::norm(acc) / 65536.0, 1e-12);
    }
  }
}

TEST(Distribution, UsefulMassAgrees) {
  const AqftSpec spec{5, 2};
  EXPECT_NEAR(useful_mass_of(full_distribution(18, spec)), prob_useful(18, spec), 1e-13);
}

TEST(Distribution, SizeGuard) {
  EXPECT_THROW(full_distribution(10, {13, 3}), std::invalid_argument);
}
