#include <qpf/su2.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <string>

using namespace qpf;

namespace {

// Haar-ish random unitary from a random unit quaternion and a random phase.
Unitary2 random_unitary(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  double a = g(rng), b = g(rng), c = g(rng), d = g(rng);
  const double n = std::sqrt(a * a + b * b + c * c + d * d);
  a /= n;
  b /= n;
  c /= n;
  d /= n;
  const cplx alpha{a, b}, beta{c, d};
  std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
  const cplx phase = std::polar(1.0, u(rng));
  return {{phase * alpha, -phase * std::conj(beta), phase * beta, phase * std::conj(alpha)}};
}

std::string random_word(std::mt19937_64& rng, int max_len) {
  static const std::string alphabet = "HSsTtXZ";
  std::uniform_int_distribution<int> len(0, max_len), pick(0, 6);
  std::string w;
  const int n = len(rng);
  for (int i = 0; i < n; ++i) w.push_back(alphabet[static_cast<std::size_t>(pick(rng))]);
  return w;
}

}  // namespace

TEST(Su2, EvalEmptyWordIsIdentity) {
  EXPECT_EQ(eval_word("").max_abs_diff(Unitary2::identity()), 0.0);
}

TEST(Su2, HadamardSquaredIsIdentity) {
  EXPECT_LE(eval_word("HH").max_abs_diff(Unitary2::identity()), 1e-14);
}

TEST(Su2, U31Distance) {
  const double d = dist(rotation({7}), eval_word(kU31));
  EXPECT_NEAR(d, 8.1e-3, 0.05e-3);
  EXPECT_LE(eval_word(kU31).unitarity_error(), 1e-12);
}

TEST(Su2, U31DistanceIsOrderIndependent) {
  const std::string w(kU31);
  const std::string rev(w.rbegin(), w.rend());
  EXPECT_NEAR(dist(rotation({7}), eval_word(w)), dist(rotation({7}), eval_word(rev)), 1e-15);
}

TEST(Su2, FirstSymbolIsAppliedFirst) {
  const Unitary2 ht = gate_matrix(Gate::T) * gate_matrix(Gate::H);
  EXPECT_LE(eval_word("HT").max_abs_diff(ht), 1e-15);
}

TEST(Su2, DistanceFixtures) {
  const Unitary2 r128 = rotation({7});
  EXPECT_EQ(dist(r128, r128), 0.0);
  EXPECT_NEAR(dist(r128, Unitary2::identity()), 8.7e-3, 0.05e-3);
  const Unitary2 approx = phase_gate(std::numbers::pi / 128 + std::numbers::pi / 512);
  EXPECT_NEAR(dist(r128, approx), 2.1e-3, 0.1e-3);
}

TEST(Su2, RotationSpecialCases) {
  EXPECT_LE(rotation({0}).max_abs_diff(gate_matrix(Gate::Z)), 1e-15);
  EXPECT_LE(rotation({1}).max_abs_diff(gate_matrix(Gate::S)), 1e-15);
  EXPECT_LE(rotation({2}).max_abs_diff(gate_matrix(Gate::T)), 1e-15);
  EXPECT_THROW(rotation({-1}), std::invalid_argument);
}

TEST(Su2, ControlledRotationMatrix) {
  const Matrix4 cz = controlled_rotation_matrix(0);
  EXPECT_NEAR(std::abs(cz(3, 3) - cplx{-1.0}), 0.0, 1e-15);
  const Matrix4 cs = controlled_rotation_matrix(1);
  EXPECT_NEAR(std::abs(cs(3, 3) - cplx{0.0, 1.0}), 0.0, 1e-15);
  const Matrix4 c64 = controlled_rotation_matrix(6);
  EXPECT_NEAR(std::abs(c64(3, 3) - std::polar(1.0, std::numbers::pi / 64)), 0.0, 1e-15);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(c64(i, i), cplx{1.0});
  EXPECT_THROW(controlled_rotation_matrix(-1), std::invalid_argument);
}

TEST(Su2, MetricAxiomsOnRandomTriples) {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> theta(0.0, 2.0 * std::numbers::pi);
  for (int i = 0; i < 10000; ++i) {
    const Unitary2 u = random_unitary(rng), v = random_unitary(rng), w = random_unitary(rng);
    const double uv = dist(u, v);
    EXPECT_GE(uv, 0.0);
    EXPECT_LE(uv, 1.0);
    EXPECT_EQ(uv, dist(v, u));
    EXPECT_LE(dist(u, w), uv + dist(v, w) + 1e-12);
    Unitary2 pu = u;
    const cplx ph = std::polar(1.0, theta(rng));
    for (auto& x : pu.m) x *= ph;
    EXPECT_LE(dist(u, pu), 1e-12);
  }
}

TEST(Su2, RotationDistanceClosedForm) {
  for (int d = 0; d <= 20; ++d) {
    const double want = std::numbers::sqrt2 * std::abs(std::sin(std::numbers::pi / std::ldexp(1.0, d + 2)));
    EXPECT_NEAR(dist(rotation({d}), Unitary2::identity()), want, 1e-12) << "d=" << d;
  }
}

TEST(Su2, ConcatenationIsMatrixProduct) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 2000; ++i) {
    const std::string a = random_word(rng, 32), b = random_word(rng, 32);
    const Unitary2 joined = eval_word(a + b);
    // First-applied factor on the right.
    const Unitary2 product = eval_word(b) * eval_word(a);
    EXPECT_LE(joined.max_abs_diff(product), 1e-12);
    EXPECT_LE(joined.unitarity_error(), 1e-12);
  }
}

TEST(Su2, GeneratorRelations) {
  auto same = [](std::string_view a, std::string_view b) { return dist(eval_word(a), eval_word(b)) < 1e-7; };
  EXPECT_TRUE(same("TT", "S"));
  EXPECT_TRUE(same("SS", "Z"));
  EXPECT_TRUE(same("ZZ", ""));
  EXPECT_TRUE(same("Tt", ""));
  EXPECT_TRUE(same("Ss", ""));
  EXPECT_TRUE(same("XX", ""));
  EXPECT_TRUE(same("HZH", "X"));
}

TEST(Su2, WordTextRoundTrip) {
  const GateWord w = GateWord::parse(kU31);
  EXPECT_EQ(w.size(), 31u);
  EXPECT_EQ(w.str(), kU31);
  EXPECT_THROW(GateWord::parse("HQ"), std::invalid_argument);
  EXPECT_THROW(GateWord::parse("H T"), std::invalid_argument);
}

TEST(Su2, CanonicalizationPreservesUnitary) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 5000; ++i) {
    const GateWord w = GateWord::parse(random_word(rng, 24));
    const GateWord c = canonicalize(w);
    EXPECT_LE(c.size(), w.size());
    EXPECT_LT(dist(eval_word(w), eval_word(c)), 1e-7);
    EXPECT_TRUE(is_canonical(c));
    EXPECT_EQ(canonicalize(c), c);
  }
}

TEST(Su2, CanonicalFormExamples) {
  EXPECT_EQ(canonicalize(GateWord::parse("TT")).str(), "S");
  EXPECT_EQ(canonicalize(GateWord::parse("TTTTTTTT")).str(), "");
  EXPECT_EQ(canonicalize(GateWord::parse("TS")).str(), "ST");
  EXPECT_EQ(canonicalize(GateWord::parse("HTtH")).str(), "");
  EXPECT_EQ(canonicalize(GateWord::parse("XHHX")).str(), "");
  EXPECT_EQ(canonicalize(GateWord::parse("ZT")).str(), "ZT");
  EXPECT_EQ(canonicalize(GateWord::parse("SSS")).str(), "s");
  EXPECT_EQ(canonicalize(GateWord::parse(kU31)).str(), kU31);
}

TEST(Su2, DiagonalRepresentativesAreDistinct) {
  std::set<std::string> seen;
  for (int k = 0; k < 8; ++k) {
    const std::string w(diagonal_word(k));
    EXPECT_TRUE(seen.insert(w).second);
    EXPECT_LT(dist(eval_word(w), phase_gate(k * std::numbers::pi / 4)), 1e-7);
  }
}

TEST(Su2, DecomposeControlledZ) {
  const auto ops = decompose_controlled(0);
  EXPECT_EQ(cnot_count(ops), 1);
  EXPECT_LE(circuit_matrix(ops).diff_up_to_phase(controlled_rotation_matrix(0)), 1e-12);
}

TEST(Su2, DecomposeControlledRotations) {
  for (int d = 1; d <= 12; ++d) {
    const auto ops = decompose_controlled(d);
    EXPECT_EQ(cnot_count(ops), 2);
    EXPECT_EQ(ops.size(), 5u);
    EXPECT_LE(circuit_matrix(ops).diff_up_to_phase(controlled_rotation_matrix(d)), 1e-12) << "d=" << d;
  }
}

TEST(Su2, DecomposeControlledPi8IsExact) {
  const Matrix4 u = circuit_matrix(decompose_controlled(3));
  Matrix4 want = Matrix4::identity();
  want(3, 3) = std::polar(1.0, std::numbers::pi / 8);
  double err = 0.0;
  for (int i = 0; i < 16; ++i) err = std::max(err, std::abs(u.m[i] - want.m[i]));
  EXPECT_LE(err, 1e-12);
}

TEST(Su2, DecomposeControlledPi64UsesPi128Rotations) {
  const auto ops = decompose_controlled(6);
  int found = 0;
  for (const auto& op : ops) {
    if (op.kind != TwoQubitOp::Kind::Single) continue;
    const double angle = std::arg(op.gate(1, 1) / op.gate(0, 0));
    EXPECT_NEAR(std::abs(angle), std::numbers::pi / 128, 1e-15);
    ++found;
  }
  EXPECT_EQ(found, 3);
  EXPECT_THROW(decompose_controlled(-1), std::invalid_argument);
}
