#pragma once

// Classical pre- and postprocessing around period finding: continued
// fractions, order recovery from measured outcomes, and the factoring loop.
// All integer arithmetic is arbitrary precision.

#include <qpf/oracle_sim.hpp>
#include <qpf/parallel.hpp>
#include <qpf/qpf_model.hpp>

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/integer.hpp>
#include <boost/multiprecision/miller_rabin.hpp>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/uniform_int_distribution.hpp>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qpf {

using BigInt = boost::multiprecision::cpp_int;

inline BigInt pow_mod(const BigInt& base, const BigInt& exp, const BigInt& mod) {
  return boost::multiprecision::powm(base, exp, mod);
}

inline BigInt big_gcd(const BigInt& a, const BigInt& b) { return boost::multiprecision::gcd(a, b); }
inline BigInt big_lcm(const BigInt& a, const BigInt& b) { return boost::multiprecision::lcm(a, b); }

inline int bit_length(const BigInt& x) {
  return x == 0 ? 0 : static_cast<int>(boost::multiprecision::msb(x)) + 1;
}

// --- continued fractions ----------------------------------------------------

struct Fraction {
  BigInt num;
  BigInt den;
  friend bool operator==(const Fraction&, const Fraction&) = default;
};

/// Partial quotients a_1, a_2, ... of num/den = 1/(a_1 + 1/(a_2 + ...)) and
/// the reduced convergents c_n/d_n of each prefix.
struct CfExpansion {
  std::vector<BigInt> denominators;
  std::vector<Fraction> convergents;

  /// Evaluates the quotient list back into a reduced fraction.
  Fraction recombine() const {
    Fraction f{0, 1};
    for (auto it = denominators.rbegin(); it != denominators.rend(); ++it) {
      // f <- 1 / (a + f)
      BigInt n = f.den;
      BigInt d = *it * f.den + f.num;
      f = {n, d};
    }
    const BigInt g = big_gcd(f.num, f.den);
    if (g > 1) {
      f.num /= g;
      f.den /= g;
    }
    return f;
  }
};

inline CfExpansion cf_expand(const BigInt& numerator, const BigInt& denominator) {
  if (denominator <= 0) throw std::invalid_argument("cf_expand: denominator must be positive");
  if (numerator < 0 || numerator >= denominator)
    throw std::invalid_argument("cf_expand: need 0 <= numerator < denominator");
  CfExpansion cf;
  // h_n = a_n h_{n-1} + h_{n-2}, k_n likewise, seeded by a_0 = 0.
  BigInt h_prev2 = 1, h_prev = 0;  // h_{-1}, h_0
  BigInt k_prev2 = 0, k_prev = 1;  // k_{-1}, k_0
  BigInt num = denominator, rem = numerator;
  while (rem != 0) {
    const BigInt a = num / rem;
    const BigInt next = num % rem;
    num = rem;
    rem = next;
    cf.denominators.push_back(a);
    BigInt h = a * h_prev + h_prev2;
    BigInt k = a * k_prev + k_prev2;
    h_prev2 = std::exchange(h_prev, h);
    k_prev2 = std::exchange(k_prev, k);
    cf.convergents.push_back({h, k});
  }
  return cf;
}

inline CfExpansion cf_expand(std::uint64_t numerator, std::uint64_t denominator) {
  return cf_expand(BigInt(numerator), BigInt(denominator));
}

// --- order recovery ---------------------------------------------------------

enum class SampleSource { formula, oracle, injected };

inline const char* to_string(SampleSource s) {
  switch (s) {
    case SampleSource::formula: return "formula";
    case SampleSource::oracle: return "oracle";
    case SampleSource::injected: return "injected";
  }
  return "?";
}

struct QpfSample {
  BigInt j;
  SampleSource source = SampleSource::injected;
};

/// Smallest d dividing `r` (r verified: m^r = 1 mod N) with m^d = 1 mod N.
inline BigInt reduce_to_order(const BigInt& m, const BigInt& N, BigInt r) {
  for (bool changed = true; changed;) {
    changed = false;
    BigInt rest = r;
    for (BigInt p = 2; p * p <= rest; ++p) {
      if (rest % p != 0) continue;
      while (rest % p == 0) rest /= p;
      if (r % p == 0 && pow_mod(m, r / p, N) == 1) {
        r /= p;
        changed = true;
      }
    }
    if (rest > 1 && r % rest == 0 && pow_mod(m, r / rest, N) == 1) {
      r /= rest;
      changed = true;
    }
  }
  return r;
}

/// Recovers the order of m mod N from measured outcomes j (over 2^(2L),
/// L = bit length of N). Tried in turn: the largest convergent denominator
/// below 2^L of each sample, every such denominator, then lcm(d, d') over all
/// pairs whose numerators are coprime. The smallest verified candidate is
/// reduced to the exact order before returning.
inline std::optional<BigInt> find_order(const BigInt& m, const BigInt& N, const std::vector<QpfSample>& samples) {
  if (N < 3 || m < 2 || m >= N) throw std::invalid_argument("find_order: need 1 < m < N");
  if (big_gcd(m, N) != 1) throw std::invalid_argument("find_order: need gcd(m, N) = 1");
  const int L = bit_length(N);
  const BigInt q = BigInt(1) << (2 * L);
  const BigInt limit = BigInt(1) << L;
  auto verified = [&](const BigInt& d) { return d >= 1 && pow_mod(m, d, N) == 1; };

  std::set<std::pair<BigInt, BigInt>> convergents;  // (c, d) with d < 2^L
  std::optional<BigInt> best;
  auto offer = [&](const BigInt& d) {
    if (verified(d) && (!best || d < *best)) best = d;
  };

  for (const auto& s : samples) {
    if (s.j < 0 || s.j >= q) throw std::invalid_argument("find_order: sample outside [0, 2^(2L))");
    const CfExpansion cf = cf_expand(s.j, q);
    std::optional<BigInt> largest;
    for (const auto& c : cf.convergents) {
      if (c.den >= limit) continue;
      convergents.emplace(c.num, c.den);
      if (!largest || c.den > *largest) largest = c.den;
    }
    if (largest) offer(*largest);
  }
  if (!best)
    for (const auto& [c, d] : convergents) offer(d);
  if (!best) {
    const std::vector<std::pair<BigInt, BigInt>> all(convergents.begin(), convergents.end());
    for (std::size_t a = 0; a < all.size(); ++a)
      for (std::size_t b = a + 1; b < all.size(); ++b) {
        if (big_gcd(all[a].first, all[b].first) != 1) continue;
        const BigInt l = big_lcm(all[a].second, all[b].second);
        if (l < N) offer(l);
      }
  }
  if (!best) return std::nullopt;
  return reduce_to_order(m, N, *best);
}

// --- sampling ---------------------------------------------------------------

/// Inverse-CDF sampler over a distribution. Mass missing from the total
/// (1 - sum Pr) is spread uniformly over all outcomes.
class OutcomeSampler {
 public:
  explicit OutcomeSampler(const Distribution& dist) : size_(dist.probabilities.size()) {
    if (dist.probabilities.empty()) throw std::invalid_argument("OutcomeSampler: empty distribution");
    cdf_.resize(size_);
    double acc = 0.0;
    for (std::size_t j = 0; j < size_; ++j) {
      acc += dist.probabilities[j];
      cdf_[j] = acc;
    }
    if (!(acc > 0.0)) throw std::invalid_argument("OutcomeSampler: distribution has no mass");
  }

  template <class Engine>
  std::uint64_t draw(Engine& rng) const {
    const double u = uniform01(rng);
    if (u >= cdf_.back()) {
      const double v = uniform01(rng);
      return std::min<std::uint64_t>(static_cast<std::uint64_t>(v * static_cast<double>(size_)), size_ - 1);
    }
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return static_cast<std::uint64_t>(it - cdf_.begin());
  }

 private:
  std::size_t size_;
  std::vector<double> cdf_;
};

template <class Engine>
QpfSample sample_outcome(const Distribution& dist, Engine& rng, SampleSource source = SampleSource::formula) {
  return {BigInt(OutcomeSampler(dist).draw(rng)), source};
}

// --- factoring driver -------------------------------------------------------

struct FactoringInstance {
  BigInt N;
  std::optional<BigInt> m;  // base; random when empty

  int L() const { return bit_length(N); }
};

/// Produces one period-finding outcome for base m.
using OutcomeSource = std::function<QpfSample(const BigInt& m, std::mt19937_64& rng)>;

/// Samples from the closed-form distribution at the given cutoff. The period
/// is computed classically to parameterize the formula.
inline OutcomeSource make_formula_sampler(const BigInt& N, int d_max,
                                          BoundVariant variant = BoundVariant::physical, unsigned threads = 0) {
  const int L = bit_length(N);
  if (2 * L > kMaxDistributionBits) throw std::invalid_argument("formula sampler: 2L exceeds 24");
  auto cache = std::make_shared<std::map<std::uint64_t, OutcomeSampler>>();
  const auto n64 = N.convert_to<std::uint64_t>();
  return [=](const BigInt& m, std::mt19937_64& rng) {
    const std::uint64_t r = multiplicative_order(m.convert_to<std::uint64_t>(), n64);
    auto it = cache->find(r);
    if (it == cache->end()) {
      if (r < 2) {
        // r = 1 only for m = 1; every outcome is j = 0.
        Distribution point{L, r, d_max, variant, std::vector<double>(std::size_t{1} << (2 * L), 0.0)};
        point.probabilities[0] = 1.0;
        it = cache->emplace(r, OutcomeSampler(point)).first;
      } else {
        const AqftSpec spec{L, d_max, variant};
        it = cache->emplace(r, OutcomeSampler(full_distribution(r, spec, threads))).first;
      }
    }
    return QpfSample{BigInt(it->second.draw(rng)), SampleSource::formula};
  };
}

/// Samples from the full state-vector simulation (2L <= 20).
inline OutcomeSource make_oracle_sampler(const BigInt& N, int d_max, BoundVariant variant = BoundVariant::physical) {
  const int L = bit_length(N);
  if (2 * L > kMaxOracleBits) throw std::invalid_argument("oracle sampler: 2L exceeds 20");
  auto cache = std::make_shared<std::map<std::uint64_t, OutcomeSampler>>();
  const auto n64 = N.convert_to<std::uint64_t>();
  return [=](const BigInt& m, std::mt19937_64& rng) {
    const auto m64 = m.convert_to<std::uint64_t>();
    auto it = cache->find(m64);
    if (it == cache->end()) {
      const AqftSpec spec{L, d_max, variant};
      it = cache->emplace(m64, OutcomeSampler(qpf_distribution_exact(n64, m64, spec))).first;
    }
    return QpfSample{BigInt(it->second.draw(rng)), SampleSource::oracle};
  };
}

enum class FactorStatus { quantum, classical, failure };

inline const char* to_string(FactorStatus s) {
  switch (s) {
    case FactorStatus::quantum: return "quantum";
    case FactorStatus::classical: return "classical";
    case FactorStatus::failure: return "failure";
  }
  return "?";
}

inline std::pair<BigInt, BigInt> ordered_pair(const BigInt& a, const BigInt& b) {
  return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

struct FactorReport {
  BigInt N;
  FactorStatus status = FactorStatus::failure;
  std::vector<BigInt> bases_tried;
  int samples_used = 0;
  std::optional<BigInt> r;
  std::optional<std::pair<BigInt, BigInt>> factors;
  std::string note;
  double seconds = 0.0;

  bool success() const { return factors.has_value(); }
};

/// Integer k-th root floor.
inline BigInt iroot(const BigInt& n, unsigned k) {
  if (n < 2) return n;
  BigInt lo = 1, hi = BigInt(1) << (bit_length(n) / static_cast<int>(k) + 1);
  while (lo < hi) {
    const BigInt mid = (lo + hi + 1) / 2;
    if (boost::multiprecision::pow(mid, k) <= n) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  return lo;
}

inline bool is_probable_prime(const BigInt& n) {
  if (n < 2) return false;
  boost::random::mt19937 gen(12345u);
  return boost::multiprecision::miller_rabin_test(n, 25, gen);
}

/// Returns (p, N/p) if N = p^k for a prime p and k >= 2.
inline std::optional<std::pair<BigInt, BigInt>> prime_power_split(const BigInt& N) {
  for (unsigned k = static_cast<unsigned>(bit_length(N)); k >= 2; --k) {
    const BigInt root = iroot(N, k);
    if (root >= 2 && boost::multiprecision::pow(root, k) == N && is_probable_prime(root))
      return std::make_pair(root, N / root);
  }
  return std::nullopt;
}

struct FactorOptions {
  int f_max = 100;        // total period-finding runs across all bases
  int max_bases = 8;      // bases tried before giving up
  std::uint64_t seed = 0;
};

/// Factors odd composite N following the flowchart: choose a base, take the
/// gcd shortcut if it shares a factor, collect outcomes until the order is
/// recovered, reject odd r or m^(r/2) = -1 mod N and retry with a new base.
inline FactorReport shor_factor(const FactoringInstance& inst, const OutcomeSource& sampler,
                                const FactorOptions& opts = {}) {
  const auto start = std::chrono::steady_clock::now();
  FactorReport rep;
  rep.N = inst.N;
  const BigInt& N = inst.N;
  auto finish = [&]() -> FactorReport {
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
  };

  if (N < 4) throw std::invalid_argument("shor_factor: N must be composite");
  if (N % 2 == 0) {
    rep.status = FactorStatus::classical;
    rep.factors = std::make_pair(BigInt(2), N / 2);
    rep.note = "even N";
    return finish();
  }
  if (is_probable_prime(N)) throw std::invalid_argument("shor_factor: N is prime");
  if (auto pp = prime_power_split(N)) {
    rep.status = FactorStatus::classical;
    rep.factors = *pp;
    rep.note = "prime power";
    return finish();
  }

  std::mt19937_64 rng(derive_seed(opts.seed, 0));
  boost::random::mt19937_64 base_rng(derive_seed(opts.seed, 1));
  boost::random::uniform_int_distribution<BigInt> pick(BigInt(2), N - 2);

  for (int attempt = 0; attempt < opts.max_bases; ++attempt) {
    const BigInt m = (attempt == 0 && inst.m) ? *inst.m : pick(base_rng);
    rep.bases_tried.push_back(m);
    const BigInt g = big_gcd(m, N);
    if (g > 1) {
      rep.status = FactorStatus::classical;
      rep.factors = ordered_pair(g, N / g);
      rep.note = "gcd(m, N) > 1";
      return finish();
    }

    std::vector<QpfSample> samples;
    std::optional<BigInt> r;
    while (!r && rep.samples_used < opts.f_max) {
      samples.push_back(sampler(m, rng));
      ++rep.samples_used;
      r = find_order(m, N, samples);
    }
    if (!r) {
      rep.note = "sample budget exhausted";
      return finish();
    }
    rep.r = r;
    if (*r % 2 != 0) continue;
    const BigInt x = pow_mod(m, *r / 2, N);
    if (x == N - 1 || x == 1) continue;
    const BigInt a = big_gcd(x - 1, N);
    const BigInt b = N / a;
    rep.status = FactorStatus::quantum;
    rep.factors = ordered_pair(a, b);
    rep.note.clear();
    return finish();
  }
  rep.note = "no usable base within max_bases";
  return finish();
}

}  // namespace qpf
