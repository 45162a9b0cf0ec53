#pragma once

// Closed-form measurement statistics of quantum period finding when the
// Fourier transform is replaced by its banded approximation (AQFT).
//
// Bit convention: [x]_m is the coefficient of 2^m in x. For a register of
// b = 2L qubits the AQFT phase of |k> -> |j> is
//
//     phi(j, k) = 2 pi / 2^b * sum~ [j]_m [k]_n 2^(m+n)
//
// where sum~ runs over 0 <= m, n < b with lo <= m + n < b. The pair with
// m + n = b - 1 - d is realised by a controlled pi/2^d rotation (d = 0 is the
// Hadamard), so the physical variant keeps lo = b - 1 - d_max. The
// paper_literal variant uses lo = b - d_max + 1.

#include <qpf/parallel.hpp>

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qpf {

using cplx = std::complex<double>;

enum class BoundVariant { physical, paper_literal };

inline std::string_view to_string(BoundVariant v) {
  return v == BoundVariant::physical ? "physical" : "literal";
}

inline BoundVariant parse_variant(std::string_view s) {
  if (s == "physical") return BoundVariant::physical;
  if (s == "literal" || s == "paper_literal") return BoundVariant::paper_literal;
  throw std::invalid_argument("unknown bound variant: " + std::string(s));
}

struct AqftSpec {
  int L = 4;
  int d_max = 8;
  BoundVariant variant = BoundVariant::physical;

  void validate() const {
    if (L < 2 || L > 32) throw std::invalid_argument("AqftSpec: L must lie in [2, 32]");
    if (d_max < 0 || d_max > 2 * L + 1)
      throw std::invalid_argument("AqftSpec: d_max must lie in [0, 2L+1]");
  }

  int bits() const { return 2 * L; }

  /// Smallest kept m + n (may be <= 0, meaning every pair below b is kept).
  int lower_pair_sum() const {
    return variant == BoundVariant::physical ? bits() - 1 - d_max : bits() - d_max + 1;
  }

  bool keeps(int m, int n) const {
    const int s = m + n;
    return s >= lower_pair_sum() && s < bits();
  }

  /// Full-depth transform, i.e. the exact QFT.
  static AqftSpec exact(int L) { return {L, 2 * L, BoundVariant::physical}; }
};

/// 2^b - 1 as a mask; b = 64 is all ones.
inline std::uint64_t register_mask(int bits) {
  return bits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1;
}

/// 2^b as a double.
inline double register_size(int bits) { return std::ldexp(1.0, bits); }

inline void check_index(std::uint64_t x, const AqftSpec& spec, const char* what) {
  if (spec.bits() < 64 && x > register_mask(spec.bits()))
    throw std::out_of_range(std::string(what) + " outside [0, 2^(2L))");
}

/// Integer phase numerator: sum~ [j]_m [k]_n 2^(m+n) mod 2^b, evaluated
/// pair by pair.
inline std::uint64_t aqft_phase_numerator(std::uint64_t j, std::uint64_t k, const AqftSpec& spec) {
  spec.validate();
  check_index(j, spec, "j");
  check_index(k, spec, "k");
  const int b = spec.bits();
  std::uint64_t acc = 0;
  for (int m = 0; m < b; ++m) {
    if (((j >> m) & 1u) == 0) continue;
    for (int n = 0; n < b; ++n) {
      if (((k >> n) & 1u) == 0 || !spec.keeps(m, n)) continue;
      acc += std::uint64_t{1} << (m + n);
    }
  }
  return acc & register_mask(b);
}

/// AQFT phase in radians, reduced to [0, 2 pi).
inline double aqft_phase(std::uint64_t j, std::uint64_t k, const AqftSpec& spec) {
  const std::uint64_t num = aqft_phase_numerator(j, k, spec);
  return 2.0 * std::numbers::pi * std::ldexp(static_cast<double>(num), -spec.bits());
}

// --- noise ------------------------------------------------------------------

/// Gaussian angle error on every controlled rotation.
struct NoiseModel {
  double sigma = 0.0;
  int trials = 1;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(sigma >= 0.0)) throw std::invalid_argument("NoiseModel: sigma must be >= 0");
    if (trials < 1) throw std::invalid_argument("NoiseModel: trials must be >= 1");
  }
};

/// One realisation of per-gate angle offsets delta_{m,n}, indexed m * b + n.
/// Only kept pairs with m + n <= b - 2 (the controlled gates) carry noise.
struct NoiseDraw {
  int bits = 0;
  std::vector<double> delta;

  double at(int m, int n) const { return delta[static_cast<std::size_t>(m * bits + n)]; }
};

/// Draws offsets for trial `trial` of a run seeded with `seed`. Pairs are
/// visited with m outer, n inner; the stream is mt19937_64 seeded with
/// derive_seed(seed, trial).
inline NoiseDraw draw_noise(const AqftSpec& spec, double sigma, std::uint64_t seed,
                            std::uint64_t trial) {
  const int b = spec.bits();
  NoiseDraw draw{b, std::vector<double>(static_cast<std::size_t>(b * b), 0.0)};
  if (sigma == 0.0) return draw;
  std::mt19937_64 rng(derive_seed(seed, trial));
  std::normal_distribution<double> gauss(0.0, sigma);
  for (int m = 0; m < b; ++m)
    for (int n = 0; n < b; ++n)
      if (spec.keeps(m, n) && m + n <= b - 2) draw.delta[static_cast<std::size_t>(m * b + n)] = gauss(rng);
  return draw;
}

// --- distributions ----------------------------------------------------------

struct Distribution {
  int L = 0;
  std::uint64_t r = 0;
  int d_max = 0;
  BoundVariant variant = BoundVariant::physical;
  std::vector<double> probabilities;

  double total() const { return pairwise_sum(probabilities); }
};

/// r * floor(2^b / r) / 2^b: the squared norm of the truncated periodic state.
inline double expected_mass(std::uint64_t r, int L) {
  const unsigned __int128 q = static_cast<unsigned __int128>(1) << (2 * L);
  const auto count = static_cast<std::uint64_t>(q / r);
  return std::ldexp(static_cast<double>(r) * static_cast<double>(count), -2 * L);
}

namespace detail {

/// exp(2 pi i x / 2^b) from two half-width tables.
class ExpTable {
 public:
  explicit ExpTable(int bits) : bits_(bits) {
    if (bits_ > 40) return;  // direct evaluation beyond this size
    low_bits_ = (bits_ + 1) / 2;
    const std::size_t nlo = std::size_t{1} << low_bits_;
    const std::size_t nhi = std::size_t{1} << (bits_ - low_bits_);
    lo_.resize(nlo);
    hi_.resize(nhi);
    for (std::size_t x = 0; x < nlo; ++x) lo_[x] = angle(static_cast<double>(x), bits_);
    for (std::size_t y = 0; y < nhi; ++y)
      hi_[y] = angle(static_cast<double>(y), bits_ - low_bits_);
  }

  cplx operator()(std::uint64_t x) const {
    if (lo_.empty()) return angle(static_cast<double>(x), bits_);
    return hi_[x >> low_bits_] * lo_[x & ((std::uint64_t{1} << low_bits_) - 1)];
  }

 private:
  static cplx angle(double x, int bits) {
    return std::polar(1.0, 2.0 * std::numbers::pi * std::ldexp(x, -bits));
  }

  int bits_;
  int low_bits_ = 0;
  std::vector<cplx> lo_, hi_;
};

/// Per-j column weights psi_n(j) = sum over kept m of [j]_m 2^(m+n) mod 2^b,
/// and the matching noise sums nu_n(j) = sum over kept m of [j]_m delta_{m,n}.
struct ColumnWeights {
  std::vector<std::uint64_t> phase;
  std::vector<double> noise;
};

inline ColumnWeights column_weights(std::uint64_t j, const AqftSpec& spec, const NoiseDraw* noise) {
  const int b = spec.bits();
  ColumnWeights w;
  w.phase.assign(static_cast<std::size_t>(b), 0);
  if (noise) w.noise.assign(static_cast<std::size_t>(b), 0.0);
  for (int n = 0; n < b; ++n) {
    std::uint64_t acc = 0;
    double nacc = 0.0;
    for (int m = 0; m < b; ++m) {
      if (((j >> m) & 1u) == 0 || !spec.keeps(m, n)) continue;
      acc += std::uint64_t{1} << (m + n);
      if (noise) nacc += noise->at(m, n);
    }
    w.phase[static_cast<std::size_t>(n)] = acc & register_mask(b);
    if (noise) w.noise[static_cast<std::size_t>(n)] = nacc;
  }
  return w;
}

inline std::uint64_t term_count(std::uint64_t r, int L) {
  const unsigned __int128 q = static_cast<unsigned __int128>(1) << (2 * L);
  return static_cast<std::uint64_t>(q / r);
}

inline void check_period(std::uint64_t r, int L) {
  if (r < 2 || (L < 64 && r >= (std::uint64_t{1} << L)))
    throw std::invalid_argument("period r must satisfy 2 <= r < 2^L");
}

/// |sqrt(r)/2^b * sum_{p<M} exp(i phi(j, p r))|^2 with the fast column sums.
inline double prob_j_kernel(std::uint64_t j, std::uint64_t r, const AqftSpec& spec,
                            const ExpTable& table, const NoiseDraw* noise) {
  const int b = spec.bits();
  const std::uint64_t mask = register_mask(b);
  const ColumnWeights w = column_weights(j, spec, noise);
  const std::uint64_t count = term_count(r, spec.L);

  // Blocked accumulation keeps rounding growth logarithmic-ish in M.
  constexpr std::uint64_t kBlock = 1024;
  cplx total{0.0};
  cplx block{0.0};
  std::uint64_t k = 0;
  for (std::uint64_t p = 0; p < count; ++p, k += r) {
    std::uint64_t phase = 0;
    double extra = 0.0;
    for (std::uint64_t x = k; x != 0; x &= x - 1) {
      const int n = std::countr_zero(x);
      phase += w.phase[static_cast<std::size_t>(n)];
      if (noise) extra += w.noise[static_cast<std::size_t>(n)];
    }
    cplx term = table(phase & mask);
    if (noise) term *= std::polar(1.0, extra);
    block += term;
    if ((p + 1) % kBlock == 0) {
      total += block;
      block = 0.0;
    }
  }
  total += block;
  return std::ldexp(static_cast<double>(r) * std::norm(total), -2 * b);
}

}  // namespace detail

/// Probability of measuring j for period r. `noise`, when given, adds
/// sum~ [j]_m [k]_n delta_{m,n} to every phase.
inline double prob_j(std::uint64_t j, std::uint64_t r, const AqftSpec& spec,
                     const NoiseDraw* noise = nullptr) {
  spec.validate();
  detail::check_period(r, spec.L);
  check_index(j, spec, "j");
  const detail::ExpTable table(spec.bits());
  return detail::prob_j_kernel(j, r, spec, table, noise);
}

/// Reference evaluation: every term's phase from the O(L^2) pair sum.
inline double prob_j_reference(std::uint64_t j, std::uint64_t r, const AqftSpec& spec,
                               const NoiseDraw* noise = nullptr) {
  spec.validate();
  detail::check_period(r, spec.L);
  check_index(j, spec, "j");
  const int b = spec.bits();
  const std::uint64_t count = detail::term_count(r, spec.L);
  cplx acc{0.0};
  for (std::uint64_t p = 0; p < count; ++p) {
    const std::uint64_t k = p * r;
    double phi = aqft_phase(j, k, spec);
    if (noise) {
      for (int m = 0; m < b; ++m)
        for (int n = 0; n < b; ++n)
          if (((j >> m) & 1u) && ((k >> n) & 1u) && spec.keeps(m, n)) phi += noise->at(m, n);
    }
    acc += std::polar(1.0, phi);
  }
  return std::ldexp(static_cast<double>(r) * std::norm(acc), -2 * b);
}

/// {floor(c 2^b / r), ceil(c 2^b / r) : 0 < c < r}, sorted, deduplicated.
inline std::vector<std::uint64_t> useful_j_set(std::uint64_t r, int L) {
  if (L < 2 || L > 32) throw std::invalid_argument("useful_j_set: L must lie in [2, 32]");
  detail::check_period(r, L);
  const unsigned __int128 q = static_cast<unsigned __int128>(1) << (2 * L);
  std::vector<std::uint64_t> out;
  out.reserve(2 * (r - 1));
  for (std::uint64_t c = 1; c < r; ++c) {
    const unsigned __int128 num = q * c;
    const auto lo = static_cast<std::uint64_t>(num / r);
    out.push_back(lo);
    if (num % r != 0) out.push_back(lo + 1);
  }
  // Ascending and duplicate-free: consecutive targets are more than 2^L apart.
  return out;
}

namespace detail {

inline double useful_mass(std::uint64_t r, const AqftSpec& spec, const NoiseDraw* noise,
                          unsigned threads, const ExpTable& table) {
  const auto js = useful_j_set(r, spec.L);
  std::vector<double> probs(js.size());
  parallel_for(js.size(), threads,
               [&](std::size_t i) { probs[i] = prob_j_kernel(js[i], r, spec, table, noise); });
  return pairwise_sum(probs);
}

}  // namespace detail

/// s(r, L, d_max): total probability of the useful outcomes.
inline double prob_useful(std::uint64_t r, const AqftSpec& spec, unsigned threads = 0) {
  spec.validate();
  detail::check_period(r, spec.L);
  const detail::ExpTable table(spec.bits());
  return detail::useful_mass(r, spec, nullptr, threads, table);
}

struct NoisyEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  int trials = 0;
  std::vector<double> per_trial;
};

/// Mean and standard error of s over independent noise realisations. Each
/// trial uses draw_noise(spec, sigma, seed, trial) for every j.
inline NoisyEstimate prob_useful_noisy(std::uint64_t r, const AqftSpec& spec, const NoiseModel& noise,
                                       unsigned threads = 0) {
  spec.validate();
  noise.validate();
  detail::check_period(r, spec.L);
  NoisyEstimate est;
  est.trials = noise.trials;
  if (noise.sigma == 0.0) {
    est.mean = prob_useful(r, spec, threads);
    est.per_trial.assign(static_cast<std::size_t>(noise.trials), est.mean);
    return est;
  }
  const detail::ExpTable table(spec.bits());
  est.per_trial.resize(static_cast<std::size_t>(noise.trials));
  parallel_for(est.per_trial.size(), threads, [&](std::size_t t) {
    const NoiseDraw draw = draw_noise(spec, noise.sigma, noise.seed, t);
    est.per_trial[t] = detail::useful_mass(r, spec, &draw, 1, table);
  });
  const double n = static_cast<double>(noise.trials);
  est.mean = pairwise_sum(est.per_trial) / n;
  if (noise.trials > 1) {
    std::vector<double> sq(est.per_trial.size());
    for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = (est.per_trial[i] - est.mean) * (est.per_trial[i] - est.mean);
    est.std_error = std::sqrt(pairwise_sum(sq) / (n - 1.0) / n);
  }
  return est;
}

inline constexpr int kMaxDistributionBits = 24;

/// Pr(j) for every j in [0, 2^b).
inline Distribution full_distribution(std::uint64_t r, const AqftSpec& spec, unsigned threads = 0,
                                      const NoiseDraw* noise = nullptr) {
  spec.validate();
  if (spec.bits() > kMaxDistributionBits)
    throw std::invalid_argument("full_distribution: 2L exceeds the 24-qubit memory guard");
  detail::check_period(r, spec.L);
  const detail::ExpTable table(spec.bits());
  Distribution d{spec.L, r, spec.d_max, spec.variant, {}};
  d.probabilities.resize(std::size_t{1} << spec.bits());
  parallel_for(d.probabilities.size(), threads, [&](std::size_t j) {
    d.probabilities[j] = detail::prob_j_kernel(j, r, spec, table, noise);
  });
  return d;
}

/// Trial-averaged distribution under gate noise.
inline Distribution noisy_distribution(std::uint64_t r, const AqftSpec& spec, const NoiseModel& noise,
                                       unsigned threads = 0) {
  noise.validate();
  if (noise.sigma == 0.0) return full_distribution(r, spec, threads);
  Distribution acc{spec.L, r, spec.d_max, spec.variant, {}};
  acc.probabilities.resize(std::size_t{1} << spec.bits());
  std::vector<std::vector<double>> trials(static_cast<std::size_t>(noise.trials));
  for (int t = 0; t < noise.trials; ++t) {
    const NoiseDraw draw = draw_noise(spec, noise.sigma, noise.seed, static_cast<std::uint64_t>(t));
    trials[static_cast<std::size_t>(t)] = full_distribution(r, spec, threads, &draw).probabilities;
  }
  std::vector<double> column(trials.size());
  for (std::size_t j = 0; j < acc.probabilities.size(); ++j) {
    for (std::size_t t = 0; t < trials.size(); ++t) column[t] = trials[t][j];
    acc.probabilities[j] = pairwise_sum(column) / static_cast<double>(noise.trials);
  }
  return acc;
}

/// Mass of `dist` on the useful outcomes for its period.
inline double useful_mass_of(const Distribution& dist) {
  double s = 0.0;
  for (std::uint64_t j : useful_j_set(dist.r, dist.L)) s += dist.probabilities[j];
  return s;
}

/// CSV export: a '#' metadata line, header `j,probability`, one row per j.
inline void write_distribution_csv(std::ostream& os, const Distribution& d, double sigma = 0.0,
                                   std::uint64_t seed = 0) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", sigma);
  os << "# L=" << d.L << ",r=" << d.r << ",d_max=" << d.d_max << ",variant=" << to_string(d.variant)
     << ",sigma=" << buf << ",seed=" << seed << "\n";
  os << "j,probability\n";
  for (std::size_t j = 0; j < d.probabilities.size(); ++j) {
    std::snprintf(buf, sizeof buf, "%.17g", d.probabilities[j]);
    os << j << ',' << buf << '\n';
  }
}

}  // namespace qpf
