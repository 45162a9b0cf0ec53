#pragma once

// Dense state-vector simulation of quantum period finding at small sizes.
// This is the ground truth the closed-form model is tested against, so it
// applies the AQFT circuit gate by gate and never uses the phase formula.

#include <qpf/parallel.hpp>
#include <qpf/qpf_model.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

namespace qpf {

inline constexpr int kMaxStateQubits = 24;

/// 2^n complex amplitudes; qubit q is bit q of the basis index.
class StateVector {
 public:
  explicit StateVector(int num_qubits) : n_(num_qubits) {
    if (n_ < 1 || n_ > kMaxStateQubits)
      throw std::invalid_argument("StateVector: qubit count must lie in [1, 24]");
    amp_.assign(std::size_t{1} << n_, cplx{0.0});
    amp_[0] = 1.0;
  }

  StateVector(int num_qubits, std::vector<cplx> amplitudes) : n_(num_qubits), amp_(std::move(amplitudes)) {
    if (n_ < 1 || n_ > kMaxStateQubits)
      throw std::invalid_argument("StateVector: qubit count must lie in [1, 24]");
    if (amp_.size() != (std::size_t{1} << n_))
      throw std::invalid_argument("StateVector: amplitude count must be 2^n");
  }

  static StateVector basis(int num_qubits, std::uint64_t index) {
    StateVector s(num_qubits);
    s.amp_[0] = 0.0;
    s.amp_.at(index) = 1.0;
    return s;
  }

  int num_qubits() const { return n_; }
  std::size_t size() const { return amp_.size(); }
  const std::vector<cplx>& amplitudes() const { return amp_; }
  cplx operator[](std::size_t i) const { return amp_[i]; }

  double norm2() const {
    std::vector<double> p(amp_.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::norm(amp_[i]);
    return pairwise_sum(p);
  }

  std::vector<double> probabilities() const {
    std::vector<double> p(amp_.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::norm(amp_[i]);
    return p;
  }

  void apply_h(int q) {
    const std::size_t bit = std::size_t{1} << q;
    const double h = 1.0 / std::numbers::sqrt2;
    for (std::size_t i = 0; i < amp_.size(); ++i) {
      if (i & bit) continue;
      const cplx a = amp_[i];
      const cplx b = amp_[i | bit];
      amp_[i] = h * (a + b);
      amp_[i | bit] = h * (a - b);
    }
  }

  /// diag(1, 1, 1, e^{i angle}) on qubits a, b (symmetric in a and b).
  void apply_cphase(int a, int b, double angle) {
    const std::size_t mask = (std::size_t{1} << a) | (std::size_t{1} << b);
    const cplx phase = std::polar(1.0, angle);
    for (std::size_t i = 0; i < amp_.size(); ++i)
      if ((i & mask) == mask) amp_[i] *= phase;
  }

  void reverse_qubits() {
    for (std::size_t i = 0; i < amp_.size(); ++i) {
      const std::size_t j = reverse_bits(i);
      if (i < j) std::swap(amp_[i], amp_[j]);
    }
  }

  std::size_t reverse_bits(std::size_t i) const {
    std::size_t out = 0;
    for (int q = 0; q < n_; ++q)
      if (i & (std::size_t{1} << q)) out |= std::size_t{1} << (n_ - 1 - q);
    return out;
  }

 private:
  int n_;
  std::vector<cplx> amp_;
};

/// Applies the AQFT circuit on 2L qubits. For target qubit t from 2L-1 down
/// to 0: a Hadamard on t, then controlled pi/2^(t-c) rotations from each
/// lower qubit c = t-1 .. 0 whose output/input pair (2L-1-t, c) is kept by
/// `spec`. Finishes with the qubit-order reversal. With `noise`, the rotation
/// for pair (m, n) gets angle pi/2^d + delta_{m,n}.
inline void apply_aqft_circuit(StateVector& state, const AqftSpec& spec, const NoiseDraw* noise = nullptr) {
  spec.validate();
  const int b = spec.bits();
  if (state.num_qubits() != b) throw std::invalid_argument("apply_aqft_circuit: state must have 2L qubits");
  for (int t = b - 1; t >= 0; --t) {
    state.apply_h(t);
    const int m = b - 1 - t;
    for (int c = t - 1; c >= 0; --c) {
      if (!spec.keeps(m, c)) continue;
      double angle = std::ldexp(std::numbers::pi, -(t - c));
      if (noise) angle += noise->at(m, c);
      state.apply_cphase(t, c, angle);
    }
  }
  state.reverse_qubits();
}

/// Direct matrix of the AQFT formula, A[j][k] = exp(i phi(j, k)) / 2^L,
/// row-major. Only for 2L <= 12.
inline std::vector<cplx> aqft_matrix(const AqftSpec& spec) {
  spec.validate();
  if (spec.bits() > 12) throw std::invalid_argument("aqft_matrix: 2L must be <= 12");
  const std::size_t q = std::size_t{1} << spec.bits();
  const double scale = std::ldexp(1.0, -spec.L);
  std::vector<cplx> a(q * q);
  for (std::size_t j = 0; j < q; ++j)
    for (std::size_t k = 0; k < q; ++k) a[j * q + k] = std::polar(scale, aqft_phase(j, k, spec));
  return a;
}

/// The state after measuring f: amplitude sqrt(r)/2^L on k0 + n r for
/// 0 <= n < floor(2^(2L) / r).
struct PeriodicInput {
  int L = 4;
  std::uint64_t r = 2;
  std::uint64_t k0 = 0;

  void validate() const {
    if (L < 2 || 2 * L > kMaxStateQubits) throw std::invalid_argument("PeriodicInput: 2L must lie in [4, 24]");
    if (r < 2 || r >= (std::uint64_t{1} << L)) throw std::invalid_argument("PeriodicInput: need 2 <= r < 2^L");
    if (k0 >= r) throw std::invalid_argument("PeriodicInput: need k0 < r");
  }

  StateVector state() const {
    validate();
    const int b = 2 * L;
    const std::uint64_t count = (std::uint64_t{1} << b) / r;
    std::vector<cplx> amp(std::size_t{1} << b, cplx{0.0});
    const double a = std::sqrt(static_cast<double>(r)) * std::ldexp(1.0, -L);
    for (std::uint64_t n = 0; n < count; ++n) amp[k0 + n * r] = a;
    return {b, std::move(amp)};
  }
};

inline Distribution aqft_on_periodic(const PeriodicInput& input, const AqftSpec& spec,
                                     const NoiseDraw* noise = nullptr) {
  input.validate();
  if (spec.L != input.L) throw std::invalid_argument("aqft_on_periodic: L mismatch");
  StateVector s = input.state();
  apply_aqft_circuit(s, spec, noise);
  return {spec.L, input.r, spec.d_max, spec.variant, s.probabilities()};
}

inline int bit_length(std::uint64_t x) {
  int n = 0;
  while (x) {
    ++n;
    x >>= 1;
  }
  return n;
}

/// Multiplicative order of m modulo N by direct iteration.
inline std::uint64_t multiplicative_order(std::uint64_t m, std::uint64_t N) {
  if (N < 2 || std::gcd(m, N) != 1) throw std::invalid_argument("multiplicative_order: need gcd(m, N) = 1");
  std::uint64_t x = m % N;
  std::uint64_t r = 1;
  while (x != 1 % N) {
    x = static_cast<std::uint64_t>((static_cast<unsigned __int128>(x) * m) % N);
    ++r;
  }
  return r;
}

inline constexpr int kMaxOracleBits = 20;

/// Full simulation of period finding for f(k) = m^k mod N: uniform
/// superposition over k, f evaluated classically, each f-register branch
/// transformed by the AQFT circuit, outcome probabilities summed over branches.
/// spec.L must be the bit length of N.
inline Distribution qpf_distribution_exact(std::uint64_t N, std::uint64_t m, const AqftSpec& spec,
                                           const NoiseDraw* noise = nullptr) {
  spec.validate();
  if (N < 3 || std::gcd(m, N) != 1) throw std::invalid_argument("qpf_distribution_exact: need gcd(m, N) = 1");
  if (bit_length(N) != spec.L) throw std::invalid_argument("qpf_distribution_exact: spec.L must equal bit length of N");
  if (spec.bits() > kMaxOracleBits) throw std::invalid_argument("qpf_distribution_exact: 2L exceeds 20-qubit guard");
  const int b = spec.bits();
  const std::size_t q = std::size_t{1} << b;

  // Group k by f(k).
  std::map<std::uint64_t, std::vector<std::uint64_t>> branches;
  std::uint64_t f = 1 % N;
  for (std::size_t k = 0; k < q; ++k) {
    branches[f].push_back(k);
    f = static_cast<std::uint64_t>((static_cast<unsigned __int128>(f) * m) % N);
  }

  const double amp = std::ldexp(1.0, -spec.L);
  std::vector<double> probs(q, 0.0);
  for (const auto& [value, ks] : branches) {
    std::vector<cplx> a(q, cplx{0.0});
    for (std::uint64_t k : ks) a[k] = amp;
    StateVector s(b, std::move(a));
    apply_aqft_circuit(s, spec, noise);
    for (std::size_t j = 0; j < q; ++j) probs[j] += std::norm(s[j]);
  }
  return {spec.L, multiplicative_order(m, N), spec.d_max, spec.variant, std::move(probs)};
}

}  // namespace qpf
