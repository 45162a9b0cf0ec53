#pragma once

// Exact 2x2 / 4x4 complex matrix arithmetic, the fault-tolerant generator
// set {H, S, S^dag, T, T^dag, X, Z}, phase rotations R_{2^d}, and the
// trace distance used to rank gate-word approximations.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qpf {

using cplx = std::complex<double>;

/// Row-major 2x2 complex matrix. Every constructor used in this library
/// produces a unitary; products are never re-unitarized.
struct Unitary2 {
  std::array<cplx, 4> m{cplx{1.0}, cplx{0.0}, cplx{0.0}, cplx{1.0}};

  constexpr cplx operator()(int row, int col) const { return m[2 * row + col]; }
  cplx& operator()(int row, int col) { return m[2 * row + col]; }

  static Unitary2 identity() { return {}; }
  static Unitary2 diag(cplx a, cplx b) { return {{a, cplx{0.0}, cplx{0.0}, b}}; }

  friend Unitary2 operator*(const Unitary2& a, const Unitary2& b) {
    return {{a.m[0] * b.m[0] + a.m[1] * b.m[2], a.m[0] * b.m[1] + a.m[1] * b.m[3],
             a.m[2] * b.m[0] + a.m[3] * b.m[2], a.m[2] * b.m[1] + a.m[3] * b.m[3]}};
  }

  Unitary2 adjoint() const {
    return {{std::conj(m[0]), std::conj(m[2]), std::conj(m[1]), std::conj(m[3])}};
  }

  cplx trace() const { return m[0] + m[3]; }
  cplx det() const { return m[0] * m[3] - m[1] * m[2]; }

  /// Largest entrywise deviation of U^dag U from the identity.
  double unitarity_error() const {
    const Unitary2 p = adjoint() * *this;
    double err = 0.0;
    for (int i = 0; i < 4; ++i) {
      const cplx want = (i == 0 || i == 3) ? cplx{1.0} : cplx{0.0};
      err = std::max(err, std::abs(p.m[i] - want));
    }
    return err;
  }

  double max_abs_diff(const Unitary2& o) const {
    double err = 0.0;
    for (int i = 0; i < 4; ++i) err = std::max(err, std::abs(m[i] - o.m[i]));
    return err;
  }
};

/// sqrt((2 - |tr(U^dag V)|) / 2). Symmetric, global-phase invariant,
/// satisfies the triangle inequality.
///
/// Evaluated as sqrt((4 - |tr W|^2) / (2 (2 + |tr W|))) with W = U^dag V and
/// 4 - |tr W|^2 = |W00 - W11|^2 + 2 (|W01|^2 + |W10|^2), which avoids the
/// cancellation in 2 - |tr W| for nearby unitaries.
inline double dist(const Unitary2& u, const Unitary2& v) {
  const Unitary2 w = u.adjoint() * v;
  const double num = std::norm(w.m[0] - w.m[3]) + 2.0 * (std::norm(w.m[1]) + std::norm(w.m[2]));
  const double den = 2.0 * (2.0 + std::abs(w.trace()));
  const double x = num / den;
  return x >= 1.0 ? 1.0 : std::sqrt(x);
}

/// R_{2^d} = diag(1, exp(i pi / 2^d)); d = 0 is Z, 1 is S, 2 is T.
struct RotationTarget {
  int d = 0;
};

inline Unitary2 rotation(RotationTarget target) {
  if (target.d < 0) throw std::invalid_argument("rotation: d must be >= 0");
  const double angle = std::ldexp(std::numbers::pi, -target.d);
  return Unitary2::diag(1.0, std::polar(1.0, angle));
}

/// diag(1, exp(i angle)).
inline Unitary2 phase_gate(double angle) {
  return Unitary2::diag(1.0, std::polar(1.0, angle));
}

// --- generators -------------------------------------------------------------

enum class Gate : std::uint8_t { H, S, Sdg, T, Tdg, X, Z };

inline constexpr std::array<Gate, 7> kAllGates{Gate::H, Gate::S, Gate::Sdg, Gate::T,
                                               Gate::Tdg, Gate::X, Gate::Z};

inline char gate_char(Gate g) {
  switch (g) {
    case Gate::H: return 'H';
    case Gate::S: return 'S';
    case Gate::Sdg: return 's';
    case Gate::T: return 'T';
    case Gate::Tdg: return 't';
    case Gate::X: return 'X';
    case Gate::Z: return 'Z';
  }
  return '?';
}

inline Gate gate_from_char(char c) {
  switch (c) {
    case 'H': return Gate::H;
    case 'S': return Gate::S;
    case 's': return Gate::Sdg;
    case 'T': return Gate::T;
    case 't': return Gate::Tdg;
    case 'X': return Gate::X;
    case 'Z': return Gate::Z;
    default: break;
  }
  throw std::invalid_argument(std::string("unknown gate symbol '") + c + "'");
}

inline bool is_diagonal(Gate g) { return g != Gate::H && g != Gate::X; }

/// Exponent k such that the diagonal gate equals T^k (mod 8).
inline int t_power(Gate g) {
  switch (g) {
    case Gate::T: return 1;
    case Gate::S: return 2;
    case Gate::Z: return 4;
    case Gate::Sdg: return 6;
    case Gate::Tdg: return 7;
    default: break;
  }
  throw std::invalid_argument("t_power: gate is not diagonal");
}

inline const Unitary2& gate_matrix(Gate g) {
  static const std::array<Unitary2, 7> table = [] {
    const double h = 1.0 / std::numbers::sqrt2;
    const cplx w = std::polar(1.0, std::numbers::pi / 4);
    std::array<Unitary2, 7> t{};
    t[static_cast<int>(Gate::H)] = {{h, h, h, -h}};
    t[static_cast<int>(Gate::S)] = Unitary2::diag(1.0, cplx{0.0, 1.0});
    t[static_cast<int>(Gate::Sdg)] = Unitary2::diag(1.0, cplx{0.0, -1.0});
    t[static_cast<int>(Gate::T)] = Unitary2::diag(1.0, w);
    t[static_cast<int>(Gate::Tdg)] = Unitary2::diag(1.0, std::conj(w));
    t[static_cast<int>(Gate::X)] = {{0.0, 1.0, 1.0, 0.0}};
    t[static_cast<int>(Gate::Z)] = Unitary2::diag(1.0, -1.0);
    return t;
  }();
  return table[static_cast<int>(g)];
}

// --- gate words -------------------------------------------------------------

/// Ordered gate sequence. The text form is whitespace-free over
/// {H,S,s,T,t,X,Z}, lowercase meaning adjoint. The first symbol is the first
/// gate applied, so eval("AB") = B * A as a matrix product.
struct GateWord {
  std::vector<Gate> gates;

  std::size_t size() const { return gates.size(); }
  bool empty() const { return gates.empty(); }

  static GateWord parse(std::string_view text) {
    GateWord w;
    w.gates.reserve(text.size());
    for (char c : text) w.gates.push_back(gate_from_char(c));
    return w;
  }

  std::string str() const {
    std::string s;
    s.reserve(gates.size());
    for (Gate g : gates) s.push_back(gate_char(g));
    return s;
  }

  friend GateWord operator+(const GateWord& a, const GateWord& b) {
    GateWord w = a;
    w.gates.insert(w.gates.end(), b.gates.begin(), b.gates.end());
    return w;
  }

  friend bool operator==(const GateWord&, const GateWord&) = default;
};

inline Unitary2 eval_word(const GateWord& word) {
  Unitary2 u = Unitary2::identity();
  for (Gate g : word.gates) u = gate_matrix(g) * u;
  return u;
}

inline Unitary2 eval_word(std::string_view text) { return eval_word(GateWord::parse(text)); }

/// The 31-gate approximation of R_128 found by exhaustive search.
inline constexpr std::string_view kU31 = "HTHtHTHTHTHtHtHTHTHtHtHTHtHtHtH";

// --- canonical form ---------------------------------------------------------
//
// Rules: HH -> I, XX -> I, and every maximal run of diagonal gates is merged
// into T^k and re-emitted as the fixed shortest representative below.

/// Shortest sorted diagonal word for T^k, k in [0, 8).
inline std::string_view diagonal_word(int k) {
  static constexpr std::array<std::string_view, 8> table{"", "T", "S", "ST", "Z", "ZT", "s", "t"};
  return table[static_cast<std::size_t>(((k % 8) + 8) % 8)];
}

inline GateWord canonicalize(const GateWord& word) {
  // Stack of items: 'H', 'X', or a diagonal exponent stored as 0..7 (+ 'D' tag).
  struct Item {
    char kind;  // 'H', 'X', 'D'
    int k;
  };
  std::vector<Item> stack;
  for (Gate g : word.gates) {
    if (g == Gate::H || g == Gate::X) {
      const char kind = gate_char(g);
      if (!stack.empty() && stack.back().kind == kind) {
        stack.pop_back();
      } else {
        stack.push_back({kind, 0});
      }
      continue;
    }
    const int k = t_power(g);
    if (!stack.empty() && stack.back().kind == 'D') {
      stack.back().k = (stack.back().k + k) % 8;
      if (stack.back().k == 0) stack.pop_back();
    } else {
      stack.push_back({'D', k});
    }
  }
  GateWord out;
  for (const Item& it : stack) {
    if (it.kind == 'D') {
      for (char c : diagonal_word(it.k)) out.gates.push_back(gate_from_char(c));
    } else {
      out.gates.push_back(gate_from_char(it.kind));
    }
  }
  return out;
}

inline bool is_canonical(const GateWord& word) { return canonicalize(word) == word; }

/// Whether appending `g` to a canonical word whose trailing diagonal run is
/// `run` (possibly empty) and whose last gate is `last` keeps it canonical.
inline bool canonical_extension(std::string_view run, bool has_last, Gate last, Gate g) {
  if (g == Gate::H || g == Gate::X) return !(has_last && last == g);
  std::string next(run);
  next.push_back(gate_char(g));
  for (int k = 1; k < 8; ++k) {
    if (diagonal_word(k) == next) return true;
  }
  return false;
}

// --- two-qubit gates --------------------------------------------------------

/// Row-major 4x4 complex matrix. Basis index = 2 * (first qubit) + (second).
struct Matrix4 {
  std::array<cplx, 16> m{};

  static Matrix4 identity() {
    Matrix4 r;
    for (int i = 0; i < 4; ++i) r.m[5 * i] = 1.0;
    return r;
  }
  cplx operator()(int row, int col) const { return m[4 * row + col]; }
  cplx& operator()(int row, int col) { return m[4 * row + col]; }

  friend Matrix4 operator*(const Matrix4& a, const Matrix4& b) {
    Matrix4 r;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        cplx acc{0.0};
        for (int k = 0; k < 4; ++k) acc += a(i, k) * b(k, j);
        r(i, j) = acc;
      }
    return r;
  }

  /// Max entrywise |A - e^{i phi} B| with phi chosen from the largest entry.
  double diff_up_to_phase(const Matrix4& o) const {
    int best = 0;
    for (int i = 1; i < 16; ++i)
      if (std::abs(o.m[i]) > std::abs(o.m[best])) best = i;
    if (std::abs(m[best]) == 0.0) return 1.0;
    const cplx phase = m[best] / o.m[best];
    const cplx unit = phase / std::abs(phase);
    double err = 0.0;
    for (int i = 0; i < 16; ++i) err = std::max(err, std::abs(m[i] - unit * o.m[i]));
    return err;
  }
};

/// diag(1, 1, 1, exp(i pi / 2^d)).
inline Matrix4 controlled_rotation_matrix(int d) {
  if (d < 0) throw std::invalid_argument("controlled_rotation_matrix: d must be >= 0");
  Matrix4 r = Matrix4::identity();
  r.m[15] = std::polar(1.0, std::ldexp(std::numbers::pi, -d));
  return r;
}

inline Matrix4 kron(const Unitary2& a, const Unitary2& b) {
  Matrix4 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) r(2 * i + k, 2 * j + l) = a(i, j) * b(k, l);
  return r;
}

/// One element of a two-qubit decomposition: a single-qubit gate on qubit 0
/// (control) or 1 (target), or a CNOT from qubit 0 to qubit 1.
struct TwoQubitOp {
  enum class Kind { Single, Cnot } kind = Kind::Single;
  int qubit = 0;
  Unitary2 gate{};
  std::string label;  // e.g. "R(pi/128)", "R(-pi/128)", "H", "CNOT"

  Matrix4 matrix() const {
    if (kind == Kind::Cnot) {
      Matrix4 r;
      r(0, 0) = r(1, 1) = 1.0;
      r(2, 3) = r(3, 2) = 1.0;
      return r;
    }
    return qubit == 0 ? kron(gate, Unitary2::identity()) : kron(Unitary2::identity(), gate);
  }
};

/// Product of a time-ordered op sequence (first op applied first).
inline Matrix4 circuit_matrix(const std::vector<TwoQubitOp>& ops) {
  Matrix4 u = Matrix4::identity();
  for (const auto& op : ops) u = op.matrix() * u;
  return u;
}

inline int cnot_count(const std::vector<TwoQubitOp>& ops) {
  int n = 0;
  for (const auto& op : ops) n += op.kind == TwoQubitOp::Kind::Cnot ? 1 : 0;
  return n;
}

/// Decomposes the controlled pi/2^d rotation into single-qubit gates and
/// CNOTs. d = 0 (controlled-Z) needs a single CNOT conjugated by Hadamards on
/// the target. For d >= 1 the entangling content is not CNOT-equivalent, so
/// the result is R(a) on control, then CNOT, R(-a) on target, CNOT,
/// R(a) on target, with a = pi / 2^(d+1).
inline std::vector<TwoQubitOp> decompose_controlled(int d) {
  if (d < 0) throw std::invalid_argument("decompose_controlled: d must be >= 0");
  using K = TwoQubitOp::Kind;
  const TwoQubitOp cnot{K::Cnot, 0, {}, "CNOT"};
  if (d == 0) {
    const Unitary2& h = gate_matrix(Gate::H);
    return {{K::Single, 1, h, "H"}, cnot, {K::Single, 1, h, "H"}};
  }
  const double a = std::ldexp(std::numbers::pi, -(d + 1));
  const std::string angle = "pi/" + std::to_string(1LL << (d + 1));
  return {{K::Single, 0, phase_gate(a), "R(" + angle + ")"},
          cnot,
          {K::Single, 1, phase_gate(-a), "R(-" + angle + ")"},
          cnot,
          {K::Single, 1, phase_gate(a), "R(" + angle + ")"}};
}

}  // namespace qpf
