#pragma once

// Search for short fault-tolerant gate words approximating a single-qubit
// target under dist().
//
// Three strategies:
//   exhaustive     - every canonical word over {H,S,s,T,t,X,Z} up to a length
//   alternating    - only words alternating H with T or t (the U31 shape)
//   meet_in_middle - tables of distinct unitaries (mod global phase) for each
//                    half, joined by exact nearest-neighbour lookup in
//                    quaternion coordinates

#include <qpf/parallel.hpp>
#include <qpf/su2.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace qpf {

enum class SearchStrategy { exhaustive, alternating, meet_in_middle };

inline std::string_view to_string(SearchStrategy s) {
  switch (s) {
    case SearchStrategy::exhaustive: return "exhaustive";
    case SearchStrategy::alternating: return "alternating";
    case SearchStrategy::meet_in_middle: return "meet_in_middle";
  }
  return "?";
}

inline SearchStrategy parse_strategy(std::string_view s) {
  if (s == "exhaustive") return SearchStrategy::exhaustive;
  if (s == "alternating") return SearchStrategy::alternating;
  if (s == "meet_in_middle" || s == "mitm") return SearchStrategy::meet_in_middle;
  throw std::invalid_argument("unknown search strategy: " + std::string(s));
}

struct SearchConfig {
  Unitary2 target{};
  int max_length = 1;
  SearchStrategy strategy = SearchStrategy::exhaustive;
  double epsilon = 1e-3;  // reported as reached / not reached
  std::uint64_t max_words = 2'000'000'000;   // exhaustive budget
  std::size_t max_table = 20'000'000;        // meet-in-the-middle table budget
  std::size_t leaf_size = 16;                // kd-tree leaf size
  unsigned threads = 0;

  void validate() const {
    if (max_length < 1) throw std::invalid_argument("SearchConfig: max_length must be >= 1");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("SearchConfig: epsilon must lie in (0, 1)");
    if (target.unitarity_error() > 1e-9) throw std::invalid_argument("SearchConfig: target is not unitary");
  }
};

struct SynthResult {
  GateWord word;                       // best word found, canonical
  double achieved = 0.0;               // dist(target, eval(word))
  double baseline = 0.0;               // dist(target, I)
  std::optional<GateWord> first_better;  // shortest word beating the identity
  bool identity_optimal = false;       // nothing beat the identity within budget
  bool budget_exhausted = false;
  bool epsilon_reached = false;
  std::uint64_t explored = 0;
  double seconds = 0.0;
};

inline double baseline_distance(const Unitary2& target) { return dist(target, Unitary2::identity()); }

namespace detail {

constexpr double kTieTolerance = 1e-12;

/// (distance, length, text) ordering with a distance tolerance.
inline bool better_candidate(double d, std::string_view w, double best_d, std::string_view best_w) {
  if (d < best_d - kTieTolerance) return true;
  if (d > best_d + kTieTolerance) return false;
  if (w.size() != best_w.size()) return w.size() < best_w.size();
  return w < best_w;
}

/// Shortlex order: shorter first, then character order.
inline bool shortlex_less(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

inline std::size_t trailing_diagonal_run(std::string_view w) {
  std::size_t n = 0;
  while (n < w.size()) {
    const char c = w[w.size() - 1 - n];
    if (c == 'H' || c == 'X') break;
    ++n;
  }
  return n;
}

struct Tracker {
  Tracker(const Unitary2& t, double b) : target(t), baseline(b) {}

  Unitary2 target;
  double baseline;
  double best_d = std::numeric_limits<double>::infinity();
  std::string best_w;
  std::optional<std::string> first_better;
  std::uint64_t explored = 0;
  bool exhausted = false;

  void visit(const std::string& w, const Unitary2& u) {
    ++explored;
    const double d = dist(target, u);
    if (d < baseline - kTieTolerance && (!first_better || shortlex_less(w, *first_better))) first_better = w;
    if (better_candidate(d, w, best_d, best_w)) {
      best_d = d;
      best_w = w;
    }
  }

  void merge(const Tracker& o) {
    explored += o.explored;
    exhausted = exhausted || o.exhausted;
    if (o.first_better && (!first_better || shortlex_less(*o.first_better, *first_better)))
      first_better = o.first_better;
    if (better_candidate(o.best_d, o.best_w, best_d, best_w)) {
      best_d = o.best_d;
      best_w = o.best_w;
    }
  }
};

// Characters in ASCII order so depth-first order is lexicographic.
inline constexpr std::array<Gate, 7> kAsciiOrder{Gate::H, Gate::S, Gate::T, Gate::X,
                                                 Gate::Z, Gate::Sdg, Gate::Tdg};

inline void dfs_canonical(std::string& w, const Unitary2& u, int max_len, std::uint64_t budget, Tracker& tr) {
  if (tr.explored >= budget) {
    tr.exhausted = true;
    return;
  }
  tr.visit(w, u);
  if (static_cast<int>(w.size()) >= max_len) return;
  const std::size_t run = trailing_diagonal_run(w);
  const std::string_view run_view(w.data() + w.size() - run, run);
  const bool has_last = !w.empty();
  const Gate last = has_last ? gate_from_char(w.back()) : Gate::H;
  for (Gate g : kAsciiOrder) {
    if (!canonical_extension(run_view, has_last, last, g)) continue;
    w.push_back(gate_char(g));
    dfs_canonical(w, gate_matrix(g) * u, max_len, budget, tr);
    w.pop_back();
    if (tr.exhausted) return;
  }
}

inline void dfs_alternating(std::string& w, const Unitary2& u, int max_len, Tracker& tr) {
  if (!w.empty()) tr.visit(w, u);
  if (static_cast<int>(w.size()) >= max_len) return;
  auto step = [&](Gate g) {
    w.push_back(gate_char(g));
    dfs_alternating(w, gate_matrix(g) * u, max_len, tr);
    w.pop_back();
  };
  if (w.empty() || w.back() != 'H') {
    step(Gate::H);
  }
  if (w.empty() || w.back() == 'H') {
    step(Gate::T);
    step(Gate::Tdg);
  }
}

}  // namespace detail

/// Calls fn(word) for every canonical word of length exactly `length`, in
/// lexicographic order of the text form.
template <class Fn>
void enumerate_canonical(int length, Fn&& fn) {
  std::string w;
  auto rec = [&](auto&& self) -> void {
    if (static_cast<int>(w.size()) == length) {
      fn(std::string_view(w));
      return;
    }
    const std::size_t run = detail::trailing_diagonal_run(w);
    const std::string_view run_view(w.data() + w.size() - run, run);
    const bool has_last = !w.empty();
    const Gate last = has_last ? gate_from_char(w.back()) : Gate::H;
    for (Gate g : detail::kAsciiOrder) {
      if (!canonical_extension(run_view, has_last, last, g)) continue;
      w.push_back(gate_char(g));
      self(self);
      w.pop_back();
    }
  };
  rec(rec);
}

// --- quaternion coordinates -------------------------------------------------

using Quat = std::array<double, 4>;

/// Unit quaternion of U with the global phase removed. q and -q describe the
/// same unitary; dist(U, V)^2 = min(|q_U - q_V|^2, |q_U + q_V|^2) / 2.
inline Quat to_quaternion(const Unitary2& u) {
  const cplx s = std::sqrt(u.det());
  const cplx a = u(0, 0) / s;
  const cplx b = u(0, 1) / s;
  Quat q{a.real(), a.imag(), b.real(), b.imag()};
  // Sign convention: first component with magnitude above 1e-9 is positive.
  for (double x : q) {
    if (std::abs(x) > 1e-9) {
      if (x < 0)
        for (double& y : q) y = -y;
      break;
    }
  }
  return q;
}

inline double quat_dist2(const Quat& a, const Quat& b) {
  double s = 0.0;
  for (int i = 0; i < 4; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

/// Static 4-d kd-tree with exact nearest-neighbour queries.
class KdTree4 {
 public:
  KdTree4() = default;
  KdTree4(std::vector<Quat> points, std::size_t leaf_size)
      : pts_(std::move(points)), idx_(pts_.size()), leaf_(std::max<std::size_t>(leaf_size, 1)) {
    for (std::size_t i = 0; i < idx_.size(); ++i) idx_[i] = static_cast<std::uint32_t>(i);
    if (!idx_.empty()) build(0, idx_.size());
  }

  std::size_t size() const { return pts_.size(); }

  /// Index and squared distance of the nearest point.
  std::pair<std::size_t, double> nearest(const Quat& q) const {
    std::size_t best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    if (!nodes_.empty()) search(0, q, best, best_d2);
    return {best, best_d2};
  }

 private:
  struct Node {
    std::uint32_t lo, hi;       // index range
    std::int32_t left = -1, right = -1;
    int dim = 0;
    double split = 0.0;
  };

  std::int32_t build(std::size_t lo, std::size_t hi) {
    const auto id = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back({static_cast<std::uint32_t>(lo), static_cast<std::uint32_t>(hi)});
    if (hi - lo <= leaf_) return id;
    Quat mn, mx;
    mn.fill(std::numeric_limits<double>::infinity());
    mx.fill(-std::numeric_limits<double>::infinity());
    for (std::size_t i = lo; i < hi; ++i)
      for (int d = 0; d < 4; ++d) {
        mn[d] = std::min(mn[d], pts_[idx_[i]][d]);
        mx[d] = std::max(mx[d], pts_[idx_[i]][d]);
      }
    int dim = 0;
    for (int d = 1; d < 4; ++d)
      if (mx[d] - mn[d] > mx[dim] - mn[dim]) dim = d;
    const std::size_t mid = lo + (hi - lo) / 2;
    std::nth_element(idx_.begin() + static_cast<std::ptrdiff_t>(lo), idx_.begin() + static_cast<std::ptrdiff_t>(mid),
                     idx_.begin() + static_cast<std::ptrdiff_t>(hi),
                     [&](std::uint32_t a, std::uint32_t b) { return pts_[a][dim] < pts_[b][dim]; });
    const double split = pts_[idx_[mid]][dim];
    const std::int32_t l = build(lo, mid);
    const std::int32_t r = build(mid, hi);
    nodes_[static_cast<std::size_t>(id)].left = l;
    nodes_[static_cast<std::size_t>(id)].right = r;
    nodes_[static_cast<std::size_t>(id)].dim = dim;
    nodes_[static_cast<std::size_t>(id)].split = split;
    return id;
  }

  void search(std::int32_t id, const Quat& q, std::size_t& best, double& best_d2) const {
    const Node& n = nodes_[static_cast<std::size_t>(id)];
    if (n.left < 0) {
      for (std::uint32_t i = n.lo; i < n.hi; ++i) {
        const double d2 = quat_dist2(pts_[idx_[i]], q);
        if (d2 < best_d2) {
          best_d2 = d2;
          best = idx_[i];
        }
      }
      return;
    }
    const double diff = q[n.dim] - n.split;
    const std::int32_t near = diff < 0 ? n.left : n.right;
    const std::int32_t far = diff < 0 ? n.right : n.left;
    search(near, q, best, best_d2);
    if (diff * diff < best_d2) search(far, q, best, best_d2);
  }

  std::vector<Quat> pts_;
  std::vector<std::uint32_t> idx_;
  std::vector<Node> nodes_;
  std::size_t leaf_ = 16;
};

// --- distinct-unitary tables ------------------------------------------------

/// Every unitary (mod global phase) reachable with at most `depth` gates,
/// each with one shortest word in canonical form. Built breadth first over
/// the full generator set, so entries are grouped by word length.
class UnitaryTable {
 public:
  struct Entry {
    std::string word;
    Unitary2 u;
    Quat q;
  };

  UnitaryTable() = default;

  explicit UnitaryTable(int depth, std::size_t max_entries = 50'000'000) { extend_to(depth, max_entries); }

  /// Grows the table layer by layer; stops early (complete() == false) if the
  /// next layer would exceed `max_entries`.
  void extend_to(int depth, std::size_t max_entries = 50'000'000) {
    if (entries_.empty()) {
      const Unitary2 id = Unitary2::identity();
      entries_.push_back({"", id, to_quaternion(id)});
      index_.emplace(key(entries_.back().q), 0);
      layer_start_ = {0, 1};
    }
    while (depth_ < depth) {
      const std::size_t lo = layer_start_[static_cast<std::size_t>(depth_)];
      const std::size_t hi = layer_start_[static_cast<std::size_t>(depth_) + 1];
      for (std::size_t i = lo; i < hi; ++i) {
        for (Gate g : detail::kAsciiOrder) {
          const Unitary2 u = gate_matrix(g) * entries_[i].u;
          const Quat q = to_quaternion(u);
          const Key k = key(q);
          if (index_.contains(k)) continue;
          if (entries_.size() >= max_entries) {
            complete_ = false;
            finalize_layer_words(hi);
            return;
          }
          index_.emplace(k, entries_.size());
          entries_.push_back({entries_[i].word + gate_char(g), u, q});
        }
      }
      finalize_layer_words(hi);
      ++depth_;
      layer_start_.push_back(entries_.size());
    }
  }

  int depth() const { return depth_; }
  bool complete() const { return complete_; }
  std::size_t size() const { return entries_.size(); }
  const Entry& operator[](std::size_t i) const { return entries_[i]; }

  /// Entries with word length <= len occupy [0, count_up_to(len)).
  std::size_t count_up_to(int len) const {
    const int l = std::min(len, depth_);
    return l < 0 ? 0 : layer_start_[static_cast<std::size_t>(l) + 1];
  }

 private:
  using Key = std::array<std::int64_t, 4>;
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      std::uint64_t h = 0;
      for (auto x : k) h = splitmix64(h ^ static_cast<std::uint64_t>(x));
      return static_cast<std::size_t>(h);
    }
  };

  static Key key(const Quat& q) {
    Key k;
    for (int i = 0; i < 4; ++i) k[i] = std::llround(q[i] * 1e8);
    return k;
  }

  void finalize_layer_words(std::size_t from) {
    for (std::size_t i = from; i < entries_.size(); ++i)
      entries_[i].word = canonicalize(GateWord::parse(entries_[i].word)).str();
  }

  std::vector<Entry> entries_;
  std::unordered_map<Key, std::size_t, KeyHash> index_;
  std::vector<std::size_t> layer_start_;
  int depth_ = 0;
  bool complete_ = true;
};

/// Best word w = left ++ right with |left| <= ceil(n/2), |right| <= floor(n/2).
/// The right halves are indexed by quaternion; for each left half A the
/// nearest right half to target * A^dag is exact.
inline detail::Tracker mitm_join(const Unitary2& target, int n, const UnitaryTable& table, std::size_t leaf_size,
                                 unsigned threads) {
  const int left_len = (n + 1) / 2;
  const int right_len = n / 2;
  const std::size_t nleft = table.count_up_to(left_len);
  const std::size_t nright = table.count_up_to(right_len);

  std::vector<Quat> pts(nright);
  for (std::size_t i = 0; i < nright; ++i) pts[i] = table[i].q;
  const KdTree4 tree(std::move(pts), leaf_size);

  detail::Tracker total{target, baseline_distance(target)};
  const std::size_t chunks = std::max<std::size_t>(1, std::min<std::size_t>(nleft, 64));
  std::vector<detail::Tracker> parts(chunks, detail::Tracker{target, total.baseline});
  parallel_for(chunks, threads, [&](std::size_t c) {
    detail::Tracker& tr = parts[c];
    const std::size_t lo = nleft * c / chunks, hi = nleft * (c + 1) / chunks;
    for (std::size_t i = lo; i < hi; ++i) {
      const auto& a = table[i];
      const Quat want = to_quaternion(target * a.u.adjoint());
      Quat neg = want;
      for (double& x : neg) x = -x;
      auto [j1, d1] = tree.nearest(want);
      auto [j2, d2] = tree.nearest(neg);
      const std::size_t j = d1 <= d2 ? j1 : j2;
      const auto& b = table[j];
      const Unitary2 u = b.u * a.u;
      const std::string w = canonicalize(GateWord::parse(a.word + b.word)).str();
      tr.visit(w, u);
    }
  });
  for (const auto& p : parts) total.merge(p);
  return total;
}

namespace detail {

inline SynthResult finish(const Tracker& tr, const SearchConfig& cfg, std::chrono::steady_clock::time_point start) {
  SynthResult res;
  res.baseline = tr.baseline;
  res.word = GateWord::parse(tr.best_w);
  res.achieved = dist(cfg.target, eval_word(res.word));
  res.explored = tr.explored;
  res.budget_exhausted = tr.exhausted;
  if (tr.first_better) res.first_better = GateWord::parse(*tr.first_better);
  // The identity (empty word) is always a candidate, so it wins whenever
  // nothing is strictly better.
  res.identity_optimal = !tr.first_better;
  res.epsilon_reached = res.achieved <= cfg.epsilon;
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

}  // namespace detail

/// Runs the configured strategy. Ties within 1e-12 in distance go to the
/// shorter word, then the lexicographically smaller text.
inline SynthResult search(const SearchConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  detail::Tracker tr{cfg.target, baseline_distance(cfg.target)};

  switch (cfg.strategy) {
    case SearchStrategy::exhaustive: {
      // One worker per first gate; the empty word is visited here.
      tr.visit("", Unitary2::identity());
      std::vector<detail::Tracker> parts(detail::kAsciiOrder.size(), detail::Tracker{cfg.target, tr.baseline});
      const std::uint64_t share = cfg.max_words / detail::kAsciiOrder.size();
      parallel_for(parts.size(), cfg.threads, [&](std::size_t i) {
        const Gate g = detail::kAsciiOrder[i];
        std::string w(1, gate_char(g));
        detail::dfs_canonical(w, gate_matrix(g), cfg.max_length, share, parts[i]);
      });
      for (const auto& p : parts) tr.merge(p);
      break;
    }
    case SearchStrategy::alternating: {
      tr.visit("", Unitary2::identity());
      std::string w;
      detail::dfs_alternating(w, Unitary2::identity(), cfg.max_length, tr);
      break;
    }
    case SearchStrategy::meet_in_middle: {
      const int half = (cfg.max_length + 1) / 2;
      const UnitaryTable table(half, cfg.max_table);
      const detail::Tracker joined = mitm_join(cfg.target, cfg.max_length, table, cfg.leaf_size, cfg.threads);
      tr.merge(joined);
      tr.exhausted = !table.complete();
      // first_better from a join is not the global shortest; recompute it from
      // the table, whose entries cover every length up to `half` exactly.
      std::optional<std::string> shortest;
      for (std::size_t i = 0; i < table.size() && !shortest; ++i)
        if (dist(cfg.target, table[i].u) < tr.baseline - detail::kTieTolerance) shortest = table[i].word;
      if (shortest) tr.first_better = shortest;
      break;
    }
  }
  return detail::finish(tr, cfg, start);
}

/// One row of the gate-count table: shortest length reaching 2^-d.
struct GateCountRow {
  int d = 0;
  double epsilon = 0.0;
  int length = 0;          // shortest found, or the searched bound
  bool lower_bound = false;  // true when nothing within budget reached epsilon
  double achieved = 0.0;     // closest miss when lower_bound
  std::string word;
};

/// For each d, the shortest word with dist(R_{2^d}, word) <= 2^-d, searched up
/// to `max_length` gates by exact unitary tables (meet-in-the-middle beyond
/// the table depth).
inline std::vector<GateCountRow> gate_count_scaling_report(int d_lo, int d_hi, int max_length,
                                                           std::size_t max_table = 20'000'000, unsigned threads = 0) {
  if (d_lo < 0 || d_hi < d_lo) throw std::invalid_argument("gate_count_scaling_report: bad d range");
  if (max_length < 1) throw std::invalid_argument("gate_count_scaling_report: max_length must be >= 1");
  const UnitaryTable table((max_length + 1) / 2, max_table);
  std::vector<GateCountRow> rows;
  for (int d = d_lo; d <= d_hi; ++d) {
    GateCountRow row{d, std::ldexp(1.0, -d), max_length, true, 1.0, ""};
    const Unitary2 target = rotation({d});
    // Within the table every length is exact.
    for (std::size_t i = 0; i < table.size(); ++i) {
      const double dd = dist(target, table[i].u);
      if (dd <= row.epsilon) {
        row = {d, row.epsilon, static_cast<int>(table[i].word.size()), false, dd, table[i].word};
        break;
      }
    }
    for (int n = table.depth() + 1; row.lower_bound && n <= max_length && n <= 2 * table.depth(); ++n) {
      const detail::Tracker tr = mitm_join(target, n, table, 16, threads);
      if (tr.best_d <= row.epsilon) {
        row = {d, row.epsilon, static_cast<int>(tr.best_w.size()), false, tr.best_d, tr.best_w};
      } else if (tr.best_d < row.achieved) {
        row.achieved = tr.best_d;  // closest miss
        row.word = tr.best_w;
      }
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace qpf
