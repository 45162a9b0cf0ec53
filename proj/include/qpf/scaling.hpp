#pragma once

// Sweeps of the useful-output probability s at the characteristic period
// r = 2^(L-1) + 2, log-linear decay fits s ~ c 2^(-L/t), and the
// L_max / d_max / f_max calculator.

#include <qpf/parallel.hpp>
#include <qpf/qpf_model.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

namespace qpf {

inline std::uint64_t characteristic_period(int L) { return (std::uint64_t{1} << (L - 1)) + 2; }

struct ScalingPoint {
  int L = 0;
  int d_max = 0;
  std::uint64_t r = 0;
  double s = 0.0;
  double seconds = 0.0;
};

inline std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string sweep_csv_row(const ScalingPoint& p) {
  return std::to_string(p.L) + "," + std::to_string(p.d_max) + "," + std::to_string(p.r) + "," + format_g17(p.s) +
         "," + format_g17(p.seconds);
}

inline ScalingPoint parse_sweep_row(const std::string& line) {
  ScalingPoint p;
  std::istringstream in(line);
  std::string field;
  std::vector<std::string> f;
  while (std::getline(in, field, ',')) f.push_back(field);
  if (f.size() != 5) throw std::runtime_error("sweep CSV: expected 5 fields in '" + line + "'");
  p.L = std::stoi(f[0]);
  p.d_max = std::stoi(f[1]);
  p.r = std::stoull(f[2]);
  p.s = std::stod(f[3]);
  p.seconds = std::stod(f[4]);
  return p;
}

inline void write_sweep_csv(std::ostream& os, const std::vector<ScalingPoint>& pts) {
  os << "L,d_max,r,s,seconds\n";
  for (const auto& p : pts) os << sweep_csv_row(p) << '\n';
}

inline std::vector<ScalingPoint> read_sweep_csv(std::istream& is) {
  std::vector<ScalingPoint> pts;
  std::string line;
  bool header = true;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      if (line.rfind("L,", 0) == 0) continue;
    }
    pts.push_back(parse_sweep_row(line));
  }
  return pts;
}

struct SweepOptions {
  BoundVariant variant = BoundVariant::physical;
  std::optional<std::filesystem::path> cache_dir;
  unsigned threads = 0;
  // Per-point time budget in seconds (0 = none). A point whose projected cost
  // (previous L's time x 4) exceeds it is recorded with s = NaN and
  // seconds = -1 instead of being computed.
  double point_timeout = 0.0;
};

inline bool skipped(const ScalingPoint& p) { return std::isnan(p.s); }

/// Computes s(2^(L-1)+2, L, d_max) over the grid. With a cache directory,
/// each point lives in its own file and is reused verbatim on later runs.
inline std::vector<ScalingPoint> sweep(int L_min, int L_max, const std::vector<int>& d_max_set,
                                       const SweepOptions& opts = {}) {
  if (L_min < 3 || L_max < L_min || L_max > 32)
    throw std::invalid_argument("sweep: need 3 <= L_min <= L_max <= 32");
  std::vector<ScalingPoint> out;
  if (opts.cache_dir) std::filesystem::create_directories(*opts.cache_dir);
  for (int d : d_max_set) {
    double previous_seconds = 0.0;
    for (int L = L_min; L <= L_max; ++L) {
      const AqftSpec spec{L, d, opts.variant};
      spec.validate();
      std::optional<std::filesystem::path> file;
      if (opts.cache_dir) {
        file = *opts.cache_dir / ("s_L" + std::to_string(L) + "_d" + std::to_string(d) + "_" +
                                  std::string(to_string(opts.variant)) + ".csv");
        std::ifstream in(*file);
        std::string line;
        if (in && std::getline(in, line) && !line.empty()) {
          out.push_back(parse_sweep_row(line));
          continue;
        }
      }
      ScalingPoint p{L, d, characteristic_period(L), 0.0, 0.0};
      if (opts.point_timeout > 0.0 && 4.0 * previous_seconds > opts.point_timeout) {
        p.s = std::numeric_limits<double>::quiet_NaN();
        p.seconds = -1.0;
        out.push_back(p);
        continue;
      }
      const auto start = std::chrono::steady_clock::now();
      p.s = prob_useful(p.r, spec, opts.threads);
      p.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      previous_seconds = p.seconds;
      if (file) {
        // Write-then-rename so a reader never sees a partial point.
        const auto tmp = std::filesystem::path(file->string() + ".tmp");
        {
          std::ofstream o(tmp, std::ios::trunc);
          o << sweep_csv_row(p) << '\n';
        }
        std::filesystem::rename(tmp, *file);
        // Serve the stored text so cached and fresh results agree digit for digit.
        std::ifstream in(*file);
        std::string line;
        std::getline(in, line);
        p = parse_sweep_row(line);
      }
      out.push_back(p);
    }
  }
  return out;
}

struct ScalingFit {
  int d_max = 0;
  double t = 0.0;         // decay constant; +inf for non-decaying data
  double c = 0.0;         // proportionality constant
  double rms = 0.0;       // residual RMS in log2 s
  int window_lo = 0;      // smallest L in the fit window
  int window_hi = 0;      // largest L in the fit window
  bool unbounded() const { return std::isinf(t); }
};

/// Least squares of log2 s against L over the ceil(tail_fraction * n) largest
/// L; t = -1/slope, c = 2^intercept.
inline ScalingFit fit_decay(std::vector<ScalingPoint> pts, double tail_fraction = 0.5) {
  if (pts.empty()) throw std::invalid_argument("fit_decay: no points");
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) throw std::invalid_argument("fit_decay: tail_fraction in (0,1]");
  const int d = pts.front().d_max;
  for (const auto& p : pts)
    if (p.d_max != d) throw std::invalid_argument("fit_decay: points mix d_max values");
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.L < b.L; });
  const auto take = static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(pts.size()) - 1e-12));
  if (take < 4) throw std::invalid_argument("fit_decay: fewer than 4 points in the tail window");
  const std::vector<ScalingPoint> tail(pts.end() - static_cast<std::ptrdiff_t>(take), pts.end());

  double sx = 0, sy = 0;
  for (const auto& p : tail) {
    if (!(p.s > 0.0)) throw std::domain_error("fit_decay: nonpositive s in window");
    sx += p.L;
    sy += std::log2(p.s);
  }
  const double n = static_cast<double>(tail.size());
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (const auto& p : tail) {
    sxx += (p.L - mx) * (p.L - mx);
    sxy += (p.L - mx) * (std::log2(p.s) - my);
  }
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double rss = 0;
  for (const auto& p : tail) {
    const double e = std::log2(p.s) - (intercept + slope * p.L);
    rss += e * e;
  }
  ScalingFit f;
  f.d_max = d;
  f.t = slope < 0.0 ? -1.0 / slope : std::numeric_limits<double>::infinity();
  f.c = std::exp2(intercept);
  f.rms = std::sqrt(rss / n);
  f.window_lo = tail.front().L;
  f.window_hi = tail.back().L;
  return f;
}

/// One fit per d_max present in `pts`, ascending. Skipped points are ignored.
inline std::vector<ScalingFit> fit_all(const std::vector<ScalingPoint>& pts, double tail_fraction = 0.5) {
  std::map<int, std::vector<ScalingPoint>> by_d;
  for (const auto& p : pts)
    if (!skipped(p)) by_d[p.d_max].push_back(p);
  std::vector<ScalingFit> fits;
  for (auto& [d, v] : by_d) fits.push_back(fit_decay(v, tail_fraction));
  return fits;
}

struct RatioRow {
  int d_lo = 0;  // ratio is t(d_lo + 1) / t(d_lo)
  double t_lo = 0.0;
  double t_hi = 0.0;
  double ratio = 0.0;
  bool pass = false;
};

inline constexpr double kFactor4Threshold = 3.5;

/// t(d+1)/t(d) for each consecutive pair with d >= 1. d_max = 0 fits are
/// ignored. Throws if fewer than two usable fits or a gap in d_max.
inline std::vector<RatioRow> factor4_check(std::vector<ScalingFit> fits, double threshold = kFactor4Threshold) {
  std::erase_if(fits, [](const ScalingFit& f) { return f.d_max < 1; });
  std::sort(fits.begin(), fits.end(), [](const auto& a, const auto& b) { return a.d_max < b.d_max; });
  if (fits.size() < 2) throw std::invalid_argument("factor4_check: need fits for at least two consecutive d_max >= 1");
  std::vector<RatioRow> rows;
  for (std::size_t i = 0; i + 1 < fits.size(); ++i) {
    if (fits[i + 1].d_max != fits[i].d_max + 1)
      throw std::invalid_argument("factor4_check: missing d_max = " + std::to_string(fits[i].d_max + 1));
    RatioRow row{fits[i].d_max, fits[i].t, fits[i + 1].t, fits[i + 1].t / fits[i].t, false};
    row.pass = row.ratio >= threshold;
    rows.push_back(row);
  }
  return rows;
}

/// floor(4^(d_max-1) log2 f_max).
inline std::uint64_t lmax(int d_max, double f_max) {
  if (d_max < 1) throw std::invalid_argument("lmax: d_max must be >= 1");
  if (!(f_max > 1.0)) throw std::invalid_argument("lmax: f_max must be > 1");
  if (d_max > 31) throw std::invalid_argument("lmax: d_max too large");
  return static_cast<std::uint64_t>(std::floor(std::ldexp(std::log2(f_max), 2 * (d_max - 1))));
}

/// Smallest d_max with lmax(d_max, f_max) >= L.
inline int invert_lmax(std::uint64_t L, double f_max) {
  if (L < 1) throw std::invalid_argument("invert_lmax: L must be >= 1");
  if (!(f_max > 1.0)) throw std::invalid_argument("invert_lmax: f_max must be > 1");
  for (int d = 1; d <= 31; ++d)
    if (lmax(d, f_max) >= L) return d;
  throw std::domain_error("invert_lmax: no d_max <= 31 reaches L");
}

}  // namespace qpf
