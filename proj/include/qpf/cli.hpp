#pragma once

// Command-line front end. dispatch() parses arguments, runs one subcommand
// and returns the process exit code: 0 success, 1 domain error, 2 usage error.
//
// Any subcommand accepts `--config FILE`: `key=value` lines (`#` comments)
// supplying defaults for flags not given on the command line.
//
// Every file written with --out gets a sibling `<out>.manifest.json`
// recording the subcommand, parameters, seed, tool version and wall time.

#include <qpf/classical_shor.hpp>
#include <qpf/oracle_sim.hpp>
#include <qpf/qpf_model.hpp>
#include <qpf/scaling.hpp>
#include <qpf/su2.hpp>
#include <qpf/synth.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qpf::cli {

inline constexpr const char* kToolVersion = "0.1.0";

using json = nlohmann::ordered_json;

inline json big_to_json(const BigInt& x) {
  if (x >= 0 && x <= std::numeric_limits<std::uint64_t>::max()) return x.convert_to<std::uint64_t>();
  return x.str();
}

inline BigInt parse_big(const std::string& s) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
    throw std::invalid_argument("not a non-negative integer: '" + s + "'");
  return BigInt(s);
}

/// Reads `key=value` defaults. Blank lines and `#` comments are skipped.
inline std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file " + path);
  std::vector<std::pair<std::string, std::string>> kv;
  std::string line;
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    const auto b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
  };
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("config line without '=': " + line);
    kv.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return kv;
}

/// Splices config defaults into the argument list right after the
/// subcommand name, skipping keys already present as flags.
inline std::vector<std::string> apply_config(std::vector<std::string> args) {
  std::optional<std::string> path;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (!path || rest.empty()) return rest;
  auto given = [&](const std::string& key) {
    for (const auto& a : rest)
      if (a == "--" + key || a.rfind("--" + key + "=", 0) == 0) return true;
    return false;
  };
  std::vector<std::string> extra;
  for (const auto& [k, v] : read_config(*path)) {
    if (given(k)) continue;
    if (v == "true") {
      extra.push_back("--" + k);
    } else if (v != "false") {
      extra.push_back("--" + k + "=" + v);
    }
  }
  rest.insert(rest.begin() + 1, extra.begin(), extra.end());
  return rest;
}

struct Context {
  std::ostream& out;
  std::ostream& err;
  std::string subcommand;
  CLI::App* sub = nullptr;
  std::vector<std::string> outputs;
  std::optional<std::uint64_t> seed;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  json parameters() const {
    json p = json::object();
    if (!sub) return p;
    for (const CLI::Option* opt : sub->get_options()) {
      if (opt->get_name() == "--help" || opt->get_name().empty()) continue;
      const auto& res = opt->results();
      std::string name = opt->get_name();
      while (!name.empty() && name.front() == '-') name.erase(name.begin());
      if (res.empty()) {
        if (!opt->get_default_str().empty()) p[name] = opt->get_default_str();
        continue;
      }
      if (res.size() == 1) {
        p[name] = res.front();
      } else {
        p[name] = res;
      }
    }
    return p;
  }

  void write_manifest(const std::string& path) const {
    json m;
    m["subcommand"] = subcommand;
    m["parameters"] = parameters();
    m["seed"] = seed ? json(*seed) : json(nullptr);
    m["tool_version"] = kToolVersion;
    m["outputs"] = outputs;
    m["wall_time"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::ofstream f(path + ".manifest.json");
    f << m.dump(2) << '\n';
  }

  /// Writes `text` to `path` (or `out` when empty) and records the manifest.
  void emit(const std::string& path, const std::string& text) {
    if (path.empty()) {
      out << text;
      return;
    }
    std::ofstream f(path);
    if (!f) throw std::invalid_argument("cannot write " + path);
    f << text;
    f.close();
    outputs.push_back(path);
    write_manifest(path);
  }
};

inline std::string g17(double x) { return format_g17(x); }

inline AqftSpec make_spec(int L, std::optional<int> d_max, const std::string& variant) {
  AqftSpec spec{L, d_max.value_or(2 * L), parse_variant(variant)};
  spec.validate();
  return spec;
}

inline std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> v;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    const int x = std::stoi(item, &used);
    if (used != item.size()) throw std::invalid_argument("bad integer list: " + s);
    v.push_back(x);
  }
  if (v.empty()) throw std::invalid_argument("empty integer list");
  return v;
}

inline json fit_to_json(const ScalingFit& f) {
  json j;
  j["d_max"] = f.d_max;
  j["t"] = f.unbounded() ? json("inf") : json(f.t);
  j["c"] = f.c;
  j["rms"] = f.rms;
  j["window"] = {f.window_lo, f.window_hi};
  return j;
}

inline ScalingFit fit_from_json(const json& j) {
  ScalingFit f;
  f.d_max = j.at("d_max").get<int>();
  f.t = j.at("t").is_string() ? std::numeric_limits<double>::infinity() : j.at("t").get<double>();
  f.c = j.at("c").get<double>();
  f.rms = j.at("rms").get<double>();
  f.window_lo = j.at("window").at(0).get<int>();
  f.window_hi = j.at("window").at(1).get<int>();
  return f;
}

inline json synth_to_json(const SynthResult& r) {
  json j;
  j["word"] = r.word.str();
  j["length"] = r.word.size();
  j["achieved"] = r.achieved;
  j["baseline"] = r.baseline;
  j["first_better"] = r.first_better ? json(r.first_better->str()) : json(nullptr);
  j["identity_optimal"] = r.identity_optimal;
  j["epsilon_reached"] = r.epsilon_reached;
  j["budget_exhausted"] = r.budget_exhausted;
  j["explored"] = r.explored;
  j["wall_time"] = r.seconds;
  return j;
}

inline json factor_to_json(const FactorReport& r) {
  json j;
  j["N"] = big_to_json(r.N);
  json bases = json::array();
  for (const auto& m : r.bases_tried) bases.push_back(big_to_json(m));
  j["m_values_tried"] = bases;
  j["samples_used"] = r.samples_used;
  j["r"] = r.r ? big_to_json(*r.r) : json(nullptr);
  j["factors"] = r.factors ? json::array({big_to_json(r.factors->first), big_to_json(r.factors->second)}) : json(nullptr);
  j["status"] = to_string(r.status);
  if (!r.note.empty()) j["note"] = r.note;
  j["wall_time"] = r.seconds;
  return j;
}

/// Max |formula - circuit| over j for one (L, r, d_max), and the formula's
/// deviation from the expected total mass.
struct OracleComparison {
  double max_diff = 0.0;
  double mass_error = 0.0;
};

inline OracleComparison oracle_compare_one(int L, std::uint64_t r, int d_max, unsigned threads) {
  const AqftSpec spec{L, d_max, BoundVariant::physical};
  const Distribution formula = full_distribution(r, spec, threads);
  const Distribution circuit = aqft_on_periodic({L, r, 0}, spec);
  OracleComparison c;
  for (std::size_t j = 0; j < formula.probabilities.size(); ++j)
    c.max_diff = std::max(c.max_diff, std::abs(formula.probabilities[j] - circuit.probabilities[j]));
  c.mass_error = std::abs(formula.total() - expected_mass(r, L));
  return c;
}

inline int dispatch(std::vector<std::string> args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Shor period finding with a restricted rotation-gate set", "qpf"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);
  unsigned threads = 0;
  app.add_option("--threads", threads, "worker cap (0 = available parallelism)");

  Context ctx{out, err, {}, nullptr, {}, std::nullopt, std::chrono::steady_clock::now()};
  std::function<void()> action;

  // Shared AQFT flags for dist and s.
  struct AqftFlags {
    int L = 4;
    std::optional<std::uint64_t> r;
    std::optional<int> d_max;
    double sigma = 0.0;
    int trials = 1;
    std::uint64_t seed = 0;
    std::string variant = "physical";
    std::string out;
  };
  auto add_aqft_flags = [&](CLI::App* sc, AqftFlags& f) {
    sc->add_option("--L", f.L, "bit length L (register has 2L qubits)")->required();
    sc->add_option("--r", f.r, "period r, 2 <= r < 2^L")->required();
    sc->add_option("--dmax", f.d_max, "rotation cutoff d_max (default 2L: exact QFT)");
    sc->add_option("--sigma", f.sigma, "std. dev. of controlled-rotation angle error (radians)");
    sc->add_option("--trials", f.trials, "noise realisations");
    sc->add_option("--seed", f.seed, "64-bit seed");
    sc->add_option("--variant", f.variant, "physical|literal")->check(CLI::IsMember({"physical", "literal"}));
    sc->add_option("--out", f.out, "output file (default stdout)");
  };

  // dist
  AqftFlags dist_f;
  auto* dist_cmd = app.add_subcommand("dist", "full outcome distribution as CSV");
  add_aqft_flags(dist_cmd, dist_f);
  dist_cmd->callback([&] {
    action = [&] {
      const AqftSpec spec = make_spec(dist_f.L, dist_f.d_max, dist_f.variant);
      const NoiseModel noise{dist_f.sigma, dist_f.trials, dist_f.seed};
      ctx.seed = dist_f.seed;
      const Distribution d = noisy_distribution(*dist_f.r, spec, noise, threads);
      std::ostringstream csv;
      write_distribution_csv(csv, d, dist_f.sigma, dist_f.seed);
      ctx.emit(dist_f.out, csv.str());
    };
  });

  // s
  AqftFlags s_f;
  auto* s_cmd = app.add_subcommand("s", "probability of useful output");
  add_aqft_flags(s_cmd, s_f);
  s_cmd->callback([&] {
    action = [&] {
      const AqftSpec spec = make_spec(s_f.L, s_f.d_max, s_f.variant);
      const NoiseModel noise{s_f.sigma, s_f.trials, s_f.seed};
      ctx.seed = s_f.seed;
      const NoisyEstimate est = prob_useful_noisy(*s_f.r, spec, noise, threads);
      json j;
      j["L"] = spec.L;
      j["r"] = *s_f.r;
      j["d_max"] = spec.d_max;
      j["variant"] = to_string(spec.variant);
      j["sigma"] = s_f.sigma;
      j["trials"] = s_f.trials;
      j["seed"] = s_f.seed;
      j["s"] = est.mean;
      j["std_error"] = est.std_error;
      ctx.emit(s_f.out, j.dump(2) + "\n");
    };
  });

  // sweep
  int sw_lmin = 3, sw_lmax = 10;
  std::string sw_dlist = "0,1,2,3", sw_variant = "physical", sw_cache, sw_out;
  double sw_timeout = 0.0;
  auto* sweep_cmd = app.add_subcommand("sweep", "s at r = 2^(L-1)+2 over an (L, d_max) grid");
  sweep_cmd->add_option("--Lmin", sw_lmin, "smallest L (>= 3)");
  sweep_cmd->add_option("--Lmax", sw_lmax, "largest L");
  sweep_cmd->add_option("--dmax-list", sw_dlist, "comma-separated d_max values");
  sweep_cmd->add_option("--variant", sw_variant)->check(CLI::IsMember({"physical", "literal"}));
  sweep_cmd->add_option("--cache-dir", sw_cache, "per-point cache directory");
  sweep_cmd->add_option("--timeout", sw_timeout, "per-point time budget in seconds (0 = none)");
  sweep_cmd->add_option("--out", sw_out, "sweep CSV (default stdout)");
  sweep_cmd->callback([&] {
    action = [&] {
      SweepOptions opts;
      opts.variant = parse_variant(sw_variant);
      if (!sw_cache.empty()) opts.cache_dir = sw_cache;
      opts.threads = threads;
      opts.point_timeout = sw_timeout;
      const auto pts = sweep(sw_lmin, sw_lmax, parse_int_list(sw_dlist), opts);
      std::ostringstream csv;
      write_sweep_csv(csv, pts);
      ctx.emit(sw_out, csv.str());
    };
  });

  // fit
  std::string fit_in, fit_out;
  double fit_tail = 0.5;
  auto* fit_cmd = app.add_subcommand("fit", "log-linear decay fit per d_max");
  fit_cmd->add_option("--in", fit_in, "sweep CSV")->required();
  fit_cmd->add_option("--tail", fit_tail, "fraction of largest L used");
  fit_cmd->add_option("--out", fit_out, "fit JSON (default stdout)");
  fit_cmd->callback([&] {
    action = [&] {
      std::ifstream in(fit_in);
      if (!in) throw std::invalid_argument("cannot read " + fit_in);
      const auto fits = fit_all(read_sweep_csv(in), fit_tail);
      json arr = json::array();
      for (const auto& f : fits) arr.push_back(fit_to_json(f));
      ctx.emit(fit_out, arr.dump(2) + "\n");
    };
  });

  // check4
  std::string c4_in;
  double c4_threshold = kFactor4Threshold;
  bool c4_strict = false;
  auto* c4_cmd = app.add_subcommand("check4", "ratios t(d+1)/t(d) of fitted decay constants");
  c4_cmd->add_option("--in", c4_in, "fit JSON")->required();
  c4_cmd->add_option("--threshold", c4_threshold, "pass threshold");
  c4_cmd->add_flag("--strict", c4_strict, "exit 1 if any ratio fails");
  int c4_status = 0;
  c4_cmd->callback([&] {
    action = [&] {
      std::ifstream in(c4_in);
      if (!in) throw std::invalid_argument("cannot read " + c4_in);
      const json arr = json::parse(in);
      std::vector<ScalingFit> fits;
      for (const auto& j : arr) fits.push_back(fit_from_json(j));
      const auto rows = factor4_check(fits, c4_threshold);
      out << "d_max  t(d)  t(d+1)  ratio  status\n";
      bool all = true;
      for (const auto& r : rows) {
        out << r.d_lo << "->" << r.d_lo + 1 << "  " << g17(r.t_lo) << "  " << g17(r.t_hi) << "  " << g17(r.ratio) << "  "
            << (r.pass ? "PASS" : "FAIL") << '\n';
        all = all && r.pass;
      }
      if (c4_strict && !all) c4_status = 1;
    };
  });

  // lmax
  std::optional<int> lm_d;
  std::optional<std::uint64_t> lm_L;
  double lm_f = 100.0;
  bool lm_invert = false;
  auto* lm_cmd = app.add_subcommand("lmax", "L_max = floor(4^(d_max-1) log2 f_max), or its inverse");
  lm_cmd->add_option("--dmax", lm_d, "d_max");
  lm_cmd->add_option("--fmax", lm_f, "acceptable repetitions f_max")->required();
  lm_cmd->add_flag("--invert", lm_invert, "return the smallest d_max reaching --L");
  lm_cmd->add_option("--L", lm_L, "target integer length");
  lm_cmd->callback([&] {
    action = [&] {
      if (lm_invert) {
        if (!lm_L) throw CLI::RequiredError("--L");
        out << invert_lmax(*lm_L, lm_f) << '\n';
      } else {
        if (!lm_d) throw CLI::RequiredError("--dmax");
        out << lmax(*lm_d, lm_f) << '\n';
      }
    };
  });

  // cf
  std::string cf_num, cf_den;
  auto* cf_cmd = app.add_subcommand("cf", "continued fraction of NUM/DEN");
  cf_cmd->add_option("num", cf_num, "numerator")->required();
  cf_cmd->add_option("den", cf_den, "denominator")->required();
  cf_cmd->callback([&] {
    action = [&] {
      const CfExpansion cf = cf_expand(parse_big(cf_num), parse_big(cf_den));
      for (std::size_t i = 0; i < cf.denominators.size(); ++i) out << (i ? " " : "") << cf.denominators[i];
      out << '\n';
      for (std::size_t i = 0; i < cf.convergents.size(); ++i)
        out << (i ? " " : "") << cf.convergents[i].num << '/' << cf.convergents[i].den;
      out << '\n';
    };
  });

  // order
  std::string ord_N, ord_m;
  std::vector<std::string> ord_j;
  auto* ord_cmd = app.add_subcommand("order", "recover the order of m mod N from outcomes j");
  ord_cmd->add_option("--N", ord_N)->required();
  ord_cmd->add_option("--m", ord_m)->required();
  ord_cmd->add_option("--j", ord_j, "measured outcomes")->required()->expected(1, -1);
  ord_cmd->callback([&] {
    action = [&] {
      const BigInt N = parse_big(ord_N), m = parse_big(ord_m);
      std::vector<QpfSample> samples;
      for (const auto& s : ord_j) samples.push_back({parse_big(s), SampleSource::injected});
      const auto r = find_order(m, N, samples);
      json j;
      j["N"] = big_to_json(N);
      j["m"] = big_to_json(m);
      j["r"] = r ? big_to_json(*r) : json(nullptr);
      out << j.dump() << '\n';
    };
  });

  // factor
  std::string fac_N, fac_m, fac_sampler = "formula", fac_out;
  int fac_fmax = 100, fac_bases = 8;
  std::optional<int> fac_dmax;
  std::uint64_t fac_seed = 0;
  auto* fac_cmd = app.add_subcommand("factor", "factor N with simulated period finding");
  fac_cmd->add_option("--N", fac_N)->required();
  fac_cmd->add_option("--m", fac_m, "base (random when absent)");
  fac_cmd->add_option("--fmax", fac_fmax, "total period-finding runs allowed");
  fac_cmd->add_option("--max-bases", fac_bases, "bases tried before giving up");
  fac_cmd->add_option("--seed", fac_seed);
  fac_cmd->add_option("--sampler", fac_sampler)->check(CLI::IsMember({"formula", "oracle"}));
  fac_cmd->add_option("--dmax", fac_dmax, "rotation cutoff (default 2L)");
  fac_cmd->add_option("--out", fac_out, "JSON report (default stdout)");
  fac_cmd->callback([&] {
    action = [&] {
      ctx.seed = fac_seed;
      FactoringInstance inst{parse_big(fac_N), std::nullopt};
      if (!fac_m.empty()) inst.m = parse_big(fac_m);
      const int L = inst.L();
      const int d = fac_dmax.value_or(2 * L);
      const OutcomeSource sampler =
          fac_sampler == "oracle" ? make_oracle_sampler(inst.N, d) : make_formula_sampler(inst.N, d, BoundVariant::physical, threads);
      const FactorReport rep = shor_factor(inst, sampler, {fac_fmax, fac_bases, fac_seed});
      ctx.emit(fac_out, factor_to_json(rep).dump(2) + "\n");
      if (!rep.success()) throw std::domain_error("factoring failed: " + rep.note);
    };
  });

  // synth
  std::optional<int> syn_d;
  int syn_len = 31;
  std::string syn_strategy = "alternating", syn_out, syn_report;
  double syn_eps = -1.0;
  std::size_t syn_table = 20'000'000;
  auto* syn_cmd = app.add_subcommand("synth", "shortest fault-tolerant word approximating R_{2^d}");
  syn_cmd->add_option("--d", syn_d, "target R_{2^d}");
  syn_cmd->add_option("--max-len", syn_len, "maximum word length");
  syn_cmd->add_option("--strategy", syn_strategy)
      ->check(CLI::IsMember({"exhaustive", "alternating", "meet_in_middle", "mitm"}));
  syn_cmd->add_option("--epsilon", syn_eps, "target distance (default 2^-d)");
  syn_cmd->add_option("--max-table", syn_table, "meet-in-the-middle table budget");
  syn_cmd->add_option("--report", syn_report, "gate-count table for d in LO,HI instead of one search");
  syn_cmd->add_option("--out", syn_out, "JSON result (default stdout)");
  syn_cmd->callback([&] {
    action = [&] {
      if (!syn_report.empty()) {
        const auto range = parse_int_list(syn_report);
        if (range.size() != 2) throw std::invalid_argument("--report expects LO,HI");
        json arr = json::array();
        for (const auto& row : gate_count_scaling_report(range[0], range[1], syn_len, syn_table, threads)) {
          json j;
          j["d"] = row.d;
          j["epsilon"] = row.epsilon;
          j["length"] = row.length;
          j["lower_bound"] = row.lower_bound;
          j["achieved"] = row.achieved;
          j["word"] = row.word;
          arr.push_back(j);
        }
        ctx.emit(syn_out, arr.dump(2) + "\n");
        return;
      }
      if (!syn_d) throw CLI::RequiredError("--d");
      SearchConfig cfg;
      cfg.target = rotation({*syn_d});
      cfg.max_length = syn_len;
      cfg.strategy = parse_strategy(syn_strategy);
      cfg.epsilon = syn_eps > 0 ? syn_eps : std::min(0.5, std::ldexp(1.0, -*syn_d));
      cfg.max_table = syn_table;
      cfg.threads = threads;
      const SynthResult res = search(cfg);
      json j;
      j["d"] = *syn_d;
      j["max_length"] = syn_len;
      j["strategy"] = to_string(cfg.strategy);
      j["epsilon"] = cfg.epsilon;
      j.update(synth_to_json(res));
      ctx.emit(syn_out, j.dump(2) + "\n");
    };
  });

  // oracle-compare
  int oc_L = 4;
  bool oc_all = false;
  std::optional<std::uint64_t> oc_r;
  std::optional<int> oc_d;
  double oc_tol = 1e-10;
  auto* oc_cmd = app.add_subcommand("oracle-compare", "closed form vs state-vector simulation");
  oc_cmd->add_option("--L", oc_L)->required();
  oc_cmd->add_flag("--all", oc_all, "every r in [2, 2^L) and d_max in [0, 2L]");
  oc_cmd->add_option("--r", oc_r);
  oc_cmd->add_option("--dmax", oc_d);
  oc_cmd->add_option("--tol", oc_tol);
  int oc_status = 0;
  oc_cmd->callback([&] {
    action = [&] {
      if (2 * oc_L > kMaxStateQubits) throw std::invalid_argument("oracle-compare: 2L must be <= 24");
      std::vector<std::uint64_t> rs;
      std::vector<int> ds;
      if (oc_all) {
        for (std::uint64_t r = 2; r < (std::uint64_t{1} << oc_L); ++r) rs.push_back(r);
        for (int d = 0; d <= 2 * oc_L; ++d) ds.push_back(d);
      } else {
        if (!oc_r) throw CLI::RequiredError("--r (or --all)");
        rs.push_back(*oc_r);
        ds.push_back(oc_d.value_or(2 * oc_L));
      }
      double worst = 0.0, worst_mass = 0.0;
      for (auto r : rs)
        for (int d : ds) {
          const auto c = oracle_compare_one(oc_L, r, d, threads);
          worst = std::max(worst, c.max_diff);
          worst_mass = std::max(worst_mass, c.mass_error);
        }
      json j;
      j["L"] = oc_L;
      j["cases"] = rs.size() * ds.size();
      j["max_abs_diff"] = worst;
      j["max_mass_error"] = worst_mass;
      j["tol"] = oc_tol;
      j["pass"] = worst <= oc_tol && worst_mass <= oc_tol;
      out << j.dump(2) << '\n';
      if (!(worst <= oc_tol && worst_mass <= oc_tol)) oc_status = 1;
    };
  });

  try {
    args = apply_config(std::move(args));
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      // --help / --version
      app.exit(e, out, err);
      return 0;
    }
    app.exit(e, out, err);
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  for (CLI::App* sc : app.get_subcommands()) {
    ctx.subcommand = sc->get_name();
    ctx.sub = sc;
  }
  try {
    if (action) action();
  } catch (const CLI::RequiredError& e) {
    err << e.what() << '\n' << ctx.sub->help();
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return std::max(c4_status, oc_status);
}

inline int dispatch(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dispatch(std::move(args));
}

}  // namespace qpf::cli
