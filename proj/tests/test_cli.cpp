#include <qpf/cli.hpp>

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using qpf::cli::dispatch;
using json = nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = dispatch(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("qpf_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string file(const std::string& name) const { return (dir_ / name).string(); }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, ContinuedFraction) {
  const auto r = run({"cf", "31674", "65536"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "2 14 2 10 52\n1/2 14/29 29/60 304/629 15837/32768\n");
}

TEST_F(CliTest, LmaxInvert) {
  const auto r = run({"lmax", "--invert", "--L", "4096", "--fmax", "100"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "6\n");
  EXPECT_EQ(run({"lmax", "--dmax", "6", "--fmax", "100"}).out, "6803\n");
  EXPECT_EQ(run({"lmax", "--fmax", "100"}).code, 2);
}

TEST_F(CliTest, DistWritesCsvAndManifest) {
  const std::string out = file("fig2a.csv");
  const auto r = run({"dist", "--L", "4", "--r", "8", "--dmax", "8", "--out", out});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line.rfind("# L=4,r=8,d_max=8,variant=physical", 0), 0u);
  std::getline(in, line);
  EXPECT_EQ(line, "j,probability");
  int rows = 0;
  double mass = 0.0;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    const int j = std::stoi(line.substr(0, comma));
    const double p = std::stod(line.substr(comma + 1));
    EXPECT_NEAR(p, j % 32 == 0 ? 0.125 : 0.0, 1e-12);
    mass += p;
    ++rows;
  }
  EXPECT_EQ(rows, 256);
  EXPECT_NEAR(mass, 1.0, 1e-12);

  const json m = json::parse(slurp(out + ".manifest.json"));
  EXPECT_EQ(m["subcommand"], "dist");
  EXPECT_EQ(m["tool_version"], "0.1.0");
  EXPECT_EQ(m["parameters"]["L"], "4");
  EXPECT_EQ(m["outputs"][0], out);
  EXPECT_TRUE(m["wall_time"].is_number());
}

TEST_F(CliTest, NoisyDistReproducibleAcrossThreads) {
  const std::string a = file("a.csv"), b = file("b.csv");
  ASSERT_EQ(run({"--threads", "1", "dist", "--L", "4", "--r", "10", "--dmax", "3", "--sigma", "0.1", "--trials", "5",
                 "--seed", "9", "--out", a})
                .code,
            0);
  ASSERT_EQ(run({"--threads", "3", "dist", "--L", "4", "--r", "10", "--dmax", "3", "--sigma", "0.1", "--trials", "5",
                 "--seed", "9", "--out", b})
                .code,
            0);
  EXPECT_EQ(slurp(a), slurp(b));
}

TEST_F(CliTest, ProbabilityOfUsefulOutput) {
  const auto r = run({"s", "--L", "4", "--r", "8"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_NEAR(j["s"].get<double>(), 0.875, 1e-14);
  EXPECT_EQ(j["d_max"], 8);
}

TEST_F(CliTest, ManifestRerunReproduces) {
  const std::string out = file("s.json");
  ASSERT_EQ(run({"s", "--L", "5", "--r", "18", "--dmax", "3", "--sigma", "0.05", "--trials", "20", "--seed", "4",
                 "--out", out})
                .code,
            0);
  const json m = json::parse(slurp(out + ".manifest.json"));
  std::vector<std::string> args{"s"};
  for (const auto& [k, v] : m["parameters"].items()) {
    if (k == "out") continue;
    args.push_back("--" + k);
    args.push_back(v.get<std::string>());
  }
  const std::string again = file("again.json");
  args.push_back("--out");
  args.push_back(again);
  ASSERT_EQ(run(args).code, 0);
  EXPECT_EQ(json::parse(slurp(out))["s"], json::parse(slurp(again))["s"]);
}

TEST_F(CliTest, SweepFitCheck4Pipeline) {
  const std::string csv = file("sweep.csv"), fit = file("fit.json");
  ASSERT_EQ(run({"sweep", "--Lmin", "3", "--Lmax", "10", "--dmax-list", "1,2", "--cache-dir", file("cache"), "--out", csv})
                .code,
            0);
  EXPECT_TRUE(fs::exists(csv + ".manifest.json"));
  EXPECT_TRUE(fs::exists(file("cache") + "/s_L10_d2_physical.csv"));
  ASSERT_EQ(run({"fit", "--in", csv, "--tail", "0.5", "--out", fit}).code, 0);
  const json fits = json::parse(slurp(fit));
  ASSERT_EQ(fits.size(), 2u);
  EXPECT_EQ(fits[0]["d_max"], 1);
  EXPECT_EQ(fits[0]["window"], json::array({7, 10}));
  for (const char* key : {"t", "c", "rms"}) EXPECT_TRUE(fits[1].contains(key));
  const auto c = run({"check4", "--in", fit});
  EXPECT_EQ(c.code, 0);
  EXPECT_NE(c.out.find("1->2"), std::string::npos);
}

TEST_F(CliTest, OrderRecovery) {
  const auto r = run({"order", "--N", "143", "--m", "2", "--j", "31674"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json::parse(r.out)["r"], 60);
  const auto pair = run({"order", "--N", "143", "--m", "2", "--j", "3277", "5461"});
  EXPECT_EQ(json::parse(pair.out)["r"], 60);
}

TEST_F(CliTest, Factor) {
  const auto r = run({"factor", "--N", "143", "--m", "2", "--seed", "7"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["factors"], json::array({11, 13}));
  EXPECT_EQ(j["r"], 60);
  EXPECT_EQ(j["status"], "quantum");
  EXPECT_TRUE(j.contains("m_values_tried"));
  EXPECT_TRUE(j.contains("samples_used"));
  EXPECT_TRUE(j.contains("wall_time"));
  const auto o = run({"factor", "--N", "15", "--sampler", "oracle", "--fmax", "50", "--seed", "1"});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(json::parse(o.out)["factors"], json::array({3, 5}));
}

TEST_F(CliTest, FactorSeedReproducible) {
  const auto a = json::parse(run({"factor", "--N", "21", "--dmax", "3", "--fmax", "1000", "--seed", "5"}).out);
  const auto b = json::parse(run({"factor", "--N", "21", "--dmax", "3", "--fmax", "1000", "--seed", "5"}).out);
  json a2 = a, b2 = b;
  a2.erase("wall_time");
  b2.erase("wall_time");
  EXPECT_EQ(a2, b2);
}

TEST_F(CliTest, DomainErrorsExitOne) {
  EXPECT_EQ(run({"factor", "--N", "13"}).code, 1);
  EXPECT_EQ(run({"s", "--L", "4", "--r", "16"}).code, 1);
  EXPECT_EQ(run({"cf", "5", "0"}).code, 1);
  EXPECT_EQ(run({"dist", "--L", "13", "--r", "10"}).code, 1);
}

TEST_F(CliTest, UsageErrorsExitTwo) {
  const auto r = run({"dist", "--L", "4", "--r", "8", "--bogus"});
  EXPECT_EQ(r.code, 2);
  EXPECT_FALSE(r.err.empty());
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"teleport"}).code, 2);
  EXPECT_EQ(run({"dist", "--L", "4"}).code, 2);
  EXPECT_EQ(run({"dist", "--L", "4", "--r", "8", "--variant", "wavy"}).code, 2);
  EXPECT_EQ(run({"cf", "abc", "7"}).code, 1);
}

TEST_F(CliTest, Synth) {
  const std::string out = file("synth.json");
  const auto r = run({"synth", "--d", "1", "--max-len", "2", "--strategy", "exhaustive", "--out", out});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(slurp(out));
  EXPECT_EQ(j["word"], "S");
  EXPECT_LT(j["achieved"].get<double>(), 1e-15);
  EXPECT_TRUE(fs::exists(out + ".manifest.json"));
  const auto m = run({"synth", "--d", "5", "--max-len", "10", "--strategy", "mitm"});
  ASSERT_EQ(m.code, 0) << m.err;
  EXPECT_EQ(json::parse(m.out)["strategy"], "meet_in_middle");
}

TEST_F(CliTest, OracleCompare) {
  const auto r = run({"oracle-compare", "--L", "4", "--all", "--tol", "1e-10"});
  ASSERT_EQ(r.code, 0) << r.out << r.err;
  const json j = json::parse(r.out);
  EXPECT_TRUE(j["pass"].get<bool>());
  EXPECT_EQ(j["cases"], 14 * 9);
  EXPECT_LE(j["max_abs_diff"].get<double>(), 1e-10);
  EXPECT_EQ(run({"oracle-compare", "--L", "3", "--r", "5", "--dmax", "1", "--tol", "0"}).code, 1);
}

TEST_F(CliTest, ConfigFileSuppliesDefaults) {
  const std::string cfg = file("run.conf");
  {
    std::ofstream f(cfg);
    f << "# defaults\nL = 4\nr=10\ndmax=8\n";
  }
  const auto a = run({"s", "--config", cfg});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(json::parse(a.out)["r"], 10);
  const auto b = run({"s", "--config", cfg, "--r", "8"});
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(json::parse(b.out)["r"], 8);
  EXPECT_EQ(run({"s", "--config", file("missing.conf")}).code, 2);
}

TEST_F(CliTest, BinaryExitCodes) {
  const std::string bin = QPF_CLI_PATH;
  EXPECT_EQ(std::system((bin + " cf 31674 65536 > /dev/null").c_str()), 0);
  const int bad = std::system((bin + " dist --nonsense 2> /dev/null").c_str());
  ASSERT_TRUE(WIFEXITED(bad));
  EXPECT_EQ(WEXITSTATUS(bad), 2);
  const int dom = std::system((bin + " factor --N 13 2> /dev/null > /dev/null").c_str());
  ASSERT_TRUE(WIFEXITED(dom));
  EXPECT_EQ(WEXITSTATUS(dom), 1);
}
