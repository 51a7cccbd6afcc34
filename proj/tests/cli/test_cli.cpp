#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fockcat/channels.hpp"
#include "fockcat/io.hpp"

using namespace fockcat;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string output;
};

fs::path workdir() {
  const fs::path dir = fs::temp_directory_path() / "fockcat_cli_test";
  fs::create_directories(dir);
  return dir;
}

Run cli(const std::string& args) {
  const std::string cmd = std::string(FOCKCAT_CLI) + " " + args + " 2>&1";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[512];
  while (fgets(buf, sizeof buf, pipe)) r.output += buf;
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string path(const std::string& name) { return (workdir() / name).string(); }

std::string slurp(const std::string& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST(Cli, IdealSweepStartsAtUnitFidelity) {
  const auto r = cli("sweep --ideal --steps 101 --out " + path("ideal.csv"));
  ASSERT_EQ(r.code, 0) << r.output;
  const auto s = io::read_sweep_csv(path("ideal.csv"));
  ASSERT_EQ(s.rows.size(), 101u);
  EXPECT_EQ(s.rows[0].reflectivity, 0.0);
  EXPECT_GE(s.rows[0].fidelity, 0.999);
  EXPECT_TRUE(fs::exists(path("ideal.csv") + ".manifest.json"));
}

TEST(Cli, RealisticSweepPeaksNearOperatingPoint) {
  const auto r = cli("sweep --realistic --config paper --r-min 0.6 --r-max 0.8 --steps 21 --out " + path("real.csv"));
  ASSERT_EQ(r.code, 0) << r.output;
  const auto s = io::read_sweep_csv(path("real.csv"));
  const auto& best = s.best();
  EXPECT_NEAR(best.reflectivity, 0.72, 0.005 + 1e-9);
}

TEST(Cli, MissingConfigIsUsageError) {
  const auto r = cli("sweep --config /definitely/missing.json --out " + path("x.csv"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("/definitely/missing.json"), std::string::npos) << r.output;
}

TEST(Cli, SimulateReportsHeadlineNumbers) {
  auto r = cli("simulate --parity odd --R 0.72 --config paper --out " + path("odd.json") + " --wigner " +
               path("odd_w.csv"));
  ASSERT_EQ(r.code, 0) << r.output;
  const auto odd = io::read_json(path("odd.json"));
  EXPECT_NEAR(odd.at("closest_scss").at("fidelity").get<double>(), 0.57, 0.02);
  EXPECT_NEAR(odd.at("closest_scss").at("alpha").get<double>(), 2.47, 0.10);
  EXPECT_EQ(odd.at("negative_regions").get<int>(), 3);
  r = cli("simulate --parity even --R 0.72 --config paper --out " + path("even.json"));
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_NEAR(io::read_json(path("even.json")).at("closest_scss").at("fidelity").get<double>(), 0.61, 0.03);
  EXPECT_EQ(cli("simulate --R 1.5 --out " + path("bad.json")).code, 2);
  EXPECT_EQ(cli("simulate --parity sideways").code, 2);
}

TEST(Cli, TomographyOnSyntheticFixture) {
  auto r = cli("simulate --out " + path("truth.json"));
  ASSERT_EQ(r.code, 0) << r.output;
  r = cli("sample --state " + path("truth.json") + " -n 16339 --seed 5 --out " + path("fixture.csv"));
  ASSERT_EQ(r.code, 0) << r.output;
  r = cli("tomo --in " + path("fixture.csv") + " --target-alpha 2.47 --target-z 0.56 --bootstrap 100 --seed 3 --out " +
          path("tomo.json"));
  ASSERT_EQ(r.code, 0) << r.output;
  const auto truth = io::density_from_json(io::read_json(path("truth.json")).at("state"));
  const double oracle = fidelity(truth, cat_state({2.47, 0.56, Parity::odd}, truth.truncation()));
  const auto rep = io::read_json(path("tomo.json"));
  EXPECT_NEAR(rep.at("fidelity").get<double>(), oracle, 0.05);
  const auto& b = rep.at("bootstrap");
  EXPECT_EQ(b.at("n_repetitions").get<int>(), 100);
  EXPECT_LE(b.at("lower").get<double>(), b.at("point_estimate").get<double>());
  EXPECT_LE(b.at("point_estimate").get<double>(), b.at("upper").get<double>());
}

TEST(Cli, MalformedQuadratureRowNamesLine) {
  std::ofstream(path("broken.csv")) << "x,theta\n0.1,0.2\n0.3,0.4\n0.5;0.6\n";
  const auto r = cli("tomo --in " + path("broken.csv") + " --out " + path("broken.json"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find(":4:"), std::string::npos) << r.output;
}

TEST(Cli, RateAndHorizon) {
  const auto base = cli("rate --config paper --out " + path("rate.json"));
  ASSERT_EQ(base.code, 0) << base.output;
  const auto longer = cli("rate --config paper --n-stor-max 24 --out " + path("rate24.json"));
  ASSERT_EQ(longer.code, 0) << longer.output;
  const double r18 = io::read_json(path("rate.json")).at("rate_hz").get<double>();
  const double r24 = io::read_json(path("rate24.json")).at("rate_hz").get<double>();
  EXPECT_NEAR(r18, generation_rate(paper_preset()).rate_hz, 1e-9 * r18);
  EXPECT_GT(r24, r18);
}

TEST(Cli, DecayFitOnForwardSimulatedFixture) {
  std::vector<std::pair<int, double>> pts;
  for (int n = 5; n <= 40; n += 5) {
    pts.emplace_back(n, apply_loss(DensityMatrix::pure(fock_state(1, 3)), 1 - std::pow(0.99, n)).populations()(1));
  }
  io::write_decay_csv(path("decay.csv"), pts);
  const auto r = cli("decay-fit --in " + path("decay.csv") + " --out " + path("decay.json"));
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_NEAR(io::read_json(path("decay.json")).at("loss_per_round_trip").get<double>(), 0.010, 5e-4);
}

TEST(Cli, IngestTableFixture) {
  const auto r = cli("ingest --in " + std::string(FOCKCAT_DATA_DIR) + "/table1_c.txt --out " + path("c.json"));
  ASSERT_EQ(r.code, 0) << r.output;
  const auto rep = io::read_json(path("c.json"));
  EXPECT_NEAR(rep.at("raw_trace").get<double>(), 1.0, 0.01);
  EXPECT_NEAR(rep.at("target").at("fidelity").get<double>(), 0.53, 0.08);
}

TEST(Cli, SamplingIsByteIdentical) {
  ASSERT_EQ(cli("sample -n 500 --seed 8 --out " + path("a.csv")).code, 0);
  ASSERT_EQ(cli("sample -n 500 --seed 8 --out " + path("b.csv")).code, 0);
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
  const auto manifest = io::read_json(path("a.csv") + ".manifest.json");
  EXPECT_EQ(manifest.at("seed").get<int>(), 8);
  EXPECT_EQ(manifest.at("command"), "sample");
}

TEST(Cli, CheckRevalidatesOutputs) {
  ASSERT_EQ(cli("sample -n 50 --seed 2 --out " + path("chk.csv")).code, 0);
  ASSERT_EQ(cli("simulate --n-stor 12 --out " + path("chk.json") + " --wigner " + path("chk_w.csv")).code, 0);
  const auto ok = cli("--check " + path("chk.csv") + " " + path("chk.json") + " " + path("chk_w.csv") + " " +
                      path("chk.csv") + ".manifest.json");
  EXPECT_EQ(ok.code, 0) << ok.output;
  std::ofstream(path("chk_bad.csv")) << "x,p,w\n0,0,nan\n";
  EXPECT_EQ(cli("--check " + path("chk_bad.csv")).code, 2);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(cli("frobnicate").code, 2);
  EXPECT_EQ(cli("sweep --ideal --realistic").code, 2);
  EXPECT_EQ(cli("--version").code, 0);
}
