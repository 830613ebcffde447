#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <sys/wait.h>

#include <Eigen/Dense>

namespace fs = std::filesystem;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "cogradar_cli_test";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path write_file(const std::string& name, const std::string& text) {
  fs::create_directories(kRoot);
  const fs::path p = kRoot / name;
  std::ofstream(p) << text;
  return p;
}

// Runs the CLI; returns its exit status. stderr goes to <out>.err.
int cli(const std::string& args, const fs::path& out) {
  fs::remove_all(out);
  const std::string cmd = std::string(COGRADAR_CLI_PATH) + " " + args + " --out " + out.string() + " > /dev/null 2> " +
                          out.string() + ".err";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

void expect_same_tree(const fs::path& a, const fs::path& b) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(a)) files.push_back(e.path().filename());
  ASSERT_FALSE(files.empty());
  for (const auto& f : files) EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  EXPECT_EQ(std::distance(fs::directory_iterator(b), fs::directory_iterator{}), static_cast<long>(files.size()));
}

const std::string kShort = "scenario.steps = 60\n";

}  // namespace

TEST(Cli, SimulateWritesNamedFilesDeterministically) {
  const fs::path cfg = write_file("short.cfg", kShort);
  ASSERT_EQ(cli("simulate --config " + cfg.string() + " --runs 4", kRoot / "sim1"), 0);
  ASSERT_EQ(cli("simulate --config " + cfg.string() + " --runs 4", kRoot / "sim2"), 0);
  EXPECT_TRUE(fs::exists(kRoot / "sim1" / "effective_config.cfg"));
  EXPECT_TRUE(fs::exists(kRoot / "sim1" / "episode_cr_ckf.csv"));
  EXPECT_TRUE(fs::exists(kRoot / "sim1" / "rmse_cr_ckf.csv"));
  expect_same_tree(kRoot / "sim1", kRoot / "sim2");

  const auto rows = read_csv(kRoot / "sim1" / "rmse_cr_ckf.csv");
  ASSERT_EQ(rows.size(), 61u);
  EXPECT_EQ(rows[0][0], "time_s");
  EXPECT_EQ(rows[1][3], "4");
}

TEST(Cli, ByteIdenticalAcrossWorkers) {
  const fs::path cfg = write_file("short.cfg", kShort);
  for (const std::string sub : {"compare-filters", "compare-modes", "pcrlb"}) {
    ASSERT_EQ(cli(sub + " --config " + cfg.string() + " --runs 6 --workers 1", kRoot / "w1"), 0) << sub;
    ASSERT_EQ(cli(sub + " --config " + cfg.string() + " --runs 6 --workers 3", kRoot / "w3"), 0) << sub;
    expect_same_tree(kRoot / "w1", kRoot / "w3");
  }
  ASSERT_EQ(cli("compare-filters --config " + cfg.string() + " --runs 2", kRoot / "names"), 0);
  for (const char* f : {"rmse_ekf.csv", "rmse_ukf.csv", "rmse_ckf.csv", "comparison.csv"}) {
    EXPECT_TRUE(fs::exists(kRoot / "names" / f)) << f;
  }
}

TEST(Cli, SeedOverrideChangesResults) {
  const fs::path cfg = write_file("short.cfg", kShort);
  ASSERT_EQ(cli("simulate --config " + cfg.string() + " --runs 2 --seed 1", kRoot / "s1"), 0);
  ASSERT_EQ(cli("simulate --config " + cfg.string() + " --runs 2 --seed 2", kRoot / "s2"), 0);
  EXPECT_NE(slurp(kRoot / "s1" / "rmse_cr_ckf.csv"), slurp(kRoot / "s2" / "rmse_cr_ckf.csv"));
  EXPECT_NE(slurp(kRoot / "s2" / "effective_config.cfg").find("scenario.seed = 2"), std::string::npos);
}

TEST(Cli, SingleEntryLibraryMakesModesIdentical) {
  const fs::path cfg = write_file("single.cfg", kShort + "waveform.duration_count = 1\nwaveform.chirp_count = 1\n");
  ASSERT_EQ(cli("compare-modes --config " + cfg.string() + " --runs 5", kRoot / "single"), 0);
  const auto cr = read_csv(kRoot / "single" / "rmse_cr_ckf.csv");
  const auto tar = read_csv(kRoot / "single" / "rmse_tar_ckf.csv");
  ASSERT_EQ(cr.size(), tar.size());
  for (std::size_t r = 1; r < cr.size(); ++r) EXPECT_EQ(cr[r], tar[r]);
  EXPECT_TRUE(fs::exists(kRoot / "single" / "runs_cr_ckf.csv"));
  const auto cmp = read_csv(kRoot / "single" / "comparison.csv");
  ASSERT_EQ(cmp.size(), 2u);
  EXPECT_EQ(cmp[1][4], "tie");
}

TEST(Cli, LinearPcrlbEqualsPosteriorStd) {
  // Linear-Gaussian with matched filter noise: the bound is the Kalman
  // posterior standard deviation.
  const fs::path cfg = write_file("linear.cfg",
                                  "scenario.dynamics = linear\n"
                                  "scenario.steps = 40\n"
                                  "scenario.linear_transition = 1, -0.1, 0, 0, 1, 0, 0, 0, 1\n"
                                  "scenario.process_noise = 4, 1, 1e-6\n"
                                  "scenario.filter_process_noise = 4, 1, 1e-6\n");
  ASSERT_EQ(cli("pcrlb --config " + cfg.string() + " --runs 3", kRoot / "lin"), 0);
  for (const char* f : {"pcrlb_cr_ckf.csv", "pcrlb_tar_ckf.csv"}) {
    const auto rows = read_csv(kRoot / "lin" / f);
    ASSERT_EQ(rows.size(), 41u);
    ASSERT_EQ(rows[0][1], "pcrlb_altitude_ft");
    ASSERT_EQ(rows[0][6], "posterior_std_altitude_ft");
    for (std::size_t r = 1; r < rows.size(); ++r) {
      const double bound = std::stod(rows[r][1]), std_alt = std::stod(rows[r][6]);
      const double bound_v = std::stod(rows[r][2]), std_vel = std::stod(rows[r][7]);
      EXPECT_NEAR(bound, std_alt, 1e-10 * std_alt) << f << " row " << r;
      EXPECT_NEAR(bound_v, std_vel, 1e-10 * std_vel) << f << " row " << r;
    }
  }
}

TEST(Cli, PicaNoiseFree) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(5, 2), s(2, 300);
  for (auto* m : {&a, &s})
    for (Eigen::Index i = 0; i < m->size(); ++i) m->data()[i] = g(rng);
  const Eigen::MatrixXd x = a * s;
  std::ostringstream data;
  data.precision(17);
  data << "# five channels\n";
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) data << (c ? "," : "") << x(r, c);
    data << '\n';
  }
  write_file("pica.csv", data.str());
  const fs::path cfg = write_file("pica.cfg", "pica.input = pica.csv\npica.latent_dim = 2\npica.segment_length = 100\n");
  ASSERT_EQ(cli("pica --config " + cfg.string(), kRoot / "pica"), 0);
  const auto model = read_csv(kRoot / "pica" / "pica_model.csv");
  bool found = false;
  for (const auto& row : model) {
    if (row[0] == "noise_var") {
      EXPECT_NEAR(std::stod(row[1]), 0.0, 1e-10);
      found = true;
    }
  }
  EXPECT_TRUE(found);
  for (const char* f : {"pica_eigenvalues.csv", "pica_mean.csv", "pica_mixing.csv", "pica_unmixing.csv",
                        "pica_sources.csv", "pica_spectrum.csv"}) {
    EXPECT_TRUE(fs::exists(kRoot / "pica" / f)) << f;
  }
  EXPECT_EQ(read_csv(kRoot / "pica" / "pica_spectrum.csv").size(), 51u);

  const fs::path first = kRoot / "pica" / "pica_sources.csv";
  const std::string before = slurp(first);
  ASSERT_EQ(cli("pica --config " + cfg.string() + " --workers 2", kRoot / "pica"), 0);
  EXPECT_EQ(slurp(first), before);
}

TEST(Cli, PicaRejectsTooManySources) {
  write_file("tiny.csv", "1,2,3,4\n2,1,0,3\n");
  const fs::path cfg = write_file("tiny.cfg", "pica.input = tiny.csv\npica.latent_dim = 2\n");
  EXPECT_NE(cli("pica --config " + cfg.string(), kRoot / "tiny"), 0);
  EXPECT_NE(slurp(kRoot / "tiny.err").find("q < p"), std::string::npos);
}

TEST(Cli, ErrorsExitNonzero) {
  const fs::path bad = write_file("bad.cfg", "scenario.snr = -1\n");
  EXPECT_NE(cli("simulate --config " + bad.string(), kRoot / "bad"), 0);
  EXPECT_NE(slurp(kRoot / "bad.err").find("snr"), std::string::npos);
  const fs::path unknown = write_file("unknown.cfg", "nope = 1\n");
  EXPECT_NE(cli("simulate --config " + unknown.string(), kRoot / "unknown"), 0);
  EXPECT_NE(cli("simulate --runs 0", kRoot / "zero"), 0);
  EXPECT_NE(cli("simulate --config " + (kRoot / "missing.cfg").string(), kRoot / "missing"), 0);
}
