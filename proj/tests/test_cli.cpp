#include "dlm/bench/cli.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace {

struct RunResult {
  int code = -1;
  std::string out;
};

// Runs the installed binary; stderr is discarded.
RunResult run(const std::string& args) {
  const std::string cmd = std::string(DLM_CLI_PATH) + " " + args + " 2>/dev/null";
  RunResult r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf;
  while (std::fgets(buf.data(), buf.size(), p)) r.out += buf.data();
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string src(const std::string& rel) { return std::string(DLM_SOURCE_DIR) + "/" + rel; }

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string l;
  while (std::getline(in, l)) out.push_back(l);
  return out;
}

std::string without_last_field(const std::string& line) { return line.substr(0, line.rfind(',')); }

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::istringstream ls(line);
  std::string c;
  while (std::getline(ls, c, ',')) cells.push_back(c);
  return cells;
}

std::string temp_path(const std::string& name) { return (std::filesystem::temp_directory_path() / name).string(); }

}  // namespace

TEST(Cli, KernelTableExample) {
  const auto r = run("kernels --family spk --base laplace1d --c 1 --rmax 2 --steps 4");
  ASSERT_EQ(r.code, 0);
  const auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 6u);
  EXPECT_EQ(ls[0], "r,value");
  const double want[] = {0.5, 0.55902, 0.70711, 0.90139, 1.11803};
  for (int i = 0; i < 5; ++i) {
    const auto cells = split(ls[i + 1]);
    EXPECT_DOUBLE_EQ(std::stod(cells[0]), 0.5 * i);
    EXPECT_NEAR(std::stod(cells[1]), want[i], 5e-6);
  }
}

TEST(Cli, KernelListAndSingularValues) {
  const auto r = run("kernels --list");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("spk"), std::string::npos);
  EXPECT_NE(r.out.find("mq"), std::string::npos);
  const auto s = run("kernels --family fundamental --base laplace2d --rmax 1 --steps 2");
  ASSERT_EQ(s.code, 0);
  EXPECT_EQ(lines(s.out)[1], "0,nan");
}

TEST(Cli, MissingConfigIsValidationError) {
  EXPECT_EQ(run("converge --config /nonexistent/missing.json").code, 1);
  EXPECT_EQ(run("solve").code, 1);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run("").code, 1);
  EXPECT_EQ(run("frobnicate").code, 1);
  EXPECT_EQ(run("solve --config " + src("configs/b1.json") + " --bogus 3").code, 1);
  EXPECT_EQ(run("solve --config " + src("configs/b1.json") + " --mode sideways").code, 1);
  EXPECT_EQ(run("converge --config " + src("configs/b1.json") + " --out /nonexistent_dir/x.csv").code, 1);
  EXPECT_EQ(run("--help").code, 0);
}

TEST(Cli, SolverFailureExitsTwo) {
  // Newton on B2 in double at N = 17 hits a singular Jacobian.
  EXPECT_EQ(run("solve --config " + src("configs/b2.json") + " --solver newton --precision double --n 17").code, 2);
  // A sweep where every N fails.
  EXPECT_EQ(run("converge --config " + src("configs/b2.json") + " --solver newton --precision double --n 17").code, 2);
}

TEST(Cli, SolvePrintsDiagnostics) {
  const auto r = run("solve --config " + src("configs/b1.json"));
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("status: ok"), std::string::npos);
  EXPECT_NE(r.out.find("max_error_u: "), std::string::npos);
  EXPECT_NE(r.out.find("iterations: 1"), std::string::npos);
}

TEST(Cli, CompareMatchesGolden) {
  const auto r = run("compare --config " + src("configs/b1_compare.json"));
  ASSERT_EQ(r.code, 0);
  const auto got = lines(r.out);
  const auto want = lines(read_file(src("tests/golden/b1_compare.csv")));
  ASSERT_EQ(got.size(), want.size());
  ASSERT_EQ(got.size(), 3u);
  for (std::size_t i = 0; i < got.size(); ++i) EXPECT_EQ(without_last_field(got[i]), without_last_field(want[i]));
}

TEST(Cli, ConvergeWritesFile) {
  const auto path = temp_path("dlm_cli_converge_b1.csv");
  std::filesystem::remove(path);
  const auto r = run("converge --config " + src("configs/b1.json") + " --out " + path + " --seed 7");
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  const auto ls = lines(read_file(path));
  ASSERT_EQ(ls.size(), 4u);
  EXPECT_EQ(ls[0], dlm::bench::kCsvHeader);
  double prev = 1e300;
  for (int i = 1; i <= 3; ++i) {
    const double e = std::stod(split(ls[i])[5]);
    EXPECT_LT(e, prev);
    prev = e;
  }
  std::filesystem::remove(path);
}

TEST(Cli, ConvergeOnBurgersCaseReportsEveryN) {
  const auto r = run("converge --config " + src("configs/b2.json"));
  ASSERT_EQ(r.code, 0);
  const auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 4u);
  for (int i = 1; i <= 3; ++i) {
    const auto cells = split(ls[i]);
    EXPECT_EQ(cells[1], "dlm");
    EXPECT_NE(cells[5], "nan");
    EXPECT_NE(cells[7], "nan");
  }
}

TEST(Cli, OverridesApply) {
  const auto r = run("converge --config " + src("configs/b1.json") + " --n 5 --c 20 --precision double");
  ASSERT_EQ(r.code, 0);
  const auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 2u);
  EXPECT_EQ(split(ls[1])[3], "5");
}

TEST(Cli, InProcessEntryPoint) {
  std::ostringstream out, err;
  EXPECT_EQ(dlm::bench::run_cli({"kernels", "--family", "mq", "--c", "2", "--steps", "1"}, out, err), 0);
  EXPECT_EQ(out.str(), "r,value\n0,2\n1,2.2360679774997898\n");
  std::ostringstream out2, err2;
  EXPECT_EQ(dlm::bench::run_cli({"kernels", "--family", "nope"}, out2, err2), 1);
  EXPECT_FALSE(err2.str().empty());
}
