#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "selfaffine/cli.hpp"

using selfaffine::cli::run;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

bool has(const std::string& s, const std::string& needle) { return s.find(needle) != std::string::npos; }

}  // namespace

TEST(Cli, ValidateExitCodes) {
  EXPECT_EQ(cli({"validate", "--system", "scale4"}).code, 0);
  const auto tri = cli({"validate", "--system", "triadic"});
  EXPECT_EQ(tri.code, 1);
  EXPECT_TRUE(has(tri.out, "[FAIL] compatibility"));
  const auto missing = cli({"validate", "--file", "/nonexistent/sys.json"});
  EXPECT_EQ(missing.code, 2);
  EXPECT_TRUE(has(missing.err, "cannot open"));
  EXPECT_EQ(cli({"validate", "--file", SELFAFFINE_TEST_DATA "/float_entry.json"}).code, 2);
  EXPECT_EQ(cli({"validate", "--file", SELFAFFINE_TEST_DATA "/scale4.json"}).code, 0);
}

TEST(Cli, ValidateJsonIsParseable) {
  const auto r = cli({"validate", "--system", "triadic", "--format", "json"});
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_FALSE(j["passed"].get<bool>());
  EXPECT_EQ(j["compatibility_failures"][0]["value"], "3/2");
}

TEST(Cli, SpectrumListing) {
  const auto r = cli({"spectrum", "--system", "scale4", "--depth", "3"});
  ASSERT_EQ(r.code, 0);
  std::vector<std::string> col;
  std::istringstream in(r.out);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("index", 0) == 0) continue;
    std::istringstream f(line);
    std::string idx, lvl, x;
    std::getline(f, idx, ',');
    std::getline(f, lvl, ',');
    std::getline(f, x, ',');
    col.push_back(x);
  }
  EXPECT_EQ(col, (std::vector<std::string>{"0", "1", "4", "5", "16", "17", "20", "21"}));
  EXPECT_TRUE(has(r.out, "# depth: 3"));
}

TEST(Cli, KnobsOutOfRangeFailBeforeWork) {
  EXPECT_EQ(cli({"spectrum", "--system", "scale4", "--depth", "99"}).code, 2);
  EXPECT_EQ(cli({"q1", "--system", "scale4", "--resolution", "4"}).code, 2);
  EXPECT_EQ(cli({"gram", "--system", "scale4", "--tol", "-1"}).code, 2);
  EXPECT_EQ(cli({"attractor", "--system", "scale4", "--side", "up"}).code, 2);
  EXPECT_EQ(cli({"spectrum"}).code, 2);
  EXPECT_EQ(cli({"frobnicate"}).code, 2);
  EXPECT_EQ(cli({"spectrum", "--system", "nope"}).code, 2);
}

TEST(Cli, GateAndForce) {
  EXPECT_EQ(cli({"spectrum", "--system", "triadic"}).code, 1);
  EXPECT_EQ(cli({"spectrum", "--system", "triadic", "--force"}).code, 0);
  // gamma only needs structure and expansivity
  EXPECT_EQ(cli({"gamma", "--system", "triadic"}).code, 0);
}

TEST(Cli, GammaEiffel) {
  const auto r = cli({"gamma", "--system", "eiffel", "--r", "3"});
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["gamma_eiffel"].get<double>(), 0.5297, 1e-4);
  EXPECT_NEAR(j["beta"].get<double>(), 4.442882938158366, 1e-12);
  EXPECT_EQ(j["hull"]["volume"], "1/24");
}

TEST(Cli, GramDetectsTriadicFailure) {
  const auto r = cli({"gram", "--system", "triadic", "--force", "--depth", "2"});
  EXPECT_EQ(r.code, 1);
  EXPECT_TRUE(has(r.out, "# worst_pair: (3/4) (9/4)"));
}

TEST(Cli, AttractorPointCloud) {
  const auto r = cli({"attractor", "--system", "eiffel", "--r", "2", "--depth", "4", "--side", "sigma"});
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(has(r.out, "# points: 256"));
  EXPECT_TRUE(has(r.out, "x0,x1,x2,x0_float"));
}

TEST(Cli, TransferConverges) {
  const auto r = cli({"transfer", "--system", "scale4", "--init", "bump", "--format", "json"});
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j["converged"].get<bool>());
  EXPECT_LE(j["sup_deviation_from_one"].get<double>(), 1e-7);
}

TEST(Cli, Q1Scale4IsBasisConsistent) {
  const auto r = cli({"q1", "--system", "scale4", "--resolution", "16"});
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(has(r.out, "# verdict: BASIS-CONSISTENT"));
  EXPECT_TRUE(has(r.out, "partial_sum,increment,p_depth"));
}

TEST(Cli, Reports) {
  const auto s4 = cli({"report", "--system", "scale4"});
  EXPECT_EQ(s4.code, 0);
  EXPECT_TRUE(has(s4.out, "verdict: BASIS-CONSISTENT"));
  const auto tri = cli({"report", "--system", "triadic"});
  EXPECT_EQ(tri.code, 1);
  EXPECT_TRUE(has(tri.out, "at pair (3/4), (9/4)"));
  EXPECT_TRUE(has(tri.out, "verdict: NOT-ORTHOGONAL"));
}

TEST(Cli, DeterministicOutputAndOutFile) {
  const std::vector<std::string> args{"gram", "--system", "scale4", "--depth", "3"};
  EXPECT_EQ(cli(args).out, cli(args).out);
  const auto path = (std::filesystem::temp_directory_path() / "selfaffine_cli_test.csv").string();
  auto with_out = args;
  with_out.insert(with_out.end(), {"--out", path});
  ASSERT_EQ(cli(with_out).code, 0);
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  EXPECT_EQ(ss.str(), cli(args).out);
  std::filesystem::remove(path);
}
