#include "holab/config.hpp"
#include "holab/runner.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

using namespace holab;

namespace {

std::string error_of(std::string_view text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

int line_of(std::string_view text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST(Config, MinimalRank1Defaults) {
  const RunConfig c = parse_config("[system]\nfamily = rank1\nrank = 1\n");
  EXPECT_EQ(c, RunConfig{});
  const RunConfig r = c.resolved();
  ASSERT_TRUE(r.normalization.has_value());
  EXPECT_DOUBLE_EQ(*r.normalization, 2.0);
  EXPECT_EQ(r.x0, std::vector<double>{1.0});
  EXPECT_EQ(r.y0, std::vector<double>{3.0});
  EXPECT_EQ(r.grid, default_basis_grid());
  EXPECT_EQ(r.order, std::vector<int>{0});
  // Every resolved field is echoed.
  const auto j = to_json(r);
  for (const char* key : {"family", "rank", "normalization", "k", "x0", "y0", "horizon", "dt", "wall_safety",
                          "intensity_cap", "paths", "grid", "order", "method", "seed"})
    EXPECT_TRUE(j.dump().find(std::string("\"") + key + "\"") != std::string::npos) << key;
}

TEST(Config, FullDocument) {
  const RunConfig c = parse_config(R"(# comment
[system]
family = B
rank = 2
k = [1, 0.75]   # long, short

[experiment]
name = equivalence
x0 = [2, 1]
horizon = 30
paths = 5000
method = skew
order = [3, 2, 1, 0]

[run]
seed = 42
output = "out dir"
threads = 2
)");
  EXPECT_EQ(c.family, Family::B);
  EXPECT_EQ(c.rank, 2);
  EXPECT_EQ(c.k, (std::vector<double>{1, 0.75}));
  EXPECT_EQ(c.experiment, Experiment::kEquivalence);
  EXPECT_EQ(c.method, Method::kSkewProduct);
  EXPECT_EQ(c.order, (std::vector<int>{3, 2, 1, 0}));
  EXPECT_EQ(c.paths, 5000u);
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.output, "out dir");
  EXPECT_EQ(c.threads, 2);
  const RunConfig r = c.resolved();
  EXPECT_EQ(r.x0, (std::vector<double>{2, 1}));
}

TEST(Config, RejectsSmallMultiplicity) {
  const std::string e = error_of("[system]\nk = 0.3\n");
  EXPECT_NE(e.find("k >= 1/2"), std::string::npos) << e;
  EXPECT_EQ(line_of("[system]\nk = 0.3\n"), 2);
}

TEST(Config, LineNumberedErrors) {
  EXPECT_EQ(line_of("[experiment]\nhorizon = 5\nx0 = [1, 2\n"), 3);
  EXPECT_EQ(line_of("[experiment]\nx0 = [1, , 2]\n"), 2);
  EXPECT_EQ(line_of("[system]\n\n\nbogus = 1\n"), 4);
  EXPECT_EQ(line_of("[nowhere]\n"), 1);
  EXPECT_EQ(line_of("[experiment]\npaths = many\n"), 2);
  EXPECT_EQ(line_of("[experiment]\nname = dance\n"), 2);
  EXPECT_EQ(line_of("horizon = 5\n"), 1);  // outside any section
  EXPECT_EQ(line_of("[experiment]\nhorizon = -1\n"), 2);
  EXPECT_EQ(line_of("[experiment]\nfunction = cosh\n"), 2);
  EXPECT_NE(error_of("[experiment]\nx0 = [1, 2\n").find("line 2"), std::string::npos);
}

TEST(Config, ResolveChecks) {
  RunConfig c = parse_config("[system]\nfamily = B\nrank = 2\n[experiment]\nx0 = [1]\n");
  EXPECT_THROW(c.resolved(), ConfigError);
  c = parse_config("[system]\nfamily = B\nrank = 2\nk = [1, 1, 1]\n");
  EXPECT_THROW(c.resolved(), ConfigError);
  c = parse_config("[system]\nfamily = B\nrank = 2\n");
  const RunConfig r = c.resolved();
  EXPECT_EQ(r.k, (std::vector<double>{1, 1}));
  EXPECT_EQ(r.x0, (std::vector<double>{1.5, 0.5}));
  EXPECT_EQ(r.order, (std::vector<int>{0, 1, 2, 3}));
}

TEST(Config, TextRoundTrip) {
  RunConfig c = parse_config("[system]\nfamily = BC\nrank = 2\nk = [0.5, 1.25, 2]\n[experiment]\nhorizon = 0.1\n"
                             "dt = 0.0025\n[run]\nseed = 18446744073709551615\n");
  c = c.resolved();
  c.x0 = {0.1 + 0.2, 1.0 / 3.0};
  const RunConfig back = parse_config(to_text(c));
  EXPECT_EQ(back, c);
  EXPECT_EQ(to_text(back), to_text(c));
}

TEST(Config, LoadFromFile) {
  const auto path = std::filesystem::temp_directory_path() / "holab_config_test.cfg";
  {
    std::ofstream f(path);
    f << "[experiment]\nname = theorem1\n";
  }
  EXPECT_EQ(load_config(path.string()).experiment, Experiment::kTheorem1);
  std::filesystem::remove(path);
  EXPECT_THROW(load_config(path.string()), std::runtime_error);
}

TEST(Runner, ResultIndependentOfThreads) {
  RunConfig c = parse_config("[experiment]\nname = equivalence\npaths = 1000\nhorizon = 10\n").resolved();
  const auto a = result_document(c, execute(c, 1)).dump();
  const auto b = result_document(c, execute(c, 3)).dump();
  EXPECT_EQ(a, b);
}

TEST(Runner, ExitCodes) {
  const auto dir = std::filesystem::temp_directory_path() / "holab_runner_test";
  std::ostringstream log;
  RunConfig c = parse_config("[experiment]\nname = radial\npaths = 20\nhorizon = 1\n");
  c.output = dir.string();
  EXPECT_EQ(run(c, log), kExitOk);
  EXPECT_TRUE(std::filesystem::exists(dir / "manifest.json"));
  EXPECT_TRUE(std::filesystem::exists(dir / "result.csv"));
  // The control function is not harmonic: the assertion fails.
  c = parse_config("[experiment]\nname = martingale\nfunction = identity\npaths = 2000\nt = 2\n");
  c.output = dir.string();
  EXPECT_EQ(run(c, log), kExitAssertion);
  c = parse_config("[system]\nfamily = B\nrank = 2\n[experiment]\nx0 = [1, 1]\n");
  c.output = dir.string();
  EXPECT_EQ(run(c, log), kExitConfig);
  std::filesystem::remove_all(dir);
}
