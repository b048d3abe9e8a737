#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "palm_forge_cli/cli.hpp"

using namespace palm_forge::cli;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("palm_forge_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  int run(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    args.push_back("--out");
    args.push_back(dir_.string());
    return run_cli(args, out_, err_);
  }

  std::string file(const std::string& name) const {
    std::ifstream in(dir_ / name, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  }

  std::filesystem::path dir_;
  std::ostringstream out_, err_;
};

TEST_F(Cli, LemmaPasses) {
  EXPECT_EQ(run({"lemma", "--cases", "20", "--deterministic"}), kPass);
  EXPECT_NE(out_.str().find("verdict: pass"), std::string::npos);
  const std::string csv = file("results.csv");
  EXPECT_EQ(csv.rfind("scenario,estimator,value,se,n,seed,verdict\n", 0), 0u);
  EXPECT_NE(file("report.json").find("\"outcomes\""), std::string::npos);
}

TEST_F(Cli, GeneratedStampOnlyWhenNotDeterministic) {
  ASSERT_EQ(run({"lemma", "--cases", "5"}), kPass);
  EXPECT_EQ(file("results.csv").rfind("# generated", 0), 0u);
  ASSERT_EQ(run({"lemma", "--cases", "5", "--deterministic"}), kPass);
  EXPECT_EQ(file("results.csv").find("# generated"), std::string::npos);
}

TEST_F(Cli, CompactFixture) {
  EXPECT_EQ(run({"compact", "--n", "20000", "--deterministic"}), kPass);
  EXPECT_NE(out_.str().find("xi_B = 12"), std::string::npos);
  EXPECT_NE(out_.str().find("collision_count = 132"), std::string::npos);
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run({}), kUsage);
  EXPECT_EQ(run({"frobnicate"}), kUsage);
  EXPECT_EQ(run({"mecke", "--n", "0"}), kUsage);
  EXPECT_EQ(run({"mecke", "--palm", "nonsense"}), kUsage);
}

TEST_F(Cli, UnknownScenarioKeyIsUsageError) {
  const auto path = dir_ / "bad.conf";
  std::ofstream(path) << "seed = 3\nbogus = 1\n";
  EXPECT_EQ(run({"lemma", "--scenario", path.string()}), kUsage);
}

TEST_F(Cli, ScenarioFileSetsOptions) {
  const auto path = dir_ / "good.conf";
  std::ofstream(path) << "# lemma run\nseed = 3\ncases = 4\n";
  ASSERT_EQ(run({"lemma", "--scenario", path.string(), "--deterministic"}), kPass);
  EXPECT_NE(file("results.csv").find(",12,3,pass"), std::string::npos);
}

TEST_F(Cli, NonStationaryFieldHitsGate) {
  // Negation on the real line does not have sublinear growth.
  EXPECT_EQ(run({"mecke", "--field", "negation", "--n", "100"}), kGate);
}

TEST_F(Cli, FieldOnWrongGroupIsUsageError) {
  EXPECT_EQ(run({"compact", "--field", "brownian:sigma=0.5"}), kUsage);
}

TEST_F(Cli, VerdictExitCodes) {
  // The control scenario passes when the battery rejects the shifted lattice.
  EXPECT_EQ(run({"mecke", "--palm", "shifted-lattice", "--field", "none"}), kPass);
  EXPECT_EQ(run({"heavy-tail", "--alpha", "0.8", "--sizes", "10,20", "--seeds", "5"}), kFail);
}

TEST_F(Cli, DeterministicRunsAreIdentical) {
  ASSERT_EQ(run({"invert", "--n", "2000", "--seed", "11", "--deterministic"}), kPass);
  const std::string first = file("results.csv");
  const std::string first_json = file("report.json");
  ASSERT_EQ(run({"invert", "--n", "2000", "--seed", "11", "--deterministic"}), kPass);
  EXPECT_EQ(file("results.csv"), first);
  EXPECT_EQ(file("report.json"), first_json);
  ASSERT_EQ(run({"invert", "--n", "2000", "--seed", "12", "--deterministic"}), kPass);
  EXPECT_NE(file("results.csv"), first);
}

TEST_F(Cli, DumpAndReloadBatch) {
  const auto batch = (dir_ / "palm.jsonl").string();
  ASSERT_EQ(run({"mecke", "--n", "500", "--dump-batch", batch, "--deterministic"}), kPass);
  ASSERT_EQ(run({"mecke", "--palm-file", batch, "--field", "none", "--deterministic"}), kPass);
  EXPECT_NE(file("results.csv").find("mecke/file/none"), std::string::npos);
}

}  // namespace
