#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>

#include "support.hpp"

namespace gridqa {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int status = -1;
  std::string output;  // stdout and stderr interleaved
};

CliRun cli(const std::string& args) {
  std::string cmd = std::string("'") + GRIDQA_CLI + "' " + args + " 2>&1";
  CliRun r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, n);
  int raw = ::pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string demo_arg() { return "--data '" + testing::demo_dir().string() + "'"; }

const char* kQuestion = "'Which manufacturers made 220kV transformers with oil leakage?'";

TEST(Cli, ValidatePrintsStatistics) {
  CliRun r = cli("validate " + demo_arg());
  EXPECT_EQ(r.status, 0) << r.output;
  EXPECT_NE(r.output.find("10 classes, 12 edge types, 6 vertices, 5 edges"), std::string::npos) << r.output;
}

TEST(Cli, AskPrintsATable) {
  CliRun r = cli("ask " + demo_arg() + " " + kQuestion);
  EXPECT_EQ(r.status, 0) << r.output;
  EXPECT_NE(r.output.find("M1  Acme Electric"), std::string::npos) << r.output;
  EXPECT_NE(r.output.find("pseudo-query: MATCH"), std::string::npos) << r.output;
}

TEST(Cli, AskJsonParses) {
  CliRun r = cli("ask --json " + demo_arg() + " " + kQuestion + " 2>/dev/null");
  ASSERT_EQ(r.status, 0) << r.output;
  auto j = nlohmann::json::parse(r.output);
  EXPECT_EQ(j["answers"][0]["id"], "M1");
}

TEST(Cli, AskWithDependencyFile) {
  CliRun r = cli("ask " + demo_arg() + " --deps-file '" + (testing::fixtures_dir() / "golden_parse.conllu").string() +
              "' '" + testing::golden_question() + "'");
  // The demo lexicon has no California grid; the rest of the tree still applies.
  EXPECT_EQ(r.status, 0) << r.output;
  EXPECT_NE(r.output.find("T1  TX-00001"), std::string::npos) << r.output;
  CliRun mismatched = cli("ask " + demo_arg() + " --deps-file '" +
                       (testing::fixtures_dir() / "golden_parse.conllu").string() + "' " + kQuestion);
  EXPECT_EQ(mismatched.status, 1) << mismatched.output;
}

TEST(Cli, UsageAndDataErrors) {
  CliRun empty = cli("ask " + demo_arg() + " '   '");
  EXPECT_EQ(empty.status, 2);
  EXPECT_NE(empty.output.find("empty question"), std::string::npos) << empty.output;
  EXPECT_EQ(cli("ask 'Which transformers?'").status, 2);
  EXPECT_EQ(cli("bogus").status, 2);
  CliRun missing = cli("validate --data /nonexistent/gridqa");
  EXPECT_EQ(missing.status, 1);
  EXPECT_NE(missing.output.find("IoError"), std::string::npos) << missing.output;
}

TEST(Cli, GenerateThenEvaluateStrictly) {
  fs::path dir = fs::temp_directory_path() / ("gridqa-cli-" + std::to_string(::getpid()));
  CliRun gen = cli("gen --out '" + dir.string() + "' --vertices 1500 --cases 15");
  ASSERT_EQ(gen.status, 0) << gen.output;
  CliRun v = cli("validate --data '" + dir.string() + "'");
  EXPECT_EQ(v.status, 0) << v.output;
  EXPECT_NE(v.output.find("1500 vertices"), std::string::npos) << v.output;
  CliRun eval = cli("eval --data '" + dir.string() + "' --repeats 1 --strict --report '" + (dir / "report.json").string() + "'");
  EXPECT_EQ(eval.status, 0) << eval.output;
  EXPECT_NE(eval.output.find("Total"), std::string::npos) << eval.output;
  auto report = nlohmann::json::parse(testing::read_text(dir / "report.json"));
  EXPECT_TRUE(report.is_object());
  fs::remove_all(dir);
}

}  // namespace
}  // namespace gridqa
