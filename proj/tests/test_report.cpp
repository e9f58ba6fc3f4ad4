#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include "json.hpp"
#include "prekahler/domain.hpp"
#include "prekahler/parse.hpp"
#include "prekahler/report.hpp"
#include "prekahler/verify.hpp"

using namespace pk;

namespace {

ReportDocument analyzed(const std::string& name, std::map<std::string, double> params, std::uint64_t seed) {
  Potential p = builtin_potential(name, params);
  p.domain.seed = seed;
  ReportDocument d = make_document("analyze", p, seed, 8, 1e-8);
  add_analysis(d, analyze(p.rho, p.domain.sample(8), p.domain.params));
  return d;
}

int run_cli(const std::string& args, std::string* out = nullptr) {
  static int calls = 0;
  const auto tmp = std::filesystem::temp_directory_path() /
                   ("prekahler_cli_" + std::to_string(::getpid()) + "_" + std::to_string(calls++) + ".txt");
  const std::string cmd = std::string(PREKAHLER_CLI) + " " + args + " > " + tmp.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  if (out) {
    std::ifstream in(tmp);
    std::stringstream ss;
    ss << in.rdbuf();
    *out = ss.str();
  }
  std::filesystem::remove(tmp);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
  auto path = std::filesystem::temp_directory_path() / (std::to_string(::getpid()) + "_" + name);
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST(Report, JsonIsDeterministic) {
  EXPECT_EQ(analyzed("homog", {{"a", 3.0}}, 4).to_json(), analyzed("homog", {{"a", 3.0}}, 4).to_json());
  EXPECT_NE(analyzed("homog", {{"a", 3.0}}, 4).to_json(), analyzed("homog", {{"a", 3.0}}, 5).to_json());
}

TEST(Report, JsonShape) {
  auto j = nlohmann::json::parse(analyzed("flat", {}, 0).to_json());
  EXPECT_EQ(j["command"], "analyze");
  EXPECT_EQ(j["version"], PREKAHLER_VERSION);
  EXPECT_EQ(j["input"]["potential"], "flat");
  EXPECT_EQ(j["input"]["seed"], 0);
  EXPECT_EQ(j["verdicts"]["classification"], "flat2Nondeg");
  ASSERT_EQ(j["points"].size(), 8u);
  EXPECT_TRUE(j["points"][0]["T1"].is_array());
  EXPECT_EQ(j["points"][0]["T1"].size(), 2u);
  EXPECT_DOUBLE_EQ(j["tolerances"]["absolute"].get<double>(), 1e-8);
}

TEST(Report, SummaryNumbersAppearInJson) {
  ReportDocument d = analyzed("homog", {{"a", 3.0}}, 1);
  auto j = nlohmann::json::parse(d.to_json());
  const std::string s = d.summary();
  for (const auto& [k, v] : d.verdicts) {
    EXPECT_NE(s.find(k), std::string::npos) << k;
    EXPECT_TRUE(j["verdicts"].contains(k)) << k;
  }
  EXPECT_NEAR(j["verdicts"]["max_bT1"].get<double>(), std::get<double>(d.verdicts[1].second), 0.0);
}

TEST(Report, CsvHasOneRowPerPoint) {
  std::string csv = analyzed("flat", {}, 0).csv();
  std::istringstream in(csv);
  std::string header, line;
  std::getline(in, header);
  EXPECT_EQ(header.rfind("z1_re,z1_im,z2_re,z2_im", 0), 0u);
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 8);
}

TEST(Verify, SuiteNamesAndUnknownSuite) {
  EXPECT_EQ(suite_names().size(), 12u);
  EXPECT_EQ(suite_names().front(), "flat");
  try {
    run_verify({"nope"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.exit_code(), 2);
  }
  auto r = run_verify({"gauge"});
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].id, 7);
  EXPECT_TRUE(r[0].pass) << r[0].details;
  auto j = nlohmann::json::parse(verify_json(r, 0));
  EXPECT_EQ(j["criteria"][0]["suite"], "gauge");
}

TEST(Cli, AnalyzeFlat) {
  std::string out;
  ASSERT_EQ(run_cli("analyze --builtin flat --samples 16 --json -", &out), 0);
  auto j = nlohmann::json::parse(out);
  EXPECT_EQ(j["verdicts"]["classification"], "flat2Nondeg");
  EXPECT_LT(j["verdicts"]["max_bT1"].get<double>(), 1e-8);
}

TEST(Cli, AnalyzeHomogAtOrigin) {
  std::string out;
  ASSERT_EQ(run_cli("analyze --builtin homog --param a=3 --at z1=0,z2=0 --json -", &out), 0);
  auto j = nlohmann::json::parse(out);
  EXPECT_NEAR(j["points"][0]["bT1"].get<double>(), 1.0 / 729.0, 1e-6 / 729.0);
}

TEST(Cli, ExitCodes) {
  auto bad = write_temp("prekahler_bad.txt", "abs2(z1) + * z2\n");
  EXPECT_EQ(run_cli("analyze --potential " + bad.string()), 2);
  EXPECT_EQ(run_cli("analyze --builtin nosuch"), 2);
  EXPECT_EQ(run_cli("analyze --builtin flat --at z1=0.5+xi,z2=0"), 2);
  EXPECT_EQ(run_cli("frobnicate"), 2);
  EXPECT_EQ(run_cli("verify --only nosuch"), 2);
  EXPECT_EQ(run_cli("analyze --builtin homog --param a=1"), 3);
  EXPECT_EQ(run_cli("connection --from-potential envelope --samples 8"), 3);
  EXPECT_EQ(run_cli("freeman --potential " + write_temp("prekahler_jump.txt", "abs2(z1) + abs2(z2)^2").string() +
                    " --at z1=0,z2=0"),
            5);
}

TEST(Cli, FreemanAndConnection) {
  std::string out;
  ASSERT_EQ(run_cli("freeman --builtin product --samples 4 --json -", &out), 0);
  EXPECT_EQ(nlohmann::json::parse(out)["verdicts"]["order"], "inf");
  ASSERT_EQ(run_cli("freeman --builtin kahler --samples 4 --json -", &out), 0);
  EXPECT_EQ(nlohmann::json::parse(out)["verdicts"]["order"], "1");
  ASSERT_EQ(run_cli("connection --from-potential homog --param a=0.5 --samples 8 --json -", &out), 0);
  auto j = nlohmann::json::parse(out);
  EXPECT_TRUE(j["verdicts"]["special"].get<bool>());
  EXPECT_TRUE(j["verdicts"]["critical"].get<bool>());
  ASSERT_EQ(run_cli("connection --from-potential flat --samples 8 --json -", &out), 0);
  EXPECT_TRUE(nlohmann::json::parse(out)["verdicts"]["flat"].get<bool>());
  auto zero = write_temp("prekahler_zero.json",
                         R"({"coords": ["x", "y"], "gamma": [[["0","0"],["0","0"]],[["0","0"],["0","0"]]], "sigma": "1"})");
  ASSERT_EQ(run_cli("connection --gamma " + zero.string() + " --samples 4 --json -", &out), 0);
  j = nlohmann::json::parse(out);
  EXPECT_TRUE(j["verdicts"]["flat"].get<bool>());
  EXPECT_EQ(j["verdicts"]["max_C"].get<double>(), 0.0);
}

TEST(Cli, JsonIsByteIdenticalAcrossRuns) {
  std::string a, b;
  ASSERT_EQ(run_cli("analyze --builtin envelope --samples 8 --seed 3 --json -", &a), 0);
  ASSERT_EQ(run_cli("analyze --builtin envelope --samples 8 --seed 3 --json -", &b), 0);
  EXPECT_EQ(a, b);
}
