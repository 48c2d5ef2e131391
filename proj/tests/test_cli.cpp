#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run cli(const std::string& args) {
  const std::string cmd = std::string(INLSC_CLI) + " " + args + " 2>&1";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), p)) r.out += buf.data();
  const int st = pclose(p);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string configs(const std::string& name) { return std::string(INLSC_CONFIGS) + "/" + name; }

}  // namespace

TEST(Cli, HelpExitsZero) {
  const auto r = cli("--help");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("blowup-critical"), std::string::npos);
}

TEST(Cli, MissingConfigIsInputError) {
  const auto r = cli("groundstate --config /nonexistent/x.cfg");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("not found"), std::string::npos);
}

TEST(Cli, UnknownFlagIsParseError) {
  EXPECT_EQ(cli("groundstate --frobnicate 3").code, 2);
  EXPECT_EQ(cli("").code, 2);  // no subcommand
}

TEST(Cli, InvalidParameterNamesConstraint) {
  const auto r = cli("groundstate --sigma 5 --n 256");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("sigma"), std::string::npos);
}

TEST(Cli, RefusedInstabilityExitsOne) {
  const auto r = cli("instability --lambda0 1 --n 1024");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("refused"), std::string::npos);
}

TEST(Cli, BlowupCriticalReportsNegativeEnergy) {
  const auto dir = fs::temp_directory_path() / "inlsc_cli_blowup";
  fs::remove_all(dir);
  const auto r = cli("--json blowup-critical --mu0 1.1 --lambda0 1.1 --n 2048 --t-end 5 --out-dir " + dir.string());
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_LT(j.at("scalars").at("E_u0").get<double>(), 0.0);
  EXPECT_TRUE(j.at("headline").at("blowup_indicated").get<bool>());
  EXPECT_TRUE(fs::exists(dir / "manifest.json"));
  EXPECT_TRUE(fs::exists(dir / "trace.csv"));
}

TEST(Cli, SampleConfigsParse) {
  for (const char* name : {"default.cfg", "groundstate.cfg", "stability.cfg", "blowup_critical.cfg",
                           "instability.cfg", "gn.cfg"})
    EXPECT_TRUE(fs::exists(configs(name))) << name;
  // a short ground-state run driven entirely by a config file
  const auto r = cli("groundstate --config " + configs("groundstate.cfg") + " --n 512 --out-dir " +
                     (fs::temp_directory_path() / "inlsc_cli_gs").string());
  EXPECT_EQ(r.code, 0) << r.out;
}
