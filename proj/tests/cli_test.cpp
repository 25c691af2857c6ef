#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result fieldc(const std::string& args) {
  std::string cmd = std::string(FIELDC_BINARY) + " " + args + " 2>&1";
  Result r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf{};
  while (auto n = std::fread(buf.data(), 1, buf.size(), p)) r.out.append(buf.data(), n);
  int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string src(const std::string& rel) { return std::string(FIELDCALC_SOURCE_DIR) + "/" + rel; }

std::string temp_file(const std::string& name, const std::string& text) {
  auto path = std::filesystem::temp_directory_path() / ("fieldc-test-" + name);
  std::ofstream(path) << text;
  return path.string();
}

}  // namespace

TEST(Cli, TypecheckCorpusEntry) {
  auto r = fieldc("typecheck " + src("corpus/distance-to.hfc"));
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("(bool) -> num"), std::string::npos) << r.out;
}

TEST(Cli, TypecheckJson) {
  auto r = fieldc("typecheck --json " + src("programs/counter.hfc"));
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("\"num\""), std::string::npos) << r.out;
}

TEST(Cli, TypeErrorExitsWithOne) {
  auto f = temp_file("bad.hfc", "nbr{nbr{0}}\n");
  auto r = fieldc("typecheck " + f);
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("T-NBR"), std::string::npos) << r.out;
}

TEST(Cli, ParseErrorExitsWithOne) {
  auto f = temp_file("unclosed.hfc", "nbr{0\n");
  EXPECT_EQ(fieldc("typecheck " + f).code, 1);
}

TEST(Cli, MissingFileExitsWithTwo) {
  EXPECT_EQ(fieldc("typecheck /nonexistent/x.hfc").code, 2);
}

TEST(Cli, UnknownOptionExitsWithTwo) {
  EXPECT_EQ(fieldc("run --bogus").code, 2);
}

TEST(Cli, RunCsv) {
  auto r = fieldc("run --format csv " + src("programs/counter.hfc") + " " +
                  src("scenarios/one-device-5-fires.json"));
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(r.out, "time,device,root\n1,1,1\n2,1,2\n3,1,3\n4,1,4\n5,1,5\n");
}

TEST(Cli, RunJsonLines) {
  auto r = fieldc("run " + src("programs/counter.hfc") + " " +
                  src("scenarios/one-device-5-fires.json"));
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("\"tree\""), std::string::npos);
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 5);
}

TEST(Cli, RunWithLibrary) {
  auto f = temp_file("lib-main.hfc", "distance-to(uid() = 1)\n");
  auto r = fieldc("run --format csv --lib " + src("corpus") + " " + f + " " +
                  src("scenarios/three-devices.json"));
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("\n1,1,0\n"), std::string::npos) << r.out;
}

TEST(Cli, CheckAdequacy) {
  auto r = fieldc("check-adequacy " + src("programs/counter.hfc") + " " +
                  src("scenarios/one-device-5-fires.json"));
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("5/5 events equal"), std::string::npos) << r.out;
}

TEST(Cli, DenotOverScenario) {
  auto r = fieldc("denot --format csv " + src("programs/counter.hfc") + " " +
                  src("scenarios/one-device-5-fires.json"));
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find(",5\n"), std::string::npos) << r.out;
}

TEST(Cli, CorpusTest) {
  auto r = fieldc("corpus-test --corpus " + src("corpus"));
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("converge-sum"), std::string::npos);
}

TEST(Cli, MissingSensorIsSemanticFailure) {
  auto r = fieldc("run " + src("programs/minhood.hfc") + " " +
                  src("scenarios/one-device-5-fires.json"));
  EXPECT_EQ(r.code, 1) << r.out;
}
