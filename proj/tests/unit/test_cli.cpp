#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "golden.hpp"

namespace fs = std::filesystem;
using testing_support::data_file;

namespace {

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "bayesdoe");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  CliRun r;
  r.code = bayesdoe::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> v;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("bayesdoe-cli-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    camp_ = (dir_ / "c.json").string();
  }
  void TearDown() override { fs::remove_all(dir_); }

  void init_batchobj() {
    const CliRun i = run({"init", "--space", data_file("BatchObj.space.json"), "--out", camp_, "--seed", "4"});
    ASSERT_EQ(i.code, 0) << i.err;
    const CliRun t = run({"tell", "-c", camp_, "--data", data_file("BatchObj.csv")});
    ASSERT_EQ(t.code, 0) << t.err;
  }

  std::string write(const std::string& name, const std::string& text) {
    const std::string path = (dir_ / name).string();
    std::ofstream(path) << text;
    return path;
  }

  fs::path dir_;
  std::string camp_;
};

TEST_F(CliTest, AskPrintsCsvBatch) {
  init_batchobj();
  const CliRun r = run({"ask", "-c", camp_, "-q", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0], "Saturation,Layer_thickness,Roll_speed,Feed_powder_ratio");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_EQ(std::count(rows[i].begin(), rows[i].end(), ','), 3);
  }
}

TEST_F(CliTest, OutOfBoundsTellNamesRow) {
  init_batchobj();
  const std::string bad = write("bad.csv",
                                "Saturation,Layer_thickness,Roll_speed,Feed_powder_ratio,y\n"
                                "50,100,10,2,5\n"
                                "150,100,10,2,5\n");
  const CliRun r = run({"tell", "-c", camp_, "--data", bad});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("row 2"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("Saturation"), std::string::npos) << r.err;

  const CliRun clamped = run({"tell", "-c", camp_, "--data", bad, "--clamp"});
  EXPECT_EQ(clamped.code, 0) << clamped.err;
  EXPECT_NE(clamped.out.find("warning"), std::string::npos);
}

TEST_F(CliTest, SimulateTraceIsMonotone) {
  init_batchobj();
  const std::string trace = (dir_ / "trace.csv").string();
  const CliRun s = run({"simulate", "-c", camp_, "--iters", "2", "-q", "2", "--trace", trace});
  ASSERT_EQ(s.code, 0) << s.err;
  EXPECT_TRUE(fs::exists(trace));

  const CliRun e = run({"export-trace", "-c", camp_, "--json"});
  ASSERT_EQ(e.code, 0) << e.err;
  const auto entries = nlohmann::json::parse(e.out)["trace"];
  EXPECT_EQ(entries.size(), 27u + 4u);
  for (std::size_t i = 1; i < entries.size(); ++i) {
    EXPECT_GE(entries[i]["best_so_far"].get<double>(), entries[i - 1]["best_so_far"].get<double>());
  }
  const CliRun csv = run({"export-trace", "-c", camp_});
  EXPECT_EQ(lines(csv.out).size(), 27u + 4u + 1u);
}

TEST_F(CliTest, RepeatedRunsAreByteIdentical) {
  std::string first;
  for (int pass = 0; pass < 2; ++pass) {
    fs::remove(camp_);
    init_batchobj();
    const CliRun a = run({"ask", "-c", camp_, "-q", "3", "--strategy", "constant_liar"});
    ASSERT_EQ(a.code, 0) << a.err;
    const CliRun r = run({"recommend", "-c", camp_});
    ASSERT_EQ(r.code, 0) << r.err;
    if (pass == 0) first = a.out + r.out;
    else EXPECT_EQ(first, a.out + r.out);
  }
}

TEST_F(CliTest, JsonOutputParses) {
  init_batchobj();
  const CliRun st = run({"status", "-c", camp_, "--json"});
  ASSERT_EQ(st.code, 0);
  const auto j = nlohmann::json::parse(st.out);
  EXPECT_EQ(j["n"], 27);
  const CliRun a = run({"ask", "-c", camp_, "--json"});
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(nlohmann::json::parse(a.out)["batch"].size(), 1u);
}

TEST_F(CliTest, UsageErrorsExit2) {
  EXPECT_EQ(run({"ask"}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"ask", "-c", camp_, "-q", "0"}).code, 2);
  init_batchobj();
  EXPECT_EQ(run({"ask", "-c", camp_, "--strategy", "nope"}).code, 2);
  EXPECT_EQ(run({"simulate", "-c", camp_, "--oracle", "cubic"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(CliTest, StatusReportsRevision) {
  init_batchobj();
  const CliRun r = run({"status", "-c", camp_});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("n=27"), std::string::npos);
  EXPECT_NE(r.out.find("revision=1"), std::string::npos);
}

}  // namespace
