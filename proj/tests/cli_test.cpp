// Copyright 2026 The quasifree Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "quasifree");
  std::ostringstream out, err;
  const int code = quasifree::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("quasifree_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name)) << text;
    return path(name);
  }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  }

  fs::path dir_;
};

TEST_F(CliTest, KernelAtOrigin) {
  const auto r = run({"kernel", "--family", "zero_temp", "--kf", "1", "--d", "3", "--at", "0"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("0.016887"), std::string::npos) << r.out;
}

TEST_F(CliTest, KernelRangeCsv) {
  const auto csv = path("k.csv");
  const auto r = run({"kernel", "--family", "bose", "--beta", "0.5", "--z", "0.3", "--d", "1", "--range",
                      "0,2,5", "-o", csv});
  EXPECT_EQ(r.code, 0) << r.err;
  std::istringstream in(slurp(csv));
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) lines += !line.empty() && line[0] != '#';
  EXPECT_EQ(lines, 6);  // header + 5 rows
}

TEST_F(CliTest, InvalidDensityExitsOne) {
  const auto cfg = write("bad.cfg",
                         "family = tabulated\nstatistics = fermion\nd = 1\nradii = 0,1,2\nvalues = 0.5,1.2,0\n");
  const auto r = run({"kernel", "--density", cfg, "--at", "0"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("0 <= k_hat <= 1"), std::string::npos) << r.err;
}

TEST_F(CliTest, UsageErrorsExitTwo) {
  EXPECT_EQ(run({"kernel", "--no-such-flag"}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"sample", "--family", "zero_temp", "--kf", "3", "--d", "1", "--window", "5"}).code, 2);
  EXPECT_EQ(run({"kernel", "--density", path("missing.cfg"), "--at", "0"}).code, 2);
}

TEST_F(CliTest, VerifyAlgebraPasses) {
  const auto r = run({"verify-algebra", "--m", "3", "--seed", "7"});
  ASSERT_EQ(r.code, 0) << r.out << r.err;
  const auto j = json::parse(r.out);
  EXPECT_TRUE(j["passed"].get<bool>());
  EXPECT_EQ(j["metadata"]["seed"], 7);
  for (const auto& c : j["checks"]) EXPECT_LE(c["max_deviation"].get<double>(), 1e-10) << c["name"];
}

TEST_F(CliTest, CorrelateAppendsValues) {
  const auto input = write("pts.csv", "x1,x2\n1.0,1.5\n2.0,2.0\n");
  const auto output = path("out.csv");
  const auto r = run({"correlate", "--family", "zero_temp", "--kf", "3.141592653589793", "--d", "1",
                      "--input", input, "-o", output});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(slurp(output));
  std::string header, row1, row2;
  std::getline(in, header);
  std::getline(in, row1);
  std::getline(in, row2);
  EXPECT_NE(header.find("value"), std::string::npos);
  const double v1 = std::stod(row1.substr(row1.rfind(',') + 1));
  const double v2 = std::stod(row2.substr(row2.rfind(',') + 1));
  EXPECT_NEAR(v1, 0.59471526543064891, 1e-9);
  EXPECT_EQ(v2, 0.0);
}

TEST_F(CliTest, SampleIsDeterministicAndEstimable) {
  const std::vector<std::string> base{"sample", "--family", "zero_temp", "--kf", "3.141592653589793",
                                      "--d", "1", "--window", "10", "--cells", "256", "--replicas",
                                      "200", "--seed", "99"};
  auto a = base, b = base;
  a.insert(a.end(), {"-o", path("a.csv"), "--threads", "1"});
  b.insert(b.end(), {"-o", path("b.csv"), "--threads", "3"});
  ASSERT_EQ(run(a).code, 0);
  ASSERT_EQ(run(b).code, 0);
  const std::string sa = slurp(path("a.csv"));
  EXPECT_FALSE(sa.empty());
  EXPECT_EQ(sa, slurp(path("b.csv")));

  const auto e = run({"estimate", "--input", path("a.csv"), "--window", "10", "--bins", "5", "--r-bins",
                      "5", "--f", "indicator:lower=2;upper=4;amplitude=0.5", "--family", "zero_temp",
                      "--kf", "3.141592653589793", "--d", "1"});
  ASSERT_EQ(e.code, 0) << e.err;
  const auto j = json::parse(e.out);
  EXPECT_EQ(j["config"]["replicas"], 200);
  EXPECT_NEAR(j["intensity"]["mean"].get<double>(), 1.0, 0.05);
}

TEST_F(CliTest, FunctionalReportsAllMethods) {
  const auto r = run({"functional", "--family", "zero_temp", "--kf", "3.141592653589793", "--d", "1",
                      "--window", "10", "--cells", "128", "--nmax", "2", "--replicas", "200", "--seed",
                      "3", "--f", "gaussian:center=5;width=1;amplitude=0.3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  const auto& entry = j["functions"][0];
  for (const char* m : {"series", "fredholm", "empirical"}) EXPECT_TRUE(entry.contains(m)) << m;
}

TEST_F(CliTest, FunctionalDivergenceExitsOne) {
  const auto r = run({"functional", "--family", "bose", "--beta", "0.05", "--z", "0.9", "--d", "1",
                      "--window", "10", "--cells", "64", "--method", "fredholm", "--f",
                      "indicator:lower=0;upper=10;amplitude=3"});
  EXPECT_EQ(r.code, 1) << r.out;
}

}  // namespace
