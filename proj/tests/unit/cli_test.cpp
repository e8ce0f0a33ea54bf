// Copyright 2026 The weakval Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "weakval/cli.hpp"
#include "weakval/scenarios.hpp"

namespace weakval {
namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::map<std::string, std::pair<double, double>> parse_weak_values(const std::string& csv) {
    std::map<std::string, std::pair<double, double>> m;
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "observable,re,im");
    while (std::getline(in, line)) {
        std::istringstream row(line);
        std::string label, re, im;
        std::getline(row, label, ',');
        std::getline(row, re, ',');
        std::getline(row, im, ',');
        m[label] = {std::stod(re), std::stod(im)};
    }
    return m;
}

TEST(Cli, WeakValuesTwoState22) {
    const Result r = run({"weakvalue", "--scenario", "two_state_22", "--format", "csv"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const auto wv = parse_weak_values(r.out);
    EXPECT_NEAR(wv.at("sz_A+sz_B").first, 22.0, 1e-9);
    EXPECT_NEAR(wv.at("sz_A").first, 211.0, 1e-9);
    EXPECT_NEAR(wv.at("sz_B").first, -189.0, 1e-9);
    EXPECT_NEAR(wv.at("sz_A*sz_B").first, 21.0, 1e-9);
}

TEST(Cli, WeakValuesProductPhaseListsLocalValues) {
    const Result r = run({"weakvalue", "--scenario", "product_phase", "--format", "csv"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const auto wv = parse_weak_values(r.out);
    EXPECT_NEAR(wv.at("sz_A*sz_B").first, 1.0, 1e-12);
    EXPECT_NEAR(wv.at("sz_A*sz_B").second, 0.0, 1e-12);
    EXPECT_NEAR(wv.at("sz_A").second, -1.0, 1e-12);
    EXPECT_NEAR(wv.at("sz_B").second, 1.0, 1e-12);
    const Result table = run({"weakvalue", "--scenario", "product_phase"});
    EXPECT_NE(table.out.find("observable"), std::string::npos);
    const Result json = run({"weakvalue", "--scenario", "product_phase", "--format", "json"});
    EXPECT_EQ(nlohmann::json::parse(json.out)["weak_values"].size(), 4u);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run({"weakvalue", "--scenario", "nope"}).code, kExitConfig);
    EXPECT_EQ(run({"weakvalue"}).code, kExitConfig);
    EXPECT_EQ(run({"weakvalue", "--scenario", "two_state_22", "--bogus"}).code, kExitConfig);
    EXPECT_EQ(run({}).code, kExitConfig);
    EXPECT_EQ(run({"weakvalue", "--scenario", "epsilon_sum", "--epsilon", "0"}).code, kExitPhysics);
    EXPECT_EQ(run({"sample", "--scenario", "epsilon_sum", "--delta", "600", "--shots", "100", "--estimator", "direct"}).code,
              kExitPhysics);
    EXPECT_EQ(run({"sweep", "--scenario", "two_state_22", "--delta-min", "10", "--delta-max", "1"}).code, kExitConfig);
    EXPECT_EQ(run({"sample", "--scenario", "two_state_22", "--basis", "spin", "--shots", "5"}).code, kExitConfig);
    EXPECT_EQ(run({"moments", "--scenario", "two_state_22", "--delta", "-1"}).code, kExitConfig);
    EXPECT_EQ(run({"weakvalue", "--scenario", "two_state_22", "--out", "/nonexistent/dir/x.csv"}).code, kExitConfig);
    EXPECT_EQ(run({"--help"}).code, kExitOk);
}

TEST(Cli, SampleOutputIsByteIdentical) {
    const std::string a = ::testing::TempDir() + "weakval_a.csv";
    const std::string b = ::testing::TempDir() + "weakval_b.csv";
    const std::vector<std::string> base{"sample", "--scenario", "product_phase", "--delta", "1", "--shots", "2000",
                                        "--seed", "12", "--basis", "momentum", "--out"};
    auto args_a = base;
    args_a.push_back(a);
    auto args_b = base;
    args_b.push_back(b);
    ASSERT_EQ(run(args_a).code, kExitOk);
    ASSERT_EQ(run(args_b).code, kExitOk);
    const std::string ta = slurp(a);
    EXPECT_EQ(ta, slurp(b));
    EXPECT_EQ(ta.substr(0, ta.find('\n')), "shot_index,postselected,P_A,P_B");
    std::remove(a.c_str());
    std::remove(b.c_str());
}

TEST(Cli, SampleWithEstimatorReportsStats) {
    const Result r = run({"sample", "--scenario", "product_phase", "--delta", "1", "--shots", "50000", "--seed", "3",
                          "--estimator", "resch-steinberg"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["estimator"], "resch-steinberg");
    EXPECT_NEAR(j["estimate"].get<double>(), 1.0, 5.0 * j["stderr"].get<double>());
}

TEST(Cli, SweepCsv) {
    const Result r = run({"sweep", "--scenario", "two_state_22", "--estimator", "direct", "--delta-min", "10",
                          "--delta-max", "1000", "--delta-points", "5"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "delta,device,estimator,analytic,estimate,stderr,target,deviation");
    EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 11);
    EXPECT_NE(r.out.find("entangled-sum"), std::string::npos);
    EXPECT_NE(r.out.find("local-product"), std::string::npos);
}

TEST(Cli, ScenarioListAndExportRoundTrip) {
    const Result list = run({"scenario", "list"});
    ASSERT_EQ(list.code, kExitOk);
    for (const auto& n : builtin_names()) {
        EXPECT_NE(list.out.find(n), std::string::npos) << n;
    }
    const std::string path = ::testing::TempDir() + "weakval_export.json";
    ASSERT_EQ(run({"scenario", "export", "--scenario", "two_state_22", "--out", path}).code, kExitOk);
    EXPECT_TRUE(load_scenario(path) == builtin("two_state_22"));
    const Result wv = run({"weakvalue", "--scenario", path, "--format", "csv"});
    EXPECT_EQ(wv.code, kExitOk);
    EXPECT_NEAR(parse_weak_values(wv.out).at("sz_A+sz_B").first, 22.0, 1e-9);
    std::remove(path.c_str());
}

TEST(Cli, AblAndMoments) {
    const Result abl = run({"abl", "--scenario", "epsilon_sum"});
    ASSERT_EQ(abl.code, kExitOk) << abl.err;
    EXPECT_NE(abl.out.find("sz_A+sz_B,ideal,mean,2"), std::string::npos);
    EXPECT_NE(abl.out.find("sz_A+sz_B,separate,mean,"), std::string::npos);
    const Result m = run({"moments", "--scenario", "epsilon_sum", "--delta", "5", "--oracle"});
    ASSERT_EQ(m.code, kExitOk) << m.err;
    const auto j = nlohmann::json::parse(m.out);
    EXPECT_NEAR(j["closed_form"]["meanQ"][0].get<double>(), j["grid_oracle"]["meanQ"][0].get<double>(), 1e-8);
}

TEST(Cli, ReportListsFiveInconsistencies) {
    const Result r = run({"report"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["inconsistencies"].size(), 5u);
    EXPECT_GT(j["summary"]["pass"].get<int>(), 40);
    EXPECT_EQ(run({"report"}).out, r.out);
    const Result md = run({"report", "--format", "markdown"});
    EXPECT_EQ(md.out.rfind("# Reproduction report", 0), 0u);
}

}  // namespace
}  // namespace weakval
