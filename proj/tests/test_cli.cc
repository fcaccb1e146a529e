// Copyright 2026 The qpcr Authors
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

#include <gtest/gtest.h>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "qpcr/cli.h"

namespace qpcr::cli {
namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "qpcr");
    std::vector<const char *> argv;
    for (const std::string &a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out;
    std::ostringstream err;
    const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

nlohmann::json result_of(const Outcome &o) { return nlohmann::json::parse(o.out).at("result"); }

std::vector<std::string> split(const std::string &line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) {
        cells.push_back(cell);
    }
    return cells;
}

class TempFile {
   public:
    explicit TempFile(const std::string &name)
        : path_(std::filesystem::temp_directory_path() / ("qpcr_cli_test_" + name)) {}
    ~TempFile() { std::filesystem::remove(path_); }
    std::string path() const { return path_.string(); }
    void write(const std::string &text) const { std::ofstream(path_) << text; }
    std::string read() const {
        std::ifstream in(path_);
        std::stringstream buf;
        buf << in.rdbuf();
        return buf.str();
    }

   private:
    std::filesystem::path path_;
};

TEST(Cli, LossOnlyRate) {
    const Outcome o = invoke({"rates", "--n", "23", "--m", "5", "--l0-km", "2.4", "--ltot-km", "1000"});
    ASSERT_EQ(o.code, kExitOk) << o.err;
    EXPECT_NEAR(result_of(o).at("r_t0").get<double>(), 0.762, 5e-4);
}

TEST(Cli, OnOffTableRow) {
    const Outcome o = invoke({"rates", "--model", "onoff", "--n", "30", "--m", "8", "--kappa", "2", "--eps", "1e-3",
                              "--l0-km", "1.9"});
    ASSERT_EQ(o.code, kExitOk) << o.err;
    EXPECT_NEAR(result_of(o).at("r_t0").get<double>(), 0.63, 0.01);
}

TEST(Cli, IdealChainIsBmEfficiencyPower) {
    const Outcome o = invoke({"rates", "--n", "2", "--m", "2", "--l0-km", "1", "--ltot-km", "10", "--latt-km", "1e15"});
    ASSERT_EQ(o.code, kExitOk) << o.err;
    EXPECT_NEAR(result_of(o).at("r_t0").get<double>(), std::pow(0.75, 10), 1e-12);
}

TEST(Cli, MatricesAreColumnStochastic) {
    const Outcome o = invoke({"rates", "--model", "depol", "--eps", "0.01", "--n", "3", "--m", "3", "--matrices"});
    ASSERT_EQ(o.code, kExitOk) << o.err;
    const auto mats = result_of(o).at("matrices");
    for (const char *level : {"P", "B", "L"}) {
        for (int v = 0; v < 4; ++v) {
            double sum = 0.0;
            for (const auto &[label, row] : mats.at(level).items()) {
                sum += row.at(v).get<double>();
            }
            EXPECT_NEAR(sum, 1.0, 1e-12) << level;
        }
    }
}

TEST(Cli, CsvUsesRoundTripPrecision) {
    const Outcome o = invoke({"rates", "--format", "csv", "--l0-km", "2.4"});
    ASSERT_EQ(o.code, kExitOk) << o.err;
    std::istringstream lines(o.out);
    std::string header;
    std::string row;
    std::getline(lines, header);
    std::getline(lines, row);
    const auto names = split(header);
    const auto values = split(row);
    ASSERT_EQ(names.size(), values.size());
    const auto it = std::find(names.begin(), names.end(), "r_t0");
    ASSERT_NE(it, names.end());
    const std::string cell = values[it - names.begin()];
    const Outcome j = invoke({"rates", "--l0-km", "2.4"});
    EXPECT_EQ(std::strtod(cell.c_str(), nullptr), result_of(j).at("r_t0").get<double>());
    EXPECT_EQ(values[2], "2.3999999999999999");
    EXPECT_EQ(cell.find(';'), std::string::npos);
}

TEST(Cli, JsonReportRoundTrips) {
    const Outcome first = invoke({"rates", "--model", "dark", "--eta-d", "0.97", "--nbar", "0.03", "--n", "38", "--m",
                                  "6", "--l0-km", "1.9"});
    ASSERT_EQ(first.code, kExitOk) << first.err;
    TempFile file("roundtrip.json");
    file.write(first.out);
    const Outcome second = invoke({"--config", file.path(), "rates"});
    ASSERT_EQ(second.code, kExitOk) << second.err;
    EXPECT_EQ(first.out, second.out);
}

TEST(Cli, PrecedenceCliOverFileOverDefaults) {
    TempFile file("precedence.json");
    file.write(R"({"n": 10, "m": 3, "l0_km": 1.5})");
    const Outcome o = invoke({"--config", file.path(), "--n", "12", "rates"});
    ASSERT_EQ(o.code, kExitOk) << o.err;
    const auto cfg = nlohmann::json::parse(o.out).at("config");
    EXPECT_EQ(cfg.at("n"), 12);
    EXPECT_EQ(cfg.at("m"), 3);
    EXPECT_EQ(cfg.at("l0_km"), 1.5);
    EXPECT_EQ(cfg.at("ltot_km"), 1000.0);
}

TEST(Cli, RejectsUnknownKeysAndBadTypes) {
    TempFile file("bad.json");
    file.write(R"({"n": 10, "colour": "red"})");
    Outcome o = invoke({"--config", file.path(), "rates"});
    EXPECT_EQ(o.code, kExitConfig);
    EXPECT_NE(o.err.find("colour"), std::string::npos);
    file.write(R"({"n": "ten"})");
    o = invoke({"--config", file.path(), "rates"});
    EXPECT_EQ(o.code, kExitConfig);
    file.write("{not json");
    EXPECT_EQ(invoke({"--config", file.path(), "rates"}).code, kExitConfig);
    EXPECT_EQ(invoke({"--config", "/nonexistent/qpcr.json", "rates"}).code, kExitConfig);
    EXPECT_THROW(config_from_json(R"({"command": "rates", "config": {}, "extra": 1})"), ConfigError);
}

TEST(Cli, ConfigErrors) {
    EXPECT_EQ(invoke({"rates", "--model", "bogus"}).code, kExitConfig);
    EXPECT_EQ(invoke({"rates", "--model", "depol", "--eps", "2"}).code, kExitConfig);
    EXPECT_EQ(invoke({"rates", "--n", "0"}).code, kExitConfig);
    EXPECT_EQ(invoke({"rates", "--model", "onoff", "--detector", "pnrd"}).code, kExitConfig);
    EXPECT_EQ(invoke({"rates", "--format", "csv", "--matrices"}).code, kExitConfig);
    EXPECT_EQ(invoke({"sweep", "--axis", "eps"}).code, kExitConfig);
    EXPECT_EQ(invoke({"sweep", "--grid", "1:x:2"}).code, kExitConfig);
    EXPECT_EQ(invoke({}).code, kExitConfig);
    const Outcome o = invoke({"rates", "--eta-d", "1.5"});
    ASSERT_EQ(o.code, kExitConfig);
    EXPECT_EQ(nlohmann::json::parse(o.err).at("error"), "config");
}

TEST(Cli, HelpExitsCleanly) {
    const Outcome o = invoke({"--help"});
    EXPECT_EQ(o.code, kExitOk);
    EXPECT_NE(o.out.find("selfcheck"), std::string::npos);
}

TEST(Cli, SweepColumnsAndOrdering) {
    const Outcome o = invoke({"sweep", "--model", "depol", "--axis", "eps", "--grid", "0,1e-4,1e-3,5e-3", "--format",
                              "csv"});
    ASSERT_EQ(o.code, kExitOk) << o.err;
    std::istringstream lines(o.out);
    std::string line;
    std::getline(lines, line);
    EXPECT_EQ(line, "eps,p_trans,q,r_t0,per_mode_rate,tgw,plob");
    double prev = 2.0;
    int rows = 0;
    while (std::getline(lines, line)) {
        const double r = std::stod(split(line)[3]);
        EXPECT_LT(r, prev);
        prev = r;
        ++rows;
    }
    EXPECT_EQ(rows, 4);
}

TEST(Cli, SweepCurvesOrderedByCode) {
    std::vector<double> prev;
    for (auto [n, m] : {std::pair{10, 3}, {13, 4}, {16, 4}, {23, 5}, {35, 6}}) {
        const Outcome o = invoke({"sweep", "--axis", "l0", "--grid", "2:5:0.5", "--n", std::to_string(n), "--m",
                                  std::to_string(m)});
        ASSERT_EQ(o.code, kExitOk) << o.err;
        const nlohmann::json rows = result_of(o).at("rows");
        std::vector<double> rates;
        for (const auto &row : rows) {
            rates.push_back(row.at("r_t0").get<double>());
        }
        ASSERT_EQ(rates.size(), 7u);
        for (size_t i = 0; i < prev.size(); ++i) {
            EXPECT_GT(rates[i], prev[i]) << n << "," << m << " point " << i;
        }
        prev = rates;
    }
}

TEST(Cli, SweepOverDistanceKeepsLogValues) {
    const Outcome o = invoke({"sweep", "--axis", "ltot", "--grid", "100,1e5"});
    ASSERT_EQ(o.code, kExitOk) << o.err;
    const auto rows = result_of(o).at("rows");
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_TRUE(rows[1].at("log_per_mode_rate").is_number());
    EXPECT_LT(rows[1].at("log_per_mode_rate").get<double>(), rows[0].at("log_per_mode_rate").get<double>());
}

TEST(Cli, OptimizeDefaultsGiveLossOnlyOptimum) {
    const Outcome o = invoke({"optimize", "--threads", "2"});
    ASSERT_EQ(o.code, kExitOk) << o.err;
    const auto r = result_of(o);
    EXPECT_EQ(r.at("n"), 23);
    EXPECT_EQ(r.at("m"), 5);
    EXPECT_NEAR(r.at("l0_km").get<double>(), 2.4, 1e-12);
    EXPECT_NEAR(r.at("cost").get<double>(), 62.9, 0.05);
}

TEST(Cli, OptimizeIsDeterministic) {
    const std::vector<std::string> args = {"optimize", "--objective", "rate", "--n-max", "20", "--m-max", "4",
                                           "--l0-min",  "1",          "--l0-max", "3",   "--model", "depol",
                                           "--eps",     "1e-3"};
    auto one = args;
    one.insert(one.end(), {"--threads", "1"});
    auto many = args;
    many.insert(many.end(), {"--threads", "3"});
    const Outcome a = invoke(one);
    const Outcome b = invoke(many);
    ASSERT_EQ(a.code, kExitOk) << a.err;
    EXPECT_EQ(result_of(a), result_of(b));
}

TEST(Cli, BoundsTableAndSmallestCode) {
    Outcome o = invoke({"bounds", "--n", "31", "--m", "5", "--l0-km", "1.5", "--grid", "100,300,2000"});
    ASSERT_EQ(o.code, kExitOk) << o.err;
    const auto rows = result_of(o).at("rows");
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_FALSE(rows[0].at("beats_tgw").get<bool>());
    EXPECT_TRUE(rows[2].at("beats_tgw").get<bool>());
    o = invoke({"bounds", "--smallest", "--model", "adv", "--p-adv", "0.5"});
    ASSERT_EQ(o.code, kExitOk) << o.err;
    EXPECT_EQ(result_of(o).at("n"), 4);
    EXPECT_EQ(result_of(o).at("m"), 2);
}

TEST(Cli, ResourcesDefaults) {
    const Outcome o = invoke({"resources"});
    ASSERT_EQ(o.code, kExitOk) << o.err;
    const auto r = result_of(o);
    EXPECT_NEAR(r.at("n_s").get<double>() / 1.6e6, 1.0, 0.05);
    EXPECT_EQ(r.at("cpc_modules"), 229);
    EXPECT_EQ(r.at("n_x"), 10);
    const Outcome lossy = invoke({"resources", "--eta-sg", "0.97"});
    EXPECT_EQ(result_of(lossy).at("n_x"), 14);
    EXPECT_EQ(invoke({"resources", "--p-bm", "0"}).code, kExitConfig);
}

TEST(Cli, SelfcheckQuick) {
    const Outcome o = invoke({"selfcheck", "--level", "quick", "--threads", "2"});
    ASSERT_EQ(o.code, kExitOk) << o.err;
    const auto r = result_of(o);
    EXPECT_TRUE(r.at("passed").get<bool>());
    EXPECT_EQ(r.at("first_failure"), "");
}

TEST(Cli, WritesToOutFile) {
    TempFile file("out.csv");
    const Outcome o = invoke({"resources", "--format", "csv", "--out", file.path()});
    ASSERT_EQ(o.code, kExitOk) << o.err;
    EXPECT_TRUE(o.out.empty());
    EXPECT_EQ(file.read().rfind("n,m,n_x", 0), 0u);
}

TEST(Cli, ParseGrid) {
    EXPECT_EQ(parse_grid("1,2.5,1e3"), (std::vector<double>{1.0, 2.5, 1000.0}));
    EXPECT_EQ(parse_grid("1:2:0.5"), (std::vector<double>{1.0, 1.5, 2.0}));
    EXPECT_THROW(parse_grid("1:2"), ConfigError);
    EXPECT_THROW(parse_grid("a,b"), ConfigError);
    EXPECT_THROW(parse_grid(""), ConfigError);
}

}  // namespace
}  // namespace qpcr::cli
