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

#ifndef QPCR_CLI_H
#define QPCR_CLI_H

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qpcr::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSelfcheck = 3;

/// Raised for malformed or inconsistent run configurations.
class ConfigError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Everything a subcommand needs. Field names match the JSON config keys.
struct RunConfig {
    std::string model = "loss";
    int n = 23;
    int m = 5;
    double l0_km = 2.4;
    double ltot_km = 1000.0;
    double latt_km = 22.0;
    double eta_d = 1.0;
    double eps = 0.0;
    double p_adv = 0.0;
    double nbar = 0.0;
    int kappa = 0;
    std::string tie = "discard";
    /// Empty picks "onoff" for the onoff model and "pnrd" otherwise.
    std::string detector;
    std::string objective = "cost";
    std::string format = "json";
    std::string out;
    uint64_t seed = 0x5eed2026ULL;
    /// 0 uses every available core.
    unsigned threads = 0;

    // rates
    bool matrices = false;

    // sweep and bounds
    std::string axis = "l0";
    /// Empty selects the axis default.
    std::vector<double> grid;

    // optimize
    int n_max = 90;
    int m_max = 12;
    double l0_min = 0.5;
    double l0_max = 10.0;
    double l0_step = 0.1;

    // bounds
    std::string bound = "tgw";
    bool smallest = false;

    // resources
    double p_bm = 0.75;
    double eta_sg = 1.0;
    double p_sg = 0.999;
    int n_bm_boost = 4;

    // selfcheck
    std::string level = "quick";

    /// Fills in derived defaults and throws ConfigError on bad values.
    void resolve();
};

/// Applies a JSON document on top of `base`. Accepts either a bare config
/// object or a full report as emitted by the tool (its "config" member is
/// used). Unknown keys and wrong types raise ConfigError.
RunConfig config_from_json(std::string_view text, RunConfig base = {});

/// Serializes every field; feeding the result back reproduces the run.
std::string config_to_json(const RunConfig &config);

/// Parses `grid` specs of the form "a,b,c" or "lo:hi:step".
std::vector<double> parse_grid(std::string_view spec);

/// Entry point shared by the executable and the tests.
int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

}  // namespace qpcr::cli

#endif
