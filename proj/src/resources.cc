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

#include "qpcr/resources.h"

#include <algorithm>
#include <cmath>

namespace qpcr {

namespace {

// Average photons per GHZ state from six single photons at success 1/32.
constexpr double kPhotonsPerGhz = 192.0;

bool in_unit_interval(double p) { return p > 0.0 && p <= 1.0; }

}  // namespace

void MuxParams::validate() const {
    if (!in_unit_interval(p_bm) || !in_unit_interval(eta_sg)) {
        throw ContractViolation("p_bm and eta_sg must lie in (0,1]");
    }
    if (!(p_sg > 0.0 && p_sg < 1.0)) {
        throw ContractViolation("p_sg must lie in (0,1)");
    }
    if (n_bm_boost < 0) {
        throw ContractViolation("n_bm_boost must be >= 0");
    }
}

int cpc_module_count(int n, int m) {
    CodeParams{n, m}.validate();
    return 2 * n * m - 1;
}

double heralded_source_success(double eta_s, int k_sources) {
    if (!(eta_s >= 0.0 && eta_s <= 1.0)) {
        throw ContractViolation("eta_s must lie in [0,1]");
    }
    if (k_sources < 1) {
        throw ContractViolation("k_sources must be >= 1");
    }
    return -std::expm1(k_sources * std::log1p(-eta_s));
}

int multiplex_pool_size(double p_eff, double p_sg) {
    if (p_eff == 0.0) {
        throw ContractViolation("p_sg is unreachable with p_eff = 0");
    }
    if (!in_unit_interval(p_eff)) {
        throw ContractViolation("p_eff must lie in (0,1]");
    }
    if (!(p_sg > 0.0 && p_sg < 1.0)) {
        throw ContractViolation("p_sg must lie in (0,1)");
    }
    if (p_eff == 1.0) {
        return 2;
    }
    // Smallest pair count with (1 - p_eff)^pairs <= 1 - p_sg.
    int pairs = static_cast<int>(std::ceil(std::log1p(-p_sg) / std::log1p(-p_eff) - 1e-12));
    pairs = std::max(pairs, 1);
    while (1.0 - std::pow(1.0 - p_eff, pairs) < p_sg) {
        ++pairs;
    }
    return 2 * pairs;
}

ResourceReport mux_source_count(int n, int m, const MuxParams &params) {
    CodeParams{n, m}.validate();
    params.validate();
    const double eta = params.eta_sg;
    ResourceReport r;
    r.n_x = multiplex_pool_size(params.p_bm * std::pow(eta, 4), params.p_sg);
    r.exponent = std::log2(2.0 / (params.p_bm * eta * eta));
    const double scale = std::pow(static_cast<double>(n) * m, r.exponent);
    r.n_tilde = kPhotonsPerGhz / (eta * eta * eta) * r.n_x * scale;
    r.n_bm_total = params.n_bm_boost * (r.n_x / 2.0) / (1.0 - params.p_bm / 2.0) * scale;
    r.n_s = r.n_tilde + r.n_bm_total;
    const double extra = 2.0 / params.p_bm;
    r.conservative = r.n_s * extra * extra;
    return r;
}

}  // namespace qpcr
