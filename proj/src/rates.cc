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

#include "qpcr/rates.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qpcr {

BMStats bm_stats(const OutcomeMatrix &l) {
    const auto &v = l.values;
    BMStats s;
    s.l_id = 0.25 * (v[0][0] + v[1][1] + v[2][2] + v[3][3]);
    s.l_x = 0.25 * (v[2][0] + v[3][1] + v[0][2] + v[1][3]);
    s.l_y = 0.25 * (v[3][0] + v[2][1] + v[1][2] + v[0][3]);
    s.l_z = 0.25 * (v[1][0] + v[0][1] + v[3][2] + v[2][3]);
    return s;
}

double binary_entropy(double q) {
    if (q <= 0.0 || q >= 1.0) {
        return 0.0;
    }
    return -q * std::log2(q) - (1.0 - q) * std::log2(1.0 - q);
}

double signed_power(double base, double exponent) {
    if (base >= 0.0) {
        return prob_pow(base, exponent);
    }
    const double magnitude = prob_pow(-base, exponent);
    return static_cast<long long>(std::llround(exponent)) % 2 == 0 ? magnitude : -magnitude;
}

RateReport chain_rates(const BMStats &stats, double stations) {
    if (!(stations >= 1.0)) {
        throw ContractViolation("station count must be >= 1");
    }
    RateReport r;
    r.log_r_t0 = -std::numeric_limits<double>::infinity();
    const double s = stats.total();
    if (s <= 0.0) {
        return r;
    }
    r.p_trans = prob_pow(s, stations);
    const double bx = (stats.l_id - stats.l_x - stats.l_y + stats.l_z) / s;
    const double bz = (stats.l_id + stats.l_x - stats.l_y - stats.l_z) / s;
    r.q_x = 0.5 * (1.0 - signed_power(std::clamp(bx, -1.0, 1.0), stations));
    r.q_z = 0.5 * (1.0 - signed_power(std::clamp(bz, -1.0, 1.0), stations));
    r.q = 0.5 * (r.q_x + r.q_z);
    const double key_fraction = 1.0 - 2.0 * binary_entropy(r.q);
    r.r_t0_unclamped = r.p_trans * key_fraction;
    r.r_t0 = std::max(r.r_t0_unclamped, 0.0);
    if (key_fraction > 0.0) {
        r.log_r_t0 = stations * std::log(std::min(s, 1.0)) + std::log(key_fraction);
    }
    return r;
}

namespace {

void check_closed_form_args(int n, int m, double eta, double stations) {
    CodeParams{n, m}.validate();
    if (!(eta >= 0.0 && eta <= 1.0)) {
        throw ContractViolation("eta must lie in [0,1]");
    }
    if (!(stations >= 1.0)) {
        throw ContractViolation("station count must be >= 1");
    }
}

double loss_like_success(int n, int m, double eta, double accepted_fraction) {
    const double any = 1.0 - std::pow(1.0 - eta, m);
    const double all = std::pow(eta, m);
    return std::pow(any, n) - std::pow(std::max(0.0, any - accepted_fraction * all), n);
}

}  // namespace

double closed_form_loss_rate(int n, int m, double eta, double stations) {
    check_closed_form_args(n, m, eta, stations);
    return prob_pow(loss_like_success(n, m, eta, 0.5), stations);
}

double closed_form_adv_rate(int n, int m, double eta_t, double p_adv, double stations) {
    check_closed_form_args(n, m, eta_t, stations);
    if (!(p_adv >= 0.0 && p_adv <= 1.0)) {
        throw ContractViolation("p_adv must lie in [0,1]");
    }
    return prob_pow(loss_like_success(n, m, eta_t, 0.5 * (1.0 + std::pow(p_adv, m))), stations);
}

OnOffClosedForm closed_form_onoff(int n, int m, double eta, double stations) {
    check_closed_form_args(n, m, eta, stations);
    const double per_link = 1.0 - std::pow(1.0 - 0.5 * std::pow(eta, m), n);
    OnOffClosedForm out{};
    out.p_trans = prob_pow(per_link, stations);
    const double loss_only = closed_form_loss_rate(n, m, eta, stations);
    out.q_x = out.p_trans > 0.0 ? 0.5 * (1.0 - loss_only / out.p_trans) : 0.0;
    return out;
}

}  // namespace qpcr
