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

#ifndef QPCR_RATES_H
#define QPCR_RATES_H

#include "qpcr/core.h"

namespace qpcr {

/// Logical Bell-measurement aggregates: correct identification and the three
/// unheralded Pauli errors, each averaged over the four input states.
struct BMStats {
    double l_id = 0.0;
    double l_x = 0.0;
    double l_y = 0.0;
    double l_z = 0.0;

    double total() const { return l_id + l_x + l_y + l_z; }
};

/// Chain-level figures of merit. Rates are in units of 1/t0.
struct RateReport {
    double p_trans = 0.0;
    double q_x = 0.0;
    double q_z = 0.0;
    double q = 0.0;
    /// p_trans (1 - 2 h(q)) before clamping at zero.
    double r_t0_unclamped = 0.0;
    double r_t0 = 0.0;
    /// ln(r_t0) evaluated without forming p_trans, so it survives distances
    /// where p_trans underflows; -infinity when no key is produced.
    double log_r_t0 = 0.0;
};

BMStats bm_stats(const OutcomeMatrix &l);

/// Binary entropy in bits with 0 log 0 = 0.
double binary_entropy(double q);

/// Transmission probability, QBERs and BB84 key rate over `stations` repeater
/// links. The station count may be fractional.
RateReport chain_rates(const BMStats &stats, double stations);

/// Closed-form key rate for pure loss.
double closed_form_loss_rate(int n, int m, double eta, double stations);

/// Closed-form key rate for loss with an advanced physical BM.
double closed_form_adv_rate(int n, int m, double eta_t, double p_adv, double stations);

struct OnOffClosedForm {
    double p_trans;
    double q_x;
};

/// Transmission probability and bit-flip QBER for on-off detectors without
/// depolarizing noise.
OnOffClosedForm closed_form_onoff(int n, int m, double eta, double stations);

/// x^N for a base in [-1, 1] and a possibly fractional exponent. Negative
/// bases keep the sign of the nearest integer power.
double signed_power(double base, double exponent);

}  // namespace qpcr

#endif
