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

#include "qpcr/physical.h"

#include <algorithm>
#include <cmath>
#include <string>

namespace qpcr {

namespace {

constexpr int kRow10 = index_of(Outcome::Phi10);
constexpr int kRow11 = index_of(Outcome::Phi11);
constexpr int kRowZeroUnknown = index_of(Outcome::ZeroUnknown);
constexpr int kRowFail = index_of(Outcome::Failure);

void check_probability(double x, const char *name) {
    if (!(x >= 0.0 && x <= 1.0)) {
        throw ContractViolation(std::string(name) + " must lie in [0,1]");
    }
}

void check_epsilon(double epsilon) {
    if (!(epsilon >= 0.0 && epsilon <= 0.5)) {
        throw ContractViolation("epsilon must lie in [0, 1/2]");
    }
}

void check_nbar(double nbar) {
    if (!(nbar >= 0.0) || !std::isfinite(nbar)) {
        throw ContractViolation("nbar must be a finite nonnegative number");
    }
}

// Fills the failure row so that every column sums to one.
void close_columns(OutcomeMatrix &p) {
    for (int v = 0; v < kNumBellStates; ++v) {
        double s = 0.0;
        for (int u = 0; u < kRowFail; ++u) {
            s += p.values[u][v];
        }
        p.values[kRowFail][v] = std::max(0.0, 1.0 - s);
    }
}

}  // namespace

double DetectorResponse::normalization_error() const {
    double worst = 0.0;
    for (const auto &row : p) {
        worst = std::max(worst, std::abs(row[0] + row[1] + row[2] - 1.0));
    }
    return worst;
}

OutcomeMatrix p_matrix_loss(double eta) {
    check_probability(eta, "eta");
    OutcomeMatrix p;
    p.values[kRow10][2] = eta;
    p.values[kRow11][3] = eta;
    p.values[kRowZeroUnknown][0] = eta;
    p.values[kRowZeroUnknown][1] = eta;
    for (int v = 0; v < kNumBellStates; ++v) {
        p.values[kRowFail][v] = 1.0 - eta;
    }
    return p;
}

OutcomeMatrix apply_depolarizing(const OutcomeMatrix &p, double epsilon) {
    check_epsilon(epsilon);
    const double stay = 1.0 - 1.5 * epsilon;
    const double move = 0.5 * epsilon;
    OutcomeMatrix out;
    out.level = p.level;
    for (int u = 0; u < kNumOutcomes; ++u) {
        for (int v = 0; v < kNumBellStates; ++v) {
            double acc = 0.0;
            for (int w = 0; w < kNumBellStates; ++w) {
                acc += p.values[u][w] * (w == v ? stay : move);
            }
            out.values[u][v] = acc;
        }
    }
    return out;
}

OutcomeMatrix p_matrix_depol(double eta, double epsilon) {
    check_probability(eta, "eta");
    check_epsilon(epsilon);
    const double flip = 0.5 * epsilon * eta;
    OutcomeMatrix p;
    for (int v = 0; v < kNumBellStates; ++v) {
        p.values[kRow10][v] = flip;
        p.values[kRow11][v] = flip;
        p.values[kRowFail][v] = 1.0 - eta;
    }
    p.values[kRow10][2] = (1.0 - 1.5 * epsilon) * eta;
    p.values[kRow11][3] = (1.0 - 1.5 * epsilon) * eta;
    p.values[kRowZeroUnknown][0] = (1.0 - epsilon) * eta;
    p.values[kRowZeroUnknown][1] = (1.0 - epsilon) * eta;
    p.values[kRowZeroUnknown][2] = epsilon * eta;
    p.values[kRowZeroUnknown][3] = epsilon * eta;
    return p;
}

OutcomeMatrix p_matrix_advanced(double eta_t, double p_adv) {
    check_probability(eta_t, "eta_t");
    check_probability(p_adv, "p_adv");
    OutcomeMatrix p = p_matrix_loss(eta_t);
    p.values[index_of(Outcome::Phi00)][0] = p_adv * eta_t;
    p.values[index_of(Outcome::Phi01)][1] = p_adv * eta_t;
    p.values[kRowZeroUnknown][0] = (1.0 - p_adv) * eta_t;
    p.values[kRowZeroUnknown][1] = (1.0 - p_adv) * eta_t;
    return p;
}

OutcomeMatrix p_matrix_onoff(double eta, double epsilon) {
    OutcomeMatrix p = p_matrix_depol(eta, epsilon);
    for (int v = 0; v < kNumBellStates; ++v) {
        p.values[kRowZeroUnknown][v] += p.values[kRowFail][v];
        p.values[kRowFail][v] = 0.0;
    }
    // Write the merged row in closed form so it carries no rounding from the sum.
    p.values[kRowZeroUnknown][0] = 1.0 - epsilon * eta;
    p.values[kRowZeroUnknown][1] = 1.0 - epsilon * eta;
    p.values[kRowZeroUnknown][2] = 1.0 - (1.0 - epsilon) * eta;
    p.values[kRowZeroUnknown][3] = 1.0 - (1.0 - epsilon) * eta;
    return p;
}

DetectorResponse build_detector_response(double eta_d, double nbar) {
    check_probability(eta_d, "eta_d");
    check_nbar(nbar);
    const double loss = 1.0 - eta_d;
    const double a = nbar * loss;
    const double d = 1.0 + a;
    const double d2 = d * d;
    const double d3 = d2 * d;
    const double d4 = d3 * d;

    DetectorResponse r;
    r.p[0][0] = 1.0 / d;
    r.p[0][1] = a / d2;
    r.p[0][2] = a * a / d2;
    r.p[1][0] = loss * (1.0 + nbar) / d2;
    r.p[1][1] = (eta_d + loss * loss * nbar * (1.0 + nbar)) / d3;
    r.p[1][2] = a * (2.0 * eta_d + a + a * a) / d3;
    r.p[2][0] = loss * loss * (1.0 + nbar) * (1.0 + nbar) / d3;
    r.p[2][1] = (1.0 + nbar) * loss * (2.0 * eta_d + nbar * (1.0 + nbar) * loss * loss) / d4;
    r.p[2][2] = std::max(0.0, 1.0 - r.p[2][0] - r.p[2][1]);
    return r;
}

double dark_count_probability(double eta_d, double nbar) {
    check_probability(eta_d, "eta_d");
    check_nbar(nbar);
    const double a = nbar * (1.0 - eta_d);
    return a / (1.0 + a);
}

double single_loss_probability(double eta_t, double eta_d) {
    return (1.0 - eta_t) * eta_d + eta_t * 2.0 * (1.0 - eta_d) * eta_d;
}

OutcomeMatrix p_matrix_dark(double eta_t, double eta_d, double nbar) {
    check_probability(eta_t, "eta_t");
    const DetectorResponse r = build_detector_response(eta_d, nbar);
    const double p00 = r(0, 0), p01 = r(0, 1), p02 = r(0, 2);
    const double p10 = r(1, 0), p11 = r(1, 1), p12 = r(1, 2);
    const double p20 = r(2, 0), p21 = r(2, 1), p22 = r(2, 2);
    const double lost = 1.0 - eta_t;

    // One photon reaches the detectors and exactly one other detector fires:
    // shared by every (1,l) entry reached through a transmission loss.
    const double one_photon_pair = p11 * p01 * p00 * p00 + p10 * p00 * p01 * p01;

    const double zero_to_pair = eta_t * (p21 * p01 * p00 * p00 + p20 * p00 * p01 * p01) + lost * one_photon_pair;
    const double zero_to_unknown = eta_t * ((p22 * p00 + 3.0 * p20 * p02) * p00 * p00) +
                                   lost * ((p12 * p00 + 3.0 * p10 * p02) * p00 * p00);
    const double one_diag = eta_t * (p11 * p11 * p00 * p00 + p01 * p01 * p10 * p10) + lost * one_photon_pair;
    const double one_cross = eta_t * (2.0 * p11 * p10 * p01 * p00) + lost * one_photon_pair;
    const double one_to_unknown = eta_t * ((p12 * p00 + p10 * p02) * 2.0 * p10 * p00) +
                                  lost * ((p12 * p00 + 3.0 * p10 * p02) * p00 * p00);

    OutcomeMatrix p;
    for (int v : {0, 1}) {
        p.values[kRow10][v] = zero_to_pair;
        p.values[kRow11][v] = zero_to_pair;
        p.values[kRowZeroUnknown][v] = zero_to_unknown;
    }
    p.values[kRow10][2] = one_diag;
    p.values[kRow11][3] = one_diag;
    p.values[kRow11][2] = one_cross;
    p.values[kRow10][3] = one_cross;
    p.values[kRowZeroUnknown][2] = one_to_unknown;
    p.values[kRowZeroUnknown][3] = one_to_unknown;
    close_columns(p);
    return p;
}

OutcomeMatrix p_matrix_dark_linear(double eta_t, double eta_d, double nbar) {
    check_probability(eta_t, "eta_t");
    check_probability(eta_d, "eta_d");
    check_nbar(nbar);
    const double p_dc = nbar * (1.0 - eta_d);
    const double eta = eta_d * eta_d * eta_t;
    const double e = single_loss_probability(eta_t, eta_d) * p_dc;

    OutcomeMatrix p;
    for (int v : {0, 1}) {
        p.values[kRow10][v] = e;
        p.values[kRow11][v] = e;
        p.values[kRowZeroUnknown][v] = eta * (1.0 - 5.0 * p_dc) + 2.0 * e;
        p.values[kRowFail][v] = 1.0 - eta * (1.0 - 5.0 * p_dc) - 4.0 * e;
    }
    for (int v : {2, 3}) {
        p.values[kRow10][v] = e;
        p.values[kRow11][v] = e;
        p.values[kRowZeroUnknown][v] = 2.0 * e;
        p.values[kRowFail][v] = 1.0 - eta * (1.0 - 8.0 * p_dc) - 4.0 * e;
    }
    p.values[kRow10][2] = eta * (1.0 - 8.0 * p_dc) + e;
    p.values[kRow11][3] = eta * (1.0 - 8.0 * p_dc) + e;
    return p;
}

}  // namespace qpcr
