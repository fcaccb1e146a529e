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

#ifndef QPCR_PHYSICAL_H
#define QPCR_PHYSICAL_H

#include <array>

#include "qpcr/core.h"

namespace qpcr {

/// Photon-number response of a lossy detector fed with thermal background.
/// p[mu][nu] is the probability that mu incident photons register as nu
/// detected photons, with nu = 2 standing for "two or more".
struct DetectorResponse {
    std::array<std::array<double, 3>, 3> p{};

    double operator()(int mu, int nu) const { return p[mu][nu]; }
    /// Largest |row sum - 1|.
    double normalization_error() const;
};

/// Physical outcome matrix under pure photon loss with survival probability eta.
OutcomeMatrix p_matrix_loss(double eta);

/// Loss followed by a symmetric Pauli channel of strength epsilon.
OutcomeMatrix p_matrix_depol(double eta, double epsilon);

/// Loss with a physical BM that resolves phi_{0,l} with probability p_adv.
OutcomeMatrix p_matrix_advanced(double eta_t, double p_adv);

/// Loss and depolarizing noise seen by on-off (non number resolving) detectors.
/// Failure and (0,?) merge because a lost photon is indistinguishable from a
/// phi_{0,l} pattern.
OutcomeMatrix p_matrix_onoff(double eta, double epsilon);

/// Detector response with efficiency eta_d and thermal noise nbar.
DetectorResponse build_detector_response(double eta_d, double nbar);

/// Probability that an idle detector clicks: nbar(1-eta_d) / (1 + nbar(1-eta_d)).
double dark_count_probability(double eta_d, double nbar);

/// Exact physical outcome matrix with transmission loss, detector loss and
/// dark counts. Three-or-more-click patterns count as failures.
OutcomeMatrix p_matrix_dark(double eta_t, double eta_d, double nbar);

/// Linearized dark-count matrix (first order in the dark-count rate
/// p_dc = nbar(1-eta_d)). Only used to cross-check p_matrix_dark.
OutcomeMatrix p_matrix_dark_linear(double eta_t, double eta_d, double nbar);

/// Probability that exactly one of the two photons entering a physical BM is
/// lost, either in the fiber or in a detector.
double single_loss_probability(double eta_t, double eta_d);

/// Applies a symmetric Bell-state mixing channel of strength epsilon to the
/// columns of P: each input Bell state stays with probability 1 - 3 epsilon/2
/// and turns into each of the other three with probability epsilon/2.
/// p_matrix_depol(eta, eps) == apply_depolarizing(p_matrix_loss(eta), eps).
OutcomeMatrix apply_depolarizing(const OutcomeMatrix &p, double epsilon);

}  // namespace qpcr

#endif
