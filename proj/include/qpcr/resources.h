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

#ifndef QPCR_RESOURCES_H
#define QPCR_RESOURCES_H

#include "qpcr/core.h"

namespace qpcr {

/// Linear-optics multiplexing parameters.
struct MuxParams {
    /// Success probability of one physical BM used to join states.
    double p_bm = 0.75;
    /// Survival probability of every photon measured during preparation.
    double eta_sg = 1.0;
    /// Target probability of producing the encoded Bell state in one attempt.
    double p_sg = 0.999;
    /// Ancilla photons consumed by each boosted BM.
    int n_bm_boost = 4;

    /// 3/4-efficient BM boosted with four ancilla photons.
    static MuxParams boosted(double eta_sg = 1.0) { return {0.75, eta_sg, 0.999, 4}; }
    /// Unboosted linear-optics BM; no ancillas are spent.
    static MuxParams standard(double eta_sg = 1.0) { return {0.5, eta_sg, 0.999, 0}; }

    void validate() const;
};

/// Average photon-source counts for one encoded Bell state.
struct ResourceReport {
    int n_x = 0;
    /// Photons feeding the GHZ supply.
    double n_tilde = 0.0;
    /// Ancilla photons spent on boosting the joining BMs.
    double n_bm_total = 0.0;
    double n_s = 0.0;
    /// n_s with the extra (2/p_bm)^2 factor covering non-power-of-two codes.
    double conservative = 0.0;
    /// Exponent applied to n m.
    double exponent = 0.0;
};

/// Photon doubler modules needed by the nonlinear preparation scheme.
int cpc_module_count(int n, int m);

/// Probability that at least one of k heralded sources fires.
double heralded_source_success(double eta_s, int k_sources);

/// Smallest even pool size n_x with 1 - (1 - p_eff)^(n_x/2) >= p_sg.
/// Throws ContractViolation when p_eff = 0.
int multiplex_pool_size(double p_eff, double p_sg);

ResourceReport mux_source_count(int n, int m, const MuxParams &params);

}  // namespace qpcr

#endif
