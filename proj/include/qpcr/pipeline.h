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

#ifndef QPCR_PIPELINE_H
#define QPCR_PIPELINE_H

#include <vector>

#include "qpcr/core.h"
#include "qpcr/propagation.h"
#include "qpcr/rates.h"

namespace qpcr {

/// Everything computed for one (code, channel) point.
struct PointResult {
    double eta_t = 0.0;
    double stations = 0.0;
    OutcomeMatrix p;
    OutcomeMatrix b;
    OutcomeMatrix l;
    BMStats stats;
    RateReport rates;
};

/// Binds an error model and a detector to the physical matrix and the
/// interpretation rules of each level.
///
/// PNRD loss and depolarizing models switch to their on-off counterparts when
/// the detector kind is OnOff. A DarkCount model with epsilon > 0 composes the
/// exact dark-count matrix with the depolarizing Bell-state mixing.
class ChainModel {
   public:
    ChainModel(ErrorModelSpec spec, DetectorParams detector);

    const ErrorModelSpec &spec() const { return spec_; }
    const DetectorParams &detector() const { return detector_; }

    /// Physical outcome matrix for fiber transmission eta_t of one segment.
    OutcomeMatrix physical(double eta_t) const;
    RuleFamily block_rules() const;
    RuleFamily logical_rules() const { return RuleFamily::standard_g(); }

    /// Throws ContractViolation when the model cannot be used with block size m.
    void validate_for(const CodeParams &code) const;

    PointResult evaluate(const CodeParams &code, const ChannelParams &channel) const;

    /// Rate reports for every n in [1, n_max] at fixed m and channel.
    /// Element i holds n = i + 1.
    std::vector<RateReport> rates_for_all_n(int m, int n_max, const ChannelParams &channel) const;

   private:
    ErrorModelSpec spec_;
    DetectorParams detector_;
};

}  // namespace qpcr

#endif
