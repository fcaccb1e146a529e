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

#include "qpcr/pipeline.h"

#include "qpcr/physical.h"

namespace qpcr {

ChainModel::ChainModel(ErrorModelSpec spec, DetectorParams detector) : spec_(spec), detector_(detector) {
    detector_.validate();
    using Kind = ErrorModelSpec::Kind;
    if (detector_.kind == DetectorKind::OnOff) {
        if (spec_.kind == Kind::LossOnly || spec_.kind == Kind::LossDepol) {
            spec_ = ErrorModelSpec::on_off(spec_.epsilon, spec_.kappa, spec_.tie);
        } else if (spec_.kind != Kind::OnOff) {
            throw ContractViolation("on-off detectors are only supported with the loss and depolarizing models");
        }
    }
    spec_.validate();
}

OutcomeMatrix ChainModel::physical(double eta_t) const {
    const double eta = detector_.eta_d * detector_.eta_d * eta_t;
    switch (spec_.kind) {
        case ErrorModelSpec::Kind::LossOnly:
            return p_matrix_loss(eta);
        case ErrorModelSpec::Kind::LossDepol:
            return p_matrix_depol(eta, spec_.epsilon);
        case ErrorModelSpec::Kind::AdvancedBM:
            return p_matrix_advanced(eta_t, spec_.p_adv);
        case ErrorModelSpec::Kind::OnOff:
            return p_matrix_onoff(eta, spec_.epsilon);
        case ErrorModelSpec::Kind::DarkCount: {
            OutcomeMatrix p = p_matrix_dark(eta_t, detector_.eta_d, detector_.nbar);
            return spec_.epsilon > 0.0 ? apply_depolarizing(p, spec_.epsilon) : p;
        }
    }
    throw ContractViolation("unknown error model");
}

RuleFamily ChainModel::block_rules() const {
    if (spec_.kind == ErrorModelSpec::Kind::OnOff) {
        if (spec_.kappa == 0) {
            return RuleFamily::onoff_tilde();
        }
        return RuleFamily::onoff_kappa(spec_.kappa, spec_.tie);
    }
    return RuleFamily::standard_f();
}

void ChainModel::validate_for(const CodeParams &code) const {
    code.validate();
    spec_.validate(code.m);
}

PointResult ChainModel::evaluate(const CodeParams &code, const ChannelParams &channel) const {
    validate_for(code);
    channel.validate();
    PointResult r;
    r.eta_t = channel.transmission();
    r.stations = channel.stations();
    r.p = physical(r.eta_t);
    r.b = propagate_block(r.p, code.m, block_rules());
    r.l = propagate_logical(r.b, code.n, logical_rules());
    r.stats = bm_stats(r.l);
    r.rates = chain_rates(r.stats, r.stations);
    return r;
}

std::vector<RateReport> ChainModel::rates_for_all_n(int m, int n_max, const ChannelParams &channel) const {
    validate_for(CodeParams{n_max, m});
    channel.validate();
    const OutcomeMatrix b = propagate_block(physical(channel.transmission()), m, block_rules());
    const std::vector<OutcomeMatrix> ls = propagate_logical_series(b, n_max, logical_rules());
    std::vector<RateReport> out;
    out.reserve(ls.size());
    const double stations = channel.stations();
    for (const OutcomeMatrix &l : ls) {
        out.push_back(chain_rates(bm_stats(l), stations));
    }
    return out;
}

}  // namespace qpcr
