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

#include "qpcr/core.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

namespace qpcr {

std::string_view outcome_label(Outcome u) {
    switch (u) {
        case Outcome::Phi00:
            return "(0,0)";
        case Outcome::Phi01:
            return "(0,1)";
        case Outcome::Phi10:
            return "(1,0)";
        case Outcome::Phi11:
            return "(1,1)";
        case Outcome::ZeroUnknown:
            return "(0,?)";
        case Outcome::OneUnknown:
            return "(1,?)";
        case Outcome::Failure:
            return "(?,?)";
    }
    return "invalid";
}

std::string_view level_name(Level level) {
    switch (level) {
        case Level::Physical:
            return "physical";
        case Level::Block:
            return "block";
        case Level::Logical:
            return "logical";
    }
    return "invalid";
}

namespace {

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

void require(bool condition, const std::string &message) {
    if (!condition) {
        throw ContractViolation(message);
    }
}

}  // namespace

void CodeParams::validate(int size_cap) const {
    require(n >= 1, "code parameter n must be >= 1");
    require(m >= 1, "code parameter m must be >= 1");
    require(static_cast<long long>(n) * m <= size_cap,
            "code size n*m = " + std::to_string(static_cast<long long>(n) * m) + " exceeds cap " +
                std::to_string(size_cap));
}

void ChannelParams::validate() const {
    require(l0 > 0.0, "repeater spacing L0 must be positive");
    require(l0 <= l_tot, "repeater spacing L0 must not exceed L_tot");
    require(l_att > 0.0, "attenuation length must be positive");
    require(stations() >= 1.0, "station count L_tot/L0 must be >= 1");
}

double ChannelParams::stations() const {
    double n = l_tot / l0;
    return integer_stations ? std::round(n) : n;
}

double ChannelParams::transmission() const { return std::exp(-l0 / l_att); }

void DetectorParams::validate() const {
    require(is_probability(eta_d), "detector efficiency eta_d must lie in [0,1]");
    require(nbar >= 0.0 && std::isfinite(nbar), "thermal photon number nbar must be >= 0");
}

ErrorModelSpec ErrorModelSpec::depolarizing(double epsilon) {
    ErrorModelSpec s;
    s.kind = Kind::LossDepol;
    s.epsilon = epsilon;
    return s;
}

ErrorModelSpec ErrorModelSpec::advanced(double p_adv) {
    ErrorModelSpec s;
    s.kind = Kind::AdvancedBM;
    s.p_adv = p_adv;
    return s;
}

ErrorModelSpec ErrorModelSpec::on_off(double epsilon, int kappa, TiePolicy tie) {
    ErrorModelSpec s;
    s.kind = Kind::OnOff;
    s.epsilon = epsilon;
    s.kappa = kappa;
    s.tie = tie;
    return s;
}

ErrorModelSpec ErrorModelSpec::dark_count() {
    ErrorModelSpec s;
    s.kind = Kind::DarkCount;
    return s;
}

void ErrorModelSpec::validate(int m) const {
    require(epsilon >= 0.0 && epsilon <= 0.5, "depolarizing epsilon must lie in [0, 1/2]");
    require(is_probability(p_adv), "p_adv must lie in [0,1]");
    require(kappa >= 0, "kappa must be nonnegative");
    if (kind == Kind::OnOff && epsilon > 0.0) {
        require(kappa >= 1, "on-off detectors with depolarizing errors need kappa >= 1");
        if (m > 0) {
            require(kappa <= m - 1, "kappa must satisfy kappa <= m - 1");
        }
    }
    if (kind == Kind::OnOff && kappa > 0 && m > 0) {
        require(kappa <= m - 1, "kappa must satisfy kappa <= m - 1");
    }
}

std::string ErrorModelSpec::describe() const {
    std::ostringstream out;
    switch (kind) {
        case Kind::LossOnly:
            out << "loss";
            break;
        case Kind::LossDepol:
            out << "depol(eps=" << epsilon << ")";
            break;
        case Kind::AdvancedBM:
            out << "adv(p_adv=" << p_adv << ")";
            break;
        case Kind::OnOff:
            out << "onoff(eps=" << epsilon << ", kappa=" << kappa
                << ", tie=" << (tie == TiePolicy::Discard ? "discard" : "accept") << ")";
            break;
        case Kind::DarkCount:
            out << "dark";
            break;
    }
    return out.str();
}

std::array<double, kNumOutcomes> OutcomeMatrix::column(int v) const {
    std::array<double, kNumOutcomes> c{};
    for (int u = 0; u < kNumOutcomes; ++u) {
        c[u] = values[u][v];
    }
    return c;
}

double OutcomeMatrix::column_sum(int v) const {
    double s = 0.0;
    for (int u = 0; u < kNumOutcomes; ++u) {
        s += values[u][v];
    }
    return s;
}

double OutcomeMatrix::stochasticity_error() const {
    double worst = 0.0;
    for (int v = 0; v < kNumBellStates; ++v) {
        worst = std::max(worst, std::abs(column_sum(v) - 1.0));
    }
    return worst;
}

bool OutcomeMatrix::is_column_stochastic(double tol) const {
    for (const auto &row : values) {
        for (double x : row) {
            if (!(x >= -tol && x <= 1.0 + tol)) {
                return false;
            }
        }
    }
    return stochasticity_error() <= tol;
}

double OutcomeMatrix::max_abs_diff(const OutcomeMatrix &other) const {
    double worst = 0.0;
    for (int u = 0; u < kNumOutcomes; ++u) {
        for (int v = 0; v < kNumBellStates; ++v) {
            worst = std::max(worst, std::abs(values[u][v] - other.values[u][v]));
        }
    }
    return worst;
}

int CountVector::total() const {
    int t = 0;
    for (int c : counts) {
        t += c;
    }
    return t;
}

SlotSet::SlotSet(std::initializer_list<int> slots) {
    for (int w : slots) {
        insert(w);
    }
}

SlotSet SlotSet::from_mask(uint32_t mask) {
    SlotSet s;
    s.mask_ = mask & ((1u << kNumOutcomes) - 1);
    return s;
}

void SlotSet::insert(int w) {
    require(w >= 0 && w < kNumOutcomes, "slot index out of range");
    mask_ |= 1u << w;
}

int SlotSet::size() const { return std::popcount(mask_); }

std::vector<int> SlotSet::members() const {
    std::vector<int> out;
    for (int w = 0; w < kNumOutcomes; ++w) {
        if (contains(w)) {
            out.push_back(w);
        }
    }
    return out;
}

namespace {

void compose_rec(const std::vector<int> &slots, size_t pos, int remaining, CountVector &current,
                 const std::function<void(const CountVector &)> &visit) {
    int w = slots[pos];
    if (pos + 1 == slots.size()) {
        current[w] = remaining;
        visit(current);
        current[w] = 0;
        return;
    }
    for (int c = remaining; c >= 0; --c) {
        current[w] = c;
        compose_rec(slots, pos + 1, remaining - c, current, visit);
    }
    current[w] = 0;
}

}  // namespace

void for_each_composition(int total, SlotSet slots, const std::function<void(const CountVector &)> &visit) {
    require(total >= 0, "composition total must be nonnegative");
    require(!slots.empty(), "composition needs at least one active slot");
    std::vector<int> members = slots.members();
    CountVector current;
    compose_rec(members, 0, total, current, visit);
}

std::vector<CountVector> enumerate_compositions(int total, SlotSet slots) {
    std::vector<CountVector> out;
    for_each_composition(total, slots, [&](const CountVector &c) { out.push_back(c); });
    return out;
}

double composition_count(int total, int parts) {
    require(total >= 0 && parts >= 1, "composition_count needs total >= 0 and parts >= 1");
    // C(total + parts - 1, parts - 1), accumulated exactly while it fits.
    double result = 1.0;
    for (int i = 1; i < parts; ++i) {
        result = result * (total + i) / i;
    }
    return std::round(result);
}

double log_multinomial(int total, const CountVector &counts) {
    require(counts.total() == total, "multinomial: counts do not sum to total");
    double acc = std::lgamma(total + 1.0);
    for (int c : counts.counts) {
        require(c >= 0, "multinomial: negative count");
        acc -= std::lgamma(c + 1.0);
    }
    return acc;
}

double multinomial(int total, const CountVector &counts) {
    require(counts.total() == total, "multinomial: counts do not sum to total");
    if (total > 170) {
        return std::exp(log_multinomial(total, counts));
    }
    // Product of binomials keeps every intermediate an exact integer for
    // moderate totals.
    double result = 1.0;
    int placed = 0;
    for (int c : counts.counts) {
        require(c >= 0, "multinomial: negative count");
        for (int i = 1; i <= c; ++i) {
            result = result * (placed + i) / i;
        }
        placed += c;
    }
    return std::round(result) == result || result > 9.0e15 ? result : std::round(result);
}

double prob_pow(double x, double exponent) {
    if (exponent == 0.0) {
        return 1.0;
    }
    if (x <= 0.0) {
        return 0.0;
    }
    x = std::clamp(x, 1e-300, 1.0);
    return std::exp(exponent * std::log(x));
}

}  // namespace qpcr
