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

#include "qpcr/optimizer.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "parallel.h"

namespace qpcr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// True when a should be preferred over b at equal objective value.
bool tie_prefers(const GridPoint &a, const GridPoint &b) {
    const int nma = a.n * a.m;
    const int nmb = b.n * b.m;
    if (nma != nmb) {
        return nma < nmb;
    }
    if (a.n != b.n) {
        return a.n < b.n;
    }
    return a.l0 > b.l0;
}

bool better(const GridPoint &a, const GridPoint &b, Objective objective) {
    if (objective == Objective::MaxRate) {
        if (a.rates.r_t0 != b.rates.r_t0) {
            return a.rates.r_t0 > b.rates.r_t0;
        }
    } else if (a.cost != b.cost) {
        return a.cost < b.cost;
    }
    return tie_prefers(a, b);
}

}  // namespace

std::vector<double> make_l0_grid(double lo, double hi, double step) {
    if (!(lo > 0.0) || !(hi >= lo) || !(step > 0.0)) {
        throw ContractViolation("L0 grid needs 0 < lo <= hi and step > 0");
    }
    std::vector<double> grid;
    const long count = std::lround(std::floor((hi - lo) / step + 1e-9)) + 1;
    for (long i = 0; i < count; ++i) {
        // Round to 1e-9 km so grid values print as their decimal literals.
        grid.push_back(std::round((lo + i * step) * 1e9) / 1e9);
    }
    return grid;
}

std::vector<double> geometric_grid(double lo, double hi, int count) {
    if (!(lo > 0.0) || !(hi >= lo) || count < 1) {
        throw ContractViolation("geometric grid needs 0 < lo <= hi and count >= 1");
    }
    std::vector<double> grid;
    if (count == 1) {
        grid.push_back(lo);
        return grid;
    }
    const double ratio = std::log(hi / lo) / (count - 1);
    for (int i = 0; i < count; ++i) {
        grid.push_back(lo * std::exp(ratio * i));
    }
    return grid;
}

void SearchSpace::validate() const {
    if (n_range.lo < 1 || n_range.hi < n_range.lo) {
        throw ContractViolation("n range must be a nonempty interval of positive integers");
    }
    if (m_range.lo < 1 || m_range.hi < m_range.lo) {
        throw ContractViolation("m range must be a nonempty interval of positive integers");
    }
    if (l0_grid.empty()) {
        throw ContractViolation("L0 grid must not be empty");
    }
    for (double l0 : l0_grid) {
        if (!(l0 > 0.0) || l0 > channel.l_tot) {
            throw ContractViolation("L0 grid values must lie in (0, L_tot]");
        }
    }
    CodeParams{n_range.hi, m_range.hi}.validate();
}

double cost(int n, int m, double l0, double rate) {
    if (!(rate > 0.0) || !(l0 > 0.0)) {
        return kInf;
    }
    return static_cast<double>(n) * m / (rate * l0);
}

GridSearchOutput grid_optimize(const SearchSpace &space, Objective objective, unsigned threads) {
    space.validate();
    const ChainModel model(space.model, space.detector);

    const int n_count = space.n_range.size();
    const size_t l0_count = space.l0_grid.size();
    const size_t tasks = static_cast<size_t>(space.m_range.size()) * l0_count;

    // Skip block sizes the model cannot use (e.g. kappa >= m) instead of failing the run.
    std::vector<bool> m_usable(space.m_range.size(), true);
    for (int m = space.m_range.lo; m <= space.m_range.hi; ++m) {
        try {
            model.validate_for(CodeParams{space.n_range.hi, m});
        } catch (const ContractViolation &) {
            m_usable[m - space.m_range.lo] = false;
        }
    }

    GridSearchOutput out;
    out.grid.resize(tasks * n_count);
    detail::parallel_for(tasks, threads, [&](size_t task) {
        const int m = space.m_range.lo + static_cast<int>(task / l0_count);
        const double l0 = space.l0_grid[task % l0_count];
        GridPoint *slot = &out.grid[task * n_count];
        if (!m_usable[m - space.m_range.lo]) {
            for (int i = 0; i < n_count; ++i) {
                slot[i] = GridPoint{space.n_range.lo + i, m, l0, RateReport{}, kInf};
            }
            return;
        }
        ChannelParams channel = space.channel;
        channel.l0 = l0;
        const std::vector<RateReport> series = model.rates_for_all_n(m, space.n_range.hi, channel);
        for (int i = 0; i < n_count; ++i) {
            const int n = space.n_range.lo + i;
            const RateReport &r = series[n - 1];
            slot[i] = GridPoint{n, m, l0, r, cost(n, m, l0, r.r_t0)};
        }
    });

    const GridPoint *best = nullptr;
    for (const GridPoint &p : out.grid) {
        if (!(p.rates.r_t0 > 0.0)) {
            continue;
        }
        if (best == nullptr || better(p, *best, objective)) {
            best = &p;
        }
    }
    if (best != nullptr) {
        OptimResult &r = out.best;
        r.found = true;
        r.code = CodeParams{best->n, best->m};
        r.l0 = best->l0;
        r.rate = best->rates.r_t0;
        r.cost = best->cost;
        r.per_mode_rate = best->rates.r_t0 / (2.0 * best->n * best->m);
        r.rates = best->rates;
    }
    return out;
}

double tgw_bound(double eta) {
    if (!(eta >= 0.0 && eta <= 1.0)) {
        throw ContractViolation("channel transmissivity must lie in [0,1]");
    }
    if (eta == 1.0) {
        return kInf;
    }
    return (std::log1p(eta) - std::log1p(-eta)) / std::log(2.0);
}

double plob_bound(double eta) {
    if (!(eta >= 0.0 && eta <= 1.0)) {
        throw ContractViolation("channel transmissivity must lie in [0,1]");
    }
    if (eta == 1.0) {
        return kInf;
    }
    return -std::log1p(-eta) / std::log(2.0);
}

// Below this ln(eta) the leading-order expansions are exact in double precision.
constexpr double kSmallLogEta = -40.0;

double log_tgw_bound(double log_eta) {
    if (log_eta < kSmallLogEta) {
        return std::log(2.0 / std::log(2.0)) + log_eta;
    }
    return std::log(tgw_bound(std::exp(log_eta)));
}

double log_plob_bound(double log_eta) {
    if (log_eta < kSmallLogEta) {
        return log_eta - std::log(std::log(2.0));
    }
    return std::log(plob_bound(std::exp(log_eta)));
}

double log_bound(Bound bound, double l_tot, double l_att) {
    const double log_eta = -l_tot / l_att;
    switch (bound) {
        case Bound::TGW:
            return log_tgw_bound(log_eta);
        case Bound::PLOB:
            return log_plob_bound(log_eta);
        case Bound::None:
            return -kInf;
    }
    return -kInf;
}

double log_per_mode_rate(const RateReport &rates, const CodeParams &code) {
    return rates.log_r_t0 - std::log(2.0 * code.n * code.m);
}

std::vector<double> bound_beating_distances(const ChainModel &model, const CodeParams &code, double l0,
                                            Bound bound, const std::vector<double> &l_tot_grid, double l_att) {
    std::vector<double> hits;
    ChannelParams channel;
    channel.l0 = l0;
    channel.l_att = l_att;
    channel.l_tot = std::max(l0, 1.0);
    const PointResult point = model.evaluate(code, channel);
    for (double l_tot : l_tot_grid) {
        if (l_tot < l0) {
            continue;
        }
        const RateReport r = chain_rates(point.stats, l_tot / l0);
        if (log_per_mode_rate(r, code) > log_bound(bound, l_tot, l_att)) {
            hits.push_back(l_tot);
        }
    }
    return hits;
}

BeatingResult smallest_code_beating_bound(const ChainModel &model, Bound bound, const BeatingCaps &caps) {
    std::vector<CodeParams> codes;
    for (int n = 1; n <= caps.max_n; ++n) {
        for (int m = 1; m <= caps.max_m; ++m) {
            if (n * m <= caps.max_nm) {
                codes.push_back(CodeParams{n, m});
            }
        }
    }
    std::sort(codes.begin(), codes.end(), [](const CodeParams &a, const CodeParams &b) {
        if (a.n * a.m != b.n * b.m) {
            return a.n * a.m < b.n * b.m;
        }
        return a.n < b.n;
    });
    std::vector<double> l_tot_grid = caps.l_tot_grid;
    if (l_tot_grid.empty()) {
        l_tot_grid = geometric_grid(10.0, 1.0e6, 121);
    }

    BeatingResult result;
    for (const CodeParams &code : codes) {
        try {
            model.validate_for(code);
        } catch (const ContractViolation &) {
            continue;
        }
        double best_margin = -kInf;
        for (double l0 : caps.l0_grid) {
            ChannelParams channel;
            channel.l0 = l0;
            channel.l_att = caps.l_att;
            channel.l_tot = l0;
            const PointResult point = model.evaluate(code, channel);
            for (double l_tot : l_tot_grid) {
                if (l_tot < l0) {
                    continue;
                }
                const RateReport r = chain_rates(point.stats, l_tot / l0);
                const double margin = log_per_mode_rate(r, code) - log_bound(bound, l_tot, caps.l_att);
                if (margin > 0.0 && margin > best_margin) {
                    best_margin = margin;
                    result.found = true;
                    result.code = code;
                    result.l_tot = l_tot;
                    result.l0 = l0;
                    result.log_margin = margin;
                }
            }
        }
        if (result.found) {
            return result;
        }
    }
    return result;
}

}  // namespace qpcr
