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

// Acceptance checks. Prints one PASS/FAIL line per criterion; `--only N`
// restricts the run to criterion N. Exit status is 1 when any check fails.

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#include "qpcr/optimizer.h"
#include "qpcr/oracle.h"
#include "qpcr/physical.h"
#include "qpcr/pipeline.h"
#include "qpcr/rates.h"
#include "qpcr/resources.h"

namespace {

using namespace qpcr;

struct Verdict {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string &what) {
        if (!detail.empty()) {
            detail += "; ";
        }
        detail += what;
        if (!ok) {
            pass = false;
            detail += " [x]";
        }
    }
};

std::string fmt(const char *f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char *f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

bool near(double x, double target, double tol) { return std::abs(x - target) <= tol; }

OptimResult min_cost(const ErrorModelSpec &model, const DetectorParams &det, double l_tot, int n_max, int m_max) {
    SearchSpace space;
    space.model = model;
    space.detector = det;
    space.channel.l_tot = l_tot;
    space.n_range = {1, n_max};
    space.m_range = {1, m_max};
    return grid_optimize(space, Objective::MinCost, 0).best;
}

std::string describe(const OptimResult &r) {
    return fmt("(%d,%d) L0=%.1f Rt0=%.4f C=%.1f", r.code.n, r.code.m, r.l0, r.rate, r.cost);
}

Verdict criterion1() {
    Verdict v;
    const ChainModel loss(ErrorModelSpec::loss_only(), DetectorParams{});
    ChannelParams ch;
    ch.l0 = 2.4;
    ch.l_tot = 1000.0;
    const PointResult p = loss.evaluate({23, 5}, ch);
    const double closed = closed_form_loss_rate(23, 5, p.eta_t, p.stations);
    v.require(near(p.rates.r_t0, 0.7618, 0.002), fmt("Rt0=%.6f", p.rates.r_t0));
    v.require(std::abs(p.rates.r_t0 - closed) <= 1e-10, fmt("|engine-closed|=%.2e", std::abs(p.rates.r_t0 - closed)));
    return v;
}

Verdict criterion2() {
    Verdict v;
    DetectorParams det;
    det.eta_d = 0.97;
    const OptimResult r = min_cost(ErrorModelSpec::loss_only(), det, 10000.0, 90, 12);
    v.require(r.found && r.code == CodeParams{50, 7} && near(r.l0, 1.6, 0.2 + 1e-9) && near(r.rate, 0.77, 0.01),
              describe(r));
    return v;
}

Verdict criterion3() {
    Verdict v;
    const OptimResult r = min_cost(ErrorModelSpec::depolarizing(1e-2), DetectorParams{}, 1000.0, 90, 12);
    v.require(r.found && r.code == CodeParams{50, 8} && near(r.l0, 2.0, 0.2 + 1e-9) && near(r.rate, 0.69, 0.01),
              describe(r));
    return v;
}

Verdict criterion4() {
    Verdict v;
    DetectorParams det;
    det.eta_d = 0.97;
    det.nbar = 0.03;
    const OptimResult dark = min_cost(ErrorModelSpec::dark_count(), det, 1000.0, 90, 12);
    v.require(dark.found && dark.code == CodeParams{38, 6} && near(dark.l0, 1.9, 0.2 + 1e-9) &&
                  near(dark.rate, 0.69, 0.02),
              "dark " + describe(dark));
    det.nbar = 0.0;
    const OptimResult dep = min_cost(ErrorModelSpec::depolarizing(1.4e-4), det, 1000.0, 90, 12);
    v.require(dep.found && dep.code == CodeParams{37, 6} && near(dep.rate, 0.70, 0.01), "depol " + describe(dep));
    return v;
}

Verdict criterion5() {
    struct Row {
        double eps;
        double eta_d;
        bool onoff;
        int kappa;
        TiePolicy tie;
        int n;
        int m;
        double l0;
        double rate;
        double cost;
    };
    const Row rows[] = {
        {0, 1, false, 0, TiePolicy::Discard, 23, 5, 2.4, .76, 62.9},
        {0, 1, true, 0, TiePolicy::Discard, 21, 5, 1.9, .72, 76.3},
        {0, .97, false, 0, TiePolicy::Discard, 37, 6, 2.1, .73, 144.6},
        {0, .97, true, 0, TiePolicy::Discard, 45, 7, 2.1, .78, 193.5},
        {1e-3, 1, false, 0, TiePolicy::Discard, 22, 5, 2.0, .65, 84.0},
        {1e-3, 1, true, 2, TiePolicy::Discard, 30, 8, 1.9, .63, 199.4},
        {1e-3, 1, true, 3, TiePolicy::AcceptAsOne, 26, 8, 1.4, .76, 194.7},
        {1e-3, .97, false, 0, TiePolicy::Discard, 36, 6, 1.8, .60, 198.8},
        {1e-3, .97, true, 3, TiePolicy::Discard, 67, 11, 1.3, .77, 735.4},
        {1e-3, .97, true, 3, TiePolicy::AcceptAsOne, 58, 10, 1.3, .71, 631.3},
    };
    Verdict v;
    for (const Row &row : rows) {
        ErrorModelSpec spec = row.eps > 0 ? ErrorModelSpec::depolarizing(row.eps) : ErrorModelSpec::loss_only();
        spec.kappa = row.kappa;
        spec.tie = row.tie;
        DetectorParams det;
        det.eta_d = row.eta_d;
        det.kind = row.onoff ? DetectorKind::OnOff : DetectorKind::PNRD;
        ChannelParams ch;
        ch.l0 = row.l0;
        const double r = ChainModel(spec, det).evaluate({row.n, row.m}, ch).rates.r_t0;
        const double c = cost(row.n, row.m, row.l0, r);
        v.require(near(r, row.rate, 0.01) && std::abs(c / row.cost - 1.0) <= 0.02,
                  fmt("(%d,%d)%s Rt0=%.3f C=%.1f", row.n, row.m, row.onoff ? "/onoff" : "", r, c));
    }
    return v;
}

Verdict criterion6() {
    Verdict v;
    double worst = 0.0;
    for (auto [n, m] : {std::pair{2, 2}, {3, 3}, {5, 4}}) {
        for (double eta : {0.7, 0.9, 1.0}) {
            const OutcomeMatrix p = p_matrix_loss(eta);
            const OutcomeMatrix b = propagate_block(p, m, RuleFamily::standard_f());
            const OutcomeMatrix l = propagate_logical(b, n, RuleFamily::standard_g());
            const double all_lost = std::pow(1.0 - eta, m);
            const double intact = std::pow(eta, m);
            OutcomeMatrix bx;
            for (int v2 : {0, 1}) {
                bx.at(Outcome::ZeroUnknown, v2) = 1.0 - all_lost;
                bx.at(Outcome::Failure, v2) = all_lost;
            }
            for (int v2 : {2, 3}) {
                bx.at(v2, v2) = intact;
                bx.at(Outcome::OneUnknown, v2) = 1.0 - all_lost - intact;
                bx.at(Outcome::Failure, v2) = all_lost;
            }
            const double a = std::pow(1.0 - all_lost, n);
            const double c = std::pow(1.0 - all_lost - intact / 2.0, n);
            const double d = std::pow(intact / 2.0, n);
            for (int u = 0; u < kNumOutcomes; ++u) {
                for (int col = 0; col < kNumBellStates; ++col) {
                    worst = std::max(worst, std::abs(b.at(u, col) - bx.at(u, col)));
                }
            }
            for (int u = 0; u < 4; ++u) {
                for (int col = 0; col < kNumBellStates; ++col) {
                    double expect = 0.0;
                    if (u == col) {
                        expect = col < 2 ? a - c - d : a - c + d;
                    }
                    worst = std::max(worst, std::abs(l.at(u, col) - expect));
                }
            }
        }
    }
    v.require(worst <= 1e-12, fmt("max entry deviation %.2e", worst));
    return v;
}

Verdict criterion7() {
    Verdict v;
    BeatingCaps caps;
    const BeatingResult loss =
        smallest_code_beating_bound(ChainModel(ErrorModelSpec::loss_only(), DetectorParams{}), Bound::TGW, caps);
    v.require(loss.found && loss.code == CodeParams{6, 2}, fmt("loss-only (%d,%d)", loss.code.n, loss.code.m));
    const BeatingResult adv =
        smallest_code_beating_bound(ChainModel(ErrorModelSpec::advanced(0.5), DetectorParams{}), Bound::TGW, caps);
    v.require(adv.found && adv.code == CodeParams{4, 2}, fmt("p_adv=1/2 (%d,%d)", adv.code.n, adv.code.m));

    ErrorModelSpec spec = ErrorModelSpec::dark_count();
    spec.epsilon = 5e-3;
    DetectorParams det;
    det.eta_d = 0.97;
    det.nbar = 0.1;
    const ChainModel model(spec, det);
    const std::vector<double> grid = geometric_grid(10.0, 1.0e5, 200);
    for (CodeParams code : {CodeParams{10, 3}, CodeParams{18, 4}, CodeParams{31, 5}, CodeParams{45, 6}}) {
        const std::vector<double> hits = bound_beating_distances(model, code, 1.5, Bound::TGW, grid);
        const std::string where =
            hits.empty() ? std::string("never") : fmt("%.0f-%.0f km", hits.front(), hits.back());
        v.require(!hits.empty(), fmt("(%d,%d) beats TGW: %s", code.n, code.m, where.c_str()));
    }
    return v;
}

Verdict criterion8() {
    Verdict v;
    const OptimResult none = min_cost(ErrorModelSpec::advanced(0.0), DetectorParams{}, 1000.0, 90, 12);
    const OptimResult ideal = min_cost(ErrorModelSpec::advanced(1.0), DetectorParams{}, 1000.0, 90, 12);
    const double ratio = none.cost / ideal.cost;
    v.require(none.found && ideal.found && near(ratio, 3.0, 0.5),
              fmt("C(0)/C(1)=%.3f from %s and %s", ratio, describe(none).c_str(), describe(ideal).c_str()));
    return v;
}

Verdict criterion9() {
    Verdict v;
    const int lossless = multiplex_pool_size(0.75, 0.999);
    const int lossy = multiplex_pool_size(0.75 * std::pow(0.97, 4), 0.999);
    v.require(lossless == 10 && lossy == 14, fmt("n_X=%d/%d", lossless, lossy));

    struct Row {
        int n;
        int m;
        double counts[4];
    };
    const Row table[] = {
        {4, 2, {37e3, 62e3, 246e3, 354e3}},         {10, 3, {240e3, 454e3, 3.5e6, 5.6e6}},
        {18, 4, {829e3, 1.7e6, 19e6, 35e6}},        {23, 5, {1.6e6, 3.4e6, 51e6, 92e6}},
        {28, 6, {2.8e6, 6.0e6, 108e6, 204e6}},      {38, 6, {4.3e6, 9.6e6, 200e6, 368e6}},
        {67, 11, {22e6, 56e6, 2.1e9, 4.5e9}},
    };
    double worst_lossless = 0.0;
    double worst_lossy = 0.0;
    for (const Row &row : table) {
        for (int c = 0; c < 4; ++c) {
            const double eta = c % 2 == 1 ? 0.97 : 1.0;
            const MuxParams params = c < 2 ? MuxParams::boosted(eta) : MuxParams::standard(eta);
            const double dev = std::abs(mux_source_count(row.n, row.m, params).n_s / row.counts[c] - 1.0);
            double &worst = eta < 1.0 ? worst_lossy : worst_lossless;
            worst = std::max(worst, dev);
        }
    }
    v.require(worst_lossless <= 0.05, fmt("lossless max dev %.1f%%", 100 * worst_lossless));
    v.require(worst_lossy <= 0.15, fmt("lossy max dev %.1f%%", 100 * worst_lossy));
    v.require(std::abs(mux_source_count(23, 5, MuxParams::boosted()).n_s / 1.6e6 - 1.0) <= 0.05, "(23,5) ~ 1.6e6");
    bool exact = true;
    for (int n = 1; n <= 40; ++n) {
        for (int m = 1; m <= 20; ++m) {
            exact = exact && cpc_module_count(n, m) == 2 * n * m - 1;
        }
    }
    v.require(exact, "cpc modules = 2nm-1");
    return v;
}

Verdict criterion10() {
    Verdict v;
    const SelfcheckReport report = run_selfcheck(SelfcheckLevel::Full, McConfig{}.seed, 0);
    for (const CheckResult &c : report.checks) {
        v.require(c.passed, c.name);
    }
    return v;
}

}  // namespace

int main(int argc, char **argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
            only = std::atoi(argv[++i]);
        } else {
            std::fprintf(stderr, "usage: %s [--only N]\n", argv[0]);
            return 2;
        }
    }
    const std::vector<std::function<Verdict()>> criteria = {
        criterion1, criterion2, criterion3, criterion4, criterion5,
        criterion6, criterion7, criterion8, criterion9, criterion10,
    };
    if (only < 0 || only > static_cast<int>(criteria.size())) {
        std::fprintf(stderr, "no criterion %d\n", only);
        return 2;
    }
    bool all = true;
    for (size_t i = 0; i < criteria.size(); ++i) {
        if (only != 0 && static_cast<int>(i) + 1 != only) {
            continue;
        }
        Verdict v;
        try {
            v = criteria[i]();
        } catch (const std::exception &e) {
            v.pass = false;
            v.detail = std::string("exception: ") + e.what();
        }
        std::printf("criterion %zu: %s  %s\n", i + 1, v.pass ? "PASS" : "FAIL", v.detail.c_str());
        std::fflush(stdout);
        all = all && v.pass;
    }
    return all ? 0 : 1;
}
