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

#include "qpcr/propagation.h"

#include <cmath>
#include <limits>
#include <utility>

namespace qpcr {

// ---------------------------------------------------------------------------
// Interpretation rules

Outcome classify_standard_f(const CountVector &g, int m) {
    const int zeros = g[0] + g[1];
    const int ones = g[2] + g[3];
    if (zeros == m) {
        return g[1] % 2 == 0 ? Outcome::Phi00 : Outcome::Phi01;
    }
    if (ones == m) {
        return g[3] % 2 == 0 ? Outcome::Phi10 : Outcome::Phi11;
    }
    const int vote0 = zeros + g[4];
    const int vote1 = ones + g[5];
    if (vote0 > vote1) {
        return Outcome::ZeroUnknown;
    }
    if (vote0 < vote1) {
        return Outcome::OneUnknown;
    }
    return Outcome::Failure;
}

Outcome classify_standard_g(const CountVector &lam, int /*n*/) {
    if (lam[6] > 0) {
        return Outcome::Failure;
    }
    const bool k_odd = (lam[2] + lam[3] + lam[5]) % 2 == 1;
    const int vote0 = lam[0] + lam[2];
    const int vote1 = lam[1] + lam[3];
    if (vote0 > vote1) {
        return k_odd ? Outcome::Phi10 : Outcome::Phi00;
    }
    if (vote0 < vote1) {
        return k_odd ? Outcome::Phi11 : Outcome::Phi01;
    }
    return k_odd ? Outcome::OneUnknown : Outcome::ZeroUnknown;
}

Outcome classify_onoff_tilde(const CountVector &g, int m) {
    const int ones = g[2] + g[3];
    if (ones == m) {
        return g[3] % 2 == 0 ? Outcome::Phi10 : Outcome::Phi11;
    }
    if (ones == 0) {
        return Outcome::ZeroUnknown;
    }
    return Outcome::OneUnknown;
}

Outcome classify_onoff_kappa(const CountVector &g, int m, int kappa, TiePolicy tie) {
    const int ones = g[2] + g[3];
    if (ones == m) {
        return g[3] % 2 == 0 ? Outcome::Phi10 : Outcome::Phi11;
    }
    if (ones < kappa) {
        return Outcome::ZeroUnknown;
    }
    if (ones == kappa) {
        return tie == TiePolicy::Discard ? Outcome::Failure : Outcome::OneUnknown;
    }
    return Outcome::OneUnknown;
}

RuleFamily RuleFamily::standard_f() {
    RuleFamily r;
    r.kind_ = Kind::StandardF;
    return r;
}

RuleFamily RuleFamily::standard_g() {
    RuleFamily r;
    r.kind_ = Kind::StandardG;
    return r;
}

RuleFamily RuleFamily::onoff_tilde() {
    RuleFamily r;
    r.kind_ = Kind::OnOffTilde;
    return r;
}

RuleFamily RuleFamily::onoff_kappa(int kappa, TiePolicy tie) {
    if (kappa < 1) {
        throw ContractViolation("kappa must be >= 1");
    }
    RuleFamily r;
    r.kind_ = Kind::OnOffKappa;
    r.kappa_ = kappa;
    r.tie_ = tie;
    return r;
}

RuleFamily RuleFamily::custom(std::string name, Classifier classify) {
    if (!classify) {
        throw ContractViolation("custom rule family needs a classifier");
    }
    RuleFamily r;
    r.kind_ = Kind::Custom;
    r.custom_name_ = std::move(name);
    r.custom_ = std::move(classify);
    return r;
}

Outcome RuleFamily::classify(const CountVector &counts, int size) const {
    switch (kind_) {
        case Kind::StandardF:
            return classify_standard_f(counts, size);
        case Kind::StandardG:
            return classify_standard_g(counts, size);
        case Kind::OnOffTilde:
            return classify_onoff_tilde(counts, size);
        case Kind::OnOffKappa:
            if (kappa_ > size - 1) {
                throw ContractViolation("kappa must satisfy kappa <= m - 1");
            }
            return classify_onoff_kappa(counts, size, kappa_, tie_);
        case Kind::Custom:
            return custom_(counts, size);
    }
    return Outcome::Failure;
}

std::string RuleFamily::name() const {
    switch (kind_) {
        case Kind::StandardF:
            return "standard_f";
        case Kind::StandardG:
            return "standard_g";
        case Kind::OnOffTilde:
            return "onoff_tilde";
        case Kind::OnOffKappa:
            return "onoff_kappa(" + std::to_string(kappa_) + (tie_ == TiePolicy::Discard ? ",discard)" : ",accept)");
        case Kind::Custom:
            return custom_name_;
    }
    return "unknown";
}

std::array<ColumnPairing, 2> block_pairings() { return {{{0, 1, 0, 1}, {2, 3, 2, 3}}}; }

std::array<ColumnPairing, 2> logical_pairings() { return {{{0, 2, 0, 2}, {1, 3, 1, 3}}}; }

// ---------------------------------------------------------------------------
// Pruned enumeration

namespace {

// Neumaier-compensated accumulator.
struct CompensatedSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x)) {
            carry += (sum - t) + x;
        } else {
            carry += (x - t) + sum;
        }
        sum = t;
    }
    double value() const { return sum + carry; }
};

using Accumulator = std::array<std::array<CompensatedSum, kNumBellStates>, kNumOutcomes>;

void check_size(int size, const char *what) {
    if (size < 1) {
        throw ContractViolation(std::string(what) + " must be >= 1");
    }
    if (size > CodeParams::kDefaultSizeCap) {
        throw ContractViolation(std::string(what) + " exceeds the enumeration cap");
    }
}

// Walks all compositions of `size` over the active slots while carrying the
// running products of x^c/c! and y^c/c!. Subtrees where both products vanish
// are skipped.
class PairEnumerator {
   public:
    PairEnumerator(const std::array<double, kNumOutcomes> &x, const std::array<double, kNumOutcomes> &y, int size,
                   const RuleFamily &rules, const ColumnPairing &pair, Accumulator &acc)
        : size_(size), rules_(rules), pair_(pair), acc_(acc) {
        for (int w = 0; w < kNumOutcomes; ++w) {
            if (x[w] != 0.0 || y[w] != 0.0) {
                slots_.push_back(w);
            }
        }
        log_mode_ = size > 170;
        const size_t k = slots_.size();
        tx_.assign(k, std::vector<double>(size + 1));
        ty_.assign(k, std::vector<double>(size + 1));
        for (size_t i = 0; i < k; ++i) {
            xv_.push_back(x[slots_[i]]);
            yv_.push_back(y[slots_[i]]);
            fill_table(xv_[i], tx_[i]);
            fill_table(yv_[i], ty_[i]);
        }
        if (log_mode_) {
            prefactor_ = std::lgamma(size + 1.0) - size * std::log(2.0);
        } else {
            prefactor_ = std::tgamma(size + 1.0) / std::ldexp(1.0, size);
        }
    }

    void run() {
        if (slots_.empty()) {
            return;
        }
        CountVector counts;
        if (log_mode_) {
            recurse_log(0, size_, 0.0, 1, 0.0, 1, counts);
        } else {
            recurse(0, size_, 1.0, 1.0, counts);
        }
    }

   private:
    // In log mode the tables hold c*ln|z| - ln c!; the sign is recovered from
    // the parity of c.
    void fill_table(double z, std::vector<double> &t) const {
        for (int c = 0; c <= size_; ++c) {
            if (log_mode_) {
                if (z == 0.0) {
                    t[c] = c == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
                } else {
                    t[c] = c * std::log(std::abs(z)) - std::lgamma(c + 1.0);
                }
            } else {
                t[c] = c == 0 ? 1.0 : t[c - 1] * z / c;
            }
        }
    }

    void emit(const CountVector &counts, double px, double py) {
        const int u = index_of(rules_.classify(counts, size_));
        acc_[u][pair_.plus_col].add(prefactor_ * (px + py));
        acc_[u][pair_.minus_col].add(prefactor_ * (px - py));
    }

    void recurse(size_t pos, int remaining, double px, double py, CountVector &counts) {
        const int w = slots_[pos];
        if (pos + 1 == slots_.size()) {
            counts[w] = remaining;
            emit(counts, px * tx_[pos][remaining], py * ty_[pos][remaining]);
            counts[w] = 0;
            return;
        }
        for (int c = remaining; c >= 0; --c) {
            const double nx = px * tx_[pos][c];
            const double ny = py * ty_[pos][c];
            if (nx == 0.0 && ny == 0.0) {
                continue;
            }
            counts[w] = c;
            recurse(pos + 1, remaining - c, nx, ny, counts);
        }
        counts[w] = 0;
    }

    static int sign_of(double z, int c) { return (z < 0.0 && (c & 1)) ? -1 : 1; }

    void recurse_log(size_t pos, int remaining, double lx, int sx, double ly, int sy, CountVector &counts) {
        const int w = slots_[pos];
        const bool leaf = pos + 1 == slots_.size();
        const int lo = leaf ? remaining : 0;
        for (int c = remaining; c >= lo; --c) {
            const double nlx = lx + tx_[pos][c];
            const double nly = ly + ty_[pos][c];
            if (std::isinf(nlx) && std::isinf(nly)) {
                continue;
            }
            const int nsx = sx * sign_of(xv_[pos], c);
            const int nsy = sy * sign_of(yv_[pos], c);
            counts[w] = c;
            if (leaf) {
                const double px = nsx * std::exp(nlx + prefactor_);
                const double py = nsy * std::exp(nly + prefactor_);
                const int u = index_of(rules_.classify(counts, size_));
                acc_[u][pair_.plus_col].add(px + py);
                acc_[u][pair_.minus_col].add(px - py);
            } else {
                recurse_log(pos + 1, remaining - c, nlx, nsx, nly, nsy, counts);
            }
        }
        counts[w] = 0;
    }

    int size_;
    const RuleFamily &rules_;
    ColumnPairing pair_;
    Accumulator &acc_;
    std::vector<int> slots_;
    std::vector<double> xv_;
    std::vector<double> yv_;
    std::vector<std::vector<double>> tx_;
    std::vector<std::vector<double>> ty_;
    bool log_mode_ = false;
    double prefactor_ = 1.0;
};

OutcomeMatrix propagate_enumerated(const OutcomeMatrix &in, int size, const RuleFamily &rules,
                                   const std::array<ColumnPairing, 2> &pairs, Level out_level) {
    Accumulator acc{};
    for (const ColumnPairing &pair : pairs) {
        std::array<double, kNumOutcomes> x{};
        std::array<double, kNumOutcomes> y{};
        for (int w = 0; w < kNumOutcomes; ++w) {
            x[w] = in.values[w][pair.a] + in.values[w][pair.b];
            y[w] = in.values[w][pair.a] - in.values[w][pair.b];
        }
        PairEnumerator(x, y, size, rules, pair, acc).run();
    }
    OutcomeMatrix out;
    out.level = out_level;
    for (int u = 0; u < kNumOutcomes; ++u) {
        for (int v = 0; v < kNumBellStates; ++v) {
            out.values[u][v] = acc[u][v].value();
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Generating-polynomial evaluation of the standard logical rules.
//
// With z = (lower-level sum or difference vector)/2, the sum over lambda of
// n!/prod(lambda!) z^lambda restricted to one g-outcome is a coefficient
// extraction from (A t + C + D/t)^n, where t tracks the l-vote margin and a
// sign flip sigma on the odd-k slots separates the k parities.

class TrinomialPower {
   public:
    TrinomialPower(double a, double c, double d, int n_max)
        : a_(a), c_(c), d_(d), offset_(n_max), coeff_(2 * n_max + 3, 0.0), next_(coeff_.size(), 0.0) {
        coeff_[offset_] = 1.0;
    }

    // Multiplies the current polynomial by (a t + c + d/t).
    void step() {
        ++degree_;
        const int lo = offset_ - degree_;
        const int hi = offset_ + degree_;
        for (int j = lo; j <= hi; ++j) {
            double v = c_ * coeff_[j];
            v += a_ * coeff_[j - 1];
            v += d_ * coeff_[j + 1];
            next_[j] = v;
        }
        std::swap(coeff_, next_);
    }

    // Sums of the coefficients of positive, negative and zero powers of t.
    void split(double &pos, double &neg, double &zero) const {
        CompensatedSum p;
        CompensatedSum q;
        for (int j = 1; j <= degree_; ++j) {
            p.add(coeff_[offset_ + j]);
            q.add(coeff_[offset_ - j]);
        }
        pos = p.value();
        neg = q.value();
        zero = coeff_[offset_];
    }

   private:
    double a_;
    double c_;
    double d_;
    int offset_;
    int degree_ = 0;
    std::vector<double> coeff_;
    std::vector<double> next_;
};

// Per-vector state: two sigma branches plus the powers needed for the
// failure row.
struct GVectorSeries {
    TrinomialPower plus;
    TrinomialPower minus;
    double all_sum;
    double kept_sum;
    double all_pow = 1.0;
    double kept_pow = 1.0;

    GVectorSeries(const std::array<double, kNumOutcomes> &z, int n_max)
        : plus(z[0] + z[2], z[4] + z[5], z[1] + z[3], n_max),
          minus(z[0] - z[2], z[4] - z[5], z[1] - z[3], n_max),
          all_sum(z[0] + z[1] + z[2] + z[3] + z[4] + z[5] + z[6]),
          kept_sum(z[0] + z[1] + z[2] + z[3] + z[4] + z[5]) {}

    void step() {
        plus.step();
        minus.step();
        all_pow *= all_sum;
        kept_pow *= kept_sum;
    }

    std::array<double, kNumOutcomes> rows() const {
        double pp, pn, pz, mp, mn, mz;
        plus.split(pp, pn, pz);
        minus.split(mp, mn, mz);
        std::array<double, kNumOutcomes> r{};
        r[0] = 0.5 * (pp + mp);
        r[1] = 0.5 * (pn + mn);
        r[2] = 0.5 * (pp - mp);
        r[3] = 0.5 * (pn - mn);
        r[4] = 0.5 * (pz + mz);
        r[5] = 0.5 * (pz - mz);
        r[6] = all_pow - kept_pow;
        return r;
    }
};

std::vector<OutcomeMatrix> standard_g_series(const OutcomeMatrix &b, int n_max) {
    const auto pairs = logical_pairings();
    std::vector<GVectorSeries> xs;
    std::vector<GVectorSeries> ys;
    for (const ColumnPairing &pair : pairs) {
        std::array<double, kNumOutcomes> x{};
        std::array<double, kNumOutcomes> y{};
        for (int w = 0; w < kNumOutcomes; ++w) {
            x[w] = 0.5 * (b.values[w][pair.a] + b.values[w][pair.b]);
            y[w] = 0.5 * (b.values[w][pair.a] - b.values[w][pair.b]);
        }
        xs.emplace_back(x, n_max);
        ys.emplace_back(y, n_max);
    }
    std::vector<OutcomeMatrix> out;
    out.reserve(n_max);
    for (int n = 1; n <= n_max; ++n) {
        OutcomeMatrix l;
        l.level = Level::Logical;
        for (size_t i = 0; i < pairs.size(); ++i) {
            xs[i].step();
            ys[i].step();
            const auto rx = xs[i].rows();
            const auto ry = ys[i].rows();
            for (int u = 0; u < kNumOutcomes; ++u) {
                l.values[u][pairs[i].plus_col] = rx[u] + ry[u];
                l.values[u][pairs[i].minus_col] = rx[u] - ry[u];
            }
        }
        out.push_back(l);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Literal double sum (oracle).

OutcomeMatrix propagate_naive(const OutcomeMatrix &in, int size, const RuleFamily &rules, bool logical) {
    if (size > 8) {
        throw ContractViolation("naive propagation is limited to sizes <= 8");
    }
    check_size(size, "size");
    OutcomeMatrix out;
    out.level = logical ? Level::Logical : Level::Block;
    const double fact = std::tgamma(size + 1.0);
    const double norm = std::ldexp(1.0, -(size - 1));
    for (int v = 0; v < kNumBellStates; ++v) {
        const int k = v / 2;
        const int l = v % 2;
        int a, b, parity;
        if (logical) {
            a = l == 0 ? 0 : 1;
            b = l == 0 ? 2 : 3;
            parity = k;
        } else {
            a = k == 0 ? 0 : 2;
            b = k == 0 ? 1 : 3;
            parity = l;
        }
        Accumulator acc{};
        for (int r = parity; r <= size; r += 2) {
            for_each_composition(size - r, SlotSet::all(), [&](const CountVector &alpha) {
                double pa = 1.0;
                double denom = 1.0;
                for (int w = 0; w < kNumOutcomes; ++w) {
                    pa *= std::pow(in.values[w][a], alpha[w]);
                    denom *= std::tgamma(alpha[w] + 1.0);
                }
                for_each_composition(r, SlotSet::all(), [&](const CountVector &beta) {
                    double pb = 1.0;
                    double denom_b = 1.0;
                    CountVector gamma;
                    for (int w = 0; w < kNumOutcomes; ++w) {
                        pb *= std::pow(in.values[w][b], beta[w]);
                        denom_b *= std::tgamma(beta[w] + 1.0);
                        gamma[w] = alpha[w] + beta[w];
                    }
                    const int u = index_of(rules.classify(gamma, size));
                    acc[u][v].add(fact / (denom * denom_b) * pa * pb * norm);
                });
            });
        }
        for (int u = 0; u < kNumOutcomes; ++u) {
            out.values[u][v] = acc[u][v].value();
        }
    }
    return out;
}

}  // namespace

OutcomeMatrix propagate_block(const OutcomeMatrix &p, int m, const RuleFamily &rules) {
    check_size(m, "block size m");
    return propagate_enumerated(p, m, rules, block_pairings(), Level::Block);
}

OutcomeMatrix propagate_logical_enumerated(const OutcomeMatrix &b, int n, const RuleFamily &rules) {
    check_size(n, "block count n");
    return propagate_enumerated(b, n, rules, logical_pairings(), Level::Logical);
}

OutcomeMatrix propagate_logical(const OutcomeMatrix &b, int n, const RuleFamily &rules) {
    check_size(n, "block count n");
    if (rules.kind() == RuleFamily::Kind::StandardG) {
        return standard_g_series(b, n).back();
    }
    return propagate_logical_enumerated(b, n, rules);
}

std::vector<OutcomeMatrix> propagate_logical_series(const OutcomeMatrix &b, int n_max, const RuleFamily &rules) {
    check_size(n_max, "block count n");
    if (rules.kind() == RuleFamily::Kind::StandardG) {
        return standard_g_series(b, n_max);
    }
    std::vector<OutcomeMatrix> out;
    out.reserve(n_max);
    for (int n = 1; n <= n_max; ++n) {
        out.push_back(propagate_logical_enumerated(b, n, rules));
    }
    return out;
}

OutcomeMatrix propagate_block_naive(const OutcomeMatrix &p, int m, const RuleFamily &rules) {
    return propagate_naive(p, m, rules, false);
}

OutcomeMatrix propagate_logical_naive(const OutcomeMatrix &b, int n, const RuleFamily &rules) {
    return propagate_naive(b, n, rules, true);
}

}  // namespace qpcr
