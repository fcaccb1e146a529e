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

#include "qpcr/oracle.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <sstream>

#include "parallel.h"
#include "qpcr/physical.h"
#include "qpcr/pipeline.h"
#include "qpcr/rates.h"

namespace qpcr {

void McConfig::validate() const {
    if (samples < 1) {
        throw ContractViolation("sample count must be >= 1");
    }
}

ParitySet::ParitySet(int l, int size) : l_(l), size_(size) {
    if (l != 0 && l != 1) {
        throw ContractViolation("parity must be 0 or 1");
    }
    if (size < 1 || size > 31) {
        throw ContractViolation("parity set size must lie in [1, 31]");
    }
}

uint32_t ParitySet::member_from_free_bits(uint32_t free_bits) const {
    free_bits &= (uint32_t{1} << (size_ - 1)) - 1;
    const uint32_t last = static_cast<uint32_t>((std::popcount(free_bits) + l_) & 1);
    return free_bits | (last << (size_ - 1));
}

std::vector<uint32_t> ParitySet::members() const {
    std::vector<uint32_t> out;
    out.reserve(static_cast<size_t>(count()));
    for (uint32_t f = 0; f < static_cast<uint32_t>(count()); ++f) {
        out.push_back(member_from_free_bits(f));
    }
    return out;
}

double McColumn::max_z(const std::array<double, kNumOutcomes> &expected) const {
    const double n = static_cast<double>(samples);
    double worst = 0.0;
    for (int w = 0; w < kNumOutcomes; ++w) {
        const double e = std::clamp(expected[w], 0.0, 1.0);
        const double sigma = std::max(std::sqrt(e * (1.0 - e) / n), 1.0 / n);
        worst = std::max(worst, std::abs(freq[w] - e) / sigma);
    }
    return worst;
}

namespace {

// Fixed shard count keeps results independent of the thread count.
constexpr int kShards = 16;

using Rng = std::mt19937_64;

Rng shard_rng(uint64_t seed, int shard) {
    std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32), static_cast<uint32_t>(shard)};
    return Rng(seq);
}

double uniform01(Rng &rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Cumulative distributions of the four columns of an outcome matrix.
struct ColumnSampler {
    std::array<std::array<double, kNumOutcomes>, kNumBellStates> cum{};

    explicit ColumnSampler(const OutcomeMatrix &p) {
        for (int v = 0; v < kNumBellStates; ++v) {
            double acc = 0.0;
            for (int w = 0; w < kNumOutcomes; ++w) {
                acc += std::max(p.at(w, v), 0.0);
                cum[v][w] = acc;
            }
            if (!(acc > 0.0)) {
                throw ContractViolation("outcome matrix column has no probability mass");
            }
        }
    }

    int draw(int column, Rng &rng) const {
        const auto &c = cum[column];
        const double u = uniform01(rng) * c[kNumOutcomes - 1];
        for (int w = 0; w < kNumOutcomes - 1; ++w) {
            if (u < c[w]) {
                return w;
            }
        }
        return kNumOutcomes - 1;
    }
};

Outcome sample_block(const ColumnSampler &sampler, const ParitySet &set, int k, const RuleFamily &rules, Rng &rng) {
    const uint32_t r = set.member_from_free_bits(static_cast<uint32_t>(rng()));
    CountVector gamma;
    for (int i = 0; i < set.size(); ++i) {
        ++gamma[sampler.draw(2 * k + static_cast<int>((r >> i) & 1u), rng)];
    }
    return rules.classify(gamma, set.size());
}

template <typename Draw>
McColumn run_sharded(const McConfig &cfg, Draw draw) {
    cfg.validate();
    std::vector<std::array<int64_t, kNumOutcomes>> tallies(kShards);
    detail::parallel_for(kShards, cfg.threads, [&](size_t shard) {
        const int64_t base = cfg.samples / kShards;
        const int64_t count = base + (static_cast<int64_t>(shard) < cfg.samples % kShards ? 1 : 0);
        Rng rng = shard_rng(cfg.seed, static_cast<int>(shard));
        auto &t = tallies[shard];
        t.fill(0);
        for (int64_t i = 0; i < count; ++i) {
            ++t[index_of(draw(rng))];
        }
    });
    McColumn out;
    out.samples = cfg.samples;
    const double n = static_cast<double>(cfg.samples);
    for (int w = 0; w < kNumOutcomes; ++w) {
        int64_t hits = 0;
        for (const auto &t : tallies) {
            hits += t[w];
        }
        out.freq[w] = static_cast<double>(hits) / n;
        out.stderr_[w] = std::sqrt(out.freq[w] * (1.0 - out.freq[w]) / n);
    }
    return out;
}

void check_bits(int k, int l) {
    if ((k != 0 && k != 1) || (l != 0 && l != 1)) {
        throw ContractViolation("k and l must be 0 or 1");
    }
}

}  // namespace

McColumn mc_block_column(const OutcomeMatrix &p, int m, int k, int l, const RuleFamily &rules, const McConfig &cfg) {
    check_bits(k, l);
    const ParitySet set(l, m);
    const ColumnSampler sampler(p);
    return run_sharded(cfg, [&](Rng &rng) { return sample_block(sampler, set, k, rules, rng); });
}

McColumn mc_logical_column(const OutcomeMatrix &p, int n, int m, int k, int l, const RuleFamily &rules_f,
                           const RuleFamily &rules_g, const McConfig &cfg) {
    check_bits(k, l);
    const ParitySet outer(k, n);
    const ParitySet inner(l, m);
    const ColumnSampler sampler(p);
    return run_sharded(cfg, [&](Rng &rng) {
        const uint32_t s = outer.member_from_free_bits(static_cast<uint32_t>(rng()));
        CountVector lambda;
        for (int j = 0; j < n; ++j) {
            ++lambda[index_of(sample_block(sampler, inner, static_cast<int>((s >> j) & 1u), rules_f, rng))];
        }
        return rules_g.classify(lambda, n);
    });
}

namespace {

// Real amplitude vector over q qubits; qubit 0 is the most significant bit.
using State = std::vector<double>;

State basis_state(int qubits, uint64_t index) {
    State s(size_t{1} << qubits, 0.0);
    s[index] = 1.0;
    return s;
}

State kron(const State &a, const State &b) {
    State out(a.size() * b.size(), 0.0);
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0.0) {
            continue;
        }
        for (size_t j = 0; j < b.size(); ++j) {
            out[i * b.size() + j] = a[i] * b[j];
        }
    }
    return out;
}

void axpy(double alpha, const State &x, State &y) {
    for (size_t i = 0; i < x.size(); ++i) {
        y[i] += alpha * x[i];
    }
}

State scaled(double alpha, State x) {
    for (double &v : x) {
        v *= alpha;
    }
    return x;
}

// |b>^(size): all qubits equal to bit b.
State repeated(int bit, int size) { return basis_state(size, bit == 0 ? 0 : (uint64_t{1} << size) - 1); }

State tensor_power(const State &s, int times) {
    State out{1.0};
    for (int i = 0; i < times; ++i) {
        out = kron(out, s);
    }
    return out;
}

// (|0,k> + (-1)^l |1,1-k>) / sqrt2 for the two codewords zero and one.
State bell_from_codewords(const State &zero, const State &one, int k, int l) {
    const State &kw = k == 0 ? zero : one;
    const State &nkw = k == 0 ? one : zero;
    State out = kron(zero, kw);
    axpy(l == 0 ? 1.0 : -1.0, kron(one, nkw), out);
    return scaled(1.0 / std::sqrt(2.0), std::move(out));
}

State block_bell(int m, int k, int l) { return bell_from_codewords(repeated(0, m), repeated(1, m), k, l); }

State logical_bell(int n, int m, int k, int l) {
    const double h = 1.0 / std::sqrt(2.0);
    State plus = scaled(h, repeated(0, m));
    axpy(h, repeated(1, m), plus);
    State minus = scaled(h, repeated(0, m));
    axpy(-h, repeated(1, m), minus);
    const State plus_n = tensor_power(plus, n);
    const State minus_n = tensor_power(minus, n);
    State zero = scaled(h, plus_n);
    axpy(h, minus_n, zero);
    State one = scaled(h, plus_n);
    axpy(-h, minus_n, one);
    return bell_from_codewords(zero, one, k, l);
}

// Photon identity: which logical qubit (A = 0, B = 1), block and position.
struct Label {
    int side;
    int block;
    int photon;
};

// Position of a label in codeword order: all of A block by block, then all of B.
int codeword_position(const Label &x, int n, int m) { return x.side * n * m + x.block * m + x.photon; }

// Reorders a state whose qubit q carries labels[q] into codeword order.
State to_codeword_order(const State &s, const std::vector<Label> &labels, int n, int m) {
    const int q = static_cast<int>(labels.size());
    std::vector<int> target(q);
    for (int i = 0; i < q; ++i) {
        target[i] = codeword_position(labels[i], n, m);
    }
    State out(s.size(), 0.0);
    for (uint64_t idx = 0; idx < s.size(); ++idx) {
        if (s[idx] == 0.0) {
            continue;
        }
        uint64_t mapped = 0;
        for (int i = 0; i < q; ++i) {
            if ((idx >> (q - 1 - i)) & 1u) {
                mapped |= uint64_t{1} << (q - 1 - target[i]);
            }
        }
        out[mapped] = s[idx];
    }
    return out;
}

double max_diff(const State &a, const State &b) {
    double d = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        d = std::max(d, std::abs(a[i] - b[i]));
    }
    return d;
}

// Block level: phi_{k,l}^(m) against the parity-set sum of physical Bell pairs.
double block_residual(int m, int k, int l) {
    std::vector<Label> labels;
    for (int i = 0; i < m; ++i) {
        labels.push_back({0, 0, i});
        labels.push_back({1, 0, i});
    }
    State rhs(size_t{1} << (2 * m), 0.0);
    for (uint32_t r : ParitySet(l, m).members()) {
        State term{1.0};
        for (int i = 0; i < m; ++i) {
            term = kron(term, block_bell(1, k, static_cast<int>((r >> i) & 1u)));
        }
        axpy(1.0, term, rhs);
    }
    rhs = scaled(std::pow(2.0, -(m - 1) / 2.0), std::move(rhs));
    return max_diff(block_bell(m, k, l), to_codeword_order(rhs, labels, 1, m));
}

// Logical level: phi_{k,l}^(n,m) against the parity-set sum of block Bell states.
double logical_residual(int n, int m, int k, int l) {
    std::vector<Label> labels;
    for (int j = 0; j < n; ++j) {
        for (int side = 0; side < 2; ++side) {
            for (int i = 0; i < m; ++i) {
                labels.push_back({side, j, i});
            }
        }
    }
    State rhs(size_t{1} << (2 * n * m), 0.0);
    for (uint32_t s : ParitySet(k, n).members()) {
        State term{1.0};
        for (int j = 0; j < n; ++j) {
            term = kron(term, block_bell(m, static_cast<int>((s >> j) & 1u), l));
        }
        axpy(1.0, term, rhs);
    }
    rhs = scaled(std::pow(2.0, -(n - 1) / 2.0), std::move(rhs));
    return max_diff(logical_bell(n, m, k, l), to_codeword_order(rhs, labels, n, m));
}

}  // namespace

RepresentationCheck verify_bell_representation(int n, int m, double tol) {
    CodeParams{n, m}.validate();
    if (2 * n * m > 16) {
        throw ContractViolation("state-vector check is limited to 2nm <= 16 qubits");
    }
    RepresentationCheck out;
    for (int k = 0; k < 2; ++k) {
        for (int l = 0; l < 2; ++l) {
            out.max_residual = std::max(out.max_residual, block_residual(m, k, l));
            out.max_residual = std::max(out.max_residual, logical_residual(n, m, k, l));
        }
    }
    out.ok = out.max_residual <= tol;
    return out;
}

bool SelfcheckReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult &c) { return c.passed; });
}

std::string SelfcheckReport::first_failure() const {
    for (const CheckResult &c : checks) {
        if (!c.passed) {
            return c.name;
        }
    }
    return {};
}

namespace {

struct NamedModel {
    std::string name;
    ChainModel model;
};

std::vector<NamedModel> shipped_models() {
    DetectorParams ideal;
    DetectorParams lossy;
    lossy.eta_d = 0.97;
    DetectorParams noisy = lossy;
    noisy.nbar = 0.03;
    return {
        {"loss", ChainModel(ErrorModelSpec::loss_only(), lossy)},
        {"depol", ChainModel(ErrorModelSpec::depolarizing(1e-2), ideal)},
        {"adv", ChainModel(ErrorModelSpec::advanced(0.5), ideal)},
        {"onoff", ChainModel(ErrorModelSpec::on_off(0.0), ideal)},
        {"onoff-kappa", ChainModel(ErrorModelSpec::on_off(1e-2, 1, TiePolicy::Discard), lossy)},
        {"onoff-kappa-accept", ChainModel(ErrorModelSpec::on_off(1e-2, 1, TiePolicy::AcceptAsOne), lossy)},
        {"dark", ChainModel(ErrorModelSpec::dark_count(), noisy)},
    };
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(3);
    os << x;
    return os.str();
}

OutcomeMatrix random_stochastic(Rng &rng) {
    OutcomeMatrix p;
    for (int v = 0; v < kNumBellStates; ++v) {
        double total = 0.0;
        for (int w = 0; w < kNumOutcomes; ++w) {
            p.at(w, v) = -std::log(1.0 - uniform01(rng));
            total += p.at(w, v);
        }
        for (int w = 0; w < kNumOutcomes; ++w) {
            p.at(w, v) /= total;
        }
    }
    return p;
}

CheckResult check_stochasticity(bool full) {
    std::vector<CodeParams> codes = {{3, 2}, {5, 4}, {10, 3}, {23, 5}};
    if (full) {
        codes.insert(codes.end(), {{38, 6}, {50, 8}, {67, 11}, {200, 4}});
    }
    double worst = 0.0;
    for (const NamedModel &nm : shipped_models()) {
        for (const CodeParams &code : codes) {
            for (double l0 : {0.5, 2.0, 8.0}) {
                ChannelParams ch;
                ch.l0 = l0;
                const PointResult r = nm.model.evaluate(code, ch);
                worst = std::max({worst, r.p.stochasticity_error(), r.b.stochasticity_error(),
                                  r.l.stochasticity_error()});
            }
        }
    }
    return {"column-stochasticity", worst <= 1e-12, "max column-sum error " + fmt(worst)};
}

CheckResult check_exhaustivity(bool full) {
    const int max_size = full ? 8 : 5;
    int64_t classified = 0;
    for (int size = 1; size <= max_size; ++size) {
        std::vector<RuleFamily> families = {RuleFamily::standard_f(), RuleFamily::standard_g(),
                                            RuleFamily::onoff_tilde()};
        for (int kappa = 1; kappa < size; ++kappa) {
            families.push_back(RuleFamily::onoff_kappa(kappa, TiePolicy::Discard));
            families.push_back(RuleFamily::onoff_kappa(kappa, TiePolicy::AcceptAsOne));
        }
        for (const RuleFamily &rules : families) {
            for_each_composition(size, SlotSet::all(), [&](const CountVector &c) {
                const int u = index_of(rules.classify(c, size));
                if (u < 0 || u >= kNumOutcomes) {
                    throw ContractViolation("rule returned an invalid outcome");
                }
                ++classified;
            });
        }
    }
    return {"rule-exhaustivity", true, std::to_string(classified) + " count vectors classified"};
}

CheckResult check_naive_equivalence(bool full, uint64_t seed) {
    Rng rng = shard_rng(seed, 1001);
    const int trials = full ? 100 : 10;
    const int max_size = full ? 5 : 4;
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        const OutcomeMatrix p = random_stochastic(rng);
        for (int size = 1; size <= max_size; ++size) {
            std::vector<RuleFamily> block_families = {RuleFamily::standard_f(), RuleFamily::onoff_tilde()};
            if (size >= 2) {
                block_families.push_back(RuleFamily::onoff_kappa(1, TiePolicy::Discard));
            }
            for (const RuleFamily &rules : block_families) {
                worst = std::max(worst, propagate_block(p, size, rules).max_abs_diff(
                                            propagate_block_naive(p, size, rules)));
            }
            const RuleFamily g = RuleFamily::standard_g();
            const OutcomeMatrix naive = propagate_logical_naive(p, size, g);
            worst = std::max(worst, propagate_logical(p, size, g).max_abs_diff(naive));
            worst = std::max(worst, propagate_logical_enumerated(p, size, g).max_abs_diff(naive));
        }
    }
    return {"naive-equivalence", worst <= 1e-12, "max deviation " + fmt(worst)};
}

CheckResult check_closed_forms() {
    double worst = 0.0;
    const ChainModel loss(ErrorModelSpec::loss_only(), DetectorParams{});
    const ChainModel adv(ErrorModelSpec::advanced(0.5), DetectorParams{});
    for (CodeParams code : {CodeParams{4, 2}, CodeParams{10, 3}, CodeParams{23, 5}, CodeParams{50, 7}}) {
        ChannelParams ch;
        ch.l0 = 2.4;
        const double eta = ch.transmission();
        worst = std::max(worst, std::abs(loss.evaluate(code, ch).rates.r_t0 -
                                         closed_form_loss_rate(code.n, code.m, eta, ch.stations())));
        worst = std::max(worst, std::abs(adv.evaluate(code, ch).rates.r_t0 -
                                         closed_form_adv_rate(code.n, code.m, eta, 0.5, ch.stations())));
    }
    return {"closed-forms", worst <= 1e-10, "max deviation " + fmt(worst)};
}

CheckResult check_monte_carlo(bool full, uint64_t seed, unsigned threads) {
    McConfig cfg;
    cfg.samples = full ? 1000000 : 100000;
    cfg.seed = seed;
    cfg.threads = threads;
    std::vector<CodeParams> codes = {{2, 2}};
    if (full) {
        codes.insert(codes.end(), {{3, 2}, {3, 3}});
    }
    double worst = 0.0;
    std::string where;
    for (const NamedModel &nm : shipped_models()) {
        if (!full && nm.name != "loss" && nm.name != "depol") {
            continue;
        }
        const OutcomeMatrix p = nm.model.physical(std::exp(-2.0 / 22.0) * 0.9);
        const RuleFamily f = nm.model.block_rules();
        const RuleFamily g = nm.model.logical_rules();
        for (const CodeParams &code : codes) {
            const OutcomeMatrix b = propagate_block(p, code.m, f);
            const OutcomeMatrix l = propagate_logical(b, code.n, g);
            for (int v = 0; v < kNumBellStates; ++v) {
                const BellIndex bell = BellIndex::from_column(v);
                const double zb = mc_block_column(p, code.m, bell.k, bell.l, f, cfg).max_z(b.column(v));
                const double zl = mc_logical_column(p, code.n, code.m, bell.k, bell.l, f, g, cfg).max_z(l.column(v));
                if (std::max(zb, zl) > worst) {
                    worst = std::max(zb, zl);
                    where = nm.name + " (" + std::to_string(code.n) + "," + std::to_string(code.m) + ")";
                }
            }
        }
    }
    return {"monte-carlo", worst <= 4.0, "max deviation " + fmt(worst) + " sigma at " + where};
}

CheckResult check_representation(bool full) {
    const int max_qubits = full ? 16 : 8;
    double worst = 0.0;
    int cases = 0;
    for (int n = 1; 2 * n <= max_qubits; ++n) {
        for (int m = 1; 2 * n * m <= max_qubits; ++m) {
            worst = std::max(worst, verify_bell_representation(n, m).max_residual);
            ++cases;
        }
    }
    return {"bell-representation", worst <= 1e-12,
            std::to_string(cases) + " codes, max residual " + fmt(worst)};
}

CheckResult check_dark_linearization() {
    // Halving nbar should quarter the residual of the first-order matrix.
    auto residual = [](double nbar) {
        return p_matrix_dark(0.9, 0.97, nbar).max_abs_diff(p_matrix_dark_linear(0.9, 0.97, nbar));
    };
    const double ratio = residual(1e-3) / residual(5e-4);
    return {"dark-count-linearization", ratio > 3.5 && ratio < 4.5, "residual ratio " + fmt(ratio)};
}

}  // namespace

SelfcheckReport run_selfcheck(SelfcheckLevel level, uint64_t seed, unsigned threads) {
    const bool full = level == SelfcheckLevel::Full;
    SelfcheckReport report;
    auto guarded = [&](const std::string &name, auto fn) {
        try {
            report.checks.push_back(fn());
        } catch (const std::exception &e) {
            report.checks.push_back({name, false, e.what()});
        }
    };
    guarded("column-stochasticity", [&] { return check_stochasticity(full); });
    guarded("rule-exhaustivity", [&] { return check_exhaustivity(full); });
    guarded("naive-equivalence", [&] { return check_naive_equivalence(full, seed); });
    guarded("closed-forms", [&] { return check_closed_forms(); });
    guarded("monte-carlo", [&] { return check_monte_carlo(full, seed, threads); });
    guarded("bell-representation", [&] { return check_representation(full); });
    guarded("dark-count-linearization", [&] { return check_dark_linearization(); });
    return report;
}

}  // namespace qpcr
