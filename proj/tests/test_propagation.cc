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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "qpcr/physical.h"
#include "qpcr/propagation.h"

namespace qpcr {
namespace {

CountVector cv(std::array<int, kNumOutcomes> c) { return CountVector(c); }

OutcomeMatrix random_stochastic(std::mt19937_64 &rng, double zero_fraction = 0.0) {
    std::exponential_distribution<double> expo(1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    OutcomeMatrix p;
    for (int v = 0; v < kNumBellStates; ++v) {
        double total = 0.0;
        for (int w = 0; w < kNumOutcomes; ++w) {
            p.at(w, v) = unit(rng) < zero_fraction ? 0.0 : expo(rng);
            total += p.at(w, v);
        }
        if (total == 0.0) {
            p.at(kNumOutcomes - 1, v) = total = 1.0;
        }
        for (int w = 0; w < kNumOutcomes; ++w) {
            p.at(w, v) /= total;
        }
    }
    return p;
}

TEST(StandardF, Examples) {
    EXPECT_EQ(classify_standard_f(cv({0, 0, 4, 0, 0, 0, 0}), 4), Outcome::Phi10);
    EXPECT_EQ(classify_standard_f(cv({0, 0, 2, 1, 0, 0, 0}), 3), Outcome::Phi11);
    EXPECT_EQ(classify_standard_f(cv({0, 0, 1, 0, 1, 0, 1}), 3), Outcome::Failure);
    EXPECT_EQ(classify_standard_f(cv({2, 1, 0, 0, 0, 0, 0}), 3), Outcome::Phi01);
    EXPECT_EQ(classify_standard_f(cv({0, 0, 0, 0, 2, 1, 0}), 3), Outcome::ZeroUnknown);
    EXPECT_EQ(classify_standard_f(cv({0, 0, 1, 0, 0, 1, 1}), 3), Outcome::OneUnknown);
    EXPECT_EQ(classify_standard_f(cv({0, 0, 0, 0, 0, 0, 3}), 3), Outcome::Failure);
}

TEST(StandardG, Examples) {
    for (int n = 1; n <= 6; ++n) {
        EXPECT_EQ(classify_standard_g(cv({n - 1, 0, 0, 0, 0, 0, 1}), n), Outcome::Failure);
        EXPECT_EQ(classify_standard_g(cv({n, 0, 0, 0, 0, 0, 0}), n), Outcome::Phi00);
    }
    EXPECT_EQ(classify_standard_g(cv({1, 1, 1, 0, 0, 0, 0}), 3), Outcome::Phi10);
    EXPECT_EQ(classify_standard_g(cv({0, 0, 0, 0, 1, 1, 0}), 2), Outcome::OneUnknown);
    EXPECT_EQ(classify_standard_g(cv({1, 1, 0, 0, 0, 0, 0}), 2), Outcome::ZeroUnknown);
}

TEST(OnOffTilde, Examples) {
    const int m = 5;
    EXPECT_EQ(classify_onoff_tilde(cv({0, 0, 0, 0, 5, 0, 0}), m), Outcome::ZeroUnknown);
    EXPECT_EQ(classify_onoff_tilde(cv({0, 0, m - 1, 1, 0, 0, 0}), m), Outcome::Phi11);
    EXPECT_EQ(classify_onoff_tilde(cv({0, 0, 1, 0, m - 1, 0, 0}), m), Outcome::OneUnknown);
}

TEST(OnOffKappa, Examples) {
    const int m = 6;
    EXPECT_EQ(classify_onoff_kappa(cv({0, 0, 4, 2, 0, 0, 0}), m, 2, TiePolicy::Discard), Outcome::Phi10);
    EXPECT_EQ(classify_onoff_kappa(cv({0, 0, 1, 1, 4, 0, 0}), m, 2, TiePolicy::Discard), Outcome::Failure);
    EXPECT_EQ(classify_onoff_kappa(cv({0, 0, 1, 1, 4, 0, 0}), m, 2, TiePolicy::AcceptAsOne), Outcome::OneUnknown);
    EXPECT_EQ(classify_onoff_kappa(cv({0, 0, 1, 0, 5, 0, 0}), m, 2, TiePolicy::Discard), Outcome::ZeroUnknown);
    EXPECT_EQ(classify_onoff_kappa(cv({0, 0, 2, 1, 3, 0, 0}), m, 2, TiePolicy::Discard), Outcome::OneUnknown);
    EXPECT_THROW(RuleFamily::onoff_kappa(3, TiePolicy::Discard).classify(cv({3, 0, 0, 0, 0, 0, 0}), 3),
                 ContractViolation);
}

TEST(Rules, ExhaustiveAndDeterministic) {
    for (int size = 1; size <= 8; ++size) {
        std::vector<RuleFamily> families = {RuleFamily::standard_f(), RuleFamily::standard_g(),
                                            RuleFamily::onoff_tilde()};
        for (int kappa = 1; kappa < size; ++kappa) {
            families.push_back(RuleFamily::onoff_kappa(kappa, TiePolicy::Discard));
            families.push_back(RuleFamily::onoff_kappa(kappa, TiePolicy::AcceptAsOne));
        }
        for (const RuleFamily &rules : families) {
            for_each_composition(size, SlotSet::all(), [&](const CountVector &c) {
                const Outcome u = rules.classify(c, size);
                ASSERT_GE(index_of(u), 0);
                ASSERT_LT(index_of(u), kNumOutcomes);
                ASSERT_EQ(u, rules.classify(c, size));
            });
        }
    }
}

TEST(Pairings, SignConventionIsFrozen) {
    const auto block = block_pairings();
    EXPECT_EQ(block[0].a, 0);
    EXPECT_EQ(block[0].b, 1);
    EXPECT_EQ(block[0].plus_col, 0);
    EXPECT_EQ(block[0].minus_col, 1);
    EXPECT_EQ(block[1].a, 2);
    EXPECT_EQ(block[1].b, 3);
    EXPECT_EQ(block[1].plus_col, 2);
    EXPECT_EQ(block[1].minus_col, 3);
    const auto logical = logical_pairings();
    EXPECT_EQ(logical[0].a, 0);
    EXPECT_EQ(logical[0].b, 2);
    EXPECT_EQ(logical[0].plus_col, 0);
    EXPECT_EQ(logical[0].minus_col, 2);
    EXPECT_EQ(logical[1].a, 1);
    EXPECT_EQ(logical[1].b, 3);
    EXPECT_EQ(logical[1].plus_col, 1);
    EXPECT_EQ(logical[1].minus_col, 3);
}

// Each of the eight (level, column) cases picks the right source columns and sign:
// a lower-level matrix that is deterministic per column exposes both.
TEST(Pairings, EightColumnCases) {
    OutcomeMatrix p;
    for (int v = 0; v < kNumBellStates; ++v) {
        p.at(v, v) = 1.0;
    }
    const OutcomeMatrix b = propagate_block(p, 3, RuleFamily::standard_f());
    const OutcomeMatrix l = propagate_logical(p, 3, RuleFamily::standard_g());
    for (int v = 0; v < kNumBellStates; ++v) {
        EXPECT_NEAR(b.at(v, v), 1.0, 1e-15) << v;
        EXPECT_NEAR(l.at(v, v), 1.0, 1e-15) << v;
    }
}

TEST(Block, LossOnlyMatchesClosedForms) {
    for (double eta : {0.3, 0.7, 0.9, 1.0}) {
        for (int m = 1; m <= 12; ++m) {
            const OutcomeMatrix b = propagate_block(p_matrix_loss(eta), m, RuleFamily::standard_f());
            const double all_lost = std::pow(1.0 - eta, m);
            const double all_kept = std::pow(eta, m);
            for (int v = 0; v < kNumBellStates; ++v) {
                EXPECT_NEAR(b.at(Outcome::Failure, v), all_lost, 1e-12);
            }
            EXPECT_NEAR(b.at(Outcome::ZeroUnknown, 0), 1.0 - all_lost, 1e-12);
            EXPECT_NEAR(b.at(Outcome::Phi10, 2), all_kept, 1e-12);
            EXPECT_NEAR(b.at(Outcome::Phi11, 3), all_kept, 1e-12);
            EXPECT_NEAR(b.at(Outcome::OneUnknown, 3), 1.0 - all_lost - all_kept, 1e-12);
        }
    }
}

TEST(Block, IdealTwoPhotonBlock) {
    const OutcomeMatrix b = propagate_block(p_matrix_loss(1.0), 2, RuleFamily::standard_f());
    EXPECT_NEAR(b.at(Outcome::ZeroUnknown, 0), 1.0, 1e-15);
    EXPECT_NEAR(b.column_sum(0), 1.0, 1e-15);
}

TEST(Block, SingleBlockEqualsPhysicalMatrix) {
    std::mt19937_64 rng(5);
    const OutcomeMatrix p = random_stochastic(rng);
    EXPECT_LE(propagate_block(p, 1, RuleFamily::standard_f()).max_abs_diff(p), 1e-15);
    EXPECT_LE(propagate_block_naive(p, 1, RuleFamily::standard_f()).max_abs_diff(p), 1e-15);
}

TEST(Block, MatchesNaiveDoubleSum) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        const OutcomeMatrix p = random_stochastic(rng, trial % 2 == 0 ? 0.0 : 0.4);
        for (int m = 2; m <= 6; ++m) {
            std::vector<RuleFamily> families = {RuleFamily::standard_f()};
            if (trial % 4 == 0) {
                families.push_back(RuleFamily::onoff_tilde());
                families.push_back(RuleFamily::onoff_kappa(1, TiePolicy::Discard));
                families.push_back(RuleFamily::onoff_kappa(m - 1, TiePolicy::AcceptAsOne));
            }
            for (const RuleFamily &rules : families) {
                ASSERT_LE(propagate_block(p, m, rules).max_abs_diff(propagate_block_naive(p, m, rules)), 1e-12)
                    << rules.name() << " m=" << m;
            }
        }
    }
}

TEST(Logical, MatchesNaiveDoubleSum) {
    std::mt19937_64 rng(13);
    const RuleFamily g = RuleFamily::standard_g();
    for (int trial = 0; trial < 100; ++trial) {
        const OutcomeMatrix b = random_stochastic(rng, trial % 3 == 0 ? 0.3 : 0.0);
        for (int n = 1; n <= 5; ++n) {
            const OutcomeMatrix naive = propagate_logical_naive(b, n, g);
            ASSERT_LE(propagate_logical(b, n, g).max_abs_diff(naive), 1e-12);
            ASSERT_LE(propagate_logical_enumerated(b, n, g).max_abs_diff(naive), 1e-12);
        }
    }
}

TEST(Logical, FastPathMatchesEnumerationForLargeN) {
    std::mt19937_64 rng(17);
    const RuleFamily g = RuleFamily::standard_g();
    for (int trial = 0; trial < 5; ++trial) {
        const OutcomeMatrix b = random_stochastic(rng, 0.2);
        for (int n : {10, 25, 40}) {
            EXPECT_LE(propagate_logical(b, n, g).max_abs_diff(propagate_logical_enumerated(b, n, g)), 1e-12);
        }
    }
}

TEST(Logical, SeriesMatchesSinglePoints) {
    const OutcomeMatrix b = propagate_block(p_matrix_depol(0.85, 0.01), 5, RuleFamily::standard_f());
    const auto series = propagate_logical_series(b, 60, RuleFamily::standard_g());
    ASSERT_EQ(series.size(), 60u);
    for (int n : {1, 2, 7, 33, 60}) {
        EXPECT_LE(series[n - 1].max_abs_diff(propagate_logical(b, n, RuleFamily::standard_g())), 1e-13);
    }
}

TEST(Logical, LossOnlyMatchesClosedForms) {
    for (double eta : {0.7, 0.9, 1.0}) {
        for (int m = 1; m <= 6; ++m) {
            const OutcomeMatrix b = propagate_block(p_matrix_loss(eta), m, RuleFamily::standard_f());
            for (int n = 1; n <= 30; ++n) {
                const OutcomeMatrix l = propagate_logical(b, n, RuleFamily::standard_g());
                const double a = 1.0 - std::pow(1.0 - eta, m);
                const double half = std::pow(eta, m) / 2.0;
                const double base = std::pow(a, n) - std::pow(a - half, n);
                for (int v = 0; v < kNumBellStates; ++v) {
                    const double expected = v < 2 ? base - std::pow(half, n) : base + std::pow(half, n);
                    ASSERT_NEAR(l.at(v, v), expected, 1e-12);
                    for (int u = 0; u < 4; ++u) {
                        if (u != v) {
                            ASSERT_LE(std::abs(l.at(u, v)), 1e-15);
                        }
                    }
                }
            }
        }
    }
}

TEST(Logical, IdealEfficiency) {
    const OutcomeMatrix b = propagate_block(p_matrix_loss(1.0), 2, RuleFamily::standard_f());
    const OutcomeMatrix l22 = propagate_logical(b, 2, RuleFamily::standard_g());
    EXPECT_NEAR(l22.at(0, 0), 0.5, 1e-15);
    EXPECT_NEAR(l22.at(1, 1), 0.5, 1e-15);
    EXPECT_NEAR(l22.at(2, 2), 1.0, 1e-15);
    EXPECT_NEAR(l22.at(3, 3), 1.0, 1e-15);
    for (int m = 1; m <= 4; ++m) {
        const OutcomeMatrix bm = propagate_block(p_matrix_loss(1.0), m, RuleFamily::standard_f());
        for (int n = 1; n <= 20; ++n) {
            const OutcomeMatrix l = propagate_logical(bm, n, RuleFamily::standard_g());
            EXPECT_NEAR((l.at(0, 0) + l.at(1, 1) + l.at(2, 2) + l.at(3, 3)) / 4.0, 1.0 - std::pow(2.0, -n), 1e-14);
        }
    }
}

TEST(Propagation, PreservesStochasticity) {
    std::mt19937_64 rng(19);
    for (int trial = 0; trial < 20; ++trial) {
        const OutcomeMatrix p = random_stochastic(rng, 0.2);
        for (int m : {1, 3, 8}) {
            const OutcomeMatrix b = propagate_block(p, m, RuleFamily::standard_f());
            ASSERT_LE(b.stochasticity_error(), 1e-12);
            for (int n : {1, 10, 80, 250}) {
                ASSERT_LE(propagate_logical(b, n, RuleFamily::standard_g()).stochasticity_error(), 1e-12);
            }
        }
    }
}

TEST(Propagation, LargeCodesStayFinite) {
    const OutcomeMatrix b = propagate_block(p_matrix_depol(0.9, 1e-3), 11, RuleFamily::standard_f());
    const OutcomeMatrix l = propagate_logical_enumerated(b, 175, RuleFamily::standard_g());
    EXPECT_LE(l.stochasticity_error(), 1e-10);
    EXPECT_LE(l.max_abs_diff(propagate_logical(b, 175, RuleFamily::standard_g())), 1e-10);
}

// Frozen from tests/oracles/frozen_values.py (brute force over outcome sequences).
TEST(Propagation, FrozenDepolarizingTwoByTwo) {
    const OutcomeMatrix p = p_matrix_depol(0.9, 0.01);
    const OutcomeMatrix b = propagate_block(p, 2, RuleFamily::standard_f());
    const std::array<double, 7> b_col2 = {0.0, 0.0, 0.7859025, 0.0079785, 0.001881, 0.1782, 0.026038};
    const std::array<double, 7> b_col0 = {0.0, 0.0, 4.05e-5, 4.05e-5, 0.972081, 0.0018, 0.026038};
    for (int u = 0; u < kNumOutcomes; ++u) {
        EXPECT_NEAR(b.at(u, 2), b_col2[u], 1e-15);
        EXPECT_NEAR(b.at(u, 0), b_col0[u], 1e-15);
    }
    const OutcomeMatrix l = propagate_logical(b, 2, RuleFamily::standard_g());
    const std::array<double, 7> l_col0 = {0.44886926897325, 0.00145367065125, 0.001517651883, 5.4376839e-5,
                                          0.4946220690975,  0.00208494,       0.051398022556};
    const std::array<double, 7> l_col2 = {0.00145367065125, 2.190152925e-5, 0.763960964283, 0.007755824439,
                                          0.0021813965415,  0.17322822,     0.051398022556};
    for (int u = 0; u < kNumOutcomes; ++u) {
        EXPECT_NEAR(l.at(u, 0), l_col0[u], 1e-15);
        EXPECT_NEAR(l.at(u, 2), l_col2[u], 1e-15);
    }
}

TEST(Propagation, RejectsBadSizes) {
    const OutcomeMatrix p = p_matrix_loss(0.9);
    EXPECT_THROW(propagate_block(p, 0, RuleFamily::standard_f()), ContractViolation);
    EXPECT_THROW(propagate_block_naive(p, 9, RuleFamily::standard_f()), ContractViolation);
    EXPECT_THROW(propagate_logical_naive(p, 9, RuleFamily::standard_g()), ContractViolation);
}

TEST(Propagation, CustomRuleFamily) {
    // Everything fails: the failure row must carry all the mass.
    const RuleFamily all_fail = RuleFamily::custom("fail", [](const CountVector &, int) { return Outcome::Failure; });
    const OutcomeMatrix b = propagate_block(p_matrix_depol(0.8, 0.05), 4, all_fail);
    for (int v = 0; v < kNumBellStates; ++v) {
        EXPECT_NEAR(b.at(Outcome::Failure, v), 1.0, 1e-14);
    }
    EXPECT_EQ(all_fail.name(), "fail");
}

}  // namespace
}  // namespace qpcr
