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

#ifndef QPCR_PROPAGATION_H
#define QPCR_PROPAGATION_H

#include <functional>
#include <string>
#include <vector>

#include "qpcr/core.h"

namespace qpcr {

/// Majority-vote rules mapping physical outcome counts to a block outcome.
Outcome classify_standard_f(const CountVector &gamma, int m);

/// Rules mapping block outcome counts to a logical outcome: k by parity,
/// l by majority over the identified blocks.
Outcome classify_standard_g(const CountVector &lambda, int n);

/// Block rules for on-off detectors without depolarizing noise: a single
/// k=1 result marks the block as phi_{1,l}.
Outcome classify_onoff_tilde(const CountVector &gamma, int m);

/// Block rules for on-off detectors with depolarizing noise, voting on the
/// number of k=1 results against the boundary kappa. A vote landing exactly
/// on kappa fails the block under TiePolicy::Discard and reads as (1,?)
/// under TiePolicy::AcceptAsOne.
Outcome classify_onoff_kappa(const CountVector &gamma, int m, int kappa, TiePolicy tie);

/// A total classification function from outcome counts to an outcome.
class RuleFamily {
   public:
    enum class Kind : uint8_t { StandardF, StandardG, OnOffTilde, OnOffKappa, Custom };
    using Classifier = std::function<Outcome(const CountVector &, int)>;

    static RuleFamily standard_f();
    static RuleFamily standard_g();
    static RuleFamily onoff_tilde();
    static RuleFamily onoff_kappa(int kappa, TiePolicy tie);
    static RuleFamily custom(std::string name, Classifier classify);

    Outcome classify(const CountVector &counts, int size) const;
    Kind kind() const { return kind_; }
    int kappa() const { return kappa_; }
    TiePolicy tie() const { return tie_; }
    std::string name() const;

   private:
    Kind kind_ = Kind::StandardF;
    int kappa_ = 0;
    TiePolicy tie_ = TiePolicy::Discard;
    std::string custom_name_;
    Classifier custom_;
};

/// One column pair of the propagation sums: columns a and b of the lower
/// level combine into (M_a + M_b) and (M_a - M_b); the "+" combination feeds
/// output column plus_col and the "-" combination feeds minus_col.
struct ColumnPairing {
    int a;
    int b;
    int plus_col;
    int minus_col;
};

/// The two pairings used from the physical to the block level, and from the
/// block to the logical level.
std::array<ColumnPairing, 2> block_pairings();
std::array<ColumnPairing, 2> logical_pairings();

/// Block-level outcome matrix from the physical one. Slots whose sum and
/// difference entries both vanish are dropped from the enumeration.
OutcomeMatrix propagate_block(const OutcomeMatrix &p, int m, const RuleFamily &rules);

/// Logical-level outcome matrix from the block one. StandardG rules are
/// evaluated through a trinomial generating polynomial in O(n^2); any other
/// rule family goes through the pruned enumeration.
OutcomeMatrix propagate_logical(const OutcomeMatrix &b, int n, const RuleFamily &rules);

/// propagate_logical for every n in [1, n_max], sharing work across n.
/// Element i of the result holds n = i + 1.
std::vector<OutcomeMatrix> propagate_logical_series(const OutcomeMatrix &b, int n_max, const RuleFamily &rules);

/// propagate_logical through the pruned enumeration regardless of rule kind.
OutcomeMatrix propagate_logical_enumerated(const OutcomeMatrix &b, int n, const RuleFamily &rules);

/// Literal double sum over the lower-level Bell-state components (even or
/// odd number of flipped pairs). Exists as an oracle; rejects m > 8.
OutcomeMatrix propagate_block_naive(const OutcomeMatrix &p, int m, const RuleFamily &rules);

/// Logical-level counterpart of propagate_block_naive. Rejects n > 8.
OutcomeMatrix propagate_logical_naive(const OutcomeMatrix &b, int n, const RuleFamily &rules);

}  // namespace qpcr

#endif
