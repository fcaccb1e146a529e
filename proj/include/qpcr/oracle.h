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

#ifndef QPCR_ORACLE_H
#define QPCR_ORACLE_H

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "qpcr/core.h"
#include "qpcr/propagation.h"

namespace qpcr {

struct McConfig {
    int64_t samples = 1000000;
    uint64_t seed = 0x5eed2026ULL;
    /// Worker threads; 0 uses the hardware concurrency. Results do not depend on it.
    unsigned threads = 1;

    void validate() const;
};

/// Bit-vectors of a given length whose parity equals l, stored as bitmasks
/// with bit i holding entry i.
class ParitySet {
   public:
    ParitySet(int l, int size);

    int l() const { return l_; }
    int size() const { return size_; }
    /// 2^(size - 1).
    int64_t count() const { return int64_t{1} << (size_ - 1); }
    std::vector<uint32_t> members() const;
    /// The member whose first size - 1 bits are `free_bits`.
    uint32_t member_from_free_bits(uint32_t free_bits) const;

   private:
    int l_;
    int size_;
};

/// Empirical outcome frequencies with binomial standard errors.
struct McColumn {
    std::array<double, kNumOutcomes> freq{};
    std::array<double, kNumOutcomes> stderr_{};
    int64_t samples = 0;

    /// Largest |freq - expected| in units of the standard error implied by
    /// `expected` (floored at 1/samples so that exact zeros compare cleanly).
    double max_z(const std::array<double, kNumOutcomes> &expected) const;
};

/// Samples the block-level outcome for input phi_{k,l}^(m): draws r uniformly
/// from the parity set A_{l,m}, one physical outcome per photon pair from
/// column (k, r_i) of P, and classifies the counts.
McColumn mc_block_column(const OutcomeMatrix &p, int m, int k, int l, const RuleFamily &rules, const McConfig &cfg);

/// Two-stage sampler for the logical outcome: s from A_{k,n}, then block j
/// sampled as in mc_block_column with input phi_{s_j,l}.
McColumn mc_logical_column(const OutcomeMatrix &p, int n, int m, int k, int l, const RuleFamily &rules_f,
                           const RuleFamily &rules_g, const McConfig &cfg);

struct RepresentationCheck {
    bool ok = false;
    double max_residual = 0.0;
};

/// Builds both sides of the block- and logical-level Bell-state expansions
/// as explicit amplitude vectors on 2nm qubits, permutes the product side
/// into codeword order and compares. Requires 2nm <= 16.
RepresentationCheck verify_bell_representation(int n, int m, double tol = 1e-12);

enum class SelfcheckLevel : uint8_t { Quick, Full };

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct SelfcheckReport {
    std::vector<CheckResult> checks;

    bool passed() const;
    /// Name of the first failing check, empty when all passed.
    std::string first_failure() const;
};

/// Invariant suite: column stochasticity, rule exhaustivity, naive-vs-engine
/// equality, closed forms, Monte-Carlo agreement and state-vector checks.
SelfcheckReport run_selfcheck(SelfcheckLevel level, uint64_t seed = McConfig{}.seed, unsigned threads = 0);

}  // namespace qpcr

#endif
