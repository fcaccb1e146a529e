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

#ifndef QPCR_CORE_H
#define QPCR_CORE_H

#include <array>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qpcr {

/// Number of Bell-measurement outcome classes tracked at every encoding level.
inline constexpr int kNumOutcomes = 7;
/// Number of Bell states (matrix columns).
inline constexpr int kNumBellStates = 4;

/// Row index of an outcome matrix.
///
/// The order is a frozen contract shared by every rule family:
/// (0,0), (0,1), (1,0), (1,1), (0,?), (1,?), (?,?).
enum class Outcome : uint8_t {
    Phi00 = 0,
    Phi01 = 1,
    Phi10 = 2,
    Phi11 = 3,
    ZeroUnknown = 4,
    OneUnknown = 5,
    Failure = 6,
};

inline constexpr int index_of(Outcome u) { return static_cast<int>(u); }
std::string_view outcome_label(Outcome u);

/// Column index of an outcome matrix: the input Bell state phi_{k,l}.
/// Columns are ordered phi00, phi01, phi10, phi11, i.e. column = 2k + l.
struct BellIndex {
    int k;
    int l;
    constexpr int column() const { return 2 * k + l; }
    static constexpr BellIndex from_column(int v) { return {v / 2, v % 2}; }
};

enum class Level : uint8_t { Physical, Block, Logical };
std::string_view level_name(Level level);

/// Thrown when a caller breaks an operation's documented precondition.
class ContractViolation : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

/// Quantum parity code QPC(n, m): n blocks of m photons.
struct CodeParams {
    int n = 1;
    int m = 1;
    static constexpr int kDefaultSizeCap = 2048;

    /// Throws ContractViolation unless n, m >= 1 and n*m <= size_cap.
    void validate(int size_cap = kDefaultSizeCap) const;
    int photons() const { return n * m; }
    bool operator==(const CodeParams &) const = default;
};

/// Repeater chain geometry. Lengths are in km.
struct ChannelParams {
    double l_tot = 1000.0;
    double l0 = 2.0;
    double l_att = 22.0;
    /// When set, the station count is rounded to an integer.
    bool integer_stations = false;

    void validate() const;
    /// Number of repeater stations L_tot / L0 (rounded in integer mode).
    double stations() const;
    /// Fiber transmission of one segment, exp(-L0 / L_att).
    double transmission() const;
};

enum class DetectorKind : uint8_t { PNRD, OnOff };

struct DetectorParams {
    double eta_d = 1.0;
    double nbar = 0.0;
    DetectorKind kind = DetectorKind::PNRD;

    void validate() const;
};

enum class TiePolicy : uint8_t { Discard, AcceptAsOne };

/// Which physical error channel and interpretation scheme applies.
struct ErrorModelSpec {
    enum class Kind : uint8_t { LossOnly, LossDepol, AdvancedBM, OnOff, DarkCount };

    Kind kind = Kind::LossOnly;
    double epsilon = 0.0;
    double p_adv = 0.0;
    /// Voting boundary for on-off detectors with depolarizing noise. Zero
    /// selects the tie-free rule set that is only meaningful for epsilon = 0.
    int kappa = 0;
    TiePolicy tie = TiePolicy::Discard;

    static ErrorModelSpec loss_only() { return {}; }
    static ErrorModelSpec depolarizing(double epsilon);
    static ErrorModelSpec advanced(double p_adv);
    static ErrorModelSpec on_off(double epsilon, int kappa = 0, TiePolicy tie = TiePolicy::Discard);
    static ErrorModelSpec dark_count();

    /// Throws ContractViolation on out-of-range parameters. `m` is the block
    /// size the model will be used with (needed for the kappa bound); pass 0
    /// to skip that check.
    void validate(int m = 0) const;
    std::string describe() const;
};

/// 7x4 column-stochastic table of Bell-measurement outcome probabilities.
struct OutcomeMatrix {
    std::array<std::array<double, kNumBellStates>, kNumOutcomes> values{};
    Level level = Level::Physical;

    double &at(int u, int v) { return values[u][v]; }
    double at(int u, int v) const { return values[u][v]; }
    double &at(Outcome u, int v) { return values[index_of(u)][v]; }
    double at(Outcome u, int v) const { return values[index_of(u)][v]; }

    std::array<double, kNumOutcomes> column(int v) const;
    double column_sum(int v) const;
    /// Largest |column sum - 1| over the four columns.
    double stochasticity_error() const;
    /// True when all entries lie in [-tol, 1 + tol] and every column sums to 1 within tol.
    bool is_column_stochastic(double tol = 1e-12) const;
    /// Largest entrywise absolute difference.
    double max_abs_diff(const OutcomeMatrix &other) const;
};

/// Multi-index recording how often each of the seven outcomes occurred.
struct CountVector {
    std::array<int, kNumOutcomes> counts{};

    CountVector() = default;
    explicit CountVector(std::array<int, kNumOutcomes> c) : counts(c) {}

    int operator[](int w) const { return counts[w]; }
    int &operator[](int w) { return counts[w]; }
    int operator[](Outcome u) const { return counts[index_of(u)]; }
    int total() const;
    bool operator==(const CountVector &) const = default;
};

/// Subset of the seven outcome slots, stored as a bitmask.
class SlotSet {
   public:
    constexpr SlotSet() = default;
    /// Slots are given 0-based.
    SlotSet(std::initializer_list<int> slots);
    static constexpr SlotSet all() {
        SlotSet s;
        s.mask_ = (1u << kNumOutcomes) - 1;
        return s;
    }
    static SlotSet from_mask(uint32_t mask);

    bool contains(int w) const { return (mask_ >> w) & 1u; }
    void insert(int w);
    int size() const;
    bool empty() const { return mask_ == 0; }
    uint32_t mask() const { return mask_; }
    std::vector<int> members() const;

   private:
    uint32_t mask_ = 0;
};

/// Calls `visit` once for every CountVector with the given total whose support
/// lies in `slots`. Visit order is deterministic (lexicographic in the member slots).
void for_each_composition(int total, SlotSet slots, const std::function<void(const CountVector &)> &visit);

/// Materialized form of for_each_composition.
std::vector<CountVector> enumerate_compositions(int total, SlotSet slots);

/// Number of compositions of `total` into `parts` nonnegative parts, C(total + parts - 1, parts - 1).
double composition_count(int total, int parts);

/// total! / prod counts_i!. Uses log-gamma for totals above 170.
/// Throws ContractViolation when counts.total() != total.
double multinomial(int total, const CountVector &counts);

/// Natural log of the multinomial coefficient.
double log_multinomial(int total, const CountVector &counts);

/// x^exponent for probabilities, evaluated as exp(exponent * ln x) with x
/// clamped to [1e-300, 1]. Returns 0 for x <= 0.
double prob_pow(double x, double exponent);

}  // namespace qpcr

#endif
