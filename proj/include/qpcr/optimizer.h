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

#ifndef QPCR_OPTIMIZER_H
#define QPCR_OPTIMIZER_H

#include <optional>
#include <vector>

#include "qpcr/core.h"
#include "qpcr/pipeline.h"

namespace qpcr {

struct IntRange {
    int lo = 1;
    int hi = 1;

    bool contains(int x) const { return x >= lo && x <= hi; }
    int size() const { return hi - lo + 1; }
};

/// Repeater spacings from lo to hi (inclusive, within rounding) in steps of step km.
std::vector<double> make_l0_grid(double lo = 0.5, double hi = 10.0, double step = 0.1);

struct SearchSpace {
    IntRange n_range{1, 60};
    IntRange m_range{1, 10};
    std::vector<double> l0_grid = make_l0_grid();
    ErrorModelSpec model;
    DetectorParams detector;
    /// L_tot, L_att and the station-count mode are taken from here; l0 is overwritten.
    ChannelParams channel;

    void validate() const;
};

enum class Objective : uint8_t { MaxRate, MinCost };

/// n m / (rate l0); infinite when rate <= 0.
double cost(int n, int m, double l0, double rate);

struct GridPoint {
    int n = 0;
    int m = 0;
    double l0 = 0.0;
    RateReport rates;
    double cost = 0.0;
};

struct OptimResult {
    bool found = false;
    CodeParams code;
    double l0 = 0.0;
    double rate = 0.0;
    double cost = 0.0;
    double per_mode_rate = 0.0;
    RateReport rates;
};

struct GridSearchOutput {
    OptimResult best;
    /// Every evaluated point, ordered by (m, l0, n).
    std::vector<GridPoint> grid;
};

/// Exhaustive search. Ties are broken by smaller n m, then smaller n, then
/// larger l0. `threads` = 0 uses the hardware concurrency.
GridSearchOutput grid_optimize(const SearchSpace &space, Objective objective, unsigned threads = 0);

/// Repeaterless bounds in bits per mode for channel transmissivity eta.
double tgw_bound(double eta);
double plob_bound(double eta);

/// Natural logs of the bounds as functions of ln(eta); stable for eta far
/// below the smallest double.
double log_tgw_bound(double log_eta);
double log_plob_bound(double log_eta);

enum class Bound : uint8_t { TGW, PLOB, None };

/// ln of the bound for a channel of length l_tot with attenuation length l_att.
/// Bound::None returns -infinity.
double log_bound(Bound bound, double l_tot, double l_att);

/// ln(R t0 / (2 n m)), -infinity when no key is produced.
double log_per_mode_rate(const RateReport &rates, const CodeParams &code);

struct BeatingCaps {
    int max_n = 12;
    int max_m = 8;
    int max_nm = 40;
    std::vector<double> l0_grid = make_l0_grid();
    /// Total distances tried as witnesses (km).
    std::vector<double> l_tot_grid;
    double l_att = 22.0;
};

/// Geometric grid of `count` distances from lo to hi km.
std::vector<double> geometric_grid(double lo, double hi, int count);

struct BeatingResult {
    bool found = false;
    CodeParams code;
    double l_tot = 0.0;
    double l0 = 0.0;
    /// ln(per-mode rate) - ln(bound) at the witness.
    double log_margin = 0.0;
};

/// Smallest code (by n m, then n) whose per-mode key rate exceeds the bound at
/// some (L_tot, L0) of the witness grids.
BeatingResult smallest_code_beating_bound(const ChainModel &model, Bound bound, const BeatingCaps &caps);

/// Distances from l_tot_grid at which the code beats the bound at fixed L0.
std::vector<double> bound_beating_distances(const ChainModel &model, const CodeParams &code, double l0,
                                            Bound bound, const std::vector<double> &l_tot_grid,
                                            double l_att = 22.0);

}  // namespace qpcr

#endif
