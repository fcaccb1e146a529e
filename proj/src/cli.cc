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

#include "qpcr/cli.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

#include "qpcr/optimizer.h"
#include "qpcr/oracle.h"
#include "qpcr/pipeline.h"
#include "qpcr/resources.h"

namespace qpcr::cli {
namespace {

using Json = nlohmann::ordered_json;

const std::vector<std::string> kModels = {"loss", "depol", "adv", "onoff", "dark"};
const std::vector<std::string> kTies = {"discard", "accept"};
const std::vector<std::string> kDetectors = {"pnrd", "onoff"};
const std::vector<std::string> kObjectives = {"rate", "cost"};
const std::vector<std::string> kFormats = {"json", "csv"};
const std::vector<std::string> kAxes = {"l0", "eps", "p_adv", "ltot"};
const std::vector<std::string> kBounds = {"tgw", "plob"};
const std::vector<std::string> kLevels = {"quick", "full"};

void require_member(const std::string &key, const std::string &value, const std::vector<std::string> &allowed) {
    for (const std::string &a : allowed) {
        if (a == value) {
            return;
        }
    }
    std::string list;
    for (const std::string &a : allowed) {
        list += (list.empty() ? "" : ", ") + a;
    }
    throw ConfigError(key + " must be one of {" + list + "}, got '" + value + "'");
}

// JSON (de)serialization, one entry per config key.
struct Field {
    std::function<void(RunConfig &, const Json &)> read;
    std::function<Json(const RunConfig &)> write;
};

Field string_field(std::string RunConfig::*member) {
    return {[member](RunConfig &c, const Json &j) {
                if (!j.is_string()) {
                    throw ConfigError("expected a string");
                }
                c.*member = j.get<std::string>();
            },
            [member](const RunConfig &c) { return Json(c.*member); }};
}

Field double_field(double RunConfig::*member) {
    return {[member](RunConfig &c, const Json &j) {
                if (!j.is_number()) {
                    throw ConfigError("expected a number");
                }
                c.*member = j.get<double>();
            },
            [member](const RunConfig &c) { return Json(c.*member); }};
}

Field int_field(int RunConfig::*member) {
    return {[member](RunConfig &c, const Json &j) {
                if (!j.is_number_integer()) {
                    throw ConfigError("expected an integer");
                }
                c.*member = j.get<int>();
            },
            [member](const RunConfig &c) { return Json(c.*member); }};
}

Field bool_field(bool RunConfig::*member) {
    return {[member](RunConfig &c, const Json &j) {
                if (!j.is_boolean()) {
                    throw ConfigError("expected true or false");
                }
                c.*member = j.get<bool>();
            },
            [member](const RunConfig &c) { return Json(c.*member); }};
}

const std::vector<std::pair<std::string, Field>> &fields() {
    static const std::vector<std::pair<std::string, Field>> table = {
        {"model", string_field(&RunConfig::model)},
        {"n", int_field(&RunConfig::n)},
        {"m", int_field(&RunConfig::m)},
        {"l0_km", double_field(&RunConfig::l0_km)},
        {"ltot_km", double_field(&RunConfig::ltot_km)},
        {"latt_km", double_field(&RunConfig::latt_km)},
        {"eta_d", double_field(&RunConfig::eta_d)},
        {"eps", double_field(&RunConfig::eps)},
        {"p_adv", double_field(&RunConfig::p_adv)},
        {"nbar", double_field(&RunConfig::nbar)},
        {"kappa", int_field(&RunConfig::kappa)},
        {"tie", string_field(&RunConfig::tie)},
        {"detector", string_field(&RunConfig::detector)},
        {"objective", string_field(&RunConfig::objective)},
        {"format", string_field(&RunConfig::format)},
        {"out", string_field(&RunConfig::out)},
        {"seed",
         {[](RunConfig &c, const Json &j) {
              if (!j.is_number_unsigned()) {
                  throw ConfigError("expected a non-negative integer");
              }
              c.seed = j.get<uint64_t>();
          },
          [](const RunConfig &c) { return Json(c.seed); }}},
        {"threads",
         {[](RunConfig &c, const Json &j) {
              if (!j.is_number_unsigned()) {
                  throw ConfigError("expected a non-negative integer");
              }
              c.threads = j.get<unsigned>();
          },
          [](const RunConfig &c) { return Json(c.threads); }}},
        {"matrices", bool_field(&RunConfig::matrices)},
        {"axis", string_field(&RunConfig::axis)},
        {"grid",
         {[](RunConfig &c, const Json &j) {
              if (!j.is_array()) {
                  throw ConfigError("expected an array of numbers");
              }
              std::vector<double> grid;
              for (const Json &x : j) {
                  if (!x.is_number()) {
                      throw ConfigError("expected an array of numbers");
                  }
                  grid.push_back(x.get<double>());
              }
              c.grid = std::move(grid);
          },
          [](const RunConfig &c) { return Json(c.grid); }}},
        {"n_max", int_field(&RunConfig::n_max)},
        {"m_max", int_field(&RunConfig::m_max)},
        {"l0_min", double_field(&RunConfig::l0_min)},
        {"l0_max", double_field(&RunConfig::l0_max)},
        {"l0_step", double_field(&RunConfig::l0_step)},
        {"bound", string_field(&RunConfig::bound)},
        {"smallest", bool_field(&RunConfig::smallest)},
        {"p_bm", double_field(&RunConfig::p_bm)},
        {"eta_sg", double_field(&RunConfig::eta_sg)},
        {"p_sg", double_field(&RunConfig::p_sg)},
        {"n_bm_boost", int_field(&RunConfig::n_bm_boost)},
        {"level", string_field(&RunConfig::level)},
    };
    return table;
}

// Non-finite values become null so the output stays valid JSON.
Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

std::string csv_number(double x) {
    if (std::isnan(x)) {
        return "nan";
    }
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

class CsvWriter {
   public:
    explicit CsvWriter(std::ostream &out) : out_(out) {}

    void header(const std::vector<std::string> &names) { row_strings(names); }

    void row(const std::vector<double> &values) {
        std::vector<std::string> cells;
        cells.reserve(values.size());
        for (double v : values) {
            cells.push_back(csv_number(v));
        }
        row_strings(cells);
    }

    void row_strings(const std::vector<std::string> &cells) {
        for (size_t i = 0; i < cells.size(); ++i) {
            out_ << (i ? "," : "") << cells[i];
        }
        out_ << '\n';
    }

   private:
    std::ostream &out_;
};

ErrorModelSpec make_spec(const RunConfig &c) {
    const TiePolicy tie = c.tie == "accept" ? TiePolicy::AcceptAsOne : TiePolicy::Discard;
    ErrorModelSpec spec;
    if (c.model == "loss") {
        spec = ErrorModelSpec::loss_only();
    } else if (c.model == "depol") {
        spec = ErrorModelSpec::depolarizing(c.eps);
    } else if (c.model == "adv") {
        spec = ErrorModelSpec::advanced(c.p_adv);
    } else if (c.model == "onoff") {
        spec = ErrorModelSpec::on_off(c.eps, c.kappa, tie);
    } else {
        spec = ErrorModelSpec::dark_count();
        spec.epsilon = c.eps;
    }
    spec.kappa = c.kappa;
    spec.tie = tie;
    return spec;
}

DetectorParams make_detector(const RunConfig &c) {
    DetectorParams det;
    det.eta_d = c.eta_d;
    det.nbar = c.nbar;
    det.kind = c.detector == "onoff" ? DetectorKind::OnOff : DetectorKind::PNRD;
    return det;
}

ChannelParams make_channel(const RunConfig &c) {
    ChannelParams ch;
    ch.l0 = c.l0_km;
    ch.l_tot = c.ltot_km;
    ch.l_att = c.latt_km;
    return ch;
}

Json matrix_json(const OutcomeMatrix &p) {
    Json rows = Json::object();
    for (int u = 0; u < kNumOutcomes; ++u) {
        Json row = Json::array();
        for (int v = 0; v < kNumBellStates; ++v) {
            row.push_back(p.at(u, v));
        }
        rows[std::string(outcome_label(static_cast<Outcome>(u)))] = row;
    }
    return rows;
}

double per_mode(const RunConfig &c, double rate) { return rate / (2.0 * c.n * c.m); }

// ln of the per-mode rate; survives distances where the rate underflows.
double log_per_mode(const RunConfig &c, const RateReport &r) { return r.log_r_t0 - std::log(2.0 * c.n * c.m); }

Json cmd_rates(const RunConfig &c, std::ostream &out) {
    const ChainModel model(make_spec(c), make_detector(c));
    const PointResult p = model.evaluate({c.n, c.m}, make_channel(c));
    const double pm = per_mode(c, p.rates.r_t0);
    const double cst = cost(c.n, c.m, c.l0_km, p.rates.r_t0);
    if (c.format == "csv") {
        CsvWriter csv(out);
        csv.header({"n", "m", "l0_km", "ltot_km", "eta_t", "stations", "l_id", "l_x", "l_y", "l_z", "p_trans", "q_x",
                    "q_z", "q", "r_t0", "per_mode_rate", "cost"});
        csv.row({double(c.n), double(c.m), c.l0_km, c.ltot_km, p.eta_t, p.stations, p.stats.l_id, p.stats.l_x,
                 p.stats.l_y, p.stats.l_z, p.rates.p_trans, p.rates.q_x, p.rates.q_z, p.rates.q, p.rates.r_t0, pm, cst});
        return {};
    }
    Json r;
    r["eta_t"] = p.eta_t;
    r["stations"] = p.stations;
    r["stats"] = {{"l_id", p.stats.l_id}, {"l_x", p.stats.l_x}, {"l_y", p.stats.l_y}, {"l_z", p.stats.l_z}};
    r["p_trans"] = p.rates.p_trans;
    r["q_x"] = p.rates.q_x;
    r["q_z"] = p.rates.q_z;
    r["q"] = p.rates.q;
    r["r_t0"] = p.rates.r_t0;
    r["r_t0_unclamped"] = p.rates.r_t0_unclamped;
    r["log_r_t0"] = number(p.rates.log_r_t0);
    r["per_mode_rate"] = pm;
    r["cost"] = number(cst);
    if (c.matrices) {
        r["matrices"] = {{"P", matrix_json(p.p)}, {"B", matrix_json(p.b)}, {"L", matrix_json(p.l)}};
    }
    return r;
}

std::vector<double> default_grid(const std::string &axis) {
    if (axis == "l0") {
        return make_l0_grid();
    }
    if (axis == "eps") {
        return {0.0, 1e-4, 1e-3, 5e-3, 1e-2};
    }
    if (axis == "p_adv") {
        std::vector<double> grid;
        for (int i = 0; i <= 10; ++i) {
            grid.push_back(i / 10.0);
        }
        return grid;
    }
    return geometric_grid(10.0, 1.0e5, 41);
}

Json cmd_sweep(const RunConfig &c, std::ostream &out) {
    const std::vector<double> grid = c.grid.empty() ? default_grid(c.axis) : c.grid;
    std::optional<CsvWriter> csv;
    if (c.format == "csv") {
        csv.emplace(out);
        csv->header({c.axis == "l0" ? "l0_km" : c.axis == "ltot" ? "ltot_km" : c.axis, "p_trans", "q", "r_t0",
                     "per_mode_rate", "tgw", "plob"});
    }
    Json rows = Json::array();
    for (double x : grid) {
        RunConfig point = c;
        if (c.axis == "l0") {
            point.l0_km = x;
        } else if (c.axis == "eps") {
            point.eps = x;
        } else if (c.axis == "p_adv") {
            point.p_adv = x;
        } else {
            point.ltot_km = x;
        }
        const ChainModel model(make_spec(point), make_detector(point));
        const RateReport r = model.evaluate({c.n, c.m}, make_channel(point)).rates;
        const double eta_tot = std::exp(-point.ltot_km / point.latt_km);
        const double tgw = tgw_bound(eta_tot);
        const double plob = plob_bound(eta_tot);
        const double pm = std::exp(log_per_mode(point, r));
        if (csv) {
            csv->row({x, r.p_trans, r.q, r.r_t0, pm, tgw, plob});
        } else {
            rows.push_back({{"value", x},
                            {"p_trans", r.p_trans},
                            {"q", r.q},
                            {"r_t0", r.r_t0},
                            {"per_mode_rate", pm},
                            {"log_per_mode_rate", number(log_per_mode(point, r))},
                            {"tgw", number(tgw)},
                            {"plob", number(plob)}});
        }
    }
    return csv ? Json() : Json{{"axis", c.axis}, {"rows", rows}};
}

Json cmd_optimize(const RunConfig &c, std::ostream &out) {
    SearchSpace space;
    space.n_range = {1, c.n_max};
    space.m_range = {1, c.m_max};
    space.l0_grid = make_l0_grid(c.l0_min, c.l0_max, c.l0_step);
    space.model = make_spec(c);
    space.detector = make_detector(c);
    space.channel = make_channel(c);
    const Objective objective = c.objective == "rate" ? Objective::MaxRate : Objective::MinCost;
    const OptimResult best = grid_optimize(space, objective, c.threads).best;
    if (c.format == "csv") {
        CsvWriter csv(out);
        csv.header({"found", "n", "m", "l0_km", "r_t0", "cost", "per_mode_rate", "p_trans", "q"});
        csv.row({best.found ? 1.0 : 0.0, double(best.code.n), double(best.code.m), best.l0, best.rate, best.cost,
                 best.per_mode_rate, best.rates.p_trans, best.rates.q});
        return {};
    }
    Json r;
    r["found"] = best.found;
    if (best.found) {
        r["n"] = best.code.n;
        r["m"] = best.code.m;
        r["l0_km"] = best.l0;
        r["r_t0"] = best.rate;
        r["cost"] = number(best.cost);
        r["per_mode_rate"] = best.per_mode_rate;
        r["p_trans"] = best.rates.p_trans;
        r["q"] = best.rates.q;
    }
    return r;
}

Json cmd_bounds(const RunConfig &c, std::ostream &out) {
    const Bound bound = c.bound == "plob" ? Bound::PLOB : Bound::TGW;
    const ChainModel model(make_spec(c), make_detector(c));
    if (c.smallest) {
        BeatingCaps caps;
        caps.l_att = c.latt_km;
        if (!c.grid.empty()) {
            caps.l_tot_grid = c.grid;
        }
        const BeatingResult b = smallest_code_beating_bound(model, bound, caps);
        if (c.format == "csv") {
            CsvWriter csv(out);
            csv.header({"found", "n", "m", "ltot_km", "l0_km", "log_margin"});
            csv.row({b.found ? 1.0 : 0.0, double(b.code.n), double(b.code.m), b.l_tot, b.l0, b.log_margin});
            return {};
        }
        Json r{{"bound", c.bound}, {"found", b.found}};
        if (b.found) {
            r["n"] = b.code.n;
            r["m"] = b.code.m;
            r["ltot_km"] = b.l_tot;
            r["l0_km"] = b.l0;
            r["log_margin"] = b.log_margin;
        }
        return r;
    }
    const std::vector<double> grid = c.grid.empty() ? default_grid("ltot") : c.grid;
    std::optional<CsvWriter> csv;
    if (c.format == "csv") {
        csv.emplace(out);
        csv->header({"ltot_km", "per_mode_rate", "log_per_mode_rate", "tgw", "log_tgw", "plob", "log_plob",
                     "beats_tgw", "beats_plob"});
    }
    Json rows = Json::array();
    for (double l_tot : grid) {
        ChannelParams ch = make_channel(c);
        ch.l_tot = l_tot;
        const RateReport r = model.evaluate({c.n, c.m}, ch).rates;
        const double log_pm = log_per_mode(c, r);
        const double log_tgw = log_bound(Bound::TGW, l_tot, c.latt_km);
        const double log_plob = log_bound(Bound::PLOB, l_tot, c.latt_km);
        const bool beats_tgw = log_pm > log_tgw;
        const bool beats_plob = log_pm > log_plob;
        if (csv) {
            csv->row({l_tot, std::exp(log_pm), log_pm, std::exp(log_tgw), log_tgw, std::exp(log_plob), log_plob,
                      beats_tgw ? 1.0 : 0.0, beats_plob ? 1.0 : 0.0});
        } else {
            rows.push_back({{"ltot_km", l_tot},
                            {"per_mode_rate", std::exp(log_pm)},
                            {"log_per_mode_rate", number(log_pm)},
                            {"tgw", std::exp(log_tgw)},
                            {"log_tgw", number(log_tgw)},
                            {"plob", std::exp(log_plob)},
                            {"log_plob", number(log_plob)},
                            {"beats_tgw", beats_tgw},
                            {"beats_plob", beats_plob}});
        }
    }
    if (csv) {
        return {};
    }
    return {{"n", c.n}, {"m", c.m}, {"l0_km", c.l0_km}, {"rows", rows}};
}

Json cmd_resources(const RunConfig &c, std::ostream &out) {
    const MuxParams params{c.p_bm, c.eta_sg, c.p_sg, c.n_bm_boost};
    const ResourceReport r = mux_source_count(c.n, c.m, params);
    const int modules = cpc_module_count(c.n, c.m);
    if (c.format == "csv") {
        CsvWriter csv(out);
        csv.header({"n", "m", "n_x", "n_tilde", "n_bm_total", "n_s", "conservative", "exponent", "cpc_modules"});
        csv.row({double(c.n), double(c.m), double(r.n_x), r.n_tilde, r.n_bm_total, r.n_s, r.conservative, r.exponent,
                 double(modules)});
        return {};
    }
    return {{"n_x", r.n_x},
            {"n_tilde", r.n_tilde},
            {"n_bm_total", r.n_bm_total},
            {"n_s", r.n_s},
            {"conservative", r.conservative},
            {"exponent", r.exponent},
            {"cpc_modules", modules}};
}

Json cmd_selfcheck(const RunConfig &c, std::ostream &out, std::string &first_failure) {
    const SelfcheckLevel level = c.level == "full" ? SelfcheckLevel::Full : SelfcheckLevel::Quick;
    const SelfcheckReport report = run_selfcheck(level, c.seed, c.threads);
    first_failure = report.first_failure();
    const bool passed = report.passed();
    if (c.format == "csv") {
        CsvWriter csv(out);
        csv.header({"check", "passed", "detail"});
        for (const CheckResult &check : report.checks) {
            std::string detail = check.detail;
            for (char &ch : detail) {
                if (ch == ',' || ch == '\n') {
                    ch = ';';
                }
            }
            csv.row_strings({check.name, check.passed ? "1" : "0", detail});
        }
        return {};
    }
    Json checks = Json::array();
    for (const CheckResult &check : report.checks) {
        checks.push_back({{"name", check.name}, {"passed", check.passed}, {"detail", check.detail}});
    }
    return {{"passed", passed}, {"first_failure", report.first_failure()}, {"checks", checks}};
}

void diagnose(std::ostream &err, const char *kind, const std::string &message) {
    err << Json{{"error", kind}, {"message", message}}.dump() << '\n';
}

// Command-line values; unset ones leave the file or default value alone.
struct Overrides {
    std::optional<std::string> model, tie, detector, objective, format, out, axis, grid, bound, level;
    std::optional<int> n, m, kappa, n_max, m_max, n_bm_boost;
    std::optional<double> l0_km, ltot_km, latt_km, eta_d, eps, p_adv, nbar, l0_min, l0_max, l0_step, p_bm, eta_sg,
        p_sg;
    std::optional<uint64_t> seed;
    std::optional<unsigned> threads;
    CLI::Option *matrices = nullptr;
    CLI::Option *smallest = nullptr;

    void apply(RunConfig &c) const {
        auto set = [](auto &dst, const auto &src) {
            if (src) {
                dst = *src;
            }
        };
        set(c.model, model);
        set(c.tie, tie);
        set(c.detector, detector);
        set(c.objective, objective);
        set(c.format, format);
        set(c.out, out);
        set(c.axis, axis);
        set(c.bound, bound);
        set(c.level, level);
        set(c.n, n);
        set(c.m, m);
        set(c.kappa, kappa);
        set(c.n_max, n_max);
        set(c.m_max, m_max);
        set(c.n_bm_boost, n_bm_boost);
        set(c.l0_km, l0_km);
        set(c.ltot_km, ltot_km);
        set(c.latt_km, latt_km);
        set(c.eta_d, eta_d);
        set(c.eps, eps);
        set(c.p_adv, p_adv);
        set(c.nbar, nbar);
        set(c.l0_min, l0_min);
        set(c.l0_max, l0_max);
        set(c.l0_step, l0_step);
        set(c.p_bm, p_bm);
        set(c.eta_sg, eta_sg);
        set(c.p_sg, p_sg);
        set(c.seed, seed);
        set(c.threads, threads);
        if (grid) {
            c.grid = parse_grid(*grid);
        }
        if (matrices != nullptr && matrices->count() > 0) {
            c.matrices = true;
        }
        if (smallest != nullptr && smallest->count() > 0) {
            c.smallest = true;
        }
    }
};

}  // namespace

void RunConfig::resolve() {
    require_member("model", model, kModels);
    require_member("tie", tie, kTies);
    if (detector.empty()) {
        detector = model == "onoff" ? "onoff" : "pnrd";
    }
    require_member("detector", detector, kDetectors);
    require_member("objective", objective, kObjectives);
    require_member("format", format, kFormats);
    require_member("axis", axis, kAxes);
    require_member("bound", bound, kBounds);
    require_member("level", level, kLevels);
    if (model == "onoff" && detector != "onoff") {
        throw ConfigError("model onoff requires detector onoff");
    }
    if (axis == "eps" && model != "depol" && model != "onoff" && model != "dark") {
        throw ConfigError("axis eps needs model depol, onoff or dark");
    }
    if (axis == "p_adv" && model != "adv") {
        throw ConfigError("axis p_adv needs model adv");
    }
    if (format == "csv" && matrices) {
        throw ConfigError("matrices are only available in json output");
    }
    make_spec(*this).validate(m);
    make_detector(*this).validate();
    make_channel(*this).validate();
    CodeParams{n, m}.validate();
}

RunConfig config_from_json(std::string_view text, RunConfig base) {
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::parse_error &e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    if (doc.contains("config") && doc["config"].is_object()) {
        for (const auto &[key, value] : doc.items()) {
            if (key != "command" && key != "config" && key != "result") {
                throw ConfigError("unknown top-level key '" + key + "'");
            }
        }
        doc = Json(doc["config"]);
    }
    for (const auto &[key, value] : doc.items()) {
        const auto &table = fields();
        auto it = std::find_if(table.begin(), table.end(), [&key](const auto &f) { return f.first == key; });
        if (it == table.end()) {
            throw ConfigError("unknown config key '" + key + "'");
        }
        try {
            it->second.read(base, value);
        } catch (const ConfigError &e) {
            throw ConfigError("config key '" + key + "': " + e.what());
        } catch (const Json::exception &e) {
            throw ConfigError("config key '" + key + "': " + e.what());
        }
    }
    return base;
}

std::string config_to_json(const RunConfig &config) {
    Json j = Json::object();
    for (const auto &[key, field] : fields()) {
        j[key] = field.write(config);
    }
    return j.dump(2);
}

std::vector<double> parse_grid(std::string_view spec) {
    auto to_double = [](std::string_view s) {
        double v = 0.0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
            throw ConfigError("bad grid value '" + std::string(s) + "'");
        }
        return v;
    };
    std::vector<std::string_view> parts;
    const char sep = spec.find(':') != std::string_view::npos ? ':' : ',';
    size_t start = 0;
    while (true) {
        const size_t pos = spec.find(sep, start);
        parts.push_back(spec.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    if (sep == ':') {
        if (parts.size() != 3) {
            throw ConfigError("range grid must be lo:hi:step");
        }
        try {
            return make_l0_grid(to_double(parts[0]), to_double(parts[1]), to_double(parts[2]));
        } catch (const ContractViolation &e) {
            throw ConfigError(std::string("bad range grid: ") + e.what());
        }
    }
    std::vector<double> values;
    for (std::string_view p : parts) {
        values.push_back(to_double(p));
    }
    return values;
}

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"Key rates, optimization and resources for parity-code repeater chains", "qpcr"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    Overrides o;
    app.add_option("--config", config_path, "JSON config file (command-line flags take precedence)");
    app.add_option("--model", o.model, "Error model")->check(CLI::IsMember(kModels));
    app.add_option("--n", o.n, "Number of blocks");
    app.add_option("--m", o.m, "Photons per block");
    app.add_option("--l0-km", o.l0_km, "Repeater spacing");
    app.add_option("--ltot-km", o.ltot_km, "Total distance");
    app.add_option("--latt-km", o.latt_km, "Fiber attenuation length");
    app.add_option("--eta-d", o.eta_d, "Detector efficiency");
    app.add_option("--eps", o.eps, "Depolarizing probability");
    app.add_option("--p-adv", o.p_adv, "Advanced BM identification probability for phi_0l");
    app.add_option("--nbar", o.nbar, "Mean thermal photon number per detector");
    app.add_option("--kappa", o.kappa, "On-off voting boundary");
    app.add_option("--tie", o.tie, "On-off tie handling")->check(CLI::IsMember(kTies));
    app.add_option("--detector", o.detector, "Detector kind")->check(CLI::IsMember(kDetectors));
    app.add_option("--objective", o.objective, "Optimization objective")->check(CLI::IsMember(kObjectives));
    app.add_option("--format", o.format, "Output format")->check(CLI::IsMember(kFormats));
    app.add_option("--out", o.out, "Output file (default stdout)");
    app.add_option("--seed", o.seed, "Monte-Carlo seed");
    app.add_option("--threads", o.threads, "Worker threads (0 = all cores)");

    CLI::App *rates = app.add_subcommand("rates", "Evaluate one code at one spacing");
    o.matrices = rates->add_flag("--matrices", "Include the P, B and L matrices");

    CLI::App *sweep = app.add_subcommand("sweep", "Vary one parameter and tabulate rates and bounds");
    sweep->add_option("--axis", o.axis, "Swept parameter")->check(CLI::IsMember(kAxes));
    sweep->add_option("--grid", o.grid, "Values as a,b,c or lo:hi:step");

    CLI::App *optimize = app.add_subcommand("optimize", "Grid search over n, m and L0");
    optimize->add_option("--n-max", o.n_max, "Largest n");
    optimize->add_option("--m-max", o.m_max, "Largest m");
    optimize->add_option("--l0-min", o.l0_min, "Smallest L0 (km)");
    optimize->add_option("--l0-max", o.l0_max, "Largest L0 (km)");
    optimize->add_option("--l0-step", o.l0_step, "L0 step (km)");

    CLI::App *bounds = app.add_subcommand("bounds", "Compare per-mode rates with repeaterless bounds");
    bounds->add_option("--bound", o.bound, "Bound for --smallest")->check(CLI::IsMember(kBounds));
    bounds->add_option("--grid", o.grid, "Total distances as a,b,c or lo:hi:step");
    o.smallest = bounds->add_flag("--smallest", "Search for the smallest code beating the bound");

    CLI::App *resources = app.add_subcommand("resources", "Photon-source counts for state preparation");
    resources->add_option("--p-bm", o.p_bm, "Joining BM success probability");
    resources->add_option("--eta-sg", o.eta_sg, "Survival of measured photons");
    resources->add_option("--p-sg", o.p_sg, "Target preparation probability");
    resources->add_option("--n-bm-boost", o.n_bm_boost, "Ancilla photons per boosted BM");

    CLI::App *selfcheck = app.add_subcommand("selfcheck", "Run the built-in invariant checks");
    selfcheck->add_option("--level", o.level, "quick or full")->check(CLI::IsMember(kLevels));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp &) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError &e) {
        diagnose(err, "usage", e.what());
        return kExitConfig;
    }

    RunConfig config;
    try {
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) {
                throw ConfigError("cannot read config file '" + config_path + "'");
            }
            std::stringstream buf;
            buf << in.rdbuf();
            config = config_from_json(buf.str(), config);
        }
        o.apply(config);
        config.resolve();
    } catch (const ConfigError &e) {
        diagnose(err, "config", e.what());
        return kExitConfig;
    } catch (const ContractViolation &e) {
        diagnose(err, "config", e.what());
        return kExitConfig;
    }

    std::ofstream file;
    if (!config.out.empty()) {
        file.open(config.out);
        if (!file) {
            diagnose(err, "config", "cannot write '" + config.out + "'");
            return kExitConfig;
        }
    }
    std::ostream &sink = config.out.empty() ? out : file;

    std::string command;
    Json result;
    std::string failed_check;
    try {
        if (rates->parsed()) {
            command = "rates";
            result = cmd_rates(config, sink);
        } else if (sweep->parsed()) {
            command = "sweep";
            result = cmd_sweep(config, sink);
        } else if (optimize->parsed()) {
            command = "optimize";
            result = cmd_optimize(config, sink);
        } else if (bounds->parsed()) {
            command = "bounds";
            result = cmd_bounds(config, sink);
        } else if (resources->parsed()) {
            command = "resources";
            result = cmd_resources(config, sink);
        } else {
            command = "selfcheck";
            result = cmd_selfcheck(config, sink, failed_check);
        }
    } catch (const ContractViolation &e) {
        diagnose(err, "config", e.what());
        return kExitConfig;
    }

    if (config.format == "json") {
        Json doc;
        doc["command"] = command;
        doc["config"] = Json::parse(config_to_json(config));
        doc["result"] = result;
        sink << doc.dump(2) << '\n';
    }
    sink.flush();
    if (!failed_check.empty()) {
        err << "selfcheck failed: " << failed_check << '\n';
        return kExitSelfcheck;
    }
    return kExitOk;
}

}  // namespace qpcr::cli
