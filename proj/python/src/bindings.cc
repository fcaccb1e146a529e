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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qpcr/optimizer.h"
#include "qpcr/oracle.h"
#include "qpcr/physical.h"
#include "qpcr/pipeline.h"
#include "qpcr/resources.h"

namespace py = pybind11;
using namespace qpcr;

namespace {

py::array_t<double> to_array(const OutcomeMatrix &p) {
    py::array_t<double> out({kNumOutcomes, kNumBellStates});
    auto view = out.mutable_unchecked<2>();
    for (int u = 0; u < kNumOutcomes; ++u) {
        for (int v = 0; v < kNumBellStates; ++v) {
            view(u, v) = p.at(u, v);
        }
    }
    return out;
}

OutcomeMatrix from_array(const py::array_t<double, py::array::c_style | py::array::forcecast> &a) {
    if (a.ndim() != 2 || a.shape(0) != kNumOutcomes || a.shape(1) != kNumBellStates) {
        throw py::value_error("outcome matrix must have shape (7, 4)");
    }
    auto view = a.unchecked<2>();
    OutcomeMatrix p;
    for (int u = 0; u < kNumOutcomes; ++u) {
        for (int v = 0; v < kNumBellStates; ++v) {
            p.at(u, v) = view(u, v);
        }
    }
    return p;
}

}  // namespace

PYBIND11_MODULE(_qpcr, m) {
    m.doc() = "Outcome propagation, key rates and resource counts for parity-code repeater chains";

    py::enum_<DetectorKind>(m, "DetectorKind").value("PNRD", DetectorKind::PNRD).value("OnOff", DetectorKind::OnOff);
    py::enum_<TiePolicy>(m, "TiePolicy")
        .value("Discard", TiePolicy::Discard)
        .value("AcceptAsOne", TiePolicy::AcceptAsOne);
    py::enum_<Objective>(m, "Objective").value("MaxRate", Objective::MaxRate).value("MinCost", Objective::MinCost);
    py::enum_<Bound>(m, "Bound").value("TGW", Bound::TGW).value("PLOB", Bound::PLOB).value("None_", Bound::None);

    py::class_<CodeParams>(m, "CodeParams")
        .def(py::init([](int n, int m_) { return CodeParams{n, m_}; }), py::arg("n"), py::arg("m"))
        .def_readwrite("n", &CodeParams::n)
        .def_readwrite("m", &CodeParams::m)
        .def("__eq__", [](const CodeParams &a, const CodeParams &b) { return a == b; })
        .def("__repr__", [](const CodeParams &c) {
            return "CodeParams(" + std::to_string(c.n) + ", " + std::to_string(c.m) + ")";
        });

    py::class_<ChannelParams>(m, "ChannelParams")
        .def(py::init([](double l0, double l_tot, double l_att) {
                 ChannelParams ch;
                 ch.l0 = l0;
                 ch.l_tot = l_tot;
                 ch.l_att = l_att;
                 return ch;
             }),
             py::arg("l0") = 2.0, py::arg("l_tot") = 1000.0, py::arg("l_att") = 22.0)
        .def_readwrite("l0", &ChannelParams::l0)
        .def_readwrite("l_tot", &ChannelParams::l_tot)
        .def_readwrite("l_att", &ChannelParams::l_att)
        .def_readwrite("integer_stations", &ChannelParams::integer_stations)
        .def("stations", &ChannelParams::stations)
        .def("transmission", &ChannelParams::transmission);

    py::class_<DetectorParams>(m, "DetectorParams")
        .def(py::init([](double eta_d, double nbar, DetectorKind kind) {
                 return DetectorParams{eta_d, nbar, kind};
             }),
             py::arg("eta_d") = 1.0, py::arg("nbar") = 0.0, py::arg("kind") = DetectorKind::PNRD)
        .def_readwrite("eta_d", &DetectorParams::eta_d)
        .def_readwrite("nbar", &DetectorParams::nbar)
        .def_readwrite("kind", &DetectorParams::kind);

    py::class_<ErrorModelSpec>(m, "ErrorModelSpec")
        .def_static("loss_only", &ErrorModelSpec::loss_only)
        .def_static("depolarizing", &ErrorModelSpec::depolarizing, py::arg("epsilon"))
        .def_static("advanced", &ErrorModelSpec::advanced, py::arg("p_adv"))
        .def_static("on_off", &ErrorModelSpec::on_off, py::arg("epsilon"), py::arg("kappa") = 0,
                    py::arg("tie") = TiePolicy::Discard)
        .def_static("dark_count", &ErrorModelSpec::dark_count)
        .def_readwrite("epsilon", &ErrorModelSpec::epsilon)
        .def_readwrite("p_adv", &ErrorModelSpec::p_adv)
        .def_readwrite("kappa", &ErrorModelSpec::kappa)
        .def_readwrite("tie", &ErrorModelSpec::tie)
        .def("describe", &ErrorModelSpec::describe)
        .def("__repr__", &ErrorModelSpec::describe);

    py::class_<BMStats>(m, "BMStats")
        .def_readonly("l_id", &BMStats::l_id)
        .def_readonly("l_x", &BMStats::l_x)
        .def_readonly("l_y", &BMStats::l_y)
        .def_readonly("l_z", &BMStats::l_z)
        .def("total", &BMStats::total);

    py::class_<RateReport>(m, "RateReport")
        .def_readonly("p_trans", &RateReport::p_trans)
        .def_readonly("q_x", &RateReport::q_x)
        .def_readonly("q_z", &RateReport::q_z)
        .def_readonly("q", &RateReport::q)
        .def_readonly("r_t0_unclamped", &RateReport::r_t0_unclamped)
        .def_readonly("r_t0", &RateReport::r_t0)
        .def_readonly("log_r_t0", &RateReport::log_r_t0);

    py::class_<PointResult>(m, "PointResult")
        .def_readonly("eta_t", &PointResult::eta_t)
        .def_readonly("stations", &PointResult::stations)
        .def_property_readonly("p", [](const PointResult &r) { return to_array(r.p); })
        .def_property_readonly("b", [](const PointResult &r) { return to_array(r.b); })
        .def_property_readonly("l", [](const PointResult &r) { return to_array(r.l); })
        .def_readonly("stats", &PointResult::stats)
        .def_readonly("rates", &PointResult::rates);

    py::class_<ChainModel>(m, "ChainModel")
        .def(py::init<ErrorModelSpec, DetectorParams>(), py::arg("spec"), py::arg("detector") = DetectorParams{})
        .def("physical", [](const ChainModel &c, double eta_t) { return to_array(c.physical(eta_t)); })
        .def("evaluate", &ChainModel::evaluate, py::arg("code"), py::arg("channel"));

    py::class_<RuleFamily>(m, "RuleFamily")
        .def_static("standard_f", &RuleFamily::standard_f)
        .def_static("standard_g", &RuleFamily::standard_g)
        .def_static("onoff_tilde", &RuleFamily::onoff_tilde)
        .def_static("onoff_kappa", &RuleFamily::onoff_kappa, py::arg("kappa"), py::arg("tie"))
        .def("name", &RuleFamily::name);

    m.def("p_matrix_loss", [](double eta) { return to_array(p_matrix_loss(eta)); }, py::arg("eta"));
    m.def("p_matrix_depol", [](double eta, double eps) { return to_array(p_matrix_depol(eta, eps)); },
          py::arg("eta"), py::arg("epsilon"));
    m.def("p_matrix_advanced", [](double eta_t, double p_adv) { return to_array(p_matrix_advanced(eta_t, p_adv)); },
          py::arg("eta_t"), py::arg("p_adv"));
    m.def("p_matrix_onoff", [](double eta, double eps) { return to_array(p_matrix_onoff(eta, eps)); },
          py::arg("eta"), py::arg("epsilon"));
    m.def("p_matrix_dark",
          [](double eta_t, double eta_d, double nbar) { return to_array(p_matrix_dark(eta_t, eta_d, nbar)); },
          py::arg("eta_t"), py::arg("eta_d"), py::arg("nbar"));
    m.def(
        "propagate_block",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast> &p, int block,
           const RuleFamily &rules) { return to_array(propagate_block(from_array(p), block, rules)); },
        py::arg("p"), py::arg("m"), py::arg("rules") = RuleFamily::standard_f());
    m.def(
        "propagate_logical",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast> &b, int n, const RuleFamily &rules) {
            return to_array(propagate_logical(from_array(b), n, rules));
        },
        py::arg("b"), py::arg("n"), py::arg("rules") = RuleFamily::standard_g());
    m.def("binary_entropy", &binary_entropy, py::arg("q"));
    m.def("chain_rates", &chain_rates, py::arg("stats"), py::arg("stations"));
    m.def("closed_form_loss_rate", &closed_form_loss_rate, py::arg("n"), py::arg("m"), py::arg("eta"),
          py::arg("stations"));

    m.def("tgw_bound", &tgw_bound, py::arg("eta"));
    m.def("plob_bound", &plob_bound, py::arg("eta"));
    m.def("cost", &cost, py::arg("n"), py::arg("m"), py::arg("l0"), py::arg("rate"));
    m.def("make_l0_grid", &make_l0_grid, py::arg("lo") = 0.5, py::arg("hi") = 10.0, py::arg("step") = 0.1);
    m.def("geometric_grid", &geometric_grid, py::arg("lo"), py::arg("hi"), py::arg("count"));

    py::class_<OptimResult>(m, "OptimResult")
        .def_readonly("found", &OptimResult::found)
        .def_readonly("code", &OptimResult::code)
        .def_readonly("l0", &OptimResult::l0)
        .def_readonly("rate", &OptimResult::rate)
        .def_readonly("cost", &OptimResult::cost)
        .def_readonly("per_mode_rate", &OptimResult::per_mode_rate)
        .def_readonly("rates", &OptimResult::rates);

    m.def(
        "optimize",
        [](const ErrorModelSpec &spec, const DetectorParams &detector, double l_tot, double l_att, int n_max,
           int m_max, std::vector<double> l0_grid, Objective objective, unsigned threads) {
            SearchSpace space;
            space.model = spec;
            space.detector = detector;
            space.channel.l_tot = l_tot;
            space.channel.l_att = l_att;
            space.n_range = {1, n_max};
            space.m_range = {1, m_max};
            if (!l0_grid.empty()) {
                space.l0_grid = std::move(l0_grid);
            }
            py::gil_scoped_release release;
            return grid_optimize(space, objective, threads).best;
        },
        py::arg("spec") = ErrorModelSpec::loss_only(), py::arg("detector") = DetectorParams{},
        py::arg("l_tot") = 1000.0, py::arg("l_att") = 22.0, py::arg("n_max") = 60, py::arg("m_max") = 10,
        py::arg("l0_grid") = std::vector<double>{}, py::arg("objective") = Objective::MinCost,
        py::arg("threads") = 0u);

    py::class_<BeatingResult>(m, "BeatingResult")
        .def_readonly("found", &BeatingResult::found)
        .def_readonly("code", &BeatingResult::code)
        .def_readonly("l_tot", &BeatingResult::l_tot)
        .def_readonly("l0", &BeatingResult::l0)
        .def_readonly("log_margin", &BeatingResult::log_margin);
    m.def(
        "smallest_code_beating_bound",
        [](const ChainModel &model, Bound bound) {
            py::gil_scoped_release release;
            return smallest_code_beating_bound(model, bound, BeatingCaps{});
        },
        py::arg("model"), py::arg("bound"));

    py::class_<MuxParams>(m, "MuxParams")
        .def(py::init([](double p_bm, double eta_sg, double p_sg, int n_bm_boost) {
                 return MuxParams{p_bm, eta_sg, p_sg, n_bm_boost};
             }),
             py::arg("p_bm") = 0.75, py::arg("eta_sg") = 1.0, py::arg("p_sg") = 0.999, py::arg("n_bm_boost") = 4)
        .def_static("boosted", &MuxParams::boosted, py::arg("eta_sg") = 1.0)
        .def_static("standard", &MuxParams::standard, py::arg("eta_sg") = 1.0)
        .def_readwrite("p_bm", &MuxParams::p_bm)
        .def_readwrite("eta_sg", &MuxParams::eta_sg)
        .def_readwrite("p_sg", &MuxParams::p_sg)
        .def_readwrite("n_bm_boost", &MuxParams::n_bm_boost);
    py::class_<ResourceReport>(m, "ResourceReport")
        .def_readonly("n_x", &ResourceReport::n_x)
        .def_readonly("n_tilde", &ResourceReport::n_tilde)
        .def_readonly("n_bm_total", &ResourceReport::n_bm_total)
        .def_readonly("n_s", &ResourceReport::n_s)
        .def_readonly("conservative", &ResourceReport::conservative)
        .def_readonly("exponent", &ResourceReport::exponent);
    m.def("cpc_module_count", &cpc_module_count, py::arg("n"), py::arg("m"));
    m.def("heralded_source_success", &heralded_source_success, py::arg("eta_s"), py::arg("k_sources"));
    m.def("multiplex_pool_size", &multiplex_pool_size, py::arg("p_eff"), py::arg("p_sg"));
    m.def("mux_source_count", &mux_source_count, py::arg("n"), py::arg("m"), py::arg("params") = MuxParams{});

    m.def(
        "selfcheck",
        [](bool full, uint64_t seed, unsigned threads) {
            SelfcheckReport report;
            {
                py::gil_scoped_release release;
                report = run_selfcheck(full ? SelfcheckLevel::Full : SelfcheckLevel::Quick, seed, threads);
            }
            py::list checks;
            for (const CheckResult &c : report.checks) {
                checks.append(py::dict(py::arg("name") = c.name, py::arg("passed") = c.passed,
                                       py::arg("detail") = c.detail));
            }
            return py::dict(py::arg("passed") = report.passed(), py::arg("first_failure") = report.first_failure(),
                            py::arg("checks") = checks);
        },
        py::arg("full") = false, py::arg("seed") = McConfig{}.seed, py::arg("threads") = 0u);
}
