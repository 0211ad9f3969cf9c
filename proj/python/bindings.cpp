#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "greydea/dataset.hpp"
#include "greydea/dea.hpp"
#include "greydea/errors.hpp"
#include "greydea/grey.hpp"
#include "greydea/lp.hpp"
#include "greydea/report.hpp"
#include "greydea/version.hpp"

namespace py = pybind11;
using namespace greydea;

namespace {

Panel panel_from_text(const std::string& text) {
    std::istringstream in(text);
    return load_panel(in);
}

std::string panel_to_text(const Panel& panel) {
    std::ostringstream out;
    emit_panel(panel, out);
    return out.str();
}

Panel wide_to_long_text(const std::string& text, const std::string& indicator,
                        const std::string& unit, int year_base) {
    std::istringstream in(text);
    return wide_to_long(in, indicator, unit, year_base);
}

DeflatorTable deflators_from_text(const std::string& text) {
    std::istringstream in(text);
    return load_deflators(in);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "DEA efficiency scoring and GM(1,1) grey forecasting";
    m.attr("__version__") = kVersion;

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<FitError>(m, "FitError", PyExc_ArithmeticError);
    py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

    // --- linear programming ---
    py::enum_<LpSense>(m, "LpSense")
        .value("Minimize", LpSense::Minimize)
        .value("Maximize", LpSense::Maximize);
    py::enum_<LpStatus>(m, "LpStatus")
        .value("Optimal", LpStatus::Optimal)
        .value("Infeasible", LpStatus::Infeasible)
        .value("Unbounded", LpStatus::Unbounded);
    py::class_<LpProblem>(m, "LpProblem")
        .def(py::init<>())
        .def_readwrite("sense", &LpProblem::sense)
        .def_readwrite("cost", &LpProblem::cost)
        .def_readwrite("eq_matrix", &LpProblem::eq_matrix)
        .def_readwrite("eq_rhs", &LpProblem::eq_rhs);
    py::class_<LpSolution>(m, "LpSolution")
        .def_readonly("status", &LpSolution::status)
        .def_readonly("solution", &LpSolution::solution)
        .def_readonly("objective", &LpSolution::objective)
        .def_readonly("iterations", &LpSolution::iterations);
    m.def("solve_lp", &solve_lp, py::arg("problem"));

    // --- DEA ---
    py::enum_<Orientation>(m, "Orientation")
        .value("Input", Orientation::Input)
        .value("Output", Orientation::Output);
    py::enum_<ReturnsToScale>(m, "ReturnsToScale")
        .value("CRS", ReturnsToScale::CRS)
        .value("VRS", ReturnsToScale::VRS);
    py::enum_<SlackStage>(m, "SlackStage")
        .value("RadialOnly", SlackStage::RadialOnly)
        .value("TwoStage", SlackStage::TwoStage);
    py::enum_<RtsClass>(m, "RtsClass")
        .value("Increasing", RtsClass::Increasing)
        .value("Decreasing", RtsClass::Decreasing)
        .value("Constant", RtsClass::Constant);
    py::enum_<ZeroInputPolicy>(m, "ZeroInputPolicy")
        .value("Reject", ZeroInputPolicy::Reject)
        .value("ReplaceZeros", ZeroInputPolicy::ReplaceZeros);

    py::class_<DeaOptions>(m, "DeaOptions")
        .def(py::init<>())
        .def_readwrite("orientation", &DeaOptions::orientation)
        .def_readwrite("returns_to_scale", &DeaOptions::returns_to_scale)
        .def_readwrite("slack_stage", &DeaOptions::slack_stage);

    py::class_<DeaInstance>(m, "DeaInstance")
        .def(py::init<std::vector<std::string>, Eigen::MatrixXd, Eigen::MatrixXd,
                      std::vector<std::string>, std::vector<std::string>,
                      std::vector<std::string>, std::vector<std::string>, ZeroInputPolicy>(),
             py::arg("dmu_names"), py::arg("inputs"), py::arg("outputs"),
             py::arg("input_names") = std::vector<std::string>{},
             py::arg("output_names") = std::vector<std::string>{},
             py::arg("input_units") = std::vector<std::string>{},
             py::arg("output_units") = std::vector<std::string>{},
             py::arg("policy") = ZeroInputPolicy::Reject)
        .def_property_readonly("n_dmus", &DeaInstance::n_dmus)
        .def_property_readonly("n_inputs", &DeaInstance::n_inputs)
        .def_property_readonly("n_outputs", &DeaInstance::n_outputs)
        .def_property_readonly("dmu_names", &DeaInstance::dmu_names)
        .def_property_readonly("inputs", &DeaInstance::inputs)
        .def_property_readonly("outputs", &DeaInstance::outputs)
        .def_property_readonly("input_names", &DeaInstance::input_names)
        .def_property_readonly("output_names", &DeaInstance::output_names);

    py::class_<DeaScore>(m, "DeaScore")
        .def_readonly("dmu_index", &DeaScore::dmu_index)
        .def_readonly("orientation", &DeaScore::orientation)
        .def_readonly("returns_to_scale", &DeaScore::returns_to_scale)
        .def_readonly("score", &DeaScore::score)
        .def_readonly("lambdas", &DeaScore::lambdas)
        .def_readonly("input_slacks", &DeaScore::input_slacks)
        .def_readonly("output_slacks", &DeaScore::output_slacks)
        .def_readonly("sum_lambda", &DeaScore::sum_lambda)
        .def_readonly("efficient", &DeaScore::efficient);

    py::class_<RtsClassification>(m, "RtsClassification")
        .def_readonly("rts", &RtsClassification::rts)
        .def_readonly("boundary", &RtsClassification::boundary);

    py::class_<EfficiencyDecomposition>(m, "EfficiencyDecomposition")
        .def_readonly("te", &EfficiencyDecomposition::te)
        .def_readonly("pte", &EfficiencyDecomposition::pte)
        .def_readonly("se", &EfficiencyDecomposition::se)
        .def_readonly("rts_class", &EfficiencyDecomposition::rts_class)
        .def_readonly("rts_boundary", &EfficiencyDecomposition::rts_boundary);

    py::class_<ProjectionTarget>(m, "ProjectionTarget")
        .def_readonly("target_inputs", &ProjectionTarget::target_inputs)
        .def_readonly("target_outputs", &ProjectionTarget::target_outputs);

    m.def("evaluate_dmu", &evaluate_dmu, py::arg("instance"), py::arg("dmu"),
          py::arg("options") = DeaOptions{});
    m.def("evaluate_all", &evaluate_all, py::arg("instance"), py::arg("options") = DeaOptions{});
    m.def("classify_rts", &classify_rts, py::arg("crs_score"));
    m.def("decompose", &decompose, py::arg("instance"), py::arg("dmu"),
          py::arg("orientation") = Orientation::Input);
    m.def("project", &project, py::arg("instance"), py::arg("score"));

    // --- grey forecasting ---
    py::class_<Series>(m, "Series")
        .def(py::init<>())
        .def(py::init([](int start_year, std::vector<double> values, std::string unit) {
                 Series s;
                 s.start_year = start_year;
                 s.values = std::move(values);
                 s.unit = std::move(unit);
                 return s;
             }),
             py::arg("start_year"), py::arg("values"), py::arg("unit") = "")
        .def_readwrite("start_year", &Series::start_year)
        .def_readwrite("values", &Series::values)
        .def_readwrite("unit", &Series::unit)
        .def("last_year", &Series::last_year);

    py::class_<Gm11Model>(m, "Gm11Model")
        .def_readonly("a", &Gm11Model::a)
        .def_readonly("b", &Gm11Model::b)
        .def_readonly("first_value", &Gm11Model::first_value)
        .def_readonly("n", &Gm11Model::n)
        .def_readonly("degenerate", &Gm11Model::degenerate)
        .def_readonly("class_ratio_ok", &Gm11Model::class_ratio_ok);

    py::class_<LinearModel>(m, "LinearModel")
        .def(py::init([](double slope, double intercept) {
                 LinearModel lm;
                 lm.slope = slope;
                 lm.intercept = intercept;
                 return lm;
             }),
             py::arg("slope"), py::arg("intercept"))
        .def_readonly("slope", &LinearModel::slope)
        .def_readonly("intercept", &LinearModel::intercept)
        .def("predict", &LinearModel::predict, py::arg("year"));

    py::class_<BacktestRow>(m, "BacktestRow")
        .def_readonly("year", &BacktestRow::year)
        .def_readonly("actual", &BacktestRow::actual)
        .def_readonly("predicted", &BacktestRow::predicted)
        .def_readonly("relative_error", &BacktestRow::relative_error);

    py::class_<BacktestReport>(m, "BacktestReport")
        .def_readonly("rows", &BacktestReport::rows)
        .def_readonly("mean_relative_error", &BacktestReport::mean_relative_error);

    py::enum_<ForecastMethod>(m, "ForecastMethod")
        .value("GM11", ForecastMethod::GM11)
        .value("Linear", ForecastMethod::Linear);

    m.def("ago", &ago, py::arg("series"));
    m.def("mean_sequence", &mean_sequence, py::arg("x1"));
    m.def("fit_gm11", &fit_gm11, py::arg("series"));
    m.def("fitted_and_forecast", &fitted_and_forecast, py::arg("model"), py::arg("horizon"));
    m.def("fit_linear", &fit_linear, py::arg("series"));
    m.def("backtest", &backtest, py::arg("series"), py::arg("train_len"), py::arg("method"));

    // --- dataset ---
    py::class_<Observation>(m, "Observation")
        .def(py::init<>())
        .def_readwrite("region", &Observation::region)
        .def_readwrite("year", &Observation::year)
        .def_readwrite("indicator", &Observation::indicator)
        .def_readwrite("value", &Observation::value)
        .def_readwrite("unit", &Observation::unit);

    py::class_<Panel>(m, "Panel")
        .def(py::init<>())
        .def("add", &Panel::add, py::arg("observation"))
        .def("__len__", &Panel::size)
        .def("observations",
             [](const Panel& p) {
                 std::vector<Observation> out;
                 for (const auto& [key, obs] : p) out.push_back(obs);
                 return out;
             })
        .def("regions", py::overload_cast<>(&Panel::regions, py::const_))
        .def("indicators", py::overload_cast<>(&Panel::indicators, py::const_))
        .def("years", &Panel::years, py::arg("region"), py::arg("indicator"))
        .def("find", [](const Panel& p, const std::string& region, const std::string& indicator,
                        int year) -> std::optional<Observation> {
            const Observation* obs = p.find(region, indicator, year);
            if (obs == nullptr) return std::nullopt;
            return *obs;
        });

    py::class_<ColumnMapping>(m, "ColumnMapping")
        .def(py::init<>())
        .def_readwrite("region", &ColumnMapping::region)
        .def_readwrite("year", &ColumnMapping::year)
        .def_readwrite("indicator", &ColumnMapping::indicator)
        .def_readwrite("value", &ColumnMapping::value)
        .def_readwrite("unit", &ColumnMapping::unit);

    m.def("load_panel_file", &load_panel_file, py::arg("path"), py::arg("mapping") = ColumnMapping{});
    m.def("load_panel_text", &panel_from_text, py::arg("text"));
    m.def("emit_panel_text", &panel_to_text, py::arg("panel"));
    m.def("wide_to_long_text", &wide_to_long_text, py::arg("text"), py::arg("indicator"),
          py::arg("unit"), py::arg("year_base") = 1900);

    py::enum_<EnergyClass>(m, "EnergyClass")
        .value("CRN", EnergyClass::CRN)
        .value("CNRN", EnergyClass::CNRN)
        .value("NCNRN", EnergyClass::NCNRN)
        .value("NCRN", EnergyClass::NCRN);
    py::enum_<Sector>(m, "Sector")
        .value("Industrial", Sector::Industrial)
        .value("Transportation", Sector::Transportation)
        .value("Commercial", Sector::Commercial)
        .value("Residential", Sector::Residential);
    py::enum_<TaxonomyMapping>(m, "TaxonomyMapping")
        .value("PaperVerbatim", TaxonomyMapping::PaperVerbatim)
        .value("Corrected", TaxonomyMapping::Corrected);

    m.def("classify_energy", &classify_energy, py::arg("indicator"), py::arg("mapping"));
    m.def("energy_codes", [] { return energy_codes(); });
    m.def("class_members", &class_members, py::arg("cls"), py::arg("mapping"));
    m.def("sector_codes", &sector_codes);

    py::class_<DeflatorTable>(m, "DeflatorTable")
        .def(py::init<std::map<int, double>>(), py::arg("multipliers"))
        .def("multiplier", &DeflatorTable::multiplier, py::arg("year"))
        .def_property_readonly("multipliers", &DeflatorTable::multipliers);

    m.def("load_deflators_file", &load_deflators_file, py::arg("path"));
    m.def("load_deflators_text", &deflators_from_text, py::arg("text"));
    m.def("deflate", &deflate, py::arg("nominal_value"), py::arg("year"), py::arg("table"));

    m.def("aggregate", &aggregate, py::arg("panel"), py::arg("region"), py::arg("indicators"),
          py::arg("year_from") = std::nullopt, py::arg("year_to") = std::nullopt);

    py::class_<DeaInstanceSpec>(m, "DeaInstanceSpec")
        .def(py::init<>())
        .def_readwrite("output_indicators", &DeaInstanceSpec::output_indicators)
        .def_readwrite("input_indicators", &DeaInstanceSpec::input_indicators)
        .def_readwrite("dmu_regions", &DeaInstanceSpec::dmu_regions)
        .def_readwrite("year", &DeaInstanceSpec::year)
        .def_readwrite("region", &DeaInstanceSpec::region)
        .def_readwrite("dmu_years", &DeaInstanceSpec::dmu_years)
        .def_readwrite("deflate", &DeaInstanceSpec::deflate)
        .def_readwrite("zero_policy", &DeaInstanceSpec::zero_policy);

    py::class_<CellProvenance>(m, "CellProvenance")
        .def_readonly("is_input", &CellProvenance::is_input)
        .def_readonly("row", &CellProvenance::row)
        .def_readonly("col", &CellProvenance::col)
        .def_readonly("region", &CellProvenance::region)
        .def_readonly("indicator", &CellProvenance::indicator)
        .def_readonly("year", &CellProvenance::year)
        .def_readonly("raw_value", &CellProvenance::raw_value)
        .def_readonly("multiplier", &CellProvenance::multiplier);

    py::class_<DeaBuildResult>(m, "DeaBuildResult")
        .def_readonly("instance", &DeaBuildResult::instance)
        .def_readonly("cells", &DeaBuildResult::cells);

    m.def(
        "build_dea_instance",
        [](const Panel& panel, const DeaInstanceSpec& spec,
           std::optional<DeflatorTable> deflators) {
            return build_dea_instance(panel, spec, deflators ? &*deflators : nullptr);
        },
        py::arg("panel"), py::arg("spec"), py::arg("deflators") = std::nullopt);

    // --- report helpers ---
    m.def("format_full", &format_full, py::arg("value"));
    m.def("format_paper", &format_paper, py::arg("value"), py::arg("decimals"));
    m.def("relative_error", &relative_error, py::arg("actual"), py::arg("predicted"));
}
