#include "greydea/cli.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"

#include "greydea/dataset.hpp"
#include "greydea/dea.hpp"
#include "greydea/errors.hpp"
#include "greydea/grey.hpp"
#include "greydea/report.hpp"
#include "greydea/version.hpp"

namespace greydea {

namespace {

using nlohmann::json;

struct RunConfig {
    std::string subcommand;
    std::string input;
    std::string deflators;
    std::string output;
    std::string format = "json";
    std::string round = "full";
    std::string orientation = "input";
    std::string rts = "vrs";
    std::string slack_stage = "two-stage";
    std::string mapping = "paper";
    std::string zero_policy = "reject";
    std::vector<std::string> outputs;
    std::vector<std::string> inputs;
    std::vector<std::string> dmus;
    std::vector<int> dmu_years;
    std::vector<std::string> regions;
    std::string region;
    int year = 0;
    std::string indicator;
    std::string energy_class;
    std::string sector;
    std::vector<int> years;
    int train_len = 0;
    std::string method = "gm11";
    std::string group_by;
    std::string mode = "levels";
    double value = std::numeric_limits<double>::quiet_NaN();
    int value_year = 0;
    std::string unit;
    int year_base = 1900;
    bool deflate_values = false;
    bool print_config = false;
};

json config_json(const RunConfig& cfg) {
    json j;
    j["subcommand"] = cfg.subcommand;
    j["input"] = cfg.input;
    j["deflators"] = cfg.deflators;
    j["output"] = cfg.output;
    j["format"] = cfg.format;
    j["round"] = cfg.round;
    j["orientation"] = cfg.orientation;
    j["rts"] = cfg.rts;
    j["slack-stage"] = cfg.slack_stage;
    j["mapping"] = cfg.mapping;
    j["zero-policy"] = cfg.zero_policy;
    j["outputs"] = cfg.outputs;
    j["inputs"] = cfg.inputs;
    j["dmus"] = cfg.dmus;
    j["dmu-years"] = cfg.dmu_years;
    j["regions"] = cfg.regions;
    j["region"] = cfg.region;
    j["year"] = cfg.year;
    j["indicator"] = cfg.indicator;
    j["class"] = cfg.energy_class;
    j["sector"] = cfg.sector;
    j["years"] = cfg.years;
    j["train-len"] = cfg.train_len;
    j["method"] = cfg.method;
    j["group-by"] = cfg.group_by;
    j["mode"] = cfg.mode;
    if (std::isnan(cfg.value)) {
        j["value"] = nullptr;
    } else {
        j["value"] = cfg.value;
    }
    j["value-year"] = cfg.value_year;
    j["unit"] = cfg.unit;
    j["year-base"] = cfg.year_base;
    j["deflate"] = cfg.deflate_values;
    return j;
}

void apply_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ValidationError("config file '" + path + "': " + e.what());
    }
    if (!j.is_object()) throw ValidationError("config file must hold a JSON object");
    try {
        for (const auto& [key, val] : j.items()) {
            if (key == "input") cfg.input = val.get<std::string>();
            else if (key == "deflators") cfg.deflators = val.get<std::string>();
            else if (key == "output") cfg.output = val.get<std::string>();
            else if (key == "format") cfg.format = val.get<std::string>();
            else if (key == "round") cfg.round = val.get<std::string>();
            else if (key == "orientation") cfg.orientation = val.get<std::string>();
            else if (key == "rts") cfg.rts = val.get<std::string>();
            else if (key == "slack-stage") cfg.slack_stage = val.get<std::string>();
            else if (key == "mapping") cfg.mapping = val.get<std::string>();
            else if (key == "zero-policy") cfg.zero_policy = val.get<std::string>();
            else if (key == "outputs") cfg.outputs = val.get<std::vector<std::string>>();
            else if (key == "inputs") cfg.inputs = val.get<std::vector<std::string>>();
            else if (key == "dmus") cfg.dmus = val.get<std::vector<std::string>>();
            else if (key == "dmu-years") cfg.dmu_years = val.get<std::vector<int>>();
            else if (key == "regions") cfg.regions = val.get<std::vector<std::string>>();
            else if (key == "region") cfg.region = val.get<std::string>();
            else if (key == "year") cfg.year = val.get<int>();
            else if (key == "indicator") cfg.indicator = val.get<std::string>();
            else if (key == "class") cfg.energy_class = val.get<std::string>();
            else if (key == "sector") cfg.sector = val.get<std::string>();
            else if (key == "years") cfg.years = val.get<std::vector<int>>();
            else if (key == "train-len") cfg.train_len = val.get<int>();
            else if (key == "method") cfg.method = val.get<std::string>();
            else if (key == "group-by") cfg.group_by = val.get<std::string>();
            else if (key == "mode") cfg.mode = val.get<std::string>();
            else if (key == "value") cfg.value = val.get<double>();
            else if (key == "value-year") cfg.value_year = val.get<int>();
            else if (key == "unit") cfg.unit = val.get<std::string>();
            else if (key == "year-base") cfg.year_base = val.get<int>();
            else if (key == "deflate") cfg.deflate_values = val.get<bool>();
            else throw ValidationError("unknown config key '" + key + "'");
        }
    } catch (const json::exception& e) {
        throw ValidationError("config file '" + path + "': " + e.what());
    }
}

Orientation parse_orientation(const std::string& s) {
    if (s == "input") return Orientation::Input;
    if (s == "output") return Orientation::Output;
    throw ValidationError("orientation must be 'input' or 'output', got '" + s + "'");
}

ReturnsToScale parse_rts(const std::string& s) {
    if (s == "crs") return ReturnsToScale::CRS;
    if (s == "vrs") return ReturnsToScale::VRS;
    throw ValidationError("rts must be 'crs' or 'vrs', got '" + s + "'");
}

SlackStage parse_slack_stage(const std::string& s) {
    if (s == "radial") return SlackStage::RadialOnly;
    if (s == "two-stage") return SlackStage::TwoStage;
    throw ValidationError("slack-stage must be 'radial' or 'two-stage', got '" + s + "'");
}

TaxonomyMapping parse_mapping(const std::string& s) {
    if (s == "paper") return TaxonomyMapping::PaperVerbatim;
    if (s == "corrected") return TaxonomyMapping::Corrected;
    throw ValidationError("mapping must be 'paper' or 'corrected', got '" + s + "'");
}

ZeroInputPolicy parse_zero_policy(const std::string& s) {
    if (s == "reject") return ZeroInputPolicy::Reject;
    if (s == "replace-zeros") return ZeroInputPolicy::ReplaceZeros;
    throw ValidationError("zero-policy must be 'reject' or 'replace-zeros', got '" + s + "'");
}

ForecastMethod parse_method(const std::string& s) {
    if (s == "gm11") return ForecastMethod::GM11;
    if (s == "linear") return ForecastMethod::Linear;
    throw ValidationError("method must be 'gm11' or 'linear', got '" + s + "'");
}

EnergyClass parse_class(const std::string& s) {
    if (s == "CRN") return EnergyClass::CRN;
    if (s == "CNRN") return EnergyClass::CNRN;
    if (s == "NCNRN") return EnergyClass::NCNRN;
    if (s == "NCRN") return EnergyClass::NCRN;
    throw ValidationError("class must be one of CRN, CNRN, NCNRN, NCRN; got '" + s + "'");
}

void check_member(const std::string& flag, const std::string& value,
                  const std::vector<std::string>& allowed) {
    for (const auto& a : allowed) {
        if (a == value) return;
    }
    std::string joined;
    for (const auto& a : allowed) joined += (joined.empty() ? "" : ", ") + a;
    throw ValidationError(flag + " must be one of {" + joined + "}, got '" + value + "'");
}

struct Report {
    json body;
    std::vector<std::vector<std::string>> csv_rows;
};

// Paper rounding is a display mode: 3 decimals for scores and data values,
// 4 for relative errors, trailing zeros stripped. Full precision otherwise.
struct ValueFormatter {
    bool paper = false;

    std::string text(double v, int decimals = 3) const {
        return paper ? format_paper(v, decimals) : format_full(v);
    }
    json number(double v, int decimals = 3) const {
        return paper ? json(round_to(v, decimals)) : json(v);
    }
};

std::string rts_label(RtsClass cls) {
    switch (cls) {
        case RtsClass::Increasing: return "irs";
        case RtsClass::Decreasing: return "drs";
        case RtsClass::Constant: return "-";
    }
    return "?";
}

std::string iso_utc_now() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

Panel load_input_panel(const RunConfig& cfg) {
    if (cfg.input.empty()) throw ValidationError("--input is required");
    return load_panel_file(cfg.input);
}

DeflatorTable load_deflator_table(const RunConfig& cfg) {
    if (cfg.deflators.empty()) throw ValidationError("--deflators is required");
    return load_deflators_file(cfg.deflators);
}

// Member indicators for a series or plot group selection.
std::vector<std::string> resolve_group(const Panel& panel, const std::string& region,
                                       const RunConfig& cfg) {
    int selectors = 0;
    selectors += !cfg.indicator.empty();
    selectors += !cfg.energy_class.empty();
    selectors += !cfg.sector.empty();
    if (selectors != 1) {
        throw ValidationError("choose exactly one of --indicator, --class, --sector");
    }
    if (!cfg.indicator.empty()) return {cfg.indicator};
    if (!cfg.sector.empty()) {
        check_member("--sector", cfg.sector, sector_codes());
        return {cfg.sector};
    }
    const EnergyClass cls = parse_class(cfg.energy_class);
    const std::vector<std::string> members = class_members(cls, parse_mapping(cfg.mapping));
    std::vector<std::string> present;
    const std::vector<std::string> have = panel.indicators(region);
    for (const auto& m : members) {
        if (std::find(have.begin(), have.end(), m) != have.end()) present.push_back(m);
    }
    if (present.empty()) {
        throw ValidationError("region '" + region + "' has no indicator of class " +
                              cfg.energy_class);
    }
    return present;
}

Series resolve_series(const Panel& panel, const RunConfig& cfg) {
    if (cfg.region.empty()) throw ValidationError("--region is required");
    return aggregate(panel, cfg.region, resolve_group(panel, cfg.region, cfg));
}

Report cmd_gm11(const RunConfig& cfg) {
    const Panel panel = load_input_panel(cfg);
    const Series series = resolve_series(panel, cfg);
    for (int target : cfg.years) {
        if (target <= series.last_year()) {
            throw ValidationError("forecast year " + std::to_string(target) +
                                  " is not after the last observed year " +
                                  std::to_string(series.last_year()));
        }
    }
    const ForecastMethod method = parse_method(cfg.method);
    const int n = static_cast<int>(series.values.size());

    // Fitted values over the sample plus predictions at the requested years.
    std::vector<double> fitted(n);
    std::vector<std::pair<int, double>> forecasts;
    json model_json;
    if (method == ForecastMethod::GM11) {
        const Gm11Model model = fit_gm11(series);
        int horizon = 0;
        for (int target : cfg.years) horizon = std::max(horizon, target - series.last_year());
        const std::vector<double> levels = fitted_and_forecast(model, horizon);
        for (int i = 0; i < n; ++i) fitted[i] = levels[i];
        for (int target : cfg.years) forecasts.emplace_back(target, levels[target - series.start_year]);
        model_json = {{"method", "gm11"},
                      {"a", json(model.a)},
                      {"b", json(model.b)},
                      {"degenerate", model.degenerate},
                      {"class_ratio_ok", model.class_ratio_ok}};
    } else {
        const LinearModel model = fit_linear(series);
        for (int i = 0; i < n; ++i) fitted[i] = model.predict(series.year_at(i));
        for (int target : cfg.years) forecasts.emplace_back(target, model.predict(target));
        model_json = {{"method", "linear"},
                      {"slope", json(model.slope)},
                      {"intercept", json(model.intercept)}};
    }

    const ValueFormatter fmt{cfg.round == "paper"};
    Report report;
    report.body["region"] = cfg.region;
    report.body["unit"] = series.unit;
    report.body["start_year"] = series.start_year;
    report.body["model"] = model_json;
    json fitted_json = json::array();
    for (int i = 0; i < n; ++i) {
        fitted_json.push_back({{"year", series.year_at(i)},
                               {"actual", fmt.number(series.values[i])},
                               {"fitted", fmt.number(fitted[i])}});
    }
    report.body["fitted"] = fitted_json;
    json forecast_json = json::array();
    for (const auto& [year, value] : forecasts) {
        forecast_json.push_back({{"year", year}, {"value", fmt.number(value)}});
    }
    report.body["forecasts"] = forecast_json;

    report.csv_rows.push_back({"record", "year", "value"});
    for (const auto& [key, value] : model_json.items()) {
        if (value.is_number()) {
            report.csv_rows.push_back({key, "", format_full(value.get<double>())});
        } else if (value.is_boolean()) {
            report.csv_rows.push_back({key, "", value.get<bool>() ? "1" : "0"});
        } else {
            report.csv_rows.push_back({key, "", value.get<std::string>()});
        }
    }
    for (int i = 0; i < n; ++i) {
        report.csv_rows.push_back(
            {"actual", std::to_string(series.year_at(i)), fmt.text(series.values[i])});
    }
    for (int i = 0; i < n; ++i) {
        report.csv_rows.push_back(
            {"fitted", std::to_string(series.year_at(i)), fmt.text(fitted[i])});
    }
    for (const auto& [year, value] : forecasts) {
        report.csv_rows.push_back({"forecast", std::to_string(year), fmt.text(value)});
    }
    return report;
}

Report cmd_backtest(const RunConfig& cfg) {
    const Panel panel = load_input_panel(cfg);
    const Series series = resolve_series(panel, cfg);
    const BacktestReport bt = backtest(series, cfg.train_len, parse_method(cfg.method));

    const ValueFormatter fmt{cfg.round == "paper"};
    Report report;
    report.body["method"] = cfg.method;
    report.body["train_len"] = cfg.train_len;
    json rows = json::array();
    for (const auto& row : bt.rows) {
        rows.push_back({{"year", row.year},
                        {"actual", fmt.number(row.actual)},
                        {"predicted", fmt.number(row.predicted)},
                        {"relative_error", fmt.number(row.relative_error, 4)}});
    }
    report.body["rows"] = rows;
    report.body["mean_relative_error"] = fmt.number(bt.mean_relative_error, 4);

    report.csv_rows.push_back({"year", "actual", "predicted", "relative_error"});
    for (const auto& row : bt.rows) {
        report.csv_rows.push_back({std::to_string(row.year), fmt.text(row.actual),
                                   fmt.text(row.predicted), fmt.text(row.relative_error, 4)});
    }
    report.csv_rows.push_back({"mean", "", "", fmt.text(bt.mean_relative_error, 4)});
    return report;
}

Report cmd_dea(const RunConfig& cfg) {
    const Panel panel = load_input_panel(cfg);

    DeaInstanceSpec spec;
    spec.output_indicators = cfg.outputs;
    spec.input_indicators = cfg.inputs;
    spec.deflate = cfg.deflate_values;
    spec.zero_policy = parse_zero_policy(cfg.zero_policy);
    if (!cfg.dmu_years.empty()) {
        spec.dmu_years = cfg.dmu_years;
        spec.region = cfg.region;
        if (spec.region.empty()) throw ValidationError("--region is required with --dmu-years");
    } else {
        if (cfg.year == 0) throw ValidationError("--year is required when DMUs are regions");
        spec.year = cfg.year;
        spec.dmu_regions = cfg.dmus.empty() ? panel.regions() : cfg.dmus;
        if (spec.dmu_regions.empty()) throw ValidationError("DMU list is empty");
    }

    std::optional<DeflatorTable> deflators;
    if (spec.deflate) deflators.emplace(load_deflator_table(cfg));
    const DeaBuildResult built =
        build_dea_instance(panel, spec, deflators ? &*deflators : nullptr);
    const DeaInstance& instance = built.instance;

    DeaOptions options;
    options.orientation = parse_orientation(cfg.orientation);
    options.returns_to_scale = parse_rts(cfg.rts);
    options.slack_stage = parse_slack_stage(cfg.slack_stage);

    const ValueFormatter fmt{cfg.round == "paper"};
    Report report;
    json rows = json::array();

    std::vector<std::string> header = {"dmu",        "score", "te",  "pte",
                                       "se",         "rts",   "rts_boundary", "sum_lambda",
                                       "efficient"};
    for (const auto& name : instance.input_names()) header.push_back("slack_in_" + name);
    for (const auto& name : instance.output_names()) header.push_back("slack_out_" + name);
    for (const auto& name : instance.input_names()) header.push_back("target_in_" + name);
    for (const auto& name : instance.output_names()) header.push_back("target_out_" + name);
    report.csv_rows.push_back(header);

    for (int j = 0; j < instance.n_dmus(); ++j) {
        const DeaScore score = evaluate_dmu(instance, j, options);
        const EfficiencyDecomposition decomp = decompose(instance, j, options.orientation);
        const ProjectionTarget target = project(instance, score);

        json row;
        row["dmu"] = instance.dmu_names()[j];
        row["score"] = fmt.number(score.score);
        row["te"] = fmt.number(decomp.te);
        row["pte"] = fmt.number(decomp.pte);
        row["se"] = fmt.number(decomp.se);
        row["rts"] = rts_label(decomp.rts_class);
        row["rts_boundary"] = decomp.rts_boundary;
        row["sum_lambda"] = fmt.number(score.sum_lambda);
        row["efficient"] = score.efficient;
        json in_slacks, out_slacks, t_in, t_out;
        for (int i = 0; i < instance.n_inputs(); ++i) {
            in_slacks[instance.input_names()[i]] = fmt.number(score.input_slacks(i));
            t_in[instance.input_names()[i]] = fmt.number(target.target_inputs(i));
        }
        for (int r = 0; r < instance.n_outputs(); ++r) {
            out_slacks[instance.output_names()[r]] = fmt.number(score.output_slacks(r));
            t_out[instance.output_names()[r]] = fmt.number(target.target_outputs(r));
        }
        row["input_slacks"] = in_slacks;
        row["output_slacks"] = out_slacks;
        row["target_inputs"] = t_in;
        row["target_outputs"] = t_out;
        rows.push_back(row);

        std::vector<std::string> csv_row = {instance.dmu_names()[j],
                                            fmt.text(score.score),
                                            fmt.text(decomp.te),
                                            fmt.text(decomp.pte),
                                            fmt.text(decomp.se),
                                            rts_label(decomp.rts_class),
                                            decomp.rts_boundary ? "1" : "0",
                                            fmt.text(score.sum_lambda),
                                            score.efficient ? "1" : "0"};
        for (int i = 0; i < instance.n_inputs(); ++i) csv_row.push_back(fmt.text(score.input_slacks(i)));
        for (int r = 0; r < instance.n_outputs(); ++r) csv_row.push_back(fmt.text(score.output_slacks(r)));
        for (int i = 0; i < instance.n_inputs(); ++i) csv_row.push_back(fmt.text(target.target_inputs(i)));
        for (int r = 0; r < instance.n_outputs(); ++r) csv_row.push_back(fmt.text(target.target_outputs(r)));
        report.csv_rows.push_back(csv_row);
    }
    report.body["rows"] = rows;
    report.body["orientation"] = cfg.orientation;
    report.body["rts"] = cfg.rts;
    return report;
}

Report cmd_plotdata(const RunConfig& cfg) {
    const Panel panel = load_input_panel(cfg);
    check_member("--group-by", cfg.group_by, {"class", "sector"});
    check_member("--mode", cfg.mode, {"levels", "shares"});

    const std::vector<std::string> regions =
        cfg.regions.empty() ? panel.regions() : cfg.regions;
    if (regions.empty()) throw ValidationError("panel has no regions");

    struct GroupSeries {
        std::string region;
        std::string group;
        Series series;
    };
    std::vector<GroupSeries> groups;

    for (const auto& region : regions) {
        const std::vector<std::string> have = panel.indicators(region);

        std::vector<std::pair<std::string, std::vector<std::string>>> selections;
        if (cfg.group_by == "class") {
            const TaxonomyMapping mapping = parse_mapping(cfg.mapping);
            for (EnergyClass cls : {EnergyClass::CRN, EnergyClass::CNRN, EnergyClass::NCNRN,
                                    EnergyClass::NCRN}) {
                std::vector<std::string> members;
                for (const auto& m : class_members(cls, mapping)) {
                    if (std::find(have.begin(), have.end(), m) != have.end()) members.push_back(m);
                }
                if (!members.empty()) selections.emplace_back(to_string(cls), members);
            }
        } else {
            for (const auto& code : sector_codes()) {
                if (std::find(have.begin(), have.end(), code) != have.end()) {
                    selections.emplace_back(code, std::vector<std::string>{code});
                }
            }
        }
        if (selections.empty()) {
            throw ValidationError("region '" + region + "' has no indicator matching --group-by " +
                                  cfg.group_by);
        }

        // One shared year span per region so shares line up.
        int lo = 0, hi = 0;
        bool any = false;
        for (const auto& [group, members] : selections) {
            for (const auto& m : members) {
                for (int y : panel.years(region, m)) {
                    if (!any) {
                        lo = hi = y;
                        any = true;
                    } else {
                        lo = std::min(lo, y);
                        hi = std::max(hi, y);
                    }
                }
            }
        }
        for (const auto& [group, members] : selections) {
            groups.push_back({region, group, aggregate(panel, region, members, lo, hi)});
        }
    }

    const ValueFormatter fmt{cfg.round == "paper"};
    Report report;
    json rows = json::array();
    report.csv_rows.push_back({"region", "group", "year", "value"});

    auto emit_row = [&](const std::string& region, const std::string& group, int year, double v) {
        rows.push_back({{"region", region},
                        {"group", group},
                        {"year", year},
                        {"value", fmt.number(v, 6)}});
        report.csv_rows.push_back(
            {region, group, std::to_string(year), fmt.text(v, 6)});
    };

    if (cfg.mode == "levels") {
        for (const auto& g : groups) {
            for (std::size_t i = 0; i < g.series.values.size(); ++i) {
                emit_row(g.region, g.group, g.series.year_at(static_cast<int>(i)),
                         g.series.values[i]);
            }
        }
    } else {
        for (const auto& region : regions) {
            std::vector<const GroupSeries*> local;
            for (const auto& g : groups) {
                if (g.region == region) local.push_back(&g);
            }
            const std::size_t n_years = local.front()->series.values.size();
            for (std::size_t i = 0; i < n_years; ++i) {
                double total = 0.0;
                for (const GroupSeries* g : local) total += g->series.values[i];
                if (total <= 0.0) {
                    throw ValidationError("total for region '" + region + "' in year " +
                                          std::to_string(local.front()->series.year_at(
                                              static_cast<int>(i))) +
                                          " is zero; shares are undefined");
                }
                for (const GroupSeries* g : local) {
                    emit_row(g->region, g->group, g->series.year_at(static_cast<int>(i)),
                             g->series.values[i] / total);
                }
            }
        }
    }
    report.body["rows"] = rows;
    return report;
}

json observation_json(const Observation& obs, const ValueFormatter& fmt) {
    return {{"region", obs.region},
            {"year", obs.year},
            {"indicator", obs.indicator},
            {"value", fmt.number(obs.value, 6)},
            {"unit", obs.unit}};
}

void panel_report(const Panel& panel, const ValueFormatter& fmt, Report& report) {
    json rows = json::array();
    report.csv_rows.push_back({"region", "year", "indicator", "value", "unit"});
    for (const auto& [key, obs] : panel) {
        rows.push_back(observation_json(obs, fmt));
        report.csv_rows.push_back({obs.region, std::to_string(obs.year), obs.indicator,
                                   fmt.text(obs.value, 6), obs.unit});
    }
    report.body["rows"] = rows;
    report.body["row_count"] = panel.size();
}

Report cmd_deflate(const RunConfig& cfg) {
    const DeflatorTable table = load_deflator_table(cfg);
    const ValueFormatter fmt{cfg.round == "paper"};
    Report report;

    if (!std::isnan(cfg.value)) {
        if (cfg.value_year == 0) throw ValidationError("--value-year is required with --value");
        const double multiplier = table.multiplier(cfg.value_year);
        const double real = deflate(cfg.value, cfg.value_year, table);
        report.body = {{"year", cfg.value_year},
                       {"nominal", fmt.number(cfg.value, 6)},
                       {"multiplier", fmt.number(multiplier, 6)},
                       {"real", fmt.number(real, 6)}};
        report.csv_rows.push_back({"year", "nominal", "multiplier", "real"});
        report.csv_rows.push_back({std::to_string(cfg.value_year), fmt.text(cfg.value, 6),
                                   fmt.text(multiplier, 6), fmt.text(real, 6)});
        return report;
    }

    const Panel panel = load_input_panel(cfg);
    Panel deflated;
    for (const auto& [key, obs] : panel) {
        Observation out = obs;
        if (is_dollar_unit(obs.unit)) {
            out.value = deflate(obs.value, obs.year, table);
            out.unit += " (base " + std::to_string(DeflatorTable::kBaseYear) + ")";
        }
        deflated.add(std::move(out));
    }
    panel_report(deflated, fmt, report);
    return report;
}

Report cmd_convert(const RunConfig& cfg) {
    if (cfg.input.empty()) throw ValidationError("--input is required");
    if (cfg.indicator.empty()) throw ValidationError("--indicator is required");
    if (cfg.unit.empty()) throw ValidationError("--unit is required");
    std::ifstream in(cfg.input);
    if (!in) throw ValidationError("cannot open input file '" + cfg.input + "'");
    const Panel panel = wide_to_long(in, cfg.indicator, cfg.unit, cfg.year_base);

    const ValueFormatter fmt{cfg.round == "paper"};
    Report report;
    panel_report(panel, fmt, report);
    return report;
}

void emit_report(const RunConfig& cfg, const Report& report) {
    std::string text;
    if (cfg.format == "json") {
        json doc;
        doc["metadata"] = {{"tool", "greydea"},
                           {"version", kVersion},
                           {"config", config_json(cfg)},
                           {"timestamp", iso_utc_now()}};
        doc["body"] = report.body;
        text = doc.dump(2) + "\n";
    } else if (cfg.format == "csv") {
        text = csv_join(report.csv_rows);
    } else {
        throw ValidationError("format must be 'json' or 'csv', got '" + cfg.format + "'");
    }

    if (cfg.output.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(cfg.output, std::ios::binary);
        if (!out) throw ValidationError("cannot open output file '" + cfg.output + "'");
        out << text;
    }
}

void emit_error(const std::string& type, const std::string& message) {
    json err = {{"error", {{"type", type}, {"message", message}}}};
    std::cerr << err.dump() << "\n";
}

} // namespace

int run_cli(const std::vector<std::string>& args) {
    RunConfig cfg;

    // The config file seeds the defaults; explicit flags override it below.
    try {
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (args[i] == "--config" && i + 1 < args.size()) {
                apply_config_file(cfg, args[i + 1]);
            } else if (args[i].rfind("--config=", 0) == 0) {
                apply_config_file(cfg, args[i].substr(9));
            }
        }
    } catch (const ValidationError& e) {
        emit_error("validation", e.what());
        return 2;
    }

    CLI::App app{"Relative-efficiency scoring and grey forecasting over energy panel data"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::string config_path;  // consumed above; declared so CLI11 accepts it
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file; flags take precedence");
        sub->add_flag("--print-config", cfg.print_config,
                      "Echo the resolved configuration and exit");
        sub->add_option("--format", cfg.format, "Report format: json or csv");
        sub->add_option("--round", cfg.round, "Display rounding: full or paper");
        sub->add_option("--output", cfg.output, "Output path (stdout when omitted)");
    };

    CLI::App* dea = app.add_subcommand("dea", "Score DMUs and decompose efficiency");
    add_common(dea);
    dea->add_option("--input", cfg.input, "Tidy panel CSV");
    dea->add_option("--outputs", cfg.outputs, "Output indicator codes")->delimiter(',');
    dea->add_option("--inputs", cfg.inputs, "Input indicator codes")->delimiter(',');
    dea->add_option("--dmus", cfg.dmus, "Regions acting as DMUs (default: all)")->delimiter(',');
    dea->add_option("--year", cfg.year, "Observation year when DMUs are regions");
    dea->add_option("--dmu-years", cfg.dmu_years, "Years acting as DMUs")->delimiter(',');
    dea->add_option("--region", cfg.region, "Region when DMUs are years");
    dea->add_option("--orientation", cfg.orientation, "input or output");
    dea->add_option("--rts", cfg.rts, "crs or vrs");
    dea->add_option("--slack-stage", cfg.slack_stage, "radial or two-stage");
    dea->add_option("--zero-policy", cfg.zero_policy, "reject or replace-zeros");
    dea->add_flag("--deflate", cfg.deflate_values, "Deflate dollar-unit cells");
    dea->add_option("--deflators", cfg.deflators, "Deflator table CSV");

    CLI::App* gm11 = app.add_subcommand("gm11", "Fit a grey model and forecast");
    add_common(gm11);
    gm11->add_option("--input", cfg.input, "Tidy panel CSV");
    gm11->add_option("--region", cfg.region, "Region to aggregate");
    gm11->add_option("--indicator", cfg.indicator, "Single indicator code");
    gm11->add_option("--class", cfg.energy_class, "Energy class to aggregate");
    gm11->add_option("--sector", cfg.sector, "Sector to aggregate");
    gm11->add_option("--mapping", cfg.mapping, "paper or corrected taxonomy");
    gm11->add_option("--years", cfg.years, "Forecast target years")->delimiter(',');
    gm11->add_option("--method", cfg.method, "gm11 or linear");

    CLI::App* backtest = app.add_subcommand("backtest", "Holdout test of a forecasting method");
    add_common(backtest);
    backtest->add_option("--input", cfg.input, "Tidy panel CSV");
    backtest->add_option("--region", cfg.region, "Region to aggregate");
    backtest->add_option("--indicator", cfg.indicator, "Single indicator code");
    backtest->add_option("--class", cfg.energy_class, "Energy class to aggregate");
    backtest->add_option("--sector", cfg.sector, "Sector to aggregate");
    backtest->add_option("--mapping", cfg.mapping, "paper or corrected taxonomy");
    backtest->add_option("--train-len", cfg.train_len, "Training prefix length");
    backtest->add_option("--method", cfg.method, "gm11 or linear");

    CLI::App* plotdata = app.add_subcommand("plotdata", "Tidy line/pie chart data");
    add_common(plotdata);
    plotdata->add_option("--input", cfg.input, "Tidy panel CSV");
    plotdata->add_option("--group-by", cfg.group_by, "class or sector");
    plotdata->add_option("--mapping", cfg.mapping, "paper or corrected taxonomy");
    plotdata->add_option("--mode", cfg.mode, "levels or shares");
    plotdata->add_option("--regions", cfg.regions, "Regions to include (default: all)")
        ->delimiter(',');

    CLI::App* deflate_cmd = app.add_subcommand("deflate", "Convert nominal dollars to base-year dollars");
    add_common(deflate_cmd);
    deflate_cmd->add_option("--deflators", cfg.deflators, "Deflator table CSV");
    deflate_cmd->add_option("--value", cfg.value, "Single nominal value to deflate");
    deflate_cmd->add_option("--value-year", cfg.value_year, "Year of the nominal value");
    deflate_cmd->add_option("--input", cfg.input, "Panel whose dollar cells get deflated");

    CLI::App* convert = app.add_subcommand("convert", "Wide year-by-region matrix to tidy rows");
    add_common(convert);
    convert->add_option("--input", cfg.input, "Wide CSV (first column years)");
    convert->add_option("--indicator", cfg.indicator, "Indicator code to stamp");
    convert->add_option("--unit", cfg.unit, "Unit label to stamp");
    convert->add_option("--year-base", cfg.year_base, "Offset added to two-digit years");

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("greydea");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        emit_error("validation", e.what());
        return 2;
    }

    try {
        for (CLI::App* sub : {dea, gm11, backtest, plotdata, deflate_cmd, convert}) {
            if (sub->parsed()) cfg.subcommand = sub->get_name();
        }
        check_member("--format", cfg.format, {"json", "csv"});
        check_member("--round", cfg.round, {"full", "paper"});

        if (cfg.print_config) {
            std::cout << config_json(cfg).dump(2) << "\n";
            return 0;
        }

        Report report;
        if (cfg.subcommand == "dea") report = cmd_dea(cfg);
        else if (cfg.subcommand == "gm11") report = cmd_gm11(cfg);
        else if (cfg.subcommand == "backtest") report = cmd_backtest(cfg);
        else if (cfg.subcommand == "plotdata") report = cmd_plotdata(cfg);
        else if (cfg.subcommand == "deflate") report = cmd_deflate(cfg);
        else if (cfg.subcommand == "convert") report = cmd_convert(cfg);
        else throw ValidationError("no subcommand selected");

        emit_report(cfg, report);
        return 0;
    } catch (const ValidationError& e) {
        emit_error("validation", e.what());
        return 2;
    } catch (const FitError& e) {
        emit_error("numerical", e.what());
        return 3;
    } catch (const SolverError& e) {
        emit_error("numerical", e.what());
        return 3;
    }
}

} // namespace greydea
