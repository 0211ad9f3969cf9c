#include "greydea/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "greydea/errors.hpp"
#include "greydea/report.hpp"

namespace greydea {

namespace {

std::string key_string(const std::string& region, const std::string& indicator, int year) {
    return "(" + region + ", " + indicator + ", " + std::to_string(year) + ")";
}

// Minimal delimited-text reader: quoted fields with doubled quotes, one
// record per line.
std::vector<std::string> split_record(const std::string& line, char delim) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                field.push_back('"');
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                field.push_back(c);
            }
        } else if (c == '"' && field.empty()) {
            quoted = true;
        } else if (c == delim) {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c != '\r') {
            field.push_back(c);
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

double parse_number(const std::string& text, int line_no, const std::string& column) {
    double value = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end || text.empty()) {
        throw ValidationError("malformed number '" + text + "' in column '" + column +
                              "' at line " + std::to_string(line_no));
    }
    return value;
}

int parse_year(const std::string& text, int line_no, const std::string& column) {
    int value = 0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end || text.empty()) {
        throw ValidationError("malformed year '" + text + "' in column '" + column +
                              "' at line " + std::to_string(line_no));
    }
    return value;
}

int find_column(const std::vector<std::string>& header, const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return static_cast<int>(i);
    }
    throw ValidationError("unknown column '" + name + "'; header has: " +
                          [&] {
                              std::string joined;
                              for (const auto& h : header) joined += (joined.empty() ? "" : ", ") + h;
                              return joined;
                          }());
}

char detect_delimiter(const std::string& header_line) {
    return header_line.find('\t') != std::string::npos ? '\t' : ',';
}

struct Taxonomy {
    std::vector<std::pair<std::string, EnergyClass>> paper;
};

const Taxonomy& taxonomy() {
    static const Taxonomy t{{
        {"electricity", EnergyClass::CRN},
        {"geothermal", EnergyClass::CRN},
        {"ethanol", EnergyClass::CRN},
        {"solar", EnergyClass::CRN},
        {"wind", EnergyClass::CRN},
        {"hydropower", EnergyClass::CRN},
        {"natural_gas", EnergyClass::CNRN},
        {"wood", EnergyClass::NCNRN},
        {"waste", EnergyClass::NCNRN},
        {"coal", EnergyClass::NCRN},
        {"oil", EnergyClass::NCRN},
        {"asphalt", EnergyClass::NCRN},
        {"gasoline", EnergyClass::NCRN},
        {"lubricants", EnergyClass::NCRN},
    }};
    return t;
}

EnergyClass apply_mapping(EnergyClass paper_class, TaxonomyMapping mapping) {
    if (mapping == TaxonomyMapping::PaperVerbatim) return paper_class;
    // Corrected mapping swaps the renewability of the two non-clean groups.
    if (paper_class == EnergyClass::NCRN) return EnergyClass::NCNRN;
    if (paper_class == EnergyClass::NCNRN) return EnergyClass::NCRN;
    return paper_class;
}

}  // namespace

void Panel::add(Observation obs) {
    if (obs.year < 1900 || obs.year > 2100) {
        throw ValidationError("year " + std::to_string(obs.year) + " for " +
                              key_string(obs.region, obs.indicator, obs.year) +
                              " is outside [1900, 2100]");
    }
    if (!std::isfinite(obs.value)) {
        throw ValidationError("non-finite value for " +
                              key_string(obs.region, obs.indicator, obs.year));
    }
    const Key key{obs.region, obs.indicator, obs.year};
    auto unit_it = indicator_units_.find(obs.indicator);
    if (unit_it != indicator_units_.end() && unit_it->second != obs.unit) {
        throw ValidationError("indicator '" + obs.indicator + "' mixes units '" +
                              unit_it->second + "' and '" + obs.unit + "'");
    }
    if (!rows_.emplace(key, obs).second) {
        throw ValidationError("duplicate key " + key_string(obs.region, obs.indicator, obs.year));
    }
    if (unit_it == indicator_units_.end()) indicator_units_.emplace(obs.indicator, obs.unit);
}

const Observation* Panel::find(const std::string& region, const std::string& indicator,
                               int year) const {
    const auto it = rows_.find(Key{region, indicator, year});
    return it == rows_.end() ? nullptr : &it->second;
}

std::vector<std::string> Panel::regions() const {
    std::set<std::string> unique;
    for (const auto& [key, obs] : rows_) unique.insert(obs.region);
    return {unique.begin(), unique.end()};
}

std::vector<std::string> Panel::indicators() const {
    std::set<std::string> unique;
    for (const auto& [key, obs] : rows_) unique.insert(obs.indicator);
    return {unique.begin(), unique.end()};
}

std::vector<std::string> Panel::indicators(const std::string& region) const {
    std::set<std::string> unique;
    for (const auto& [key, obs] : rows_) {
        if (obs.region == region) unique.insert(obs.indicator);
    }
    return {unique.begin(), unique.end()};
}

std::vector<int> Panel::years(const std::string& region, const std::string& indicator) const {
    std::vector<int> out;
    for (const auto& [key, obs] : rows_) {
        if (obs.region == region && obs.indicator == indicator) out.push_back(obs.year);
    }
    std::sort(out.begin(), out.end());
    return out;
}

Panel load_panel(std::istream& source, const ColumnMapping& mapping) {
    std::string header_line;
    if (!std::getline(source, header_line)) {
        throw ValidationError("input has no header row");
    }
    const char delim = detect_delimiter(header_line);
    const std::vector<std::string> header = split_record(header_line, delim);
    const int region_col = find_column(header, mapping.region);
    const int year_col = find_column(header, mapping.year);
    const int indicator_col = find_column(header, mapping.indicator);
    const int value_col = find_column(header, mapping.value);
    const int unit_col = find_column(header, mapping.unit);

    Panel panel;
    std::vector<std::string> duplicates;
    std::string line;
    int line_no = 1;
    while (std::getline(source, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> fields = split_record(line, delim);
        if (static_cast<int>(fields.size()) <= std::max({region_col, year_col, indicator_col,
                                                         value_col, unit_col})) {
            throw ValidationError("line " + std::to_string(line_no) + " has " +
                                  std::to_string(fields.size()) + " fields, fewer than the header");
        }
        Observation obs;
        obs.region = fields[region_col];
        obs.year = parse_year(fields[year_col], line_no, mapping.year);
        obs.indicator = fields[indicator_col];
        obs.value = parse_number(fields[value_col], line_no, mapping.value);
        obs.unit = fields[unit_col];
        if (obs.year < 1900 || obs.year > 2100) {
            throw ValidationError("year " + std::to_string(obs.year) + " at line " +
                                  std::to_string(line_no) + " is outside [1900, 2100]");
        }
        if (!std::isfinite(obs.value)) {
            throw ValidationError("non-finite value at line " + std::to_string(line_no));
        }
        if (panel.find(obs.region, obs.indicator, obs.year) != nullptr) {
            duplicates.push_back(key_string(obs.region, obs.indicator, obs.year));
            continue;
        }
        panel.add(std::move(obs));
    }
    if (!duplicates.empty()) {
        std::string joined;
        for (const auto& d : duplicates) joined += (joined.empty() ? "" : ", ") + d;
        throw ValidationError("duplicate keys: " + joined);
    }
    return panel;
}

Panel load_panel_file(const std::string& path, const ColumnMapping& mapping) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open input file '" + path + "'");
    return load_panel(in, mapping);
}

void emit_panel(const Panel& panel, std::ostream& out) {
    out << "region,year,indicator,value,unit\n";
    for (const auto& [key, obs] : panel) {
        out << csv_escape(obs.region) << ',' << obs.year << ',' << csv_escape(obs.indicator) << ','
            << format_full(obs.value) << ',' << csv_escape(obs.unit) << '\n';
    }
}

Panel wide_to_long(std::istream& source, const std::string& indicator, const std::string& unit,
                   int year_base) {
    std::string header_line;
    if (!std::getline(source, header_line)) {
        throw ValidationError("input has no header row");
    }
    const char delim = detect_delimiter(header_line);
    const std::vector<std::string> header = split_record(header_line, delim);
    if (header.size() < 2) {
        throw ValidationError("wide format needs a year column plus at least one region column");
    }

    Panel panel;
    std::string line;
    int line_no = 1;
    while (std::getline(source, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> fields = split_record(line, delim);
        if (fields.size() != header.size()) {
            throw ValidationError("line " + std::to_string(line_no) + " has " +
                                  std::to_string(fields.size()) + " fields, expected " +
                                  std::to_string(header.size()));
        }
        int year = parse_year(fields[0], line_no, header[0].empty() ? "year" : header[0]);
        if (year < 100) year += year_base;
        for (std::size_t c = 1; c < fields.size(); ++c) {
            Observation obs;
            obs.region = header[c];
            obs.year = year;
            obs.indicator = indicator;
            obs.value = parse_number(fields[c], line_no, header[c]);
            obs.unit = unit;
            panel.add(std::move(obs));
        }
    }
    return panel;
}

EnergyClass classify_energy(const std::string& indicator, TaxonomyMapping mapping) {
    for (const auto& [code, paper_class] : taxonomy().paper) {
        if (code == indicator) return apply_mapping(paper_class, mapping);
    }
    throw ValidationError("unclassified indicator '" + indicator + "'");
}

const std::vector<std::string>& energy_codes() {
    static const std::vector<std::string> codes = [] {
        std::vector<std::string> out;
        for (const auto& [code, cls] : taxonomy().paper) out.push_back(code);
        return out;
    }();
    return codes;
}

std::vector<std::string> class_members(EnergyClass cls, TaxonomyMapping mapping) {
    std::vector<std::string> out;
    for (const auto& [code, paper_class] : taxonomy().paper) {
        if (apply_mapping(paper_class, mapping) == cls) out.push_back(code);
    }
    return out;
}

std::string to_string(EnergyClass cls) {
    switch (cls) {
        case EnergyClass::CRN: return "CRN";
        case EnergyClass::CNRN: return "CNRN";
        case EnergyClass::NCNRN: return "NCNRN";
        case EnergyClass::NCRN: return "NCRN";
    }
    return "?";
}

std::string to_string(Sector sector) {
    switch (sector) {
        case Sector::Industrial: return "Industrial";
        case Sector::Transportation: return "Transportation";
        case Sector::Commercial: return "Commercial";
        case Sector::Residential: return "Residential";
    }
    return "?";
}

std::string sector_code(Sector sector) {
    switch (sector) {
        case Sector::Industrial: return "industrial";
        case Sector::Transportation: return "transportation";
        case Sector::Commercial: return "commercial";
        case Sector::Residential: return "residential";
    }
    return "?";
}

std::vector<std::string> sector_codes() {
    return {"industrial", "transportation", "commercial", "residential"};
}

DeflatorTable::DeflatorTable(std::map<int, double> multipliers)
    : multipliers_(std::move(multipliers)) {
    if (multipliers_.empty()) throw ValidationError("deflator table is empty");
    for (const auto& [year, m] : multipliers_) {
        if (!(m > 0.0) || !std::isfinite(m)) {
            throw ValidationError("deflator for " + std::to_string(year) + " must be positive");
        }
    }
    const auto base = multipliers_.find(kBaseYear);
    if (base == multipliers_.end() || base->second != 1.0) {
        throw ValidationError("deflator table must map the base year " +
                              std::to_string(kBaseYear) + " to exactly 1");
    }
}

double DeflatorTable::multiplier(int year) const {
    const auto it = multipliers_.find(year);
    if (it == multipliers_.end()) {
        throw ValidationError("no deflator for year " + std::to_string(year) +
                              "; interpolation is not supported");
    }
    return it->second;
}

DeflatorTable load_deflators(std::istream& source) {
    std::string header_line;
    if (!std::getline(source, header_line)) {
        throw ValidationError("deflator input has no header row");
    }
    const char delim = detect_delimiter(header_line);
    const std::vector<std::string> header = split_record(header_line, delim);
    const int year_col = find_column(header, "year");
    const int mult_col = find_column(header, "multiplier");

    std::map<int, double> table;
    std::string line;
    int line_no = 1;
    while (std::getline(source, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> fields = split_record(line, delim);
        const int year = parse_year(fields.at(year_col), line_no, "year");
        const double mult = parse_number(fields.at(mult_col), line_no, "multiplier");
        if (!table.emplace(year, mult).second) {
            throw ValidationError("duplicate deflator year " + std::to_string(year));
        }
    }
    return DeflatorTable(std::move(table));
}

DeflatorTable load_deflators_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open deflator file '" + path + "'");
    return load_deflators(in);
}

double deflate(double nominal_value, int year, const DeflatorTable& table) {
    return nominal_value * table.multiplier(year);
}

Series aggregate(const Panel& panel, const std::string& region,
                 const std::vector<std::string>& indicators,
                 std::optional<int> year_from, std::optional<int> year_to) {
    if (indicators.empty()) throw ValidationError("aggregation needs at least one indicator");

    // Default range: the union span of the member indicators for this region.
    int lo = year_from.value_or(0), hi = year_to.value_or(0);
    if (!year_from || !year_to) {
        bool any = false;
        for (const auto& ind : indicators) {
            for (int y : panel.years(region, ind)) {
                if (!any) {
                    lo = hi = y;
                    any = true;
                } else {
                    lo = std::min(lo, y);
                    hi = std::max(hi, y);
                }
            }
        }
        if (!any) {
            throw ValidationError("region '" + region + "' has no data for the requested group");
        }
        if (year_from) lo = *year_from;
        if (year_to) hi = *year_to;
    }
    if (lo > hi) throw ValidationError("empty year range");

    std::string unit;
    bool unit_set = false;
    std::vector<std::string> gaps;
    std::vector<double> sums(hi - lo + 1, 0.0);
    for (int y = lo; y <= hi; ++y) {
        for (const auto& ind : indicators) {
            const Observation* obs = panel.find(region, ind, y);
            if (obs == nullptr) {
                gaps.push_back(key_string(region, ind, y));
                continue;
            }
            if (!unit_set) {
                unit = obs->unit;
                unit_set = true;
            } else if (obs->unit != unit) {
                throw ValidationError("group mixes units '" + unit + "' and '" + obs->unit +
                                      "' (indicator '" + ind + "')");
            }
            sums[y - lo] += obs->value;
        }
    }
    if (!gaps.empty()) {
        std::string joined;
        for (const auto& g : gaps) joined += (joined.empty() ? "" : ", ") + g;
        throw ValidationError("missing observations: " + joined);
    }

    Series series;
    series.start_year = lo;
    series.values = std::move(sums);
    series.unit = unit;
    return series;
}

bool is_dollar_unit(const std::string& unit) {
    std::string lower(unit);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return lower.find("dollar") != std::string::npos;
}

DeaBuildResult build_dea_instance(const Panel& panel, const DeaInstanceSpec& spec,
                                  const DeflatorTable* deflators) {
    if (spec.output_indicators.empty() || spec.input_indicators.empty()) {
        throw ValidationError("instance spec needs at least one output and one input indicator");
    }
    const bool by_region = !spec.dmu_regions.empty();
    const bool by_year = !spec.dmu_years.empty();
    if (by_region == by_year) {
        throw ValidationError("instance spec must choose DMUs as either regions or years");
    }
    if (spec.deflate && deflators == nullptr) {
        throw ValidationError("deflation requested but no deflator table supplied");
    }

    const int n = by_region ? static_cast<int>(spec.dmu_regions.size())
                            : static_cast<int>(spec.dmu_years.size());
    const int w = static_cast<int>(spec.input_indicators.size());
    const int q = static_cast<int>(spec.output_indicators.size());

    std::vector<std::string> dmu_names;
    dmu_names.reserve(n);
    if (by_region) {
        dmu_names = spec.dmu_regions;
    } else {
        for (int y : spec.dmu_years) dmu_names.push_back(std::to_string(y));
    }

    Eigen::MatrixXd inputs(w, n);
    Eigen::MatrixXd outputs(q, n);
    std::vector<std::string> input_units(w), output_units(q);
    std::vector<CellProvenance> cells;
    cells.reserve(static_cast<std::size_t>(n) * (w + q));

    auto fill = [&](bool is_input, int row, const std::string& indicator) {
        for (int col = 0; col < n; ++col) {
            const std::string region = by_region ? spec.dmu_regions[col] : spec.region;
            const int year = by_region ? spec.year : spec.dmu_years[col];
            const Observation* obs = panel.find(region, indicator, year);
            if (obs == nullptr) {
                throw ValidationError("missing cell for DMU '" + dmu_names[col] +
                                      "', indicator '" + indicator + "'");
            }
            CellProvenance cell;
            cell.is_input = is_input;
            cell.row = row;
            cell.col = col;
            cell.region = region;
            cell.indicator = indicator;
            cell.year = year;
            cell.raw_value = obs->value;
            double value = obs->value;
            std::string unit = obs->unit;
            if (spec.deflate && is_dollar_unit(obs->unit)) {
                cell.multiplier = deflators->multiplier(year);
                value *= cell.multiplier;
                unit += " (base " + std::to_string(DeflatorTable::kBaseYear) + ")";
            }
            if (is_input) {
                inputs(row, col) = value;
                input_units[row] = unit;
            } else {
                outputs(row, col) = value;
                output_units[row] = unit;
            }
            cells.push_back(std::move(cell));
        }
    };
    for (int r = 0; r < q; ++r) fill(false, r, spec.output_indicators[r]);
    for (int i = 0; i < w; ++i) fill(true, i, spec.input_indicators[i]);

    DeaBuildResult result{
        DeaInstance(std::move(dmu_names), std::move(inputs), std::move(outputs),
                    spec.input_indicators, spec.output_indicators, std::move(input_units),
                    std::move(output_units), spec.zero_policy),
        std::move(cells)};
    return result;
}

} // namespace greydea
