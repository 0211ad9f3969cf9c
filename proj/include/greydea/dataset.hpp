#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "greydea/dea.hpp"
#include "greydea/grey.hpp"

namespace greydea {

// One cell of a tidy panel: region x indicator x year -> value, with the
// source's own unit label.
struct Observation {
    std::string region;
    int year = 0;
    std::string indicator;
    double value = 0.0;
    std::string unit;

    friend bool operator==(const Observation&, const Observation&) = default;
};

// Panel with unique (region, indicator, year) keys and one unit per indicator.
// Immutable in spirit: build it up, then read. Iteration order is sorted by
// region, indicator, year, so emission is deterministic.
class Panel {
public:
    using Key = std::tuple<std::string, std::string, int>;

    // Throws ValidationError on a duplicate key or on a unit that conflicts
    // with earlier observations of the same indicator.
    void add(Observation obs);

    std::size_t size() const { return rows_.size(); }
    const Observation* find(const std::string& region, const std::string& indicator,
                            int year) const;

    std::vector<std::string> regions() const;
    std::vector<std::string> indicators() const;
    std::vector<std::string> indicators(const std::string& region) const;
    // Sorted years for which (region, indicator) has a value.
    std::vector<int> years(const std::string& region, const std::string& indicator) const;

    auto begin() const { return rows_.begin(); }
    auto end() const { return rows_.end(); }

    friend bool operator==(const Panel& a, const Panel& b) { return a.rows_ == b.rows_; }

private:
    std::map<Key, Observation> rows_;
    std::map<std::string, std::string> indicator_units_;
};

// Column-name mapping for tidy input files.
struct ColumnMapping {
    std::string region = "region";
    std::string year = "year";
    std::string indicator = "indicator";
    std::string value = "value";
    std::string unit = "unit";
};

// Reads delimited text with a header row (comma by default; a tab in the
// header switches the whole file to tabs). Collects every duplicate key before
// failing so the error names all offenders.
Panel load_panel(std::istream& source, const ColumnMapping& mapping = {});
Panel load_panel_file(const std::string& path, const ColumnMapping& mapping = {});

// Writes the panel back out in the tidy schema. load(emit(p)) == p.
void emit_panel(const Panel& panel, std::ostream& out);

// Converts a wide matrix (first column years, one column per region) into
// tidy observations carrying the given indicator and unit. Years below 100
// are offset by year_base.
Panel wide_to_long(std::istream& source, const std::string& indicator, const std::string& unit,
                   int year_base = 1900);

enum class EnergyClass { CRN, CNRN, NCNRN, NCRN };
enum class Sector { Industrial, Transportation, Commercial, Residential };

// PaperVerbatim ships the source taxonomy as printed, which files coal and oil
// under the renewable non-clean class and wood and waste under the
// non-renewable one. Corrected swaps those two groups' renewability.
enum class TaxonomyMapping { PaperVerbatim, Corrected };

EnergyClass classify_energy(const std::string& indicator, TaxonomyMapping mapping);

// Every indicator code the taxonomy covers.
const std::vector<std::string>& energy_codes();
std::vector<std::string> class_members(EnergyClass cls, TaxonomyMapping mapping);

std::string to_string(EnergyClass cls);
std::string to_string(Sector sector);
std::string sector_code(Sector sector);
std::vector<std::string> sector_codes();

// Year -> real-dollars-per-nominal-dollar multipliers with 2009 as the base.
class DeflatorTable {
public:
    static constexpr int kBaseYear = 2009;

    // Requires a positive multiplier per year and exactly 1 for the base year.
    explicit DeflatorTable(std::map<int, double> multipliers);

    double multiplier(int year) const;  // throws on a missing year, never interpolates
    const std::map<int, double>& multipliers() const { return multipliers_; }

private:
    std::map<int, double> multipliers_;
};

DeflatorTable load_deflators(std::istream& source);
DeflatorTable load_deflators_file(const std::string& path);

double deflate(double nominal_value, int year, const DeflatorTable& table);

// Sums the member indicators of one region year by year over [year_from,
// year_to]. Every member must be present in every year; gaps and unit
// mixtures are errors. The year range defaults to the span the panel covers.
Series aggregate(const Panel& panel, const std::string& region,
                 const std::vector<std::string>& indicators,
                 std::optional<int> year_from = {}, std::optional<int> year_to = {});

// Selection for assembling a DeaInstance from a panel: DMUs are either
// regions at a fixed year or years of a fixed region.
struct DeaInstanceSpec {
    std::vector<std::string> output_indicators;
    std::vector<std::string> input_indicators;

    std::vector<std::string> dmu_regions;
    int year = 0;

    std::string region;
    std::vector<int> dmu_years;

    bool deflate = false;  // convert dollar-unit cells to base-year dollars
    ZeroInputPolicy zero_policy = ZeroInputPolicy::Reject;
};

// Where each matrix cell came from, for reports.
struct CellProvenance {
    bool is_input = false;
    int row = 0;
    int col = 0;
    std::string region;
    std::string indicator;
    int year = 0;
    double raw_value = 0.0;
    double multiplier = 1.0;  // deflator applied, 1 when untouched
};

struct DeaBuildResult {
    DeaInstance instance;
    std::vector<CellProvenance> cells;
};

DeaBuildResult build_dea_instance(const Panel& panel, const DeaInstanceSpec& spec,
                                  const DeflatorTable* deflators = nullptr);

// True when a unit label denotes nominal dollars (contains "dollar").
bool is_dollar_unit(const std::string& unit);

} // namespace greydea
