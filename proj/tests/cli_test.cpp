#include "greydea/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"

using namespace greydea;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::string kDataDir = GREYDEA_DATA_DIR;

fs::path temp_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "greydea-cli-tests";
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

fs::path write_file(const std::string& name, const std::string& content) {
    const fs::path path = temp_dir() / name;
    std::ofstream out(path, std::ios::binary);
    out << content;
    return path;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

json run_json(std::vector<std::string> args, const std::string& out_name) {
    const fs::path out = temp_dir() / out_name;
    args.push_back("--output");
    args.push_back(out.string());
    REQUIRE(run_cli(args) == 0);
    return json::parse(read_file(out));
}

const std::string kToyPanel =
    "region,year,indicator,value,unit\n"
    "A,2009,fuel,1,BBTU\n"
    "A,2009,power,1,MWh\n"
    "B,2009,fuel,2,BBTU\n"
    "B,2009,power,1,MWh\n";

std::string geometric_panel() {
    std::string text = "region,year,indicator,value,unit\n";
    double v = 3.0;
    for (int year = 2000; year < 2008; ++year) {
        text += "AZ," + std::to_string(year) + ",load," + std::to_string(v) + ",BBTU\n";
        v *= 1.2;
    }
    return text;
}

}  // namespace

TEST_CASE("dea subcommand scores the toy panel") {
    const fs::path input = write_file("toy.csv", kToyPanel);
    const json doc = run_json({"dea", "--input", input.string(), "--year", "2009",
                               "--outputs", "power", "--inputs", "fuel", "--rts", "crs"},
                              "toy_dea.json");
    const json& rows = doc["body"]["rows"];
    REQUIRE(rows.size() == 2);
    CHECK(rows[0]["dmu"] == "A");
    CHECK(rows[0]["score"].get<double>() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rows[1]["dmu"] == "B");
    CHECK(rows[1]["score"].get<double>() == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(doc["metadata"]["config"]["subcommand"] == "dea");
}

TEST_CASE("dea reproduces the published 2009 efficiency table through the CLI") {
    const json doc = run_json({"dea", "--input", kDataDir + "/states_2009.csv", "--year", "2009",
                               "--outputs", "crn_usage", "--inputs",
                               "total_revenue,avg_energy_price,urban_population_ratio,"
                               "adults_beyond_high_school,unemployment_rate",
                               "--round", "paper"},
                              "eff2009.json");
    const json& rows = doc["body"]["rows"];
    REQUIRE(rows.size() == 4);
    const double te[4] = {0.91, 0.747, 0.866, 1.0};
    const double pte[4] = {0.967, 0.986, 1.0, 1.0};
    const double se[4] = {0.941, 0.757, 0.866, 1.0};
    const char* rts[4] = {"irs", "irs", "irs", "-"};
    for (int j = 0; j < 4; ++j) {
        CHECK(rows[j]["te"].get<double>() == te[j]);
        CHECK(rows[j]["pte"].get<double>() == pte[j]);
        CHECK(rows[j]["se"].get<double>() == se[j]);
        CHECK(rows[j]["rts"] == rts[j]);
    }
}

TEST_CASE("years serve as DMUs for a single region") {
    std::string text = "region,year,indicator,value,unit\n";
    const double outputs[3] = {10, 11, 12};
    const double inputs[3] = {5, 6, 7};
    for (int i = 0; i < 3; ++i) {
        const std::string y = std::to_string(2000 + i);
        text += "AZ," + y + ",product," + std::to_string(outputs[i]) + ",BBTU\n";
        text += "AZ," + y + ",fuel," + std::to_string(inputs[i]) + ",BBTU\n";
    }
    const fs::path input = write_file("years.csv", text);
    const json doc = run_json({"dea", "--input", input.string(), "--region", "AZ",
                               "--dmu-years", "2000,2001,2002", "--outputs", "product",
                               "--inputs", "fuel"},
                              "years_dea.json");
    const json& rows = doc["body"]["rows"];
    REQUIRE(rows.size() == 3);
    CHECK(rows[0]["dmu"] == "2000");
    CHECK(rows[2]["dmu"] == "2002");
    // 2000 has the best product-per-fuel ratio, so it anchors the frontier.
    CHECK(rows[0]["te"].get<double>() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("empty DMU list is a validation error with exit code 2") {
    const fs::path input = write_file("toy2.csv", kToyPanel);
    CHECK(run_cli({"dea", "--input", input.string(), "--year", "2009", "--outputs", "power",
                   "--inputs", "fuel", "--dmus", ""}) == 2);
}

TEST_CASE("gm11 continues a geometric series") {
    const fs::path input = write_file("geo.csv", geometric_panel());
    const json doc = run_json({"gm11", "--input", input.string(), "--region", "AZ",
                               "--indicator", "load", "--years", "2008,2009"},
                              "geo.json");
    const json& fc = doc["body"]["forecasts"];
    REQUIRE(fc.size() == 2);
    CHECK(fc[0]["year"] == 2008);
    CHECK(fc[0]["value"].get<double>() ==
          doctest::Approx(3.0 * std::pow(1.2, 8)).epsilon(1e-6));
    CHECK(fc[1]["value"].get<double>() ==
          doctest::Approx(3.0 * std::pow(1.2, 9)).epsilon(1e-6));
    CHECK_FALSE(doc["body"]["model"]["degenerate"].get<bool>());
}

TEST_CASE("gm11 surfaces the degenerate flag on constant data") {
    std::string text = "region,year,indicator,value,unit\n";
    for (int year = 2000; year < 2006; ++year) {
        text += "AZ," + std::to_string(year) + ",load,5,BBTU\n";
    }
    const fs::path input = write_file("flat.csv", text);
    const json doc = run_json({"gm11", "--input", input.string(), "--region", "AZ",
                               "--indicator", "load", "--years", "2010"},
                              "flat.json");
    CHECK(doc["body"]["model"]["degenerate"].get<bool>());
    CHECK(doc["body"]["forecasts"][0]["value"].get<double>() == doctest::Approx(5.0));
}

TEST_CASE("gm11 with the linear method hits the published projections") {
    // Values exactly on the published line Y = 5930*year - 1.159e7.
    std::string text = "region,year,indicator,value,unit\n";
    for (int year = 2000; year < 2008; ++year) {
        const double v = 5930.0 * year - 1.159e7;
        text += "AZ," + std::to_string(year) + ",commercial," + std::to_string((long long)v) +
                ",BBTU\n";
    }
    const fs::path input = write_file("line.csv", text);
    const json doc = run_json({"gm11", "--input", input.string(), "--region", "AZ",
                               "--indicator", "commercial", "--method", "linear", "--years",
                               "2025,2050"},
                              "line.json");
    CHECK(doc["body"]["model"]["method"] == "linear");
    CHECK(doc["body"]["model"]["slope"].get<double>() == 5930.0);
    CHECK(doc["body"]["model"]["intercept"].get<double>() == -1.159e7);
    CHECK(doc["body"]["forecasts"][0]["value"].get<double>() == 418250.0);
    CHECK(doc["body"]["forecasts"][1]["value"].get<double>() == 566500.0);
}

TEST_CASE("gm11 rejects forecast years inside the sample") {
    const fs::path input = write_file("geo2.csv", geometric_panel());
    CHECK(run_cli({"gm11", "--input", input.string(), "--region", "AZ", "--indicator", "load",
                   "--years", "2005"}) == 2);
}

TEST_CASE("backtest emits table-shaped rows with a mean") {
    const fs::path input = write_file("geo3.csv", geometric_panel());
    const json doc = run_json({"backtest", "--input", input.string(), "--region", "AZ",
                               "--indicator", "load", "--train-len", "5"},
                              "bt.json");
    const json& rows = doc["body"]["rows"];
    REQUIRE(rows.size() == 3);
    for (const auto& row : rows) CHECK(row["relative_error"].get<double>() < 1e-6);
    CHECK(doc["body"]["mean_relative_error"].get<double>() < 1e-6);

    // Linear method on the same data, checked against its own exit shape.
    const json lin = run_json({"backtest", "--input", input.string(), "--region", "AZ",
                               "--indicator", "load", "--train-len", "5", "--method", "linear"},
                              "bt_lin.json");
    CHECK(lin["body"]["rows"].size() == 3);
}

TEST_CASE("plotdata shares sum to one per year") {
    std::string text = "region,year,indicator,value,unit\n";
    for (int year = 2000; year < 2004; ++year) {
        const std::string y = std::to_string(year);
        text += "AZ," + y + ",electricity," + std::to_string(10.0 + year - 2000) + ",BBTU\n";
        text += "AZ," + y + ",natural_gas,20,BBTU\n";
        text += "AZ," + y + ",coal,30,BBTU\n";
        text += "AZ," + y + ",wood,5,BBTU\n";
    }
    const fs::path input = write_file("classes.csv", text);
    const json doc = run_json({"plotdata", "--input", input.string(), "--group-by", "class",
                               "--mode", "shares"},
                              "shares.json");
    std::map<int, double> totals;
    for (const auto& row : doc["body"]["rows"]) {
        totals[row["year"].get<int>()] += row["value"].get<double>();
    }
    REQUIRE(totals.size() == 4);
    for (const auto& [year, total] : totals) CHECK(total == doctest::Approx(1.0).epsilon(1e-9));

    // Levels mode passes the aggregate through untouched.
    const json levels = run_json({"plotdata", "--input", input.string(), "--group-by", "class"},
                                 "levels.json");
    for (const auto& row : levels["body"]["rows"]) {
        if (row["group"] == "CNRN") CHECK(row["value"].get<double>() == 20.0);
    }
}

TEST_CASE("plotdata by sector mirrors the aggregate op") {
    std::string text = "region,year,indicator,value,unit\n";
    for (int year = 2000; year < 2003; ++year) {
        const std::string y = std::to_string(year);
        text += "NM," + y + ",industrial,100,BBTU\n";
        text += "NM," + y + ",residential,50,BBTU\n";
    }
    const fs::path input = write_file("sectors.csv", text);
    const json doc = run_json({"plotdata", "--input", input.string(), "--group-by", "sector"},
                              "sectors.json");
    int industrial_rows = 0;
    for (const auto& row : doc["body"]["rows"]) {
        if (row["group"] == "industrial") {
            CHECK(row["value"].get<double>() == 100.0);
            ++industrial_rows;
        }
    }
    CHECK(industrial_rows == 3);
}

TEST_CASE("deflate converts a single value against the shipped table") {
    const json doc = run_json({"deflate", "--deflators", kDataDir + "/deflators.csv",
                               "--value", "100", "--value-year", "1960"},
                              "deflate.json");
    CHECK(doc["body"]["real"].get<double>() == 572.21);
    CHECK(doc["body"]["multiplier"].get<double>() == 5.7221);
}

TEST_CASE("deflate rewrites dollar cells of a panel") {
    const std::string text =
        "region,year,indicator,value,unit\n"
        "AZ,1960,revenue,100,hundred million dollar\n"
        "AZ,1960,load,7,BBTU\n";
    const fs::path input = write_file("nominal.csv", text);
    const json doc = run_json({"deflate", "--deflators", kDataDir + "/deflators.csv",
                               "--input", input.string()},
                              "deflated_panel.json");
    for (const auto& row : doc["body"]["rows"]) {
        if (row["indicator"] == "revenue") {
            CHECK(row["value"].get<double>() == 572.21);
            CHECK(row["unit"].get<std::string>().find("base 2009") != std::string::npos);
        } else {
            CHECK(row["value"].get<double>() == 7.0);
        }
    }
}

TEST_CASE("convert turns the wide population matrix into tidy rows") {
    const fs::path out = temp_dir() / "converted.csv";
    REQUIRE(run_cli({"convert", "--input", kDataDir + "/population_wide.csv",
                     "--indicator", "population", "--unit", "ten-thousand persons",
                     "--format", "csv", "--output", out.string()}) == 0);
    const std::string produced = read_file(out);
    const std::string expected = read_file(kDataDir + "/population.csv");
    CHECK(produced == expected);
}

TEST_CASE("identical configs produce byte-identical bodies") {
    const fs::path input = write_file("geo4.csv", geometric_panel());
    const std::vector<std::string> args = {"gm11", "--input", input.string(), "--region", "AZ",
                                           "--indicator", "load", "--years", "2010"};
    const json a = run_json(args, "det_a.json");
    const json b = run_json(args, "det_b.json");
    CHECK(a["body"].dump() == b["body"].dump());

    // CSV runs are byte-identical end to end.
    const fs::path csv_a = temp_dir() / "det_a.csv";
    const fs::path csv_b = temp_dir() / "det_b.csv";
    std::vector<std::string> csv_args = args;
    csv_args.insert(csv_args.end(), {"--format", "csv"});
    std::vector<std::string> run_a = csv_args, run_b = csv_args;
    run_a.insert(run_a.end(), {"--output", csv_a.string()});
    run_b.insert(run_b.end(), {"--output", csv_b.string()});
    REQUIRE(run_cli(run_a) == 0);
    REQUIRE(run_cli(run_b) == 0);
    CHECK(read_file(csv_a) == read_file(csv_b));
}

TEST_CASE("json and csv carry the same numbers at full precision") {
    const fs::path input = write_file("geo5.csv", geometric_panel());
    const json doc = run_json({"backtest", "--input", input.string(), "--region", "AZ",
                               "--indicator", "load", "--train-len", "5"},
                              "same_a.json");
    const fs::path csv_path = temp_dir() / "same_b.csv";
    REQUIRE(run_cli({"backtest", "--input", input.string(), "--region", "AZ", "--indicator",
                     "load", "--train-len", "5", "--format", "csv", "--output",
                     csv_path.string()}) == 0);

    std::ifstream csv(csv_path);
    std::string line;
    std::getline(csv, line);  // header
    for (const auto& row : doc["body"]["rows"]) {
        REQUIRE(std::getline(csv, line));
        std::stringstream ss(line);
        std::string year, actual, predicted, error;
        std::getline(ss, year, ',');
        std::getline(ss, actual, ',');
        std::getline(ss, predicted, ',');
        std::getline(ss, error, ',');
        CHECK(std::stod(actual) == row["actual"].get<double>());
        CHECK(std::stod(predicted) == row["predicted"].get<double>());
        CHECK(std::stod(error) == row["relative_error"].get<double>());
    }
}

TEST_CASE("config file seeds values and flags override it") {
    const fs::path input = write_file("geo6.csv", geometric_panel());
    const json cfg = {{"input", input.string()}, {"region", "AZ"},      {"indicator", "load"},
                      {"train-len", 5},          {"method", "linear"},  {"format", "json"}};
    const fs::path cfg_path = write_file("run.json", cfg.dump());

    const json doc =
        run_json({"backtest", "--config", cfg_path.string()}, "cfg_a.json");
    CHECK(doc["metadata"]["config"]["method"] == "linear");

    const json doc2 = run_json({"backtest", "--config", cfg_path.string(), "--method", "gm11"},
                               "cfg_b.json");
    CHECK(doc2["metadata"]["config"]["method"] == "gm11");

    CHECK(run_cli({"backtest", "--config", (temp_dir() / "missing.json").string()}) == 2);
    const fs::path bad = write_file("bad.json", "{\"no-such-key\": 1}");
    CHECK(run_cli({"backtest", "--config", bad.string()}) == 2);
}

TEST_CASE("print-config echoes the resolved run configuration") {
    CHECK(run_cli({"gm11", "--region", "AZ", "--indicator", "load", "--print-config"}) == 0);
}

TEST_CASE("exit codes classify failures") {
    CHECK(run_cli({"frobnicate"}) == 2);
    CHECK(run_cli({"dea", "--no-such-flag"}) == 2);
    CHECK(run_cli({"gm11", "--input", "/nonexistent/panel.csv", "--region", "AZ",
                   "--indicator", "x"}) == 2);

    // Values near the double ceiling overflow the grey regression, which is
    // a numerical failure, not a validation one.
    const std::string text =
        "region,year,indicator,value,unit\n"
        "AZ,2000,load,1e300,BBTU\n"
        "AZ,2001,load,2e300,BBTU\n"
        "AZ,2002,load,4e300,BBTU\n"
        "AZ,2003,load,8e300,BBTU\n"
        "AZ,2004,load,1,BBTU\n";
    const fs::path input = write_file("huge.csv", text);
    CHECK(run_cli({"backtest", "--input", input.string(), "--region", "AZ", "--indicator",
                   "load", "--train-len", "4"}) == 3);
}

TEST_CASE("the installed binary honors the same contract") {
    const std::string cli = GREYDEA_CLI_PATH;
    const fs::path out = temp_dir() / "bin_out.json";
    const std::string ok = cli + " deflate --deflators \"" + kDataDir +
                           "/deflators.csv\" --value 100 --value-year 1960 --output \"" +
                           out.string() + "\"";
    REQUIRE(std::system(ok.c_str()) == 0);
    const json doc = json::parse(read_file(out));
    CHECK(doc["body"]["real"].get<double>() == 572.21);

    const fs::path err = temp_dir() / "bin_err.txt";
    const std::string bad = cli + " deflate --value 1 2> \"" + err.string() + "\"";
    const int status = std::system(bad.c_str());
    REQUIRE(WIFEXITED(status));
    CHECK(WEXITSTATUS(status) == 2);
    const json err_doc = json::parse(read_file(err));
    CHECK(err_doc["error"]["type"] == "validation");
}
