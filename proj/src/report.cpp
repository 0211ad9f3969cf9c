#include "greydea/report.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

#include "greydea/errors.hpp"

namespace greydea {

std::string format_full(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc()) throw SolverError("number formatting failed");
    return std::string(buf, ptr);
}

std::string format_paper(double value, int decimals) {
    char buf[64];
    const double rounded = round_to(value, decimals);
    const auto [ptr, ec] =
        std::to_chars(buf, buf + sizeof(buf), rounded, std::chars_format::fixed, decimals);
    if (ec != std::errc()) throw SolverError("number formatting failed");
    std::string text(buf, ptr);
    if (text.find('.') != std::string::npos) {
        while (text.back() == '0') text.pop_back();
        if (text.back() == '.') text.pop_back();
    }
    if (text == "-0") text = "0";
    return text;
}

double round_to(double value, int decimals) {
    const double scale = std::pow(10.0, decimals);
    return std::round(value * scale) / scale;
}

double relative_error(double actual, double predicted) {
    if (actual == 0.0) throw ValidationError("relative error against a zero actual is undefined");
    return std::abs(predicted - actual) / std::abs(actual);
}

std::string csv_escape(const std::string& field) {
    bool needs_quotes = false;
    for (char c : field) {
        if (c == ',' || c == '"' || c == '\n' || c == '\r') {
            needs_quotes = true;
            break;
        }
    }
    if (!needs_quotes) return field;
    std::string out;
    out.reserve(field.size() + 2);
    out.push_back('"');
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string csv_join(const std::vector<std::vector<std::string>>& rows) {
    std::string out;
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i > 0) out.push_back(',');
            out += csv_escape(row[i]);
        }
        out.push_back('\n');
    }
    return out;
}

} // namespace greydea
