#ifndef IAWD_IO_HPP
#define IAWD_IO_HPP

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "iawd/core.hpp"
#include "iawd/samplers.hpp"

namespace iawd {

//---------------------------------------------------------------------------//
// JSON
//---------------------------------------------------------------------------//

inline nlohmann::json to_json(const FamilySpec& spec) {
    return {{"family", std::string(to_string(spec.family))}, {"params", spec.params.values()}};
}

inline nlohmann::json to_json(const AltSpec& alt) {
    return {{"family", std::string(to_string(alt.family))}, {"params", alt.params}};
}

inline nlohmann::json params_json(Family family, const Params& p) {
    nlohmann::json j = nlohmann::json::object();
    const auto names = param_names(family);
    for (std::size_t i = 0; i < p.size() && i < names.size(); ++i) j[names[i] + "_hat"] = p[i];
    return j;
}

namespace detail {

inline std::vector<double> json_params(const nlohmann::json& j, const std::string& where) {
    if (!j.contains("params") || !j["params"].is_array())
        throw Error(ErrorCode::ConfigError, where + ".params: expected an array of numbers");
    std::vector<double> out;
    for (const auto& v : j["params"]) {
        if (!v.is_number()) throw Error(ErrorCode::ConfigError, where + ".params: expected numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

inline std::string json_family(const nlohmann::json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("family") || !j["family"].is_string())
        throw Error(ErrorCode::ConfigError, where + ".family: expected a string");
    return j["family"].get<std::string>();
}

/// Re-raises a domain error as a ConfigError naming the offending field.
template <class F>
auto at_field(const std::string& where, F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ConfigError) throw;
        throw Error(ErrorCode::ConfigError, where + ": " + e.what());
    }
}

}  // namespace detail

/// `where` names the JSON location for error messages, e.g. "rows[2].null".
inline FamilySpec family_spec_from_json(const nlohmann::json& j, const std::string& where = "spec") {
    const std::string name = detail::json_family(j, where);
    const Family f = detail::at_field(where + ".family", [&] { return family_from_string(name); });
    FamilySpec spec{f, Params(detail::json_params(j, where))};
    detail::at_field(where, [&] {
        validate(spec);
        return 0;
    });
    return spec;
}

inline AltSpec alt_spec_from_json(const nlohmann::json& j, const std::string& where = "alt") {
    const std::string name = detail::json_family(j, where);
    const AltFamily f = detail::at_field(where + ".family", [&] { return alt_from_string(name); });
    AltSpec alt{f, detail::json_params(j, where)};
    detail::at_field(where, [&] {
        validate(alt);
        return 0;
    });
    return alt;
}

//---------------------------------------------------------------------------//
// CSV
//---------------------------------------------------------------------------//

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cell += '"';
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                cell += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            cells.push_back(cell);
            cell.clear();
        } else if (ch != '\r') {
            cell += ch;
        }
    }
    cells.push_back(cell);
    return cells;
}

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

inline bool parse_double(const std::string& s, double& out) {
    const std::string t = trim(s);
    if (t.empty()) return false;
    const char* end = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(t.data(), end, out);
    return ec == std::errc() && ptr == end && std::isfinite(out);
}

inline bool is_na_token(const std::string& s) {
    const std::string t = trim(s);
    return t.empty() || t == "NA" || t == "na" || t == "NaN" || t == "nan" || t == ".";
}

}  // namespace detail

struct CsvColumn {
    std::string name;
    std::vector<double> values;
    std::size_t dropped = 0;
};

/// Reads one numeric column from CSV text. The first line is a header when any of
/// its cells fails to parse as a number. `column` is a header name or a 0-based
/// index (default: the first column). Empty and non-numeric cells are errors
/// unless drop_na is set, in which case NA-like cells (empty, NA, NaN, .) are
/// skipped; other junk is still an error.
inline CsvColumn read_csv_column(std::istream& in, const std::string& column = "", bool drop_na = false) {
    std::vector<std::vector<std::string>> rows;
    std::string line;
    // A blank line inside the data is an empty cell; trailing blank lines are not data.
    while (std::getline(in, line)) rows.push_back(detail::split_csv_line(line));
    auto blank = [](const std::vector<std::string>& r) { return r.size() == 1 && detail::trim(r[0]).empty(); };
    while (!rows.empty() && blank(rows.back())) rows.pop_back();
    if (rows.empty()) throw Error(ErrorCode::ParseError, "input has no data rows");

    bool header = false;
    for (const auto& cell : rows.front()) {
        double v;
        if (!detail::parse_double(cell, v)) header = true;
    }
    std::size_t index = 0;
    CsvColumn out;
    if (!column.empty()) {
        bool found = false;
        if (header) {
            for (std::size_t i = 0; i < rows.front().size(); ++i)
                if (detail::trim(rows.front()[i]) == column) {
                    index = i;
                    found = true;
                    break;
                }
        }
        if (!found) {
            const auto [ptr, ec] = std::from_chars(column.data(), column.data() + column.size(), index);
            if (ec != std::errc() || ptr != column.data() + column.size())
                throw Error(ErrorCode::ParseError, "no column named '" + column + "'");
        }
    }
    out.name = header && index < rows.front().size() ? detail::trim(rows.front()[index]) : std::to_string(index);

    for (std::size_t r = header ? 1 : 0; r < rows.size(); ++r) {
        const std::size_t line_no = r + 1;
        if (index >= rows[r].size())
            throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": missing column " +
                                                   std::to_string(index));
        const std::string& cell = rows[r][index];
        double v;
        if (detail::parse_double(cell, v)) {
            out.values.push_back(v);
        } else if (drop_na && detail::is_na_token(cell)) {
            ++out.dropped;
        } else {
            throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": '" + cell +
                                                   "' is not a number" +
                                                   (detail::is_na_token(cell) ? " (use --drop-na to skip)" : ""));
        }
    }
    if (out.values.empty()) throw Error(ErrorCode::ParseError, "column has no numeric values");
    return out;
}

inline CsvColumn read_csv_column(const std::string& path, const std::string& column = "", bool drop_na = false) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open '" + path + "'");
    return read_csv_column(in, column, drop_na);
}

}  // namespace iawd

#endif  // IAWD_IO_HPP
