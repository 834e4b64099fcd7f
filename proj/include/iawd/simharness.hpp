#ifndef IAWD_SIMHARNESS_HPP
#define IAWD_SIMHARNESS_HPP

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "iawd/bootstrap.hpp"
#include "iawd/core.hpp"
#include "iawd/io.hpp"
#include "iawd/samplers.hpp"

namespace iawd {

enum class BootstrapMode { Full, WarpSpeed };

struct StudyRow {
    std::string label;
    Distribution law;
};

struct StudyColumn {
    std::string label;
    WeightSpec weight;
};

struct StudyConfig {
    std::string name;
    Family null_family = Family::Poisson;
    StatKind stat = StatKind::T;
    std::vector<StudyColumn> columns;
    std::vector<StudyRow> rows;
    std::size_t n = 50;
    double alpha = 0.05;
    std::size_t B = 200;
    std::size_t repetitions = 1000;
    BootstrapMode mode = BootstrapMode::Full;
    FailurePolicy on_estimation_failure = FailurePolicy::Reject;
    std::uint64_t seed = 1;
    /// Canonical JSON of the parsed config; hashed into the table metadata.
    std::string canonical;
};

inline std::string column_label(const WeightSpec& w) {
    std::ostringstream s;
    s << to_string(w.shape) << "(" << w.gamma << ")";
    return s.str();
}

namespace detail {

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

template <class T>
T required(const nlohmann::json& j, const char* key) {
    if (!j.contains(key)) throw Error(ErrorCode::ConfigError, std::string(key) + ": missing");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw Error(ErrorCode::ConfigError, std::string(key) + ": wrong type");
    }
}

template <class T>
T optional(const nlohmann::json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw Error(ErrorCode::ConfigError, std::string(key) + ": wrong type");
    }
}

}  // namespace detail

/// Parses a study document:
///   {
///     "name": "poisson", "null": "poisson", "stat": "T",
///     "weights": [{"shape": "gauss", "gamma": [0.25, 1, 5]}],
///     "n": 50, "alpha": 0.1, "B": 200, "repetitions": 1000,
///     "bootstrap": "full" | "warp_speed", "seed": 1,
///     "on_estimation_failure": "reject" | "accept",
///     "rows": [{"label": "Po(1)", "null": {"family": "poisson", "params": [1]}},
///              {"label": "U{0,1}", "alt": {"family": "discrete_uniform", "params": [1]}}]
///   }
/// "gamma" may be a number or a list; each (shape, gamma) pair becomes a column.
inline StudyConfig study_config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw Error(ErrorCode::ConfigError, "study config must be a JSON object");
    StudyConfig cfg;
    cfg.name = detail::optional<std::string>(j, "name", "study");
    const auto null_name = detail::required<std::string>(j, "null");
    cfg.null_family = detail::at_field("null", [&] { return family_from_string(null_name); });
    const auto stat_name = detail::optional<std::string>(j, "stat", "T");
    cfg.stat = detail::at_field("stat", [&] { return stat_from_string(stat_name); });
    cfg.n = detail::required<std::size_t>(j, "n");
    cfg.alpha = detail::required<double>(j, "alpha");
    cfg.B = detail::optional<std::size_t>(j, "B", 200);
    cfg.repetitions = detail::required<std::size_t>(j, "repetitions");
    cfg.seed = detail::optional<std::uint64_t>(j, "seed", 1);
    const auto mode = detail::optional<std::string>(j, "bootstrap", "full");
    if (mode == "full")
        cfg.mode = BootstrapMode::Full;
    else if (mode == "warp_speed")
        cfg.mode = BootstrapMode::WarpSpeed;
    else
        throw Error(ErrorCode::ConfigError, "bootstrap: expected 'full' or 'warp_speed', got '" + mode + "'");

    const auto policy = detail::optional<std::string>(j, "on_estimation_failure", "reject");
    cfg.on_estimation_failure =
        detail::at_field("on_estimation_failure", [&] { return failure_policy_from_string(policy); });

    if (cfg.n < 1) throw Error(ErrorCode::ConfigError, "n: must be >= 1");
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw Error(ErrorCode::ConfigError, "alpha: must lie in (0, 1)");
    if (cfg.B < 1) throw Error(ErrorCode::ConfigError, "B: must be >= 1");
    if (cfg.repetitions < 50) throw Error(ErrorCode::ConfigError, "repetitions: must be >= 50");

    if (!j.contains("weights") || !j["weights"].is_array())
        throw Error(ErrorCode::ConfigError, "weights: expected an array");
    for (std::size_t i = 0; i < j["weights"].size(); ++i) {
        const auto& w = j["weights"][i];
        const std::string where = "weights[" + std::to_string(i) + "]";
        if (!w.is_object() || !w.contains("shape") || !w["shape"].is_string())
            throw Error(ErrorCode::ConfigError, where + ".shape: expected a string");
        const auto shape = detail::at_field(where + ".shape", [&] { return weight_from_string(w["shape"].get<std::string>()); });
        std::vector<double> gammas;
        if (w.contains("gamma") && w["gamma"].is_number())
            gammas.push_back(w["gamma"].get<double>());
        else if (w.contains("gamma") && w["gamma"].is_array())
            for (const auto& g : w["gamma"]) {
                if (!g.is_number()) throw Error(ErrorCode::ConfigError, where + ".gamma: expected numbers");
                gammas.push_back(g.get<double>());
            }
        else
            throw Error(ErrorCode::ConfigError, where + ".gamma: expected a number or an array");
        for (double g : gammas) {
            const WeightSpec ws = detail::at_field(where + ".gamma", [&] { return WeightSpec(shape, g); });
            detail::at_field(where, [&] {
                TestSetup{cfg.null_family, ws, cfg.stat}.check();
                return 0;
            });
            cfg.columns.push_back({column_label(ws), ws});
        }
    }

    if (!j.contains("rows") || !j["rows"].is_array()) throw Error(ErrorCode::ConfigError, "rows: expected an array");
    for (std::size_t i = 0; i < j["rows"].size(); ++i) {
        const auto& r = j["rows"][i];
        const std::string where = "rows[" + std::to_string(i) + "]";
        if (!r.is_object()) throw Error(ErrorCode::ConfigError, where + ": expected an object");
        StudyRow row;
        if (r.contains("null") == r.contains("alt"))
            throw Error(ErrorCode::ConfigError, where + ": exactly one of 'null' or 'alt' is required");
        if (r.contains("null")) {
            const FamilySpec spec = family_spec_from_json(r["null"], where + ".null");
            if (spec.family != cfg.null_family)
                throw Error(ErrorCode::ConfigError, where + ".null.family: must match the study's null family");
            row.law = spec;
        } else {
            row.law = alt_spec_from_json(r["alt"], where + ".alt");
        }
        if (cfg.null_family == Family::Poisson && !is_discrete(row.law))
            throw Error(ErrorCode::ConfigError, where + ": a Poisson null needs a count-valued row");
        row.label = r.contains("label") && r["label"].is_string() ? r["label"].get<std::string>() : where;
        cfg.rows.push_back(std::move(row));
    }
    cfg.canonical = j.dump();
    return cfg;
}

//---------------------------------------------------------------------------//
// Tables
//---------------------------------------------------------------------------//

struct PowerCell {
    double rate = 0.0;
    std::size_t rejections = 0;
    std::size_t repetitions = 0;
    std::size_t estimation_failures = 0;
    std::string error;  // non-empty when the cell could not be computed

    bool failed() const { return !error.empty(); }
};

struct PowerTable {
    std::string name;
    std::vector<std::string> row_labels;
    std::vector<std::string> column_labels;
    std::vector<std::vector<PowerCell>> cells;  // [row][column]
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
    double wall_seconds = 0.0;
    nlohmann::json settings;
};

/// Progress callback: (cells done, total cells, row label, column label).
using StudyProgress = std::function<void(std::size_t, std::size_t, const std::string&, const std::string&)>;

/// Every (row, column) cell over cfg.repetitions repetitions. All columns of a row
/// see the same data sets; rows use independent seeds.
inline PowerTable run_study(const StudyConfig& cfg, unsigned threads = 0, const StudyProgress& progress = {}) {
    const auto start = std::chrono::steady_clock::now();
    PowerTable table;
    table.name = cfg.name;
    table.seed = cfg.seed;
    table.config_hash = detail::fnv1a(cfg.canonical);
    table.settings = {{"null", std::string(to_string(cfg.null_family))},
                      {"stat", std::string(to_string(cfg.stat))},
                      {"n", cfg.n},
                      {"alpha", cfg.alpha},
                      {"B", cfg.B},
                      {"repetitions", cfg.repetitions},
                      {"bootstrap", cfg.mode == BootstrapMode::Full ? "full" : "warp_speed"},
                      {"on_estimation_failure", std::string(to_string(cfg.on_estimation_failure))}};
    for (const auto& c : cfg.columns) table.column_labels.push_back(c.label);
    const std::size_t total = cfg.rows.size() * cfg.columns.size();
    std::size_t done = 0;
    for (std::size_t r = 0; r < cfg.rows.size(); ++r) {
        const auto& row = cfg.rows[r];
        table.row_labels.push_back(row.label);
        const std::uint64_t row_seed = mix64(cfg.seed, r);
        std::vector<PowerCell> cells;
        for (const auto& col : cfg.columns) {
            PowerCell cell;
            cell.repetitions = cfg.repetitions;
            try {
                const TestSetup setup{cfg.null_family, col.weight, cfg.stat};
                const PowerResult res =
                    cfg.mode == BootstrapMode::WarpSpeed
                        ? warp_speed_power(row.law, setup, cfg.n, cfg.repetitions, cfg.alpha, row_seed, threads,
                                           cfg.on_estimation_failure)
                        : full_bootstrap_power(row.law, setup, cfg.n, cfg.repetitions, cfg.B, cfg.alpha, row_seed,
                                               threads, cfg.on_estimation_failure);
                cell.rate = res.rate;
                cell.rejections = res.rejections;
                cell.estimation_failures = res.estimation_failures;
            } catch (const std::exception& e) {
                cell.error = e.what();
            }
            cells.push_back(std::move(cell));
            if (progress) progress(++done, total, row.label, col.label);
        }
        table.cells.push_back(std::move(cells));
    }
    table.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return table;
}

enum class TableFormat { Json, Tsv, Markdown };

inline TableFormat table_format_from_string(std::string_view s) {
    if (s == "json") return TableFormat::Json;
    if (s == "tsv") return TableFormat::Tsv;
    if (s == "markdown" || s == "md") return TableFormat::Markdown;
    throw Error(ErrorCode::InvalidArgument, "unknown table format '" + std::string(s) + "'");
}

inline std::string_view extension(TableFormat f) {
    switch (f) {
    case TableFormat::Json: return "json";
    case TableFormat::Tsv: return "tsv";
    case TableFormat::Markdown: return "md";
    }
    return "txt";
}

/// Integer percentage as displayed in the tables; failed cells show ERR.
inline std::string display_percent(const PowerCell& c) {
    if (c.failed()) return "ERR";
    return std::to_string(static_cast<long>(std::lround(100.0 * c.rate)));
}

inline nlohmann::json to_json(const PowerTable& t) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t r = 0; r < t.row_labels.size(); ++r) {
        nlohmann::json cells = nlohmann::json::array();
        for (std::size_t c = 0; c < t.column_labels.size(); ++c) {
            const auto& cell = t.cells[r][c];
            nlohmann::json jc = {{"column", t.column_labels[c]},
                                 {"rate", cell.rate},
                                 {"rejections", cell.rejections},
                                 {"repetitions", cell.repetitions},
                                 {"estimation_failures", cell.estimation_failures}};
            if (cell.failed()) jc["error"] = cell.error;
            cells.push_back(std::move(jc));
        }
        rows.push_back({{"label", t.row_labels[r]}, {"cells", std::move(cells)}});
    }
    std::ostringstream hash;
    hash << std::hex << std::setw(16) << std::setfill('0') << t.config_hash;
    return {{"name", t.name},
            {"columns", t.column_labels},
            {"rows", std::move(rows)},
            {"metadata",
             {{"config_hash", hash.str()}, {"seed", t.seed}, {"wall_seconds", t.wall_seconds}, {"settings", t.settings}}}};
}

inline std::string emit_table(const PowerTable& t, TableFormat format) {
    std::ostringstream out;
    switch (format) {
    case TableFormat::Json: out << to_json(t).dump(2) << "\n"; break;
    case TableFormat::Tsv:
        out << "row";
        for (const auto& c : t.column_labels) out << "\t" << c;
        out << "\n";
        for (std::size_t r = 0; r < t.row_labels.size(); ++r) {
            out << t.row_labels[r];
            for (const auto& cell : t.cells[r]) out << "\t" << display_percent(cell);
            out << "\n";
        }
        break;
    case TableFormat::Markdown:
        out << "| row |";
        for (const auto& c : t.column_labels) out << " " << c << " |";
        out << "\n|---|";
        for (std::size_t c = 0; c < t.column_labels.size(); ++c) out << "---:|";
        out << "\n";
        for (std::size_t r = 0; r < t.row_labels.size(); ++r) {
            out << "| " << t.row_labels[r] << " |";
            for (const auto& cell : t.cells[r]) out << " " << display_percent(cell) << " |";
            out << "\n";
        }
        break;
    }
    return out.str();
}

}  // namespace iawd

#endif  // IAWD_SIMHARNESS_HPP
