#pragma once

// Self-describing result tables. CSV output starts with `# config: <json>`
// and `# meta: <json>` comment lines, then a header row and data rows. The
// JSON form carries the same content in one document.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "qcomp/errors.hpp"
#include "qcomp/settings.hpp"

namespace qcomp {

using Json = nlohmann::ordered_json;

/// One table cell; std::monostate marks a value that was not computed.
using Cell = std::variant<std::monostate, bool, std::int64_t, std::uint64_t, double, std::string>;

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    Json meta = Json::object();
    Config config;

    void add_row(std::vector<Cell> row) {
        if (row.size() != columns.size())
            throw InvalidParameter("table " + name + ": row width does not match the header");
        rows.push_back(std::move(row));
    }
    std::size_t column(const std::string& label) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == label) return i;
        throw InvalidParameter("table " + name + " has no column " + label);
    }
};

enum class OutputFormat { Csv, Json };

inline OutputFormat parse_format(const std::string& text) {
    if (text == "csv") return OutputFormat::Csv;
    if (text == "json") return OutputFormat::Json;
    throw InvalidParameter("--format must be csv or json, got '" + text + "'");
}

namespace detail {

inline std::string format_cell(const Cell& cell) {
    struct Visitor {
        std::string operator()(std::monostate) const { return ""; }
        std::string operator()(bool v) const { return v ? "true" : "false"; }
        std::string operator()(std::int64_t v) const { return std::to_string(v); }
        std::string operator()(std::uint64_t v) const { return std::to_string(v); }
        std::string operator()(double v) const {
            if (std::isnan(v)) return "nan";
            char buffer[64];
            // Shortest representation that round-trips.
            const auto result = std::to_chars(buffer, buffer + sizeof buffer, v);
            return std::string(buffer, result.ptr);
        }
        std::string operator()(const std::string& v) const { return v; }
    };
    return std::visit(Visitor{}, cell);
}

inline Json cell_json(const Cell& cell) {
    struct Visitor {
        Json operator()(std::monostate) const { return nullptr; }
        Json operator()(bool v) const { return v; }
        Json operator()(std::int64_t v) const { return v; }
        Json operator()(std::uint64_t v) const { return v; }
        Json operator()(double v) const { return std::isfinite(v) ? Json(v) : Json(nullptr); }
        Json operator()(const std::string& v) const { return v; }
    };
    return std::visit(Visitor{}, cell);
}

inline Json config_json(const Config& config) {
    Json out = Json::object();
    for (const auto& [key, value] : config) out[key] = value;
    return out;
}

}  // namespace detail

inline std::string render_csv(const Table& table) {
    std::ostringstream out;
    out << "# config: " << detail::config_json(table.config).dump() << '\n';
    out << "# meta: " << table.meta.dump() << '\n';
    for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << detail::format_cell(row[i]);
        out << '\n';
    }
    return out.str();
}

inline std::string render_json(const Table& table) {
    Json doc;
    doc["name"] = table.name;
    doc["config"] = detail::config_json(table.config);
    doc["meta"] = table.meta;
    doc["columns"] = table.columns;
    Json rows = Json::array();
    for (const auto& row : table.rows) {
        Json cells = Json::array();
        for (const auto& cell : row) cells.push_back(detail::cell_json(cell));
        rows.push_back(std::move(cells));
    }
    doc["rows"] = std::move(rows);
    return doc.dump(2) + "\n";
}

inline std::string render(const Table& table, OutputFormat format) {
    return format == OutputFormat::Csv ? render_csv(table) : render_json(table);
}

namespace detail {
inline Config config_from_json(const Json& object) {
    if (!object.is_object()) throw InvalidParameter("embedded config is not an object");
    Config config;
    for (const auto& [key, value] : object.items()) config[key] = value.get<std::string>();
    return config;
}
}  // namespace detail

/// Recovers the embedded config from CSV or JSON output.
inline Config parse_embedded_config(const std::string& document) {
    if (document.rfind("# config: ", 0) == 0) {
        const auto end = document.find('\n');
        return detail::config_from_json(Json::parse(document.substr(10, end - 10)));
    }
    const Json doc = Json::parse(document);
    return detail::config_from_json(doc.at("config"));
}

/// Writes `<directory>/<table name>.<csv|json>` and returns the path.
inline std::filesystem::path write_table(const Table& table, const std::filesystem::path& directory,
                                         OutputFormat format) {
    std::error_code error;
    std::filesystem::create_directories(directory, error);
    if (error) throw IoError("cannot create output directory " + directory.string() + ": " + error.message());
    const auto path = directory / (table.name + (format == OutputFormat::Csv ? ".csv" : ".json"));
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << render(table, format);
    out.flush();
    if (!out) throw IoError("failed writing " + path.string());
    return path;
}

}  // namespace qcomp
