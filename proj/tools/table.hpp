#ifndef POSTSEL_TOOLS_TABLE_HPP
#define POSTSEL_TOOLS_TABLE_HPP

#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "postsel/config.hpp"
#include "postsel/wigner.hpp"

namespace postsel::cli {

using Cell = std::variant<std::monostate, double, long long, bool, std::string>;

inline Cell opt_cell(const std::optional<double>& v) { return v ? Cell(*v) : Cell(std::monostate{}); }

/// Four-decimal rendering, kept as text so the table stays exact elsewhere.
inline Cell round4(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return std::string(buf);
}

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row) { rows.push_back(std::move(row)); }
};

inline void write_csv_cell(std::ostream& os, const Cell& c) {
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) os << detail::format_double(v);
            else if constexpr (std::is_same_v<T, long long>) os << v;
            else if constexpr (std::is_same_v<T, bool>) os << (v ? "true" : "false");
            else if constexpr (std::is_same_v<T, std::string>) os << v;
        },
        c);
}

inline void write_table(std::ostream& os, const Table& t, OutputFormat fmt) {
    if (fmt == OutputFormat::csv) {
        for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
        os << '\n';
        for (const auto& row : t.rows) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (i) os << ',';
                write_csv_cell(os, row[i]);
            }
            os << '\n';
        }
        return;
    }
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < row.size() && i < t.columns.size(); ++i) {
            std::visit(
                [&](const auto& v) {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, std::monostate>) obj[t.columns[i]] = nullptr;
                    else obj[t.columns[i]] = v;
                },
                row[i]);
        }
        arr.push_back(std::move(obj));
    }
    os << arr.dump(2) << '\n';
}

} // namespace postsel::cli

#endif // POSTSEL_TOOLS_TABLE_HPP
