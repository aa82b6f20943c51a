// report.hpp: JSON summaries with 17 significant digits, CSV tables, atomic writes

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sbscatter/errors.hpp"

namespace sbscatter {

using json = nlohmann::ordered_json;

inline std::string format_double(double v) {
    if (std::isnan(v)) return "NaN";
    if (std::isinf(v)) return v > 0 ? "Infinity" : "-Infinity";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline json complex_json(std::complex<double> z) { return json::array({z.real(), z.imag()}); }

namespace detail {

inline void dump_json(const json& j, std::ostringstream& os, int indent, int depth) {
    // indent < 0 selects the compact single-line form.
    const bool compact = indent < 0;
    const std::string pad(compact ? 0 : static_cast<std::size_t>(indent * (depth + 1)), ' ');
    const std::string end_pad(compact ? 0 : static_cast<std::size_t>(indent * depth), ' ');
    const char* nl = compact ? "" : "\n";
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                os << "{}";
                return;
            }
            os << "{" << nl;
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) os << "," << nl;
                first = false;
                os << pad << json(it.key()).dump() << ": ";
                dump_json(it.value(), os, indent, depth + 1);
            }
            os << nl << end_pad << "}";
            return;
        }
        case json::value_t::array: {
            if (j.empty()) {
                os << "[]";
                return;
            }
            // Scalars stay on one line; arrays of objects or arrays get one element per line.
            const bool nested = !compact && std::any_of(j.begin(), j.end(), [](const json& v) {
                return v.is_object() || v.is_array();
            });
            os << "[" << (nested ? "\n" : "");
            bool first = true;
            for (const auto& v : j) {
                if (!first) os << (nested ? ",\n" : ", ");
                first = false;
                if (nested) os << pad;
                dump_json(v, os, indent, depth + 1);
            }
            os << (nested ? "\n" + end_pad : "") << "]";
            return;
        }
        case json::value_t::number_float: {
            const double v = j.get<double>();
            // JSON has no NaN/Inf literals; those serialize as null.
            os << (std::isfinite(v) ? format_double(v) : "null");
            return;
        }
        default:
            os << j.dump();
    }
}

}  // namespace detail

/// Deterministic JSON text: floats printed with %.17g.
inline std::string dump_json(const json& j, int indent = 2) {
    std::ostringstream os;
    detail::dump_json(j, os, indent, 0);
    if (indent >= 0) os << "\n";
    return os.str();
}

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(const std::vector<double>& values) {
        if (values.size() != header_.size()) throw ContractError("CsvTable: row width does not match header");
        std::vector<std::string> cells;
        for (double v : values) cells.push_back(format_double(v));
        rows_.push_back(std::move(cells));
    }

    void add_row(std::vector<std::string> cells) {
        if (cells.size() != header_.size()) throw ContractError("CsvTable: row width does not match header");
        rows_.push_back(std::move(cells));
    }

    std::size_t size() const { return rows_.size(); }

    std::string str() const {
        std::ostringstream os;
        write_line(os, header_);
        for (const auto& r : rows_) write_line(os, r);
        return os.str();
    }

private:
    static void write_line(std::ostringstream& os, const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
        os << "\n";
    }

    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

/// Writes to a temporary sibling and renames it into place.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp);
        out << content;
        if (!out) throw Error("write failed for " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace sbscatter
