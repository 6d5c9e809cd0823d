#pragma once

// CSV/JSON emission for the CLI: locale-free, stable key order, fixed
// significant-digit policy (10 digits in CSV for plotting, 17 in JSON so a
// reparse reproduces the double bit for bit).

#include <cstdio>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace trielab {

enum class TableFormat { csv, json };

struct Cell {
    std::variant<std::string, double, long long> value;

    Cell(const char* s) : value(std::string(s)) {}
    Cell(std::string s) : value(std::move(s)) {}
    Cell(double v) : value(v) {}
    Cell(long long v) : value(v) {}
    Cell(unsigned long long v) : value(static_cast<long long>(v)) {}
    Cell(int v) : value(static_cast<long long>(v)) {}
    Cell(std::size_t v) : value(static_cast<long long>(v)) {}
};

namespace detail {

inline std::string format_double(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
    return buf;
}

inline std::string csv_quote(const std::string& s) {
    bool need = s.find_first_of(",\"\n") != std::string::npos;
    if (!need) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline std::string json_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    out += '"';
    return out;
}

inline std::string cell_text(const Cell& c, int float_digits, bool json) {
    if (std::holds_alternative<std::string>(c.value)) {
        const auto& s = std::get<std::string>(c.value);
        return json ? json_quote(s) : csv_quote(s);
    }
    if (std::holds_alternative<long long>(c.value))
        return std::to_string(std::get<long long>(c.value));
    return format_double(std::get<double>(c.value), float_digits);
}

}  // namespace detail

// One tabular result: command echo, ordered parameters, named columns, rows.
class OutputRecord {
  public:
    explicit OutputRecord(std::string command) : command_(std::move(command)) {}

    void param(const std::string& key, Cell value) { params_.emplace_back(key, std::move(value)); }
    void columns(std::vector<std::string> names) { columns_ = std::move(names); }
    void row(std::vector<Cell> cells) { rows_.push_back(std::move(cells)); }

    void write(std::ostream& os, TableFormat fmt) const {
        if (fmt == TableFormat::csv)
            write_csv(os);
        else
            write_json(os);
    }

  private:
    void write_csv(std::ostream& os) const {
        os << "# command=" << command_;
        for (const auto& [k, v] : params_)
            os << ' ' << k << '=' << detail::cell_text(v, 10, false);
        os << '\n';
        for (std::size_t i = 0; i < columns_.size(); ++i) {
            if (i) os << ',';
            os << detail::csv_quote(columns_[i]);
        }
        os << '\n';
        for (const auto& r : rows_) {
            for (std::size_t i = 0; i < r.size(); ++i) {
                if (i) os << ',';
                os << detail::cell_text(r[i], 10, false);
            }
            os << '\n';
        }
    }

    void write_json(std::ostream& os) const {
        os << "{\n  \"command\": " << detail::json_quote(command_) << ",\n  \"params\": {";
        for (std::size_t i = 0; i < params_.size(); ++i) {
            if (i) os << ", ";
            os << detail::json_quote(params_[i].first) << ": "
               << detail::cell_text(params_[i].second, 17, true);
        }
        os << "},\n  \"columns\": [";
        for (std::size_t i = 0; i < columns_.size(); ++i) {
            if (i) os << ", ";
            os << detail::json_quote(columns_[i]);
        }
        os << "],\n  \"rows\": [\n";
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            os << "    [";
            for (std::size_t i = 0; i < rows_[r].size(); ++i) {
                if (i) os << ", ";
                os << detail::cell_text(rows_[r][i], 17, true);
            }
            os << (r + 1 < rows_.size() ? "],\n" : "]\n");
        }
        os << "  ]\n}\n";
    }

    std::string command_;
    std::vector<std::pair<std::string, Cell>> params_;
    std::vector<std::string> columns_;
    std::vector<std::vector<Cell>> rows_;
};

}  // namespace trielab
