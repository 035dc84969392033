#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "evmarl/common.hpp"

namespace evmarl {

// 10 significant digits, shortest form. All numeric CSV cells go through
// here so files are byte-stable across runs.
inline std::string csv_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

inline std::string csv_num(std::uint64_t v) { return std::to_string(v); }
inline std::string csv_num(int v) { return std::to_string(v); }

// In-memory CSV table with a fixed header. Cells must not contain commas or
// newlines; nothing we emit does, and the writer enforces it.
class Csv {
  public:
    explicit Csv(std::vector<std::string> columns) : columns_(std::move(columns)) {
        if (columns_.empty()) throw contract_error("csv: no columns");
    }

    void add_row(std::vector<std::string> cells) {
        if (cells.size() != columns_.size())
            throw contract_error("csv: row width " + std::to_string(cells.size()) +
                                 " != header width " + std::to_string(columns_.size()));
        for (const auto& c : cells)
            if (c.find_first_of(",\n\r") != std::string::npos)
                throw contract_error("csv: cell contains a delimiter: " + c);
        rows_.push_back(std::move(cells));
    }

    std::size_t row_count() const { return rows_.size(); }
    const std::vector<std::string>& columns() const { return columns_; }
    const std::vector<std::vector<std::string>>& rows() const { return rows_; }

    std::string str() const {
        std::string out = join(columns_);
        for (const auto& r : rows_) out += join(r);
        return out;
    }

    void write(const std::string& path) const {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw config_error("csv: cannot open for writing: " + path);
        f << str();
        if (!f) throw config_error("csv: write failed: " + path);
    }

  private:
    static std::string join(const std::vector<std::string>& cells) {
        std::string line;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) line += ',';
            line += cells[i];
        }
        line += '\n';
        return line;
    }

    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

// Minimal reader for round-trip tests and the compare command's own output.
struct ParsedCsv {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    std::size_t col(const std::string& name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return i;
        throw contract_error("csv: no column named " + name);
    }
};

inline ParsedCsv parse_csv_text(const std::string& text) {
    ParsedCsv out;
    std::vector<std::string> cells;
    std::string cur;
    bool first_line = true;
    auto flush_line = [&] {
        cells.push_back(cur);
        cur.clear();
        if (first_line) {
            out.columns = cells;
            first_line = false;
        } else {
            if (cells.size() != out.columns.size())
                throw config_error("csv: ragged row while parsing");
            out.rows.push_back(cells);
        }
        cells.clear();
    };
    for (char ch : text) {
        if (ch == '\r') continue;
        if (ch == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (ch == '\n') {
            flush_line();
        } else {
            cur += ch;
        }
    }
    if (!cur.empty() || !cells.empty()) flush_line();  // tolerate missing final newline
    return out;
}

inline ParsedCsv read_csv(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw config_error("csv: cannot open: " + path);
    std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return parse_csv_text(text);
}

}  // namespace evmarl
