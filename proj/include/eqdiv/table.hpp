#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace eqdiv {

/// Row-oriented result table emitted as CSV (header row first, then
/// '#'-prefixed metadata comments, then data) or as JSON lines mirroring
/// the columns. Numbers print with 12 significant digits, LF endings.
class Table {
public:
    using Cell = std::variant<double, long long, bool, std::string>;

    explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    void comment(std::string line) { comments_.push_back(std::move(line)); }

    void add_row(std::vector<Cell> row) { rows_.push_back(std::move(row)); }

    static std::string format(const Cell& c) {
        if (std::holds_alternative<double>(c)) {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.12g", std::get<double>(c));
            return buf;
        }
        if (std::holds_alternative<long long>(c))
            return std::to_string(std::get<long long>(c));
        if (std::holds_alternative<bool>(c)) return std::get<bool>(c) ? "true" : "false";
        return std::get<std::string>(c);
    }

    void write_csv(std::ostream& os) const {
        for (std::size_t i = 0; i < columns_.size(); ++i)
            os << (i ? "," : "") << columns_[i];
        os << '\n';
        for (const auto& c : comments_) os << "# " << c << '\n';
        for (const auto& row : rows_) {
            for (std::size_t i = 0; i < row.size(); ++i)
                os << (i ? "," : "") << format(row[i]);
            os << '\n';
        }
    }

    void write_jsonl(std::ostream& os) const {
        for (const auto& row : rows_) {
            os << '{';
            for (std::size_t i = 0; i < row.size() && i < columns_.size(); ++i) {
                if (i) os << ',';
                os << '"' << columns_[i] << "\":";
                const Cell& c = row[i];
                if (std::holds_alternative<std::string>(c))
                    os << '"' << std::get<std::string>(c) << '"';
                else if (std::holds_alternative<double>(c) &&
                         !(std::get<double>(c) == std::get<double>(c)))
                    os << "null";  // NaN is not valid JSON
                else
                    os << format(c);
            }
            os << "}\n";
        }
    }

    const std::vector<std::vector<Cell>>& rows() const { return rows_; }

private:
    std::vector<std::string> columns_;
    std::vector<std::string> comments_;
    std::vector<std::vector<Cell>> rows_;
};

} // namespace eqdiv
