#include "stegscan/csv.hpp"

#include <algorithm>

#include "stegscan/bytes.hpp"
#include "stegscan/error.hpp"

namespace stegscan::csv {

std::string escape(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string join(const Row& fields) {
    std::string line;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) line += ',';
        line += escape(fields[i]);
    }
    return line;
}

std::vector<Row> parse(std::string_view text) {
    std::vector<Row> rows;
    Row row;
    std::string field;
    bool quoted = false, at_line_start = true, skipping = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (skipping) {
            if (c == '\n') {
                skipping = false;
                at_line_start = true;
            }
            continue;
        }
        if (at_line_start && !quoted && c == '#') {
            skipping = true;
            continue;
        }
        at_line_start = false;
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            row.push_back(std::move(field));
            field.clear();
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            row.push_back(std::move(field));
            field.clear();
            if (row.size() > 1 || !row.front().empty()) rows.push_back(std::move(row));
            row.clear();
            at_line_start = true;
        } else {
            field += c;
        }
    }
    if (!field.empty() || !row.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::size_t Table::column(std::string_view name) const {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw Error(Errc::invalid_argument, "CSV has no column '" + std::string(name) + "'");
    return static_cast<std::size_t>(it - header.begin());
}

Table read_table(const std::filesystem::path& path) {
    const Bytes raw = read_file(path);
    auto rows = parse(std::string_view(reinterpret_cast<const char*>(raw.data()), raw.size()));
    Table t;
    if (rows.empty()) throw Error(Errc::invalid_argument, "empty CSV: " + path.string());
    t.header = std::move(rows.front());
    t.rows.assign(std::make_move_iterator(rows.begin() + 1), std::make_move_iterator(rows.end()));
    for (const auto& r : t.rows)
        if (r.size() != t.header.size())
            throw Error(Errc::invalid_argument, "ragged CSV row in " + path.string());
    return t;
}

}  // namespace stegscan::csv
