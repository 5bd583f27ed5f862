#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace stegscan::csv {

using Row = std::vector<std::string>;

std::string escape(std::string_view field);
std::string join(const Row& fields);

/// RFC 4180-style parse. Lines starting with '#' outside quotes are skipped.
std::vector<Row> parse(std::string_view text);

struct Table {
    Row header;
    std::vector<Row> rows;

    // Index of a header column; throws invalid_argument when absent.
    std::size_t column(std::string_view name) const;
    const std::string& at(const Row& row, std::string_view name) const { return row.at(column(name)); }
};

Table read_table(const std::filesystem::path& path);

}  // namespace stegscan::csv
