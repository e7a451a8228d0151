#pragma once
#include <cstdint>
#include <string>
#include <vector>

// Tabular emission with reproducible number formatting: 9 significant digits,
// scientific notation below 1e-3, locale-independent, LF line endings.
namespace spanledger {

std::string num9(double x);
std::string intstr(std::int64_t v);

struct Table {
    std::vector<std::string> comments;  // emitted as leading '# ' lines
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> cells) { rows.push_back(std::move(cells)); }
    std::string to_csv() const;
};

// write via a temp file + rename so readers never observe partial output
void atomic_write(const std::string& path, const std::string& content);

}  // namespace spanledger
