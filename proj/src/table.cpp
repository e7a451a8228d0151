#include "spanledger/table.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <system_error>

#include "spanledger/errors.hpp"

namespace spanledger {

std::string num9(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (x == 0.0) return "0";
    char buf[48];
    std::to_chars_result r{};
    if (std::abs(x) < 1e-3)
        r = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::scientific, 8);
    else
        r = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 9);
    return std::string(buf, r.ptr);
}

std::string intstr(std::int64_t v) { return std::to_string(v); }

std::string Table::to_csv() const {
    std::string out;
    for (const auto& c : comments) out += "# " + c + "\n";
    for (std::size_t i = 0; i < header.size(); ++i)
        out += header[i] + (i + 1 < header.size() ? "," : "");
    out += "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out += row[i] + (i + 1 < row.size() ? "," : "");
        out += "\n";
    }
    return out;
}

void atomic_write(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(target.parent_path(), ec);
        if (ec) throw config_error("cannot create directory '" +
                                   target.parent_path().string() + "': " + ec.message());
    }
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw config_error("cannot write '" + tmp.string() + "'");
        out << content;
        if (!out.flush()) throw config_error("short write to '" + tmp.string() + "'");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) throw config_error("cannot move '" + tmp.string() + "' into place: " + ec.message());
}

}  // namespace spanledger
