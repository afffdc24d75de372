#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <system_error>
#include <vector>

#include "macflow/errors.hpp"
#include "macflow/grid.hpp"

namespace macflow {

// Shortest round-trip decimal representation; '.' separator, no locale.
// All CSV/JSON numbers go through this so identical runs produce identical
// bytes.
inline std::string fmt_double(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    if (ec != std::errc())
        throw std::runtime_error("fmt_double: to_chars failed");
    return std::string(buf, ptr);
}

inline void ensure_dir(const std::filesystem::path& p) {
    if (p.empty()) return;
    std::error_code ec;
    std::filesystem::create_directories(p, ec);
    if (ec) throw ConfigError("cannot create directory '" + p.string() + "': " + ec.message());
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    ensure_dir(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open '" + path.string() + "' for writing");
    out << text;
}

// Field snapshot format: CSV with header r,v, one row per cell.
inline std::string field_csv(const Field& v) {
    std::string s = "r,v\n";
    for (int i = 0; i < v.size(); ++i) {
        s += fmt_double(v.grid.node(i));
        s += ',';
        s += fmt_double(v[i]);
        s += '\n';
    }
    return s;
}

inline std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path.string() + "'");
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

} // namespace macflow
