#pragma once
// Plain CSV exchange: probe lists, (t, value) series and x,y,z,t,value tables.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "grid.hpp"
#include "representation.hpp"
#include "skf_io.hpp"

namespace wk::csv {

namespace detail {

inline std::string num(double v) {
    char buf[32];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

/// Numeric rows of a file; a first line that does not parse is taken as a header.
inline std::vector<std::vector<double>> read_rows(const std::filesystem::path& path, std::size_t width) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path.string());
    std::vector<std::vector<double>> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos || line[line.find_first_not_of(" \t")] == '#')
            continue;
        std::vector<double> row;
        bool ok = true;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            auto b = cell.find_first_not_of(" \t"), e = cell.find_last_not_of(" \t");
            std::string_view v = b == std::string::npos ? std::string_view{} : std::string_view(cell).substr(b, e - b + 1);
            double d = 0;
            auto r = std::from_chars(v.data(), v.data() + v.size(), d);
            if (v.empty() || r.ec != std::errc() || r.ptr != v.data() + v.size()) {
                ok = false;
                break;
            }
            row.push_back(d);
        }
        if (!ok) {
            if (rows.empty() && lineno == 1) continue;
            throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": cannot parse '" + line + "'");
        }
        require(row.size() == width, path.string(), ":", lineno, ": expected ", width, " columns, got ", row.size());
        rows.push_back(std::move(row));
    }
    return rows;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw ConfigError("cannot write " + path.string());
        out << text;
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace detail

/// x,y,z per line.
inline std::vector<Vec3> read_points(const std::filesystem::path& path) {
    std::vector<Vec3> pts;
    for (const auto& r : detail::read_rows(path, 3)) pts.push_back({r[0], r[1], r[2]});
    require(!pts.empty(), path.string(), ": no probe points");
    return pts;
}

struct Series {
    std::vector<double> t, value;
};

/// t,value per line on a uniform time grid.
inline Series read_series(const std::filesystem::path& path) {
    Series s;
    for (const auto& r : detail::read_rows(path, 2)) {
        s.t.push_back(r[0]);
        s.value.push_back(r[1]);
    }
    require(s.t.size() >= 2, path.string(), ": need at least 2 samples");
    const double dt = s.t[1] - s.t[0];
    require(dt > 0, path.string(), ": times must increase");
    for (std::size_t i = 1; i < s.t.size(); ++i)
        require(std::abs((s.t[i] - s.t[0]) - static_cast<double>(i) * dt) <= 1e-9 * std::max(1.0, std::abs(s.t[i])),
                path.string(), ": non-uniform time spacing at row ", i);
    return s;
}

inline void write_series(const std::filesystem::path& path, const std::vector<double>& t,
                         const std::vector<double>& v, const std::string& header = "t,value") {
    std::string out = header + "\n";
    for (std::size_t i = 0; i < t.size(); ++i) out += detail::num(t[i]) + "," + detail::num(v[i]) + "\n";
    detail::write_text(path, out);
}

inline std::string table(const QueryResult& r) {
    std::string out = "x,y,z,t,value\n";
    for (std::size_t p = 0; p < r.query.points.size(); ++p) {
        const Vec3 x = r.query.points[p];
        const std::string xs = detail::num(x.x) + "," + detail::num(x.y) + "," + detail::num(x.z) + ",";
        for (std::size_t s = 0; s < r.query.steps.size(); ++s)
            out += xs + detail::num(static_cast<double>(r.query.steps[s]) * r.dt) + "," + detail::num(r.at(p, s)) +
                   "\n";
    }
    return out;
}

inline void write_table(const std::filesystem::path& path, const QueryResult& r) { detail::write_text(path, table(r)); }

/// Frame set as x,y,z,t,value, optionally a single step.
inline void write_frames(const std::filesystem::path& path, const FrameSet& fs, std::ptrdiff_t only_step = -1) {
    std::string out = "x,y,z,t,value\n";
    const Grid3& g = fs.grid;
    for (std::size_t n = 0; n <= fs.steps(); ++n) {
        if (only_step >= 0 && n != static_cast<std::size_t>(only_step)) continue;
        auto f = fs.frame(n);
        const std::string ts = detail::num(static_cast<double>(n) * fs.dt);
        for (int k = 0; k < g.nz(); ++k)
            for (int j = 0; j < g.ny(); ++j)
                for (int i = 0; i < g.nx(); ++i) {
                    Vec3 x = g.node(i, j, k);
                    out += detail::num(x.x) + "," + detail::num(x.y) + "," + detail::num(x.z) + "," + ts + "," +
                           detail::num(f[g.linear(i, j, k)]) + "\n";
                }
    }
    detail::write_text(path, out);
}

}  // namespace wk::csv
