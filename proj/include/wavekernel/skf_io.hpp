#pragma once
/**
 * @file skf_io.hpp
 * @brief SKF1 binary field files (little-endian).
 *
 * Layout:
 *   "SKF1" | u32 version=1 | u32 nx, ny, nz | f64 h | f64 origin[3] | u32 kind | payload
 *
 *   kind 0 (medium):     nx*ny*nz f64, x-fastest
 *   kind 1 (kernel set): u32 nt | f64 dt | f64 xi[3] | u64 medium fingerprint
 *                        | (nt+1) frames of nx*ny*nz f64 | u64 FNV-1a of all preceding bytes
 *   kind 2 (frame set):  u32 nt | f64 dt | (nt+1) frames | u64 FNV-1a trailer
 *
 * Frame n of a kind 1/2 file starts at a fixed offset: header + n * frame bytes.
 */

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "grid.hpp"
#include "hash.hpp"
#include "medium.hpp"

namespace wk {

static_assert(std::endian::native == std::endian::little, "SKF1 I/O assumes a little-endian host");

enum class PayloadKind : std::uint32_t { Medium = 0, KernelFrames = 1, Frames = 2 };

/// Time-indexed scalar fields on a common grid: frames 0..steps at t = n*dt.
struct FrameSet {
    Grid3 grid;
    double dt = 0;
    Field data;  // (steps+1) * grid.size()

    FrameSet() = default;
    FrameSet(Grid3 g, double dt_, std::size_t frames)
        : grid(g), dt(dt_), data(frames * g.size(), 0.0) {}

    std::size_t frame_count() const { return grid.size() ? data.size() / grid.size() : 0; }
    std::size_t steps() const { return frame_count() - 1; }
    std::span<double> frame(std::size_t n) {
        return {data.data() + n * grid.size(), grid.size()};
    }
    std::span<const double> frame(std::size_t n) const {
        return {data.data() + n * grid.size(), grid.size()};
    }
};

/// Trilinear value of frame n at a point of the frame grid.
inline double interpolate(const FrameSet& fs, Vec3 x, std::size_t n) {
    const Grid3& g = fs.grid;
    double u[3];
    int base[3];
    const int dims[3] = {g.nx(), g.ny(), g.nz()};
    for (int a = 0; a < 3; ++a) {
        double q = (x[a] - g.origin()[a]) / g.h();
        require(q >= -1e-9 && q <= dims[a] - 1 + 1e-9, "query point (", x.x, ",", x.y, ",", x.z,
                ") outside the recorded region");
        int b = std::clamp(static_cast<int>(std::floor(q)), 0, dims[a] - 2);
        base[a] = b;
        u[a] = std::clamp(q - b, 0.0, 1.0);
    }
    auto f = fs.frame(n);
    double v = 0;
    for (int c = 0; c < 8; ++c) {
        int di = c & 1, dj = (c >> 1) & 1, dk = (c >> 2) & 1;
        double wgt = (di ? u[0] : 1 - u[0]) * (dj ? u[1] : 1 - u[1]) * (dk ? u[2] : 1 - u[2]);
        if (wgt == 0.0) continue;
        v += wgt * f[g.linear(base[0] + di, base[1] + dj, base[2] + dk)];
    }
    return v;
}

struct KernelMeta {
    Vec3 xi{};
    std::uint64_t fingerprint = 0;
};

namespace skf {

inline constexpr std::size_t kGridHeaderBytes = 4 + 4 + 12 + 8 + 24 + 4;
inline constexpr std::size_t kKernelHeaderBytes = 4 + 8 + 24 + 8;
inline constexpr std::size_t kFramesHeaderBytes = 4 + 8;

class Writer {
public:
    template <class T>
    void put(const T& v) {
        const auto* p = reinterpret_cast<const char*>(&v);
        buf_.insert(buf_.end(), p, p + sizeof(T));
    }
    void put(std::span<const double> v) {
        const auto* p = reinterpret_cast<const char*>(v.data());
        buf_.insert(buf_.end(), p, p + v.size_bytes());
    }
    void put_checksum() {
        Fnv1a64 f;
        f.update(buf_.data(), buf_.size());
        put(f.digest());
    }
    const std::vector<char>& bytes() const { return buf_; }

private:
    std::vector<char> buf_;
};

class Reader {
public:
    Reader(std::vector<char> bytes, std::string name) : buf_(std::move(bytes)), name_(std::move(name)) {}

    template <class T>
    T get() {
        need(sizeof(T));
        T v;
        std::memcpy(&v, buf_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return v;
    }
    void get(std::span<double> out) {
        need(out.size_bytes());
        std::memcpy(out.data(), buf_.data() + pos_, out.size_bytes());
        pos_ += out.size_bytes();
    }
    void expect_size(std::size_t total) const {
        require(buf_.size() == total, name_, ": expected ", total, " bytes, file has ",
                buf_.size());
    }
    void verify_checksum() const {
        Fnv1a64 f;
        f.update(buf_.data(), pos_);
        std::uint64_t stored;
        std::memcpy(&stored, buf_.data() + pos_, sizeof stored);
        require(stored == f.digest(), name_, ": checksum mismatch (stored ", hex64(stored),
                ", computed ", hex64(f.digest()), "); file is corrupted");
    }
    std::size_t size() const { return buf_.size(); }

private:
    void need(std::size_t n) const {
        require(pos_ + n <= buf_.size(), name_, ": truncated, expected at least ", pos_ + n,
                " bytes, file has ", buf_.size());
    }
    std::vector<char> buf_;
    std::string name_;
    std::size_t pos_ = 0;
};

inline void put_grid(Writer& w, const Grid3& g, PayloadKind kind) {
    w.put<char>('S');
    w.put<char>('K');
    w.put<char>('F');
    w.put<char>('1');
    w.put<std::uint32_t>(1);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(g.nx()));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(g.ny()));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(g.nz()));
    w.put(g.h());
    w.put(g.origin().x);
    w.put(g.origin().y);
    w.put(g.origin().z);
    w.put(static_cast<std::uint32_t>(kind));
}

struct Header {
    Grid3 grid;
    PayloadKind kind;
};

inline Header get_grid(Reader& r, const std::string& name) {
    char magic[4];
    for (char& c : magic) c = r.get<char>();
    require(std::memcmp(magic, "SKF1", 4) == 0, name, ": bad magic, not an SKF1 file");
    auto version = r.get<std::uint32_t>();
    require(version == 1, name, ": unsupported SKF1 version ", version, " (expected 1)");
    auto nx = r.get<std::uint32_t>();
    auto ny = r.get<std::uint32_t>();
    auto nz = r.get<std::uint32_t>();
    double h = r.get<double>();
    Vec3 o{r.get<double>(), r.get<double>(), r.get<double>()};
    auto kind = r.get<std::uint32_t>();
    require(kind <= 2, name, ": unknown payload kind ", kind);
    require(nx < (1u << 20) && ny < (1u << 20) && nz < (1u << 20), name,
            ": implausible dimensions ", nx, "x", ny, "x", nz);
    return {Grid3(static_cast<int>(nx), static_cast<int>(ny), static_cast<int>(nz), h, o),
            static_cast<PayloadKind>(kind)};
}

inline std::vector<char> slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), "cannot open ", path.string());
    return std::vector<char>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

/// Writes to a sibling temp file and renames it into place.
inline void write_atomic(const std::filesystem::path& path, const std::vector<char>& bytes) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        require(static_cast<bool>(out), "cannot write ", tmp.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        require(static_cast<bool>(out), "write failed for ", tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

inline void check_finite(std::span<const double> v, const Grid3& g, const std::string& name) {
    for (std::size_t n = 0; n < v.size(); ++n) {
        if (!std::isfinite(v[n])) {
            Index3 p = g.unlinear(n % g.size());
            throw ConfigError(detail::cat(name, ": non-finite value at node (", p.i, ",", p.j,
                                          ",", p.k, ")", v.size() > g.size() ? " of frame " : "",
                                          v.size() > g.size() ? std::to_string(n / g.size()) : ""));
        }
    }
}

}  // namespace skf

inline void save_medium(const Medium& m, const std::filesystem::path& path) {
    skf::Writer w;
    skf::put_grid(w, m.grid(), PayloadKind::Medium);
    w.put(std::span<const double>(m.values()));
    skf::write_atomic(path, w.bytes());
}

inline Medium load_medium(const std::filesystem::path& path) {
    const std::string name = path.string();
    skf::Reader r(skf::slurp(path), name);
    skf::Header hd = skf::get_grid(r, name);
    require(hd.kind == PayloadKind::Medium, name, ": payload kind ",
            static_cast<std::uint32_t>(hd.kind), " is not a medium (0)");
    r.expect_size(skf::kGridHeaderBytes + hd.grid.size() * sizeof(double));
    Field c(hd.grid.size());
    r.get(c);
    skf::check_finite(c, hd.grid, name);
    return Medium(hd.grid, std::move(c));
}

/// Kind 1 when `meta` is set, kind 2 otherwise.
inline void save_frames(const FrameSet& fs, const std::filesystem::path& path,
                        std::optional<KernelMeta> meta = std::nullopt) {
    skf::Writer w;
    skf::put_grid(w, fs.grid, meta ? PayloadKind::KernelFrames : PayloadKind::Frames);
    w.put(static_cast<std::uint32_t>(fs.steps()));
    w.put(fs.dt);
    if (meta) {
        w.put(meta->xi.x);
        w.put(meta->xi.y);
        w.put(meta->xi.z);
        w.put(meta->fingerprint);
    }
    w.put(std::span<const double>(fs.data));
    w.put_checksum();
    skf::write_atomic(path, w.bytes());
}

struct LoadedFrames {
    FrameSet frames;
    std::optional<KernelMeta> meta;
};

inline LoadedFrames load_frames(const std::filesystem::path& path) {
    const std::string name = path.string();
    skf::Reader r(skf::slurp(path), name);
    skf::Header hd = skf::get_grid(r, name);
    require(hd.kind != PayloadKind::Medium, name, ": payload is a medium, not a frame set");
    auto nt = r.get<std::uint32_t>();
    double dt = r.get<double>();
    LoadedFrames out;
    std::size_t header = skf::kGridHeaderBytes + skf::kFramesHeaderBytes;
    if (hd.kind == PayloadKind::KernelFrames) {
        KernelMeta m;
        m.xi = {r.get<double>(), r.get<double>(), r.get<double>()};
        m.fingerprint = r.get<std::uint64_t>();
        out.meta = m;
        header = skf::kGridHeaderBytes + skf::kKernelHeaderBytes;
    }
    std::size_t frames = static_cast<std::size_t>(nt) + 1;
    r.expect_size(header + frames * hd.grid.size() * sizeof(double) + sizeof(std::uint64_t));
    require(dt > 0 && std::isfinite(dt), name, ": invalid time step ", dt);
    out.frames = FrameSet(hd.grid, dt, frames);
    r.get(out.frames.data);
    r.verify_checksum();
    skf::check_finite(out.frames.data, hd.grid, name);
    return out;
}

}  // namespace wk
