#pragma once
/**
 * @file grid.hpp
 * @brief Uniform Cartesian node grid, points, boxes and node index ranges.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "error.hpp"

namespace wk {

struct Vec3 {
    double x = 0, y = 0, z = 0;

    double operator[](int a) const { return a == 0 ? x : (a == 1 ? y : z); }
    double& operator[](int a) { return a == 0 ? x : (a == 1 ? y : z); }

    friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
    friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline double norm(Vec3 a) { return std::sqrt(a.x * a.x + a.y * a.y + a.z * a.z); }
inline double distance(Vec3 a, Vec3 b) { return norm(a - b); }

/// Axis-aligned box [lo, hi]. A default-constructed box is empty.
struct Box {
    Vec3 lo{}, hi{};
    bool empty = true;

    static Box of(Vec3 lo, Vec3 hi) { return Box{lo, hi, false}; }
    static Box around(Vec3 center, double half) {
        return of(center - Vec3{half, half, half}, center + Vec3{half, half, half});
    }

    bool contains(Vec3 p) const {
        if (empty) return false;
        for (int a = 0; a < 3; ++a)
            if (p[a] < lo[a] || p[a] > hi[a]) return false;
        return true;
    }

    Box expanded(Vec3 p) const {
        if (empty) return of(p, p);
        Box b = *this;
        for (int a = 0; a < 3; ++a) {
            b.lo[a] = std::min(b.lo[a], p[a]);
            b.hi[a] = std::max(b.hi[a], p[a]);
        }
        return b;
    }

    Box united(const Box& o) const {
        if (o.empty) return *this;
        return expanded(o.lo).expanded(o.hi);
    }

    double volume() const {
        return empty ? 0.0 : (hi.x - lo.x) * (hi.y - lo.y) * (hi.z - lo.z);
    }

    friend bool operator==(const Box&, const Box&) = default;
};

/// Euclidean distance from a point to a box (0 inside). Infinite for an empty box.
inline double distance(Vec3 p, const Box& b) {
    if (b.empty) return std::numeric_limits<double>::infinity();
    double s = 0;
    for (int a = 0; a < 3; ++a) {
        double d = std::max({b.lo[a] - p[a], 0.0, p[a] - b.hi[a]});
        s += d * d;
    }
    return std::sqrt(s);
}

struct Index3 {
    int i = 0, j = 0, k = 0;
    friend bool operator==(const Index3&, const Index3&) = default;
};

/// Inclusive node index range.
struct IndexBox {
    Index3 lo{}, hi{};

    int nx() const { return hi.i - lo.i + 1; }
    int ny() const { return hi.j - lo.j + 1; }
    int nz() const { return hi.k - lo.k + 1; }
    std::size_t size() const {
        return static_cast<std::size_t>(nx()) * static_cast<std::size_t>(ny()) *
               static_cast<std::size_t>(nz());
    }
    bool contains(Index3 p) const {
        return p.i >= lo.i && p.i <= hi.i && p.j >= lo.j && p.j <= hi.j && p.k >= lo.k &&
               p.k <= hi.k;
    }
    /// x-fastest offset of p inside the range.
    std::size_t offset(Index3 p) const {
        return static_cast<std::size_t>(p.i - lo.i) +
               static_cast<std::size_t>(nx()) *
                   (static_cast<std::size_t>(p.j - lo.j) +
                    static_cast<std::size_t>(ny()) * static_cast<std::size_t>(p.k - lo.k));
    }
    friend bool operator==(const IndexBox&, const IndexBox&) = default;
};

/// Uniform node grid: node(i,j,k) = origin + h*(i,j,k), stored x-fastest.
class Grid3 {
public:
    Grid3() = default;
    Grid3(int nx, int ny, int nz, double h, Vec3 origin = {})
        : nx_(nx), ny_(ny), nz_(nz), h_(h), origin_(origin) {
        require(nx >= 3 && ny >= 3 && nz >= 3, "grid needs at least 3 nodes per axis, got ", nx,
                "x", ny, "x", nz);
        require(h > 0 && std::isfinite(h), "grid spacing must be positive, got h=", h);
        require(std::isfinite(origin.x) && std::isfinite(origin.y) && std::isfinite(origin.z),
                "grid origin must be finite");
    }

    /// Grid of n^3 nodes centred on `center`.
    static Grid3 centered(int n, double h, Vec3 center = {}) {
        double half = 0.5 * h * (n - 1);
        return Grid3(n, n, n, h, center - Vec3{half, half, half});
    }

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    int nz() const { return nz_; }
    double h() const { return h_; }
    Vec3 origin() const { return origin_; }
    std::size_t size() const {
        return static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_) *
               static_cast<std::size_t>(nz_);
    }

    std::size_t linear(int i, int j, int k) const {
        return static_cast<std::size_t>(i) +
               static_cast<std::size_t>(nx_) *
                   (static_cast<std::size_t>(j) +
                    static_cast<std::size_t>(ny_) * static_cast<std::size_t>(k));
    }
    std::size_t linear(Index3 p) const { return linear(p.i, p.j, p.k); }

    Index3 unlinear(std::size_t n) const {
        Index3 p;
        p.i = static_cast<int>(n % nx_);
        n /= nx_;
        p.j = static_cast<int>(n % ny_);
        p.k = static_cast<int>(n / ny_);
        return p;
    }

    Vec3 node(int i, int j, int k) const {
        return {origin_.x + h_ * i, origin_.y + h_ * j, origin_.z + h_ * k};
    }
    Vec3 node(Index3 p) const { return node(p.i, p.j, p.k); }

    /// Nearest node index, unclamped.
    Index3 nearest(Vec3 p) const {
        return {static_cast<int>(std::lround((p.x - origin_.x) / h_)),
                static_cast<int>(std::lround((p.y - origin_.y) / h_)),
                static_cast<int>(std::lround((p.z - origin_.z) / h_))};
    }

    bool in_range(Index3 p) const {
        return p.i >= 0 && p.i < nx_ && p.j >= 0 && p.j < ny_ && p.k >= 0 && p.k < nz_;
    }

    /// Node if p coincides with one (relative tolerance 1e-9 of h).
    bool is_node(Vec3 p) const {
        Index3 q = nearest(p);
        return in_range(q) && distance(node(q), p) <= 1e-9 * h_;
    }

    /// True when p sits at the centre of a grid cell (offset h/2 on every axis).
    bool is_cell_center(Vec3 p) const {
        for (int a = 0; a < 3; ++a) {
            double u = (p[a] - origin_[a]) / h_ - 0.5;
            if (std::abs(u - std::round(u)) > 1e-9) return false;
        }
        return true;
    }

    Box bounds() const { return Box::of(origin_, node(nx_ - 1, ny_ - 1, nz_ - 1)); }

    IndexBox all() const { return {{0, 0, 0}, {nx_ - 1, ny_ - 1, nz_ - 1}}; }

    /// Smallest index range whose nodes cover every node inside `b`.
    IndexBox nodes_in(const Box& b) const {
        require(!b.empty, "empty region");
        IndexBox r;
        r.lo = {static_cast<int>(std::ceil((b.lo.x - origin_.x) / h_ - 1e-9)),
                static_cast<int>(std::ceil((b.lo.y - origin_.y) / h_ - 1e-9)),
                static_cast<int>(std::ceil((b.lo.z - origin_.z) / h_ - 1e-9))};
        r.hi = {static_cast<int>(std::floor((b.hi.x - origin_.x) / h_ + 1e-9)),
                static_cast<int>(std::floor((b.hi.y - origin_.y) / h_ + 1e-9)),
                static_cast<int>(std::floor((b.hi.z - origin_.z) / h_ + 1e-9))};
        r.lo = {std::max(r.lo.i, 0), std::max(r.lo.j, 0), std::max(r.lo.k, 0)};
        r.hi = {std::min(r.hi.i, nx_ - 1), std::min(r.hi.j, ny_ - 1), std::min(r.hi.k, nz_ - 1)};
        require(r.lo.i <= r.hi.i && r.lo.j <= r.hi.j && r.lo.k <= r.hi.k,
                "region contains no grid nodes");
        return r;
    }

    /// Grid extended by `pad[face]` nodes on each face (order: -x,+x,-y,+y,-z,+z).
    Grid3 padded(const std::array<int, 6>& pad) const {
        return Grid3(nx_ + pad[0] + pad[1], ny_ + pad[2] + pad[3], nz_ + pad[4] + pad[5], h_,
                     origin_ - Vec3{h_ * pad[0], h_ * pad[2], h_ * pad[4]});
    }

    friend bool operator==(const Grid3&, const Grid3&) = default;

private:
    int nx_ = 3, ny_ = 3, nz_ = 3;
    double h_ = 1.0;
    Vec3 origin_{};
};

using Field = std::vector<double>;

}  // namespace wk
