#ifndef RANGELAB_LATTICE_HPP
#define RANGELAB_LATTICE_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <vector>

namespace rangelab {

/// Maximum lattice dimension supported at compile time.  Runtime dimension
/// d is carried by the surrounding context (trajectory, table, config);
/// coordinates beyond d stay zero so equality and hashing work uniformly.
inline constexpr int kMaxDim = 6;

struct Point {
    std::array<std::int32_t, kMaxDim> c{};

    std::int32_t operator[](int i) const { return c[i]; }
    std::int32_t& operator[](int i) { return c[i]; }

    friend bool operator==(const Point& a, const Point& b) { return a.c == b.c; }
    friend bool operator!=(const Point& a, const Point& b) { return !(a == b); }
    friend bool operator<(const Point& a, const Point& b) { return a.c < b.c; }

    Point shifted(int axis, std::int32_t delta) const {
        Point q = *this;
        q.c[axis] += delta;
        return q;
    }

    friend Point operator+(const Point& a, const Point& b) {
        Point q;
        for (int i = 0; i < kMaxDim; ++i) q.c[i] = a.c[i] + b.c[i];
        return q;
    }
    friend Point operator-(const Point& a, const Point& b) {
        Point q;
        for (int i = 0; i < kMaxDim; ++i) q.c[i] = a.c[i] - b.c[i];
        return q;
    }
    friend Point operator-(const Point& a) {
        Point q;
        for (int i = 0; i < kMaxDim; ++i) q.c[i] = -a.c[i];
        return q;
    }
};

inline std::uint64_t hash_point(const Point& p) {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (int i = 0; i < kMaxDim; i += 2) {
        std::uint64_t w = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(p.c[i])) << 32) |
                          static_cast<std::uint32_t>(p.c[i + 1]);
        h ^= w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        h *= 0xff51afd7ed558ccdULL;
        h ^= h >> 33;
    }
    return h;
}

struct PointHash {
    std::size_t operator()(const Point& p) const { return static_cast<std::size_t>(hash_point(p)); }
};

inline std::int64_t norm2_sq(const Point& p) {
    std::int64_t s = 0;
    for (int i = 0; i < kMaxDim; ++i) s += static_cast<std::int64_t>(p.c[i]) * p.c[i];
    return s;
}

inline double norm2(const Point& p) { return std::sqrt(static_cast<double>(norm2_sq(p))); }

inline std::int64_t dist_sq(const Point& a, const Point& b) { return norm2_sq(a - b); }

inline std::int64_t norm1(const Point& p) {
    std::int64_t s = 0;
    for (int i = 0; i < kMaxDim; ++i) s += std::abs(static_cast<std::int64_t>(p.c[i]));
    return s;
}

inline Point origin() { return Point{}; }

inline Point unit(int axis, int sign = +1) {
    Point p;
    p.c[axis] = sign;
    return p;
}

/// The 2d nearest neighbors of p, in the fixed order +e_1, -e_1, ..., +e_d, -e_d.
inline std::vector<Point> unit_neighbors(const Point& p, int d) {
    if (d < 1 || d > kMaxDim) throw std::invalid_argument("unit_neighbors: bad dimension");
    std::vector<Point> out;
    out.reserve(2 * d);
    for (int i = 0; i < d; ++i) {
        out.push_back(p.shifted(i, +1));
        out.push_back(p.shifted(i, -1));
    }
    return out;
}

/// Offsets of the 2d unit steps in the same fixed order.
inline std::vector<Point> unit_steps(int d) { return unit_neighbors(origin(), d); }

/// Lattice points of the closed Euclidean ball {z : ||z - center|| <= r},
/// enumerated over the bounding box.
inline std::vector<Point> euclidean_ball_offsets(int d, double r) {
    if (r < 0) throw std::invalid_argument("euclidean_ball: negative radius");
    const auto rr = static_cast<std::int64_t>(std::floor(r * r + 1e-9));
    const auto ri = static_cast<std::int32_t>(std::floor(r + 1e-9));
    std::vector<Point> out;
    Point p;
    // odometer over [-ri, ri]^d
    for (int i = 0; i < d; ++i) p.c[i] = -ri;
    while (true) {
        if (norm2_sq(p) <= rr) out.push_back(p);
        int axis = 0;
        while (axis < d && p.c[axis] == ri) {
            p.c[axis] = -ri;
            ++axis;
        }
        if (axis == d) break;
        ++p.c[axis];
    }
    return out;
}

inline std::vector<Point> euclidean_ball(const Point& center, int d, double r) {
    std::vector<Point> out = euclidean_ball_offsets(d, r);
    for (auto& p : out) p = p + center;
    return out;
}

/// Half-open cube x + (-r, r]^d, i.e. coordinates in (x_i - r, x_i + r].
inline bool in_cube(const Point& z, const Point& x, std::int32_t r, int d) {
    for (int i = 0; i < d; ++i) {
        const std::int32_t delta = z.c[i] - x.c[i];
        if (delta <= -r || delta > r) return false;
    }
    return true;
}

/// Center (in 2rZ^d) of the cube of the partition P_r that contains z.
/// The center c satisfies z in (c - r, c + r], i.e. c = 2r * ceil((z - r) / 2r).
inline Point cube_of(const Point& z, std::int32_t r, int d) {
    Point q;
    const std::int64_t w = 2 * static_cast<std::int64_t>(r);
    for (int i = 0; i < d; ++i) {
        const std::int64_t lo = static_cast<std::int64_t>(z.c[i]) - r;
        const std::int64_t m = lo >= 0 ? (lo + w - 1) / w : -((-lo) / w);
        q.c[i] = static_cast<std::int32_t>(w * m);
    }
    return q;
}

}  // namespace rangelab

#endif
