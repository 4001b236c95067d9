#ifndef RANGELAB_SCAN_HPP
#define RANGELAB_SCAN_HPP

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rangelab/center_family.hpp"
#include "rangelab/flat_table.hpp"
#include "rangelab/lattice.hpp"
#include "rangelab/range_geometry.hpp"
#include "rangelab/trajectory.hpp"

namespace rangelab {

/// Step index (axis << 1 | sign-bit) of a unit displacement.
inline std::uint32_t step_index_of(const Point& delta, int d) {
    for (int i = 0; i < d; ++i) {
        if (delta.c[i] == +1) return static_cast<std::uint32_t>(2 * i);
        if (delta.c[i] == -1) return static_cast<std::uint32_t>(2 * i + 1);
    }
    throw std::invalid_argument("step_index_of: not a unit step");
}

struct ScanResult {
    Point v{};
    double r = 1;
    std::int64_t t = 0;
    std::int64_t n = 0;
    std::vector<std::int64_t> times;  // sorted k in {1..n} with ell_k(S_k + v + B(0,r)) > t

    std::size_t count() const { return times.size(); }
};

namespace detail {

/// W[k] = ell_k(S_k + v + B(0,r)) for k = 0..n, by a rolling window: when the
/// walker moves one step the window shifts, so only the symmetric difference
/// of two balls needs recounting.  Every `check_every` steps the value is
/// recounted from scratch as a self-check.
inline std::vector<std::int64_t> window_counts(const Trajectory& traj, const Point& v, double r,
                                               std::int64_t n, std::int64_t check_every = 4096) {
    const int d = traj.d;
    const std::vector<Point> ball = euclidean_ball_offsets(d, r);
    const PointSet ball_set(d, ball);

    // entering/leaving offsets relative to the OLD window center, per step
    std::vector<std::vector<Point>> add(2 * static_cast<std::size_t>(d)), del(2 * static_cast<std::size_t>(d));
    // new window = old center + (ball + u); entering offsets are (ball+u) \ ball,
    // leaving offsets are ball \ (ball+u), both relative to the old center
    for (std::uint32_t s = 0; s < static_cast<std::uint32_t>(2 * d); ++s) {
        const Point u = apply_step(origin(), s);
        for (const Point& w : ball) {
            const Point e = w + u;
            if (!ball_set.contains(e)) add[s].push_back(e);
            if (!ball_set.contains(w - u)) del[s].push_back(w);
        }
    }

    FlatTable<std::int64_t> occ(static_cast<std::size_t>(n) + 1);
    ++occ[traj.at(0)];
    const bool self_in = norm2_sq(v) <= static_cast<std::int64_t>(r * r + 1e-9);
    std::vector<std::int64_t> W(static_cast<std::size_t>(n) + 1);
    W[0] = self_in ? 1 : 0;

    auto lookup = [&](const Point& p) -> std::int64_t {
        const std::int64_t* c = occ.find(p);
        return c ? *c : 0;
    };

    std::int64_t w_cur = W[0];
    for (std::int64_t k = 1; k <= n; ++k) {
        const std::uint32_t s = step_index_of(traj.at(k) - traj.at(k - 1), d);
        const Point c = traj.at(k - 1) + v;  // old window center
        for (const Point& w : add[s]) w_cur += lookup(c + w);
        for (const Point& w : del[s]) w_cur -= lookup(c + w);
        ++occ[traj.at(k)];
        if (self_in) ++w_cur;
        if (check_every > 0 && k % check_every == 0) {
            std::int64_t direct = 0;
            const Point nc = traj.at(k) + v;
            for (const Point& w : ball) direct += lookup(nc + w);
            if (direct != w_cur) throw std::logic_error("window_counts: rolling update diverged from recount");
        }
        W[static_cast<std::size_t>(k)] = w_cur;
    }
    return W;
}

}  // namespace detail

/// K_n(V, t) with V = v + B(0, r): the times k in {1..n} at which the
/// occupation of the window around the walker exceeds t.
inline ScanResult rolling_scan(const Trajectory& traj, const Point& v, double r, std::int64_t t,
                               std::int64_t n, std::int64_t check_every = 4096) {
    if (r < 1) throw std::invalid_argument("rolling_scan: need r >= 1");
    if (t < 0) throw std::invalid_argument("rolling_scan: need t >= 0");
    if (n < 0 || n > traj.length()) throw std::out_of_range("rolling_scan: bad horizon");
    ScanResult res;
    res.v = v;
    res.r = r;
    res.t = t;
    res.n = n;
    const std::vector<std::int64_t> W = detail::window_counts(traj, v, r, n, check_every);
    for (std::int64_t k = 1; k <= n; ++k)
        if (W[static_cast<std::size_t>(k)] > t) res.times.push_back(k);
    return res;
}

/// O(n * |ball|) recount, the oracle the rolling version is checked against.
inline ScanResult naive_scan(const Trajectory& traj, const Point& v, double r, std::int64_t t,
                             std::int64_t n) {
    if (n < 0 || n > traj.length()) throw std::out_of_range("naive_scan: bad horizon");
    ScanResult res;
    res.v = v;
    res.r = r;
    res.t = t;
    res.n = n;
    const std::vector<Point> ball = euclidean_ball_offsets(traj.d, r);
    FlatTable<std::int64_t> occ;
    ++occ[traj.at(0)];
    for (std::int64_t k = 1; k <= n; ++k) {
        ++occ[traj.at(k)];
        const Point c = traj.at(k) + v;
        std::int64_t w = 0;
        for (const Point& off : ball) {
            const std::int64_t* cnt = occ.find(c + off);
            if (cnt) w += *cnt;
        }
        if (w > t) res.times.push_back(k);
    }
    return res;
}

/// ell_n(B(C, 4r)): occupation of the union of balls of radius 4r around the
/// family's centers.
inline std::int64_t occupation_near_family(const OccupationField& occ, const CenterFamily& fam) {
    const double rr = 16.0 * fam.radius * fam.radius + 1e-9;
    std::int64_t total = 0;
    occ.for_each([&](const Point& p, const std::int64_t& c) {
        for (const Point& x : fam.centers) {
            if (static_cast<double>(dist_sq(p, x)) <= rr) {
                total += c;
                return;
            }
        }
    });
    return total;
}

/// Greedy center construction: scan k = 0..n, adding S_k as a center whenever
/// the window occupation exceeds t and S_k is at distance > 4r from every
/// center chosen so far.  The output is always in A(r); when |K_n| > L every
/// exceedance time has its walker position within 4r of some center, so
/// ell_n(B(C,4r)) >= |K_n| > L.
inline CenterFamily greedy_centers(const Trajectory& traj, const Point& v, double r,
                                   std::int64_t t, std::int64_t L, std::int64_t n) {
    (void)L;  // the stopping rule needs no L: the scan runs to exhaustion
    if (r < 1) throw std::invalid_argument("greedy_centers: need r >= 1");
    if (n < 0 || n > traj.length()) throw std::out_of_range("greedy_centers: bad horizon");
    CenterFamily fam;
    fam.radius = r;
    const std::vector<std::int64_t> W = detail::window_counts(traj, v, r, n);
    const double min_d2 = 16.0 * r * r;  // admission: strictly farther than 4r from all centers
    for (std::int64_t k = 0; k <= n; ++k) {
        if (W[static_cast<std::size_t>(k)] <= t) continue;
        const Point& p = traj.at(k);
        bool far = true;
        for (const Point& x : fam.centers) {
            if (static_cast<double>(dist_sq(p, x)) <= min_d2 + 1e-9) {
                far = false;
                break;
            }
        }
        if (far) fam.centers.push_back(p);
    }
    return fam;
}

struct EventWitness {
    bool found = false;
    bool undetermined = false;  // constructive search failed; not a disproof
    CenterFamily family;
    std::int64_t occupancy = 0;  // G: min over centers of ell_n(B(x,r)); H: ell_n(B(C,4r))
};

/// Constructive search for the event {exists C in A(r), |C| = m,
/// ell_n(B(x,r)) > t for all x in C}, seeded by the greedy family with v = 0.
inline EventWitness detect_G_event(const Trajectory& traj, double r, std::int64_t t,
                                   std::size_t m, std::int64_t n) {
    if (m < 1) throw std::invalid_argument("detect_G_event: need m >= 1");
    EventWitness w;
    CenterFamily fam = greedy_centers(traj, origin(), r, t, 0, n);
    if (fam.size() < m) {
        w.undetermined = true;
        return w;
    }
    fam.centers.resize(m);  // dropping centers preserves the G property (monotone in m)
    const OccupationField occ(traj, n);
    std::int64_t min_occ = -1;
    for (const Point& x : fam.centers) {
        const std::int64_t o = occ.in_ball(x, r);
        if (o <= t) throw std::logic_error("detect_G_event: greedy seed violated its own guarantee");
        if (min_occ < 0 || o < min_occ) min_occ = o;
    }
    if (!fam.well_separated()) throw std::logic_error("detect_G_event: family left A(r)");
    w.found = true;
    w.family = std::move(fam);
    w.occupancy = min_occ;
    return w;
}

/// Constructive search for {exists C in A(r), |C| = m, ell_n(B(C,4r)) >= L}.
/// Seed: the temporal greedy family at threshold 0, which covers every visited
/// point within 4r of some center.  Short families are padded with admissible
/// far-away centers (the event is monotone in m); long ones are truncated and
/// rechecked.
inline EventWitness detect_H_event(const Trajectory& traj, double r, std::int64_t L,
                                   std::size_t m, std::int64_t n) {
    if (m < 1) throw std::invalid_argument("detect_H_event: need m >= 1");
    EventWitness w;
    CenterFamily fam = greedy_centers(traj, origin(), r, 0, 0, n);
    if (fam.size() > m) fam.centers.resize(m);
    // pad with centers on a far ray, spaced 8r apart, clear of everything
    if (fam.size() < m) {
        std::int32_t far = 0;
        for (std::int64_t k = 0; k <= n; ++k) far = std::max(far, std::abs(traj.at(k).c[0]));
        for (const Point& x : fam.centers) far = std::max(far, std::abs(x.c[0]));
        const auto gap = static_cast<std::int32_t>(8 * r + 2);
        std::int32_t pos = far + gap;
        while (fam.size() < m) {
            Point x;
            x.c[0] = pos;
            fam.centers.push_back(x);
            pos += gap;
        }
    }
    if (!fam.well_separated()) throw std::logic_error("detect_H_event: family left A(r)");
    const OccupationField occ(traj, n);
    const std::int64_t o = occupation_near_family(occ, fam);
    if (o >= L) {
        w.found = true;
        w.family = std::move(fam);
        w.occupancy = o;
    } else {
        w.undetermined = true;
        w.occupancy = o;
    }
    return w;
}

}  // namespace rangelab

#endif
