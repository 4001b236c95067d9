#ifndef RANGELAB_RANGE_GEOMETRY_HPP
#define RANGELAB_RANGE_GEOMETRY_HPP

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "rangelab/flat_table.hpp"
#include "rangelab/lattice.hpp"
#include "rangelab/rng.hpp"
#include "rangelab/stats.hpp"
#include "rangelab/trajectory.hpp"

namespace rangelab {

/// Distinct points visited in the index window [a, b].
inline PointSet range_of(const Trajectory& traj, std::int64_t a, std::int64_t b) {
    if (a < 0 || a > b || b > traj.length()) throw std::out_of_range("range_of: bad index window");
    PointSet s(traj.d, static_cast<std::size_t>(b - a + 1));
    for (std::int64_t k = a; k <= b; ++k) s.insert(traj.at(k));
    return s;
}

/// Inner boundary: points of the set with at least one of their 2d neighbors outside.
inline PointSet inner_boundary(const PointSet& s) {
    const int d = s.dim();
    PointSet out(d, s.size());
    s.for_each([&](const Point& p) {
        for (int i = 0; i < d; ++i) {
            if (!s.contains(p.shifted(i, +1)) || !s.contains(p.shifted(i, -1))) {
                out.insert(p);
                return;
            }
        }
    });
    return out;
}

/// The set plus all points at Euclidean distance 1 (lattice neighbors).
inline PointSet dilate(const PointSet& s) {
    const int d = s.dim();
    PointSet out(d, s.size() * (2 * static_cast<std::size_t>(d) + 1));
    s.for_each([&](const Point& p) {
        out.insert(p);
        for (int i = 0; i < d; ++i) {
            out.insert(p.shifted(i, +1));
            out.insert(p.shifted(i, -1));
        }
    });
    return out;
}

inline PointSet dilate_twice(const PointSet& s) { return dilate(dilate(s)); }

inline PointSet set_union(const PointSet& a, const PointSet& b) {
    PointSet out(a.dim(), a.size() + b.size());
    a.for_each([&](const Point& p) { out.insert(p); });
    b.for_each([&](const Point& p) { out.insert(p); });
    return out;
}

inline std::size_t intersection_size(const PointSet& a, const PointSet& b) {
    const PointSet& small = a.size() <= b.size() ? a : b;
    const PointSet& big = a.size() <= b.size() ? b : a;
    std::size_t n = 0;
    small.for_each([&](const Point& p) {
        if (big.contains(p)) ++n;
    });
    return n;
}

/// Visit counts of a trajectory up to the horizon n (time 0 included).
class OccupationField {
public:
    OccupationField() = default;

    OccupationField(const Trajectory& traj, std::int64_t n) : d_(traj.d), horizon_(n) {
        if (n > traj.length()) throw std::out_of_range("occupation: horizon beyond trajectory");
        for (std::int64_t k = 0; k <= n; ++k) ++counts_[traj.at(k)];
    }

    int dim() const { return d_; }
    std::int64_t horizon() const { return horizon_; }

    std::int64_t count(const Point& p) const {
        const std::int64_t* c = counts_.find(p);
        return c ? *c : 0;
    }

    /// ell_n(Lambda): number of time indices k <= n with S_k in Lambda.
    std::int64_t in_set(const PointSet& set) const {
        std::int64_t total = 0;
        if (set.size() < counts_.size()) {
            set.for_each([&](const Point& p) { total += count(p); });
        } else {
            counts_.for_each([&](const Point& p, const std::int64_t& c) {
                if (set.contains(p)) total += c;
            });
        }
        return total;
    }

    std::int64_t in_ball(const Point& center, double r) const {
        std::int64_t total = 0;
        const auto rr = static_cast<std::int64_t>(r * r + 1e-9);
        counts_.for_each([&](const Point& p, const std::int64_t& c) {
            if (dist_sq(p, center) <= rr) total += c;
        });
        return total;
    }

    template <class F>
    void for_each(F&& f) const {
        counts_.for_each(f);
    }

private:
    int d_ = 3;
    std::int64_t horizon_ = 0;
    FlatTable<std::int64_t> counts_;
};

/// Incrementally maintained range, inner boundary size, and occupation counts.
/// When a point joins the range only it and its 2d neighbors can change
/// boundary status, so each step costs O(d) hash operations.
class BoundaryTracker {
public:
    explicit BoundaryTracker(int d, std::size_t expected = 64) : d_(d), cells_(expected) { add(origin()); }

    int dim() const { return d_; }

    /// Extends the walk by one step; p must be the next position.
    void step(const Point& p) { add(p); }

    std::int64_t boundary_size() const { return boundary_size_; }
    std::int64_t range_size() const { return range_size_; }

    bool in_range(const Point& p) const { return cells_.contains(p); }
    bool in_boundary(const Point& p) const {
        const Cell* c = cells_.find(p);
        return c && c->nbrs < 2 * d_;
    }

    /// Boundary points inside a given set (for the variance check).
    std::int64_t boundary_in(const PointSet& set) const {
        std::int64_t total = 0;
        cells_.for_each([&](const Point& p, const Cell& c) {
            if (c.nbrs < 2 * d_ && set.contains(p)) ++total;
        });
        return total;
    }

    PointSet boundary_set() const {
        PointSet out(d_, static_cast<std::size_t>(boundary_size_));
        cells_.for_each([&](const Point& p, const Cell& c) {
            if (c.nbrs < 2 * d_) out.insert(p);
        });
        return out;
    }

private:
    struct Cell {
        std::uint8_t nbrs = 0;  // neighbors currently in the range
    };

    void add(const Point& p) {
        auto [cell, inserted] = cells_.insert(p);
        if (!inserted) return;
        ++range_size_;
        std::uint8_t in_range_nbrs = 0;
        for (int i = 0; i < d_; ++i) {
            for (int sgn : {+1, -1}) {
                Cell* q = cells_.find(p.shifted(i, sgn));
                if (!q) continue;
                ++in_range_nbrs;
                if (++q->nbrs == 2 * d_) --boundary_size_;  // neighbor became interior
            }
        }
        cell->nbrs = in_range_nbrs;
        if (in_range_nbrs < 2 * d_) ++boundary_size_;
    }

    int d_;
    FlatTable<Cell> cells_;
    std::int64_t boundary_size_ = 0;
    std::int64_t range_size_ = 0;
};

struct InclusionExclusionReport {
    std::size_t size1 = 0, size2 = 0, size_union = 0, size_inter = 0;
    bool holds = false;
};

/// |A u B| = |A| + |B| - |A n B|, returned with all four cardinalities.
inline InclusionExclusionReport check_inclusion_exclusion(const PointSet& a, const PointSet& b) {
    InclusionExclusionReport r;
    r.size1 = a.size();
    r.size2 = b.size();
    r.size_union = set_union(a, b).size();
    r.size_inter = intersection_size(a, b);
    r.holds = r.size_union == r.size1 + r.size2 - r.size_inter;
    return r;
}

struct BoundaryBoundsReport {
    std::int64_t boundary_union = 0;
    std::int64_t boundary1 = 0, boundary2 = 0;
    std::int64_t b1_in_dil2 = 0, dil1_in_b2 = 0;  // |dA n B+|, |A+ n dB|
    std::int64_t dil_overlap = 0;                 // |A+ n B+|
    std::int64_t inter_1_b2 = 0;                  // |A n dB|
    bool lower_holds = false;                     // two chained lower bounds
    bool upper_holds = false;
};

/// Boundary-of-union bounds: the two-step lower bound and the upper bound.
inline BoundaryBoundsReport check_boundary_bounds(const PointSet& a, const PointSet& b) {
    BoundaryBoundsReport r;
    const PointSet ba = inner_boundary(a), bb = inner_boundary(b);
    const PointSet da = dilate(a), db = dilate(b);
    r.boundary_union = static_cast<std::int64_t>(inner_boundary(set_union(a, b)).size());
    r.boundary1 = static_cast<std::int64_t>(ba.size());
    r.boundary2 = static_cast<std::int64_t>(bb.size());
    r.b1_in_dil2 = static_cast<std::int64_t>(intersection_size(ba, db));
    r.dil1_in_b2 = static_cast<std::int64_t>(intersection_size(da, bb));
    r.dil_overlap = static_cast<std::int64_t>(intersection_size(da, db));
    r.inter_1_b2 = static_cast<std::int64_t>(intersection_size(a, bb));
    const std::int64_t mid = r.boundary1 + r.boundary2 - (r.b1_in_dil2 + r.dil1_in_b2);
    const std::int64_t low = r.boundary1 + r.boundary2 - 2 * r.dil_overlap;
    r.lower_holds = r.boundary_union >= mid && mid >= low;
    r.upper_holds = r.boundary_union <= r.boundary1 + r.boundary2 - r.inter_1_b2;
    return r;
}

struct SuperadditivityReport {
    std::int64_t lhs = 0;
    std::int64_t sum_boundaries = 0;
    std::int64_t cross = 0;  // sum over i >= 2 of |A_i+ n (u_{j<i} A_j+)|
    bool holds = false;
};

/// |d(u A_i)| >= sum |dA_i| - 2 * sum_{i>=2} |A_i+ n (u_{j<i} A_j+)|, exactly.
inline SuperadditivityReport check_superadditivity(const std::vector<PointSet>& sets) {
    if (sets.size() < 2) throw std::invalid_argument("check_superadditivity: need >= 2 sets");
    SuperadditivityReport r;
    const int d = sets.front().dim();
    PointSet acc_union(d);
    PointSet acc_dilated(d);
    for (std::size_t i = 0; i < sets.size(); ++i) {
        const PointSet di = dilate(sets[i]);
        r.sum_boundaries += static_cast<std::int64_t>(inner_boundary(sets[i]).size());
        if (i >= 1) r.cross += static_cast<std::int64_t>(intersection_size(di, acc_dilated));
        di.for_each([&](const Point& p) { acc_dilated.insert(p); });
        sets[i].for_each([&](const Point& p) { acc_union.insert(p); });
    }
    r.lhs = static_cast<std::int64_t>(inner_boundary(acc_union).size());
    r.holds = r.lhs >= r.sum_boundaries - 2 * r.cross;
    return r;
}

struct MeanBoundaryRow {
    std::int64_t n = 0;
    MeanCI per_step;  // mean |dR_n| / n with CI
};

struct MeanBoundaryTable {
    std::vector<MeanBoundaryRow> rows;
    double nu_hat = 0;          // fitted plateau of |dR_n|/n
    double correction_amp = 0;  // fitted a in m(n) = nu + a * psi_d(n)/n
    std::vector<double> residuals;
    bool enough_replicas = true;
};

inline double psi_d(int d, double n) {
    if (d == 3) return std::sqrt(n);
    if (d == 4) return std::log(n);
    return 1.0;
}

/// Sample means of |dR_n|/n over replicas on an n-grid, with the finite-size
/// fit m(n) = nu + a * psi_d(n)/n.  Replica streams are indexed from the
/// given stream so runs are order-independent.
inline MeanBoundaryTable estimate_mean_boundary(int d, const std::vector<std::int64_t>& n_grid,
                                                std::size_t replicas, RngStream stream,
                                                double level = 0.95) {
    MeanBoundaryTable out;
    out.enough_replicas = replicas >= 30;
    std::uint64_t idx = stream.index;
    for (std::int64_t n : n_grid) {
        std::vector<double> per_step;
        per_step.reserve(replicas);
        for (std::size_t rep = 0; rep < replicas; ++rep) {
            Rng rng(RngStream{stream.seed, idx++});
            BoundaryTracker tracker(d);
            Point p = origin();
            const auto nsteps = static_cast<std::uint32_t>(2 * d);
            for (std::int64_t k = 0; k < n; ++k) {
                p = apply_step(p, rng.below(nsteps));
                tracker.step(p);
            }
            per_step.push_back(n > 0 ? static_cast<double>(tracker.boundary_size()) / static_cast<double>(n)
                                     : static_cast<double>(tracker.boundary_size()));
        }
        out.rows.push_back({n, mean_ci(per_step, level)});
    }
    if (out.rows.size() >= 2) {
        std::vector<double> x, y, w;
        for (const auto& row : out.rows) {
            x.push_back(psi_d(d, static_cast<double>(row.n)) / static_cast<double>(row.n));
            y.push_back(row.per_step.mean);
            w.push_back(static_cast<double>(replicas));
        }
        LinearFit f = weighted_linear_fit(x, y, w);
        out.nu_hat = f.intercept;
        out.correction_amp = f.slope;
        for (std::size_t i = 0; i < x.size(); ++i)
            out.residuals.push_back(y[i] - (f.intercept + f.slope * x[i]));
    } else if (!out.rows.empty()) {
        out.nu_hat = out.rows.front().per_step.mean;
    }
    return out;
}

/// Random connected test set: the range of a short walk, optionally offset.
inline PointSet random_walk_set(Rng& rng, int d, std::int64_t steps, std::int32_t max_offset = 0) {
    Point p = origin();
    if (max_offset > 0)
        for (int i = 0; i < d; ++i)
            p.c[i] = static_cast<std::int32_t>(rng.below(static_cast<std::uint32_t>(2 * max_offset + 1))) - max_offset;
    PointSet s(d, static_cast<std::size_t>(steps) + 1);
    s.insert(p);
    const auto nsteps = static_cast<std::uint32_t>(2 * d);
    for (std::int64_t k = 0; k < steps; ++k) {
        p = apply_step(p, rng.below(nsteps));
        s.insert(p);
    }
    return s;
}

}  // namespace rangelab

#endif
