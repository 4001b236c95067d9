#ifndef RANGELAB_SLICING_HPP
#define RANGELAB_SLICING_HPP

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rangelab/flat_table.hpp"
#include "rangelab/green.hpp"
#include "rangelab/lattice.hpp"
#include "rangelab/range_geometry.hpp"
#include "rangelab/trajectory.hpp"

namespace rangelab {

struct XiValue {
    double value = 0;
    double error_bound = 0;  // certified truncation + table-tail error
};

/// xi_n(T) = (1/T) sum_{k=1}^n sum_{z in R_k^{++}} G_T(z - S_k), evaluated
/// incrementally: the twice-dilated range is maintained as a hash set and the
/// inner sum runs over whichever of {table support above cutoff, R_k^{++}} is
/// smaller.  The discarded below-cutoff support and the table's absorbing-tail
/// deficit are accumulated into a certified error bound.
inline XiValue xi_fold(const Trajectory& traj, std::int64_t n, std::int64_t T,
                       const RestrictedGreenTable& table, double cutoff = 1e-12) {
    if (table.horizon() != T) throw std::invalid_argument("xi_fold: table horizon mismatch");
    if (table.dim() != traj.d) throw std::invalid_argument("xi_fold: table dimension mismatch");
    if (n < 0 || n > traj.length()) throw std::out_of_range("xi_fold: bad horizon");
    const int d = traj.d;

    std::vector<std::pair<Point, double>> support;
    {
        const std::int32_t R = table.radius();
        Point p;
        for (int i = 0; i < d; ++i) p.c[i] = -R;
        while (true) {
            const double g = table.value(p);
            if (g > cutoff) support.emplace_back(p, g);
            int axis = 0;
            while (axis < d && p.c[axis] == R) {
                p.c[axis] = -R;
                ++axis;
            }
            if (axis == d) break;
            ++p.c[axis];
        }
    }

    // offsets at graph distance <= 2 (the twice-dilated singleton)
    const std::vector<Point> dil2 = [&] {
        std::vector<Point> out;
        Point p;
        for (int a = 0; a < d; ++a) p.c[a] = -2;
        while (true) {
            if (norm1(p) <= 2) out.push_back(p);
            int axis = 0;
            while (axis < d && p.c[axis] == 2) {
                p.c[axis] = -2;
                ++axis;
            }
            if (axis == d) break;
            ++p.c[axis];
        }
        return out;
    }();

    PointSet dpp(d, static_cast<std::size_t>(n + 1) * dil2.size() / 2);
    PointSet range(d, static_cast<std::size_t>(n + 1));
    auto grow = [&](const Point& s) {
        if (!range.insert(s)) return;
        for (const Point& w : dil2) dpp.insert(s + w);
    };
    grow(traj.at(0));

    XiValue out;
    const double per_point_err = cutoff + table.tail_bound();
    for (std::int64_t k = 1; k <= n; ++k) {
        const Point& s = traj.at(k);
        grow(s);
        double v = 0;
        if (support.size() <= dpp.size()) {
            for (const auto& [w, g] : support)
                if (dpp.contains(s + w)) v += g;
        } else {
            dpp.for_each([&](const Point& z) { v += table.value(z - s); });
        }
        out.value += v;
        out.error_bound += static_cast<double>(dpp.size()) * per_point_err;
    }
    out.value /= static_cast<double>(T);
    out.error_bound /= static_cast<double>(T);
    return out;
}

/// Brute-force oracle for xi_fold (rebuilds R_k^{++} at every k).
inline double xi_fold_naive(const Trajectory& traj, std::int64_t n, std::int64_t T,
                            const RestrictedGreenTable& table) {
    if (table.horizon() != T) throw std::invalid_argument("xi_fold_naive: table horizon mismatch");
    double total = 0;
    for (std::int64_t k = 1; k <= n; ++k) {
        const PointSet dpp = dilate_twice(range_of(traj, 0, k));
        const Point& s = traj.at(k);
        dpp.for_each([&](const Point& z) { total += table.value(z - s); });
    }
    return total / static_cast<double>(T);
}

struct SlicingTerms {
    std::int64_t i = 0;           // offset in {-1, ..., T-2}
    std::int64_t T = 0;           // block length
    std::int64_t n = 0;           // horizon
    std::vector<std::int64_t> U;  // U_{i,j} = |dR(i+jT+1, i+(j+1)T)|, j = 0..K
    std::vector<std::int64_t> X;  // X[k] = X_k(i,T), cumulative; X[0] = 0
    std::int64_t boundary_n = 0;  // |dR_n|
    std::int64_t remainder = 0;   // exact credit for the uncovered head/tail steps
    bool holds = false;           // |dR_n| >= sum U - X_K - remainder
    XiValue xi;                   // filled by xi_fold when requested

    std::int64_t sum_U() const {
        std::int64_t s = 0;
        for (auto u : U) s += u;
        return s;
    }
};

/// Exact block decomposition of the boundary lower bound: with blocks
/// Lambda_j = R(i+jT+1, i+(j+1)T), j = 0..K, head = R(0,i), tail the uncovered
/// suffix, the chained superadditivity over [head, Lambda_0..Lambda_K, tail]
/// gives
///   |dR_n| >= sum_j U_{i,j} - X_K(i,T) - remainder,
/// remainder = 2|Lambda_0^+ n head^+| + 2|tail^+ n R^+_{i+(K+1)T}|
/// (the head/tail boundary credits are dropped).  The cross terms use that
/// head u Lambda_0 u ... u Lambda_{j-1} = R(0, i+jT) exactly.
inline SlicingTerms slicing_terms(const Trajectory& traj, std::int64_t i, std::int64_t T,
                                  std::int64_t n) {
    if (T < 1 || T > n) throw std::invalid_argument("slicing_terms: need 1 <= T <= n");
    if (i < -1 || i > T - 2) throw std::invalid_argument("slicing_terms: offset outside {-1..T-2}");
    if (n > traj.length()) throw std::out_of_range("slicing_terms: horizon beyond trajectory");
    const int d = traj.d;

    std::int64_t K = n / T - 2;
    if (K < 0) K = (n - i) / T - 1;  // short horizons: largest feasible block count
    if (K < 0) throw std::invalid_argument("slicing_terms: no block fits");

    SlicingTerms out;
    out.i = i;
    out.T = T;
    out.n = n;
    out.X.push_back(0);

    // dilated prefix R^+_m, advanced left to right
    PointSet dil_prefix(d, static_cast<std::size_t>(n));
    std::int64_t covered = -1;
    auto advance_prefix = [&](std::int64_t m) {
        for (std::int64_t k = covered + 1; k <= m; ++k) {
            const Point& p = traj.at(k);
            dil_prefix.insert(p);
            for (int a = 0; a < d; ++a) {
                dil_prefix.insert(p.shifted(a, +1));
                dil_prefix.insert(p.shifted(a, -1));
            }
        }
        if (m > covered) covered = m;
    };

    PointSet block0_dilated(d);
    for (std::int64_t j = 0; j <= K; ++j) {
        const PointSet block = range_of(traj, i + j * T + 1, i + (j + 1) * T);
        out.U.push_back(static_cast<std::int64_t>(inner_boundary(block).size()));
        PointSet block_dil = dilate(block);
        if (j == 0) {
            block0_dilated = std::move(block_dil);
        } else {
            advance_prefix(i + j * T);
            const std::int64_t x = 2 * static_cast<std::int64_t>(intersection_size(dil_prefix, block_dil));
            out.X.push_back(out.X.back() + x);
        }
    }

    // remainder: head overlap + tail overlap, both exact
    std::int64_t rem = 0;
    if (i >= 0) {
        const PointSet head_dil = dilate(range_of(traj, 0, i));
        rem += 2 * static_cast<std::int64_t>(intersection_size(block0_dilated, head_dil));
    }
    const std::int64_t tail_start = i + (K + 1) * T + 1;
    if (tail_start <= n) {
        const PointSet tail_dil = dilate(range_of(traj, tail_start, n));
        advance_prefix(i + (K + 1) * T);
        rem += 2 * static_cast<std::int64_t>(intersection_size(tail_dil, dil_prefix));
    }
    out.remainder = rem;

    out.boundary_n = static_cast<std::int64_t>(inner_boundary(range_of(traj, 0, n)).size());
    out.holds = out.boundary_n >= out.sum_U() - out.X.back() - out.remainder;
    return out;
}

}  // namespace rangelab

#endif
