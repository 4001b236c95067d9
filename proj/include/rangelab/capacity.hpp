#ifndef RANGELAB_CAPACITY_HPP
#define RANGELAB_CAPACITY_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "rangelab/flat_table.hpp"
#include "rangelab/green.hpp"
#include "rangelab/lattice.hpp"
#include "rangelab/poisson.hpp"
#include "rangelab/range_geometry.hpp"
#include "rangelab/rng.hpp"
#include "rangelab/stats.hpp"
#include "rangelab/trajectory.hpp"

namespace rangelab {

enum class CapacityMethod { kMonteCarlo, kDirichlet };

struct CapacityBracket {
    std::string set_id;
    double lower = 0;
    double upper = 0;
    CapacityMethod method = CapacityMethod::kMonteCarlo;
    std::int64_t horizon = 0;       // MC: escape horizon T; Dirichlet: truncation R
    std::size_t replicas = 0;       // MC only
    double width() const { return upper - lower; }
    bool overlaps(const CapacityBracket& other) const {
        return lower <= other.upper && other.lower <= upper;
    }
};

inline double set_radius(const PointSet& s) {
    double r = 0;
    s.for_each([&](const Point& p) { r = std::max(r, norm2(p)); });
    return r;
}

inline double set_diameter(const PointSet& s) {
    // diameter from the bounding box (cheap, sufficient for horizon choice)
    const int d = s.dim();
    std::int64_t lo[kMaxDim], hi[kMaxDim];
    bool first = true;
    s.for_each([&](const Point& p) {
        for (int i = 0; i < d; ++i) {
            if (first || p.c[i] < lo[i]) lo[i] = p.c[i];
            if (first || p.c[i] > hi[i]) hi[i] = p.c[i];
        }
        first = false;
    });
    if (first) return 0;
    double s2 = 0;
    for (int i = 0; i < d; ++i) s2 += static_cast<double>(hi[i] - lo[i]) * (hi[i] - lo[i]);
    return std::sqrt(s2);
}

/// Escape-probability Monte Carlo: for every x in Lambda run M walks until
/// they return to Lambda or survive T steps.  The bracket is
///   upper = sum p_hat + CI,
///   lower = sum p_hat - CI - bias,
/// where the bias (a walk alive at T that would still return later) is
/// bounded per survivor by sum_y G_upper(S_T - y) / G(0).
inline CapacityBracket capacity_mc(const PointSet& set, std::int64_t T, std::size_t M,
                                   RngStream stream, double level = 0.95) {
    if (set.empty()) throw std::invalid_argument("capacity_mc: empty set");
    if (M < 100) throw std::invalid_argument("capacity_mc: need M >= 100");
    const int d = set.dim();
    const auto starts = set.to_vector();
    const auto nsteps = static_cast<std::uint32_t>(2 * d);
    const double g0_lower = 1.0;  // G(0) >= 1 always; dividing by it keeps the bound valid
    const double rad = set_radius(set);

    double sum_p = 0, sum_var = 0, bias = 0;
    std::uint64_t idx = stream.index;
    for (const Point& x : starts) {
        Rng rng(RngStream{stream.seed, idx++});
        std::size_t escapes = 0;
        double start_bias = 0;
        for (std::size_t rep = 0; rep < M; ++rep) {
            Point p = x;
            bool returned = false;
            for (std::int64_t k = 0; k < T; ++k) {
                p = apply_step(p, rng.below(nsteps));
                if (set.contains(p)) {
                    returned = true;
                    break;
                }
            }
            if (!returned) {
                ++escapes;
                // distance-based shortcut: every y in Lambda is at least
                // ||p|| - radius(Lambda) away from p
                const double gap = norm2(p) - rad;
                double b;
                if (gap >= 1.0) {
                    Point far;
                    far.c[0] = static_cast<std::int32_t>(gap);
                    b = static_cast<double>(set.size()) * green_upper_bound(d, far);
                } else {
                    b = 0;
                    set.for_each([&](const Point& y) { b += green_upper_bound(d, p - y); });
                }
                start_bias += b / g0_lower;
            }
        }
        const double p_hat = static_cast<double>(escapes) / static_cast<double>(M);
        sum_p += p_hat;
        sum_var += p_hat * (1 - p_hat) / static_cast<double>(M);
        bias += start_bias / static_cast<double>(M);
    }
    CapacityBracket b;
    b.method = CapacityMethod::kMonteCarlo;
    b.horizon = T;
    b.replicas = M;
    const double ci = z_for_level(level) * std::sqrt(sum_var);
    b.upper = std::min(sum_p + ci, static_cast<double>(set.size()));
    b.lower = std::max(0.0, sum_p - ci - bias);
    return b;
}

/// Horizon heuristic for capacity_mc.
inline std::int64_t capacity_mc_horizon(const PointSet& set) {
    const double diam = set_diameter(set);
    return std::max<std::int64_t>(static_cast<std::int64_t>(diam * diam), 1000);
}

/// Dirichlet-relaxation capacity: solve h(y) = P_y[exit B(0,R) before
/// hitting Lambda] by red-black SOR, read the one-step escape average at
/// every x in Lambda.  With an absorbing outer boundary the value
/// overestimates escape; the lower end multiplies by (1 - return bound from
/// the outer shell).
inline CapacityBracket capacity_dirichlet(const PointSet& set, std::int32_t R,
                                          double residual_tol = 1e-10) {
    if (set.empty()) throw std::invalid_argument("capacity_dirichlet: empty set");
    const int d = set.dim();
    const double rad = set_radius(set);
    if (R < 4 * std::max(1.0, rad)) throw std::invalid_argument("capacity_dirichlet: R < 4 * radius");

    BoxGrid h(d, R);
    std::vector<std::uint8_t> fixed(h.cells(), 0);
    // outer ghost ring: h = 1 (escape); Lambda: h = 0
    h.for_each_cell([&](std::size_t idx, const Point& z) {
        for (int i = 0; i < d; ++i) {
            if (z.c[i] < -R || z.c[i] > R) {
                fixed[idx] = 1;
                h.data()[idx] = 1.0;
                return;
            }
        }
    });
    set.for_each([&](const Point& p) {
        const std::size_t idx = h.index(p);
        fixed[idx] = 1;
        h.data()[idx] = 0.0;
    });

    SorResult r = sor_solve(h, fixed, nullptr, residual_tol);
    if (!r.converged) throw std::runtime_error("capacity_dirichlet: relaxation did not converge");

    double cap_upper = 0;
    set.for_each([&](const Point& x) {
        double esc = 0;
        for (int i = 0; i < d; ++i) esc += h.at(x.shifted(i, +1)) + h.at(x.shifted(i, -1));
        cap_upper += esc / (2.0 * d);
    });
    // Return probability from the outer shell: P_w[H_Lambda < inf] <=
    // cap_upper * max_{y in Lambda} G_upper(w - y); the worst w sits at
    // distance R - rad from the nearest point of Lambda.
    const double dist = std::max(1.0, static_cast<double>(R) - rad);
    Point far;
    far.c[0] = static_cast<std::int32_t>(dist);
    const double return_bound = std::min(0.5, cap_upper * green_upper_bound(d, far));

    CapacityBracket b;
    b.method = CapacityMethod::kDirichlet;
    b.horizon = R;
    b.upper = std::min(cap_upper + 2 * residual_tol * static_cast<double>(set.size()),
                       static_cast<double>(set.size()));
    b.lower = std::max(0.0, cap_upper * (1.0 - return_bound) - 2 * residual_tol * static_cast<double>(set.size()));
    return b;
}

struct IndexReport {
    std::string set_id;
    double lower = 0, upper = 0;  // bracket on I_d
    std::size_t volume = 0;
    CapacityBracket capacity;
};

/// I_d(Lambda) = cap(Lambda) / |Lambda|^{1 - 2/d}, with bracket arithmetic.
inline IndexReport iso_index(const PointSet& set, const CapacityBracket& cap) {
    if (set.empty()) throw std::invalid_argument("iso_index: empty set");
    IndexReport r;
    r.set_id = cap.set_id;
    r.volume = set.size();
    r.capacity = cap;
    const double denom = std::pow(static_cast<double>(set.size()), 1.0 - 2.0 / set.dim());
    r.lower = cap.lower / denom;
    r.upper = cap.upper / denom;
    return r;
}

}  // namespace rangelab

#endif
