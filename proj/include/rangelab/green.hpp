#ifndef RANGELAB_GREEN_HPP
#define RANGELAB_GREEN_HPP

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rangelab/flat_table.hpp"
#include "rangelab/lattice.hpp"
#include "rangelab/poisson.hpp"
#include "rangelab/stats.hpp"

namespace rangelab {

/// Safe upper bound on G(0) for d >= 3 (the d = 3 value 1.5164 is the largest).
inline constexpr double kGreenZeroCap = 1.6;

/// Exact values of G_T(z) on [-R, R]^d by kernel iteration with an absorbing
/// exterior.  The escaped probability mass is tracked so both the
/// normalization identity and a pointwise truncation certificate are
/// available:
///   true G_T(z) in [value(z), value(z) + tail_bound()]      for z in the box,
///   true G_T(z) in [0, tail_bound()]                         for z outside.
class RestrictedGreenTable {
public:
    RestrictedGreenTable(int d, std::int64_t T, std::int32_t R,
                         std::size_t max_bytes = std::size_t{3} << 30)
        : d_(d), T_(T), R_(R), values_(d, R, max_bytes / 2) {
        if (T < 0 || R < 1) throw std::invalid_argument("RestrictedGreenTable: bad parameters");
        BoxGrid cur(d, R, max_bytes / 2);
        cur.at(origin()) = 1.0;
        values_.at(origin()) = 1.0;

        std::vector<std::size_t> strides(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i) strides[static_cast<std::size_t>(i)] = cur.stride(i);
        const double inv2d = 1.0 / (2.0 * d);
        const std::size_t row_len = 2 * static_cast<std::size_t>(R) + 1;
        double inside_mass = 1.0;
        double escape_occupation = 0.0;  // sum over steps of cumulative escaped mass
        double table_sum = 1.0;

        BoxGrid nxt(d, R, max_bytes / 2);
        double* acc = values_.data();
        for (std::int64_t k = 1; k <= T_; ++k) {
            const double* src = cur.data();
            double* dst = nxt.data();
            double mass = 0.0, mass_c = 0.0;  // Kahan
            cur.for_each_row([&](std::size_t base, int) {
                for (std::size_t j = 0; j < row_len; ++j) {
                    const std::size_t idx = base + j;
                    double nb = 0;
                    for (int i = 0; i < d; ++i) {
                        const std::size_t s = strides[static_cast<std::size_t>(i)];
                        nb += src[idx - s] + src[idx + s];
                    }
                    const double v = nb * inv2d;
                    dst[idx] = v;
                    acc[idx] += v;
                    const double y = v - mass_c;
                    const double t = mass + y;
                    mass_c = (t - mass) - y;
                    mass = t;
                }
            });
            inside_mass = mass;
            escape_occupation += 1.0 - inside_mass;
            table_sum += inside_mass;
            std::swap(cur, nxt);
        }
        escape_total_ = 1.0 - inside_mass;
        escape_occupation_ = escape_occupation;
        table_sum_ = table_sum;
    }

    int dim() const { return d_; }
    std::int64_t horizon() const { return T_; }
    std::int32_t radius() const { return R_; }

    /// Table value; zero outside the box (use tail_bound() for the deficit).
    double value(const Point& z) const { return values_.inside(z) ? values_.at(z) : 0.0; }

    /// Sum of all stored values (occupation recorded inside the box).
    double sum() const { return table_sum_; }

    /// Total probability mass absorbed outside by time T.
    double escape_total() const { return escape_total_; }

    /// Exact-accounting normalization: sum() + escape_occupation() == T + 1
    /// up to accumulated floating error.
    double escape_occupation() const { return escape_occupation_; }
    double mass_identity_defect() const {
        return std::abs(sum() + escape_occupation() - static_cast<double>(T_ + 1));
    }

    /// Certified pointwise bound on the occupation unaccounted for by the
    /// absorbing truncation (escaped mass revisits any fixed site at most
    /// G(0) <= kGreenZeroCap times in expectation).
    double tail_bound() const { return kGreenZeroCap * escape_total_; }

private:
    int d_;
    std::int64_t T_;
    std::int32_t R_;
    BoxGrid values_;
    double escape_total_ = 0;
    double escape_occupation_ = 0;
    double table_sum_ = 0;
};

/// Leading Green asymptotic coefficient: G(z) ~ a_d / ||z||^{d-2},
/// a_d = d Gamma(d/2 - 1) / (2 pi^{d/2}).
inline double green_asymptotic_coeff(int d) {
    return d * std::tgamma(d / 2.0 - 1.0) / (2.0 * std::pow(M_PI, d / 2.0));
}

struct GreenEstimate {
    Point z;
    double value = 0;  // lower estimate
    double tail = 0;   // bound on the truncation error: G in [value, value + tail]
};

namespace detail {

/// Solves G = delta_0 + P G on [-R, R]^d with the asymptotic Dirichlet data
/// a_d / ||w||^{d-2} on the ghost ring.
inline BoxGrid solve_green_box(int d, std::int32_t R, double residual_tol,
                               std::size_t max_bytes = std::size_t{2} << 30) {
    BoxGrid g(d, R + 1, max_bytes);  // one extra layer holds the Dirichlet data
    const double a_d = green_asymptotic_coeff(d);
    std::vector<std::uint8_t> fixed(g.cells(), 0);
    std::vector<double> source(g.cells(), 0.0);
    source[g.index(origin())] = 1.0;
    g.for_each_interior([&](std::size_t idx, const Point& z) {
        std::int32_t m = 0;
        for (int i = 0; i < d; ++i) m = std::max(m, std::abs(z.c[i]));
        if (m > R) {
            fixed[idx] = 1;
            g.data()[idx] = a_d / std::pow(norm2(z), d - 2);
        } else {
            // harmonic-average initial guess speeds convergence
            g.data()[idx] = z == origin() ? 1.5 : a_d / std::pow(norm2(z), d - 2);
        }
    });
    SorResult r = sor_solve(g, fixed, &source, residual_tol);
    if (!r.converged) throw std::runtime_error("solve_green_box: SOR did not converge");
    return g;
}

}  // namespace detail

/// Bracketed value of the full Green's function at z.  The value comes from a
/// discrete Dirichlet solve with the leading asymptotic on the outer shell;
/// the error certificate is the observed change under doubling the box,
/// with a factor-2 safety margin (the boundary-data error decays like R^-d
/// and is measured, not assumed).
inline GreenEstimate green_full(int d, const Point& z, double tol) {
    if (d < 3) throw std::invalid_argument("green_full: need d >= 3");
    if (tol <= 0) throw std::invalid_argument("green_full: tol must be positive");
    std::int32_t m = 0;
    for (int i = 0; i < d; ++i) m = std::max(m, std::abs(z.c[i]));
    std::int32_t R = std::max<std::int32_t>(16, 4 * m);
    const double residual_tol = std::min(tol, 1e-6) * 1e-3;
    for (int attempt = 0; attempt < 6; ++attempt) {
        BoxGrid coarse = detail::solve_green_box(d, R / 2, residual_tol);
        BoxGrid fine = detail::solve_green_box(d, R, residual_tol);
        const double vc = coarse.at(z);
        const double vf = fine.at(z);
        const double err = 2.0 * std::abs(vf - vc) + 10.0 * residual_tol;
        if (err <= tol) {
            GreenEstimate e;
            e.z = z;
            e.value = vf - err / 2;
            e.tail = err;
            return e;
        }
        R *= 2;
        if (R > 512) throw std::runtime_error("green_full: tolerance unreachable under memory cap");
    }
    throw std::runtime_error("green_full: tolerance unreachable");
}

/// One entry of the cube decomposition: pieces[i].second must sit inside the
/// half-open cube of side 2r centered at pieces[i].first.
using CubePieces = std::vector<std::pair<Point, PointSet>>;

/// Exact double sum  sum_Q sum_{z in Lambda_Q} G_T(z)  over the cube pieces.
inline double covering_sum(const RestrictedGreenTable& table, const CubePieces& pieces, std::int32_t r) {
    const int d = table.dim();
    double total = 0;
    for (const auto& [cube_center, piece] : pieces) {
        bool ok = true;
        piece.for_each([&](const Point& z) {
            if (!in_cube(z, cube_center, r, d)) ok = false;
        });
        if (!ok) throw std::invalid_argument("covering_sum: piece not contained in its cube");
        piece.for_each([&](const Point& z) { total += table.value(z); });
    }
    return total;
}

struct RestrictedBoundFit {
    double c_hat = 0;  // fitted Gaussian decay rate
    double C_hat = 0;  // smallest prefactor making the bound hold on the table
    LinearFit decay;   // regression of log[G_T (1+||z||^d)/T] on ||z||^2/T
};

/// Fits (C, c) for the envelope G_T(z) <= C T/(1+||z||^d) exp(-c ||z||^2 / T):
/// c from the empirical far-field decay (beyond sqrt(T)), then the smallest C
/// making the bound hold at every table point.
inline RestrictedBoundFit check_restricted_bound(const RestrictedGreenTable& table) {
    const int d = table.dim();
    const auto T = static_cast<double>(table.horizon());
    const auto R = table.radius();
    std::vector<double> xs, ys;
    Point z;
    for (std::int32_t x = 0; x <= R; ++x) {  // axis ray is enough for the rate
        z = origin();
        z.c[0] = x;
        const double g = table.value(z);
        const double n2 = static_cast<double>(x) * x;
        if (n2 > T && g > 1e-300) {
            xs.push_back(n2 / T);
            ys.push_back(std::log(g * (1.0 + std::pow(std::sqrt(n2), d)) / T));
        }
    }
    RestrictedBoundFit fit;
    if (xs.size() >= 3) {
        fit.decay = linear_fit(xs, ys);
        fit.c_hat = std::max(1e-3, -fit.decay.slope);
    } else {
        fit.c_hat = static_cast<double>(d) / 2.0;
    }
    // smallest C for the fitted c, scanned over the whole table
    double C_req = 0;
    Point p;
    for (int i = 0; i < d; ++i) p.c[i] = -R;
    while (true) {
        const double g = table.value(p);
        if (g > 0) {
            const double n2 = static_cast<double>(norm2_sq(p));
            const double envelope = T / (1.0 + std::pow(std::sqrt(n2), d)) * std::exp(-fit.c_hat * n2 / T);
            if (envelope > 0) C_req = std::max(C_req, g / envelope);
        }
        int axis = 0;
        while (axis < d && p.c[axis] == R) {
            p.c[axis] = -R;
            ++axis;
        }
        if (axis == d) break;
        ++p.c[axis];
    }
    fit.C_hat = C_req;
    return fit;
}

/// Cheap upper bound G(z) <= coeff / (1 + ||z||^{d-2}) with a calibrated
/// safety coefficient; used for Monte Carlo bias certificates where only an
/// upper bound matters.
inline double green_upper_bound(int d, const Point& z) {
    if (norm2_sq(z) == 0) return kGreenZeroCap;
    // a_d covers the far field; the additive slack covers lattice effects at
    // small ||z|| (checked in tests against table values).
    const double coeff = 2.2 * green_asymptotic_coeff(d) + (d == 3 ? 0.6 : 0.3);
    return coeff / (1.0 + std::pow(norm2(z), d - 2));
}

}  // namespace rangelab

#endif
