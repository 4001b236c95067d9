#ifndef RANGELAB_DEVIATION_HPP
#define RANGELAB_DEVIATION_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "rangelab/confinement.hpp"
#include "rangelab/range_geometry.hpp"
#include "rangelab/rng.hpp"
#include "rangelab/stats.hpp"
#include "rangelab/trajectory.hpp"

namespace rangelab {

/// Direct Monte Carlo estimate of P[|dR_n| <= threshold].
inline MeanCI boundary_tail_prob(RngStream stream, int d, std::int64_t n, std::int64_t threshold,
                                 std::size_t replicas, double level = 0.95) {
    const auto nsteps = static_cast<std::uint32_t>(2 * d);
    std::size_t hits = 0;
    for (std::size_t rep = 0; rep < replicas; ++rep) {
        Rng rng(RngStream{stream.seed, stream.index + rep});
        BoundaryTracker tracker(d);
        Point p = origin();
        for (std::int64_t k = 0; k < n; ++k) {
            p = apply_step(p, rng.below(nsteps));
            tracker.step(p);
        }
        if (tracker.boundary_size() <= threshold) ++hits;
    }
    return proportion_ci(hits, replicas, level);
}

struct DeviationRow {
    std::int64_t n = 0;
    double eps = 0;
    double rho = 0;          // confinement radius of the strategy
    std::int64_t m = 0;      // confined step count (d >= 5: alpha * eps * n; d = 3: n)
    double cost = 0;         // -log P[confinement] from survival simulation
    double x = 0;            // predictor: eps^{2/3} n^{1/3} (d=3) or (eps n)^{1-2/d} (d>=5)
    MeanCI prob;
    bool usable = true;      // zero-survivor cells are dropped from the fit
};

struct DeviationReport {
    int d = 3;
    std::vector<DeviationRow> rows;
    LinearFit fit;           // cost vs x over usable rows
    double kappa_hat = 0;    // fitted slope
    std::size_t dropped = 0;
};

/// Cost of the confinement-based lower-bound strategies, measured by survival
/// simulation and regressed on the predicted scaling variable.
///  - d = 3: confine the whole walk to a ball of radius c3 (n/eps)^{1/3};
///    predictor eps^{2/3} n^{1/3}.
///  - d >= 5: localize m = alpha eps n steps in a ball of volume
///    vol_factor * eps * n; predictor (eps n)^{1-2/d}.
inline DeviationReport deviation_scan_experiment(RngStream stream, int d,
                                                 const std::vector<std::int64_t>& n_grid,
                                                 const std::vector<double>& eps_grid,
                                                 std::size_t replicas, double c3 = 1.0,
                                                 double alpha = 3.0, double vol_factor = 0.5) {
    if (d != 3 && d < 5) throw std::invalid_argument("deviation_scan_experiment: d = 3 or d >= 5");
    DeviationReport rep;
    rep.d = d;
    std::uint64_t idx = stream.index;
    std::vector<double> xs, ys;
    for (std::int64_t n : n_grid) {
        for (double eps : eps_grid) {
            DeviationRow row;
            row.n = n;
            row.eps = eps;
            if (d == 3) {
                row.rho = c3 * std::cbrt(static_cast<double>(n) / eps);
                row.m = n;
                row.x = std::pow(eps, 2.0 / 3.0) * std::cbrt(static_cast<double>(n));
            } else {
                const double en = eps * static_cast<double>(n);
                // ball of volume vol_factor * eps * n: omega_d rho^d = vol_factor * en
                const double omega = std::pow(M_PI, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
                row.rho = std::pow(vol_factor * en / omega, 1.0 / d);
                row.m = static_cast<std::int64_t>(alpha * en);
                row.x = std::pow(en, 1.0 - 2.0 / static_cast<double>(d));
            }
            if (row.rho < 2 || row.m < 10) {
                row.usable = false;
                rep.rows.push_back(row);
                ++rep.dropped;
                continue;
            }
            ConfinementEstimate est =
                estimate_confinement_prob(RngStream{stream.seed, idx}, d, row.m, row.rho, replicas);
            idx += replicas;
            row.prob = est.prob;
            if (est.survived == 0 || est.survived == est.replicas) {
                row.usable = false;
                ++rep.dropped;
            } else {
                row.cost = -std::log(est.prob.mean);
                xs.push_back(row.x);
                ys.push_back(row.cost);
            }
            rep.rows.push_back(row);
        }
    }
    if (xs.size() >= 2) {
        rep.fit = linear_fit(xs, ys);
        rep.kappa_hat = rep.fit.slope;
    }
    return rep;
}

}  // namespace rangelab

#endif
