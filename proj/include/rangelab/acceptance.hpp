#ifndef RANGELAB_ACCEPTANCE_HPP
#define RANGELAB_ACCEPTANCE_HPP

// The acceptance suite: ten self-contained checks, each printing one
// pass/fail line.  Every tolerance and sample size is pinned here.

#include <algorithm>
#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "rangelab/capacity.hpp"
#include "rangelab/confinement.hpp"
#include "rangelab/deviation.hpp"
#include "rangelab/green.hpp"
#include "rangelab/polymer.hpp"
#include "rangelab/multi_ball.hpp"
#include "rangelab/range_geometry.hpp"
#include "rangelab/scan.hpp"
#include "rangelab/slicing.hpp"

namespace rangelab::accept {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0;
};

// --- 1: exact combinatorial identities --------------------------------------

inline CriterionResult criterion_identities(std::uint64_t seed) {
    CriterionResult res;
    res.id = 1;
    res.name = "exact-identities";
    Rng rng(RngStream{seed, 101});
    std::size_t instances = 0, violations = 0;

    for (int rep = 0; rep < 5000; ++rep) {
        const int d = 3 + static_cast<int>(rng.below(4));
        const auto la = static_cast<std::int64_t>(20 + rng.below(100));
        const auto lb = static_cast<std::int64_t>(20 + rng.below(100));
        const PointSet a = random_walk_set(rng, d, la, 4);
        const PointSet b = random_walk_set(rng, d, lb, 4);
        ++instances;
        if (!check_inclusion_exclusion(a, b).holds) ++violations;
        const auto bb = check_boundary_bounds(a, b);
        if (!bb.lower_holds || !bb.upper_holds) ++violations;
        // |A+ n B+| <= 2d |A++ n B|
        const std::size_t lhs = intersection_size(dilate(a), dilate(b));
        const std::size_t rhs = intersection_size(dilate_twice(a), b);
        if (lhs > 2 * static_cast<std::size_t>(d) * rhs) ++violations;
    }

    for (int rep = 0; rep < 2000; ++rep) {
        const int d = 3 + static_cast<int>(rng.below(4));
        std::vector<PointSet> sets;
        const std::size_t m = 2 + rng.below(4);
        for (std::size_t i = 0; i < m; ++i)
            sets.push_back(random_walk_set(rng, d, 15 + static_cast<std::int64_t>(rng.below(60)), 5));
        ++instances;
        if (!check_superadditivity(sets).holds) ++violations;
    }

    for (int rep = 0; rep < 3000; ++rep) {
        const int d = 3 + static_cast<int>(rng.below(4));
        const auto n = static_cast<std::int64_t>(60 + rng.below(340));
        Trajectory traj = generate_walk(RngStream{seed, 5000 + static_cast<std::uint64_t>(rep)}, d, n);
        const auto T = static_cast<std::int64_t>(10 + rng.below(static_cast<std::uint32_t>(n - 9)));
        // the first block [i+1, i+T] must fit inside the horizon
        const std::int64_t i_max = std::min(T - 2, n - T);
        const auto i = static_cast<std::int64_t>(rng.below(static_cast<std::uint32_t>(i_max + 2))) - 1;
        ++instances;
        if (!slicing_terms(traj, i, T, n).holds) ++violations;
    }

    std::ostringstream os;
    os << instances << " instances, " << violations << " violations";
    res.detail = os.str();
    res.pass = violations == 0 && instances >= 10000;
    return res;
}

// --- 2: Green table oracle ---------------------------------------------------

namespace detail {

/// Tallies total visits to each site over all (2d)^T step sequences.
inline void enumerate_paths(int d, int depth, int T, Point p, std::vector<Point>& path,
                            FlatTable<std::int64_t>& visits) {
    if (depth == T) {
        for (const Point& q : path) ++visits[q];
        return;
    }
    for (std::uint32_t s = 0; s < static_cast<std::uint32_t>(2 * d); ++s) {
        path.push_back(apply_step(p, s));
        enumerate_paths(d, depth + 1, T, path.back(), path, visits);
        path.pop_back();
    }
}

}  // namespace detail

inline CriterionResult criterion_green_oracle(std::uint64_t /*seed*/) {
    CriterionResult res;
    res.id = 2;
    res.name = "green-oracle";
    constexpr double kEnumTol = 1e-12;      // double-rounding slack on exact rationals
    constexpr double kMassRelTol = 1e-9;

    bool enum_ok = true;
    double worst_enum = 0;
    for (int T : {3, 8}) {
        FlatTable<std::int64_t> visits;
        std::vector<Point> path{origin()};
        detail::enumerate_paths(3, 0, T, origin(), path, visits);
        const double denom = std::pow(6.0, T);
        RestrictedGreenTable table(3, T, T + 1);  // box covers every reachable site
        double worst = 0;
        visits.for_each([&](const Point& z, const std::int64_t& count) {
            worst = std::max(worst, std::abs(table.value(z) - static_cast<double>(count) / denom));
        });
        // and no site with table mass missing from the enumeration
        if (std::abs(table.sum() + table.escape_occupation() - (T + 1)) > kEnumTol) enum_ok = false;
        worst_enum = std::max(worst_enum, worst);
        if (worst > kEnumTol) enum_ok = false;
    }

    bool mass_ok = true;
    double worst_mass = 0;
    for (std::int64_t T : {64, 512, 4096}) {
        RestrictedGreenTable table(3, T, 16);
        const double rel = table.mass_identity_defect() / static_cast<double>(T + 1);
        worst_mass = std::max(worst_mass, rel);
        if (rel > kMassRelTol) mass_ok = false;
    }

    std::ostringstream os;
    os << "enum worst abs " << worst_enum << ", mass worst rel " << worst_mass;
    res.detail = os.str();
    res.pass = enum_ok && mass_ok;
    return res;
}

// --- 3: capacity cross-method ------------------------------------------------

inline CriterionResult criterion_capacity(std::uint64_t seed) {
    CriterionResult res;
    res.id = 3;
    res.name = "capacity-cross-method";
    constexpr double kCapZeroRef = 0.6595;  // 1/G(0), G(0) from the Bessel-integral oracle
    constexpr double kCapZeroTol = 0.002;
    constexpr double kIndexAgree = 0.15;

    // 20-set corpus: walk ranges, balls, segments, split pairs
    std::vector<PointSet> corpus;
    Rng rng(RngStream{seed, 301});
    for (int i = 0; i < 12; ++i)
        corpus.push_back(random_walk_set(rng, 3, 10 + static_cast<std::int64_t>(rng.below(50)), 0));
    for (double r : {2.0, 3.0, 4.0}) corpus.emplace_back(3, euclidean_ball(origin(), 3, r));
    for (std::int32_t len : {6, 12}) {
        PointSet seg(3);
        for (std::int32_t x = 0; x < len; ++x) seg.insert(Point{{x, 0, 0}});
        corpus.push_back(seg);
    }
    for (std::int32_t gap : {6, 10, 16}) {
        PointSet two(3);
        two.insert(origin());
        two.insert(Point{{gap, 0, 0}});
        corpus.push_back(two);
    }

    std::size_t overlaps = 0;
    std::uint64_t idx = 400;
    for (const PointSet& set : corpus) {
        const double rad = set_radius(set);
        const auto R = std::max<std::int32_t>(16, static_cast<std::int32_t>(4 * (rad + 1)));
        CapacityBracket dir = capacity_dirichlet(set, R);
        CapacityBracket mc = capacity_mc(set, capacity_mc_horizon(set), 600, RngStream{seed, idx});
        idx += 1000;
        if (dir.overlaps(mc)) ++overlaps;
    }

    PointSet zero(3);
    zero.insert(origin());
    const CapacityBracket cap0 = capacity_dirichlet(zero, 64);
    const bool cap0_ok =
        cap0.lower <= kCapZeroRef + kCapZeroTol && cap0.upper >= kCapZeroRef - kCapZeroTol;

    // radius stability of the ball index, consistent R / radius geometry
    std::vector<double> index_vals;
    for (std::int32_t r : {4, 8, 16}) {
        PointSet ball(3, euclidean_ball(origin(), 3, r));
        CapacityBracket b = capacity_dirichlet(ball, 4 * r);
        index_vals.push_back(iso_index(ball, b).upper);
    }
    bool index_ok = true;
    for (double a : index_vals)
        for (double b : index_vals)
            if (std::abs(a - b) / std::min(a, b) > kIndexAgree) index_ok = false;

    std::ostringstream os;
    os << overlaps << "/" << corpus.size() << " overlaps, cap0=[" << cap0.lower << "," << cap0.upper
       << "], I3(4/8/16)=" << index_vals[0] << "/" << index_vals[1] << "/" << index_vals[2];
    res.detail = os.str();
    res.pass = overlaps == corpus.size() && cap0_ok && index_ok;
    return res;
}

// --- 4: greedy-center inclusion ---------------------------------------------

inline CriterionResult criterion_greedy_inclusion(std::uint64_t seed) {
    CriterionResult res;
    res.id = 4;
    res.name = "greedy-inclusion";
    constexpr std::size_t kWanted = 1000;
    Rng rng(RngStream{seed, 401});
    std::size_t done = 0, failures = 0, attempts = 0;
    std::uint64_t idx = 1000;
    while (done < kWanted && attempts < 20 * kWanted) {
        ++attempts;
        const auto n = static_cast<std::int64_t>(400 + rng.below(800));
        const double r = 1.0 + rng.below(2);
        Point v;
        for (int i = 0; i < 3; ++i) v.c[i] = static_cast<std::int32_t>(rng.below(5)) - 2;
        const auto t = static_cast<std::int64_t>(1 + rng.below(4));
        const auto L = static_cast<std::int64_t>(3 + rng.below(13));
        Trajectory traj = generate_walk(RngStream{seed, idx++}, 3, n);
        const ScanResult scan = rolling_scan(traj, v, r, t, n);
        if (static_cast<std::int64_t>(scan.count()) <= L) continue;  // precondition not met
        ++done;
        const CenterFamily fam = greedy_centers(traj, v, r, t, L, n);
        bool ok = fam.well_separated() && !fam.centers.empty();
        const OccupationField occ(traj, n);
        for (const Point& x : fam.centers)
            if (occ.in_ball(x + v, r) < t) ok = false;
        if (occupation_near_family(occ, fam) <= L) ok = false;
        if (!ok) ++failures;
    }
    std::ostringstream os;
    os << done << " instances with precondition, " << failures << " failures";
    res.detail = os.str();
    res.pass = done >= kWanted && failures == 0;
    return res;
}

// --- 5: folding functional oracle -------------------------------------------

inline CriterionResult criterion_xi_oracle(std::uint64_t seed) {
    CriterionResult res;
    res.id = 5;
    res.name = "xi-oracle";
    constexpr double kRelTol = 1e-9;
    const RestrictedGreenTable table(3, 20, 14);
    double worst = 0;
    for (std::uint64_t rep = 0; rep < 50; ++rep) {
        Trajectory traj = generate_walk(RngStream{seed, 500 + rep}, 3, 200);
        const XiValue inc = xi_fold(traj, 200, 20, table, 0.0);
        const double naive = xi_fold_naive(traj, 200, 20, table);
        worst = std::max(worst, std::abs(inc.value - naive) / naive);
    }
    std::ostringstream os;
    os << "worst relative gap " << worst;
    res.detail = os.str();
    res.pass = worst <= kRelTol;
    return res;
}

// --- 6: confinement probability scaling -------------------------------------

inline CriterionResult criterion_confinement_scaling(std::uint64_t seed) {
    CriterionResult res;
    res.id = 6;
    res.name = "confinement-scaling";
    constexpr double kMinR2 = 0.95;
    constexpr double kSlopeStability = 0.20;
    const std::vector<std::int64_t> n_grid{2000, 5000, 10000, 20000};
    const std::vector<double> ratio_grid{1.0, 1.6, 2.4, 3.2};  // target n / rho^2
    constexpr std::size_t kReplicas = 20000;

    struct Cell {
        double x, y;
    };
    std::vector<Cell> cells;
    std::uint64_t idx = 600;
    for (std::int64_t n : n_grid) {
        for (double c : ratio_grid) {
            const double rho = std::round(std::sqrt(static_cast<double>(n) / c));
            ConfinementEstimate est = estimate_confinement_prob(RngStream{seed, idx}, 3, n, rho, kReplicas);
            idx += kReplicas;
            if (est.survived == 0) continue;
            cells.push_back({static_cast<double>(n) / (rho * rho), std::log(est.prob.mean)});
        }
    }
    std::vector<double> xs, ys;
    for (const Cell& c : cells) {
        xs.push_back(c.x);
        ys.push_back(c.y);
    }
    const LinearFit fit = linear_fit(xs, ys);

    // slope stability across grid halves (split at the median predictor)
    std::vector<double> sorted_x = xs;
    std::sort(sorted_x.begin(), sorted_x.end());
    const double mid = sorted_x[sorted_x.size() / 2];
    std::vector<double> x1, y1, x2, y2;
    for (const Cell& c : cells) {
        (c.x < mid ? x1 : x2).push_back(c.x);
        (c.x < mid ? y1 : y2).push_back(c.y);
    }
    double stability = 1.0;
    if (x1.size() >= 3 && x2.size() >= 3) {
        const double s1 = linear_fit(x1, y1).slope, s2 = linear_fit(x2, y2).slope;
        stability = std::abs(s1 - s2) / (0.5 * std::abs(s1 + s2));
    }
    std::ostringstream os;
    os << "kappa_hat=" << -fit.slope << " R2=" << fit.r2 << " half-split rel diff=" << stability;
    res.detail = os.str();
    res.pass = fit.r2 >= kMinR2 && stability <= kSlopeStability && cells.size() >= 14;
    return res;
}

// --- 7: deviation-strategy cost scaling -------------------------------------

inline CriterionResult criterion_deviation_scaling(std::uint64_t seed) {
    CriterionResult res;
    res.id = 7;
    res.name = "deviation-scaling";
    constexpr double kMinR2 = 0.90;
    const DeviationReport d3 = deviation_scan_experiment(
        RngStream{seed, 700}, 3, {2000, 6000, 18000}, {0.05, 0.1, 0.2}, 150000, 1.3);
    const DeviationReport d5 = deviation_scan_experiment(
        RngStream{seed, 7000000}, 5, {400, 800, 1400, 2000}, {0.02}, 200000, 1.0, 3.0, 150.0);
    std::ostringstream os;
    os << "d3: R2=" << d3.fit.r2 << " slope=" << d3.kappa_hat << " (" << d3.rows.size() - d3.dropped
       << " cells); d5: R2=" << d5.fit.r2 << " slope=" << d5.kappa_hat << " ("
       << d5.rows.size() - d5.dropped << " cells)";
    res.detail = os.str();
    res.pass = d3.fit.r2 >= kMinR2 && d5.fit.r2 >= kMinR2;
    return res;
}

// --- 8: mean boundary drift -------------------------------------------------

inline CriterionResult criterion_mean_drift(std::uint64_t seed) {
    CriterionResult res;
    res.id = 8;
    res.name = "mean-drift";
    constexpr double kSlopeTarget = -0.5;
    constexpr double kSlopeTol = 0.15;
    const std::vector<std::int64_t> n_grid{10000, 30000, 100000, 300000, 1000000};
    const std::vector<std::size_t> reps{3000, 1500, 700, 350, 250};

    std::vector<double> m(n_grid.size(), 0);
    std::uint64_t idx = 800;
    for (std::size_t gi = 0; gi < n_grid.size(); ++gi) {
        const std::int64_t n = n_grid[gi];
        double sum = 0;
        for (std::size_t rep = 0; rep < reps[gi]; ++rep) {
            Rng rng(RngStream{seed, idx++});
            BoundaryTracker tracker(3, 1 << 16);
            Point p = origin();
            for (std::int64_t k = 0; k < n; ++k) {
                p = apply_step(p, rng.below(6));
                tracker.step(p);
            }
            sum += static_cast<double>(tracker.boundary_size()) / static_cast<double>(n);
        }
        m[gi] = sum / static_cast<double>(reps[gi]);
    }

    // nu_hat from the two-parameter finite-size fit m(n) = nu + a / sqrt(n)
    std::vector<double> xs, ys, ws;
    for (std::size_t gi = 0; gi < n_grid.size(); ++gi) {
        xs.push_back(1.0 / std::sqrt(static_cast<double>(n_grid[gi])));
        ys.push_back(m[gi]);
        ws.push_back(static_cast<double>(reps[gi]) * static_cast<double>(n_grid[gi]));
    }
    const LinearFit plateau = weighted_linear_fit(xs, ys, ws);
    const double nu_hat = plateau.intercept;

    // decade slope of log |m(n) - nu_hat| over n = 1e4, 1e5, 1e6
    std::vector<double> lx, ly;
    for (std::size_t gi : {std::size_t{0}, std::size_t{2}, std::size_t{4}}) {
        const double dev = std::abs(m[gi] - nu_hat);
        if (dev <= 0) continue;
        lx.push_back(std::log(static_cast<double>(n_grid[gi])));
        ly.push_back(std::log(dev));
    }
    double slope = 0;
    if (lx.size() == 3) slope = linear_fit(lx, ly).slope;
    std::ostringstream os;
    os << "nu_hat=" << nu_hat << " corr_amp=" << plateau.slope << " decade slope=" << slope;
    res.detail = os.str();
    res.pass = lx.size() == 3 && std::abs(slope - kSlopeTarget) <= kSlopeTol;
    return res;
}

// --- 9: polymer sanity -------------------------------------------------------

inline CriterionResult criterion_polymer(std::uint64_t seed) {
    CriterionResult res;
    res.id = 9;
    res.name = "polymer-sanity";
    constexpr double kTvTol = 0.02;
    std::ostringstream os;
    bool pass = true;

    // (a) beta = 0 reproduces the plain walk
    {
        const std::int64_t n = 400;
        std::vector<double> direct;
        for (std::uint64_t rep = 0; rep < 600; ++rep) {
            Rng rng(RngStream{seed, 900 + rep});
            BoundaryTracker tracker(3);
            Point p = origin();
            for (std::int64_t k = 0; k < n; ++k) {
                p = apply_step(p, rng.below(6));
                tracker.step(p);
            }
            direct.push_back(static_cast<double>(tracker.boundary_size()));
        }
        const MeanCI md = mean_ci(direct);
        const PolymerRun run = polymer_mcmc(RngStream{seed, 2000}, 3, n, 0.0, 600, 20, 2000, md.mean);
        // batch means absorb chain autocorrelation
        std::vector<double> batches;
        const std::size_t bs = run.samples.size() / 12;
        for (std::size_t b = 0; b + 1 < 12 + 1; ++b) {
            double s = 0;
            for (std::size_t i = b * bs; i < (b + 1) * bs; ++i) s += static_cast<double>(run.samples[i].boundary);
            batches.push_back(s / static_cast<double>(bs));
        }
        const MeanCI mc = mean_ci(batches);
        const double gap = std::abs(mc.mean - md.mean);
        const double two_sigma = 2.0 * std::sqrt(mc.stderr_ * mc.stderr_ + md.stderr_ * md.stderr_);
        os << "beta0 gap=" << gap << " vs 2sig=" << two_sigma;
        if (gap > two_sigma) pass = false;
    }

    // (b) tiny-instance detailed balance (d = 3, n = 6, exhaustive reference)
    {
        const std::int64_t n = 6;
        const double beta = 1.2, mu = 0;
        const double scale = std::pow(6.0, 2.0 / 3.0);
        std::vector<double> weight(46656);
        double Z = 0;
        std::vector<Point> pos(7, origin());
        std::vector<std::uint8_t> steps(6);
        for (std::size_t code = 0; code < weight.size(); ++code) {
            std::size_t c = code;
            for (int k = 0; k < 6; ++k) {
                steps[static_cast<std::size_t>(k)] = static_cast<std::uint8_t>(c % 6);
                c /= 6;
            }
            for (int k = 0; k < 6; ++k) pos[static_cast<std::size_t>(k) + 1] = apply_step(pos[static_cast<std::size_t>(k)], steps[static_cast<std::size_t>(k)]);
            const double b = static_cast<double>(boundary_of_positions(3, pos));
            weight[code] = std::exp(-beta * (b - mu) / scale);
            Z += weight[code];
        }
        PolymerChain chain(RngStream{seed, 3000}, 3, n, beta, mu, 3.0);
        for (int k = 0; k < 20000; ++k) chain.step();  // burn-in
        std::vector<std::int64_t> freq(46656, 0);
        const std::int64_t draws = 250000000;
        for (std::int64_t k = 0; k < draws; ++k) {
            chain.step();
            std::size_t code = 0;
            const auto& st = chain.steps();
            for (int j = 5; j >= 0; --j) code = code * 6 + st[static_cast<std::size_t>(j)];
            ++freq[code];
        }
        double tv = 0;
        for (std::size_t code = 0; code < weight.size(); ++code)
            tv += std::abs(static_cast<double>(freq[code]) / static_cast<double>(draws) - weight[code] / Z);
        tv /= 2;
        os << "; TV=" << tv;
        if (tv > kTvTol) pass = false;
    }

    // (c) + (d) energy curve monotone, localization diagnostic grows
    {
        const std::int64_t n = 1000;
        std::vector<double> betas{0, 0.6, 1.2, 2.4, 4.0};
        // centering constant from plain simulation
        std::vector<double> mu_samples;
        for (std::uint64_t rep = 0; rep < 300; ++rep) {
            Rng rng(RngStream{seed, 4000 + rep});
            BoundaryTracker tracker(3);
            Point p = origin();
            for (std::int64_t k = 0; k < n; ++k) {
                p = apply_step(p, rng.below(6));
                tracker.step(p);
            }
            mu_samples.push_back(static_cast<double>(tracker.boundary_size()));
        }
        const double mu = mean_ci(mu_samples).mean;
        std::vector<BetaKnot> knots;
        double diag_low = 0, diag_high = 0, diag_low_se = 0, diag_high_se = 0;
        for (std::size_t bi = 0; bi < betas.size(); ++bi) {
            const bool endpoint = bi == 0 || bi + 1 == betas.size();
            const PolymerRun run =
                polymer_mcmc(RngStream{seed, 5000 + 100 * bi}, 3, n, betas[bi], 400, 30, 4000, mu,
                             16.0, endpoint ? 8 : 0);
            knots.push_back({betas[bi], run.mean_neg_centered(3)});
            if (endpoint) {
                std::vector<double> diag;
                for (const auto& s : run.samples)
                    if (s.max_ball >= 0) diag.push_back(static_cast<double>(s.max_ball));
                const MeanCI mdiag = mean_ci(diag);
                if (bi == 0) {
                    diag_low = mdiag.mean;
                    diag_low_se = mdiag.stderr_;
                } else {
                    diag_high = mdiag.mean;
                    diag_high_se = mdiag.stderr_;
                }
            }
        }
        const FreeEnergyCurve curve = free_energy_curve(knots, 3, n);
        const double diag_z = (diag_high - diag_low) /
                              std::sqrt(diag_low_se * diag_low_se + diag_high_se * diag_high_se + 1e-12);
        os << "; curve nondecreasing=" << curve.nondecreasing << " top=" << curve.value.back()
           << "; localization z=" << diag_z;
        if (!curve.nondecreasing) pass = false;
        if (curve.value.back() < -curve.half_ci.back()) pass = false;  // Z >= 1 proxy
        if (diag_z < 2.0) pass = false;
    }

    res.detail = os.str();
    res.pass = pass;
    return res;
}

// --- 10: capacity discrimination --------------------------------------------

inline CriterionResult criterion_capacity_discrimination(std::uint64_t seed) {
    CriterionResult res;
    res.id = 10;
    res.name = "capacity-discrimination";
    const double r = 3.0;
    const std::int64_t n = 4000, t = 15;
    const std::size_t replicas = 12000;

    CenterFamily clustered, spread;
    clustered.radius = r;
    clustered.centers = {origin(), Point{{12, 0, 0}}};
    spread.radius = r;
    spread.centers = {origin(), Point{{30, 0, 0}}};

    const PointSet balls_c = family_balls(clustered, 3, r);
    const PointSet balls_s = family_balls(spread, 3, r);
    const CapacityBracket cap_c = capacity_dirichlet(balls_c, static_cast<std::int32_t>(4 * (set_radius(balls_c) + 1)));
    const CapacityBracket cap_s = capacity_dirichlet(balls_s, static_cast<std::int32_t>(4 * (set_radius(balls_s) + 1)));

    std::size_t hit_c = 0, hit_s = 0;
    for (std::size_t rep = 0; rep < replicas; ++rep) {
        Trajectory traj = generate_walk(RngStream{seed, 10000 + rep}, 3, n);
        const OccupationField occ(traj, n);
        bool all_c = true, all_s = true;
        for (const Point& x : clustered.centers)
            if (occ.in_ball(x, r) < t) all_c = false;
        for (const Point& x : spread.centers)
            if (occ.in_ball(x, r) < t) all_s = false;
        if (all_c) ++hit_c;
        if (all_s) ++hit_s;
    }
    const double pc = static_cast<double>(hit_c) / static_cast<double>(replicas);
    const double ps = static_cast<double>(hit_s) / static_cast<double>(replicas);
    const double se = std::sqrt((pc * (1 - pc) + ps * (1 - ps)) / static_cast<double>(replicas));
    const double z = (pc - ps) / (se + 1e-15);

    std::ostringstream os;
    os << "p_clustered=" << pc << " p_spread=" << ps << " z=" << z << "; cap=["
       << cap_c.lower << "," << cap_c.upper << "] vs [" << cap_s.lower << "," << cap_s.upper << "]";
    res.detail = os.str();
    // larger measured capacity must coincide with the smaller visit
    // probability; capacities are compared on the upper (Dirichlet) estimates
    // at the consistent R = 4 * radius geometry, where the residual
    // overestimate factor is shared (the lower ends carry the 0.5 clamp and
    // are too loose to order nearby sets)
    res.pass = z >= 1.96 && cap_s.upper > cap_c.upper * 1.02;
    return res;
}

// --- driver ------------------------------------------------------------------

inline std::vector<CriterionResult> run_all(std::uint64_t seed, bool print = true,
                                            const std::vector<int>& only = {}) {
    using Fn = CriterionResult (*)(std::uint64_t);
    const std::vector<Fn> criteria{
        criterion_identities,      criterion_green_oracle,  criterion_capacity,
        criterion_greedy_inclusion, criterion_xi_oracle,    criterion_confinement_scaling,
        criterion_deviation_scaling, criterion_mean_drift,  criterion_polymer,
        criterion_capacity_discrimination};
    std::vector<CriterionResult> out;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
        const auto t0 = std::chrono::steady_clock::now();
        CriterionResult r = criteria[i](seed);
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (print)
            std::printf("[%s] criterion %2d %-26s (%.1fs) %s\n", r.pass ? "PASS" : "FAIL", r.id,
                        r.name.c_str(), r.seconds, r.detail.c_str());
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace rangelab::accept

#endif
