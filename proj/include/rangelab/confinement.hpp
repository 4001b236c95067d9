#ifndef RANGELAB_CONFINEMENT_HPP
#define RANGELAB_CONFINEMENT_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "rangelab/center_family.hpp"
#include "rangelab/flat_table.hpp"
#include "rangelab/lattice.hpp"
#include "rangelab/range_geometry.hpp"
#include "rangelab/rng.hpp"
#include "rangelab/stats.hpp"
#include "rangelab/trajectory.hpp"

namespace rangelab {

/// Alternating stopping times between an inner ball B(x, r_in) and the
/// exterior of B(x, r_out):
///   sigma_0 = first entry into the inner ball,
///   tau_j   = first exit from B(x, r_out) after sigma_j,
///   sigma_{j+1} = first return to the inner ball after tau_j.
/// N_n = sup{j : sigma_j <= n} (-1 when the inner ball is never entered).
struct ExcursionDecomposition {
    Point x{};
    double r_in = 1, r_out = 2;
    std::int64_t n = 0;
    std::vector<std::int64_t> sigma;
    std::vector<std::int64_t> tau;  // tau.size() < sigma.size() means the last exit never happened
    std::int64_t N = -1;

    bool last_tau_infinite() const { return tau.size() < sigma.size(); }

    /// Occupation of the inner ball is contained in the excursion windows:
    /// ell_n(B(x, r_in)) <= sum_j (min(tau_j, n+1) - sigma_j).
    std::int64_t duration_bound() const {
        std::int64_t total = 0;
        for (std::size_t j = 0; j < sigma.size(); ++j) {
            const std::int64_t end = j < tau.size() ? std::min(tau[j], n + 1) : n + 1;
            if (sigma[j] <= n) total += end - sigma[j];
        }
        return total;
    }
};

inline ExcursionDecomposition excursions(const Trajectory& traj, const Point& x, double r_in,
                                         double r_out, std::int64_t n) {
    if (!(r_in < r_out)) throw std::invalid_argument("excursions: need r_in < r_out");
    if (n < 0 || n > traj.length()) throw std::out_of_range("excursions: bad horizon");
    ExcursionDecomposition dec;
    dec.x = x;
    dec.r_in = r_in;
    dec.r_out = r_out;
    dec.n = n;
    const auto in2 = static_cast<std::int64_t>(r_in * r_in + 1e-9);
    const auto out2 = static_cast<std::int64_t>(r_out * r_out + 1e-9);
    bool seeking_entry = true;
    for (std::int64_t k = 0; k <= n; ++k) {
        const std::int64_t d2 = dist_sq(traj.at(k), x);
        if (seeking_entry) {
            if (d2 <= in2) {
                dec.sigma.push_back(k);
                seeking_entry = false;
            }
        } else {
            if (d2 > out2) {
                dec.tau.push_back(k);
                seeking_entry = true;
            }
        }
    }
    dec.N = static_cast<std::int64_t>(dec.sigma.size()) - 1;
    return dec;
}

struct ConfinementEstimate {
    std::int64_t n = 0;
    double rho = 0;
    std::size_t replicas = 0;
    std::size_t survived = 0;
    MeanCI prob;  // P[R_n subset B(0, rho)] with CI
};

/// Survival simulation of the confinement probability: each walk is aborted
/// at its first exit from the ball.  The squared norm is updated in O(1) per
/// step.
inline ConfinementEstimate estimate_confinement_prob(RngStream stream, int d, std::int64_t n,
                                                     double rho, std::size_t replicas,
                                                     double level = 0.95) {
    if (rho < 1) throw std::invalid_argument("estimate_confinement_prob: need rho >= 1");
    const auto rho2 = static_cast<std::int64_t>(rho * rho + 1e-9);
    const auto nsteps = static_cast<std::uint32_t>(2 * d);
    std::size_t survived = 0;
    for (std::size_t rep = 0; rep < replicas; ++rep) {
        Rng rng(RngStream{stream.seed, stream.index + rep});
        Point p = origin();
        std::int64_t n2 = 0;
        bool ok = true;
        for (std::int64_t k = 0; k < n; ++k) {
            const std::uint32_t s = rng.below(nsteps);
            const int axis = static_cast<int>(s >> 1);
            const std::int32_t sgn = (s & 1) ? -1 : +1;
            n2 += 2ll * sgn * p.c[axis] + 1;
            p.c[axis] += sgn;
            if (n2 > rho2) {
                ok = false;
                break;
            }
        }
        if (ok) ++survived;
    }
    ConfinementEstimate est;
    est.n = n;
    est.rho = rho;
    est.replicas = replicas;
    est.survived = survived;
    est.prob = proportion_ci(survived, replicas, level);
    return est;
}

enum class ConfinedMethod { kRejection, kPathMcmc };

inline bool trajectory_confined(const Trajectory& traj, double rho) {
    const auto rho2 = static_cast<std::int64_t>(rho * rho + 1e-9);
    for (const Point& p : traj.points)
        if (norm2_sq(p) > rho2) return false;
    return true;
}

namespace detail {

/// Recomputes positions from index `from` given the step sequence; returns
/// false (leaving positions in an arbitrary suffix state) on a ball exit.
inline bool replay_steps(const std::vector<std::uint8_t>& steps, std::vector<Point>& pos,
                         std::size_t from, std::int64_t rho2) {
    for (std::size_t k = from; k < steps.size(); ++k) {
        pos[k + 1] = apply_step(pos[k], steps[k]);
        if (rho2 >= 0 && norm2_sq(pos[k + 1]) > rho2) return false;
    }
    return true;
}

}  // namespace detail

/// Samples a walk conditioned on {R_n subset B(0, rho)}.
///  - rejection: exact conditional law; requires rho >= 0.5 sqrt(n) so the
///    acceptance probability is not astronomically small,
///  - path MCMC: Metropolis over step sequences with block re-randomization
///    (80%) and single-step flips (20%); the target is uniform over confined
///    sequences, so a proposal is accepted iff it stays confined.
/// Every emitted trajectory is re-verified against the constraint.
inline Trajectory sample_confined(RngStream stream, int d, std::int64_t n, double rho,
                                  ConfinedMethod method, std::size_t budget = 0,
                                  double block_mean = 8.0) {
    if (d < 3 || d > kMaxDim) throw std::invalid_argument("sample_confined: bad dimension");
    if (rho < 1) throw std::invalid_argument("sample_confined: need rho >= 1");
    const auto rho2 = static_cast<std::int64_t>(rho * rho + 1e-9);
    const auto nsteps = static_cast<std::uint32_t>(2 * d);

    if (method == ConfinedMethod::kRejection) {
        if (rho < 0.5 * std::sqrt(static_cast<double>(n)))
            throw std::invalid_argument("sample_confined: rejection infeasible for rho << sqrt(n)");
        if (budget == 0) budget = 200000;
        for (std::size_t attempt = 0; attempt < budget; ++attempt) {
            Trajectory traj = generate_walk(RngStream{stream.seed, stream.index + attempt}, d, n);
            if (trajectory_confined(traj, rho)) return traj;
        }
        throw std::runtime_error("sample_confined: rejection budget exhausted");
    }

    // path MCMC; deterministic confined start: oscillate along the first axis
    if (budget == 0) budget = static_cast<std::size_t>(20 * n);
    std::vector<std::uint8_t> steps(static_cast<std::size_t>(n));
    for (std::size_t k = 0; k < steps.size(); ++k) steps[k] = (k % 2 == 0) ? 0 : 1;  // +e1, -e1, ...
    std::vector<Point> pos(static_cast<std::size_t>(n) + 1, origin());
    if (!detail::replay_steps(steps, pos, 0, rho2))
        throw std::runtime_error("sample_confined: initial path not confined");

    Rng rng(stream);
    std::vector<std::uint8_t> prop_steps = steps;
    std::vector<Point> prop_pos = pos;
    for (std::size_t it = 0; it < budget; ++it) {
        prop_steps = steps;
        std::size_t a;
        if (rng.uniform() < 0.8) {
            // geometric block length, mean block_mean
            std::size_t len = 1;
            while (rng.uniform() < 1.0 - 1.0 / block_mean && len < steps.size()) ++len;
            a = static_cast<std::size_t>(rng.below(static_cast<std::uint32_t>(steps.size())));
            const std::size_t b = std::min(a + len, steps.size());
            for (std::size_t k = a; k < b; ++k) prop_steps[k] = static_cast<std::uint8_t>(rng.below(nsteps));
        } else {
            a = static_cast<std::size_t>(rng.below(static_cast<std::uint32_t>(steps.size())));
            prop_steps[a] = static_cast<std::uint8_t>(rng.below(nsteps));
        }
        prop_pos = pos;
        if (detail::replay_steps(prop_steps, prop_pos, a, rho2)) {
            steps.swap(prop_steps);
            pos.swap(prop_pos);
        }
    }

    Trajectory traj;
    traj.d = d;
    traj.stream = stream;
    traj.points = pos;
    if (!trajectory_confined(traj, rho)) throw std::logic_error("sample_confined: emitted path not confined");
    return traj;
}

struct LemExcRow {
    std::int64_t t = 0;
    double freq = 0;       // all centers: occupation >= t
    double mean_max_N = 0; // mean over samples of max_x N_n(x)
    std::size_t det_checked = 0;  // samples where the duration bound held (must equal replicas * |C|)
};

struct LemExcReport {
    std::vector<LemExcRow> rows;
    double c_hat = 0;       // empirical 95th percentile of N * r^2 / occupation
    double slope = 0;       // slope of log freq vs t / r^2 (zero-count bins dropped)
    std::size_t replicas = 0;
    bool deterministic_ok = false;
};

/// Excursion-count calibration for a center family: per sample the exact
/// duration bound is checked, the joint occupation event frequency is
/// tabulated over the t grid, and the excursions-per-occupation ratio is
/// summarized.
inline LemExcReport check_lem_exc(RngStream stream, int d, const CenterFamily& fam, double r,
                                  const std::vector<std::int64_t>& t_grid, std::int64_t n,
                                  std::size_t replicas) {
    if (fam.centers.empty()) throw std::invalid_argument("check_lem_exc: empty family");
    LemExcReport rep;
    rep.replicas = replicas;
    std::vector<std::size_t> hits(t_grid.size(), 0);
    std::vector<double> max_N_sum(t_grid.size(), 0);
    std::vector<double> ratios;
    std::size_t det_ok = 0, det_total = 0;
    for (std::size_t rrep = 0; rrep < replicas; ++rrep) {
        Trajectory traj = generate_walk(RngStream{stream.seed, stream.index + rrep}, d, n);
        OccupationField occ(traj, n);
        std::int64_t min_occ = -1, max_N = 0;
        for (const Point& x : fam.centers) {
            const std::int64_t o = occ.in_ball(x, r);
            ExcursionDecomposition dec = excursions(traj, x, r, 2 * r, n);
            ++det_total;
            if (o <= dec.duration_bound()) ++det_ok;
            if (min_occ < 0 || o < min_occ) min_occ = o;
            max_N = std::max(max_N, dec.N + 1);
            if (o > 0) ratios.push_back(static_cast<double>(dec.N + 1) * r * r / static_cast<double>(o));
        }
        for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
            if (min_occ >= t_grid[ti]) {
                ++hits[ti];
                max_N_sum[ti] += static_cast<double>(max_N);
            }
        }
    }
    rep.deterministic_ok = det_ok == det_total;
    std::vector<double> xs, ys;
    for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
        LemExcRow row;
        row.t = t_grid[ti];
        row.freq = static_cast<double>(hits[ti]) / static_cast<double>(replicas);
        row.mean_max_N = hits[ti] > 0 ? max_N_sum[ti] / static_cast<double>(hits[ti]) : 0;
        row.det_checked = det_ok;
        rep.rows.push_back(row);
        if (hits[ti] > 0 && hits[ti] < replicas) {
            xs.push_back(static_cast<double>(t_grid[ti]) / (r * r));
            ys.push_back(std::log(row.freq));
        }
    }
    if (xs.size() >= 2) rep.slope = linear_fit(xs, ys).slope;
    if (!ratios.empty()) {
        std::sort(ratios.begin(), ratios.end());
        rep.c_hat = ratios[static_cast<std::size_t>(0.95 * (ratios.size() - 1))];
    }
    return rep;
}

struct CoveringReport {
    std::int64_t n = 0;
    double eps = 0;
    double rho = 0;           // Lambda containment radius c (n/eps)^{1/3}
    std::size_t lambda_size = 0;
    std::size_t replicas = 0;
    double freq_confined = 0;  // P[|R_n n Lambda| > eps |Lambda|] under confined sampling
    double freq_free = 0;      // same under the unconditioned walk (paired comparison)
    double mean_cover = 0;     // mean |R_n n Lambda| / |Lambda| (confined)
    bool partition_ok = false; // sum_i X_i <= |R_n n Lambda| <= |Lambda| on every sample
    std::vector<std::vector<std::int64_t>> excursion_hits;  // per-sample X_i lists (confined)
};

/// Covering experiment in d = 3: confined walks (ball of radius 5 rho) are
/// scored on the fraction of Lambda they visit; per-excursion new-hit counts
/// X_i are recorded with the exact partition check.
inline CoveringReport covering_experiment(RngStream stream, int d, std::int64_t n, double eps,
                                          const PointSet& lambda, std::size_t replicas,
                                          double c_shape = 2.0, double C_shape = 1.0) {
    if (d != 3) throw std::invalid_argument("covering_experiment: d = 3 only");
    if (eps <= 0 || eps >= 1) throw std::invalid_argument("covering_experiment: eps in (0,1)");
    const double rho = c_shape * std::cbrt(static_cast<double>(n) / eps);
    const auto rho2 = static_cast<std::int64_t>(rho * rho + 1e-9);
    bool inside = true;
    lambda.for_each([&](const Point& p) {
        if (norm2_sq(p) > rho2) inside = false;
    });
    if (!inside) throw std::invalid_argument("covering_experiment: Lambda not inside B(0, c(n/eps)^{1/3})");
    if (static_cast<double>(lambda.size()) < C_shape / (eps * eps * eps))
        throw std::invalid_argument("covering_experiment: |Lambda| below C / eps^3");

    CoveringReport rep;
    rep.n = n;
    rep.eps = eps;
    rep.rho = rho;
    rep.lambda_size = lambda.size();
    rep.replicas = replicas;
    const double confine_rho = 5.0 * rho;
    const bool use_rejection = confine_rho >= 0.5 * std::sqrt(static_cast<double>(n));
    const auto threshold = static_cast<std::int64_t>(eps * static_cast<double>(lambda.size()));

    std::size_t hits_conf = 0, hits_free = 0;
    double cover_sum = 0;
    bool partition_ok = true;
    for (std::size_t rrep = 0; rrep < replicas; ++rrep) {
        const RngStream rs{stream.seed, stream.index + 2 * rrep};
        Trajectory conf = use_rejection
                              ? sample_confined(rs, d, n, confine_rho, ConfinedMethod::kRejection)
                              : sample_confined(rs, d, n, confine_rho, ConfinedMethod::kPathMcmc);
        Trajectory free_walk = generate_walk(RngStream{stream.seed, stream.index + 2 * rrep + 1}, d, n);

        // per-excursion new hits of Lambda (inner ball 2 rho, outer 5 rho)
        const ExcursionDecomposition dec = excursions(conf, origin(), 2.0 * rho, confine_rho, n);
        PointSet seen(d, lambda.size());
        std::vector<std::int64_t> X;
        for (std::size_t j = 0; j < dec.sigma.size(); ++j) {
            const std::int64_t end = j < dec.tau.size() ? std::min(dec.tau[j], n + 1) : n + 1;
            std::int64_t xj = 0;
            for (std::int64_t k = dec.sigma[j]; k < end; ++k) {
                const Point& p = conf.at(k);
                if (lambda.contains(p) && seen.insert(p)) ++xj;
            }
            X.push_back(xj);
        }
        // |R_n n Lambda| from the full range, independent of the excursion scan
        const std::int64_t inter =
            static_cast<std::int64_t>(intersection_size(range_of(conf, 0, n), lambda));
        std::int64_t sum_X = 0;
        for (auto x : X) sum_X += x;
        if (!(sum_X <= inter && inter <= static_cast<std::int64_t>(lambda.size()))) partition_ok = false;
        if (rep.excursion_hits.size() < 32) rep.excursion_hits.push_back(std::move(X));

        if (inter > threshold) ++hits_conf;
        cover_sum += static_cast<double>(inter) / static_cast<double>(lambda.size());

        const PointSet free_range = range_of(free_walk, 0, n);
        if (static_cast<std::int64_t>(intersection_size(free_range, lambda)) > threshold) ++hits_free;
    }
    rep.freq_confined = static_cast<double>(hits_conf) / static_cast<double>(replicas);
    rep.freq_free = static_cast<double>(hits_free) / static_cast<double>(replicas);
    rep.mean_cover = cover_sum / static_cast<double>(replicas);
    rep.partition_ok = partition_ok;
    return rep;
}

}  // namespace rangelab

#endif
