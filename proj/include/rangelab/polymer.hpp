#ifndef RANGELAB_POLYMER_HPP
#define RANGELAB_POLYMER_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "rangelab/flat_table.hpp"
#include "rangelab/lattice.hpp"
#include "rangelab/range_geometry.hpp"
#include "rangelab/rng.hpp"
#include "rangelab/stats.hpp"
#include "rangelab/trajectory.hpp"

namespace rangelab {

/// Default localization-diagnostic radius: r_n^d = n / log n (the upper end
/// of the admissible window; the lower end n^{2/d} (log n)^2 exceeds it at
/// desk scale, so the window itself is empty for reachable n).
inline double default_diag_radius(int d, std::int64_t n) {
    const double nn = static_cast<double>(std::max<std::int64_t>(n, 3));
    return std::pow(nn / std::log(nn), 1.0 / d);
}

inline std::int64_t boundary_of_positions(int d, const std::vector<Point>& pos) {
    BoundaryTracker tracker(d, pos.size() * 2);
    for (std::size_t k = 1; k < pos.size(); ++k) tracker.step(pos[k]);
    return tracker.boundary_size();
}

/// max over visited centers x of ell_n(B(x, r)).
inline std::int64_t max_ball_occupation(const OccupationField& occ, double r) {
    const std::vector<Point> ball = euclidean_ball_offsets(occ.dim(), r);
    std::int64_t best = 0;
    occ.for_each([&](const Point& x, const std::int64_t&) {
        std::int64_t total = 0;
        for (const Point& w : ball) total += occ.count(x + w);
        best = std::max(best, total);
    });
    return best;
}

struct PolymerObservables {
    std::int64_t proposal = 0;   // proposal count at which the sample was taken
    std::int64_t boundary = 0;   // |dR_n|
    std::int64_t range = 0;      // |R_n|
    double gyration = 0;
    double energy = 0;           // (beta / n^{2/d}) (|dR_n| - mu)
    std::int64_t max_ball = -1;  // localization diagnostic; -1 when skipped
};

/// Metropolis chain over step sequences targeting
///   Q(s) proportional to exp(-(beta / n^{2/d}) (|dR_n(s)| - mu)).
/// The base measure is uniform over (2d)^n sequences, proposals are symmetric
/// (block re-randomization 80%, single-step flips 20%), so the acceptance
/// ratio depends only on the boundary change.
class PolymerChain {
public:
    PolymerChain(RngStream stream, int d, std::int64_t n, double beta, double mu,
                 double block_mean = 16.0)
        : d_(d), n_(n), beta_(beta), mu_(mu), block_mean_(block_mean), rng_(stream) {
        if (d < 3 || d > kMaxDim) throw std::invalid_argument("PolymerChain: bad dimension");
        if (n < 1) throw std::invalid_argument("PolymerChain: need n >= 1");
        const auto nsteps = static_cast<std::uint32_t>(2 * d);
        steps_.resize(static_cast<std::size_t>(n));
        for (auto& s : steps_) s = static_cast<std::uint8_t>(rng_.below(nsteps));
        pos_.assign(static_cast<std::size_t>(n) + 1, origin());
        replay(0);
        boundary_ = boundary_of_positions(d_, pos_);
        prop_steps_ = steps_;
        prop_pos_ = pos_;
    }

    void step() {
        const auto nsteps = static_cast<std::uint32_t>(2 * d_);
        prop_steps_ = steps_;
        std::size_t a;
        if (rng_.uniform() < 0.8) {
            std::size_t len = 1;
            while (rng_.uniform() < 1.0 - 1.0 / block_mean_ && len < steps_.size()) ++len;
            a = static_cast<std::size_t>(rng_.below(static_cast<std::uint32_t>(steps_.size())));
            const std::size_t b = std::min(a + len, steps_.size());
            for (std::size_t k = a; k < b; ++k) prop_steps_[k] = static_cast<std::uint8_t>(rng_.below(nsteps));
        } else {
            a = static_cast<std::size_t>(rng_.below(static_cast<std::uint32_t>(steps_.size())));
            prop_steps_[a] = static_cast<std::uint8_t>(rng_.below(nsteps));
        }
        prop_pos_ = pos_;
        for (std::size_t k = a; k < prop_steps_.size(); ++k)
            prop_pos_[k + 1] = apply_step(prop_pos_[k], prop_steps_[k]);
        const std::int64_t new_boundary = boundary_of_positions(d_, prop_pos_);
        const double delta_e = beta_ * static_cast<double>(new_boundary - boundary_) / scale();
        ++proposals_;
        if (delta_e <= 0 || rng_.uniform() < std::exp(-delta_e)) {
            steps_.swap(prop_steps_);
            pos_.swap(prop_pos_);
            boundary_ = new_boundary;
            ++accepts_;
        }
    }

    double scale() const { return std::pow(static_cast<double>(n_), 2.0 / d_); }
    std::int64_t boundary() const { return boundary_; }
    const std::vector<Point>& positions() const { return pos_; }
    const std::vector<std::uint8_t>& steps() const { return steps_; }
    std::int64_t proposals() const { return proposals_; }
    double acceptance_rate() const {
        return proposals_ > 0 ? static_cast<double>(accepts_) / static_cast<double>(proposals_) : 0;
    }

    PolymerObservables observe(double diag_radius = 0) const {
        PolymerObservables o;
        o.proposal = proposals_;
        o.boundary = boundary_;
        o.energy = beta_ * (static_cast<double>(boundary_) - mu_) / scale();
        PointSet range(d_, pos_.size());
        double cx[kMaxDim] = {};
        for (const Point& p : pos_) {
            range.insert(p);
            for (int i = 0; i < d_; ++i) cx[i] += p.c[i];
        }
        o.range = static_cast<std::int64_t>(range.size());
        for (int i = 0; i < d_; ++i) cx[i] /= static_cast<double>(pos_.size());
        double g2 = 0;
        for (const Point& p : pos_) {
            for (int i = 0; i < d_; ++i) {
                const double dx = p.c[i] - cx[i];
                g2 += dx * dx;
            }
        }
        o.gyration = std::sqrt(g2 / static_cast<double>(pos_.size()));
        if (diag_radius > 0) {
            Trajectory t;
            t.d = d_;
            t.points = pos_;
            o.max_ball = max_ball_occupation(OccupationField(t, n_), diag_radius);
        }
        return o;
    }

private:
    void replay(std::size_t from) {
        for (std::size_t k = from; k < steps_.size(); ++k) pos_[k + 1] = apply_step(pos_[k], steps_[k]);
    }

    int d_;
    std::int64_t n_;
    double beta_, mu_, block_mean_;
    Rng rng_;
    std::vector<std::uint8_t> steps_, prop_steps_;
    std::vector<Point> pos_, prop_pos_;
    std::int64_t boundary_ = 0;
    std::int64_t proposals_ = 0, accepts_ = 0;
};

struct PolymerRun {
    double beta = 0;
    std::int64_t n = 0;
    double mu = 0;
    std::vector<PolymerObservables> samples;
    double acceptance_rate = 0;

    MeanCI mean_boundary(double level = 0.95) const {
        std::vector<double> xs;
        for (const auto& s : samples) xs.push_back(static_cast<double>(s.boundary));
        return mean_ci(xs, level);
    }
    /// E_Q[-(|dR_n| - mu) / n^{2/d}], the thermodynamic-integration integrand.
    MeanCI mean_neg_centered(int d, double level = 0.95) const {
        const double scale = std::pow(static_cast<double>(n), 2.0 / d);
        std::vector<double> xs;
        for (const auto& s : samples) xs.push_back(-(static_cast<double>(s.boundary) - mu) / scale);
        return mean_ci(xs, level);
    }
};

/// Runs one chain: burn-in, then `samples` observations every `thin`
/// proposals.  diag_every > 0 computes the localization diagnostic on every
/// diag_every-th retained sample.
inline PolymerRun polymer_mcmc(RngStream stream, int d, std::int64_t n, double beta,
                               std::size_t samples, std::size_t thin, std::size_t burn_in,
                               double mu, double block_mean = 16.0, std::size_t diag_every = 0,
                               double diag_radius = 0) {
    PolymerChain chain(stream, d, n, beta, mu, block_mean);
    for (std::size_t k = 0; k < burn_in; ++k) chain.step();
    PolymerRun run;
    run.beta = beta;
    run.n = n;
    run.mu = mu;
    for (std::size_t s = 0; s < samples; ++s) {
        for (std::size_t k = 0; k < thin; ++k) chain.step();
        const bool diag = diag_every > 0 && s % diag_every == 0;
        run.samples.push_back(chain.observe(diag ? (diag_radius > 0 ? diag_radius : default_diag_radius(d, n)) : 0));
    }
    run.acceptance_rate = chain.acceptance_rate();
    return run;
}

struct BetaKnot {
    double beta = 0;
    MeanCI integrand;  // E_{Q^beta}[-(|dR_n| - mu)/n^{2/d}]
};

struct FreeEnergyCurve {
    std::int64_t n = 0;
    std::vector<BetaKnot> knots;
    std::vector<double> value;     // log Z_n(beta) / n^{1-2/d} at each knot
    std::vector<double> half_ci;   // propagated trapezoid CI half-widths
    double beta_depart = -1;       // first knot where value - CI > 0 (band upper edge)
    double beta_flat = -1;         // last knot where |value| <= CI (band lower edge)
    bool nondecreasing = true;     // within CI slack
};

/// Thermodynamic integration of the free-energy proxy:
///   log Z_n(beta) / n^{1-2/d} = n^{2/d - 1} integral_0^beta E_{Q^b}[...] db
/// by the trapezoid rule over the knot grid (which must start at beta = 0),
/// with CI propagation knot to knot.
inline FreeEnergyCurve free_energy_curve(const std::vector<BetaKnot>& knots, int d, std::int64_t n) {
    if (knots.empty() || knots.front().beta != 0)
        throw std::invalid_argument("free_energy_curve: grid must start at beta = 0");
    for (std::size_t i = 1; i < knots.size(); ++i)
        if (knots[i].beta <= knots[i - 1].beta)
            throw std::invalid_argument("free_energy_curve: betas must increase");
    FreeEnergyCurve curve;
    curve.n = n;
    curve.knots = knots;
    // d/dbeta log Z = E_Q[-(B - mu)/n^{2/d}] = integrand, so log Z(beta) is the
    // plain integral of the integrand; the curve then divides by n^{1-2/d}.
    const double scale = std::pow(static_cast<double>(n), 2.0 / d - 1.0);
    double acc = 0, var = 0;
    curve.value.push_back(0);
    curve.half_ci.push_back(0);
    for (std::size_t i = 1; i < knots.size(); ++i) {
        const double db = knots[i].beta - knots[i - 1].beta;
        acc += 0.5 * db * (knots[i - 1].integrand.mean + knots[i].integrand.mean);
        const double h0 = knots[i - 1].integrand.half_width;
        const double h1 = knots[i].integrand.half_width;
        var += 0.25 * db * db * (h0 * h0 + h1 * h1);
        curve.value.push_back(acc * scale);
        curve.half_ci.push_back(std::sqrt(var) * scale);
    }
    for (std::size_t i = 0; i < knots.size(); ++i) {
        if (curve.beta_depart < 0 && curve.value[i] - curve.half_ci[i] > 0)
            curve.beta_depart = knots[i].beta;
        if (std::abs(curve.value[i]) <= curve.half_ci[i] + 1e-12) curve.beta_flat = knots[i].beta;
    }
    for (std::size_t i = 1; i < knots.size(); ++i)
        if (curve.value[i] < curve.value[i - 1] - (curve.half_ci[i] + curve.half_ci[i - 1]))
            curve.nondecreasing = false;
    return curve;
}

}  // namespace rangelab

#endif
