#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "rangelab/confinement.hpp"
#include "rangelab/deviation.hpp"
#include "rangelab/polymer.hpp"
#include "rangelab/multi_ball.hpp"

using namespace rangelab;

TEST_CASE("excursion times alternate and bound the inner occupation") {
    for (std::uint64_t rep = 0; rep < 20; ++rep) {
        Trajectory traj = generate_walk(RngStream{60, rep}, 3, 1200);
        const Point x = traj.at(600);
        const ExcursionDecomposition dec = excursions(traj, x, 2.0, 5.0, 1200);
        REQUIRE(dec.N >= 0);  // x itself is visited
        // strict alternation sigma_0 < tau_0 < sigma_1 < ...
        for (std::size_t j = 0; j < dec.tau.size(); ++j) {
            CHECK(dec.sigma[j] < dec.tau[j]);
            if (j + 1 < dec.sigma.size()) CHECK(dec.tau[j] < dec.sigma[j + 1]);
        }
        const OccupationField occ(traj, 1200);
        CHECK(occ.in_ball(x, 2.0) <= dec.duration_bound());
    }
}

TEST_CASE("never-entered ball yields N = -1") {
    Trajectory traj = generate_walk(RngStream{61, 0}, 3, 100);
    Point far;
    far.c[0] = 1000;
    const ExcursionDecomposition dec = excursions(traj, far, 2.0, 5.0, 100);
    CHECK(dec.N == -1);
    CHECK(dec.duration_bound() == 0);
}

TEST_CASE("confinement probability is antitone in n and monotone in rho") {
    const auto p1 = estimate_confinement_prob(RngStream{62, 0}, 3, 500, 15, 4000);
    const auto p2 = estimate_confinement_prob(RngStream{62, 10000}, 3, 1500, 15, 4000);
    const auto p3 = estimate_confinement_prob(RngStream{62, 20000}, 3, 500, 25, 4000);
    CHECK(p1.prob.mean > p2.prob.mean);
    CHECK(p3.prob.mean > p1.prob.mean);
    CHECK(p1.survived + p2.survived + p3.survived > 0);
}

TEST_CASE("confined samples respect the constraint for both methods") {
    const std::int64_t n = 300;
    const double rho = 12.0;
    Trajectory rej = sample_confined(RngStream{63, 0}, 3, n, rho, ConfinedMethod::kRejection);
    CHECK(rej.length() == n);
    CHECK(trajectory_confined(rej, rho));
    Trajectory mcmc = sample_confined(RngStream{63, 1}, 3, n, 6.0, ConfinedMethod::kPathMcmc);
    CHECK(mcmc.length() == n);
    CHECK(trajectory_confined(mcmc, 6.0));
    CHECK(mcmc.at(0) == origin());
    // consecutive points are lattice neighbors
    for (std::int64_t k = 1; k <= n; ++k) CHECK(norm1(mcmc.at(k) - mcmc.at(k - 1)) == 1);
}

TEST_CASE("rejection sampling refuses infeasible radii") {
    CHECK_THROWS_AS(sample_confined(RngStream{64, 0}, 3, 10000, 5.0, ConfinedMethod::kRejection),
                    std::invalid_argument);
}

TEST_CASE("confined mean square displacement is suppressed") {
    const std::int64_t n = 400;
    const double rho = 8.0;
    double conf_r2 = 0, free_r2 = 0;
    const int reps = 25;
    for (int rep = 0; rep < reps; ++rep) {
        Trajectory c = sample_confined(RngStream{65, static_cast<std::uint64_t>(rep)}, 3, n, rho,
                                       ConfinedMethod::kPathMcmc);
        Trajectory f = generate_walk(RngStream{66, static_cast<std::uint64_t>(rep)}, 3, n);
        conf_r2 += static_cast<double>(norm2_sq(c.at(n)));
        free_r2 += static_cast<double>(norm2_sq(f.at(n)));
    }
    CHECK(conf_r2 / reps <= rho * rho);
    CHECK(conf_r2 < free_r2);
}

TEST_CASE("excursion calibration: deterministic bound holds on every sample") {
    CenterFamily fam;
    fam.radius = 2.0;
    fam.centers = {origin(), Point{{15, 0, 0}}};
    const LemExcReport rep = check_lem_exc(RngStream{67, 0}, 3, fam, 2.0, {1, 5, 15}, 800, 300);
    CHECK(rep.deterministic_ok);
    REQUIRE(rep.rows.size() == 3);
    // joint-event frequency is antitone in t
    CHECK(rep.rows[0].freq >= rep.rows[1].freq);
    CHECK(rep.rows[1].freq >= rep.rows[2].freq);
    CHECK(rep.c_hat > 0.0);
}

TEST_CASE("multi-ball occupation bound holds with fitted constants") {
    CenterFamily fam;
    fam.radius = 2.0;
    fam.centers = {origin()};
    const MultiBallReport rep =
        check_multi_ball_bound(RngStream{68, 0}, 3, fam, 2.0, {1, 3, 6, 10, 16, 24}, 600, 400);
    CHECK(rep.all_hold);
    CHECK(rep.kappa_hat >= 0.0);
    CHECK(rep.C_hat > 0.0);
    CHECK(rep.index.lower > 0.0);
    // occupancy tail is antitone in t
    for (std::size_t i = 1; i < rep.rows.size(); ++i)
        CHECK(rep.rows[i].lhs.mean <= rep.rows[i - 1].lhs.mean);
}

TEST_CASE("occupation bound rejects inadmissible families") {
    CenterFamily fam;
    fam.radius = 2.0;
    fam.centers = {origin(), Point{{3, 0, 0}}};  // separation 3 < 4r = 8
    CHECK_THROWS_AS(check_multi_ball_bound(RngStream{69, 0}, 3, fam, 2.0, {1}, 100, 50),
                    std::invalid_argument);
}

TEST_CASE("covering experiment partition identity") {
    PointSet lambda(3);
    for (const Point& p : euclidean_ball(origin(), 3, 6.0)) lambda.insert(p);
    const CoveringReport rep = covering_experiment(RngStream{70, 0}, 3, 400, 0.15, lambda, 12);
    CHECK(rep.partition_ok);
    CHECK(rep.mean_cover >= 0.0);
    CHECK(rep.mean_cover <= 1.0);
    CHECK(rep.freq_confined >= rep.freq_free);  // confinement pushes the walk onto Lambda
}

TEST_CASE("polymer chain at beta = 0 accepts everything") {
    PolymerChain chain(RngStream{71, 0}, 3, 60, 0.0, 0.0, 8.0);
    for (int k = 0; k < 500; ++k) chain.step();
    CHECK(chain.acceptance_rate() == 1.0);
    CHECK(chain.positions().size() == 61);
    CHECK(chain.positions().front() == origin());
}

TEST_CASE("polymer energy penalty lowers the mean boundary") {
    const std::int64_t n = 250;
    const PolymerRun free_run = polymer_mcmc(RngStream{72, 0}, 3, n, 0.0, 250, 10, 1000, 0.0);
    const PolymerRun pinned = polymer_mcmc(RngStream{72, 1}, 3, n, 6.0, 250, 10, 1000, 0.0);
    CHECK(pinned.mean_boundary().mean < free_run.mean_boundary().mean);
    CHECK(pinned.acceptance_rate < 1.0);
}

TEST_CASE("polymer observables are internally consistent") {
    const PolymerRun run = polymer_mcmc(RngStream{73, 0}, 3, 120, 1.0, 50, 5, 200, 40.0, 8.0, 10);
    for (const auto& s : run.samples) {
        CHECK(s.range >= 1);
        CHECK(s.range <= 121);
        CHECK(s.boundary <= s.range);
        CHECK(s.gyration >= 0.0);
    }
    // diagnostic computed on every 10th sample only
    std::size_t with_diag = 0;
    for (const auto& s : run.samples)
        if (s.max_ball >= 0) ++with_diag;
    CHECK(with_diag == 5);
}

TEST_CASE("free energy curve integrates synthetic knots correctly") {
    // integrand identically 1: log Z(beta) = beta, curve = beta * n^{2/d - 1}
    std::vector<BetaKnot> knots;
    for (double b : {0.0, 1.0, 2.0}) {
        BetaKnot k;
        k.beta = b;
        k.integrand.mean = 1.0;
        k.integrand.half_width = 0.0;
        knots.push_back(k);
    }
    const FreeEnergyCurve curve = free_energy_curve(knots, 3, 1000);
    const double scale = std::pow(1000.0, 2.0 / 3.0 - 1.0);
    CHECK(curve.value[0] == 0.0);
    CHECK(curve.value[1] == Catch::Approx(1.0 * scale));
    CHECK(curve.value[2] == Catch::Approx(2.0 * scale));
    CHECK(curve.nondecreasing);
    CHECK(curve.beta_depart == 1.0);
}

TEST_CASE("free energy curve rejects bad grids") {
    std::vector<BetaKnot> no_zero(1);
    no_zero[0].beta = 0.5;
    CHECK_THROWS_AS(free_energy_curve(no_zero, 3, 100), std::invalid_argument);
    std::vector<BetaKnot> unsorted(2);
    unsorted[0].beta = 0.0;
    unsorted[1].beta = 0.0;
    CHECK_THROWS_AS(free_energy_curve(unsorted, 3, 100), std::invalid_argument);
}

TEST_CASE("deviation experiment populates predictors and drops empty cells") {
    const DeviationReport rep =
        deviation_scan_experiment(RngStream{74, 0}, 3, {400, 1200}, {0.2, 0.4}, 4000, 1.3);
    REQUIRE(rep.rows.size() == 4);
    for (const auto& row : rep.rows) {
        CHECK(row.rho == Catch::Approx(1.3 * std::cbrt(static_cast<double>(row.n) / row.eps)));
        CHECK(row.x == Catch::Approx(std::pow(row.eps, 2.0 / 3.0) * std::cbrt(static_cast<double>(row.n))));
        if (row.usable) CHECK(row.cost > 0.0);
    }
    CHECK(rep.fit.count >= 2);
    CHECK(rep.kappa_hat > 0.0);  // cost grows with the predictor
}

TEST_CASE("boundary tail probability is antitone in the threshold") {
    const auto lo = boundary_tail_prob(RngStream{75, 0}, 3, 400, 200, 2000);
    const auto hi = boundary_tail_prob(RngStream{75, 0}, 3, 400, 280, 2000);
    CHECK(lo.mean <= hi.mean);
}
