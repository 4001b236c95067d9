#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <vector>

#include "rangelab/scan.hpp"
#include "rangelab/slicing.hpp"

using namespace rangelab;

TEST_CASE("rolling scan equals the naive recount") {
    Rng rng(RngStream{30, 0});
    for (std::uint64_t rep = 0; rep < 12; ++rep) {
        const int d = 3 + static_cast<int>(rng.below(4));
        const std::int64_t n = 1500;
        Trajectory traj = generate_walk(RngStream{30, 10 + rep}, d, n);
        Point v;
        for (int i = 0; i < d; ++i) v.c[i] = static_cast<std::int32_t>(rng.below(5)) - 2;
        const double r = 1.0 + rng.below(2);
        const auto t = static_cast<std::int64_t>(rng.below(5));
        const ScanResult rolled = rolling_scan(traj, v, r, t, n, 128);
        const ScanResult naive = naive_scan(traj, v, r, t, n);
        CHECK(rolled.times == naive.times);
    }
}

TEST_CASE("exceedance count is monotone in n and antitone in t") {
    Trajectory traj = generate_walk(RngStream{31, 0}, 3, 2000);
    const Point v = unit(0);
    const ScanResult base = rolling_scan(traj, v, 2.0, 2, 2000);
    const ScanResult shorter = rolling_scan(traj, v, 2.0, 2, 1000);
    const ScanResult stricter = rolling_scan(traj, v, 2.0, 5, 2000);
    CHECK(shorter.count() <= base.count());
    CHECK(stricter.count() <= base.count());
    // shorter horizon: exactly the prefix of the times list
    CHECK(std::equal(shorter.times.begin(), shorter.times.end(), base.times.begin()));
    // stricter threshold: a subset of the times
    for (std::int64_t k : stricter.times)
        CHECK(std::binary_search(base.times.begin(), base.times.end(), k));
}

TEST_CASE("greedy families are always admissible and meet their occupancy promises") {
    Rng rng(RngStream{32, 0});
    for (std::uint64_t rep = 0; rep < 25; ++rep) {
        const std::int64_t n = 600;
        Trajectory traj = generate_walk(RngStream{32, 5 + rep}, 3, n);
        const double r = 1.0 + rng.below(2);
        const auto t = static_cast<std::int64_t>(rng.below(4));
        const CenterFamily fam = greedy_centers(traj, origin(), r, t, 0, n);
        CHECK(fam.well_separated());
        const OccupationField occ(traj, n);
        for (const Point& x : fam.centers) CHECK(occ.in_ball(x, r) > t);
    }
}

TEST_CASE("exceedance set is covered by the greedy family within 4r") {
    const std::int64_t n = 800;
    Trajectory traj = generate_walk(RngStream{33, 0}, 3, n);
    const double r = 1.0;
    const std::int64_t t = 2;
    const Point v = unit(1);
    const CenterFamily fam = greedy_centers(traj, v, r, t, 0, n);
    const std::vector<std::int64_t> W = detail::window_counts(traj, v, r, n);
    const double rr = 16.0 * r * r + 1e-9;
    for (std::int64_t k = 0; k <= n; ++k) {
        if (W[static_cast<std::size_t>(k)] <= t) continue;
        bool near = false;
        for (const Point& x : fam.centers)
            if (static_cast<double>(dist_sq(traj.at(k), x)) <= rr) near = true;
        CHECK(near);
    }
}

TEST_CASE("witness searches respect monotonicity in the family size") {
    Trajectory traj = generate_walk(RngStream{34, 0}, 3, 1500);
    const double r = 1.0;
    // G-event: if m centers exist, so do m - 1
    const EventWitness g3 = detect_G_event(traj, r, 2, 3, 1500);
    if (g3.found) {
        const EventWitness g2 = detect_G_event(traj, r, 2, 2, 1500);
        CHECK(g2.found);
        CHECK(g2.family.size() == 2);
        CHECK(g2.family.well_separated());
    }
    // H-event: padding with far centers preserves the occupancy
    const EventWitness h2 = detect_H_event(traj, r, 50, 2, 1500);
    const EventWitness h5 = detect_H_event(traj, r, 50, 5, 1500);
    if (h2.found) {
        CHECK(h5.found);
        CHECK(h5.occupancy >= h2.occupancy);
    }
}

TEST_CASE("folding functional matches the brute-force oracle at zero cutoff") {
    const RestrictedGreenTable table(3, 16, 12);
    for (std::uint64_t rep = 0; rep < 6; ++rep) {
        Trajectory traj = generate_walk(RngStream{35, rep}, 3, 150);
        const XiValue inc = xi_fold(traj, 150, 16, table, 0.0);
        const double naive = xi_fold_naive(traj, 150, 16, table);
        CHECK(inc.value == Catch::Approx(naive).epsilon(1e-10));
        CHECK(inc.error_bound >= 0.0);
    }
}

TEST_CASE("cutoff error stays inside its certificate") {
    const RestrictedGreenTable table(3, 32, 14);
    Trajectory traj = generate_walk(RngStream{36, 0}, 3, 400);
    const XiValue exact = xi_fold(traj, 400, 32, table, 0.0);
    const XiValue trimmed = xi_fold(traj, 400, 32, table, 1e-6);
    CHECK(std::abs(trimmed.value - exact.value) <= trimmed.error_bound + 1e-12);
}

TEST_CASE("folding functional is nondecreasing in the horizon") {
    const RestrictedGreenTable table(3, 16, 12);
    Trajectory traj = generate_walk(RngStream{37, 0}, 3, 500);
    double prev = 0;
    for (std::int64_t n : {100, 200, 300, 500}) {
        const XiValue v = xi_fold(traj, n, 16, table, 0.0);
        CHECK(v.value >= prev - 1e-12);
        prev = v.value;
    }
}

TEST_CASE("slicing inequality holds across offsets, periods, and dimensions") {
    Rng rng(RngStream{38, 0});
    for (std::uint64_t rep = 0; rep < 40; ++rep) {
        const int d = 3 + static_cast<int>(rng.below(4));
        const std::int64_t n = 300;
        Trajectory traj = generate_walk(RngStream{38, 10 + rep}, d, n);
        const auto T = static_cast<std::int64_t>(10 + rng.below(140));
        const std::int64_t i_max = std::min(T - 2, n - T);
        const auto i = static_cast<std::int64_t>(rng.below(static_cast<std::uint32_t>(i_max + 2))) - 1;
        const SlicingTerms s = slicing_terms(traj, i, T, n);
        CHECK(s.holds);
        CHECK(s.sum_U() >= 0);
        CHECK(s.remainder >= 0);
        // cross terms accumulate monotonically
        for (std::size_t j = 1; j < s.X.size(); ++j) CHECK(s.X[j] >= s.X[j - 1]);
    }
}

TEST_CASE("slicing with T = n reduces to a single block plus a one-point tail") {
    Trajectory traj = generate_walk(RngStream{39, 0}, 3, 120);
    const SlicingTerms s = slicing_terms(traj, -1, 120, 120);
    REQUIRE(s.U.size() == 1);
    CHECK(s.X.back() == 0);
    // the block covers S_0..S_119; only the dilated endpoint S_120 remains
    CHECK(s.remainder <= 2 * 7);
    CHECK(s.holds);
}

TEST_CASE("slicing argument validation") {
    Trajectory traj = generate_walk(RngStream{40, 0}, 3, 100);
    CHECK_THROWS_AS(slicing_terms(traj, -2, 10, 100), std::invalid_argument);
    CHECK_THROWS_AS(slicing_terms(traj, 9, 10, 100), std::invalid_argument);
    CHECK_THROWS_AS(slicing_terms(traj, 0, 0, 100), std::invalid_argument);
    CHECK_THROWS_AS(slicing_terms(traj, 0, 101, 100), std::invalid_argument);
}
