#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "rangelab/range_geometry.hpp"
#include "rangelab/trajectory.hpp"

using namespace rangelab;

TEST_CASE("range and occupation bookkeeping") {
    Trajectory traj = generate_walk(RngStream{1, 0}, 3, 3000);
    const PointSet range = range_of(traj, 0, 3000);
    const OccupationField occ(traj, 3000);
    // total occupation = n + 1 time indices
    std::int64_t total = 0;
    occ.for_each([&](const Point&, const std::int64_t& c) { total += c; });
    CHECK(total == 3001);
    CHECK(occ.in_set(range) == 3001);
    // every visited point has positive count and vice versa
    range.for_each([&](const Point& p) { CHECK(occ.count(p) > 0); });
    occ.for_each([&](const Point& p, const std::int64_t&) { CHECK(range.contains(p)); });
}

TEST_CASE("tracker matches the direct boundary on random walks") {
    for (int d : {3, 4, 6}) {
        for (std::uint64_t rep = 0; rep < 4; ++rep) {
            const std::int64_t n = 2000;
            Trajectory traj = generate_walk(RngStream{50 + rep, static_cast<std::uint64_t>(d)}, d, n);
            BoundaryTracker tracker(d);
            for (std::int64_t k = 1; k <= n; ++k) tracker.step(traj.at(k));
            const PointSet range = range_of(traj, 0, n);
            const PointSet direct = inner_boundary(range);
            CHECK(tracker.range_size() == static_cast<std::int64_t>(range.size()));
            CHECK(tracker.boundary_size() == static_cast<std::int64_t>(direct.size()));
            CHECK(tracker.boundary_set().size() == direct.size());
            direct.for_each([&](const Point& p) { CHECK(tracker.in_boundary(p)); });
        }
    }
}

TEST_CASE("dilation sizes and containment") {
    Rng rng(RngStream{3, 0});
    for (int rep = 0; rep < 50; ++rep) {
        const int d = 3 + static_cast<int>(rng.below(4));
        const PointSet s = random_walk_set(rng, d, 40, 3);
        const PointSet dil = dilate(s);
        const PointSet dil2 = dilate_twice(s);
        CHECK(dil.size() >= s.size());
        CHECK(dil2.size() >= dil.size());
        CHECK(dil.size() <= s.size() * (2 * static_cast<std::size_t>(d) + 1));
        s.for_each([&](const Point& p) {
            CHECK(dil.contains(p));
            for (int i = 0; i < d; ++i) CHECK(dil.contains(p.shifted(i, 1)));
        });
    }
}

TEST_CASE("inclusion-exclusion is exact") {
    Rng rng(RngStream{4, 0});
    for (int rep = 0; rep < 200; ++rep) {
        const int d = 3 + static_cast<int>(rng.below(4));
        const PointSet a = random_walk_set(rng, d, 30, 3);
        const PointSet b = random_walk_set(rng, d, 30, 3);
        CHECK(check_inclusion_exclusion(a, b).holds);
    }
}

TEST_CASE("boundary-of-union bounds hold with exact intersection terms") {
    Rng rng(RngStream{5, 0});
    for (int rep = 0; rep < 200; ++rep) {
        const int d = 3 + static_cast<int>(rng.below(4));
        const PointSet a = random_walk_set(rng, d, 50, 4);
        const PointSet b = random_walk_set(rng, d, 50, 4);
        const auto r = check_boundary_bounds(a, b);
        CHECK(r.lower_holds);
        CHECK(r.upper_holds);
    }
}

TEST_CASE("superadditivity with overlap correction") {
    Rng rng(RngStream{6, 0});
    for (int rep = 0; rep < 100; ++rep) {
        const int d = 3 + static_cast<int>(rng.below(4));
        std::vector<PointSet> sets;
        for (int i = 0; i < 4; ++i) sets.push_back(random_walk_set(rng, d, 25, 4));
        CHECK(check_superadditivity(sets).holds);
    }
}

TEST_CASE("disjoint far-apart sets have zero correction terms") {
    PointSet a(3), b(3);
    for (std::int32_t x = 0; x < 5; ++x) {
        a.insert(Point{{x, 0, 0}});
        b.insert(Point{{x + 100, 0, 0}});
    }
    const auto bb = check_boundary_bounds(a, b);
    CHECK(bb.dil_overlap == 0);
    CHECK(bb.boundary_union == bb.boundary1 + bb.boundary2);
    const auto sup = check_superadditivity({a, b});
    CHECK(sup.cross == 0);
    CHECK(sup.lhs == sup.sum_boundaries);
}

TEST_CASE("mean boundary per step decreases with n and fits a plateau") {
    const auto table = estimate_mean_boundary(3, {500, 2000, 8000}, 60, RngStream{77, 0});
    REQUIRE(table.rows.size() == 3);
    CHECK(table.rows[0].per_step.mean > table.rows[1].per_step.mean);
    CHECK(table.rows[1].per_step.mean > table.rows[2].per_step.mean);
    CHECK(table.nu_hat > 0.0);
    CHECK(table.nu_hat < 1.0);
    CHECK(table.correction_amp > 0.0);  // finite-size correction is positive in d = 3
}

TEST_CASE("psi_d matches the correction scale") {
    CHECK(psi_d(3, 100.0) == Catch::Approx(10.0));
    CHECK(psi_d(4, 100.0) == Catch::Approx(std::log(100.0)));
    CHECK(psi_d(5, 100.0) == 1.0);
}

TEST_CASE("estimate_mean_boundary is reproducible for a fixed stream") {
    const auto a = estimate_mean_boundary(3, {400, 900}, 20, RngStream{8, 3});
    const auto b = estimate_mean_boundary(3, {400, 900}, 20, RngStream{8, 3});
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i)
        CHECK(a.rows[i].per_step.mean == b.rows[i].per_step.mean);
    CHECK(a.nu_hat == b.nu_hat);
}
