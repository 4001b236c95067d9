#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>
#include <vector>

#include "rangelab/lattice.hpp"
#include "rangelab/rng.hpp"
#include "rangelab/trajectory.hpp"

using namespace rangelab;

TEST_CASE("point arithmetic") {
    Point a{{1, -2, 3}};
    Point b{{4, 0, -1}};
    CHECK((a + b) == Point{{5, -2, 2}});
    CHECK((a - b) == Point{{-3, -2, 4}});
    CHECK(-a == Point{{-1, 2, -3}});
    CHECK(a.shifted(1, 5) == Point{{1, 3, 3}});
    CHECK(norm2_sq(a) == 14);
    CHECK(norm1(a) == 6);
    CHECK(dist_sq(a, b) == 9 + 4 + 16);
}

TEST_CASE("unit steps and neighbors") {
    for (int d = 3; d <= kMaxDim; ++d) {
        const auto steps = unit_steps(d);
        REQUIRE(steps.size() == 2 * static_cast<std::size_t>(d));
        for (const Point& s : steps) CHECK(norm1(s) == 1);
        // apply_step order matches unit_steps order
        for (std::uint32_t i = 0; i < steps.size(); ++i)
            CHECK(apply_step(origin(), i) == steps[i]);
    }
}

TEST_CASE("euclidean balls have the right cardinalities") {
    // d = 3: r = 1 -> 7 (center + 6 neighbors), r = sqrt(2) -> 19, r = sqrt(3) -> 27
    CHECK(euclidean_ball_offsets(3, 1.0).size() == 7);
    CHECK(euclidean_ball_offsets(3, std::sqrt(2.0)).size() == 19);
    CHECK(euclidean_ball_offsets(3, std::sqrt(3.0)).size() == 27);
    CHECK(euclidean_ball_offsets(3, 2.0).size() == 33);
    for (int d = 3; d <= kMaxDim; ++d)
        CHECK(euclidean_ball_offsets(d, 1.0).size() == 2 * static_cast<std::size_t>(d) + 1);
    // translation: same size, shifted membership
    const Point c{{3, -1, 2}};
    const auto ball = euclidean_ball(c, 3, 2.0);
    CHECK(ball.size() == 33);
    for (const Point& p : ball) CHECK(dist_sq(p, c) <= 4);
}

TEST_CASE("cube partition") {
    const std::int32_t r = 3;
    Rng rng(RngStream{7, 0});
    for (int rep = 0; rep < 2000; ++rep) {
        Point z;
        for (int i = 0; i < 3; ++i) z.c[i] = static_cast<std::int32_t>(rng.below(201)) - 100;
        const Point q = cube_of(z, r, 3);
        CHECK(in_cube(z, q, r, 3));
        for (int i = 0; i < 3; ++i) CHECK(q.c[i] % (2 * r) == 0);
    }
    // half-open: x + r belongs, x - r does not
    CHECK(in_cube(Point{{r, 0, 0}}, origin(), r, 3));
    CHECK(!in_cube(Point{{-r, 0, 0}}, origin(), r, 3));
}

TEST_CASE("hash scatters collinear points") {
    std::set<std::uint64_t> seen;
    for (std::int32_t x = -500; x <= 500; ++x) {
        Point p;
        p.c[0] = x;
        seen.insert(hash_point(p));
    }
    CHECK(seen.size() == 1001);
}

TEST_CASE("walk steps are uniform (chi-square)") {
    const int d = 4;
    const std::int64_t n = 120000;
    Trajectory traj = generate_walk(RngStream{99, 0}, d, n);
    std::vector<std::int64_t> counts(2 * static_cast<std::size_t>(d), 0);
    for (std::int64_t k = 1; k <= n; ++k) {
        const Point delta = traj.at(k) - traj.at(k - 1);
        REQUIRE(norm1(delta) == 1);
        for (int i = 0; i < d; ++i) {
            if (delta.c[i] == +1) ++counts[static_cast<std::size_t>(2 * i)];
            if (delta.c[i] == -1) ++counts[static_cast<std::size_t>(2 * i) + 1];
        }
    }
    const double expected = static_cast<double>(n) / (2.0 * d);
    double chi2 = 0;
    for (auto c : counts) {
        const double dev = static_cast<double>(c) - expected;
        chi2 += dev * dev / expected;
    }
    // 7 dof, 99.9th percentile ~ 24.3
    CHECK(chi2 < 24.3);
}

TEST_CASE("walk is reproducible per stream and differs across streams") {
    Trajectory a = generate_walk(RngStream{5, 11}, 3, 500);
    Trajectory b = generate_walk(RngStream{5, 11}, 3, 500);
    Trajectory c = generate_walk(RngStream{5, 12}, 3, 500);
    CHECK(a.points == b.points);
    CHECK(a.points != c.points);
}

TEST_CASE("rng below is unbiased at the boundary") {
    Rng rng(RngStream{123, 4});
    std::vector<std::int64_t> counts(6, 0);
    for (int i = 0; i < 60000; ++i) ++counts[rng.below(6)];
    for (auto c : counts) {
        CHECK(c > 9300);
        CHECK(c < 10700);
    }
}
