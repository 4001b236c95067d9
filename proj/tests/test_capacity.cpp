#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "rangelab/capacity.hpp"
#include "rangelab/range_geometry.hpp"

using namespace rangelab;

namespace {

PointSet ball(double r) { return PointSet(3, euclidean_ball(origin(), 3, r)); }

PointSet singleton() {
    PointSet s(3);
    s.insert(origin());
    return s;
}

}  // namespace

TEST_CASE("capacity of a point is 1 / G(0)") {
    const CapacityBracket b = capacity_dirichlet(singleton(), 48);
    // 1 / 1.5163860591 = 0.659462...
    CHECK(b.lower <= 0.6595);
    CHECK(b.upper >= 0.6594);
    CHECK(b.width() < 0.03);
}

TEST_CASE("brackets are well-formed and bounded by the set size") {
    for (double r : {1.0, 2.0, 3.0}) {
        const PointSet s = ball(r);
        const CapacityBracket b = capacity_dirichlet(s, std::max<std::int32_t>(16, static_cast<std::int32_t>(8 * r)));
        CHECK(b.lower >= 0.0);
        CHECK(b.lower <= b.upper);
        CHECK(b.upper <= static_cast<double>(s.size()));
    }
}

TEST_CASE("capacity is monotone under set inclusion") {
    // upper(A) can only exceed upper(B) by the certificate slack, so compare
    // the like-for-like Dirichlet values at the same truncation
    const CapacityBracket small = capacity_dirichlet(ball(2.0), 40);
    const CapacityBracket big = capacity_dirichlet(ball(4.0), 40);
    CHECK(small.upper <= big.upper * 1.001);
    CHECK(small.lower <= big.upper);
}

TEST_CASE("capacity is subadditive on far-apart unions") {
    PointSet a(3), b(3), u(3);
    for (const Point& p : euclidean_ball(origin(), 3, 2.0)) {
        a.insert(p);
        u.insert(p);
    }
    for (const Point& p : euclidean_ball(Point{{14, 0, 0}}, 3, 2.0)) {
        b.insert(p);
        u.insert(p);
    }
    const CapacityBracket ca = capacity_dirichlet(a, 64);
    const CapacityBracket cb = capacity_dirichlet(b, 64);
    const CapacityBracket cu = capacity_dirichlet(u, 64);
    CHECK(cu.lower <= ca.upper + cb.upper);
    // and strictly below the sum: the two components screen each other
    CHECK(cu.upper < ca.upper + cb.upper);
}

TEST_CASE("monte carlo and dirichlet brackets overlap") {
    Rng rng(RngStream{21, 0});
    for (std::uint64_t rep = 0; rep < 4; ++rep) {
        const PointSet s = random_walk_set(rng, 3, 25, 0);
        const auto R = std::max<std::int32_t>(16, static_cast<std::int32_t>(4 * (set_radius(s) + 1)));
        const CapacityBracket dir = capacity_dirichlet(s, R);
        const CapacityBracket mc = capacity_mc(s, capacity_mc_horizon(s), 500, RngStream{21, 100 + rep * 1000});
        CHECK(dir.overlaps(mc));
    }
}

TEST_CASE("dirichlet refuses truncation radii too close to the set") {
    CHECK_THROWS_AS(capacity_dirichlet(ball(8.0), 16), std::invalid_argument);
}

TEST_CASE("iso index normalizes by volume^(1 - 2/d)") {
    const PointSet s = ball(3.0);
    CapacityBracket b = capacity_dirichlet(s, 24);
    const IndexReport idx = iso_index(s, b);
    const double denom = std::pow(static_cast<double>(s.size()), 1.0 / 3.0);
    CHECK(idx.lower == Catch::Approx(b.lower / denom));
    CHECK(idx.upper == Catch::Approx(b.upper / denom));
    CHECK(idx.volume == s.size());
}

TEST_CASE("set radius and diameter on a segment") {
    PointSet seg(3);
    for (std::int32_t x = -3; x <= 5; ++x) seg.insert(Point{{x, 0, 0}});
    CHECK(set_radius(seg) == Catch::Approx(5.0));
    CHECK(set_diameter(seg) == Catch::Approx(8.0));
}
