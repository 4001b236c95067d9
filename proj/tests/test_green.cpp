#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <vector>

#include "rangelab/green.hpp"
#include "rangelab/range_geometry.hpp"

using namespace rangelab;

namespace {

/// Visit counts over all (2d)^T step sequences; G_T(z) = visits(z) / (2d)^T.
void enumerate(int d, int depth, int T, Point p, std::vector<Point>& path,
               FlatTable<std::int64_t>& visits) {
    if (depth == T) {
        for (const Point& q : path) ++visits[q];
        return;
    }
    for (std::uint32_t s = 0; s < static_cast<std::uint32_t>(2 * d); ++s) {
        path.push_back(apply_step(p, s));
        enumerate(d, depth + 1, T, path.back(), path, visits);
        path.pop_back();
    }
}

/// G(0) in d = 3 via Watson's Bessel-moment integral,
///   G(0) = int_0^inf [e^{-s/3} I_0(s/3)]^3 ds = 1.5163860591...
/// evaluated by Simpson on a transformed grid with std::cyl_bessel_i.
double green_zero_bessel() {
    const auto f = [](double s) {
        const double u = s / 3.0;
        // e^{-u} I_0(u), computed stably for large u via the scaled series
        const double val = u < 600.0 ? std::exp(-u) * std::cyl_bessel_i(0.0, u)
                                     : 1.0 / std::sqrt(2.0 * M_PI * u) * (1.0 + 1.0 / (8.0 * u));
        return val * val * val;
    };
    // substitute s = t^2 so the s^{-3/2} decay becomes t^{-2}; Simpson on t,
    // analytic tail beyond s = b
    const double b = 4e5;
    const auto g = [&](double t) { return f(t * t) * 2.0 * t; };
    const double tb = std::sqrt(b);
    const int steps = 200000;  // Simpson pairs
    const double h = tb / (2.0 * steps);
    double sum = g(0) + g(tb);
    for (int i = 1; i < 2 * steps; ++i) sum += g(h * i) * (i % 2 ? 4.0 : 2.0);
    const double head = sum * h / 3.0;
    const double tail = std::pow(3.0 / (2.0 * M_PI), 1.5) * (2.0 / std::sqrt(b) + 0.75 / std::pow(b, 1.5));
    return head + tail;
}

}  // namespace

TEST_CASE("restricted table equals exhaustive path enumeration") {
    for (int T : {2, 5}) {
        FlatTable<std::int64_t> visits;
        std::vector<Point> path{origin()};
        enumerate(3, 0, T, origin(), path, visits);
        const double denom = std::pow(6.0, T);
        RestrictedGreenTable table(3, T, T + 1);
        CHECK(table.escape_total() < 1e-13);  // exactly zero up to summation rounding
        visits.for_each([&](const Point& z, const std::int64_t& count) {
            CHECK(table.value(z) == Catch::Approx(static_cast<double>(count) / denom).margin(1e-13));
        });
    }
}

TEST_CASE("mass identity: table sum plus escape occupation equals T + 1") {
    for (std::int64_t T : {16, 128, 1024}) {
        RestrictedGreenTable table(3, T, 12);
        CHECK(table.mass_identity_defect() < 1e-9);
        CHECK(table.escape_total() >= 0.0);
        CHECK(table.escape_occupation() >= table.escape_total());
    }
}

TEST_CASE("table values are monotone in T and bounded by the full Green function") {
    RestrictedGreenTable small(3, 256, 14);
    RestrictedGreenTable big(3, 1024, 14);
    Point z;
    for (std::int32_t x = 0; x <= 10; ++x) {
        z.c[0] = x;
        CHECK(small.value(z) <= big.value(z) + 1e-12);
        CHECK(big.value(z) <= green_upper_bound(3, z) + 1e-12);
    }
}

TEST_CASE("full Green value at the origin matches the Bessel-integral oracle") {
    const double oracle = green_zero_bessel();
    CHECK(oracle == Catch::Approx(1.5163860591).margin(2e-6));
    const GreenEstimate e = green_full(3, origin(), 5e-3);
    CHECK(e.value <= oracle + 1e-9);
    CHECK(e.value + e.tail >= oracle - 1e-9);
}

TEST_CASE("full Green bracket respects the asymptotic at moderate distance") {
    const Point z{{6, 3, 2}};
    const GreenEstimate e = green_full(3, z, 2e-3);
    const double asym = green_asymptotic_coeff(3) / norm2(z);
    // lattice corrections at ||z|| = 7 are O(||z||^-3), well inside 10%
    CHECK(e.value < asym * 1.1);
    CHECK(e.value + e.tail > asym * 0.9);
}

TEST_CASE("upper bound dominates the table everywhere") {
    RestrictedGreenTable table(3, 512, 14);
    Point p;
    for (p.c[0] = -14; p.c[0] <= 14; ++p.c[0])
        for (p.c[1] = -14; p.c[1] <= 14; ++p.c[1])
            for (p.c[2] = -14; p.c[2] <= 14; ++p.c[2])
                CHECK(table.value(p) <= green_upper_bound(3, p) + table.tail_bound());
}

TEST_CASE("gaussian envelope fit certifies the whole table") {
    RestrictedGreenTable table(3, 64, 16);
    const RestrictedBoundFit fit = check_restricted_bound(table);
    CHECK(fit.c_hat > 0.0);
    CHECK(fit.C_hat > 0.0);
    const double T = 64.0;
    Point z;
    for (std::int32_t x = 0; x <= 16; ++x) {
        z.c[0] = x;
        const double envelope = fit.C_hat * T / (1.0 + std::pow(static_cast<double>(x), 3)) *
                                std::exp(-fit.c_hat * x * x / T);
        CHECK(table.value(z) <= envelope * (1.0 + 1e-9));
    }
}

TEST_CASE("covering sum rejects pieces outside their cube") {
    RestrictedGreenTable table(3, 32, 8);
    CubePieces good, bad;
    PointSet inside(3);
    inside.insert(Point{{1, 0, 0}});
    good.emplace_back(origin(), inside);
    CHECK(covering_sum(table, good, 2) > 0.0);
    PointSet outside(3);
    outside.insert(Point{{5, 0, 0}});
    bad.emplace_back(origin(), outside);
    CHECK_THROWS_AS(covering_sum(table, bad, 2), std::invalid_argument);
}

TEST_CASE("covering sum decomposes the plain occupation sum") {
    RestrictedGreenTable table(3, 32, 8);
    // partition the box points of a small set into their r-cubes
    PointSet s(3);
    for (std::int32_t x = -3; x <= 3; ++x) s.insert(Point{{x, 1, -2}});
    const std::int32_t r = 2;
    FlatTable<char> seen;
    CubePieces pieces;
    std::map<std::vector<std::int32_t>, PointSet> by_cube;
    s.for_each([&](const Point& z) {
        const Point q = cube_of(z, r, 3);
        auto& piece = by_cube[{q.c[0], q.c[1], q.c[2]}];
        if (piece.dim() != 3 || piece.empty()) piece = PointSet(3);
        piece.insert(z);
    });
    double direct = 0;
    s.for_each([&](const Point& z) { direct += table.value(z); });
    for (auto& [qc, piece] : by_cube) pieces.emplace_back(Point{{qc[0], qc[1], qc[2]}}, piece);
    CHECK(covering_sum(table, pieces, r) == Catch::Approx(direct).margin(1e-12));
}
