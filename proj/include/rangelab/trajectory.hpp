#ifndef RANGELAB_TRAJECTORY_HPP
#define RANGELAB_TRAJECTORY_HPP

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "rangelab/lattice.hpp"
#include "rangelab/rng.hpp"

namespace rangelab {

/// Nearest-neighbor path S_0..S_n.  points.size() == n + 1.
struct Trajectory {
    int d = 3;
    std::vector<Point> points;
    RngStream stream{};

    std::int64_t length() const { return static_cast<std::int64_t>(points.size()) - 1; }
    const Point& at(std::int64_t k) const { return points[static_cast<std::size_t>(k)]; }
};

/// Uniform index in [0, 2d): axis j/2, direction + for even j, - for odd j.
inline Point apply_step(const Point& p, std::uint32_t step_idx) {
    return p.shifted(static_cast<int>(step_idx >> 1), (step_idx & 1) ? -1 : +1);
}

/// Simple symmetric nearest-neighbor walk of length n from the origin,
/// bit-reproducible for a fixed stream.
inline Trajectory generate_walk(RngStream stream, int d, std::int64_t n) {
    if (d < 3 || d > kMaxDim) throw std::invalid_argument("generate_walk: need 3 <= d <= 6");
    if (n < 0) throw std::invalid_argument("generate_walk: negative length");
    Trajectory traj;
    traj.d = d;
    traj.stream = stream;
    traj.points.reserve(static_cast<std::size_t>(n) + 1);
    Rng rng(stream);
    Point p = origin();
    traj.points.push_back(p);
    const auto nsteps = static_cast<std::uint32_t>(2 * d);
    for (std::int64_t k = 0; k < n; ++k) {
        p = apply_step(p, rng.below(nsteps));
        traj.points.push_back(p);
    }
    return traj;
}

}  // namespace rangelab

#endif
