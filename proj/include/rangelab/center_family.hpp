#ifndef RANGELAB_CENTER_FAMILY_HPP
#define RANGELAB_CENTER_FAMILY_HPP

#include <cstdint>
#include <vector>

#include "rangelab/lattice.hpp"

namespace rangelab {

/// A family of sphere centers pairwise at Euclidean distance >= 4r
/// (non-overlapping spheres of radius 2r).
struct CenterFamily {
    double radius = 1;
    std::vector<Point> centers;

    std::size_t size() const { return centers.size(); }

    bool well_separated() const {
        const double min_d2 = 16.0 * radius * radius;
        for (std::size_t i = 0; i < centers.size(); ++i)
            for (std::size_t j = i + 1; j < centers.size(); ++j)
                if (static_cast<double>(dist_sq(centers[i], centers[j])) < min_d2) return false;
        return true;
    }
};

}  // namespace rangelab

#endif
