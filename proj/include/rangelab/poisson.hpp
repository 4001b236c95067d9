#ifndef RANGELAB_POISSON_HPP
#define RANGELAB_POISSON_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "rangelab/lattice.hpp"

namespace rangelab {

/// Dense values on the box [-R, R]^d with a one-cell ghost ring.
/// Ghost cells hold Dirichlet data (zero unless set explicitly).
class BoxGrid {
public:
    BoxGrid(int d, std::int32_t R, std::size_t max_bytes = std::size_t{2} << 30) : d_(d), R_(R) {
        if (d < 1 || d > kMaxDim) throw std::invalid_argument("BoxGrid: bad dimension");
        side_ = 2 * static_cast<std::size_t>(R) + 3;  // padded
        std::size_t cells = 1;
        for (int i = 0; i < d; ++i) {
            if (cells > max_bytes / sizeof(double) / side_)
                throw std::length_error("BoxGrid: box exceeds memory cap");
            cells *= side_;
        }
        if (cells * sizeof(double) > max_bytes) throw std::length_error("BoxGrid: box exceeds memory cap");
        data_.assign(cells, 0.0);
        strides_.assign(static_cast<std::size_t>(d), 0);
        std::size_t s = 1;
        for (int i = d - 1; i >= 0; --i) {
            strides_[static_cast<std::size_t>(i)] = s;
            s *= side_;
        }
    }

    int dim() const { return d_; }
    std::int32_t radius() const { return R_; }
    std::size_t cells() const { return data_.size(); }
    std::size_t stride(int axis) const { return strides_[static_cast<std::size_t>(axis)]; }

    bool inside(const Point& z) const {
        for (int i = 0; i < d_; ++i)
            if (z.c[i] < -R_ || z.c[i] > R_) return false;
        return true;
    }

    std::size_t index(const Point& z) const {
        std::size_t idx = 0;
        for (int i = 0; i < d_; ++i) idx += static_cast<std::size_t>(z.c[i] + R_ + 1) * strides_[static_cast<std::size_t>(i)];
        return idx;
    }

    Point point_of(std::size_t idx) const {
        Point z;
        for (int i = 0; i < d_; ++i) {
            z.c[i] = static_cast<std::int32_t>(idx / strides_[static_cast<std::size_t>(i)]) - (R_ + 1);
            idx %= strides_[static_cast<std::size_t>(i)];
        }
        return z;
    }

    double& at(const Point& z) { return data_[index(z)]; }
    double at(const Point& z) const { return data_[index(z)]; }
    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    /// Visits every interior cell (the unpadded box), passing its flat index.
    template <class F>
    void for_each_interior(F&& f) const {
        Point z;
        for (int i = 0; i < d_; ++i) z.c[i] = -R_;
        while (true) {
            f(index(z), z);
            int axis = d_ - 1;
            while (axis >= 0 && z.c[axis] == R_) {
                z.c[axis] = -R_;
                --axis;
            }
            if (axis < 0) break;
            ++z.c[axis];
        }
    }

    /// Visits every cell of the padded box including the ghost ring.
    template <class F>
    void for_each_cell(F&& f) const {
        Point z;
        for (int i = 0; i < d_; ++i) z.c[i] = -(R_ + 1);
        while (true) {
            f(index(z), z);
            int axis = d_ - 1;
            while (axis >= 0 && z.c[axis] == R_ + 1) {
                z.c[axis] = -(R_ + 1);
                --axis;
            }
            if (axis < 0) break;
            ++z.c[axis];
        }
    }

    /// Visits every interior row along the last axis: f(base_index_of_first_cell,
    /// parity of the sum of the leading d-1 coordinates).
    template <class F>
    void for_each_row(F&& f) const {
        Point z;
        for (int i = 0; i + 1 < d_; ++i) z.c[i] = -R_;
        z.c[d_ - 1] = -R_;
        while (true) {
            int parity = 0;
            for (int i = 0; i + 1 < d_; ++i) parity += z.c[i];
            f(index(z), ((parity % 2) + 2) % 2);
            if (d_ == 1) break;
            int axis = d_ - 2;
            while (axis >= 0 && z.c[axis] == R_) {
                z.c[axis] = -R_;
                --axis;
            }
            if (axis < 0) break;
            ++z.c[axis];
        }
    }

private:
    int d_;
    std::int32_t R_;
    std::size_t side_;
    std::vector<double> data_;
    std::vector<std::size_t> strides_;
};

struct SorResult {
    std::size_t sweeps = 0;
    double residual = 0;
    bool converged = false;
};

/// Red-black SOR for u(z) = (1/2d) sum_nbr u + f(z) on the free cells of a
/// box grid.  `fixed` marks Dirichlet cells (value kept as-is); ghost cells
/// are implicit Dirichlet data.  Stops when the max residual drops below tol.
inline SorResult sor_solve(BoxGrid& u, const std::vector<std::uint8_t>& fixed,
                           const std::vector<double>* source, double tol,
                           std::size_t max_sweeps = 100000, double omega = 0.0) {
    const int d = u.dim();
    const auto R = u.radius();
    if (omega <= 0.0) omega = 2.0 / (1.0 + std::sin(M_PI / (2.0 * R + 2.0)));
    const double inv2d = 1.0 / (2.0 * d);
    std::vector<std::size_t> strides(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) strides[static_cast<std::size_t>(i)] = u.stride(i);
    double* v = u.data();

    const std::size_t row_len = 2 * static_cast<std::size_t>(R) + 1;
    const std::int32_t row_start_parity = ((R % 2) + 2) % 2;  // parity of coordinate -R

    SorResult res;
    for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
        double max_res = 0;
        for (int color = 0; color < 2; ++color) {
            u.for_each_row([&](std::size_t base, int row_parity) {
                // first cell of the row whose total coordinate parity == color
                std::size_t off = (((row_parity + row_start_parity) % 2) == color) ? 0 : 1;
                for (std::size_t j = off; j < row_len; j += 2) {
                    const std::size_t idx = base + j;
                    if (fixed[idx]) continue;
                    double nb = 0;
                    for (int i = 0; i < d; ++i) {
                        const std::size_t s = strides[static_cast<std::size_t>(i)];
                        nb += v[idx - s] + v[idx + s];
                    }
                    const double target = nb * inv2d + (source ? (*source)[idx] : 0.0);
                    const double r = target - v[idx];
                    if (std::abs(r) > max_res) max_res = std::abs(r);
                    v[idx] += omega * r;
                }
            });
        }
        res.sweeps = sweep + 1;
        res.residual = max_res;
        if (max_res < tol) {
            res.converged = true;
            break;
        }
    }
    return res;
}

}  // namespace rangelab

#endif
