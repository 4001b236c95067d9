#ifndef RANGELAB_STATS_HPP
#define RANGELAB_STATS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace rangelab {

struct MeanCI {
    double mean = 0;
    double stderr_ = 0;
    double half_width = 0;  // at the declared level
    std::size_t count = 0;
    double level = 0.95;

    double lo() const { return mean - half_width; }
    double hi() const { return mean + half_width; }
};

/// z quantile for a two-sided interval at the given level (0.95 -> 1.96).
inline double z_for_level(double level) {
    // Acklam-style rational approximation of the normal quantile.
    const double p = 0.5 + level / 2.0;
    if (p <= 0.5 || p >= 1.0) throw std::invalid_argument("z_for_level: bad level");
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return q - (2.515517 + 0.802853 * q + 0.010328 * q * q) /
                   (1.0 + 1.432788 * q + 0.189269 * q * q + 0.001308 * q * q * q);
}

inline MeanCI mean_ci(const std::vector<double>& xs, double level = 0.95) {
    MeanCI r;
    r.count = xs.size();
    r.level = level;
    if (xs.empty()) return r;
    double s = 0;
    for (double x : xs) s += x;
    r.mean = s / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double v = 0;
        for (double x : xs) v += (x - r.mean) * (x - r.mean);
        v /= static_cast<double>(xs.size() - 1);
        r.stderr_ = std::sqrt(v / static_cast<double>(xs.size()));
    }
    r.half_width = z_for_level(level) * r.stderr_;
    return r;
}

/// Binomial proportion with normal-approximation interval.
inline MeanCI proportion_ci(std::size_t hits, std::size_t trials, double level = 0.95) {
    MeanCI r;
    r.count = trials;
    r.level = level;
    if (trials == 0) return r;
    const double p = static_cast<double>(hits) / static_cast<double>(trials);
    r.mean = p;
    r.stderr_ = std::sqrt(p * (1 - p) / static_cast<double>(trials));
    r.half_width = z_for_level(level) * r.stderr_;
    return r;
}

struct LinearFit {
    double slope = 0;
    double intercept = 0;
    double r2 = 0;
    double slope_stderr = 0;
    std::size_t count = 0;
};

/// Ordinary least squares y = intercept + slope * x.
inline LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("linear_fit: need >= 2 points");
    const auto n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
        syy += y[i] * y[i];
    }
    const double vx = sxx - sx * sx / n;
    const double vy = syy - sy * sy / n;
    const double cxy = sxy - sx * sy / n;
    LinearFit f;
    f.count = x.size();
    f.slope = cxy / vx;
    f.intercept = (sy - f.slope * sx) / n;
    double ss_res = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        ss_res += r * r;
    }
    f.r2 = vy > 0 ? 1.0 - ss_res / vy : 1.0;
    if (x.size() > 2) f.slope_stderr = std::sqrt(ss_res / (n - 2) / vx);
    return f;
}

/// Weighted least squares, weights w_i (e.g. replica counts).
inline LinearFit weighted_linear_fit(const std::vector<double>& x, const std::vector<double>& y,
                                     const std::vector<double>& w) {
    if (x.size() != y.size() || x.size() != w.size() || x.size() < 2)
        throw std::invalid_argument("weighted_linear_fit: size mismatch");
    double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sw += w[i];
        sx += w[i] * x[i];
        sy += w[i] * y[i];
        sxx += w[i] * x[i] * x[i];
        sxy += w[i] * x[i] * y[i];
    }
    const double vx = sxx - sx * sx / sw;
    LinearFit f;
    f.count = x.size();
    f.slope = (sxy - sx * sy / sw) / vx;
    f.intercept = (sy - f.slope * sx) / sw;
    double ss_res = 0, ss_tot = 0;
    const double ybar = sy / sw;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        ss_res += w[i] * r * r;
        ss_tot += w[i] * (y[i] - ybar) * (y[i] - ybar);
    }
    f.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    return f;
}

inline double median(std::vector<double> xs) {
    if (xs.empty()) throw std::invalid_argument("median: empty");
    std::size_t m = xs.size() / 2;
    std::nth_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(m), xs.end());
    double hi = xs[m];
    if (xs.size() % 2 == 1) return hi;
    std::nth_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(m) - 1, xs.end());
    return 0.5 * (hi + xs[m - 1]);
}

}  // namespace rangelab

#endif
