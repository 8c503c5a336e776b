#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "fermicurve/errors.hpp"

namespace fermi {

/// hbar and the particle mass; defaults give the dimensionless convention
/// hbar = m = 1 used throughout the tests.
struct PhysicalConstants {
    double hbar = 1.0;
    double mass = 1.0;

    void validate() const {
        if (!(hbar > 0.0)) throw InvalidParameterError("hbar must be positive");
        if (!(mass > 0.0)) throw InvalidParameterError("mass must be positive");
    }
};

/// Uniform 1D grid, closed at both ends.
class Grid {
  public:
    Grid(double x_min, double x_max, std::size_t n_points)
        : x_min_(x_min), x_max_(x_max), n_(n_points) {
        if (!(x_min < x_max)) throw InvalidParameterError("grid requires x_min < x_max");
        if (n_points < 5) throw InvalidParameterError("grid requires at least 5 points");
        if (!std::isfinite(x_min) || !std::isfinite(x_max))
            throw InvalidParameterError("grid bounds must be finite");
        spacing_ = (x_max - x_min) / static_cast<double>(n_ - 1);
        if (!(spacing_ > 0.0)) throw InvalidParameterError("grid spacing underflowed to zero");
    }

    double x_min() const { return x_min_; }
    double x_max() const { return x_max_; }
    std::size_t size() const { return n_; }
    double spacing() const { return spacing_; }

    double point(std::size_t i) const { return x_min_ + spacing_ * static_cast<double>(i); }

    std::vector<double> points() const {
        std::vector<double> xs(n_);
        for (std::size_t i = 0; i < n_; ++i) xs[i] = point(i);
        return xs;
    }

    /// Index of the grid point closest to x, clamped to the grid.
    std::size_t nearest_index(double x) const {
        if (x <= x_min_) return 0;
        if (x >= x_max_) return n_ - 1;
        auto i = static_cast<std::size_t>(std::lround((x - x_min_) / spacing_));
        return i >= n_ ? n_ - 1 : i;
    }

    bool contains(double x) const { return x >= x_min_ && x <= x_max_; }

    friend bool operator==(const Grid& a, const Grid& b) {
        return a.x_min_ == b.x_min_ && a.x_max_ == b.x_max_ && a.n_ == b.n_;
    }

  private:
    double x_min_;
    double x_max_;
    std::size_t n_;
    double spacing_;
};

}  // namespace fermi
