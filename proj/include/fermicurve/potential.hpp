#pragma once

#include <span>
#include <variant>
#include <vector>

#include "fermicurve/errors.hpp"
#include "fermicurve/grid.hpp"
#include "fermicurve/numerics.hpp"

namespace fermi {

/// Model potential catalog. All variants evaluate V and V' at any x; the
/// tabulated variant interpolates with a cubic spline and continues the end
/// segments outside its table.
class Potential {
  public:
    struct Harmonic {
        double mass;
        double omega;
    };
    struct Morse {
        double depth;
        double width;   // alpha in V = D (1 - e^{-alpha (x - x_e)})^2
        double center;  // x_e
    };
    struct Polynomial {
        std::vector<double> coefficients;  // V = sum_k c_k x^k
    };
    struct Tabulated {
        CubicSpline spline;
    };
    using Variant = std::variant<Harmonic, Morse, Polynomial, Tabulated>;

    static Potential harmonic(double mass, double omega);
    static Potential morse(double depth, double width, double center);
    static Potential polynomial(std::vector<double> coefficients);
    static Potential tabulated(std::span<const double> xs, std::span<const double> vs);

    double operator()(double x) const;
    double derivative(double x) const;

    const Variant& variant() const { return v_; }

  private:
    explicit Potential(Variant v) : v_(std::move(v)) {}
    Variant v_;
};

}  // namespace fermi
