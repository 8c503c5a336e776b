#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "fermicurve/errors.hpp"
#include "fermicurve/grid.hpp"

namespace fermi {

struct ToleranceConfig {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    int max_iterations = 200;

    void validate() const {
        if (!(abs_tol > 0.0)) throw InvalidParameterError("abs_tol must be positive");
        if (!(rel_tol > 0.0)) throw InvalidParameterError("rel_tol must be positive");
        if (max_iterations < 1) throw InvalidParameterError("max_iterations must be >= 1");
    }
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double width() const { return hi - lo; }
    double midpoint() const { return 0.5 * (lo + hi); }
};

using RealFunction = std::function<double(double)>;

/// Adaptive Simpson quadrature of f over [a, b].
///
/// Both endpoints are regularized by the substitution x = endpoint +- t^2, so
/// integrands that vanish like sqrt(x - a) or diverge like 1/sqrt(x - a) at an
/// endpoint (action integrands at turning points) are integrated accurately.
double integrate_adaptive(const RealFunction& f, double a, double b,
                          const ToleranceConfig& tol = {});

/// Brent-style bracketed root finding; the bracket [lo, hi] must straddle a
/// sign change and is maintained at every step.
double find_root_bracketed(const RealFunction& f, double lo, double hi,
                           const ToleranceConfig& tol = {});

enum class MarchDirection { forward, backward };

/// Integrates y'' = Q(x) y over the grid with the fourth-order Numerov stencil.
/// Forward: y0, y1 seed the first two grid points; backward: the last two.
/// The returned samples are always in ascending-x order.
std::vector<double> numerov_integrate(const RealFunction& Q, const Grid& grid, double y0,
                                      double y1, MarchDirection direction);

/// Index-order Numerov march over precomputed Q samples (spacing h).
/// Throws OverflowError when the solution exceeds the overflow guard.
std::vector<double> numerov_march(std::span<const double> q, double h, double y0, double y1);

/// Counts strict sign alternations, skipping entries with |value| below the
/// threshold (a run of sub-threshold entries separates at most one change).
/// A negative threshold selects the scale-free default 1e-9 * max|sample|.
int count_sign_changes(std::span<const double> samples, double zero_threshold = -1.0);

/// Absolute area enclosed by the polyline (implicitly closed). Self-intersecting
/// input is not detected; the result is then the signed net area magnitude.
double shoelace_area(std::span<const double> xs, std::span<const double> ps);

/// Derivative samples of order 1 or 2 on a uniform grid: fourth-order central
/// stencils in the interior, second-order one-sided at the edges.
template <typename T>
std::vector<T> derivative_central(std::span<const T> samples, double spacing, int order);

std::vector<double> derivative_central(std::span<const double> samples, double spacing,
                                       int order);
std::vector<std::complex<double>> derivative_central(std::span<const std::complex<double>> samples,
                                                     double spacing, int order);

/// Clamped cubic spline with end slopes fitted through the outer four points,
/// so cubic data is reproduced exactly. Evaluation outside [x_front, x_back]
/// continues the end segment polynomial.
class CubicSpline {
  public:
    CubicSpline() = default;
    CubicSpline(std::span<const double> xs, std::span<const double> ys);

    double operator()(double x) const;
    double derivative(double x) const;
    double second_derivative(double x) const;

    /// Exact integral of the piecewise cubic between a and b.
    double integral(double a, double b) const;

    double x_front() const { return xs_.front(); }
    double x_back() const { return xs_.back(); }

  private:
    std::size_t segment(double x) const;
    double antiderivative(double x) const;

    std::vector<double> xs_;
    // per-segment coefficients: s(x) = a + b*dx + c*dx^2 + d*dx^3, dx = x - xs_[i]
    std::vector<double> a_, b_, c_, d_;
    std::vector<double> cumulative_;  // antiderivative value at each knot
};

}  // namespace fermi
