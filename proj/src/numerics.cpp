#include "fermicurve/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace fermi {

namespace {

constexpr double kOverflowGuard = 1e280;

struct AdaptiveState {
    const RealFunction* f;
    int depth_cap;
    bool converged;
    // Panels narrower than this are accepted as-is. Integrands built from
    // differences like x - edge quantize to ulp-sized staircases near the
    // edge; each micro-step keeps the panel delta proportional to the panel
    // width, which the halving error budget can never catch. Below this width
    // the jitter contributes less than the tolerance and is not worth chasing.
    double tiny_panel;
};

double simpson_panel(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_recurse(AdaptiveState& st, double a, double b, double fa, double fm, double fb,
                        double whole, double eps, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = (*st.f)(lm);
    const double frm = (*st.f)(rm);
    const double left = simpson_panel(a, m, fa, flm, fm);
    const double right = simpson_panel(m, b, fm, frm, fb);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * eps || (b - a) <= std::abs(m) * 1e-15 ||
        (b - a) <= st.tiny_panel) {
        return left + right + delta / 15.0;
    }
    if (depth >= st.depth_cap) {
        st.converged = false;
        return left + right + delta / 15.0;
    }
    return adaptive_recurse(st, a, m, fa, flm, fm, left, 0.5 * eps, depth + 1) +
           adaptive_recurse(st, m, b, fm, frm, fb, right, 0.5 * eps, depth + 1);
}

double adaptive_simpson(const RealFunction& f, double a, double b, double eps, int depth_cap,
                        bool& converged) {
    if (a == b) return 0.0;
    AdaptiveState st{&f, depth_cap, true, (b - a) * 1e-8};
    const double fa = f(a);
    const double fb = f(b);
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    const double whole = simpson_panel(a, b, fa, fm, fb);
    const double result = adaptive_recurse(st, a, b, fa, fm, fb, whole, eps, 0);
    converged = converged && st.converged;
    return result;
}

// Integral of f over the width-w strip touching `edge` (sign = +1: [edge, edge+w],
// sign = -1: [edge-w, edge]), with the substitution x = edge + sign*t^2. Either way
// the result is +int_0^sqrt(w) 2 t f(edge + sign t^2) dt: the transformed integrand
// is smooth for sqrt-type behaviour of f at the edge and finite for 1/sqrt types.
double edge_piece(const RealFunction& f, double edge, double sign, double w, double eps,
                  int depth_cap, bool& converged) {
    const double tmax = std::sqrt(w);
    // For a divergent f(edge) the transformed integrand still has a finite limit
    // at t = 0, but x = edge + sign*t^2 collapses onto the edge itself once t^2
    // drops below one ulp of the edge, so keep samples above that floor.
    // A divergent f(edge) means the transformed integrand is steered by
    // x - edge right down to the rounding of x, so keep t^2 well above one ulp
    // of the edge: at 1e4 ulps the quantization staircase in f is already in
    // the seventh digit and the clamped stretch is flat to the same accuracy.
    const bool singular = !std::isfinite(f(edge));
    const double t_floor =
        singular ? std::max(1e-7 * tmax,
                            std::sqrt(8.0e4 * std::numeric_limits<double>::epsilon() *
                                      std::max(1.0, std::abs(edge))))
                 : 0.0;
    auto g = [&](double t) {
        const double te = std::max(t, t_floor);
        return 2.0 * te * f(edge + sign * te * te);
    };
    const double g0 = singular ? g(0.0) : 0.0;
    AdaptiveState st{nullptr, depth_cap, true, tmax * 1e-8};
    const RealFunction gf = g;
    st.f = &gf;
    const double m = 0.5 * tmax;
    const double gm = gf(m);
    const double gt = gf(tmax);
    const double whole = simpson_panel(0.0, tmax, g0, gm, gt);
    const double result = adaptive_recurse(st, 0.0, tmax, g0, gm, gt, whole, eps, 0);
    converged = converged && st.converged;
    return result;
}

}  // namespace

double integrate_adaptive(const RealFunction& f, double a, double b, const ToleranceConfig& tol) {
    tol.validate();
    if (!(a < b)) throw InvalidParameterError("integrate_adaptive requires a < b");

    const int depth_cap = std::min(tol.max_iterations, 48);
    const double w = 0.15 * (b - a);

    // Coarse scale estimate to combine the absolute and relative tolerances.
    bool coarse_ok = true;
    double rough = edge_piece(f, a, +1.0, w, 1e-2, 12, coarse_ok) +
                   adaptive_simpson(f, a + w, b - w, 1e-2, 12, coarse_ok) +
                   edge_piece(f, b, -1.0, w, 1e-2, 12, coarse_ok);
    const double eps = std::max(tol.abs_tol, tol.rel_tol * std::abs(rough)) / 3.0;

    bool converged = true;
    const double left = edge_piece(f, a, +1.0, w, eps, depth_cap, converged);
    const double middle = adaptive_simpson(f, a + w, b - w, eps, depth_cap, converged);
    const double right = edge_piece(f, b, -1.0, w, eps, depth_cap, converged);
    const double result = left + middle + right;
    if (!converged) {
        throw ConvergenceError("integrate_adaptive: panel bisection hit the depth cap", result);
    }
    return result;
}

double find_root_bracketed(const RealFunction& f, double lo, double hi,
                           const ToleranceConfig& tol) {
    tol.validate();
    double a = lo, b = hi;
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb > 0.0) {
        std::ostringstream msg;
        msg << "find_root_bracketed: no sign change on [" << lo << ", " << hi << "]: f(lo)=" << fa
            << ", f(hi)=" << fb;
        throw InvalidBracketError(msg.str());
    }

    double c = b, fc = fb;
    double d = b - a, e = d;
    for (int iter = 0; iter < tol.max_iterations; ++iter) {
        if (fb * fc > 0.0) {
            c = a;
            fc = fa;
            e = d = b - a;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        const double eps = std::numeric_limits<double>::epsilon();
        const double tol1 =
            2.0 * eps * std::abs(b) + 0.5 * std::max(tol.abs_tol, tol.rel_tol * std::abs(b));
        const double xm = 0.5 * (c - b);
        if (std::abs(xm) <= tol1 || fb == 0.0) return b;
        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            // inverse quadratic / secant step
            double p, q;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                const double qq = fa / fc;
                const double r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::abs(p);
            if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        if (std::abs(d) > tol1)
            b += d;
        else
            b += (xm > 0.0 ? tol1 : -tol1);
        fb = f(b);
    }
    throw ConvergenceError("find_root_bracketed: iteration cap reached", b);
}

std::vector<double> numerov_march(std::span<const double> q, double h, double y0, double y1) {
    if (q.size() < 3) throw InsufficientGridError("numerov_march needs at least 3 points");
    const double h12 = h * h / 12.0;
    std::vector<double> y(q.size());
    y[0] = y0;
    y[1] = y1;
    for (std::size_t i = 1; i + 1 < q.size(); ++i) {
        const double num =
            2.0 * y[i] * (1.0 + 5.0 * h12 * q[i]) - y[i - 1] * (1.0 - h12 * q[i - 1]);
        const double den = 1.0 - h12 * q[i + 1];
        y[i + 1] = num / den;
        if (!std::isfinite(y[i + 1]) || std::abs(y[i + 1]) > kOverflowGuard) {
            throw OverflowError("numerov_march: solution overflowed", i);
        }
    }
    return y;
}

std::vector<double> numerov_integrate(const RealFunction& Q, const Grid& grid, double y0,
                                      double y1, MarchDirection direction) {
    const std::size_t n = grid.size();
    std::vector<double> q(n);
    for (std::size_t i = 0; i < n; ++i) q[i] = Q(grid.point(i));
    for (double v : q) {
        if (!std::isfinite(v)) throw InvalidParameterError("numerov_integrate: Q not finite on grid");
    }
    if (direction == MarchDirection::forward) {
        return numerov_march(q, grid.spacing(), y0, y1);
    }
    std::reverse(q.begin(), q.end());
    std::vector<double> y = numerov_march(q, grid.spacing(), y0, y1);
    std::reverse(y.begin(), y.end());
    return y;
}

int count_sign_changes(std::span<const double> samples, double zero_threshold) {
    double max_abs = 0.0;
    for (double v : samples) {
        if (!std::isfinite(v)) throw InvalidParameterError("count_sign_changes: non-finite sample");
        max_abs = std::max(max_abs, std::abs(v));
    }
    const double thr = zero_threshold < 0.0 ? 1e-9 * max_abs : zero_threshold;
    int changes = 0;
    int last_sign = 0;
    for (double v : samples) {
        if (std::abs(v) < thr || v == 0.0) continue;
        const int s = v > 0.0 ? 1 : -1;
        if (last_sign != 0 && s != last_sign) ++changes;
        last_sign = s;
    }
    if (last_sign == 0) {
        throw DegenerateInputError("count_sign_changes: all samples below threshold");
    }
    return changes;
}

double shoelace_area(std::span<const double> xs, std::span<const double> ps) {
    if (xs.size() != ps.size()) throw ShapeError("shoelace_area: coordinate sizes differ");
    if (xs.size() < 3) throw InvalidParameterError("shoelace_area: need at least 3 points");
    // Center the polygon first; the cross products are then rotation-safe.
    double cx = 0.0, cp = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        cx += xs[i];
        cp += ps[i];
    }
    cx /= static_cast<double>(xs.size());
    cp /= static_cast<double>(ps.size());
    double twice_area = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const std::size_t j = (i + 1) % xs.size();
        twice_area += (xs[i] - cx) * (ps[j] - cp) - (xs[j] - cx) * (ps[i] - cp);
    }
    return 0.5 * std::abs(twice_area);
}

template <typename T>
std::vector<T> derivative_central(std::span<const T> f, double h, int order) {
    const std::size_t n = f.size();
    if (n < 5) throw InsufficientGridError("derivative_central: need at least 5 points");
    if (order != 1 && order != 2) throw InvalidParameterError("derivative order must be 1 or 2");
    std::vector<T> d(n);
    if (order == 1) {
        d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
        d[1] = (f[2] - f[0]) / (2.0 * h);
        for (std::size_t i = 2; i + 2 < n; ++i) {
            d[i] = (-f[i + 2] + 8.0 * f[i + 1] - 8.0 * f[i - 1] + f[i - 2]) / (12.0 * h);
        }
        d[n - 2] = (f[n - 1] - f[n - 3]) / (2.0 * h);
        d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    } else {
        const double h2 = h * h;
        d[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2;
        d[1] = (f[0] - 2.0 * f[1] + f[2]) / h2;
        for (std::size_t i = 2; i + 2 < n; ++i) {
            d[i] = (-f[i + 2] + 16.0 * f[i + 1] - 30.0 * f[i] + 16.0 * f[i - 1] - f[i - 2]) /
                   (12.0 * h2);
        }
        d[n - 2] = (f[n - 3] - 2.0 * f[n - 2] + f[n - 1]) / h2;
        d[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / h2;
    }
    return d;
}

template std::vector<double> derivative_central<double>(std::span<const double>, double, int);
template std::vector<std::complex<double>> derivative_central<std::complex<double>>(
    std::span<const std::complex<double>>, double, int);

std::vector<double> derivative_central(std::span<const double> samples, double spacing,
                                       int order) {
    return derivative_central<double>(samples, spacing, order);
}

std::vector<std::complex<double>> derivative_central(std::span<const std::complex<double>> samples,
                                                     double spacing, int order) {
    return derivative_central<std::complex<double>>(samples, spacing, order);
}

namespace {

// Derivative at `at` of the cubic through four points, via Newton divided
// differences. Exact for polynomial data up to degree three.
double cubic_end_slope(std::span<const double> x, std::span<const double> y, double at) {
    double c01 = (y[1] - y[0]) / (x[1] - x[0]);
    double c12 = (y[2] - y[1]) / (x[2] - x[1]);
    double c23 = (y[3] - y[2]) / (x[3] - x[2]);
    double c012 = (c12 - c01) / (x[2] - x[0]);
    double c123 = (c23 - c12) / (x[3] - x[1]);
    double c0123 = (c123 - c012) / (x[3] - x[0]);
    const double d0 = at - x[0], d1 = at - x[1], d2 = at - x[2];
    return c01 + c012 * (d0 + d1) + c0123 * (d1 * d2 + d0 * d2 + d0 * d1);
}

}  // namespace

CubicSpline::CubicSpline(std::span<const double> xs, std::span<const double> ys) {
    const std::size_t n = xs.size();
    if (n != ys.size()) throw ShapeError("CubicSpline: size mismatch");
    if (n < 4) throw InsufficientGridError("CubicSpline: need at least 4 points");
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (!(xs[i] < xs[i + 1])) throw InvalidParameterError("CubicSpline: x not increasing");
    }
    xs_.assign(xs.begin(), xs.end());

    const double s_front = cubic_end_slope(xs.subspan(0, 4), ys.subspan(0, 4), xs.front());
    const double s_back = cubic_end_slope(xs.subspan(n - 4, 4), ys.subspan(n - 4, 4), xs.back());

    // Solve the clamped-spline tridiagonal system for the knot second derivatives.
    std::vector<double> diag(n), lower(n), upper(n), rhs(n);
    auto h = [&](std::size_t i) { return xs[i + 1] - xs[i]; };
    diag[0] = h(0) / 3.0;
    upper[0] = h(0) / 6.0;
    rhs[0] = (ys[1] - ys[0]) / h(0) - s_front;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        lower[i] = h(i - 1) / 6.0;
        diag[i] = (h(i - 1) + h(i)) / 3.0;
        upper[i] = h(i) / 6.0;
        rhs[i] = (ys[i + 1] - ys[i]) / h(i) - (ys[i] - ys[i - 1]) / h(i - 1);
    }
    lower[n - 1] = h(n - 2) / 6.0;
    diag[n - 1] = h(n - 2) / 3.0;
    rhs[n - 1] = s_back - (ys[n - 1] - ys[n - 2]) / h(n - 2);

    std::vector<double> m(n);
    for (std::size_t i = 1; i < n; ++i) {
        const double w = lower[i] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    m[n - 1] = rhs[n - 1] / diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) {
        m[i] = (rhs[i] - upper[i] * m[i + 1]) / diag[i];
    }

    a_.resize(n - 1);
    b_.resize(n - 1);
    c_.resize(n - 1);
    d_.resize(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double hi = h(i);
        a_[i] = ys[i];
        b_[i] = (ys[i + 1] - ys[i]) / hi - hi * (2.0 * m[i] + m[i + 1]) / 6.0;
        c_[i] = 0.5 * m[i];
        d_[i] = (m[i + 1] - m[i]) / (6.0 * hi);
    }

    cumulative_.resize(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double hi = h(i);
        cumulative_[i + 1] = cumulative_[i] + hi * (a_[i] + hi * (b_[i] / 2.0 +
                                                    hi * (c_[i] / 3.0 + hi * d_[i] / 4.0)));
    }
}

std::size_t CubicSpline::segment(double x) const {
    if (x <= xs_.front()) return 0;
    if (x >= xs_.back()) return xs_.size() - 2;
    const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    return static_cast<std::size_t>(it - xs_.begin()) - 1;
}

double CubicSpline::operator()(double x) const {
    const std::size_t i = segment(x);
    const double dx = x - xs_[i];
    return a_[i] + dx * (b_[i] + dx * (c_[i] + dx * d_[i]));
}

double CubicSpline::derivative(double x) const {
    const std::size_t i = segment(x);
    const double dx = x - xs_[i];
    return b_[i] + dx * (2.0 * c_[i] + dx * 3.0 * d_[i]);
}

double CubicSpline::second_derivative(double x) const {
    const std::size_t i = segment(x);
    const double dx = x - xs_[i];
    return 2.0 * c_[i] + 6.0 * d_[i] * dx;
}

double CubicSpline::antiderivative(double x) const {
    const std::size_t i = segment(x);
    const double dx = x - xs_[i];
    return cumulative_[i] +
           dx * (a_[i] + dx * (b_[i] / 2.0 + dx * (c_[i] / 3.0 + dx * d_[i] / 4.0)));
}

double CubicSpline::integral(double a, double b) const {
    return antiderivative(b) - antiderivative(a);
}

}  // namespace fermi
