#include "fermicurve/fermi_map.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fermicurve/errors.hpp"

namespace fermi {

namespace {

// |psi| floor for the ratio formulas: stricter than the polar-decomposition
// mask because psi''/psi amplifies stencil noise as 1/|psi|.
constexpr double kRatioThreshold = 1e-7;

// [1/1] rational extrapolation through (0,y0), (1,y1), (2,y2), evaluated at t.
// Falls back to the quadratic through the same points when the rational form
// degenerates.
double rational_extrapolate(double y0, double y1, double y2, double t) {
    const double denom = 2.0 * (y1 - y2);
    if (std::abs(denom) > 1e-12 * (std::abs(y1) + std::abs(y2) + 1e-300)) {
        const double q1 = (y2 - 2.0 * y1 + y0) / denom;
        const double p1 = y1 - y0 + y1 * q1;
        const double den_t = 1.0 + q1 * t;
        const double value = (y0 + p1 * t) / den_t;
        if (std::isfinite(value) && std::abs(den_t) > 0.1) return value;
    }
    // Newton quadratic through the three points
    const double d1 = y1 - y0;
    const double d2 = (y2 - y1) - d1;
    return y0 + d1 * t + 0.5 * d2 * t * (t - 1.0);
}

// Noise floor of a sampled function from the median absolute second
// difference: smooth data contributes O(h^2) while stencil/rounding noise
// enters at full strength.
double second_difference_floor(const std::vector<double>& y) {
    std::vector<double> d;
    d.reserve(y.size());
    for (std::size_t i = 1; i + 1 < y.size(); ++i) {
        d.push_back(std::abs(y[i + 1] - 2.0 * y[i] + y[i - 1]));
    }
    if (d.empty()) return 0.0;
    const std::size_t mid = d.size() / 2;
    std::nth_element(d.begin(), d.begin() + mid, d.end());
    return d[mid] / 4.0;
}

struct MaskedRun {
    std::size_t begin;  // first masked index
    std::size_t end;    // last masked index
};

std::vector<MaskedRun> masked_runs(const std::vector<bool>& mask) {
    std::vector<MaskedRun> runs;
    const std::size_t n = mask.size();
    for (std::size_t i = 0; i < n;) {
        if (mask[i]) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < n && !mask[j + 1]) ++j;
        runs.push_back({i, j});
        i = j + 1;
    }
    return runs;
}

}  // namespace

PhaseCurve::PhaseCurve(double xa, double xb, std::vector<double> xs, std::vector<double> pp,
                       std::vector<double> pm)
    : x_A(xa), x_B(xb), x(std::move(xs)), p_plus(std::move(pp)), p_minus(std::move(pm)) {
    if (!(x_A < x_B)) throw InvalidParameterError("phase curve requires x_A < x_B");
    if (x.size() != p_plus.size() || x.size() != p_minus.size()) {
        throw ShapeError("phase curve sample arrays differ in size");
    }
    if (x.size() < 4) throw InsufficientGridError("phase curve needs at least 4 samples");
    double p_scale = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (i + 1 < x.size() && !(x[i] < x[i + 1])) {
            throw InvalidParameterError("phase curve abscissae must increase");
        }
        if (p_plus[i] < p_minus[i]) {
            throw InvalidParameterError("phase curve branches cross");
        }
        p_scale = std::max({p_scale, std::abs(p_plus[i]), std::abs(p_minus[i])});
    }
    const double closure = std::max(p_plus.front() - p_minus.front(),
                                    p_plus.back() - p_minus.back());
    if (closure > 1e-6 * std::max(p_scale, 1e-300)) {
        throw InvalidParameterError("phase curve branches do not meet at the endpoints");
    }
}

Mat2 operator*(const Mat2& a, const Mat2& b) {
    return {a.a11 * b.a11 + a.a12 * b.a21, a.a11 * b.a12 + a.a12 * b.a22,
            a.a21 * b.a11 + a.a22 * b.a21, a.a21 * b.a12 + a.a22 * b.a22};
}

Mat2 transpose(const Mat2& m) { return {m.a11, m.a21, m.a12, m.a22}; }

double det(const Mat2& m) { return m.a11 * m.a22 - m.a12 * m.a21; }

FermiFunction fermi_from_wavefunction(const SampledWavefunction& psi,
                                      const PhysicalConstants& constants) {
    constants.validate();
    const Grid& grid = psi.grid;
    const std::size_t n = grid.size();
    const double hbar = constants.hbar;

    const double threshold = kRatioThreshold * psi.max_abs();
    std::vector<bool> mask(n);
    std::size_t n_masked = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mask[i] = std::abs(psi.values[i]) >= threshold;
        if (!mask[i]) ++n_masked;
    }
    if (n_masked * 10 > n * 3) {
        throw InsufficientSupportError(
            "more than 30% of the grid has negligible amplitude; shrink the grid");
    }
    // the outermost two points per side only get second-order stencils; treat
    // them like tail points rather than letting their error leak into g
    mask[0] = mask[1] = mask[n - 2] = mask[n - 1] = false;

    const auto d1 = derivative_central(std::span<const std::complex<double>>(psi.values),
                                       grid.spacing(), 1);
    const auto d2 = derivative_central(std::span<const std::complex<double>>(psi.values),
                                       grid.spacing(), 2);

    FermiFunction F{grid, std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), mask};
    for (std::size_t i = 0; i < n; ++i) {
        if (!mask[i]) continue;
        const std::complex<double> r1 = d1[i] / psi.values[i];
        const std::complex<double> r2 = d2[i] / psi.values[i];
        F.f[i] = hbar * r1.imag();
        F.g[i] = hbar * hbar * r2.real() + F.f[i] * F.f[i];
    }

    for (const MaskedRun& run : masked_runs(mask)) {
        const bool at_left_edge = run.begin == 0;
        const bool at_right_edge = run.end == n - 1;
        if (at_left_edge || at_right_edge) {
            // decay tail: continue the nearest valid values
            const std::size_t src = at_left_edge ? run.end + 1 : run.begin - 1;
            for (std::size_t i = run.begin; i <= run.end; ++i) {
                F.f[i] = F.f[src];
                F.g[i] = F.g[src];
            }
            continue;
        }
        const std::size_t len = run.end - run.begin + 1;
        if (len >= 5) {
            throw InsufficientSupportError(
                "amplitude vanishes over a region too wide to extrapolate across");
        }
        const bool left_ok = run.begin >= 3 && mask[run.begin - 1] && mask[run.begin - 2] &&
                             mask[run.begin - 3];
        const bool right_ok = run.end + 3 < n && mask[run.end + 1] && mask[run.end + 2] &&
                              mask[run.end + 3];
        if (!left_ok && !right_ok) {
            throw InsufficientSupportError("not enough valid neighbors to bridge a node region");
        }
        for (std::size_t i = run.begin; i <= run.end; ++i) {
            const double from_left = static_cast<double>(i - run.begin + 1);
            const double from_right = static_cast<double>(run.end - i + 1);
            const bool use_left = left_ok && (!right_ok || from_left <= from_right);
            if (use_left) {
                const std::size_t s = run.begin;
                F.g[i] = rational_extrapolate(F.g[s - 3], F.g[s - 2], F.g[s - 1],
                                              2.0 + from_left);
            } else {
                const std::size_t e = run.end;
                F.g[i] = rational_extrapolate(F.g[e + 3], F.g[e + 2], F.g[e + 1],
                                              2.0 + from_right);
            }
        }
        // f is interpolated linearly across the run; it has no pole structure
        // worth modelling at a node of a typical (real) eigenstate.
        const double f_lo = F.f[run.begin - 1];
        const double f_hi = F.f[run.end + 1];
        for (std::size_t i = run.begin; i <= run.end; ++i) {
            const double t = static_cast<double>(i - run.begin + 1) /
                             static_cast<double>(len + 1);
            F.f[i] = f_lo + (f_hi - f_lo) * t;
        }
    }
    return F;
}

double verify_fermi_operator(const SampledWavefunction& psi, const FermiFunction& F,
                             const PhysicalConstants& constants) {
    constants.validate();
    if (!(psi.grid == F.grid)) throw ShapeError("wavefunction and fermi function grids differ");
    const std::size_t n = psi.grid.size();
    const double h = psi.grid.spacing();
    const double hbar = constants.hbar;
    using cd = std::complex<double>;

    const auto d1 = derivative_central(std::span<const cd>(psi.values), h, 1);
    std::vector<cd> phi(n);
    for (std::size_t i = 0; i < n; ++i) {
        phi[i] = cd(0.0, -hbar) * d1[i] - F.f[i] * psi.values[i];
    }
    const auto dphi = derivative_central(std::span<const cd>(phi), h, 1);

    // start where the dphi stencil no longer reads the lower-order edge
    // values of phi
    const double scale = psi.max_abs();
    double worst = 0.0;
    for (std::size_t i = 4; i + 4 < n; ++i) {
        if (!F.valid_mask[i]) continue;
        const cd residual =
            cd(0.0, -hbar) * dphi[i] - F.f[i] * phi[i] + F.g[i] * psi.values[i];
        worst = std::max(worst, std::abs(residual) / scale);
    }
    return worst;
}

PhaseCurve curve_from_fermi(const FermiFunction& F, std::size_t n_samples) {
    if (n_samples < 8) throw InvalidParameterError("curve needs at least 8 samples");
    const Grid& grid = F.grid;
    const std::size_t n = grid.size();

    double max_abs_g = 0.0;
    for (std::size_t i = 0; i < n; ++i) max_abs_g = std::max(max_abs_g, std::abs(F.g[i]));
    const double noise = second_difference_floor(F.g);

    // negative-g runs at sample resolution; gaps whose g stays below the noise
    // floor are treated as part of the same well
    const double noise_floor = std::max(1e-9 * max_abs_g, noise);
    std::vector<std::pair<std::size_t, std::size_t>> wells;
    bool any_negative = false;
    for (std::size_t i = 0; i < n;) {
        if (!(F.g[i] < 0.0)) {
            ++i;
            continue;
        }
        any_negative = true;
        std::size_t j = i;
        while (j + 1 < n && F.g[j + 1] < noise_floor) ++j;
        while (!(F.g[j] < 0.0)) --j;  // trim trailing noise-level points
        double depth = 0.0;
        for (std::size_t k = i; k <= j; ++k) depth = std::max(depth, -F.g[k]);
        // a well indistinguishable from sampling noise is not a curve
        if (j - i + 1 >= 3 && depth > 20.0 * noise) wells.emplace_back(i, j);
        i = j + 1;
    }
    if (wells.empty()) {
        throw NoCurveError(any_negative
                               ? "g has no dip resolvable above the sampling noise: the "
                                 "curve is degenerate or the grid is too coarse"
                               : "g is positive everywhere: no real curve");
    }
    if (wells.size() > 1) {
        std::vector<std::pair<double, double>> intervals;
        for (const auto& [s, e] : wells) intervals.emplace_back(grid.point(s), grid.point(e));
        std::ostringstream msg;
        msg << "g dips below zero on " << wells.size() << " disjoint intervals";
        throw MultiWellError(msg.str(), std::move(intervals));
    }

    const auto [si, ei] = wells.front();
    if (si == 0 || ei == n - 1) {
        // a full-width dip whose depth sits at the derivative-stencil bias
        // (~ f^2 (f h / hbar)^4 for oscillatory psi) is a flat g, not a real
        // curve cut off by the grid
        double f2 = 0.0;
        for (std::size_t k = 0; k < n; ++k) f2 = std::max(f2, F.f[k] * F.f[k]);
        double depth = 0.0;
        for (std::size_t k = si; k <= ei; ++k) depth = std::max(depth, -F.g[k]);
        const double fh = std::sqrt(f2) * grid.spacing();
        const double bias_scale = std::min(50.0 * f2 * fh * fh * fh * fh, 1e-3 * f2);
        if (depth <= bias_scale) {
            throw NoCurveError(
                "g dips below zero only at the level of the derivative-stencil bias: "
                "the curve is degenerate");
        }
        throw InsufficientGridError("the curve reaches the grid boundary; widen the grid");
    }

    const auto xs = grid.points();
    const CubicSpline sg(xs, F.g);
    const CubicSpline sf(xs, F.f);
    const ToleranceConfig root_tol{1e-13, 1e-13, 200};
    auto g_fn = [&sg](double x) { return sg(x); };
    const double x_A = (F.g[si - 1] == 0.0)
                           ? grid.point(si - 1)
                           : find_root_bracketed(g_fn, grid.point(si - 1), grid.point(si),
                                                 root_tol);
    const double x_B = (F.g[ei + 1] == 0.0)
                           ? grid.point(ei + 1)
                           : find_root_bracketed(g_fn, grid.point(ei), grid.point(ei + 1),
                                                 root_tol);

    const double mid = 0.5 * (x_A + x_B);
    const double half = 0.5 * (x_B - x_A);
    std::vector<double> cx(n_samples), pp(n_samples), pm(n_samples);
    for (std::size_t j = 0; j < n_samples; ++j) {
        const double theta = std::numbers::pi * static_cast<double>(j) /
                             static_cast<double>(n_samples - 1);
        const double x = mid - half * std::cos(theta);
        // g(x_A) = g(x_B) = 0 by construction; do not let rounding reopen the
        // branch gap under the square root
        const double q = (j == 0 || j + 1 == n_samples) ? 0.0 : std::max(0.0, -sg(x));
        const double root = std::sqrt(q);
        cx[j] = x;
        pp[j] = sf(x) + root;
        pm[j] = sf(x) - root;
    }
    cx.front() = x_A;
    cx.back() = x_B;
    return PhaseCurve(x_A, x_B, std::move(cx), std::move(pp), std::move(pm));
}

double curve_area(const PhaseCurve& curve, const ToleranceConfig& tol) {
    tol.validate();
    const std::size_t n = curve.x.size();

    std::vector<double> q(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double halfgap = 0.5 * (curve.p_plus[i] - curve.p_minus[i]);
        q[i] = halfgap * halfgap;
    }
    const CubicSpline sq(curve.x, q);
    const double quad = integrate_adaptive(
        [&sq](double x) { return 2.0 * std::sqrt(std::max(0.0, sq(x))); }, curve.x_A,
        curve.x_B, tol);

    // polygon route: along the upper branch, back along the lower one
    std::vector<double> px, pp;
    px.reserve(2 * n - 2);
    pp.reserve(2 * n - 2);
    for (std::size_t i = 0; i < n; ++i) {
        px.push_back(curve.x[i]);
        pp.push_back(curve.p_plus[i]);
    }
    for (std::size_t i = n - 1; i-- > 1;) {
        px.push_back(curve.x[i]);
        pp.push_back(curve.p_minus[i]);
    }
    const double shoelace = shoelace_area(px, pp);

    const double allowed = std::max(1e-6, tol.abs_tol) * std::max(1.0, std::abs(quad));
    if (std::abs(quad - shoelace) > allowed) {
        std::ostringstream msg;
        msg << "area routes disagree: quadrature " << quad << " vs polygon " << shoelace;
        throw InconsistencyError(msg.str());
    }
    return quad;
}

QuadraticFermiForm gaussian_fermi_closed_form(double a, double b,
                                              const PhysicalConstants& constants) {
    constants.validate();
    if (!(a > 0.0)) throw InvalidParameterError("closed form requires a > 0");
    return {a * a + b * b, b, 1.0, a * constants.hbar};
}

Mat2 factor_unimodular(double a, double b) {
    if (!(a > 0.0)) throw InvalidParameterError("factorization requires a > 0");
    const double r = std::sqrt(a);
    return {r, 0.0, b / r, 1.0 / r};
}

}  // namespace fermi
