#include "fermicurve/inverse_map.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "fermicurve/errors.hpp"
#include "fermicurve/quantization.hpp"

namespace fermi {

namespace {

constexpr double kPi = std::numbers::pi;

// Core resampling density. Odd so the midpoint is a node.
constexpr std::size_t kCoreSamples = 513;

// The gap midline f and the squared half-gap q = -g are the smooth pair to
// interpolate: p+ and p- themselves have square-root endpoints.
struct MidlineGap {
    std::vector<double> f;
    std::vector<double> q;
};

MidlineGap midline_and_gap(const PhaseCurve& curve) {
    const std::size_t n = curve.x.size();
    MidlineGap out;
    out.f.resize(n);
    out.q.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double halfgap = 0.5 * (curve.p_plus[i] - curve.p_minus[i]);
        if (halfgap < 0.0) {
            std::ostringstream msg;
            msg << "invalid curve: p+ < p- at x = " << curve.x[i];
            throw InvalidParameterError(msg.str());
        }
        out.f[i] = 0.5 * (curve.p_plus[i] + curve.p_minus[i]);
        out.q[i] = halfgap * halfgap;
    }
    return out;
}

// E_ref used internally when the caller has no preference: puts the bottom of
// the derived well at zero.
double provisional_reference(const PhaseCurve& curve, const PhysicalConstants& constants) {
    const MidlineGap mg = midline_and_gap(curve);
    const double q_max = *std::max_element(mg.q.begin(), mg.q.end());
    const double e_ref = q_max / (2.0 * constants.mass);
    if (!(e_ref > 0.0)) {
        throw ExtensionError("curve carries no momentum spread; the derived well is empty");
    }
    return e_ref;
}

// Ground state of the derived well. The solver imposes hard walls at the grid
// ends, which raise E0 by roughly exp(-2 B) with B the barrier integral of
// sqrt(2m(V - E0)) from the well out to the wall. Widen the grid until that
// shift is far below the quantization residuals we want to resolve, and also
// when the first attempt clipped the continuation below E0 entirely.
struct GroundState {
    double energy;
    double rim_margin;  // margin (per side, units of the support width) that worked
};

GroundState derived_ground_state(const Potential& V, const PhaseCurve& curve,
                                 const PhysicalConstants& constants,
                                 const ToleranceConfig& tol) {
    constexpr double kMinPenetration = 10.0;  // exp(-20) ~ 2e-9 box shift
    const double width = curve.x_B - curve.x_A;
    const double h_target = 2.5 * width / 4000.0;
    double margin = 0.75 * width;
    for (int attempt = 0;; ++attempt) {
        const double lo = curve.x_A - margin;
        const double hi = curve.x_B + margin;
        const auto n_pts = static_cast<std::size_t>(
            std::clamp(std::ceil((hi - lo) / h_target) + 1.0, 1001.0, 32001.0));
        try {
            const Grid grid(lo, hi, n_pts);
            const double e0 = numerov_eigensolve(V, 0, grid, constants, tol).first;
            // barrier integral from the support edge to each wall; counting
            // only the outer region underestimates it, which at worst widens
            // the grid once more than necessary
            const auto penetration = [&](double from, double to) {
                const int steps = 1024;
                double acc = 0.0, prev = 0.0;
                for (int s = 0; s <= steps; ++s) {
                    const double x = from + (to - from) * s / steps;
                    const double k =
                        std::sqrt(std::max(0.0, 2.0 * constants.mass * (V(x) - e0))) /
                        constants.hbar;
                    if (s > 0) acc += 0.5 * (prev + k) * (to - from) / steps;
                    prev = k;
                }
                return std::abs(acc);
            };
            if (attempt >= 7 || std::min(penetration(curve.x_A, lo),
                                         penetration(curve.x_B, hi)) >= kMinPenetration) {
                return {e0, margin / width};
            }
        } catch (const BracketFailureError&) {
            if (attempt >= 7) throw;
        }
        margin *= 2.0;
    }
}

}  // namespace

std::pair<std::vector<double>, std::vector<double>> fg_from_curve(const PhaseCurve& curve) {
    MidlineGap mg = midline_and_gap(curve);
    std::vector<double> g(mg.q.size());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = -mg.q[i];
    return {std::move(mg.f), std::move(g)};
}

CurvePotentialBundle potential_from_curve(const PhaseCurve& curve, double E_ref, double gauge_x0,
                                          const PhysicalConstants& constants) {
    constants.validate();
    if (!(E_ref > 0.0)) {
        throw InvalidParameterError("potential_from_curve: E_ref must be positive");
    }
    if (!(gauge_x0 >= curve.x_A && gauge_x0 <= curve.x_B)) {
        throw InvalidGaugePointError("potential_from_curve: gauge point outside [x_A, x_B]");
    }
    const double m = constants.mass;

    const MidlineGap mg = midline_and_gap(curve);
    const CubicSpline sf(curve.x, mg.f);
    const CubicSpline sq(curve.x, mg.q);

    // Resample on cosine-clustered abscissae: dense near the endpoints where
    // the well meets E_ref and the original branch data is least linear.
    const double mid = 0.5 * (curve.x_A + curve.x_B);
    const double half = 0.5 * (curve.x_B - curve.x_A);
    CurvePotentialBundle out{{},     {}, {}, {}, Potential::polynomial({0.0}),
                             E_ref, gauge_x0};
    out.x.resize(kCoreSamples);
    out.f.resize(kCoreSamples);
    out.g.resize(kCoreSamples);
    out.S.resize(kCoreSamples);
    std::vector<double> v_core(kCoreSamples);
    for (std::size_t j = 0; j < kCoreSamples; ++j) {
        const double theta = kPi * static_cast<double>(j) / static_cast<double>(kCoreSamples - 1);
        double x = mid - half * std::cos(theta);
        if (j == 0) x = curve.x_A;
        if (j + 1 == kCoreSamples) x = curve.x_B;
        const double q = std::max(0.0, sq(x));
        out.x[j] = x;
        out.f[j] = sf(x);
        out.g[j] = -q;
        out.S[j] = sf.integral(gauge_x0, x);
        v_core[j] = E_ref - q / (2.0 * m);
    }

    // Quadratic continuation beyond the support, matching value and slope at
    // each end. Curvature: the larger of the local |V''| (taken slightly
    // inside; spline second derivatives are least trusted at the very ends)
    // and the harmonic estimate m omega^2 with omega = p_half / (m x_half).
    const double q_max = *std::max_element(mg.q.begin(), mg.q.end());
    const double omega_est = std::sqrt(q_max) / (m * half);
    const double inset = 0.02 * (curve.x_B - curve.x_A);
    const double kappa_floor = m * omega_est * omega_est;
    const double kappa_l =
        std::max(std::abs(sq.second_derivative(curve.x_A + inset)) / (2.0 * m), kappa_floor);
    const double kappa_r =
        std::max(std::abs(sq.second_derivative(curve.x_B - inset)) / (2.0 * m), kappa_floor);
    if (!(kappa_l > 0.0) || !(kappa_r > 0.0) || !std::isfinite(kappa_l) ||
        !std::isfinite(kappa_r)) {
        throw ExtensionError(
            "potential_from_curve: no confining continuation (curve carries no momentum spread)");
    }
    const double slope_l = -sq.derivative(curve.x_A) / (2.0 * m);
    const double slope_r = -sq.derivative(curve.x_B) / (2.0 * m);
    const double v_l = v_core.front();
    const double v_r = v_core.back();

    // Knots for the continuation, denser near the seams. Beyond the last knot
    // the tabulated spline continues its end segment, which reproduces this
    // quadratic exactly, so the reach only has to cover the seam region.
    const double w = curve.x_B - curve.x_A;
    const std::vector<double> offsets = {0.05 * w, 0.1 * w, 0.2 * w, 0.4 * w,
                                         0.8 * w,  1.4 * w, 2.2 * w, 3.0 * w};
    std::vector<double> xs_all, vs_all;
    xs_all.reserve(kCoreSamples + 2 * offsets.size());
    vs_all.reserve(kCoreSamples + 2 * offsets.size());
    for (auto it = offsets.rbegin(); it != offsets.rend(); ++it) {
        const double d = -*it;
        xs_all.push_back(curve.x_A + d);
        vs_all.push_back(v_l + slope_l * d + 0.5 * kappa_l * d * d);
    }
    xs_all.insert(xs_all.end(), out.x.begin(), out.x.end());
    vs_all.insert(vs_all.end(), v_core.begin(), v_core.end());
    for (const double d : offsets) {
        xs_all.push_back(curve.x_B + d);
        vs_all.push_back(v_r + slope_r * d + 0.5 * kappa_r * d * d);
    }
    out.V = Potential::tabulated(xs_all, vs_all);
    return out;
}

QuantizationCheck check_quantization(const PhaseCurve& curve, const PhysicalConstants& constants,
                                     const ToleranceConfig& tol, double residual_tol) {
    constants.validate();
    tol.validate();
    if (!(residual_tol > 0.0)) {
        throw InvalidParameterError("check_quantization: residual_tol must be positive");
    }
    const double e_ref = provisional_reference(curve, constants);
    const double mid = 0.5 * (curve.x_A + curve.x_B);
    const CurvePotentialBundle bundle = potential_from_curve(curve, e_ref, mid, constants);

    const GroundState gs = derived_ground_state(bundle.V, curve, constants, tol);
    const double width = curve.x_B - curve.x_A;
    const Interval domain{curve.x_A - gs.rim_margin * width, curve.x_B + gs.rim_margin * width};
    const double a0 = action_integral(bundle.V, gs.energy, constants, domain, tol);

    const double area = curve_area(curve, tol);
    const double value = area / (2.0 * constants.hbar) - a0;
    const long nearest = std::lround(value / kPi);
    QuantizationCheck out{std::nullopt, std::abs(value - static_cast<double>(nearest) * kPi),
                          gs.energy};
    if (nearest >= 0 && out.residual <= residual_tol) out.n = static_cast<int>(nearest);
    return out;
}

SampledWavefunction reconstruct_wavefunction(const PhaseCurve& curve, double gauge_x0,
                                             const Grid& grid,
                                             const PhysicalConstants& constants,
                                             const ToleranceConfig& tol) {
    constants.validate();
    tol.validate();
    const QuantizationCheck qc = check_quantization(curve, constants, tol);
    if (!qc.n) {
        std::ostringstream msg;
        msg << "curve area is off the quantization ladder by " << qc.residual
            << " (in units of the half action)";
        throw NotQuantizedError(msg.str(), qc.residual);
    }

    const double e_ref = provisional_reference(curve, constants);
    const CurvePotentialBundle bundle = potential_from_curve(curve, e_ref, gauge_x0, constants);

    std::pair<double, SampledWavefunction> level = [&] {
        try {
            return numerov_eigensolve(bundle.V, *qc.n, grid, constants, tol);
        } catch (const BracketFailureError& e) {
            std::ostringstream msg;
            msg << "reconstruction: the derived potential has no level " << *qc.n
                << " on this grid (" << e.what() << ")";
            throw InconsistencyError(msg.str());
        }
    }();

    // Inside the support S comes from its spline. Beyond it, extrapolating
    // that spline would magnify knot rounding through the microscopic end
    // segments of the clustered abscissae; instead continue the drift
    // linearly from each end and integrate, which is exact for linear f and
    // rounding-stable.
    const CubicSpline s_spline(bundle.x, bundle.S);
    const CubicSpline f_spline(bundle.x, bundle.f);
    const double x_lo = bundle.x.front(), x_hi = bundle.x.back();
    const double f_lo = bundle.f.front(), f_hi = bundle.f.back();
    const double df_lo = f_spline.derivative(x_lo), df_hi = f_spline.derivative(x_hi);
    const double s_lo = bundle.S.front(), s_hi = bundle.S.back();
    const auto S_at = [&](double x) {
        if (x < x_lo) {
            const double d = x - x_lo;
            return s_lo + f_lo * d + 0.5 * df_lo * d * d;
        }
        if (x > x_hi) {
            const double d = x - x_hi;
            return s_hi + f_hi * d + 0.5 * df_hi * d * d;
        }
        return s_spline(x);
    };
    std::vector<std::complex<double>> values(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double phase = S_at(grid.point(i)) / constants.hbar;
        values[i] = level.second.values[i].real() *
                    std::exp(std::complex<double>(0.0, phase));
    }
    SampledWavefunction psi(grid, std::move(values));

    const FermiFunction check = fermi_from_wavefunction(psi, constants);
    const double resid = verify_fermi_operator(psi, check, constants);
    if (!(resid < 1e-4)) {
        std::ostringstream msg;
        msg << "reconstruction failed its operator self-check: residual " << resid;
        throw InconsistencyError(msg.str());
    }
    return psi;
}

}  // namespace fermi
