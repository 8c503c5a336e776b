#include "fermicurve/quantization.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>
#include <utility>
#include <vector>

#include "fermicurve/errors.hpp"

namespace fermi {

namespace {

constexpr double kPi = std::numbers::pi;

// Shooting solutions grow like exp(integral of kappa) across forbidden
// regions; rescale well before the overflow guard in numerov_march would trip.
constexpr double kRenormThreshold = 1e140;

std::vector<double> sample_potential(const Potential& V, const Grid& grid) {
    std::vector<double> vs(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) vs[i] = V(grid.point(i));
    return vs;
}

struct ShootResult {
    std::vector<double> y;  // march order, renormalized as one consistent array
    int nodes = 0;
};

// Numerov march of y'' = q y seeded with y[0] = 0 and a tiny positive value,
// i.e. the solution growing out of a hard wall. Renormalization rescales the
// whole stored prefix so the returned samples stay mutually consistent.
ShootResult numerov_shoot(std::span<const double> q, double h) {
    const std::size_t n = q.size();
    if (n < 3) throw InsufficientGridError("numerov_shoot: need at least 3 samples");
    ShootResult out;
    out.y.assign(n, 0.0);
    out.y[1] = 1e-30;
    const double c = h * h / 12.0;
    double prev_sign = 1.0;
    for (std::size_t i = 2; i < n; ++i) {
        out.y[i] = (2.0 * out.y[i - 1] * (1.0 + 5.0 * c * q[i - 1]) -
                    out.y[i - 2] * (1.0 - c * q[i - 2])) /
                   (1.0 - c * q[i]);
        if (std::abs(out.y[i]) > kRenormThreshold) {
            const double s = 1.0 / std::abs(out.y[i]);
            for (std::size_t j = 0; j <= i; ++j) out.y[j] *= s;
        }
        if (out.y[i] != 0.0) {
            const double sign = out.y[i] > 0.0 ? 1.0 : -1.0;
            if (sign * prev_sign < 0.0) ++out.nodes;
            prev_sign = sign;
        }
    }
    return out;
}

// Interior sign changes of the full left-edge shoot. Jumps by one each time
// the trial energy crosses a discrete eigenvalue of the hard-wall problem.
int shoot_node_count(std::span<const double> vs, double energy, double pref, double h) {
    std::vector<double> q(vs.size());
    for (std::size_t i = 0; i < vs.size(); ++i) q[i] = pref * (vs[i] - energy);
    return numerov_shoot(q, h).nodes;
}

// Two-branch matching determinant at interface mi: zero exactly when the
// left-edge and right-edge shoots are proportional, i.e. at an eigenvalue.
// Normalized to O(1) so the root finder sees a well-scaled function.
double match_determinant(std::span<const double> vs, double energy, double pref, double h,
                         std::size_t mi) {
    const std::size_t n = vs.size();
    std::vector<double> q(n);
    for (std::size_t i = 0; i < n; ++i) q[i] = pref * (vs[i] - energy);

    const std::vector<double> qf(q.begin(), q.begin() + static_cast<std::ptrdiff_t>(mi + 2));
    std::vector<double> qb(q.rbegin(), q.rbegin() + static_cast<std::ptrdiff_t>(n - mi + 1));
    const ShootResult L = numerov_shoot(qf, h);
    const ShootResult R = numerov_shoot(qb, h);

    const double yl_m = L.y[mi], yl_p = L.y[mi + 1];
    const double yr_m = R.y[n - 1 - mi], yr_p = R.y[n - 2 - mi];
    const double raw = yl_m * yr_p - yl_p * yr_m;
    const double den = std::abs(yl_m * yr_p) + std::abs(yl_p * yr_m);
    return den > 0.0 ? raw / den : 0.0;
}

std::size_t matching_index(std::span<const double> vs, double energy) {
    std::size_t mi = vs.size() / 2;
    for (std::size_t i = vs.size(); i-- > 0;) {
        if (vs[i] <= energy) {
            mi = i;
            break;
        }
    }
    return std::clamp<std::size_t>(mi, 4, vs.size() - 6);
}

// Root of action(E) - target on (E_low, rim of the domain); action is strictly
// increasing in E for a single well, so the bracket is checked once up front.
double solve_monotone_action(const Potential& V, const PhysicalConstants& constants,
                             Interval domain, double E_low, double target,
                             const ToleranceConfig& tol, const char* context) {
    const double rim = std::min(V(domain.lo), V(domain.hi));
    const double scale = std::max({1.0, std::abs(rim), std::abs(E_low)});
    const double lo = E_low + 1e-9 * scale;
    const double hi = rim - 1e-9 * scale;
    if (!(lo < hi)) {
        std::ostringstream msg;
        msg << context << ": no energy window between E=" << E_low
            << " and the domain rim V=" << rim;
        throw BracketFailureError(msg.str());
    }
    auto residual = [&](double E) {
        return action_integral(V, E, constants, domain, tol) - target;
    };
    const double r_hi = residual(hi);
    if (r_hi < 0.0) {
        std::ostringstream msg;
        msg << context << ": target action " << target << " is not reached below the domain rim"
            << " (action at E=" << hi << " is " << r_hi + target
            << "); widen the search domain or lower n";
        throw BracketFailureError(msg.str());
    }
    const double r_lo = residual(lo);
    if (r_lo > 0.0) {
        std::ostringstream msg;
        msg << context << ": target action " << target << " already exceeded at E=" << lo;
        throw BracketFailureError(msg.str());
    }
    return find_root_bracketed(residual, lo, hi, tol);
}

}  // namespace

TurningPoints find_turning_points(const Potential& V, double energy, Interval search_domain,
                                  const ToleranceConfig& tol) {
    tol.validate();
    if (!(search_domain.lo < search_domain.hi) || !std::isfinite(search_domain.lo) ||
        !std::isfinite(search_domain.hi)) {
        throw InvalidParameterError("find_turning_points: invalid search domain");
    }
    if (!std::isfinite(energy)) throw InvalidParameterError("find_turning_points: energy not finite");

    constexpr std::size_t n_scan = 4097;
    const double step = search_domain.width() / static_cast<double>(n_scan - 1);
    std::vector<double> xs(n_scan), dv(n_scan);
    for (std::size_t i = 0; i < n_scan; ++i) {
        xs[i] = search_domain.lo + step * static_cast<double>(i);
        dv[i] = V(xs[i]) - energy;
    }

    // Crossings: exact zeros count as roots; otherwise bracket sign flips.
    std::vector<double> roots;
    for (std::size_t i = 0; i + 1 < n_scan; ++i) {
        if (dv[i] == 0.0) {
            roots.push_back(xs[i]);
        } else if (dv[i + 1] != 0.0 && dv[i] * dv[i + 1] < 0.0) {
            roots.push_back(
                find_root_bracketed([&](double x) { return V(x) - energy; }, xs[i], xs[i + 1], tol));
        }
    }
    if (dv[n_scan - 1] == 0.0) roots.push_back(xs[n_scan - 1]);

    if (roots.size() != 2) {
        std::ostringstream msg;
        msg << "find_turning_points: V - E has " << roots.size()
            << " crossings in the search domain (expected 2)";
        if (!roots.empty()) {
            msg << "; found near x =";
            for (double r : roots) msg << ' ' << r;
        }
        throw NotSingleWellError(msg.str());
    }

    const double x_A = roots[0], x_B = roots[1];
    for (int i = 1; i <= 15; ++i) {
        const double x = x_A + (x_B - x_A) * static_cast<double>(i) / 16.0;
        if (!(V(x) < energy)) {
            throw NotSingleWellError(
                "find_turning_points: interval between the crossings is not classically allowed");
        }
    }
    return {x_A, x_B, energy};
}

double momentum_k(const Potential& V, double energy, const PhysicalConstants& constants,
                  double x) {
    constants.validate();
    return std::sqrt(2.0 * constants.mass * std::abs(energy - V(x))) / constants.hbar;
}

double action_integral(const Potential& V, double energy, const PhysicalConstants& constants,
                       Interval search_domain, const ToleranceConfig& tol) {
    const TurningPoints tp = find_turning_points(V, energy, search_domain, tol);
    return integrate_adaptive([&](double x) { return momentum_k(V, energy, constants, x); },
                              tp.x_A, tp.x_B, tol);
}

std::pair<double, SampledWavefunction> numerov_eigensolve(const Potential& V, int n,
                                                          const Grid& grid,
                                                          const PhysicalConstants& constants,
                                                          const ToleranceConfig& tol) {
    tol.validate();
    constants.validate();
    if (n < 0) throw InvalidParameterError("numerov_eigensolve: n must be >= 0");
    const std::size_t N = grid.size();
    if (N < 32) throw InsufficientGridError("numerov_eigensolve: need at least 32 grid points");

    const std::vector<double> vs = sample_potential(V, grid);
    const double h = grid.spacing();
    const double pref = 2.0 * constants.mass / (constants.hbar * constants.hbar);

    const double vmin = *std::min_element(vs.begin(), vs.end());
    const double rim = std::min(vs.front(), vs.back());
    if (!(vmin < rim)) {
        throw InvalidParameterError(
            "numerov_eigensolve: potential must confine (edge values above its minimum)");
    }
    const double scale = std::max({1.0, std::abs(vmin), std::abs(rim)});
    double a = vmin + 1e-12 * scale;
    double b = rim - 1e-12 * scale;

    auto count = [&](double E) { return shoot_node_count(vs, E, pref, h); };
    int ca = count(a), cb = count(b);
    if (ca > n || cb <= n) {
        std::ostringstream msg;
        msg << "numerov_eigensolve: level " << n << " is not bracketed on this grid: node count is "
            << ca << " at E=" << a << " and " << cb << " at E=" << b
            << "; the grid supports levels " << ca << ".." << cb - 1;
        throw BracketFailureError(msg.str());
    }

    // Bisect the node count down to the single transition n -> n+1; that
    // window contains exactly one eigenvalue.
    for (int it = 0; it < 200 && !(ca == n && cb == n + 1); ++it) {
        const double m = 0.5 * (a + b);
        if (m <= a || m >= b) break;
        const int cm = count(m);
        if (cm <= n) {
            a = m;
            ca = cm;
        } else {
            b = m;
            cb = cm;
        }
    }

    const std::size_t mi = matching_index(vs, 0.5 * (a + b));
    auto determinant = [&](double E) { return match_determinant(vs, E, pref, h, mi); };

    double E_n;
    if (ca == n && cb == n + 1 && determinant(a) * determinant(b) < 0.0) {
        E_n = find_root_bracketed(determinant, a, b, tol);
    } else {
        // Degenerate fallback: squeeze the node-count transition itself.
        while (b - a > 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(b))) {
            const double m = 0.5 * (a + b);
            if (m <= a || m >= b) break;
            (count(m) <= n ? a : b) = m;
        }
        E_n = 0.5 * (a + b);
    }

    // Assemble the eigenfunction from the two branches at the matched energy.
    std::vector<double> q(N);
    for (std::size_t i = 0; i < N; ++i) q[i] = pref * (vs[i] - E_n);
    const std::vector<double> qf(q.begin(), q.begin() + static_cast<std::ptrdiff_t>(mi + 2));
    std::vector<double> qb(q.rbegin(), q.rbegin() + static_cast<std::ptrdiff_t>(N - mi + 1));
    const ShootResult L = numerov_shoot(qf, h);
    const ShootResult R = numerov_shoot(qb, h);

    // Scale the right branch onto the left at whichever interface index is
    // best conditioned (an eigenfunction node could sit at mi itself).
    double s = 0.0, best = -1.0;
    for (std::size_t j = mi - 1; j <= mi + 1; ++j) {
        const double l = L.y[j], r = R.y[N - 1 - j];
        if (std::abs(l * r) > best && r != 0.0) {
            best = std::abs(l * r);
            s = l / r;
        }
    }
    if (best < 0.0) throw ConvergenceError("numerov_eigensolve: branches vanish at the interface", E_n);

    std::vector<double> psi(N);
    for (std::size_t i = 0; i <= mi; ++i) psi[i] = L.y[i];
    for (std::size_t i = mi + 1; i < N; ++i) psi[i] = s * R.y[N - 1 - i];

    double norm2 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double w = (i == 0 || i + 1 == N) ? 0.5 : 1.0;
        norm2 += w * psi[i] * psi[i];
    }
    norm2 *= h;
    const double inv = 1.0 / std::sqrt(norm2);
    double peak = 0.0;
    for (double v : psi) peak = std::max(peak, std::abs(v));
    double orient = 1.0;
    for (double v : psi) {
        if (std::abs(v) > 0.5 * peak) {
            orient = v > 0.0 ? 1.0 : -1.0;
            break;
        }
    }
    for (double& v : psi) v *= inv * orient;

    const int found = count_sign_changes(psi);
    if (found != n) {
        std::ostringstream msg;
        msg << "numerov_eigensolve: converged to E=" << E_n << " with " << found
            << " nodes instead of " << n << "; refine the grid or widen it";
        throw BracketFailureError(msg.str());
    }

    std::vector<std::complex<double>> values(N);
    for (std::size_t i = 0; i < N; ++i) values[i] = psi[i];
    return {E_n, SampledWavefunction(grid, std::move(values))};
}

QuantizationReport maxu_rule_evaluate(const SampledWavefunction& psi, const Potential& V,
                                      double energy, const PhysicalConstants& constants) {
    constants.validate();
    const Grid& grid = psi.grid;
    const std::size_t N = grid.size();
    const double peak = psi.max_abs();

    double max_im = 0.0;
    for (const auto& v : psi.values) max_im = std::max(max_im, std::abs(v.imag()));
    if (max_im > 1e-6 * peak) {
        throw InputError("maxu_rule_evaluate: expected a real eigenstate (imaginary part is not negligible)");
    }
    std::vector<double> re(N);
    for (std::size_t i = 0; i < N; ++i) re[i] = psi.values[i].real();

    const TurningPoints tp =
        find_turning_points(V, energy, Interval{grid.x_min(), grid.x_max()}, {});

    // The log-derivative chi = psi'/psi must be strictly decreasing in the
    // allowed region for an eigenstate (chi' = -(k^2 + chi^2)). Checked in the
    // division-free form psi'' psi - psi'^2 < 0.
    const double h = grid.spacing();
    const std::vector<double> d1 = derivative_central(std::span<const double>(re), h, 1);
    const std::vector<double> d2 = derivative_central(std::span<const double>(re), h, 2);
    std::vector<double> slope;
    double slope_scale = 0.0;
    for (std::size_t i = 2; i + 2 < N; ++i) {
        const double x = grid.point(i);
        if (x <= tp.x_A || x >= tp.x_B) continue;
        slope.push_back(d2[i] * re[i] - d1[i] * d1[i]);
        slope_scale = std::max(slope_scale, std::abs(d2[i] * re[i]) + d1[i] * d1[i]);
    }
    for (double sl : slope) {
        if (sl > 1e-6 * slope_scale) {
            throw InconsistencyError(
                "maxu_rule_evaluate: log-derivative increases inside the allowed region; "
                "input is not an eigenstate at this energy");
        }
    }

    auto k = [&](double x) { return momentum_k(V, energy, constants, x); };
    const double action = integrate_adaptive(k, tp.x_A, tp.x_B, {});

    // chi (chi')^{-1} k' rewritten through the Riccati identity; smooth across
    // nodes and extrema of psi, integrable 1/sqrt at the turning points.
    const CubicSpline spline(grid.points(), re);
    const double m = constants.mass;
    const double hbar2 = constants.hbar * constants.hbar;
    auto integrand = [&](double x) {
        const double p = spline(x);
        const double dp = spline.derivative(x);
        const double kk = k(x);
        return m * V.derivative(x) * p * dp / (hbar2 * kk * (kk * kk * p * p + dp * dp));
    };
    const double correction = integrate_adaptive(integrand, tp.x_A, tp.x_B, {});

    std::vector<double> allowed;
    for (std::size_t i = 0; i < N; ++i) {
        const double x = grid.point(i);
        if (x > tp.x_A && x < tp.x_B) allowed.push_back(re[i]);
    }
    const int nodes = count_sign_changes(allowed);

    QuantizationReport report;
    report.energy = energy;
    report.n_nodes_psi = nodes;
    report.action = action;
    report.maxu_correction = correction;
    report.maxu_residual = action - correction - (nodes + 1) * kPi;
    report.wkb_residual = action - (nodes + 1) * kPi;
    return report;
}

double wkb_energy(const Potential& V, int N, const PhysicalConstants& constants,
                  Interval search_domain, const ToleranceConfig& tol) {
    if (N < 1) throw InvalidParameterError("wkb_energy: N must be >= 1");
    constexpr std::size_t n_scan = 4097;
    const double step = search_domain.width() / static_cast<double>(n_scan - 1);
    double vmin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n_scan; ++i) {
        vmin = std::min(vmin, V(search_domain.lo + step * static_cast<double>(i)));
    }
    return solve_monotone_action(V, constants, search_domain, vmin, N * kPi, tol, "wkb_energy");
}

double qian_dong_solve(const Potential& V, double ground_energy, int n,
                       const PhysicalConstants& constants, Interval search_domain,
                       const ToleranceConfig& tol) {
    if (n < 1) throw InvalidParameterError("qian_dong_solve: n must be >= 1");
    const bool cataloged = std::holds_alternative<Potential::Harmonic>(V.variant()) ||
                           std::holds_alternative<Potential::Morse>(V.variant());
    if (!cataloged) {
        std::cerr << "qian_dong_solve: warning: potential is outside the solvable catalog; "
                     "the anchored rule is approximate here\n";
    }
    const double A0 = action_integral(V, ground_energy, constants, search_domain, tol);
    return solve_monotone_action(V, constants, search_domain, ground_energy, A0 + n * kPi, tol,
                                 "qian_dong_solve");
}

Spectrum spectrum(const Potential& V, int n_max, const Grid& grid,
                  const PhysicalConstants& constants, const ToleranceConfig& tol) {
    if (n_max < 0) throw InvalidParameterError("spectrum: n_max must be >= 0");
    auto [E0, psi0] = numerov_eigensolve(V, 0, grid, constants, tol);
    (void)psi0;

    Spectrum out;
    out.ground_energy = E0;
    out.levels.push_back({0, E0, "numerov"});
    const Interval domain{grid.x_min(), grid.x_max()};
    for (int k = 1; k <= n_max; ++k) {
        out.levels.push_back({k, qian_dong_solve(V, E0, k, constants, domain, tol), "qian_dong"});
    }
    for (std::size_t i = 0; i + 1 < out.levels.size(); ++i) {
        if (!(out.levels[i + 1].energy > out.levels[i].energy)) {
            throw InconsistencyError("spectrum: levels are not strictly increasing");
        }
    }
    return out;
}

}  // namespace fermi
