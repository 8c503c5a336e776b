#include "fermicurve/state.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>

#include "fermicurve/numerics.hpp"

namespace fermi {

namespace {
constexpr double kMaskThreshold = 1e-9;  // of max |psi|
}

SampledWavefunction::SampledWavefunction(Grid g, std::vector<std::complex<double>> v)
    : grid(g), values(std::move(v)) {
    if (values.size() != grid.size()) {
        throw ShapeError("wavefunction sample count does not match the grid");
    }
    double max_abs = 0.0;
    for (const auto& z : values) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
            throw InvalidParameterError("wavefunction samples must be finite");
        }
        max_abs = std::max(max_abs, std::abs(z));
    }
    if (max_abs == 0.0) throw DegenerateInputError("wavefunction is identically zero");
}

double SampledWavefunction::max_abs() const {
    double m = 0.0;
    for (const auto& z : values) m = std::max(m, std::abs(z));
    return m;
}

double SampledWavefunction::norm_squared() const {
    const double h = grid.spacing();
    double sum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double w = (i == 0 || i + 1 == values.size()) ? 0.5 : 1.0;
        sum += w * std::norm(values[i]);
    }
    return sum * h;
}

SampledWavefunction make_squeezed_gaussian(double a, double b, const Grid& grid,
                                           const PhysicalConstants& constants) {
    constants.validate();
    if (!(a > 0.0)) throw InvalidParameterError("squeezed gaussian requires a > 0");
    std::vector<std::complex<double>> values(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x2 = grid.point(i) * grid.point(i);
        values[i] = std::exp(std::complex<double>(-a * x2 / (2.0 * constants.hbar),
                                                  -b * x2 / (2.0 * constants.hbar)));
    }
    return {grid, std::move(values)};
}

double hermite_polynomial(int N, double x) {
    if (N < 0) throw InvalidParameterError("hermite order must be non-negative");
    if (N > 50) throw InvalidParameterError("hermite order must not exceed 50");
    double prev = 1.0;  // H_0
    if (N == 0) return prev;
    double cur = 2.0 * x;  // H_1
    for (int k = 1; k < N; ++k) {
        const double next = 2.0 * x * cur - 2.0 * k * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

SampledWavefunction make_hermite_state(int N, double omega, const Grid& grid,
                                       const PhysicalConstants& constants) {
    constants.validate();
    if (!(omega > 0.0)) throw InvalidParameterError("hermite state requires omega > 0");
    if (N < 0 || N > 50) throw InvalidParameterError("hermite order must be in [0, 50]");
    const double scale = std::sqrt(constants.mass * omega / constants.hbar);
    // (sqrt(pi) 2^N N!)^{-1/2} assembled in log space
    const double log_norm = -0.25 * std::log(std::numbers::pi) -
                            0.5 * (N * std::numbers::ln2 + std::lgamma(N + 1.0));
    std::vector<std::complex<double>> values(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double q = scale * grid.point(i);
        values[i] = std::exp(log_norm - 0.5 * q * q) * hermite_polynomial(N, q);
    }
    SampledWavefunction psi(grid, std::move(values));
    const double edge = std::max(std::abs(psi.values.front()), std::abs(psi.values.back()));
    if (edge > 1e-8 * psi.max_abs()) {
        std::cerr << "warning: hermite state N=" << N
                  << " is truncated by the grid (edge amplitude " << edge << ")\n";
    }
    return psi;
}

PolarDecomposition polar_decompose(const SampledWavefunction& psi,
                                   const PhysicalConstants& constants, double gauge_x0) {
    constants.validate();
    const Grid& grid = psi.grid;
    const std::size_t n = grid.size();
    const double hbar = constants.hbar;

    const double threshold = kMaskThreshold * psi.max_abs();
    std::vector<bool> mask(n);
    for (std::size_t i = 0; i < n; ++i) mask[i] = std::abs(psi.values[i]) >= threshold;

    if (!grid.contains(gauge_x0)) {
        throw InvalidGaugePointError("gauge point lies outside the grid");
    }
    const std::size_t i0 = grid.nearest_index(gauge_x0);
    if (!mask[i0]) {
        throw InvalidGaugePointError("wavefunction amplitude vanishes at the gauge point");
    }

    // S' = hbar Im(psi'/psi) where the amplitude supports it, 0 elsewhere
    const auto dpsi = derivative_central(std::span<const std::complex<double>>(psi.values),
                                         grid.spacing(), 1);
    std::vector<double> sprime(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (mask[i]) sprime[i] = hbar * std::imag(dpsi[i] / psi.values[i]);
    }

    // cumulative trapezoid of S' anchored at the gauge index
    std::vector<double> s_int(n, 0.0);
    const double h = grid.spacing();
    for (std::size_t i = i0; i + 1 < n; ++i) {
        s_int[i + 1] = s_int[i] + 0.5 * h * (sprime[i] + sprime[i + 1]);
    }
    for (std::size_t i = i0; i-- > 0;) {
        s_int[i] = s_int[i + 1] - 0.5 * h * (sprime[i] + sprime[i + 1]);
    }

    // The integral fixes the winding; each point is then pinned to the exact
    // branch of arg psi nearest to it, so reconstruction is exact to rounding.
    const double theta0 = std::arg(psi.values[i0]);
    PolarDecomposition out{grid, std::vector<double>(n), std::vector<double>(n), mask};
    constexpr double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t i = 0; i < n; ++i) {
        out.R[i] = std::abs(psi.values[i]);
        const double theta = std::arg(psi.values[i]);
        const double target = theta0 + s_int[i] / hbar;
        out.S[i] = hbar * (theta + two_pi * std::round((target - theta) / two_pi));
    }
    return out;
}

}  // namespace fermi
