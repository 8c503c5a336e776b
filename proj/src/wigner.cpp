#include "fermicurve/wigner.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <sstream>
#include <vector>

#include "fermicurve/errors.hpp"
#include "fermicurve/fermi_map.hpp"

namespace fermi {

namespace {
using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;
}  // namespace

std::vector<double> wigner_numeric(const SampledWavefunction& psi, const PhaseSpaceGrid& pg,
                                   const PhysicalConstants& constants) {
    constants.validate();
    const Grid& xg = psi.grid;
    const double peak = psi.max_abs();
    if (!(peak > 0.0)) throw DegenerateInputError("wigner_numeric: wavefunction is zero");
    if (std::abs(psi.values.front()) > 1e-8 * peak ||
        std::abs(psi.values.back()) > 1e-8 * peak) {
        throw TruncationError(
            "wigner_numeric: |psi| exceeds 1e-8 of its peak at the grid edges");
    }

    const double hbar = constants.hbar;
    const double dy = xg.spacing();
    const double half_range = 1.5 * (xg.x_max() - xg.x_min());
    const auto half_steps = static_cast<std::ptrdiff_t>(std::ceil(half_range / dy));
    const std::size_t n_y = static_cast<std::size_t>(2 * half_steps + 1);

    // linear interpolation; identically zero beyond the sampled window, where
    // the decay precondition has already made psi negligible
    const auto psi_at = [&](double x) -> cd {
        if (x <= xg.x_min() || x >= xg.x_max()) return {};
        const double t = (x - xg.x_min()) / dy;
        const auto i = static_cast<std::size_t>(t);
        const double frac = t - static_cast<double>(i);
        return psi.values[i] * (1.0 - frac) + psi.values[i + 1] * frac;
    };

    const std::size_t nx = pg.x.size(), np = pg.p.size();
    std::vector<double> out(nx * np);
    std::vector<cd> prod(n_y);
    double max_w = 0.0, max_im = 0.0;
    for (std::size_t ix = 0; ix < nx; ++ix) {
        const double x = pg.x.point(ix);
        for (std::size_t k = 0; k < n_y; ++k) {
            const double y = dy * static_cast<double>(static_cast<std::ptrdiff_t>(k) - half_steps);
            prod[k] = psi_at(x + 0.5 * y) * std::conj(psi_at(x - 0.5 * y));
        }
        for (std::size_t ip = 0; ip < np; ++ip) {
            const double p = pg.p.point(ip);
            // e^{-i p y / hbar} advanced by one rotation per y step; the
            // accumulated rounding drift over the window stays ~1e-12
            const cd rot = std::polar(1.0, -p * dy / hbar);
            cd phase = std::polar(1.0, p * dy * static_cast<double>(half_steps) / hbar);
            cd acc = 0.0;
            for (std::size_t k = 0; k < n_y; ++k) {
                const double w = (k == 0 || k + 1 == n_y) ? 0.5 : 1.0;
                acc += w * phase * prod[k];
                phase *= rot;
            }
            acc *= dy / (2.0 * kPi * hbar);
            out[ix * np + ip] = acc.real();
            max_w = std::max(max_w, std::abs(acc.real()));
            max_im = std::max(max_im, std::abs(acc.imag()));
        }
    }
    if (max_im > 1e-10 * std::max(1.0, max_w)) {
        std::ostringstream msg;
        msg << "wigner_numeric: imaginary residue " << max_im << " with peak " << max_w;
        throw InconsistencyError(msg.str());
    }
    return out;
}

GaussianWignerForm wigner_gaussian_closed(double a, double b,
                                          const PhysicalConstants& constants) {
    constants.validate();
    if (!(a > 0.0)) throw InvalidParameterError("wigner_gaussian_closed: requires a > 0");
    return {1.0 / std::sqrt(kPi * constants.hbar * a), a + b * b / a, b / a, 1.0 / a};
}

WignerFermiReport wigner_fermi_relation_check(double a, double b,
                                              const PhysicalConstants& constants) {
    const GaussianWignerForm G = wigner_gaussian_closed(a, b, constants);
    const QuadraticFermiForm M = gaussian_fermi_closed_form(a, b, constants);
    double worst = 0.0;
    for (int i = -10; i <= 10; ++i) {
        for (int j = -10; j <= 10; ++j) {
            const double x = 0.2 * i, p = 0.2 * j;
            const double qg = G.g11 * x * x + 2.0 * G.g12 * x * p + G.g22 * p * p;
            const double qm = (M.m11 * x * x + 2.0 * M.m12 * x * p + M.m22 * p * p) / a;
            worst = std::max(worst, std::abs(qg - qm));
        }
    }
    return {worst, std::exp(M.c / (a * constants.hbar))};
}

}  // namespace fermi
