#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "fermicurve/grid.hpp"
#include "fermicurve/state.hpp"

namespace fermi {

/// Rectangular (x, p) sampling window, uniform along both axes.
struct PhaseSpaceGrid {
    Grid x;
    Grid p;

    PhaseSpaceGrid(Grid xg, Grid pg) : x(std::move(xg)), p(std::move(pg)) {
        if (x.size() < 8 || p.size() < 8) {
            throw InvalidParameterError("phase-space grid needs at least 8 points per axis");
        }
    }
};

/// W(z) = prefactor * e^{-z^T G z / hbar} for the squeezed Gaussian, with
/// det G = 1 and G positive definite.
struct GaussianWignerForm {
    double prefactor;
    double g11, g12, g22;

    double det() const { return g11 * g22 - g12 * g12; }

    double value(double x, double p, double hbar) const {
        return prefactor * std::exp(-(g11 * x * x + 2.0 * g12 * x * p + g22 * p * p) / hbar);
    }
};

/// Exponent-level comparison of the Gaussian Wigner form against the Fermi
/// quadratic form M: G must equal M/a exactly. The multiplicative constant
/// between the two exponentials (from the -c offset inside g_F) is reported,
/// never asserted.
struct WignerFermiReport {
    double exponent_residual;
    double constant_ratio;
};

/// W(x, p) = (1/2 pi hbar) Int e^{-i p y / hbar} psi(x + y/2) conj(psi(x - y/2)) dy
/// by trapezoid quadrature over a symmetric y window of half-range 1.5x the
/// sampling span, with psi linearly interpolated between samples. Output is
/// row-major in x (index ix * p_count + ip). The imaginary part must cancel to
/// rounding on the symmetric window; a residue above 1e-10 of the peak is an
/// inconsistency error. States that have not decayed below 1e-8 of their peak
/// at the grid edges are rejected with a truncation error.
std::vector<double> wigner_numeric(const SampledWavefunction& psi, const PhaseSpaceGrid& pg,
                                   const PhysicalConstants& constants);

/// G = [[a + b^2/a, b/a], [b/a, 1/a]] and prefactor (pi hbar)^{-1/2} a^{-1/2}:
/// the transform of e^{-(a+ib)x^2/2hbar} taken as written (not normalized).
GaussianWignerForm wigner_gaussian_closed(double a, double b,
                                          const PhysicalConstants& constants);

WignerFermiReport wigner_fermi_relation_check(double a, double b,
                                              const PhysicalConstants& constants);

}  // namespace fermi
