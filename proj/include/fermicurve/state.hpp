#pragma once

#include <complex>
#include <vector>

#include "fermicurve/errors.hpp"
#include "fermicurve/grid.hpp"

namespace fermi {

/// Complex wavefunction sampled on a uniform grid. Normalization is arbitrary:
/// everything downstream is built from ratios that cancel an overall factor.
struct SampledWavefunction {
    Grid grid;
    std::vector<std::complex<double>> values;

    SampledWavefunction(Grid g, std::vector<std::complex<double>> v);

    double max_abs() const;
    /// trapezoid integral of |psi|^2 over the grid
    double norm_squared() const;
};

/// psi = R e^{iS/hbar}. S is continuous on each run where valid_mask holds;
/// where the mask is false, |psi| is below threshold and the phase carries no
/// usable information.
struct PolarDecomposition {
    Grid grid;
    std::vector<double> R;
    std::vector<double> S;
    std::vector<bool> valid_mask;
};

/// Squeezed Gaussian e^{-(a+ib)x^2/2hbar}, sampled as written (not normalized).
SampledWavefunction make_squeezed_gaussian(double a, double b, const Grid& grid,
                                           const PhysicalConstants& constants);

/// Physicists' Hermite polynomial H_N by the three-term recurrence. N <= 50,
/// the documented bound below which the values stay inside double range on the
/// grids used here.
double hermite_polynomial(int N, double x);

/// N-th Hermite function h_N(Q) = (sqrt(pi) 2^N N!)^{-1/2} e^{-Q^2/2} H_N(Q)
/// with Q = sqrt(m omega / hbar) x, sampled over the grid. Unit L2 norm in the
/// Q variable. Emits a warning on stderr when the grid cuts the tails off.
SampledWavefunction make_hermite_state(int N, double omega, const Grid& grid,
                                       const PhysicalConstants& constants);

/// Split psi into R = |psi| and the unwrapped action phase S with
/// S' = hbar Im(psi'/psi), integrated from gauge_x0 and pinned per point to an
/// exact branch of the argument, so R e^{iS/hbar} reproduces psi to rounding.
PolarDecomposition polar_decompose(const SampledWavefunction& psi,
                                   const PhysicalConstants& constants, double gauge_x0);

}  // namespace fermi
