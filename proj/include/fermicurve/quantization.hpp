#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fermicurve/grid.hpp"
#include "fermicurve/numerics.hpp"
#include "fermicurve/potential.hpp"
#include "fermicurve/state.hpp"

namespace fermi {

/// Classical turning points of a single well at a given energy.
struct TurningPoints {
    double x_A;
    double x_B;
    double energy;
};

/// One evaluation of the node-corrected quantization rule against an eigenstate.
///
/// `action` is the integral of k between the turning points. `maxu_correction`
/// is the integral of chi (chi')^{-1} k' with chi = psi'/psi, evaluated in the
/// regularized form m V' psi psi' / (hbar^2 k (k^2 psi^2 + psi'^2)) so that
/// nodes and extrema of psi cancel instead of dividing by zero. The rule states
/// action - correction = (n_nodes_psi + 1) pi exactly; the plain
/// action = (n_nodes_psi + 1) pi prescription is only approximate, and the two
/// residuals expose the difference.
struct QuantizationReport {
    double energy;
    int n_nodes_psi;         // nodes of psi strictly inside the allowed region
    double action;           // integral of k over [x_A, x_B]
    double maxu_correction;  // integral of chi (chi')^{-1} k'
    double maxu_residual;    // action - correction - (n_nodes_psi + 1) pi
    double wkb_residual;     // action - (n_nodes_psi + 1) pi
};

struct SpectrumLevel {
    int n;
    double energy;
    std::string method;  // "numerov" or "qian_dong"
};

struct Spectrum {
    std::vector<SpectrumLevel> levels;  // n ascending, starting at 0
    double ground_energy;
};

/// Locates the two roots of V(x) = E inside the search domain. Throws
/// NotSingleWellError if V - E does not change sign exactly twice.
TurningPoints find_turning_points(const Potential& V, double energy, Interval search_domain,
                                  const ToleranceConfig& tol = {});

/// (1/hbar) sqrt(2 m |E - V(x)|); both the allowed and the forbidden branch.
double momentum_k(const Potential& V, double energy, const PhysicalConstants& constants,
                  double x);

/// Integral of k between the turning points at this energy. The loop integral
/// of p over the closed phase-plane curve equals 2 hbar times this value.
double action_integral(const Potential& V, double energy, const PhysicalConstants& constants,
                       Interval search_domain, const ToleranceConfig& tol = {});

/// Bound state n of a confining potential: Numerov shooting from both grid
/// edges, matched at the rightmost turning point. Energy is bracketed by
/// node-count bisection, then refined on the two-branch matching determinant.
/// The returned eigenfunction has exactly n interior nodes and unit L2 norm.
std::pair<double, SampledWavefunction> numerov_eigensolve(const Potential& V, int n,
                                                          const Grid& grid,
                                                          const PhysicalConstants& constants,
                                                          const ToleranceConfig& tol = {});

/// Evaluates both quantization residuals for a converged eigenstate psi at
/// energy E. Throws InconsistencyError when the log-derivative of psi fails to
/// decrease somewhere in the allowed region, which signals that psi is not an
/// eigenstate at this energy.
QuantizationReport maxu_rule_evaluate(const SampledWavefunction& psi, const Potential& V,
                                      double energy, const PhysicalConstants& constants);

/// Solves action(E) = N pi, the uncorrected Bohr-Sommerfeld prescription.
double wkb_energy(const Potential& V, int N, const PhysicalConstants& constants,
                  Interval search_domain, const ToleranceConfig& tol = {});

/// Solves action(E_n) = action(E_0) + n pi, anchoring the ladder to the exact
/// ground energy. Exact for the cataloged solvable wells (harmonic, Morse);
/// other potentials are solved the same way but emit an approximation warning.
double qian_dong_solve(const Potential& V, double ground_energy, int n,
                       const PhysicalConstants& constants, Interval search_domain,
                       const ToleranceConfig& tol = {});

/// Ground state from the Numerov eigensolver, then levels 1..n_max from the
/// ground-anchored rule on the same domain.
Spectrum spectrum(const Potential& V, int n_max, const Grid& grid,
                  const PhysicalConstants& constants, const ToleranceConfig& tol = {});

}  // namespace fermi
