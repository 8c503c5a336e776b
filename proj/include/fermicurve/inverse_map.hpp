#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "fermicurve/fermi_map.hpp"
#include "fermicurve/grid.hpp"
#include "fermicurve/numerics.hpp"
#include "fermicurve/potential.hpp"
#include "fermicurve/state.hpp"

namespace fermi {

/// Everything the curve determines up to gauge: the drift f, the well profile
/// g <= 0, the phase S(x) = integral of f from gauge_x0, and a potential
/// V = g/(2m) + E_ref tabulated over the support and continued quadratically
/// beyond it so that it confines. E_ref only shifts V; V - E_ref is fixed by
/// the curve.
struct CurvePotentialBundle {
    std::vector<double> x;  ///< cosine-clustered abscissae spanning [x_A, x_B]
    std::vector<double> f;
    std::vector<double> g;
    std::vector<double> S;
    Potential V;
    double E_ref;
    double gauge_x0;
};

/// Outcome of testing a curve against the quantization ladder. `n` is set when
/// Area/(2 hbar) - action(E0) lands within `residual_tol` of some n*pi; the
/// residual is that distance, and E0 is the ground energy of the derived well.
struct QuantizationCheck {
    std::optional<int> n;
    double residual;
    double E0;
};

/// Branch midline and gap: f = (p+ + p-)/2, g = -((p+ - p-)/2)^2, evaluated at
/// the curve's own samples. Inverts the branch formulas p = f +- sqrt(-g)
/// exactly.
std::pair<std::vector<double>, std::vector<double>> fg_from_curve(const PhaseCurve& curve);

/// Rebuild the potential and phase data the curve encodes. E_ref (> 0) fixes
/// the additive constant of V; gauge_x0 (inside [x_A, x_B]) anchors S.
CurvePotentialBundle potential_from_curve(const PhaseCurve& curve, double E_ref,
                                          double gauge_x0, const PhysicalConstants& constants);

/// Decide whether the enclosed area sits on the ladder Area/(2 hbar) =
/// action(E0) + n pi for an integer n >= 0. `residual_tol` bounds how far from
/// the ladder the curve may sit and still receive a level assignment.
QuantizationCheck check_quantization(const PhaseCurve& curve, const PhysicalConstants& constants,
                                     const ToleranceConfig& tol = {},
                                     double residual_tol = 1e-3);

/// Rebuild psi = R e^{iS/hbar} on `grid`: S from the curve's drift, R the
/// level-n bound state of the derived potential, n from check_quantization.
/// Throws NotQuantizedError when no level fits and InconsistencyError when the
/// eigensolver cannot reproduce the assigned level or the result fails the
/// operator self-check.
SampledWavefunction reconstruct_wavefunction(const PhaseCurve& curve, double gauge_x0,
                                             const Grid& grid,
                                             const PhysicalConstants& constants,
                                             const ToleranceConfig& tol = {});

}  // namespace fermi
