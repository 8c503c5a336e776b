#pragma once

#include <vector>

#include "fermicurve/grid.hpp"
#include "fermicurve/numerics.hpp"
#include "fermicurve/state.hpp"

namespace fermi {

/// The pair (f, g) defining g_F(x, p) = (p - f(x))^2 + g(x) on the sampling
/// grid: f = S' and g = hbar^2 R''/R. Points where |psi| was too small for the
/// ratio formulas carry extrapolated values and a false valid_mask entry.
struct FermiFunction {
    Grid grid;
    std::vector<double> f;
    std::vector<double> g;
    std::vector<bool> valid_mask;
};

/// The closed zero-locus of g_F: two momentum branches over [x_A, x_B] that
/// meet at both ends.
struct PhaseCurve {
    double x_A;
    double x_B;
    std::vector<double> x;
    std::vector<double> p_plus;
    std::vector<double> p_minus;

    PhaseCurve(double xa, double xb, std::vector<double> xs, std::vector<double> pp,
               std::vector<double> pm);
};

struct Mat2 {
    double a11, a12, a21, a22;
};

Mat2 operator*(const Mat2& a, const Mat2& b);
Mat2 transpose(const Mat2& m);
double det(const Mat2& m);

/// g_F of a squeezed Gaussian as the quadratic form z^T M z - c with
/// z = (x, p): M = [[a^2+b^2, b], [b, 1]], c = a hbar.
struct QuadraticFermiForm {
    double m11, m12, m22, c;

    double det() const { return m11 * m22 - m12 * m12; }
};

/// f = hbar Im(psi'/psi) and g = hbar^2 Re(psi''/psi) + f^2. The complex-ratio
/// route keeps both smooth where |psi| does not vanish; near-node points are
/// masked and infilled by one-sided rational extrapolation.
FermiFunction fermi_from_wavefunction(const SampledWavefunction& psi,
                                      const PhysicalConstants& constants);

/// Max over interior valid points of |[(-i hbar d/dx - f)^2 + g] psi| / max|psi|.
double verify_fermi_operator(const SampledWavefunction& psi, const FermiFunction& F,
                             const PhysicalConstants& constants);

/// Locate the single interval where g <= 0 and sample p = f +- sqrt(-g) on a
/// cosine-clustered set of abscissae (denser near the endpoints, where the
/// branches meet with square-root behaviour).
PhaseCurve curve_from_fermi(const FermiFunction& F, std::size_t n_samples = 2001);

/// Enclosed area by quadrature of the branch separation, cross-checked against
/// the polygon (shoelace) value; disagreement beyond max(1e-6, abs_tol) of the
/// area scale is an inconsistency error.
double curve_area(const PhaseCurve& curve, const ToleranceConfig& tol = {});

QuadraticFermiForm gaussian_fermi_closed_form(double a, double b,
                                              const PhysicalConstants& constants);

/// S = [[sqrt(a), 0], [b/sqrt(a), 1/sqrt(a)]]: det S = 1 and S^T diag(a,a) S
/// reproduces the Gaussian quadratic form matrix.
Mat2 factor_unimodular(double a, double b);

}  // namespace fermi
