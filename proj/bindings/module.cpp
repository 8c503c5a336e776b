#include <pybind11/complex.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fermicurve/fermi_map.hpp"
#include "fermicurve/inverse_map.hpp"
#include "fermicurve/potential.hpp"
#include "fermicurve/quantization.hpp"
#include "fermicurve/state.hpp"
#include "fermicurve/wigner.hpp"

namespace py = pybind11;

using namespace fermi;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Phase-plane curves of 1D bound states: forward map, quantization "
              "rules, inverse construction, Wigner cross-checks.";
    m.attr("__version__") = "0.1.0";

    // exception translators run newest-first, so register bases before leaves
    auto err = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    auto input_err = py::register_exception<InputError>(m, "InputError", err);
    py::register_exception<InvalidParameterError>(m, "InvalidParameterError", input_err);
    py::register_exception<InsufficientGridError>(m, "InsufficientGridError", err);
    py::register_exception<InsufficientSupportError>(m, "InsufficientSupportError", err);
    py::register_exception<NoCurveError>(m, "NoCurveError", err);
    py::register_exception<MultiWellError>(m, "MultiWellError", err);
    py::register_exception<InconsistencyError>(m, "InconsistencyError", err);
    py::register_exception<NotSingleWellError>(m, "NotSingleWellError", err);
    py::register_exception<NotQuantizedError>(m, "NotQuantizedError", err);
    py::register_exception<TruncationError>(m, "TruncationError", err);

    py::class_<PhysicalConstants>(m, "PhysicalConstants")
        .def(py::init([](double hbar, double mass) {
                 PhysicalConstants pc{hbar, mass};
                 pc.validate();
                 return pc;
             }),
             py::arg("hbar") = 1.0, py::arg("mass") = 1.0)
        .def_readwrite("hbar", &PhysicalConstants::hbar)
        .def_readwrite("mass", &PhysicalConstants::mass)
        .def("__repr__", [](const PhysicalConstants& pc) {
            return "PhysicalConstants(hbar=" + std::to_string(pc.hbar) +
                   ", mass=" + std::to_string(pc.mass) + ")";
        });

    py::class_<ToleranceConfig>(m, "ToleranceConfig")
        .def(py::init([](double abs_tol, double rel_tol, int max_iterations) {
                 ToleranceConfig tol{abs_tol, rel_tol, max_iterations};
                 tol.validate();
                 return tol;
             }),
             py::arg("abs_tol") = 1e-10, py::arg("rel_tol") = 1e-10,
             py::arg("max_iterations") = 200)
        .def_readwrite("abs_tol", &ToleranceConfig::abs_tol)
        .def_readwrite("rel_tol", &ToleranceConfig::rel_tol)
        .def_readwrite("max_iterations", &ToleranceConfig::max_iterations);

    py::class_<Interval>(m, "Interval")
        .def(py::init([](double lo, double hi) { return Interval{lo, hi}; }), py::arg("lo"),
             py::arg("hi"))
        .def_readwrite("lo", &Interval::lo)
        .def_readwrite("hi", &Interval::hi)
        .def("width", &Interval::width)
        .def("midpoint", &Interval::midpoint);

    py::class_<Grid>(m, "Grid")
        .def(py::init<double, double, std::size_t>(), py::arg("x_min"), py::arg("x_max"),
             py::arg("n_points"))
        .def_property_readonly("x_min", &Grid::x_min)
        .def_property_readonly("x_max", &Grid::x_max)
        .def_property_readonly("spacing", &Grid::spacing)
        .def("__len__", &Grid::size)
        .def("points", &Grid::points)
        .def("point", &Grid::point, py::arg("i"))
        .def("nearest_index", &Grid::nearest_index, py::arg("x"))
        .def("contains", &Grid::contains, py::arg("x"))
        .def(py::self == py::self)
        .def("__repr__", [](const Grid& g) {
            return "Grid(" + std::to_string(g.x_min()) + ", " + std::to_string(g.x_max()) +
                   ", " + std::to_string(g.size()) + ")";
        });

    py::class_<SampledWavefunction>(m, "SampledWavefunction")
        .def(py::init<Grid, std::vector<std::complex<double>>>(), py::arg("grid"),
             py::arg("values"))
        .def_readonly("grid", &SampledWavefunction::grid)
        .def_readonly("values", &SampledWavefunction::values)
        .def("max_abs", &SampledWavefunction::max_abs)
        .def("norm_squared", &SampledWavefunction::norm_squared);

    py::class_<PolarDecomposition>(m, "PolarDecomposition")
        .def_readonly("grid", &PolarDecomposition::grid)
        .def_readonly("R", &PolarDecomposition::R)
        .def_readonly("S", &PolarDecomposition::S)
        .def_readonly("valid_mask", &PolarDecomposition::valid_mask);

    m.def("make_squeezed_gaussian", &make_squeezed_gaussian, py::arg("a"), py::arg("b"),
          py::arg("grid"), py::arg("constants") = PhysicalConstants{},
          "Gaussian exp(-(a+ib)x^2/2hbar) sampled as written (not normalized).");
    m.def("make_hermite_state", &make_hermite_state, py::arg("N"), py::arg("omega"),
          py::arg("grid"), py::arg("constants") = PhysicalConstants{},
          "N-th harmonic-oscillator eigenfunction, unit norm in the scaled variable.");
    m.def("hermite_polynomial", &hermite_polynomial, py::arg("N"), py::arg("x"));
    m.def("polar_decompose", &polar_decompose, py::arg("psi"),
          py::arg("constants") = PhysicalConstants{}, py::arg("gauge_x0") = 0.0,
          "Split psi into amplitude R and unwrapped phase S with psi = R exp(iS/hbar).");

    py::class_<FermiFunction>(m, "FermiFunction")
        .def_readonly("grid", &FermiFunction::grid)
        .def_readonly("f", &FermiFunction::f)
        .def_readonly("g", &FermiFunction::g)
        .def_readonly("valid_mask", &FermiFunction::valid_mask);

    py::class_<PhaseCurve>(m, "PhaseCurve")
        .def(py::init<double, double, std::vector<double>, std::vector<double>,
                      std::vector<double>>(),
             py::arg("x_A"), py::arg("x_B"), py::arg("x"), py::arg("p_plus"),
             py::arg("p_minus"))
        .def_readonly("x_A", &PhaseCurve::x_A)
        .def_readonly("x_B", &PhaseCurve::x_B)
        .def_readonly("x", &PhaseCurve::x)
        .def_readonly("p_plus", &PhaseCurve::p_plus)
        .def_readonly("p_minus", &PhaseCurve::p_minus);

    py::class_<Mat2>(m, "Mat2")
        .def(py::init([](double a11, double a12, double a21, double a22) {
                 return Mat2{a11, a12, a21, a22};
             }),
             py::arg("a11"), py::arg("a12"), py::arg("a21"), py::arg("a22"))
        .def_readwrite("a11", &Mat2::a11)
        .def_readwrite("a12", &Mat2::a12)
        .def_readwrite("a21", &Mat2::a21)
        .def_readwrite("a22", &Mat2::a22)
        .def(py::self * py::self)
        .def("__repr__", [](const Mat2& v) {
            return "Mat2(" + std::to_string(v.a11) + ", " + std::to_string(v.a12) + ", " +
                   std::to_string(v.a21) + ", " + std::to_string(v.a22) + ")";
        });
    m.def("transpose", &transpose, py::arg("m"));
    m.def("det", static_cast<double (*)(const Mat2&)>(&det), py::arg("m"));

    py::class_<QuadraticFermiForm>(m, "QuadraticFermiForm")
        .def_readonly("m11", &QuadraticFermiForm::m11)
        .def_readonly("m12", &QuadraticFermiForm::m12)
        .def_readonly("m22", &QuadraticFermiForm::m22)
        .def_readonly("c", &QuadraticFermiForm::c)
        .def("det", &QuadraticFermiForm::det);

    m.def("fermi_from_wavefunction", &fermi_from_wavefunction, py::arg("psi"),
          py::arg("constants") = PhysicalConstants{},
          "f = hbar Im(psi'/psi) and g = hbar^2 Re(psi''/psi) + f^2 on the sampling grid.");
    m.def("verify_fermi_operator", &verify_fermi_operator, py::arg("psi"), py::arg("F"),
          py::arg("constants") = PhysicalConstants{},
          "Residual of [(-i hbar d/dx - f)^2 + g] psi, relative to max|psi|.");
    m.def("curve_from_fermi", &curve_from_fermi, py::arg("F"), py::arg("n_samples") = 2001,
          "Zero locus of (p - f)^2 + g: two branches meeting at the turning points.");
    m.def("curve_area", &curve_area, py::arg("curve"), py::arg("tol") = ToleranceConfig{},
          "Area enclosed by the curve, quadrature cross-checked against the polygon value.");
    m.def("gaussian_fermi_closed_form", &gaussian_fermi_closed_form, py::arg("a"), py::arg("b"),
          py::arg("constants") = PhysicalConstants{});
    m.def("factor_unimodular", &factor_unimodular, py::arg("a"), py::arg("b"),
          "S with det S = 1 and S^T diag(a, a) S equal to the Gaussian quadratic form.");

    py::class_<Potential>(m, "Potential")
        .def_static("harmonic", &Potential::harmonic, py::arg("mass"), py::arg("omega"))
        .def_static("morse", &Potential::morse, py::arg("depth"), py::arg("width"),
                    py::arg("center"))
        .def_static("polynomial", &Potential::polynomial, py::arg("coefficients"))
        .def_static("tabulated",
                    [](const std::vector<double>& xs, const std::vector<double>& vs) {
                        return Potential::tabulated(xs, vs);
                    },
                    py::arg("xs"), py::arg("vs"))
        .def("__call__", &Potential::operator(), py::arg("x"))
        .def("derivative", &Potential::derivative, py::arg("x"));

    py::class_<TurningPoints>(m, "TurningPoints")
        .def_readonly("x_A", &TurningPoints::x_A)
        .def_readonly("x_B", &TurningPoints::x_B)
        .def_readonly("energy", &TurningPoints::energy);

    py::class_<QuantizationReport>(m, "QuantizationReport")
        .def_readonly("energy", &QuantizationReport::energy)
        .def_readonly("n_nodes_psi", &QuantizationReport::n_nodes_psi)
        .def_readonly("action", &QuantizationReport::action)
        .def_readonly("maxu_correction", &QuantizationReport::maxu_correction)
        .def_readonly("maxu_residual", &QuantizationReport::maxu_residual)
        .def_readonly("wkb_residual", &QuantizationReport::wkb_residual);

    py::class_<SpectrumLevel>(m, "SpectrumLevel")
        .def_readonly("n", &SpectrumLevel::n)
        .def_readonly("energy", &SpectrumLevel::energy)
        .def_readonly("method", &SpectrumLevel::method);

    py::class_<Spectrum>(m, "Spectrum")
        .def_readonly("levels", &Spectrum::levels)
        .def_readonly("ground_energy", &Spectrum::ground_energy);

    m.def("find_turning_points", &find_turning_points, py::arg("V"), py::arg("energy"),
          py::arg("search_domain"), py::arg("tol") = ToleranceConfig{});
    m.def("momentum_k", &momentum_k, py::arg("V"), py::arg("energy"), py::arg("constants"),
          py::arg("x"));
    m.def("action_integral", &action_integral, py::arg("V"), py::arg("energy"),
          py::arg("constants"), py::arg("search_domain"), py::arg("tol") = ToleranceConfig{},
          "Integral of k between the turning points at this energy.");
    m.def("numerov_eigensolve", &numerov_eigensolve, py::arg("V"), py::arg("n"), py::arg("grid"),
          py::arg("constants") = PhysicalConstants{}, py::arg("tol") = ToleranceConfig{},
          "Level-n bound state by two-sided shooting; returns (energy, wavefunction).");
    m.def("maxu_rule_evaluate", &maxu_rule_evaluate, py::arg("psi"), py::arg("V"),
          py::arg("energy"), py::arg("constants") = PhysicalConstants{},
          "Node-corrected and plain quantization residuals for a converged eigenstate.");
    m.def("wkb_energy", &wkb_energy, py::arg("V"), py::arg("N"), py::arg("constants"),
          py::arg("search_domain"), py::arg("tol") = ToleranceConfig{});
    m.def("qian_dong_solve", &qian_dong_solve, py::arg("V"), py::arg("ground_energy"),
          py::arg("n"), py::arg("constants"), py::arg("search_domain"),
          py::arg("tol") = ToleranceConfig{},
          "Solve action(E_n) = action(E_0) + n pi, anchored to the exact ground energy.");
    m.def("spectrum", &spectrum, py::arg("V"), py::arg("n_max"), py::arg("grid"),
          py::arg("constants") = PhysicalConstants{}, py::arg("tol") = ToleranceConfig{},
          "Ground level from the eigensolver, levels 1..n_max from the anchored rule.");

    py::class_<CurvePotentialBundle>(m, "CurvePotentialBundle")
        .def_readonly("x", &CurvePotentialBundle::x)
        .def_readonly("f", &CurvePotentialBundle::f)
        .def_readonly("g", &CurvePotentialBundle::g)
        .def_readonly("S", &CurvePotentialBundle::S)
        .def_readonly("V", &CurvePotentialBundle::V)
        .def_readonly("E_ref", &CurvePotentialBundle::E_ref)
        .def_readonly("gauge_x0", &CurvePotentialBundle::gauge_x0);

    py::class_<QuantizationCheck>(m, "QuantizationCheck")
        .def_readonly("n", &QuantizationCheck::n)
        .def_readonly("residual", &QuantizationCheck::residual)
        .def_readonly("E0", &QuantizationCheck::E0);

    m.def("fg_from_curve", &fg_from_curve, py::arg("curve"),
          "Branch midline and gap: f = (p+ + p-)/2, g = -((p+ - p-)/2)^2.");
    m.def("potential_from_curve", &potential_from_curve, py::arg("curve"), py::arg("E_ref"),
          py::arg("gauge_x0"), py::arg("constants") = PhysicalConstants{},
          "Potential, drift and phase encoded by the curve; E_ref fixes the offset of V.");
    m.def("check_quantization", &check_quantization, py::arg("curve"),
          py::arg("constants") = PhysicalConstants{}, py::arg("tol") = ToleranceConfig{},
          py::arg("residual_tol") = 1e-3,
          "Test whether the enclosed area sits on the ladder area/(2 hbar) = action(E0) + n pi.");
    m.def("reconstruct_wavefunction", &reconstruct_wavefunction, py::arg("curve"),
          py::arg("gauge_x0"), py::arg("grid"), py::arg("constants") = PhysicalConstants{},
          py::arg("tol") = ToleranceConfig{},
          "Rebuild psi = R exp(iS/hbar) from the curve on the given grid.");

    py::class_<PhaseSpaceGrid>(m, "PhaseSpaceGrid")
        .def(py::init<Grid, Grid>(), py::arg("x"), py::arg("p"))
        .def_readonly("x", &PhaseSpaceGrid::x)
        .def_readonly("p", &PhaseSpaceGrid::p);

    py::class_<GaussianWignerForm>(m, "GaussianWignerForm")
        .def_readonly("prefactor", &GaussianWignerForm::prefactor)
        .def_readonly("g11", &GaussianWignerForm::g11)
        .def_readonly("g12", &GaussianWignerForm::g12)
        .def_readonly("g22", &GaussianWignerForm::g22)
        .def("det", &GaussianWignerForm::det)
        .def("value", &GaussianWignerForm::value, py::arg("x"), py::arg("p"), py::arg("hbar"));

    py::class_<WignerFermiReport>(m, "WignerFermiReport")
        .def_readonly("exponent_residual", &WignerFermiReport::exponent_residual)
        .def_readonly("constant_ratio", &WignerFermiReport::constant_ratio);

    m.def("wigner_numeric", &wigner_numeric, py::arg("psi"), py::arg("phase_space_grid"),
          py::arg("constants") = PhysicalConstants{},
          "Wigner transform by quadrature; row-major in x (index ix * p_count + ip).");
    m.def("wigner_gaussian_closed", &wigner_gaussian_closed, py::arg("a"), py::arg("b"),
          py::arg("constants") = PhysicalConstants{});
    m.def("wigner_fermi_relation_check", &wigner_fermi_relation_check, py::arg("a"),
          py::arg("b"), py::arg("constants") = PhysicalConstants{},
          "Exponent-level comparison of the Gaussian Wigner form against the curve form.");
}
