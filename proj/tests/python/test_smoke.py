import math

import numpy as np
import pytest

import fermicurve as fc

HBAR = 1.0
H = 2.0 * math.pi * HBAR  # Planck constant for hbar = 1


def gaussian_grid(a, n=2001):
    half = 7.0 * math.sqrt(HBAR / a)
    return fc.Grid(-half, half, n)


def test_gaussian_curve_encloses_half_h():
    for a, b in [(1.0, 0.0), (2.0, 1.0), (0.5, -2.0)]:
        psi = fc.make_squeezed_gaussian(a, b, gaussian_grid(a))
        curve = fc.curve_from_fermi(fc.fermi_from_wavefunction(psi))
        assert fc.curve_area(curve) == pytest.approx(H / 2, abs=1e-6 * H)


def test_gaussian_closed_form_and_factorization():
    form = fc.gaussian_fermi_closed_form(2.0, 1.0)
    assert form.m11 == pytest.approx(5.0)
    assert form.m12 == pytest.approx(1.0)
    assert form.m22 == pytest.approx(1.0)
    assert form.c == pytest.approx(2.0 * HBAR)
    assert form.det() == pytest.approx(4.0, abs=1e-12)
    S = fc.factor_unimodular(2.0, 1.0)
    assert fc.det(S) == pytest.approx(1.0, abs=1e-12)
    D = fc.Mat2(2.0, 0.0, 0.0, 2.0)
    M = fc.transpose(S) * D * S
    assert M.a11 == pytest.approx(form.m11, abs=1e-12)
    assert M.a12 == pytest.approx(form.m12, abs=1e-12)
    assert M.a22 == pytest.approx(form.m22, abs=1e-12)


def test_hermite_curve_area_on_the_ladder():
    psi = fc.make_hermite_state(3, 1.0, fc.Grid(-9.0, 9.0, 3001))
    curve = fc.curve_from_fermi(fc.fermi_from_wavefunction(psi))
    assert fc.curve_area(curve) == pytest.approx(3.5 * H, abs=1e-6 * H)


def test_inverse_roundtrip_recovers_the_state():
    grid = fc.Grid(-8.0, 8.0, 3001)
    psi = fc.make_hermite_state(1, 1.0, grid)
    curve = fc.curve_from_fermi(fc.fermi_from_wavefunction(psi))

    check = fc.check_quantization(curve)
    assert check.n == 1
    assert abs(check.residual) < 1e-3
    assert check.E0 == pytest.approx(0.5, abs=5e-3)

    bundle = fc.potential_from_curve(curve, E_ref=1.5, gauge_x0=0.0)
    assert bundle.V(1.0) - bundle.V(0.0) == pytest.approx(0.5, abs=1e-3)

    rec = fc.reconstruct_wavefunction(curve, 0.0, grid)
    u = np.asarray(psi.values)
    v = np.asarray(rec.values)
    overlap = abs(np.vdot(u, v)) / (np.linalg.norm(u) * np.linalg.norm(v))
    assert overlap > 0.999


def test_harmonic_spectrum():
    V = fc.Potential.harmonic(1.0, 1.0)
    spec = fc.spectrum(V, 3, fc.Grid(-10.0, 10.0, 2001))
    assert spec.ground_energy == pytest.approx(0.5, abs=1e-6)
    for level in spec.levels:
        assert level.energy == pytest.approx(level.n + 0.5, abs=1e-6)
    assert [level.method for level in spec.levels] == ["numerov"] + ["qian_dong"] * 3


def test_quantization_report_residuals():
    V = fc.Potential.harmonic(1.0, 1.0)
    energy, psi = fc.numerov_eigensolve(V, 2, fc.Grid(-10.0, 10.0, 2001))
    report = fc.maxu_rule_evaluate(psi, V, energy)
    assert report.n_nodes_psi == 2
    assert abs(report.maxu_residual) < 1e-3
    assert report.wkb_residual == pytest.approx(-math.pi / 2, abs=1e-3)


def test_wigner_matches_closed_form():
    psi = fc.make_squeezed_gaussian(1.0, 0.0, fc.Grid(-7.0, 7.0, 4001))
    pg = fc.PhaseSpaceGrid(fc.Grid(-3.0, 3.0, 31), fc.Grid(-3.0, 3.0, 31))
    W = fc.wigner_numeric(psi, pg)
    closed = fc.wigner_gaussian_closed(1.0, 0.0)
    assert closed.det() == pytest.approx(1.0, abs=1e-12)
    xs, ps = pg.x.points(), pg.p.points()
    worst = max(
        abs(W[i * len(ps) + j] - closed.value(xs[i], ps[j], HBAR))
        for i in range(len(xs))
        for j in range(len(ps))
    )
    assert worst < 1e-4


def test_error_mapping():
    with pytest.raises(fc.InputError):
        fc.Grid(1.0, -1.0, 101)
    with pytest.raises(fc.Error):
        fc.Grid(0.0, 1.0, 2)

    k, grid = 2.0, fc.Grid(-8.0, 8.0, 2001)
    plane_wave = fc.SampledWavefunction(
        grid, [complex(math.cos(k * x), math.sin(k * x)) for x in grid.points()]
    )
    with pytest.raises(fc.NoCurveError):
        fc.curve_from_fermi(fc.fermi_from_wavefunction(plane_wave))

    cramped = fc.make_squeezed_gaussian(1.0, 0.0, fc.Grid(-2.0, 2.0, 801))
    with pytest.raises(fc.TruncationError):
        fc.wigner_numeric(cramped, fc.PhaseSpaceGrid(fc.Grid(-1.0, 1.0, 9), fc.Grid(-1.0, 1.0, 9)))
