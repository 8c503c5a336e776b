#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "fermicurve/fermi_map.hpp"
#include "fermicurve/inverse_map.hpp"
#include "fermicurve/quantization.hpp"
#include "fermicurve/state.hpp"

using namespace fermi;
using cd = std::complex<double>;

namespace {
constexpr double pi = std::numbers::pi;

// Ellipse-shaped curve p = -tilt x +- p_half sqrt(1 - (x/x_half)^2) on
// cosine-clustered abscissae, closed exactly at both ends.
PhaseCurve ellipse_curve(double x_half, double p_half, double tilt = 0.0, std::size_t n = 3001) {
    std::vector<double> xs(n), pp(n), pm(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double theta = pi * static_cast<double>(j) / static_cast<double>(n - 1);
        double x = -x_half * std::cos(theta);
        double root = p_half * std::sqrt(std::max(0.0, 1.0 - (x / x_half) * (x / x_half)));
        if (j == 0 || j + 1 == n) {
            x = (j == 0) ? -x_half : x_half;
            root = 0.0;
        }
        xs[j] = x;
        pp[j] = -tilt * x + root;
        pm[j] = -tilt * x - root;
    }
    return PhaseCurve(-x_half, x_half, std::move(xs), std::move(pp), std::move(pm));
}

// Zero locus of the level-N oscillator: x^2 + p^2 = 2N + 1 (m = omega = 1).
PhaseCurve hermite_ellipse(int N) {
    const double r = std::sqrt(2.0 * N + 1.0);
    return ellipse_curve(r, r);
}

double overlap(const SampledWavefunction& u, const SampledWavefunction& v) {
    REQUIRE(u.grid == v.grid);
    cd ip = 0.0;
    double nu = 0.0, nv = 0.0;
    const std::size_t n = u.grid.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double w = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
        ip += w * std::conj(u.values[i]) * v.values[i];
        nu += w * std::norm(u.values[i]);
        nv += w * std::norm(v.values[i]);
    }
    return std::abs(ip) / std::sqrt(nu * nv);
}

Grid gaussian_grid(double a, std::size_t n = 3001) {
    const double span = 6.0 / std::sqrt(a);
    return Grid(-span, span, n);
}
}  // namespace

TEST_SUITE("inverse.fg") {
    TEST_CASE("circle splits into zero drift and parabolic g") {
        const auto C = ellipse_curve(1.0, 1.0);
        const auto [f, g] = fg_from_curve(C);
        for (std::size_t i = 0; i < C.x.size(); ++i) {
            CHECK(std::abs(f[i]) < 1e-15);
            CHECK(std::abs(g[i] - (C.x[i] * C.x[i] - 1.0)) < 1e-14);
        }
    }

    TEST_CASE("constant momentum shift moves only the drift") {
        auto C = ellipse_curve(1.0, 1.0);
        for (auto& p : C.p_plus) p += 0.7;
        for (auto& p : C.p_minus) p += 0.7;
        const auto [f, g] = fg_from_curve(C);
        for (std::size_t i = 0; i < C.x.size(); ++i) {
            CHECK(f[i] == doctest::Approx(0.7).epsilon(1e-14));
            CHECK(std::abs(g[i] - (C.x[i] * C.x[i] - 1.0)) < 1e-14);
        }
    }

    TEST_CASE("tilted Gaussian ellipse reproduces the closed-form pair") {
        const double a = 1.3, b = -0.8;
        const auto C = ellipse_curve(1.0 / std::sqrt(a), std::sqrt(a), b);
        const auto [f, g] = fg_from_curve(C);
        for (std::size_t i = 0; i < C.x.size(); ++i) {
            const double x = C.x[i];
            CHECK(std::abs(f[i] + b * x) < 1e-13);
            CHECK(std::abs(g[i] - (a * a * x * x - a)) < 1e-13);
        }
    }

    TEST_CASE("branch formulas invert exactly") {
        const auto C = ellipse_curve(1.0 / std::sqrt(1.3), std::sqrt(1.3), -0.8);
        const auto [f, g] = fg_from_curve(C);
        for (std::size_t i = 0; i < C.x.size(); ++i) {
            const double root = std::sqrt(std::max(0.0, -g[i]));
            CHECK(std::abs(f[i] + root - C.p_plus[i]) < 1e-10);
            CHECK(std::abs(f[i] - root - C.p_minus[i]) < 1e-10);
        }
    }

    TEST_CASE("crossed branches are rejected") {
        auto C = ellipse_curve(1.0, 1.0);
        C.p_plus[C.x.size() / 2] = C.p_minus[C.x.size() / 2] - 1.0;
        CHECK_THROWS_AS(fg_from_curve(C), InvalidParameterError);
    }
}

TEST_SUITE("inverse.potential") {
    TEST_CASE("oscillator ellipse rebuilds the harmonic well") {
        const PhysicalConstants pc{};
        const auto C = hermite_ellipse(2);
        const auto B = potential_from_curve(C, 2.5, 0.0, pc);
        CHECK(B.E_ref == 2.5);
        CHECK(B.gauge_x0 == 0.0);
        for (int k = 0; k <= 40; ++k) {
            const double x = C.x_A + (C.x_B - C.x_A) * k / 40.0;
            CHECK(std::abs(B.V(x) - 0.5 * x * x) < 1e-8);
        }
        // zero drift: identically zero phase
        for (std::size_t j = 0; j < B.x.size(); ++j) {
            CHECK(std::abs(B.f[j]) < 1e-12);
            CHECK(std::abs(B.S[j]) < 1e-12);
            CHECK(std::abs(B.g[j] - (B.x[j] * B.x[j] - 5.0)) < 1e-9);
        }
        // the continuation confines
        CHECK(B.V(C.x_B + 1.0) > 2.5);
        CHECK(B.V(C.x_A - 1.0) > 2.5);
        CHECK(B.V(C.x_B + 10.0) > B.V(C.x_B + 5.0));
        CHECK(B.V(C.x_A - 10.0) > B.V(C.x_A - 5.0));
    }

    TEST_CASE("gauge point shifts the phase by a constant") {
        const PhysicalConstants pc{};
        const auto C = ellipse_curve(1.0, 1.0, 2.0);  // drift f = -2x
        const auto B0 = potential_from_curve(C, 1.0, 0.0, pc);
        const auto B1 = potential_from_curve(C, 1.0, 0.5, pc);
        // S0 - S1 = integral of f over [0, 0.5] = -0.25
        for (std::size_t j = 0; j < B0.x.size(); ++j) {
            CHECK(B0.S[j] - B1.S[j] == doctest::Approx(-0.25).epsilon(1e-9));
        }
    }

    TEST_CASE("phase derivative reproduces the drift") {
        const PhysicalConstants pc{};
        const auto C = ellipse_curve(1.0, 1.0, 2.0);
        const auto B = potential_from_curve(C, 1.0, 0.0, pc);
        const CubicSpline sS(B.x, B.S);
        for (int k = 1; k < 20; ++k) {
            const double x = -0.95 + 1.9 * k / 20.0;
            CHECK(std::abs(sS.derivative(x) + 2.0 * x) < 1e-8);
        }
    }

    TEST_CASE("reference energy only shifts the potential") {
        const PhysicalConstants pc{};
        const auto C = hermite_ellipse(2);
        const auto B1 = potential_from_curve(C, 1.0, 0.0, pc);
        const auto B4 = potential_from_curve(C, 4.0, 0.0, pc);
        for (double x : {-2.0, -0.3, 0.0, 1.7, C.x_B + 2.0, C.x_A - 3.0}) {
            CHECK(B4.V(x) - B1.V(x) == doctest::Approx(3.0).epsilon(1e-10));
        }
    }

    TEST_CASE("parameter validation") {
        const PhysicalConstants pc{};
        const auto C = hermite_ellipse(1);
        CHECK_THROWS_AS(potential_from_curve(C, 0.0, 0.0, pc), InvalidParameterError);
        CHECK_THROWS_AS(potential_from_curve(C, -1.0, 0.0, pc), InvalidParameterError);
        CHECK_THROWS_AS(potential_from_curve(C, 1.0, C.x_B + 0.1, pc), InvalidGaugePointError);
    }

    TEST_CASE("flat curve has no confining continuation") {
        const std::size_t n = 9;
        std::vector<double> xs(n), zero(n, 0.0);
        for (std::size_t j = 0; j < n; ++j) xs[j] = -1.0 + 2.0 * j / (n - 1.0);
        const PhaseCurve C(-1.0, 1.0, xs, zero, zero);
        CHECK_THROWS_AS(potential_from_curve(C, 1.0, 0.0, PhysicalConstants{}), ExtensionError);
    }
}

TEST_SUITE("inverse.check") {
    TEST_CASE("level-3 oscillator ellipse lands on the ladder") {
        const auto r = check_quantization(hermite_ellipse(3), PhysicalConstants{});
        REQUIRE(r.n.has_value());
        CHECK(*r.n == 3);
        CHECK(r.residual < 1e-6);
        CHECK(r.E0 == doctest::Approx(0.5).epsilon(1e-6));
    }

    TEST_CASE("half-quantum circle is the ground level") {
        const auto C = ellipse_curve(1.0, 1.0);  // area pi = h/2
        const auto r = check_quantization(C, PhysicalConstants{});
        REQUIRE(r.n.has_value());
        CHECK(*r.n == 0);
        CHECK(r.residual < 1e-6);
        CHECK(r.E0 == doctest::Approx(0.5).epsilon(1e-6));
    }

    TEST_CASE("area 0.3 h sits off the ladder") {
        const double r06 = std::sqrt(0.6);
        const auto C = ellipse_curve(r06, r06);  // area 0.6 pi = 0.3 h
        const auto r = check_quantization(C, PhysicalConstants{});
        CHECK_FALSE(r.n.has_value());
        CHECK(r.residual == doctest::Approx(0.2 * pi).epsilon(1e-4));
        CHECK(r.E0 == doctest::Approx(0.5).epsilon(1e-6));
    }

    TEST_CASE("drift does not change the verdict") {
        const auto C = ellipse_curve(1.0, 1.0, 2.0);  // sheared circle, same area
        const auto r = check_quantization(C, PhysicalConstants{});
        REQUIRE(r.n.has_value());
        CHECK(*r.n == 0);
        CHECK(r.residual < 1e-6);
    }

    TEST_CASE("residual tolerance widens acceptance") {
        const PhysicalConstants pc{};
        const auto C = ellipse_curve(1.0, 0.98);  // shy of the half quantum by 0.01 h
        const auto strict = check_quantization(C, pc);
        CHECK_FALSE(strict.n.has_value());
        const auto loose = check_quantization(C, pc, {}, 0.05);
        REQUIRE(loose.n.has_value());
        CHECK(*loose.n == 0);
        CHECK(loose.residual == doctest::Approx(0.01 * pi).epsilon(1e-4));
    }

    TEST_CASE("invalid residual tolerance is rejected") {
        CHECK_THROWS_AS(check_quantization(hermite_ellipse(1), PhysicalConstants{}, {}, 0.0),
                        InvalidParameterError);
    }
}

TEST_SUITE("inverse.reconstruct") {
    TEST_CASE("oscillator ellipses rebuild the stationary states") {
        const PhysicalConstants pc{};
        const Grid grid(-8.0, 8.0, 3001);
        for (int N = 0; N <= 5; ++N) {
            CAPTURE(N);
            const auto psi = reconstruct_wavefunction(hermite_ellipse(N), 0.0, grid, pc);
            const auto ref = make_hermite_state(N, 1.0, grid, pc);
            CHECK(overlap(psi, ref) > 0.999);
        }
    }

    TEST_CASE("unit circle rebuilds the Gaussian ground state") {
        const PhysicalConstants pc{};
        const Grid grid(-7.0, 7.0, 3001);
        const auto psi = reconstruct_wavefunction(ellipse_curve(1.0, 1.0), 0.0, grid, pc);
        const auto ref = make_squeezed_gaussian(1.0, 0.0, grid, pc);
        CHECK(overlap(psi, ref) > 0.999);
    }

    TEST_CASE("tilted ellipse rebuilds the squeezed Gaussian") {
        const PhysicalConstants pc{};
        const Grid grid(-6.0, 6.0, 3001);
        const auto C = ellipse_curve(1.0, 1.0, 2.0);  // f = -2x over the unit circle
        const auto psi = reconstruct_wavefunction(C, 0.0, grid, pc);
        const auto ref = make_squeezed_gaussian(1.0, 2.0, grid, pc);
        CHECK(overlap(psi, ref) > 0.999);
    }

    TEST_CASE("forward-inverse roundtrip over the Gaussian sweep") {
        const PhysicalConstants pc{};
        for (double a : {0.5, 1.0, 2.0}) {
            for (double b : {-1.0, 0.0, 1.0}) {
                CAPTURE(a);
                CAPTURE(b);
                const Grid grid = gaussian_grid(a);
                const auto psi = make_squeezed_gaussian(a, b, grid, pc);
                const auto C = curve_from_fermi(fermi_from_wavefunction(psi, pc));
                const auto rec = reconstruct_wavefunction(C, 0.0, grid, pc);
                CHECK(overlap(rec, psi) > 0.999);
            }
        }
    }

    TEST_CASE("forward-inverse roundtrip over the oscillator ladder") {
        const PhysicalConstants pc{};
        const Grid grid(-8.0, 8.0, 3001);
        for (int N = 0; N <= 5; ++N) {
            CAPTURE(N);
            const auto psi = make_hermite_state(N, 1.0, grid, pc);
            const auto C = curve_from_fermi(fermi_from_wavefunction(psi, pc));
            const auto rec = reconstruct_wavefunction(C, 0.0, grid, pc);
            CHECK(overlap(rec, psi) > 0.999);
        }
    }

    TEST_CASE("reference energy drops out of the level problem") {
        const PhysicalConstants pc{};
        const auto C = hermite_ellipse(2);
        const Grid grid(-7.0, 7.0, 3001);
        const auto B1 = potential_from_curve(C, 1.0, 0.0, pc);
        const auto B4 = potential_from_curve(C, 4.0, 0.0, pc);
        const auto [e1, r1] = numerov_eigensolve(B1.V, 2, grid, pc);
        const auto [e4, r4] = numerov_eigensolve(B4.V, 2, grid, pc);
        CHECK(e4 - e1 == doctest::Approx(3.0).epsilon(1e-8));
        CHECK(overlap(r1, r4) > 1.0 - 1e-9);
    }

    TEST_CASE("gauge change is a constant phase") {
        const PhysicalConstants pc{};
        const Grid grid(-6.0, 6.0, 3001);
        const auto C = ellipse_curve(1.0, 1.0, 2.0);
        const auto psi0 = reconstruct_wavefunction(C, 0.0, grid, pc);
        const auto psi1 = reconstruct_wavefunction(C, 0.31, grid, pc);
        // psi1 = psi0 exp(-i S0(0.31)) with S0(x) = -x^2 here
        const cd expected = std::exp(cd(0.0, 0.31 * 0.31));
        const double peak = psi0.max_abs();
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (std::abs(psi0.values[i]) < 0.1 * peak) continue;
            CHECK(std::abs(psi1.values[i] - psi0.values[i] * expected) < 1e-8 * peak);
        }
    }

    TEST_CASE("area off the ladder raises") {
        const double r06 = std::sqrt(0.6);
        const Grid grid(-6.0, 6.0, 3001);
        try {
            reconstruct_wavefunction(ellipse_curve(r06, r06), 0.0, grid, PhysicalConstants{});
            FAIL("expected NotQuantizedError");
        } catch (const NotQuantizedError& e) {
            CHECK(e.residual == doctest::Approx(0.2 * pi).epsilon(1e-4));
        }
    }

    TEST_CASE("grid too narrow for the level surfaces as inconsistency") {
        const Grid grid(-2.2, 2.2, 1001);  // support of the level-3 ellipse reaches sqrt(7)
        CHECK_THROWS_AS(
            reconstruct_wavefunction(hermite_ellipse(3), 0.0, grid, PhysicalConstants{}),
            InconsistencyError);
    }
}
