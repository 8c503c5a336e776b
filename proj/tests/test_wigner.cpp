#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "fermicurve/fermi_map.hpp"
#include "fermicurve/state.hpp"
#include "fermicurve/wigner.hpp"

using namespace fermi;
using cd = std::complex<double>;

namespace {
constexpr double pi = std::numbers::pi;

Grid psi_grid() { return Grid(-7.0, 7.0, 8001); }

// the N = 3 state only drops below the decay threshold past |x| = 7
Grid hermite_grid() { return Grid(-8.0, 8.0, 9001); }

double mass2d(const std::vector<double>& w, const PhaseSpaceGrid& pg) {
    const std::size_t nx = pg.x.size(), np = pg.p.size();
    double acc = 0.0;
    for (std::size_t ix = 0; ix < nx; ++ix) {
        const double wx = (ix == 0 || ix + 1 == nx) ? 0.5 : 1.0;
        for (std::size_t ip = 0; ip < np; ++ip) {
            const double wp = (ip == 0 || ip + 1 == np) ? 0.5 : 1.0;
            acc += wx * wp * w[ix * np + ip];
        }
    }
    return acc * pg.x.spacing() * pg.p.spacing();
}
}  // namespace

TEST_SUITE("wigner.closed") {
    TEST_CASE("round gaussian gives the identity form") {
        const auto W = wigner_gaussian_closed(1.0, 0.0, PhysicalConstants{});
        CHECK(W.g11 == 1.0);
        CHECK(W.g12 == 0.0);
        CHECK(W.g22 == 1.0);
        CHECK(W.prefactor == doctest::Approx(1.0 / std::sqrt(pi)).epsilon(1e-14));
    }

    TEST_CASE("squeezed tilted example") {
        const auto W = wigner_gaussian_closed(2.0, 1.0, PhysicalConstants{});
        CHECK(W.g11 == doctest::Approx(2.5).epsilon(1e-14));
        CHECK(W.g12 == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(W.g22 == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(W.det() == doctest::Approx(1.0).epsilon(1e-12));
    }

    TEST_CASE("form factors through the unimodular matrix") {
        const auto W = wigner_gaussian_closed(4.0, 2.0, PhysicalConstants{});
        const Mat2 S = factor_unimodular(4.0, 2.0);
        const Mat2 StS = transpose(S) * S;
        CHECK(std::abs(StS.a11 - W.g11) < 1e-12);
        CHECK(std::abs(StS.a12 - W.g12) < 1e-12);
        CHECK(std::abs(StS.a21 - W.g12) < 1e-12);
        CHECK(std::abs(StS.a22 - W.g22) < 1e-12);
    }

    TEST_CASE("unit determinant and positivity across the parameter sweep") {
        for (double a : {0.5, 1.0, 2.0, 4.0, 8.0}) {
            for (double b : {-2.0, -1.0, 0.0, 1.0, 3.0}) {
                CAPTURE(a);
                CAPTURE(b);
                const auto W = wigner_gaussian_closed(a, b, PhysicalConstants{});
                CHECK(std::abs(W.det() - 1.0) < 1e-12);
                CHECK(W.g11 > 0.0);
                CHECK(W.g22 > 0.0);
            }
        }
    }

    TEST_CASE("prefactor tracks hbar") {
        const PhysicalConstants pc{0.5, 1.0};
        const auto W = wigner_gaussian_closed(2.0, 0.0, pc);
        CHECK(W.prefactor == doctest::Approx(1.0 / std::sqrt(pi)).epsilon(1e-14));
        CHECK(W.value(0.0, 0.0, pc.hbar) == doctest::Approx(W.prefactor).epsilon(1e-14));
    }

    TEST_CASE("flat or inverted width is rejected") {
        CHECK_THROWS_AS(wigner_gaussian_closed(0.0, 1.0, PhysicalConstants{}),
                        InvalidParameterError);
        CHECK_THROWS_AS(wigner_gaussian_closed(-1.0, 0.0, PhysicalConstants{}),
                        InvalidParameterError);
    }
}

TEST_SUITE("wigner.numeric") {
    TEST_CASE("round gaussian at the origin") {
        const PhysicalConstants pc{};
        const auto psi = make_squeezed_gaussian(1.0, 0.0, psi_grid(), pc);
        const PhaseSpaceGrid pg(Grid(-1.0, 1.0, 9), Grid(-1.0, 1.0, 9));
        const auto w = wigner_numeric(psi, pg, pc);
        CHECK(w[4 * 9 + 4] == doctest::Approx(1.0 / std::sqrt(pi)).epsilon(1e-6));
    }

    TEST_CASE("momentum marginal recovers the density") {
        const PhysicalConstants pc{};
        const PhaseSpaceGrid pg(Grid(-2.0, 2.0, 9), Grid(-7.0, 7.0, 201));
        for (double b : {0.0, 0.8}) {
            CAPTURE(b);
            const auto psi = make_squeezed_gaussian(1.0, b, psi_grid(), pc);
            const auto w = wigner_numeric(psi, pg, pc);
            for (std::size_t ix = 0; ix < pg.x.size(); ++ix) {
                const double x = pg.x.point(ix);
                double marginal = 0.0;
                for (std::size_t ip = 0; ip < pg.p.size(); ++ip) {
                    const double wp = (ip == 0 || ip + 1 == pg.p.size()) ? 0.5 : 1.0;
                    marginal += wp * w[ix * pg.p.size() + ip];
                }
                marginal *= pg.p.spacing();
                CHECK(marginal == doctest::Approx(std::exp(-x * x)).epsilon(1e-6));
            }
        }
    }

    TEST_CASE("total mass equals the squared norm") {
        const PhysicalConstants pc{};
        const auto psi = make_squeezed_gaussian(1.0, 0.0, psi_grid(), pc);
        const PhaseSpaceGrid pg(Grid(-5.0, 5.0, 81), Grid(-5.0, 5.0, 81));
        const auto w = wigner_numeric(psi, pg, pc);
        CHECK(mass2d(w, pg) == doctest::Approx(psi.norm_squared()).epsilon(1e-6));
        CHECK(mass2d(w, pg) == doctest::Approx(std::sqrt(pi)).epsilon(1e-6));
    }

    TEST_CASE("total mass for the oscillator states") {
        const PhysicalConstants pc{};
        const PhaseSpaceGrid pg(Grid(-6.0, 6.0, 49), Grid(-6.0, 6.0, 49));
        for (int N = 1; N <= 3; ++N) {
            CAPTURE(N);
            const auto psi = make_hermite_state(N, 1.0, hermite_grid(), pc);
            const auto w = wigner_numeric(psi, pg, pc);
            CHECK(mass2d(w, pg) == doctest::Approx(psi.norm_squared()).epsilon(1e-6));
        }
    }

    TEST_CASE("oscillator states alternate sign at the origin") {
        const PhysicalConstants pc{};
        const PhaseSpaceGrid pg(Grid(-0.5, 0.5, 9), Grid(-0.5, 0.5, 9));
        for (int N = 0; N <= 3; ++N) {
            CAPTURE(N);
            const auto psi = make_hermite_state(N, 1.0, hermite_grid(), pc);
            const auto w = wigner_numeric(psi, pg, pc);
            const double origin = w[4 * 9 + 4];
            const double expected = ((N % 2 == 0) ? 1.0 : -1.0) / pi;
            CHECK(origin == doctest::Approx(expected).epsilon(1e-5));
        }
    }

    TEST_CASE("excited states go negative somewhere") {
        const PhysicalConstants pc{};
        const PhaseSpaceGrid pg(Grid(-3.0, 3.0, 25), Grid(-3.0, 3.0, 25));
        for (int N = 1; N <= 3; ++N) {
            CAPTURE(N);
            const auto psi = make_hermite_state(N, 1.0, hermite_grid(), pc);
            const auto w = wigner_numeric(psi, pg, pc);
            CHECK(*std::min_element(w.begin(), w.end()) < 0.0);
        }
    }

    TEST_CASE("scales as the squared amplitude") {
        const PhysicalConstants pc{};
        const Grid grid = psi_grid();
        const auto psi = make_squeezed_gaussian(1.0, 0.5, grid, pc);
        std::vector<cd> doubled(psi.values);
        for (auto& z : doubled) z *= 2.0;
        const PhaseSpaceGrid pg(Grid(-1.0, 1.0, 9), Grid(-1.0, 1.0, 9));
        const auto w1 = wigner_numeric(psi, pg, pc);
        const auto w2 = wigner_numeric(SampledWavefunction(grid, std::move(doubled)), pg, pc);
        for (std::size_t i = 0; i < w1.size(); ++i) {
            CHECK(w2[i] == doctest::Approx(4.0 * w1[i]).epsilon(1e-12));
        }
    }

    TEST_CASE("undecayed edges are rejected") {
        const PhysicalConstants pc{};
        const auto psi = make_squeezed_gaussian(0.05, 0.0, Grid(-7.0, 7.0, 2001), pc);
        const PhaseSpaceGrid pg(Grid(-1.0, 1.0, 9), Grid(-1.0, 1.0, 9));
        CHECK_THROWS_AS(wigner_numeric(psi, pg, pc), TruncationError);
    }


    TEST_CASE("phase-space grid validation") {
        CHECK_THROWS_AS(PhaseSpaceGrid(Grid(-1.0, 1.0, 7), Grid(-1.0, 1.0, 9)),
                        InvalidParameterError);
        CHECK_THROWS_AS(PhaseSpaceGrid(Grid(-1.0, 1.0, 9), Grid(-1.0, 1.0, 5)),
                        InvalidParameterError);
    }
}

TEST_SUITE("wigner.relation") {
    TEST_CASE("identity case") {
        const auto r = wigner_fermi_relation_check(1.0, 0.0, PhysicalConstants{});
        CHECK(r.exponent_residual < 1e-14);
        CHECK(r.constant_ratio == doctest::Approx(std::exp(1.0)).epsilon(1e-12));
    }

    TEST_CASE("squeezed tilted case") {
        const auto r = wigner_fermi_relation_check(2.0, 1.0, PhysicalConstants{});
        CHECK(r.exponent_residual < 1e-12);
        CHECK(r.constant_ratio == doctest::Approx(std::exp(1.0)).epsilon(1e-12));
    }

    TEST_CASE("exponents agree across the sweep") {
        for (double a : {0.5, 1.0, 2.0, 4.0, 8.0}) {
            for (double b : {-2.0, -1.0, 0.0, 1.0, 3.0}) {
                CAPTURE(a);
                CAPTURE(b);
                CHECK(wigner_fermi_relation_check(a, b, PhysicalConstants{}).exponent_residual <
                      1e-12);
            }
        }
    }

    TEST_CASE("numeric transform matches the closed form pointwise") {
        const PhysicalConstants pc{};
        const PhaseSpaceGrid pg(Grid(-4.0, 4.0, 33), Grid(-4.0, 4.0, 33));
        const struct { double a, b; } cases[] = {{1.0, 0.0}, {1.0, 0.5}, {2.0, -1.0}};
        for (const auto& c : cases) {
            CAPTURE(c.a);
            CAPTURE(c.b);
            const auto psi = make_squeezed_gaussian(c.a, c.b, psi_grid(), pc);
            const auto w = wigner_numeric(psi, pg, pc);
            const auto closed = wigner_gaussian_closed(c.a, c.b, pc);
            double worst = 0.0;
            for (std::size_t ix = 0; ix < pg.x.size(); ++ix) {
                for (std::size_t ip = 0; ip < pg.p.size(); ++ip) {
                    const double ref = closed.value(pg.x.point(ix), pg.p.point(ip), pc.hbar);
                    worst = std::max(worst, std::abs(w[ix * pg.p.size() + ip] - ref));
                }
            }
            CHECK(worst < 1e-6);
        }
    }
}
