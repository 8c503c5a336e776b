#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fermicurve/fermi_map.hpp"
#include "fermicurve/inverse_map.hpp"
#include "fermicurve/io.hpp"
#include "fermicurve/quantization.hpp"
#include "fermicurve/state.hpp"
#include "fermicurve/wigner.hpp"

namespace fs = std::filesystem;
using namespace fermi;

namespace {

constexpr double kPi = 3.14159265358979323846;

constexpr const char* kFormatDocs = R"(fermicurve file formats

All CSV files are comma-separated with a mandatory header row. Blank lines
and lines starting with '#' are skipped. Every floating-point value is
written with 17 significant digits ("%.17g"), so identical runs produce
byte-identical files.

CSV files
  wavefunction   header x,re,im            psi sampled on a uniform grid
  potential      header x,V                tabulated potential, strictly increasing x
  phase curve    header x,p_plus,p_minus   upper/lower momentum branches over [x_A, x_B]
  spectrum       header n,E,method         method is "numerov" or "qian_dong"
  wigner         header x,p,W              row-major in x (p varies fastest)

JSON reports (written into --output-dir, primary report echoed to stdout)
  forward.json        {"area", "area_over_h", "x_A", "x_B"}
  inverse.json        {"n", "E", "E0", "residual"[, "overlap_oracle"]}
                      n and E are null when the curve is off the ladder (exit 3)
  spectrum.json       {"ground_energy", "levels": [{"n", "E", "method"[, "delta"]}]
                      [, "oracle_max_abs_delta"]}
  verify.json         {"energy", "n_nodes_psi", "action", "maxu_correction",
                       "maxu_residual", "wkb_residual"}
  wigner.json         {"hbar", "norm", "min_w"}
  wigner_closed.json  {"max_abs_dev", "det_G"}   (gaussian states only)

On failure stdout carries {"error": {"type", "message"[, "residual"]}}.

Exit codes
  0  success
  1  bad input (flags, files, malformed CSV)
  2  domain failure (degenerate curve, non-confining potential, truncated tails)
  3  curve fails the quantization check
)";

struct CommonOptions {
    PhysicalConstants constants{};
    double grid_min = -8.0;
    double grid_max = 8.0;
    std::size_t grid_points = 2001;
    ToleranceConfig tol{};
    std::string output_dir = ".";
    bool grid_explicit = false;

    Grid grid() const { return {grid_min, grid_max, grid_points}; }
};

fs::path out_file(const CommonOptions& opt, const std::string& name) {
    const fs::path dir = opt.output_dir.empty() ? fs::path(".") : fs::path(opt.output_dir);
    fs::create_directories(dir);
    return dir / name;
}

/// Writes the report JSON and echoes the same bytes to stdout.
void emit_json(const CommonOptions& opt, const std::string& name, const io::JsonValue& v,
               bool to_stdout = true) {
    const std::string text = v.dump();
    io::write_text_file(out_file(opt, name), text);
    if (to_stdout) std::cout << text;
}

void emit_error(const std::string& type, const std::string& message,
                std::optional<double> residual = {}) {
    auto detail = io::JsonValue::object();
    detail.set("type", type).set("message", message);
    if (residual) detail.set("residual", *residual);
    auto root = io::JsonValue::object();
    root.set("error", std::move(detail));
    std::cout << root.dump();
    std::cerr << "error: " << message << "\n";
}

struct StateOptions {
    std::string state;
    double a = 1.0;
    double b = 0.0;
    int n = 0;
    double omega = 1.0;
    std::string input;

    SampledWavefunction build(const Grid& grid, const PhysicalConstants& constants) const {
        if (!input.empty() && !state.empty())
            throw InvalidParameterError("give either --state or --input, not both");
        if (!input.empty()) return io::read_wavefunction_csv(input);
        if (state == "gaussian") {
            if (!(a > 0.0)) throw InvalidParameterError("--a must be positive");
            return make_squeezed_gaussian(a, b, grid, constants);
        }
        if (state == "hermite") {
            if (!(omega > 0.0)) throw InvalidParameterError("--omega must be positive");
            return make_hermite_state(n, omega, grid, constants);
        }
        throw InvalidParameterError("one of --state or --input is required");
    }
};

/// Unless the user pinned the grid, size it to the builtin state so the tails
/// decay well below the amplitude mask without wasting most of the grid on
/// dead samples.
Grid state_grid(const CommonOptions& opt, const StateOptions& st) {
    if (opt.grid_explicit || !st.input.empty()) return opt.grid();
    if (st.state == "gaussian" && st.a > 0.0) {
        const double half = 7.0 * std::sqrt(opt.constants.hbar / st.a);
        return {-half, half, opt.grid_points};
    }
    if (st.state == "hermite" && st.omega > 0.0 && st.n >= 0) {
        const double scale =
            std::sqrt(opt.constants.hbar / (opt.constants.mass * st.omega));
        const double half = (std::sqrt(2.0 * st.n + 1.0) + 5.5) * scale;
        return {-half, half, opt.grid_points};
    }
    return opt.grid();
}

/// The spectrum commands need a well: both grid edges must sit above the
/// sampled minimum, otherwise the box states of the grid masquerade as levels.
void require_confining(const Potential& V, const Grid& grid) {
    double vmin = V(grid.point(0));
    for (std::size_t i = 1; i < grid.size(); ++i) vmin = std::min(vmin, V(grid.point(i)));
    if (!(V(grid.x_min()) > vmin) || !(V(grid.x_max()) > vmin))
        throw NotSingleWellError("potential is non-confining over the grid");
}

void add_state_options(CLI::App* cmd, StateOptions& st) {
    cmd->add_option("--state", st.state, "builtin state: gaussian | hermite")
        ->check(CLI::IsMember({"gaussian", "hermite"}));
    cmd->add_option("--a", st.a, "gaussian width parameter (default 1)");
    cmd->add_option("--b", st.b, "gaussian chirp parameter (default 0)");
    cmd->add_option("--n", st.n, "hermite level index (default 0)")->check(CLI::NonNegativeNumber);
    cmd->add_option("--omega", st.omega, "hermite oscillator frequency (default 1)");
    cmd->add_option("--input", st.input, "wavefunction CSV (x,re,im) instead of --state");
}

struct PotentialOptions {
    std::string kind;
    double omega = 1.0;
    double depth = 1.0;
    double alpha = 1.0;
    double center = 0.0;
    std::vector<double> coeffs;
    std::string input;

    Potential build(double mass) const {
        if (kind == "harmonic") return Potential::harmonic(mass, omega);
        if (kind == "morse") return Potential::morse(depth, alpha, center);
        if (kind == "polynomial") {
            if (coeffs.empty())
                throw InvalidParameterError("--coeffs is required for a polynomial potential");
            return Potential::polynomial(coeffs);
        }
        // tabulated
        if (input.empty())
            throw InvalidParameterError("--input is required for a tabulated potential");
        const auto [xs, vs] = io::read_potential_csv(input);
        return Potential::tabulated(xs, vs);
    }
};

void add_potential_options(CLI::App* cmd, PotentialOptions& po) {
    cmd->add_option("--potential", po.kind, "harmonic | morse | polynomial | tabulated")
        ->required()
        ->check(CLI::IsMember({"harmonic", "morse", "polynomial", "tabulated"}));
    cmd->add_option("--omega", po.omega, "harmonic frequency (default 1)");
    cmd->add_option("--D", po.depth, "morse well depth");
    cmd->add_option("--alpha", po.alpha, "morse width parameter (default 1)");
    cmd->add_option("--center", po.center, "morse minimum position (default 0)");
    cmd->add_option("--coeffs", po.coeffs, "polynomial coefficients c0 c1 c2 ...")
        ->expected(-1)
        ->delimiter(',');
    cmd->add_option("--input", po.input, "potential CSV (x,V) for --potential tabulated");
}

double overlap(const SampledWavefunction& u, const SampledWavefunction& v) {
    const double h = u.grid.spacing();
    std::complex<double> dot = 0.0;
    double nu = 0.0, nv = 0.0;
    for (std::size_t i = 0; i < u.grid.size(); ++i) {
        const double w = (i == 0 || i + 1 == u.grid.size()) ? 0.5 : 1.0;
        dot += w * std::conj(u.values[i]) * v.values[i];
        nu += w * std::norm(u.values[i]);
        nv += w * std::norm(v.values[i]);
    }
    (void)h;  // cancels in the ratio
    return std::abs(dot) / std::sqrt(nu * nv);
}

int cmd_forward(const CommonOptions& opt, const StateOptions& st, std::size_t samples) {
    const auto psi = st.build(state_grid(opt, st), opt.constants);
    const auto F = fermi_from_wavefunction(psi, opt.constants);
    PhaseCurve curve = [&] {
        try {
            return curve_from_fermi(F, samples);
        } catch (const NoCurveError& e) {
            throw NoCurveError("degenerate curve: " + std::string(e.what()));
        }
    }();
    const double area = curve_area(curve, opt.tol);
    const double h = 2.0 * kPi * opt.constants.hbar;

    io::write_fermi_csv(out_file(opt, "fermi.csv"), F);
    io::write_curve_csv(out_file(opt, "curve.csv"), curve);

    auto summary = io::JsonValue::object();
    summary.set("area", area)
        .set("area_over_h", area / h)
        .set("x_A", curve.x_A)
        .set("x_B", curve.x_B);
    emit_json(opt, "forward.json", summary);
    return 0;
}

int cmd_inverse(const CommonOptions& opt, const std::string& input, std::optional<double> gauge,
                double residual_tol, const std::string& oracle_path) {
    const auto curve = io::read_curve_csv(input);
    const double width = curve.x_B - curve.x_A;
    const double gauge_x0 = gauge.value_or(0.5 * (curve.x_A + curve.x_B));
    // default reconstruction grid: generous margins around the curve support
    const Grid grid = opt.grid_explicit
                          ? opt.grid()
                          : Grid(curve.x_A - 1.5 * width, curve.x_B + 1.5 * width, 3001);

    const auto check = check_quantization(curve, opt.constants, opt.tol, residual_tol);
    auto report = io::JsonValue::object();
    if (!check.n) {
        report.set("n", nullptr).set("E", nullptr).set("E0", check.E0).set("residual",
                                                                           check.residual);
        emit_json(opt, "inverse.json", report);
        std::cerr << "error: curve is off the quantization ladder (residual "
                  << io::format_double(check.residual) << ")\n";
        return 3;
    }

    const auto psi = reconstruct_wavefunction(curve, gauge_x0, grid, opt.constants, opt.tol);
    io::write_wavefunction_csv(out_file(opt, "psi.csv"), psi);

    // energy of the reconstructed level, on the same derived potential
    const auto [fv, gv] = fg_from_curve(curve);
    double q_max = 0.0;
    for (const double g : gv) q_max = std::max(q_max, -g);
    const double e_ref = q_max / (2.0 * opt.constants.mass);
    const auto bundle = potential_from_curve(curve, e_ref, gauge_x0, opt.constants);
    const double energy =
        numerov_eigensolve(bundle.V, *check.n, grid, opt.constants, opt.tol).first;

    report.set("n", *check.n).set("E", energy).set("E0", check.E0).set("residual", check.residual);
    if (!oracle_path.empty()) {
        const auto oracle = io::read_wavefunction_csv(oracle_path);
        const double span = psi.grid.x_max() - psi.grid.x_min();
        if (oracle.grid.size() != psi.grid.size() ||
            std::abs(oracle.grid.x_min() - psi.grid.x_min()) > 1e-9 * span ||
            std::abs(oracle.grid.x_max() - psi.grid.x_max()) > 1e-9 * span)
            throw InvalidParameterError(
                "oracle grid must match the reconstruction grid (use the --grid-* flags)");
        report.set("overlap_oracle", overlap(psi, oracle));
    }
    emit_json(opt, "inverse.json", report);
    return 0;
}

int cmd_solve(const CommonOptions& opt, const PotentialOptions& po, int levels, bool oracle) {
    const auto V = po.build(opt.constants.mass);
    const Grid grid = opt.grid();
    require_confining(V, grid);
    const auto spec = spectrum(V, levels, grid, opt.constants, opt.tol);

    std::vector<double> deltas(spec.levels.size(), 0.0);
    double max_delta = 0.0;
    if (oracle) {
        for (const auto& level : spec.levels) {
            if (level.method != "qian_dong") continue;
            const double ref =
                numerov_eigensolve(V, level.n, grid, opt.constants, opt.tol).first;
            deltas[static_cast<std::size_t>(level.n)] = level.energy - ref;
            max_delta = std::max(max_delta, std::abs(level.energy - ref));
        }
    }

    io::write_spectrum_csv(out_file(opt, "spectrum.csv"), spec);

    auto root = io::JsonValue::object();
    root.set("ground_energy", spec.ground_energy);
    io::JsonValue::Array level_array;
    for (const auto& level : spec.levels) {
        auto entry = io::JsonValue::object();
        entry.set("n", level.n).set("E", level.energy).set("method", level.method);
        if (oracle && level.method == "qian_dong")
            entry.set("delta", deltas[static_cast<std::size_t>(level.n)]);
        level_array.push_back(std::move(entry));
    }
    root.set("levels", io::JsonValue(std::move(level_array)));
    if (oracle) root.set("oracle_max_abs_delta", max_delta);
    emit_json(opt, "spectrum.json", root);
    return 0;
}

int cmd_verify(const CommonOptions& opt, const PotentialOptions& po, int n) {
    const auto V = po.build(opt.constants.mass);
    require_confining(V, opt.grid());
    const auto [energy, psi] = numerov_eigensolve(V, n, opt.grid(), opt.constants, opt.tol);
    const auto report = maxu_rule_evaluate(psi, V, energy, opt.constants);

    auto root = io::JsonValue::object();
    root.set("energy", report.energy)
        .set("n_nodes_psi", report.n_nodes_psi)
        .set("action", report.action)
        .set("maxu_correction", report.maxu_correction)
        .set("maxu_residual", report.maxu_residual)
        .set("wkb_residual", report.wkb_residual);
    emit_json(opt, "verify.json", root);
    return 0;
}

int cmd_wigner(const CommonOptions& opt, const StateOptions& st, const Grid& xg, const Grid& pg) {
    const auto psi = st.build(state_grid(opt, st), opt.constants);
    const PhaseSpaceGrid phase_grid(xg, pg);
    const auto W = wigner_numeric(psi, phase_grid, opt.constants);

    double min_w = W.front();
    double mass = 0.0;
    for (std::size_t ix = 0; ix < xg.size(); ++ix) {
        const double wx = (ix == 0 || ix + 1 == xg.size()) ? 0.5 : 1.0;
        for (std::size_t ip = 0; ip < pg.size(); ++ip) {
            const double wp = (ip == 0 || ip + 1 == pg.size()) ? 0.5 : 1.0;
            const double w = W[ix * pg.size() + ip];
            min_w = std::min(min_w, w);
            mass += wx * wp * w;
        }
    }
    mass *= xg.spacing() * pg.spacing();

    io::write_wigner_csv(out_file(opt, "wigner.csv"), phase_grid, W);

    auto meta = io::JsonValue::object();
    meta.set("hbar", opt.constants.hbar).set("norm", mass).set("min_w", min_w);

    if (st.input.empty() && st.state == "gaussian") {
        const auto closed = wigner_gaussian_closed(st.a, st.b, opt.constants);
        double max_dev = 0.0;
        for (std::size_t ix = 0; ix < xg.size(); ++ix) {
            for (std::size_t ip = 0; ip < pg.size(); ++ip) {
                const double ref =
                    closed.value(xg.point(ix), pg.point(ip), opt.constants.hbar);
                max_dev = std::max(max_dev, std::abs(W[ix * pg.size() + ip] - ref));
            }
        }
        auto comparison = io::JsonValue::object();
        comparison.set("max_abs_dev", max_dev).set("det_G", closed.det());
        emit_json(opt, "wigner_closed.json", comparison, /*to_stdout=*/false);
        meta.set("closed_form_max_abs_dev", max_dev);
    }
    emit_json(opt, "wigner.json", meta);
    return 0;
}

template <typename F>
int run_guarded(F&& body) {
    try {
        return body();
    } catch (const NotQuantizedError& e) {
        emit_error("not_quantized", e.what(), e.residual);
        return 3;
    } catch (const InputError& e) {
        emit_error("input", e.what());
        return 1;
    } catch (const InvalidGaugePointError& e) {
        emit_error("input", e.what());
        return 1;
    } catch (const InsufficientGridError& e) {
        emit_error("input", e.what());
        return 1;
    } catch (const ShapeError& e) {
        emit_error("input", e.what());
        return 1;
    } catch (const NoCurveError& e) {
        emit_error("no_curve", e.what());
        return 2;
    } catch (const MultiWellError& e) {
        emit_error("multi_well", e.what());
        return 2;
    } catch (const NotSingleWellError& e) {
        emit_error("non_confining", e.what());
        return 2;
    } catch (const BracketFailureError& e) {
        emit_error("non_confining", e.what());
        return 2;
    } catch (const TruncationError& e) {
        emit_error("truncation", e.what());
        return 2;
    } catch (const Error& e) {
        emit_error("domain", e.what());
        return 2;
    } catch (const std::exception& e) {
        emit_error("input", e.what());
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "fermicurve: one-to-one map between 1D bound states and quantized "
        "phase-plane areas"};
    app.require_subcommand(0, 1);

    CommonOptions opt;
    bool seed_docs = false;
    app.add_option("--hbar", opt.constants.hbar, "reduced Planck constant (default 1)")
        ->check(CLI::PositiveNumber);
    app.add_option("--mass", opt.constants.mass, "particle mass (default 1)")
        ->check(CLI::PositiveNumber);
    auto* gmin = app.add_option("--grid-min", opt.grid_min, "sampling grid lower edge (default -8)");
    auto* gmax = app.add_option("--grid-max", opt.grid_max, "sampling grid upper edge (default 8)");
    auto* gpts =
        app.add_option("--grid-points", opt.grid_points, "sampling grid size (default 2001)");
    app.add_option("--abs-tol", opt.tol.abs_tol, "absolute tolerance (default 1e-10)");
    app.add_option("--rel-tol", opt.tol.rel_tol, "relative tolerance (default 1e-10)");
    app.add_option("--output-dir", opt.output_dir, "directory for output files (default .)");
    app.add_flag("--seed-docs", seed_docs, "print the file-format reference and exit");

    auto* fwd = app.add_subcommand("forward", "wavefunction -> Fermi function, curve, area");
    fwd->fallthrough();
    StateOptions fwd_state;
    add_state_options(fwd, fwd_state);
    std::size_t fwd_samples = 2001;
    fwd->add_option("--samples", fwd_samples, "curve samples per branch (default 2001)");

    auto* inv = app.add_subcommand("inverse", "phase curve -> potential, eigenstate");
    inv->fallthrough();
    std::string inv_input, inv_oracle;
    double inv_gauge = 0.0, inv_residual_tol = 1e-3;
    inv->add_option("--input", inv_input, "phase curve CSV (x,p_plus,p_minus)")->required();
    auto* gauge_opt =
        inv->add_option("--gauge-x0", inv_gauge, "phase anchor (default: curve midpoint)");
    inv->add_option("--residual-tol", inv_residual_tol,
                    "ladder residual accepted as quantized (default 1e-3)");
    inv->add_option("--oracle", inv_oracle,
                    "wavefunction CSV to compare against (adds overlap_oracle)");

    auto* slv = app.add_subcommand("solve", "potential -> spectrum");
    slv->fallthrough();
    PotentialOptions slv_potential;
    add_potential_options(slv, slv_potential);
    int slv_levels = 5;
    bool slv_oracle = false;
    slv->add_option("--levels", slv_levels, "highest level index (default 5)")
        ->check(CLI::NonNegativeNumber);
    slv->add_flag("--oracle", slv_oracle, "cross-check every level against the eigensolver");

    auto* ver = app.add_subcommand("verify", "evaluate the quantization rules for one level");
    ver->fallthrough();
    PotentialOptions ver_potential;
    add_potential_options(ver, ver_potential);
    int ver_n = 0;
    ver->add_option("--n", ver_n, "level index (default 0)")->check(CLI::NonNegativeNumber);

    auto* wig = app.add_subcommand("wigner", "wavefunction -> Wigner distribution");
    wig->fallthrough();
    StateOptions wig_state;
    add_state_options(wig, wig_state);
    double wx_min = -4.0, wx_max = 4.0, wp_min = -4.0, wp_max = 4.0;
    std::size_t wx_pts = 81, wp_pts = 81;
    wig->add_option("--x-min", wx_min, "output x lower edge (default -4)");
    wig->add_option("--x-max", wx_max, "output x upper edge (default 4)");
    wig->add_option("--x-points", wx_pts, "output x samples (default 81)");
    wig->add_option("--p-min", wp_min, "output p lower edge (default -4)");
    wig->add_option("--p-max", wp_max, "output p upper edge (default 4)");
    wig->add_option("--p-points", wp_pts, "output p samples (default 81)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    if (seed_docs) {
        std::cout << kFormatDocs;
        return 0;
    }

    opt.grid_explicit = gmin->count() > 0 || gmax->count() > 0 || gpts->count() > 0;

    return run_guarded([&]() -> int {
        opt.constants.validate();
        opt.tol.validate();
        if (*fwd) return cmd_forward(opt, fwd_state, fwd_samples);
        if (*inv) {
            const std::optional<double> gauge =
                gauge_opt->count() > 0 ? std::optional<double>(inv_gauge) : std::nullopt;
            return cmd_inverse(opt, inv_input, gauge, inv_residual_tol, inv_oracle);
        }
        if (*slv) return cmd_solve(opt, slv_potential, slv_levels, slv_oracle);
        if (*ver) return cmd_verify(opt, ver_potential, ver_n);
        if (*wig)
            return cmd_wigner(opt, wig_state, Grid(wx_min, wx_max, wx_pts),
                              Grid(wp_min, wp_max, wp_pts));
        throw InvalidParameterError(
            "a subcommand is required: forward | inverse | solve | verify | wigner "
            "(or --seed-docs)");
    });
}
