#include "fermicurve/potential.hpp"

#include <cmath>

namespace fermi {

Potential Potential::harmonic(double mass, double omega) {
    if (!(mass > 0.0) || !(omega > 0.0)) {
        throw InvalidParameterError("harmonic potential requires mass > 0 and omega > 0");
    }
    return Potential(Harmonic{mass, omega});
}

Potential Potential::morse(double depth, double width, double center) {
    if (!(depth > 0.0) || !(width > 0.0)) {
        throw InvalidParameterError("morse potential requires depth > 0 and width > 0");
    }
    return Potential(Morse{depth, width, center});
}

Potential Potential::polynomial(std::vector<double> coefficients) {
    if (coefficients.empty()) {
        throw InvalidParameterError("polynomial potential needs at least one coefficient");
    }
    for (double c : coefficients) {
        if (!std::isfinite(c)) throw InvalidParameterError("polynomial coefficient not finite");
    }
    return Potential(Polynomial{std::move(coefficients)});
}

Potential Potential::tabulated(std::span<const double> xs, std::span<const double> vs) {
    return Potential(Tabulated{CubicSpline(xs, vs)});
}

double Potential::operator()(double x) const {
    return std::visit(
        [x](const auto& p) -> double {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, Harmonic>) {
                return 0.5 * p.mass * p.omega * p.omega * x * x;
            } else if constexpr (std::is_same_v<T, Morse>) {
                const double u = 1.0 - std::exp(-p.width * (x - p.center));
                return p.depth * u * u;
            } else if constexpr (std::is_same_v<T, Polynomial>) {
                double v = 0.0;
                for (auto it = p.coefficients.rbegin(); it != p.coefficients.rend(); ++it) {
                    v = v * x + *it;
                }
                return v;
            } else {
                return p.spline(x);
            }
        },
        v_);
}

double Potential::derivative(double x) const {
    return std::visit(
        [x](const auto& p) -> double {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, Harmonic>) {
                return p.mass * p.omega * p.omega * x;
            } else if constexpr (std::is_same_v<T, Morse>) {
                const double e = std::exp(-p.width * (x - p.center));
                return 2.0 * p.depth * p.width * e * (1.0 - e);
            } else if constexpr (std::is_same_v<T, Polynomial>) {
                double v = 0.0;
                const auto& c = p.coefficients;
                for (std::size_t k = c.size(); k-- > 1;) {
                    v = v * x + static_cast<double>(k) * c[k];
                }
                return v;
            } else {
                return p.spline.derivative(x);
            }
        },
        v_);
}

}  // namespace fermi
