#pragma once

#include <complex>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "fermicurve/fermi_map.hpp"
#include "fermicurve/quantization.hpp"
#include "fermicurve/state.hpp"
#include "fermicurve/wigner.hpp"

namespace fermi::io {

/// Round-trip-exact float format ("%.17g") used in every CSV and JSON file.
std::string format_double(double v);

/// JSON document that remembers key insertion order and prints floats with
/// format_double, so identical inputs always serialize to identical bytes.
/// Non-finite doubles become null.
class JsonValue {
  public:
    using Array = std::vector<JsonValue>;
    using Object = std::vector<std::pair<std::string, JsonValue>>;

    JsonValue() : v_(nullptr) {}
    JsonValue(std::nullptr_t) : v_(nullptr) {}
    JsonValue(bool b) : v_(b) {}
    JsonValue(int i) : v_(static_cast<long long>(i)) {}
    JsonValue(long long i) : v_(i) {}
    JsonValue(double d) : v_(d) {}
    JsonValue(const char* s) : v_(std::string(s)) {}
    JsonValue(std::string s) : v_(std::move(s)) {}
    JsonValue(Array a) : v_(std::move(a)) {}

    static JsonValue object() {
        JsonValue v;
        v.v_ = Object{};
        return v;
    }

    /// Appends a key (objects only). Keys are emitted in insertion order.
    JsonValue& set(std::string key, JsonValue value);

    /// Serializes with two-space indentation and a trailing newline.
    std::string dump() const;

  private:
    std::variant<std::nullptr_t, bool, long long, double, std::string, Array, Object> v_;

    void write(std::string& out, int depth) const;
};

// CSV: comma-separated with a mandatory header row; blank lines and lines
// starting with '#' are skipped. Readers throw InputError with file:line
// context on malformed content.

SampledWavefunction read_wavefunction_csv(const std::filesystem::path& path);  // x,re,im
void write_wavefunction_csv(const std::filesystem::path& path, const SampledWavefunction& psi);

// x,V with strictly increasing x
std::pair<std::vector<double>, std::vector<double>> read_potential_csv(
    const std::filesystem::path& path);
void write_potential_csv(const std::filesystem::path& path, std::span<const double> xs,
                         std::span<const double> vs);

PhaseCurve read_curve_csv(const std::filesystem::path& path);  // x,p_plus,p_minus
void write_curve_csv(const std::filesystem::path& path, const PhaseCurve& curve);

void write_fermi_csv(const std::filesystem::path& path, const FermiFunction& F);  // x,f,g

void write_spectrum_csv(const std::filesystem::path& path, const Spectrum& spectrum);  // n,E,method

// x,p,W row-major in x (p varies fastest)
void write_wigner_csv(const std::filesystem::path& path, const PhaseSpaceGrid& grid,
                      const std::vector<double>& W);

void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace fermi::io
