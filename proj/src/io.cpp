#include "fermicurve/io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string_view>

namespace fermi::io {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(trim(std::string_view(line).substr(start)));
            return out;
        }
        out.push_back(trim(std::string_view(line).substr(start, comma - start)));
        start = comma + 1;
    }
}

std::string location(const std::filesystem::path& path, std::size_t line_no) {
    return path.string() + ":" + std::to_string(line_no);
}

double parse_field(const std::string& field, const std::filesystem::path& path,
                   std::size_t line_no) {
    if (field.empty()) throw InputError(location(path, line_no) + ": empty field");
    char* end = nullptr;
    const double v = std::strtod(field.c_str(), &end);
    if (end != field.c_str() + field.size())
        throw InputError(location(path, line_no) + ": not a number: '" + field + "'");
    if (!std::isfinite(v))
        throw InputError(location(path, line_no) + ": non-finite value: '" + field + "'");
    return v;
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

/// Reads a numeric CSV, validating the header (case-insensitive) and the
/// column count of every data row.
std::vector<std::vector<double>> read_numeric_csv(const std::filesystem::path& path,
                                                  const std::vector<std::string>& header) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string() + " for reading");

    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto fields = split_fields(stripped);
        if (!header_seen) {
            std::string expected;
            for (const auto& h : header) expected += (expected.empty() ? "" : ",") + h;
            if (fields.size() != header.size())
                throw InputError(location(path, line_no) + ": expected header '" + expected + "'");
            for (std::size_t i = 0; i < header.size(); ++i) {
                if (lower(fields[i]) != lower(header[i]))
                    throw InputError(location(path, line_no) + ": expected header '" + expected +
                                     "', got '" + stripped + "'");
            }
            header_seen = true;
            continue;
        }
        if (fields.size() != header.size())
            throw InputError(location(path, line_no) + ": expected " +
                             std::to_string(header.size()) + " columns, got " +
                             std::to_string(fields.size()));
        std::vector<double> row(fields.size());
        for (std::size_t i = 0; i < fields.size(); ++i)
            row[i] = parse_field(fields[i], path, line_no);
        rows.push_back(std::move(row));
    }
    if (!header_seen) throw InputError(path.string() + ": missing header row");
    if (rows.empty()) throw InputError(path.string() + ": no data rows");
    return rows;
}

std::ofstream open_for_writing(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot open " + path.string() + " for writing");
    return out;
}

void finish_writing(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw InputError("failed while writing " + path.string());
}

/// The x column must describe a uniform grid; tolerance is a millionth of the
/// spacing, far looser than the 17-digit round trip needs.
Grid grid_from_column(const std::vector<double>& xs, const std::filesystem::path& path) {
    if (xs.size() < 5) throw InputError(path.string() + ": need at least 5 rows");
    if (!(xs.back() > xs.front()))
        throw InputError(path.string() + ": x column must be increasing");
    const double h = (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double expected = xs.front() + h * static_cast<double>(i);
        if (std::abs(xs[i] - expected) > 1e-6 * h)
            throw InputError(path.string() + ": x column is not uniformly spaced (row " +
                             std::to_string(i + 1) + ")");
    }
    return Grid(xs.front(), xs.back(), xs.size());
}

}  // namespace

JsonValue& JsonValue::set(std::string key, JsonValue value) {
    auto* obj = std::get_if<Object>(&v_);
    if (!obj) throw ShapeError("JsonValue::set called on a non-object value");
    obj->emplace_back(std::move(key), std::move(value));
    return *this;
}

namespace {

void write_escaped(std::string& out, const std::string& s) {
    out += '"';
    for (const char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    out += '"';
}

void indent(std::string& out, int depth) { out.append(static_cast<std::size_t>(depth) * 2, ' '); }

}  // namespace

void JsonValue::write(std::string& out, int depth) const {
    struct Visitor {
        std::string& out;
        int depth;
        void operator()(std::nullptr_t) const { out += "null"; }
        void operator()(bool b) const { out += b ? "true" : "false"; }
        void operator()(long long i) const { out += std::to_string(i); }
        void operator()(double d) const { out += std::isfinite(d) ? format_double(d) : "null"; }
        void operator()(const std::string& s) const { write_escaped(out, s); }
        void operator()(const Array& a) const {
            if (a.empty()) {
                out += "[]";
                return;
            }
            out += "[\n";
            for (std::size_t i = 0; i < a.size(); ++i) {
                indent(out, depth + 1);
                a[i].write(out, depth + 1);
                out += (i + 1 < a.size()) ? ",\n" : "\n";
            }
            indent(out, depth);
            out += ']';
        }
        void operator()(const Object& o) const {
            if (o.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            for (std::size_t i = 0; i < o.size(); ++i) {
                indent(out, depth + 1);
                write_escaped(out, o[i].first);
                out += ": ";
                o[i].second.write(out, depth + 1);
                out += (i + 1 < o.size()) ? ",\n" : "\n";
            }
            indent(out, depth);
            out += '}';
        }
    };
    std::visit(Visitor{out, depth}, v_);
}

std::string JsonValue::dump() const {
    std::string out;
    write(out, 0);
    out += '\n';
    return out;
}

SampledWavefunction read_wavefunction_csv(const std::filesystem::path& path) {
    const auto rows = read_numeric_csv(path, {"x", "re", "im"});
    std::vector<double> xs(rows.size());
    std::vector<std::complex<double>> values(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        xs[i] = rows[i][0];
        values[i] = {rows[i][1], rows[i][2]};
    }
    try {
        return {grid_from_column(xs, path), std::move(values)};
    } catch (const InvalidParameterError& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

void write_wavefunction_csv(const std::filesystem::path& path, const SampledWavefunction& psi) {
    auto out = open_for_writing(path);
    out << "x,re,im\n";
    for (std::size_t i = 0; i < psi.grid.size(); ++i) {
        // the last accumulated point can land an ulp off the declared upper
        // bound; write the bound so the grid re-reads exactly
        const double x = (i + 1 == psi.grid.size()) ? psi.grid.x_max() : psi.grid.point(i);
        out << format_double(x) << ',' << format_double(psi.values[i].real()) << ','
            << format_double(psi.values[i].imag()) << '\n';
    }
    finish_writing(out, path);
}

std::pair<std::vector<double>, std::vector<double>> read_potential_csv(
    const std::filesystem::path& path) {
    const auto rows = read_numeric_csv(path, {"x", "V"});
    std::vector<double> xs(rows.size()), vs(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        xs[i] = rows[i][0];
        vs[i] = rows[i][1];
        if (i > 0 && !(xs[i] > xs[i - 1]))
            throw InputError(path.string() + ": x column must be strictly increasing (row " +
                             std::to_string(i + 1) + ")");
    }
    return {std::move(xs), std::move(vs)};
}

void write_potential_csv(const std::filesystem::path& path, std::span<const double> xs,
                         std::span<const double> vs) {
    if (xs.size() != vs.size()) throw ShapeError("x and V columns differ in length");
    auto out = open_for_writing(path);
    out << "x,V\n";
    for (std::size_t i = 0; i < xs.size(); ++i)
        out << format_double(xs[i]) << ',' << format_double(vs[i]) << '\n';
    finish_writing(out, path);
}

PhaseCurve read_curve_csv(const std::filesystem::path& path) {
    const auto rows = read_numeric_csv(path, {"x", "p_plus", "p_minus"});
    std::vector<double> xs(rows.size()), pp(rows.size()), pm(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        xs[i] = rows[i][0];
        pp[i] = rows[i][1];
        pm[i] = rows[i][2];
    }
    try {
        return {xs.front(), xs.back(), std::move(xs), std::move(pp), std::move(pm)};
    } catch (const InvalidParameterError& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

void write_curve_csv(const std::filesystem::path& path, const PhaseCurve& curve) {
    auto out = open_for_writing(path);
    out << "x,p_plus,p_minus\n";
    for (std::size_t i = 0; i < curve.x.size(); ++i) {
        out << format_double(curve.x[i]) << ',' << format_double(curve.p_plus[i]) << ','
            << format_double(curve.p_minus[i]) << '\n';
    }
    finish_writing(out, path);
}

void write_fermi_csv(const std::filesystem::path& path, const FermiFunction& F) {
    auto out = open_for_writing(path);
    out << "x,f,g\n";
    for (std::size_t i = 0; i < F.grid.size(); ++i) {
        out << format_double(F.grid.point(i)) << ',' << format_double(F.f[i]) << ','
            << format_double(F.g[i]) << '\n';
    }
    finish_writing(out, path);
}

void write_spectrum_csv(const std::filesystem::path& path, const Spectrum& spectrum) {
    auto out = open_for_writing(path);
    out << "n,E,method\n";
    for (const auto& level : spectrum.levels)
        out << level.n << ',' << format_double(level.energy) << ',' << level.method << '\n';
    finish_writing(out, path);
}

void write_wigner_csv(const std::filesystem::path& path, const PhaseSpaceGrid& grid,
                      const std::vector<double>& W) {
    if (W.size() != grid.x.size() * grid.p.size())
        throw ShapeError("Wigner sample count does not match the phase-space grid");
    auto out = open_for_writing(path);
    out << "x,p,W\n";
    for (std::size_t ix = 0; ix < grid.x.size(); ++ix) {
        for (std::size_t ip = 0; ip < grid.p.size(); ++ip) {
            out << format_double(grid.x.point(ix)) << ',' << format_double(grid.p.point(ip))
                << ',' << format_double(W[ix * grid.p.size() + ip]) << '\n';
        }
    }
    finish_writing(out, path);
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    auto out = open_for_writing(path);
    out << content;
    finish_writing(out, path);
}

}  // namespace fermi::io
