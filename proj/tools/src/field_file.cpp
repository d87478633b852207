#include "braggsqueeze_io/field_file.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

#include "braggsqueeze/errors.hpp"

namespace braggsqueeze::io {

namespace {

std::string number(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void put_le(std::ostream& out, double v)
{
    auto bits = std::bit_cast<std::uint64_t>(v);
    unsigned char bytes[8];
    for (int k = 0; k < 8; ++k) bytes[k] = static_cast<unsigned char>(bits >> (8 * k));
    out.write(reinterpret_cast<const char*>(bytes), 8);
}

double get_le(std::istream& in)
{
    unsigned char bytes[8];
    if (!in.read(reinterpret_cast<char*>(bytes), 8)) throw GridMismatch("field payload is shorter than the header says");
    std::uint64_t bits = 0;
    for (int k = 0; k < 8; ++k) bits |= static_cast<std::uint64_t>(bytes[k]) << (8 * k);
    return std::bit_cast<double>(bits);
}

void put_range(std::ostream& out, const char* key, CellRange r)
{
    out << key << " = " << r.begin << ' ' << r.end << '\n';
}

class Header {
public:
    explicit Header(std::map<std::string, std::string> v) : v_(std::move(v)) {}

    const std::string& raw(const std::string& key) const
    {
        auto it = v_.find(key);
        if (it == v_.end()) throw ConfigError("field header: missing key '" + key + "'");
        return it->second;
    }
    bool has(const std::string& key) const { return v_.count(key) != 0; }

    double real(const std::string& key) const
    {
        const std::string& s = raw(key);
        double v = 0.0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size()) throw ConfigError("field header: bad value for '" + key + "'");
        return v;
    }

    template <class Int>
    Int integer(const std::string& key) const
    {
        const std::string& s = raw(key);
        Int v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size()) throw ConfigError("field header: bad value for '" + key + "'");
        return v;
    }

    CellRange range(const std::string& key) const
    {
        const std::string& s = raw(key);
        const auto sp = s.find(' ');
        if (sp == std::string::npos) throw ConfigError("field header: bad range for '" + key + "'");
        CellRange r;
        auto [p1, e1] = std::from_chars(s.data(), s.data() + sp, r.begin);
        auto [p2, e2] = std::from_chars(s.data() + sp + 1, s.data() + s.size(), r.end);
        if (e1 != std::errc() || e2 != std::errc() || p1 != s.data() + sp || p2 != s.data() + s.size() || r.end < r.begin)
            throw ConfigError("field header: bad range for '" + key + "'");
        return r;
    }

private:
    std::map<std::string, std::string> v_;
};

} // namespace

void write_field(std::ostream& out, const FieldSnapshot& s)
{
    const Grid& g = s.grid;
    if (!s.field.consistent() || s.field.size() != g.n_z) throw GridMismatch("field size does not match grid");
    out << kFieldFormatTag << '\n';
    out << "label = " << s.label << '\n';
    out << "step = " << s.step << '\n';
    const GratingConfig& c = s.grating;
    out << "grating_length = " << number(c.grating_length) << '\n';
    out << "kappa = " << number(c.kappa) << '\n';
    out << "delta = " << number(c.delta) << '\n';
    out << "gamma = " << number(c.gamma) << '\n';
    out << "v_g = " << number(c.v_g) << '\n';
    out << "lead_in = " << number(c.lead_in) << '\n';
    out << "lead_out = " << number(c.lead_out) << '\n';
    out << "gamma_outside = " << number(c.gamma_outside) << '\n';
    if (c.bragg_wavelength) out << "bragg_wavelength = " << number(*c.bragg_wavelength) << '\n';
    out << "dz = " << number(g.dz) << '\n';
    out << "dt = " << number(g.dt) << '\n';
    out << "n_z = " << g.n_z << '\n';
    out << "n_t = " << g.n_t << '\n';
    put_range(out, "lead_in_cells", g.lead_in);
    put_range(out, "grating_cells", g.grating);
    put_range(out, "lead_out_cells", g.lead_out);
    out << "payload = a b, float64 le, re im interleaved\n";
    out << "end_header\n";
    for (const auto* v : {&s.field.a, &s.field.b})
        for (const Complex& z : *v) {
            put_le(out, z.real());
            put_le(out, z.imag());
        }
    if (!out) throw std::runtime_error("failed writing field container");
}

void write_field(const std::filesystem::path& path, const FieldSnapshot& s)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    write_field(out, s);
}

FieldSnapshot read_field(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || line != kFieldFormatTag) throw ConfigError("not a braggsqueeze field container");
    std::map<std::string, std::string> kv;
    bool closed = false;
    while (std::getline(in, line)) {
        if (line == "end_header") {
            closed = true;
            break;
        }
        const auto eq = line.find(" = ");
        if (eq == std::string::npos) throw ConfigError("field header: malformed line '" + line + "'");
        kv[line.substr(0, eq)] = line.substr(eq + 3);
    }
    if (!closed) throw ConfigError("field header: missing end_header");
    const Header h(std::move(kv));

    FieldSnapshot s;
    s.label = h.raw("label");
    s.step = h.integer<std::int64_t>("step");
    s.grating.grating_length = h.real("grating_length");
    s.grating.kappa = h.real("kappa");
    s.grating.delta = h.real("delta");
    s.grating.gamma = h.real("gamma");
    s.grating.v_g = h.real("v_g");
    s.grating.lead_in = h.real("lead_in");
    s.grating.lead_out = h.real("lead_out");
    s.grating.gamma_outside = h.real("gamma_outside");
    if (h.has("bragg_wavelength")) s.grating.bragg_wavelength = h.real("bragg_wavelength");

    Grid& g = s.grid;
    g.dz = h.real("dz");
    g.dt = h.real("dt");
    g.n_z = h.integer<std::size_t>("n_z");
    g.n_t = h.integer<std::int64_t>("n_t");
    g.lead_in = h.range("lead_in_cells");
    g.grating = h.range("grating_cells");
    g.lead_out = h.range("lead_out_cells");
    if (g.lead_in.begin != 0 || g.lead_in.end != g.grating.begin || g.grating.end != g.lead_out.begin ||
        g.lead_out.end != g.n_z)
        throw ConfigError("field header: region ranges do not tile the grid");
    g.region_map.assign(g.n_z, Region::LeadIn);
    std::fill(g.region_map.begin() + g.grating.begin, g.region_map.begin() + g.grating.end, Region::Grating);
    std::fill(g.region_map.begin() + g.lead_out.begin, g.region_map.end(), Region::LeadOut);

    s.field = FieldPair(g.n_z);
    for (auto* v : {&s.field.a, &s.field.b})
        for (Complex& z : *v) {
            const double re = get_le(in);
            const double im = get_le(in);
            z = {re, im};
        }
    if (in.peek() != std::char_traits<char>::eof()) throw GridMismatch("field payload is longer than the header says");
    return s;
}

FieldSnapshot read_field(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read field container '" + path.string() + "'");
    return read_field(in);
}

} // namespace braggsqueeze::io
