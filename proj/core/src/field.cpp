#include "braggsqueeze/field.hpp"

#include <algorithm>
#include <cmath>

#include "braggsqueeze/errors.hpp"

namespace braggsqueeze {
namespace {

void check_same(const FieldPair& x, const FieldPair& y)
{
    if (x.a.size() != y.a.size() || x.b.size() != y.b.size()) throw GridMismatch("field pairs differ in length");
}

} // namespace

bool FieldPair::all_finite() const
{
    auto ok = [](const Complex& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); };
    return std::all_of(a.begin(), a.end(), ok) && std::all_of(b.begin(), b.end(), ok);
}

FieldPair& FieldPair::operator+=(const FieldPair& o)
{
    check_same(*this, o);
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] += o.a[i];
        b[i] += o.b[i];
    }
    return *this;
}

FieldPair& FieldPair::operator-=(const FieldPair& o)
{
    check_same(*this, o);
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] -= o.a[i];
        b[i] -= o.b[i];
    }
    return *this;
}

FieldPair& FieldPair::operator*=(Complex s)
{
    for (auto& z : a) z *= s;
    for (auto& z : b) z *= s;
    return *this;
}

FieldPair operator+(FieldPair lhs, const FieldPair& rhs) { return lhs += rhs; }
FieldPair operator-(FieldPair lhs, const FieldPair& rhs) { return lhs -= rhs; }
FieldPair operator*(Complex s, FieldPair f) { return f *= s; }

FieldPair restrict_to(const FieldPair& f, CellRange keep)
{
    FieldPair out(f.size());
    const std::size_t end = std::min(keep.end, f.size());
    for (std::size_t i = keep.begin; i < end; ++i) {
        out.a[i] = f.a[i];
        out.b[i] = f.b[i];
    }
    return out;
}

double max_intensity(const FieldPair& f)
{
    double m = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) m = std::max(m, std::norm(f.a[i]) + std::norm(f.b[i]));
    return m;
}

FieldPair sech_pulse(const PulseConfig& p, const GratingConfig& g, const Grid& grid)
{
    validate_pair(g, p);
    const double z0 = p.sech_width(g.v_g);
    const double amp = std::sqrt(p.peak_intensity);
    FieldPair f(grid.n_z);
    for (std::size_t i = 0; i < grid.n_z; ++i) {
        const double x = grid.cell_center(i) - p.center;
        f.a[i] = std::polar(amp / std::cosh(x / z0), g.delta * x);
    }
    return f;
}

double photon_content(const FieldPair& f, const Grid& grid, CellRange region)
{
    if (f.a.size() != grid.n_z || f.b.size() != grid.n_z) throw GridMismatch("field does not match grid");
    const std::size_t end = std::min(region.end, grid.n_z);
    double sum = 0.0;
    for (std::size_t i = region.begin; i < end; ++i)
        sum += trapezoid_weight(i, grid.n_z) * (std::norm(f.a[i]) + std::norm(f.b[i]));
    return sum * grid.dz;
}

double photon_content(const FieldPair& f, const Grid& grid) { return photon_content(f, grid, grid.whole()); }

} // namespace braggsqueeze
