#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "braggsqueeze/config.hpp"
#include "braggsqueeze/grid.hpp"

namespace braggsqueeze {

using Complex = std::complex<double>;

/// Forward/backward complex envelope pair sampled on the cell centres.
/// Used for classical fields, perturbation mode functions and adjoint
/// (projection) functions alike.
struct FieldPair {
    std::vector<Complex> a;  // forward
    std::vector<Complex> b;  // backward

    FieldPair() = default;
    explicit FieldPair(std::size_t n) : a(n), b(n) {}

    std::size_t size() const { return a.size(); }
    bool consistent() const { return a.size() == b.size(); }
    bool all_finite() const;

    FieldPair& operator+=(const FieldPair& o);
    FieldPair& operator-=(const FieldPair& o);
    FieldPair& operator*=(Complex s);
    bool operator==(const FieldPair&) const = default;
};

FieldPair operator+(FieldPair lhs, const FieldPair& rhs);
FieldPair operator-(FieldPair lhs, const FieldPair& rhs);
FieldPair operator*(Complex s, FieldPair f);

/// Zeroes every sample outside `keep`.
FieldPair restrict_to(const FieldPair& f, CellRange keep);

/// Largest |u_a|^2 + |u_b|^2 over the whole field.
double max_intensity(const FieldPair& f);

/// Launch pulse: u_a = sqrt(I) sech((z - center)/z0) exp(i delta (z - center)),
/// u_b = 0. The linear phase is the spatial signature of a transform-limited
/// pulse whose carrier sits delta away from the Bragg frequency.
FieldPair sech_pulse(const PulseConfig& p, const GratingConfig& g, const Grid& grid);

/// Trapezoid-rule integral of |u_a|^2 + |u_b|^2 over the grid, with the
/// integrand masked to `region`. Partitions add up exactly.
double photon_content(const FieldPair& f, const Grid& grid, CellRange region);
double photon_content(const FieldPair& f, const Grid& grid);

/// Trapezoid weight of cell i (1/2 at the two domain ends).
inline double trapezoid_weight(std::size_t i, std::size_t n)
{
    return (i == 0 || i + 1 == n) ? 0.5 : 1.0;
}

} // namespace braggsqueeze
