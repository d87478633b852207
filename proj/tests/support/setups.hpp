#pragma once

#include <complex>
#include <random>

#include "braggsqueeze/classical.hpp"
#include "braggsqueeze/experiments.hpp"
#include "braggsqueeze/field.hpp"

namespace testing_setups {

using namespace braggsqueeze;

/// 2 cm grating, 30 ps pulse tuned well outside the gap: a full run takes
/// a fraction of a second.
inline Setup small_setup(double gamma = 0.1, double intensity = 5.0)
{
    Setup s;
    s.grating.grating_length = 2.0;
    s.grating.kappa = 10.0;
    s.grating.delta = 20.0;
    s.grating.gamma = gamma;
    s.pulse.fwhm = 30.0;
    s.pulse.peak_intensity = intensity;
    return resolved(s);
}

struct Built {
    Setup setup;
    Grid grid;
    FieldPair init;
};

inline Built build(const Setup& s)
{
    Built b{resolved(s), {}, {}};
    b.grid = build_grid(b.setup.grating, b.setup.pulse, b.setup.grid);
    b.init = sech_pulse(b.setup.pulse, b.setup.grating, b.grid);
    return b;
}

inline Trajectory run(const Built& b, EvolveOptions opts = {})
{
    return evolve(b.init, b.setup.grating, b.grid, opts);
}

/// Field with independent uniform entries in [-scale, scale] per real component.
inline FieldPair random_field(std::size_t n, std::uint64_t seed, double scale = 1.0)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-scale, scale);
    FieldPair f(n);
    for (std::size_t i = 0; i < n; ++i) {
        f.a[i] = {u(rng), u(rng)};
        f.b[i] = {u(rng), u(rng)};
    }
    return f;
}

inline double max_abs_diff(const FieldPair& x, const FieldPair& y)
{
    double m = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        m = std::max(m, std::abs(x.a[i] - y.a[i]));
        m = std::max(m, std::abs(x.b[i] - y.b[i]));
    }
    return m;
}

inline double max_abs(const FieldPair& x)
{
    double m = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) m = std::max({m, std::abs(x.a[i]), std::abs(x.b[i])});
    return m;
}

} // namespace testing_setups
