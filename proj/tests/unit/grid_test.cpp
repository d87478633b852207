#include <cmath>

#include "doctest.h"
#include "braggsqueeze/errors.hpp"
#include "braggsqueeze/field.hpp"
#include "braggsqueeze/grid.hpp"

using namespace braggsqueeze;

namespace {

GratingConfig grating(double kappa = 10.0)
{
    GratingConfig g;
    g.kappa = kappa;
    g.grating_length = 5.0;
    g.lead_in = 10.0;
    g.lead_out = 10.0;
    return g;
}

PulseConfig pulse()
{
    PulseConfig p;
    p.fwhm = 60.0;
    p.center = 5.0;
    return p;
}

} // namespace

TEST_CASE("dz bound for the reference grating")
{
    const GratingConfig g = grating();
    const Grid grid = build_grid(g, pulse());
    CHECK(grid.dz <= 0.005 + 1e-15);
    CHECK(grid.dz == doctest::Approx(0.005).epsilon(1e-12));
    CHECK(grid.dt == doctest::Approx(grid.dz / g.v_g).epsilon(1e-15));
}

TEST_CASE("without a grating the pulse extent alone bounds dz")
{
    const GratingConfig g = grating(0.0);
    const PulseConfig p = pulse();
    CHECK(max_admissible_dz(g, p) == doctest::Approx(p.spatial_extent(g.v_g) / 100.0));
}

TEST_CASE("regions tile the domain")
{
    const Grid grid = build_grid(grating(), pulse());
    CHECK(grid.lead_in.begin == 0);
    CHECK(grid.lead_in.end == grid.grating.begin);
    CHECK(grid.grating.end == grid.lead_out.begin);
    CHECK(grid.lead_out.end == grid.n_z);
    REQUIRE(grid.region_map.size() == grid.n_z);
    for (std::size_t i = 0; i < grid.n_z; ++i) {
        const Region r = grid.region_map[i];
        CHECK(grid.range(r).contains(i));
    }
    CHECK(grid.dz * static_cast<double>(grid.grating.size()) == doctest::Approx(5.0).epsilon(1e-14));
}

TEST_CASE("build_grid is deterministic")
{
    CHECK(build_grid(grating(), pulse()) == build_grid(grating(), pulse()));
}

TEST_CASE("resolution factor divides dz")
{
    GridOptions o;
    o.resolution_factor = 2.0;
    const Grid coarse = build_grid(grating(), pulse());
    const Grid fine = build_grid(grating(), pulse(), o);
    CHECK(fine.dz == doctest::Approx(coarse.dz / 2.0).epsilon(1e-12));
    CHECK(fine.n_t >= 2 * coarse.n_t - 1);
}

TEST_CASE("invalid geometry is rejected")
{
    GratingConfig g = grating();
    g.lead_in = 1.0;
    CHECK_THROWS_AS(build_grid(g, pulse()), ConfigError);

    GridOptions o;
    o.dz_override = 0.01;
    CHECK_THROWS_AS(build_grid(grating(), pulse(), o), ConfigError);

    PulseConfig p = pulse();
    p.center = 12.0;
    CHECK_THROWS_AS(build_grid(grating(), p), ConfigError);
}

TEST_CASE("time window lets the pulse clear the grating")
{
    const GratingConfig g = grating();
    const PulseConfig p = pulse();
    const Grid grid = build_grid(g, p);
    const double needed = (g.lead_in - p.center) + 5.0 * g.grating_length + 2.0 * p.spatial_extent(g.v_g);
    CHECK(static_cast<double>(grid.n_t) * grid.dz >= 2.0 * needed - grid.dz);
}

TEST_CASE("fitted leads hold the light for the whole window")
{
    GratingConfig g = grating();
    PulseConfig p = pulse();
    fit_leads(g, p);
    const Grid grid = build_grid(g, p);
    const double travel = static_cast<double>(grid.n_t) * grid.dz;
    // reflected light leaving the entrance at t = 0 still fits in the lead-in
    CHECK(g.lead_in >= travel - (g.lead_in - p.center));
    CHECK(g.lead_out >= travel - (g.lead_in - p.center) - g.grating_length);
    CHECK_NOTHROW(validate_pair(g, p));
}

TEST_CASE("sech pulse shape")
{
    GratingConfig g = grating();
    g.lead_in = 20.0;
    PulseConfig p = pulse();
    const Grid probe = build_grid(g, p);
    const auto c = static_cast<std::size_t>(10.0 / probe.dz);
    p.center = (static_cast<double>(c) + 0.5) * probe.dz;  // on a cell centre
    const Grid grid = build_grid(g, p);
    const FieldPair f = sech_pulse(p, g, grid);
    REQUIRE(grid.cell_center(c) == doctest::Approx(p.center).epsilon(1e-14));

    SUBCASE("peak intensity at the centre")
    {
        CHECK(std::norm(f.a[c]) == doctest::Approx(p.peak_intensity).epsilon(1e-14));
    }
    SUBCASE("intensity FWHM")
    {
        const double z0 = p.sech_width(g.v_g);
        const double x = p.spatial_extent(g.v_g) / 2.0 / z0;
        CHECK(std::pow(1.0 / std::cosh(x), 2) == doctest::Approx(0.5).epsilon(1e-14));
    }
    SUBCASE("symmetric about the centre")
    {
        for (std::size_t k = 1; k < 500; ++k)
            CHECK(std::abs(f.a[c + k]) == doctest::Approx(std::abs(f.a[c - k])).epsilon(1e-13));
    }
    SUBCASE("backward component is empty")
    {
        for (const Complex& z : f.b) CHECK(z == Complex{});
    }
    SUBCASE("carrier phase advances by delta per cm")
    {
        const Complex ratio = f.a[c + 1] / f.a[c];
        CHECK(std::arg(ratio) == doctest::Approx(g.delta * grid.dz).epsilon(1e-12));
    }
    SUBCASE("content integral against the closed form")
    {
        const double z0 = p.sech_width(g.v_g);
        CHECK(photon_content(f, grid) == doctest::Approx(2.0 * z0 * p.peak_intensity).epsilon(1e-9));
    }
}

TEST_CASE("photon content")
{
    const Grid grid = build_grid(grating(), pulse());
    SUBCASE("zero field")
    {
        CHECK(photon_content(FieldPair(grid.n_z), grid) == 0.0);
    }
    SUBCASE("regions partition the integral")
    {
        GratingConfig g = grating();
        const FieldPair f = sech_pulse(pulse(), g, grid);
        FieldPair spread = f;
        for (std::size_t i = 0; i < grid.n_z; ++i) spread.b[i] = 0.1 * std::sin(0.001 * i);
        const double whole = photon_content(spread, grid);
        const double parts = photon_content(spread, grid, grid.lead_in) + photon_content(spread, grid, grid.grating) +
                             photon_content(spread, grid, grid.lead_out);
        CHECK(parts == doctest::Approx(whole).epsilon(1e-14));
    }
    SUBCASE("trapezoid quadrature of a constant")
    {
        FieldPair one(grid.n_z);
        for (auto& z : one.a) z = 1.0;
        CHECK(photon_content(one, grid) == doctest::Approx(grid.dz * (grid.n_z - 1)).epsilon(1e-13));
    }
}
