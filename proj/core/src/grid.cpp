#include "braggsqueeze/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "braggsqueeze/errors.hpp"

namespace braggsqueeze {

std::string_view to_string(Region r)
{
    switch (r) {
    case Region::LeadIn: return "lead-in";
    case Region::Grating: return "grating";
    case Region::LeadOut: return "lead-out";
    }
    return "?";
}

CellRange Grid::range(Region r) const
{
    switch (r) {
    case Region::LeadIn: return lead_in;
    case Region::Grating: return grating;
    case Region::LeadOut: return lead_out;
    }
    return {};
}

double max_admissible_dz(const GratingConfig& g, const PulseConfig& p)
{
    double bound = p.spatial_extent(g.v_g) / 100.0;
    if (g.kappa > 0.0) bound = std::min(bound, 0.05 / g.kappa);
    return bound;
}

namespace {

std::size_t cells_for(double length, double dz)
{
    // tolerate lengths that are an exact multiple of dz up to rounding
    return static_cast<std::size_t>(std::ceil(length / dz - 1e-9));
}

} // namespace

Grid build_grid(const GratingConfig& g, const PulseConfig& p, const GridOptions& opts)
{
    validate_pair(g, p);
    if (!(opts.resolution_factor >= 1.0)) throw ConfigError("resolution_factor must be >= 1");
    if (!(opts.window_margin >= 1.0) || !(opts.slowdown_factor >= 1.0))
        throw ConfigError("window_margin and slowdown_factor must be >= 1");

    const double bound = max_admissible_dz(g, p);
    double target = bound / opts.resolution_factor;
    if (opts.dz_override > 0.0) {
        if (opts.dz_override > bound * (1.0 + 1e-12))
            throw ConfigError("dz override " + std::to_string(opts.dz_override) +
                              " cm violates the resolution bound " + std::to_string(bound) + " cm");
        target = opts.dz_override;
    }

    Grid grid;
    const std::size_t n_grating = std::max<std::size_t>(1, cells_for(g.grating_length, target));
    grid.dz = g.grating_length / static_cast<double>(n_grating);
    grid.dt = grid.dz / g.v_g;

    const std::size_t n_in = cells_for(g.lead_in, grid.dz);
    const std::size_t n_out = cells_for(g.lead_out, grid.dz);
    grid.lead_in = {0, n_in};
    grid.grating = {n_in, n_in + n_grating};
    grid.lead_out = {n_in + n_grating, n_in + n_grating + n_out};
    grid.n_z = grid.lead_out.end;

    grid.region_map.resize(grid.n_z);
    std::fill(grid.region_map.begin(), grid.region_map.begin() + n_in, Region::LeadIn);
    std::fill(grid.region_map.begin() + n_in, grid.region_map.begin() + n_in + n_grating, Region::Grating);
    std::fill(grid.region_map.begin() + n_in + n_grating, grid.region_map.end(), Region::LeadOut);

    // Time for the pulse to reach the grating, cross it at the worst-case
    // reduced group velocity and clear the exit by two pulse widths.
    grid.n_t = static_cast<std::int64_t>(std::ceil(window_travel(g, p, opts) / grid.dz));
    return grid;
}

double window_travel(const GratingConfig& g, const PulseConfig& p, const GridOptions& opts)
{
    const double extent = p.spatial_extent(g.v_g);
    const double path = (g.lead_in - p.center) + opts.slowdown_factor * g.grating_length + 2.0 * extent;
    return opts.window_margin * path;
}

void fit_leads(GratingConfig& g, PulseConfig& p, const GridOptions& opts, double launch_gap_widths)
{
    g.validate();
    p.validate();
    const double extent = p.spatial_extent(g.v_g);
    const double gap = launch_gap_widths * extent;
    // the sech^2 tail beyond 8 FWHMs carries < 1e-12 of the content
    const double tail = 8.0 * extent;
    g.lead_in = gap;  // only the gap enters the window length
    p.center = 0.0;
    const double travel = window_travel(g, p, opts);
    // reflected light can run back from the entrance for the rest of the
    // window; transmitted light can run out from the exit likewise
    g.lead_in = std::max(gap + tail, travel - gap + tail);
    g.lead_out = std::max(2.0 * extent, travel - gap - g.grating_length + tail);
    p.center = g.lead_in - gap;
}

} // namespace braggsqueeze
