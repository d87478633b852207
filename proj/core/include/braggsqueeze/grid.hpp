#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "braggsqueeze/config.hpp"

namespace braggsqueeze {

enum class Region : std::uint8_t { LeadIn, Grating, LeadOut };

std::string_view to_string(Region r);

/// Half-open range of cell indices.
struct CellRange {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t size() const { return end - begin; }
    bool contains(std::size_t i) const { return i >= begin && i < end; }
    bool operator==(const CellRange&) const = default;
};

struct GridOptions {
    /// Divides the maximal admissible dz; 2 halves the step, 4 quarters it.
    double resolution_factor = 1.0;
    /// Explicit dz, cm. Must still satisfy the resolution bound.
    double dz_override = 0.0;
    /// Transit-time margin and worst-case in-grating slow-down used to size n_t.
    double window_margin = 2.0;
    double slowdown_factor = 5.0;
};

/// Characteristics-aligned grid: cell i is centred at (i + 1/2) dz and
/// dt * v_g == dz, so advection over one step is an exact one-cell shift.
struct Grid {
    double dz = 0.0;  // cm
    double dt = 0.0;  // ps
    std::size_t n_z = 0;
    std::int64_t n_t = 0;
    CellRange lead_in;
    CellRange grating;
    CellRange lead_out;
    std::vector<Region> region_map;

    double length() const { return dz * static_cast<double>(n_z); }
    double cell_center(std::size_t i) const { return (static_cast<double>(i) + 0.5) * dz; }
    CellRange range(Region r) const;
    CellRange whole() const { return {0, n_z}; }
    bool operator==(const Grid&) const = default;
};

/// Largest dz admitted for the given configs:
/// min(0.05 / kappa, spatial pulse extent / 100).
double max_admissible_dz(const GratingConfig& g, const PulseConfig& p);

/// Distance light travels during the time window, cm: the launch gap, the
/// grating at the worst-case slow-down and two pulse widths, times the margin.
double window_travel(const GratingConfig& g, const PulseConfig& p, const GridOptions& opts = {});

/// Places the pulse `launch_gap_widths` spatial FWHMs before the grating and
/// sizes both leads so that no light reaches a domain edge within the time
/// window, keeping the domain closed for the whole run.
void fit_leads(GratingConfig& g, PulseConfig& p, const GridOptions& opts = {}, double launch_gap_widths = 4.0);

/// Builds the grid. The grating is an integer number of cells so that its
/// discrete length equals grating_length exactly; the leads are rounded up.
/// Throws ConfigError on invalid configs or a dz that violates the bound.
Grid build_grid(const GratingConfig& g, const PulseConfig& p, const GridOptions& opts = {});

} // namespace braggsqueeze
