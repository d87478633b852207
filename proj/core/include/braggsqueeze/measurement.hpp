#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "braggsqueeze/adjoint.hpp"
#include "braggsqueeze/classical.hpp"

namespace braggsqueeze {

/// Which part of the output field the detector sees.
enum class ProjectionRegion { LeadOut, Whole };

std::string_view to_string(ProjectionRegion r);
/// Accepts "leadout" / "lead-out" / "whole".
std::optional<ProjectionRegion> parse_projection_region(std::string_view s);

/// Photon-number (direct detection) projection: the classical lab-frame
/// state at `step` (-1: final) restricted to the region. Not normalized.
/// Throws MeasurementError if it carries less than 1e-12 of the input.
PerturbationField photon_number_projection(const Trajectory& traj, ProjectionRegion region, std::int64_t step = -1);

/// Variance of <f|u(0)> for coherent-state input: photon content / 4.
/// Throws MeasurementError for a zero function.
double vacuum_variance(const PerturbationField& f, const Grid& grid);

struct SqueezeOptions {
    ProjectionRegion region = ProjectionRegion::LeadOut;
    /// Measurement times considered for the minimized ratio, including the
    /// final step, spread over the checkpoints after the transit completes.
    int max_measurements = 4;
};

struct Provenance {
    GratingConfig grating;
    double dz = 0.0;
    std::size_t n_z = 0;
    std::int64_t steps = 0;
    std::int64_t checkpoint_stride = 0;
};

struct SqueezeResult {
    double ratio = 1.0;      // R at the final step
    double ratio_db = 0.0;
    double ratio_min = 1.0;  // smallest R over the measurement times
    double ratio_min_db = 0.0;
    double transmission = 0.0;
    double reflection = 0.0;
    double measure_time = 0.0;      // ps, final step
    double min_measure_time = 0.0;  // ps, where ratio_min was attained
    ProjectionRegion region = ProjectionRegion::LeadOut;
    Provenance provenance;
};

/// Squeezing ratio of the photon-number projection: back-propagates the
/// projection through the adjoint equations and compares variances.
/// Throws ContainmentError if the transit is not complete.
SqueezeResult squeezing_ratio(const Trajectory& traj, const SqueezeOptions& opts = {});

/// Variance ratio of an arbitrary projection function measured at m.step:
/// vacuum_variance(back-propagated f) / vacuum_variance(f). Invariant
/// under f -> c f for any nonzero real c.
double projection_ratio(const Measurement& m, const Trajectory& traj);

/// Steps at which squeezing_ratio evaluates R (ascending, final step last).
std::vector<std::int64_t> measurement_steps(const Trajectory& traj, int max_measurements);

inline double to_db(double ratio) { return 10.0 * std::log10(ratio); }

} // namespace braggsqueeze
