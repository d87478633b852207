#include "braggsqueeze/measurement.hpp"

#include <algorithm>
#include <cmath>

#include "braggsqueeze/errors.hpp"

namespace braggsqueeze {

std::string_view to_string(ProjectionRegion r) { return r == ProjectionRegion::LeadOut ? "leadout" : "whole"; }

std::optional<ProjectionRegion> parse_projection_region(std::string_view s)
{
    if (s == "leadout" || s == "lead-out" || s == "lead_out") return ProjectionRegion::LeadOut;
    if (s == "whole") return ProjectionRegion::Whole;
    return std::nullopt;
}

PerturbationField photon_number_projection(const Trajectory& traj, ProjectionRegion region, std::int64_t step)
{
    const Grid& grid = traj.grid();
    const std::int64_t n = step < 0 ? traj.steps() : step;
    FieldPair f = traj.state_at(n);
    if (region == ProjectionRegion::LeadOut) f = restrict_to(f, grid.lead_out);
    const double content = photon_content(f, grid);
    if (!(content >= 1e-12 * traj.initial_content()) || content <= 0.0)
        throw MeasurementError("projection region '" + std::string(to_string(region)) +
                               "' holds no field; the measurement is undefined");
    return PerturbationField(std::move(f));
}

double vacuum_variance(const PerturbationField& f, const Grid& grid)
{
    const double v = 0.25 * photon_content(f.pair, grid);
    if (!(v > 0.0)) throw MeasurementError("vacuum variance of a zero projection function");
    return v;
}

double projection_ratio(const Measurement& m, const Trajectory& traj)
{
    const PerturbationField back = back_propagate(m.f, traj, m.step);
    return vacuum_variance(back, traj.grid()) / vacuum_variance(m.f, traj.grid());
}

std::vector<std::int64_t> measurement_steps(const Trajectory& traj, int max_measurements)
{
    const std::int64_t last = traj.steps();
    std::vector<std::int64_t> candidates;
    const std::int64_t done = traj.completion_step();
    if (done >= 0) {
        for (std::size_t k = 0; k < traj.checkpoint_count(); ++k) {
            const std::int64_t s = traj.checkpoint_step(k);
            if (s >= done && s > 0 && s < last) candidates.push_back(s);
        }
    }
    std::vector<std::int64_t> steps;
    const auto extra = static_cast<std::size_t>(std::max(0, max_measurements - 1));
    if (candidates.size() <= extra) {
        steps = candidates;
    } else if (extra > 0) {
        // evenly spaced picks, always including the earliest
        for (std::size_t j = 0; j < extra; ++j) steps.push_back(candidates[j * candidates.size() / extra]);
    }
    steps.push_back(last);
    return steps;
}

SqueezeResult squeezing_ratio(const Trajectory& traj, const SqueezeOptions& opts)
{
    const Grid& grid = traj.grid();
    const TransitReport tr = transit(traj);

    const std::vector<std::int64_t> steps = measurement_steps(traj, opts.max_measurements);
    std::vector<Measurement> ms;
    ms.reserve(steps.size());
    for (std::int64_t s : steps) ms.push_back({photon_number_projection(traj, opts.region, s), s});
    const std::vector<PerturbationField> back = back_propagate(ms, traj);

    SqueezeResult r;
    r.region = opts.region;
    r.transmission = tr.transmission;
    r.reflection = tr.reflection;
    r.ratio_min = 0.0;
    for (std::size_t k = 0; k < ms.size(); ++k) {
        const double ratio = vacuum_variance(back[k], grid) / vacuum_variance(ms[k].f, grid);
        if (!std::isfinite(ratio) || ratio <= 0.0) throw NumericalError("invalid squeezing ratio", ms[k].step);
        const double t = static_cast<double>(ms[k].step) * grid.dt;
        if (k == 0 || ratio < r.ratio_min) {
            r.ratio_min = ratio;
            r.min_measure_time = t;
        }
        if (k + 1 == ms.size()) {
            r.ratio = ratio;
            r.measure_time = t;
        }
    }
    r.ratio_db = to_db(r.ratio);
    r.ratio_min_db = to_db(r.ratio_min);
    r.provenance = {traj.config(), grid.dz, grid.n_z, traj.steps(), traj.checkpoint_stride()};
    return r;
}

} // namespace braggsqueeze
