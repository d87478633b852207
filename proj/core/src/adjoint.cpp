#include "braggsqueeze/adjoint.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <string>

#include "braggsqueeze/errors.hpp"
#include "braggsqueeze/propagator.hpp"

namespace braggsqueeze {

namespace {

using local::Map;

void check_sizes(const FieldPair& f, const Grid& grid, const char* what)
{
    if (f.size() != grid.n_z || !f.consistent()) throw GridMismatch(std::string(what) + " does not match grid");
}

template <Map M>
PerturbationField single_step(const PerturbationField& p, const FieldPair& background, const GratingConfig& g,
                              const Grid& grid)
{
    check_sizes(p.pair, grid, "perturbation");
    check_sizes(background, grid, "background");
    Propagator prop(g, grid, background, 1);
    std::vector<double> records(kRecordDoublesPerSite * prop.model().n_active());
    prop.step(records);

    constexpr bool forward = M == Map::Tangent || M == Map::Adjoint;
    const Complex phase = std::polar(1.0, g.delta * grid.dz);
    CharacteristicField f(forward ? p.pair : std::conj(phase) * p.pair, 1, 1);
    linear_step<M>(f, prop.model(), records);
    PerturbationField out(f.to_pair());
    if (forward) out.pair *= phase;
    if (!out.pair.all_finite()) throw NumericalError("non-finite perturbation", 1);
    return out;
}

} // namespace

PerturbationField linearized_step(const PerturbationField& p, const FieldPair& background, const GratingConfig& g,
                                  const Grid& grid, Direction dir)
{
    return dir == Direction::Forward ? single_step<Map::Tangent>(p, background, g, grid)
                                     : single_step<Map::TangentInverse>(p, background, g, grid);
}

PerturbationField adjoint_step(const PerturbationField& p, const FieldPair& background, const GratingConfig& g,
                               const Grid& grid, Direction dir)
{
    return dir == Direction::Forward ? single_step<Map::Adjoint>(p, background, g, grid)
                                     : single_step<Map::AdjointInverse>(p, background, g, grid);
}

double inner_product(const PerturbationField& f, const PerturbationField& g, const Grid& grid)
{
    check_sizes(f.pair, grid, "first field");
    check_sizes(g.pair, grid, "second field");
    double s = 0.0;
    for (std::size_t i = 0; i < grid.n_z; ++i) {
        const double v = f.pair.a[i].real() * g.pair.a[i].real() + f.pair.a[i].imag() * g.pair.a[i].imag() +
                         f.pair.b[i].real() * g.pair.b[i].real() + f.pair.b[i].imag() * g.pair.b[i].imag();
        s += trapezoid_weight(i, grid.n_z) * v;
    }
    return s * grid.dz;
}

std::vector<PerturbationField> back_propagate(std::span<const Measurement> measurements, const Trajectory& traj)
{
    const Grid& grid = traj.grid();
    for (const Measurement& m : measurements) {
        check_sizes(m.f.pair, grid, "projection function");
        if (!traj.has_state(m.step))
            throw std::out_of_range("trajectory does not cover measurement step " + std::to_string(m.step));
    }
    std::vector<PerturbationField> out(measurements.size());
    std::vector<std::size_t> order(measurements.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return measurements[x].step > measurements[y].step; });

    std::vector<std::optional<CharacteristicField>> live(measurements.size());
    std::size_t next = 0;  // position in `order` of the next measurement to start
    auto activate = [&](std::int64_t n) {
        while (next < order.size() && measurements[order[next]].step == n) {
            const Measurement& m = measurements[order[next]];
            live[order[next]].emplace(std::conj(traj.frame_phase(n)) * m.f.pair, 0, n);
            ++next;
        }
    };

    const std::int64_t top = order.empty() ? 0 : measurements[order.front()].step;
    const std::int64_t stride = traj.checkpoint_stride();
    const std::size_t per_step = kRecordDoublesPerSite * traj.model().n_active();
    std::vector<double> records;
    std::int64_t end = top;
    while (end > 0) {
        const std::int64_t first = ((end - 1) / stride) * stride;
        const std::int64_t count = end - first;
        records.resize(per_step * static_cast<std::size_t>(count));
        traj.replay(first, count, records);
        for (std::int64_t s = count - 1; s >= 0; --s) {
            const std::int64_t n = first + s + 1;
            activate(n);
            const std::span<const double> rec(records.data() + per_step * static_cast<std::size_t>(s), per_step);
            for (auto& f : live)
                if (f) linear_step<Map::AdjointInverse>(*f, traj.model(), rec);
        }
        end = first;
    }
    activate(0);

    for (std::size_t k = 0; k < measurements.size(); ++k) {
        out[k] = PerturbationField(live[k]->to_pair());
        if (!out[k].pair.all_finite()) throw NumericalError("non-finite back-propagated field", 0);
    }
    return out;
}

PerturbationField back_propagate(const PerturbationField& f, const Trajectory& traj, std::int64_t measure_step)
{
    const Measurement m{f, measure_step < 0 ? traj.steps() : measure_step};
    return std::move(back_propagate(std::span<const Measurement>(&m, 1), traj).front());
}

std::vector<PerturbationField> forward_solve(const Trajectory& traj, std::span<const Equation> equations,
                                             std::vector<PerturbationField> initial, std::int64_t end_step,
                                             const StepObserver& observer)
{
    const Grid& grid = traj.grid();
    if (equations.size() != initial.size()) throw std::invalid_argument("one equation per initial field required");
    const std::int64_t end = end_step < 0 ? traj.steps() : end_step;
    if (end > traj.steps()) throw std::out_of_range("trajectory shorter than the requested solve");
    for (const auto& p : initial) check_sizes(p.pair, grid, "initial perturbation");

    std::vector<CharacteristicField> fields;
    fields.reserve(initial.size());
    for (const auto& p : initial) fields.emplace_back(p.pair, end, 0);

    auto observe = [&](std::int64_t n) {
        if (!observer) return;
        std::vector<PerturbationField> lab;
        lab.reserve(fields.size());
        for (const auto& f : fields) {
            FieldPair pair = f.to_pair();
            pair *= traj.frame_phase(n);
            lab.emplace_back(std::move(pair));
        }
        observer(n, lab);
    };
    observe(0);

    const std::int64_t stride = traj.checkpoint_stride();
    const std::size_t per_step = kRecordDoublesPerSite * traj.model().n_active();
    std::vector<double> records;
    for (std::int64_t first = 0; first < end; first += stride) {
        const std::int64_t count = std::min(stride, end - first);
        records.resize(per_step * static_cast<std::size_t>(count));
        traj.replay(first, count, records);
        for (std::int64_t s = 0; s < count; ++s) {
            const std::span<const double> rec(records.data() + per_step * static_cast<std::size_t>(s), per_step);
            for (std::size_t k = 0; k < fields.size(); ++k) {
                if (equations[k] == Equation::Linearized) linear_step<Map::Tangent>(fields[k], traj.model(), rec);
                else linear_step<Map::Adjoint>(fields[k], traj.model(), rec);
            }
        }
        observe(first + count);
    }

    std::vector<PerturbationField> out;
    out.reserve(fields.size());
    for (const auto& f : fields) {
        FieldPair pair = f.to_pair();
        pair *= traj.frame_phase(end);
        if (!pair.all_finite()) throw NumericalError("non-finite perturbation", end);
        out.emplace_back(std::move(pair));
    }
    return out;
}

} // namespace braggsqueeze
