#include "braggsqueeze/classical.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "braggsqueeze/errors.hpp"

namespace braggsqueeze {

FieldPair ncme_step(const FieldPair& state, const GratingConfig& g, const Grid& grid)
{
    if (state.size() != grid.n_z || !state.consistent()) throw GridMismatch("state does not match grid");
    Propagator prop(g, grid, state, 1);
    prop.step();
    FieldPair out = prop.state();
    out *= std::polar(1.0, g.delta * grid.dz);
    if (!out.all_finite()) throw NumericalError("non-finite field after coupled-mode step", 1);
    return out;
}

std::size_t default_memory_budget_bytes()
{
    constexpr std::size_t mb = 1024 * 1024;
    if (const char* env = std::getenv("BRAGGSQUEEZE_MEM_BUDGET_MB")) {
        char* end = nullptr;
        const long long v = std::strtoll(env, &end, 10);
        if (end != env && v > 0) return static_cast<std::size_t>(v) * mb;
    }
    return 1024 * mb;
}

Complex Trajectory::frame_phase(std::int64_t step) const
{
    return std::polar(1.0, config_.delta * grid_.dz * static_cast<double>(step));
}

bool Trajectory::has_state(std::int64_t step) const
{
    if (step == steps_) return true;
    return step >= 0 && step % stride_ == 0 && static_cast<std::size_t>(step / stride_) < checkpoints_.size();
}

FieldPair Trajectory::rotating_state_at(std::int64_t step) const
{
    if (step == steps_) return final_rotating_;
    if (!has_state(step)) throw std::out_of_range("no stored state at step " + std::to_string(step));
    const FieldPair& cp = checkpoints_[static_cast<std::size_t>(step / stride_)];
    const CellRange act = model_.active;
    const std::size_t n_z = grid_.n_z;
    FieldPair f(n_z);
    std::copy(cp.a.begin(), cp.a.end(), f.a.begin() + static_cast<std::ptrdiff_t>(act.begin));
    std::copy(cp.b.begin(), cp.b.end(), f.b.begin() + static_cast<std::ptrdiff_t>(act.begin));
    if (act.size() == n_z) return f;

    const std::int64_t back = steps_ - step;
    const std::int64_t a_off = final_a_offset_ + back;
    const std::int64_t b_off = final_b_offset_ - back;
    const auto n = static_cast<std::size_t>(step);
    for (std::size_t i = 0; i < act.begin; ++i) {
        f.a[i] = i >= n ? initial_.a[i - n] : Complex{};
        f.b[i] = final_b_buffer_[static_cast<std::size_t>(b_off + static_cast<std::int64_t>(i))];
    }
    for (std::size_t i = act.end; i < n_z; ++i) {
        f.a[i] = final_a_buffer_[static_cast<std::size_t>(a_off + static_cast<std::int64_t>(i))];
        f.b[i] = i + n < n_z ? initial_.b[i + n] : Complex{};
    }
    return f;
}

FieldPair Trajectory::state_at(std::int64_t step) const
{
    FieldPair f = rotating_state_at(step);
    f *= frame_phase(step);
    return f;
}

std::size_t Trajectory::stored_bytes() const
{
    std::size_t bytes = (final_a_buffer_.size() + final_b_buffer_.size()) * sizeof(Complex);
    bytes += 2 * (initial_.size() + final_rotating_.size()) * sizeof(Complex);
    for (const auto& cp : checkpoints_) bytes += 2 * cp.size() * sizeof(Complex);
    return bytes;
}

FieldPair Trajectory::replay(std::int64_t first, std::int64_t count, std::span<double> records) const
{
    if (first % stride_ != 0 || first < 0 || count < 0 || first + count > steps_)
        throw std::out_of_range("replay window does not start at a checkpoint or exceeds the run");
    const std::size_t per_step = kRecordDoublesPerSite * model_.n_active();
    if (records.size() < per_step * static_cast<std::size_t>(count))
        throw std::invalid_argument("replay record buffer too small");
    Propagator prop(config_, grid_, rotating_state_at(first), count);
    for (std::int64_t s = 0; s < count; ++s)
        prop.step(records.subspan(static_cast<std::size_t>(s) * per_step, per_step));
    return prop.state();
}

namespace {

constexpr std::int64_t kPendingInterval = 16;

FieldPair active_part(const Propagator& prop) { return prop.field().slice(prop.model().active); }

} // namespace

Trajectory evolve(const FieldPair& init, const GratingConfig& g, const Grid& grid, const EvolveOptions& opts)
{
    g.validate();
    if (init.size() != grid.n_z || !init.consistent()) throw GridMismatch("initial state does not match grid");
    if (!init.all_finite()) throw NumericalError("non-finite initial state", 0);

    Trajectory t;
    t.config_ = g;
    t.grid_ = grid;
    t.model_ = LocalModel::make(g, grid);
    t.initial_ = init;
    t.initial_content_ = photon_content(init, grid);

    const std::int64_t max_steps = opts.max_steps > 0 ? opts.max_steps : grid.n_t;
    if (opts.checkpoint_stride > 0) {
        t.stride_ = opts.checkpoint_stride;
    } else {
        const std::size_t budget =
            opts.memory_budget_bytes > 0 ? opts.memory_budget_bytes : default_memory_budget_bytes();
        const std::size_t per_step = std::max<std::size_t>(1, t.record_bytes_per_step());
        const std::size_t per_checkpoint = 2 * t.model_.n_active() * sizeof(Complex);
        std::int64_t stride = static_cast<std::int64_t>(budget / per_step);
        // keep the checkpoints themselves within the budget as well
        const auto checkpoints_fit =
            static_cast<std::int64_t>((static_cast<double>(max_steps) * per_checkpoint) / static_cast<double>(budget)) + 1;
        stride = std::max(stride, checkpoints_fit);
        t.stride_ = std::clamp<std::int64_t>(stride, 1, std::max<std::int64_t>(1, max_steps));
    }

    Propagator prop(g, grid, init, max_steps);
    const double settle = opts.settle_tolerance * t.initial_content_;
    const double complete = kContainmentTolerance * t.initial_content_;
    t.peak_trace_.reserve(static_cast<std::size_t>(std::min<std::int64_t>(max_steps, 1 << 20)));

    std::int64_t n = 0;
    while (n < max_steps) {
        if (n % t.stride_ == 0) t.checkpoints_.push_back(active_part(prop));
        const StepStats s = prop.step();
        ++n;
        if (!s.finite) throw NumericalError("non-finite field in the grating", n);
        if (prop.max_kerr_phase() > local::kMaxKerrPhase)
            throw NumericalError("Kerr phase per half-step exceeds pi/4; refine dz", n);
        t.peak_trace_.push_back(s.grating_peak);
        t.peak_cell_.push_back(s.grating_peak_cell);
        t.grating_content_.push_back(s.grating_content);
        if (opts.stop && opts.stop(n, s)) break;

        // Pending content only decreases; it is sampled every few steps once
        // the grating itself is nearly empty.
        if (n % kPendingInterval == 0 && s.grating_content <= std::max(settle, complete)) {
            const double pending = prop.pending_content();
            if (t.completion_step_ < 0 && pending <= complete) t.completion_step_ = n;
            if (opts.settle_tolerance >= 0.0 && pending <= settle) break;
        }
    }
    t.steps_ = n;
    t.final_rotating_ = prop.state();
    if (!t.final_rotating_.all_finite()) throw NumericalError("non-finite final state", n);
    t.leaked_ = prop.leaked_content();
    CharacteristicField last = std::move(prop).release_field();
    t.final_a_offset_ = last.a_offset();
    t.final_b_offset_ = last.b_offset();
    t.final_a_buffer_ = last.a_buffer();
    t.final_b_buffer_ = last.b_buffer();
    return t;
}

TransitReport transit(const Trajectory& traj)
{
    const Grid& grid = traj.grid();
    const FieldPair f = traj.rotating_state_at(traj.steps());
    const double in = traj.initial_content();
    if (in <= 0.0) throw MeasurementError("transmission undefined for a zero input field");
    TransitReport r;
    r.transmission = photon_content(f, grid, grid.lead_out) / in;
    r.reflection = photon_content(f, grid, grid.lead_in) / in;
    r.residual = photon_content(f, grid, grid.grating) / in;
    r.leaked = traj.leaked_content() / in;
    if (r.residual > kContainmentTolerance || r.leaked > kContainmentTolerance) {
        throw ContainmentError("transit not contained after " + std::to_string(traj.steps()) +
                                   " steps: residual in grating " + std::to_string(r.residual) +
                                   ", leaked through domain edges " + std::to_string(r.leaked) +
                                   " (fractions of input); lengthen the time window or the lead regions",
                               r.residual, r.leaked);
    }
    return r;
}

double transmission(const Trajectory& traj) { return transit(traj).transmission; }

std::string_view to_string(PeakRegime r)
{
    switch (r) {
    case PeakRegime::Decay: return "decay";
    case PeakRegime::Flat: return "flat";
    case PeakRegime::Oscillate: return "oscillate";
    case PeakRegime::Undetermined: return "undetermined";
    }
    return "?";
}

PeakClassification classify_peak_trace(const Trajectory& traj, double pulse_extent, const ClassifierOptions& opts)
{
    PeakClassification c;
    const Grid& grid = traj.grid();
    const auto& peaks = traj.peak_trace();
    const auto& cells = traj.peak_cell_trace();
    const auto margin = static_cast<std::size_t>(std::ceil(opts.edge_margin_widths * pulse_extent / grid.dz));
    if (grid.grating.size() <= 2 * margin) return c;
    const std::size_t lo = grid.grating.begin + margin;
    const std::size_t hi = grid.grating.end - margin;

    std::int64_t first = -1;
    std::int64_t last = -1;
    // first contiguous pass of the peak through the interior of the grating
    for (std::size_t n = 0; n < peaks.size(); ++n) {
        const bool inside = cells[n] >= lo && cells[n] < hi && peaks[n] > 0.0;
        if (inside) {
            if (first < 0) first = static_cast<std::int64_t>(n);
            last = static_cast<std::int64_t>(n);
        } else if (first >= 0) {
            break;
        }
    }
    if (first < 0 || last - first < 2) return c;

    c.first_step = first + 1;
    c.last_step = last + 1;
    c.reference = peaks[static_cast<std::size_t>(first)];
    double mn = 1e300;
    double mx = 0.0;
    for (std::int64_t n = first; n <= last; ++n) {
        const double r = peaks[static_cast<std::size_t>(n)] / c.reference;
        mn = std::min(mn, r);
        mx = std::max(mx, r);
    }
    c.min_ratio = mn;
    c.max_ratio = mx;
    c.final_ratio = peaks[static_cast<std::size_t>(last)] / c.reference;

    // Prominent interior maxima: a running maximum that is later undercut by
    // more than the band counts once.
    {
        double candidate = peaks[static_cast<std::size_t>(first)] / c.reference;
        double trough = candidate;
        bool rising = false;
        for (std::int64_t n = first + 1; n <= last; ++n) {
            const double r = peaks[static_cast<std::size_t>(n)] / c.reference;
            if (rising) {
                if (r > candidate) candidate = r;
                else if (candidate - r > opts.band) {
                    ++c.prominent_maxima;
                    rising = false;
                    trough = r;
                }
            } else {
                if (r < trough) trough = r;
                else if (r - trough > opts.band) {
                    rising = true;
                    candidate = r;
                }
            }
        }
        // a trace that ends on a prominent rise has its last maximum at the end
        if (rising && candidate - trough > opts.band) ++c.prominent_maxima;
    }

    if (mx <= 1.0 + opts.band && mn >= 1.0 - opts.band) c.regime = PeakRegime::Flat;
    else if (mx > 1.0 + opts.band || c.prominent_maxima >= 2) c.regime = PeakRegime::Oscillate;
    else c.regime = PeakRegime::Decay;
    return c;
}

} // namespace braggsqueeze
