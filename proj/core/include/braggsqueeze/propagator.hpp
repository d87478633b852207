#pragma once

// Stepping engine shared by the classical, linearized and adjoint solvers.
//
// Fields are stored along characteristics: the forward component lives in a
// buffer read at an offset that moves one cell per step, the backward
// component likewise in the opposite direction. The exact advection shift
// is then an offset update, and only cells with non-trivial local dynamics
// (the "active" span) cost anything per step. Samples shifted out of the
// domain stay in the margins of the buffer, which makes boundary leakage
// measurable and inflow identically zero.
//
// All fields here are in the frame rotating with exp(i delta v_g t).

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "braggsqueeze/config.hpp"
#include "braggsqueeze/field.hpp"
#include "braggsqueeze/grid.hpp"
#include "braggsqueeze/local_flow.hpp"

namespace braggsqueeze {

/// Field pair stored along characteristics, as four real arrays.
class CharacteristicField {
public:
    /// `forward_steps` / `backward_steps`: how many shifts in each direction
    /// the buffers must absorb before inflow would read stale samples.
    CharacteristicField(const FieldPair& f, std::int64_t forward_steps, std::int64_t backward_steps);

    std::size_t size() const { return n_; }
    /// Sites [begin, begin + n) of the current window.
    local::SiteSpan span(std::size_t begin = 0)
    {
        return {ar_.data() + a_off_ + begin, ai_.data() + a_off_ + begin, br_.data() + b_off_ + begin,
                bi_.data() + b_off_ + begin};
    }
    local::ConstSiteSpan span(std::size_t begin = 0) const
    {
        return {ar_.data() + a_off_ + begin, ai_.data() + a_off_ + begin, br_.data() + b_off_ + begin,
                bi_.data() + b_off_ + begin};
    }
    Complex a(std::size_t i) const { return {ar_[a_off_ + i], ai_[a_off_ + i]}; }
    Complex b(std::size_t i) const { return {br_[b_off_ + i], bi_[b_off_ + i]}; }

    /// u_a moves one cell right, u_b one cell left, zero inflow.
    void shift_forward();
    /// Transpose of shift_forward.
    void shift_backward();

    FieldPair to_pair() const;
    /// Cells [r.begin, r.end) of the current window.
    FieldPair slice(CellRange r) const;

    /// Offsets and whole buffers, for reconstructing earlier lead fields
    /// from samples that no longer change once they leave the active span.
    std::int64_t a_offset() const { return a_off_; }
    std::int64_t b_offset() const { return b_off_; }
    std::vector<Complex> a_buffer() const;
    std::vector<Complex> b_buffer() const;
    /// Sum of |.|^2 over samples that have left the domain (not times dz).
    double leaked_sum() const;

private:
    std::vector<double> ar_, ai_, br_, bi_;
    std::size_t n_;
    std::size_t a_off_;
    std::size_t b_off_;
    std::int64_t fwd_left_;
    std::int64_t bwd_left_;
};

/// Kerr backgrounds of one step: [half][component][active cell], with
/// 8 * n_active doubles per step.
inline constexpr std::size_t kRecordDoublesPerSite = 8;

inline local::SiteSpan record_half(std::span<double> rec, std::size_t n_active, int half, std::size_t offset)
{
    double* p = rec.data() + static_cast<std::size_t>(half) * 4 * n_active + offset;
    return {p, p + n_active, p + 2 * n_active, p + 3 * n_active};
}

inline local::ConstSiteSpan record_half(std::span<const double> rec, std::size_t n_active, int half,
                                        std::size_t offset)
{
    const double* p = rec.data() + static_cast<std::size_t>(half) * 4 * n_active + offset;
    return {p, p + n_active, p + 2 * n_active, p + 3 * n_active};
}

/// Contiguous run of active cells with constant coefficients.
struct Segment {
    CellRange cells;
    local::SiteCoefficients coeff;
};

/// Active cells and their coefficients for a config/grid pair.
struct LocalModel {
    std::vector<Segment> segments;  // ordered, contiguous
    CellRange active;               // union of the segments

    static LocalModel make(const GratingConfig& g, const Grid& grid);
    std::size_t n_active() const { return active.size(); }
};

/// Per-step summary computed while stepping.
struct StepStats {
    double grating_peak = 0.0;       // max |a|^2 + |b|^2 over grating cells
    std::size_t grating_peak_cell = 0;
    double grating_content = 0.0;    // integral over grating cells
    bool finite = true;
};

/// Classical stepper. One step = local half, exact shift, local half.
class Propagator {
public:
    Propagator(const GratingConfig& g, const Grid& grid, const FieldPair& state, std::int64_t capacity);

    /// Advances one step. When `records` is non-empty it receives the
    /// Kerr backgrounds of both half-steps (see record_half).
    StepStats step(std::span<double> records = {});

    const LocalModel& model() const { return model_; }
    const CharacteristicField& field() const { return field_; }
    FieldPair state() const { return field_.to_pair(); }

    /// Remaining content heading into or sitting in the grating: grating
    /// cells plus u_a in the lead-in plus u_b in the lead-out.
    double pending_content() const;
    double leaked_content() const { return field_.leaked_sum() * grid_->dz; }
    /// Largest Kerr phase of the last half-step; must stay below kMaxKerrPhase.
    double max_kerr_phase() const { return max_phase_; }
    CharacteristicField release_field() && { return std::move(field_); }

private:
    const Grid* grid_;
    LocalModel model_;
    CharacteristicField field_;
    double max_phase_ = 0.0;
};

/// Applies one half-step linear map to a perturbation over the active span.
template <local::Map M>
void apply_half(CharacteristicField& p, const LocalModel& model, std::span<const double> records, int half)
{
    const std::size_t n_act = model.n_active();
    for (const Segment& seg : model.segments) {
        const std::size_t off = seg.cells.begin - model.active.begin;
        local::half_step_linear_span<M>(p.span(seg.cells.begin), seg.cells.size(), seg.coeff,
                                        record_half(records, n_act, half, off));
    }
}

/// One full linear step of a perturbation field given the records of the
/// matching classical step. Forward maps run first half, shift, second
/// half; inverse and transposed maps run the reverse sequence.
template <local::Map M>
void linear_step(CharacteristicField& p, const LocalModel& model, std::span<const double> records)
{
    if constexpr (M == local::Map::Tangent || M == local::Map::Adjoint) {
        apply_half<M>(p, model, records, 0);
        p.shift_forward();
        apply_half<M>(p, model, records, 1);
    } else {
        apply_half<M>(p, model, records, 1);
        p.shift_backward();
        apply_half<M>(p, model, records, 0);
    }
}

} // namespace braggsqueeze
