#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

#include "braggsqueeze/config.hpp"
#include "braggsqueeze/field.hpp"
#include "braggsqueeze/grid.hpp"
#include "braggsqueeze/local_flow.hpp"
#include "braggsqueeze/propagator.hpp"

namespace braggsqueeze {

/// One time step dt of the nonlinear coupled-mode equations on a field
/// pair in the lab frame: local half-step, exact one-cell shift (u_a right,
/// u_b left, zero inflow), local half-step, detuning phase exp(i delta dz).
/// Throws NumericalError if the result is not finite.
FieldPair ncme_step(const FieldPair& state, const GratingConfig& g, const Grid& grid);

/// Default budget for dense replay buffers; BRAGGSQUEEZE_MEM_BUDGET_MB overrides.
std::size_t default_memory_budget_bytes();

struct EvolveOptions {
    /// Steps between checkpoints; 0 derives it from the memory budget.
    std::int64_t checkpoint_stride = 0;
    std::size_t memory_budget_bytes = 0;  // 0 -> default_memory_budget_bytes()
    /// Stop once the content still in or heading into the grating falls
    /// below this fraction of the input. Negative disables early stopping.
    double settle_tolerance = 1e-6;
    /// Steps to cap the run at; 0 -> grid.n_t.
    std::int64_t max_steps = 0;
    /// Optional early stop, called after every step with its index (1-based).
    std::function<bool(std::int64_t, const StepStats&)> stop;
};

/// Checkpointed record of a classical run. Immutable once built, safe to
/// share across threads. Dense per-step backgrounds are never kept: a
/// window of steps is recomputed from its checkpoint with the same stepper,
/// which reproduces the original run bit for bit.
///
/// Checkpoints hold only the active span. When the leads are inert (pure
/// transport in the rotating frame) their fields at a checkpoint follow from
/// the initial state (incoming components) and from the final
/// characteristic buffers (outgoing components, frozen once emitted).
class Trajectory {
public:
    const GratingConfig& config() const { return config_; }
    const Grid& grid() const { return grid_; }
    const LocalModel& model() const { return model_; }

    std::int64_t steps() const { return steps_; }
    std::int64_t checkpoint_stride() const { return stride_; }
    std::size_t checkpoint_count() const { return checkpoints_.size(); }
    /// Step index of checkpoint k (k * stride).
    std::int64_t checkpoint_step(std::size_t k) const { return static_cast<std::int64_t>(k) * stride_; }

    double measure_time() const { return static_cast<double>(steps_) * grid_.dt; }

    /// Lab-frame phase factor exp(i delta v_g t) at `step`.
    Complex frame_phase(std::int64_t step) const;

    const FieldPair& initial_state() const { return initial_; }
    /// Lab-frame state at a checkpoint step or the final step.
    FieldPair state_at(std::int64_t step) const;
    FieldPair final_state() const { return state_at(steps_); }
    /// Rotating-frame state at a checkpoint step or the final step.
    FieldPair rotating_state_at(std::int64_t step) const;
    bool has_state(std::int64_t step) const;
    /// Active-span samples stored for checkpoint k.
    const FieldPair& checkpoint_active(std::size_t k) const { return checkpoints_.at(k); }

    double initial_content() const { return initial_content_; }
    /// Content outside the domain at the end of the run.
    double leaked_content() const { return leaked_; }

    /// In-grating peak intensity and its cell after each step (index n is
    /// the state after step n + 1).
    const std::vector<double>& peak_trace() const { return peak_trace_; }
    const std::vector<std::size_t>& peak_cell_trace() const { return peak_cell_; }
    const std::vector<double>& grating_content_trace() const { return grating_content_; }

    /// First step at which pending content fell below 1e-4 of the input,
    /// or -1 if that never happened.
    std::int64_t completion_step() const { return completion_step_; }

    /// Recomputes steps [first, first + count) from the checkpoint at
    /// `first` (which must be a checkpoint step), writing the Kerr
    /// records per step into `records`. Returns the rotating-frame state
    /// after the last replayed step.
    FieldPair replay(std::int64_t first, std::int64_t count, std::span<double> records) const;

    /// Dense replay bytes per step.
    std::size_t record_bytes_per_step() const { return kRecordDoublesPerSite * model_.n_active() * sizeof(double); }

    /// Memory held by checkpoints and buffers, bytes.
    std::size_t stored_bytes() const;

private:
    friend Trajectory evolve(const FieldPair&, const GratingConfig&, const Grid&, const EvolveOptions&);

    GratingConfig config_;
    Grid grid_;
    LocalModel model_;
    std::int64_t steps_ = 0;
    std::int64_t stride_ = 1;
    FieldPair initial_;
    std::vector<FieldPair> checkpoints_;  // active span, rotating frame
    FieldPair final_rotating_;
    std::vector<Complex> final_a_buffer_;
    std::vector<Complex> final_b_buffer_;
    std::int64_t final_a_offset_ = 0;
    std::int64_t final_b_offset_ = 0;
    std::vector<double> peak_trace_;
    std::vector<std::size_t> peak_cell_;
    std::vector<double> grating_content_;
    double initial_content_ = 0.0;
    double leaked_ = 0.0;
    std::int64_t completion_step_ = -1;
};

/// Integrates the classical equations from `init` (lab frame at t = 0).
/// Throws NumericalError carrying the failing step index.
Trajectory evolve(const FieldPair& init, const GratingConfig& g, const Grid& grid, const EvolveOptions& opts = {});

/// Energy balance of a finished transit, fractions of the input content.
struct TransitReport {
    double transmission = 0.0;
    double reflection = 0.0;
    double residual = 0.0;  // still inside the grating
    double leaked = 0.0;    // left the computational domain
};

/// Fraction bound used by the containment check.
inline constexpr double kContainmentTolerance = 1e-4;

/// Transmission/reflection of the final state. Throws ContainmentError if
/// more than kContainmentTolerance of the input is still in the grating or
/// has left the domain.
TransitReport transit(const Trajectory& traj);
double transmission(const Trajectory& traj);

// ---- peak-trace classification ---------------------------------------------

enum class PeakRegime { Decay, Flat, Oscillate, Undetermined };

std::string_view to_string(PeakRegime r);

struct ClassifierOptions {
    /// Relative band around the post-entry reference value.
    double band = 0.02;
    /// Distance, in pulse spatial FWHMs, that the peak must be inside the
    /// grating (from either end) for a step to count as post-entry.
    double edge_margin_widths = 4.0;
};

struct PeakClassification {
    PeakRegime regime = PeakRegime::Undetermined;
    double reference = 0.0;    // peak intensity at the start of the segment
    double min_ratio = 0.0;    // min / reference over the segment
    double max_ratio = 0.0;    // max / reference over the segment
    double final_ratio = 0.0;  // value at segment end / reference
    int prominent_maxima = 0;  // interior local maxima standing out by > band
    std::int64_t first_step = 0;
    std::int64_t last_step = 0;
};

/// Classifies the in-grating peak-intensity trace of a run:
/// Flat if it stays within +-band of the reference, Oscillate if it rises
/// above the band or shows two or more prominent maxima, Decay otherwise.
PeakClassification classify_peak_trace(const Trajectory& traj, double pulse_extent,
                                       const ClassifierOptions& opts = {});

} // namespace braggsqueeze
