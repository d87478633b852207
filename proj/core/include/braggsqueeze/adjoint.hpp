#pragma once

// Linearized fluctuation equations and their adjoint around a classical
// background.
//
// The discrete linearized step is the exact derivative of the classical
// step (ncme_step) with respect to its input, taken over the reals: each
// site is a real 4-vector (Re a, Im a, Re b, Im b). The discrete adjoint
// step forward in time is the inverse transpose of that derivative, so
// inner_product(adjoint, linearized) is conserved step by step up to
// rounding. Going backward in time, the adjoint step is the transpose.
//
// All public functions take and return lab-frame fields.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "braggsqueeze/classical.hpp"
#include "braggsqueeze/config.hpp"
#include "braggsqueeze/field.hpp"
#include "braggsqueeze/grid.hpp"

namespace braggsqueeze {

/// c-number mode function of the quantum fluctuations, or an adjoint
/// (projection) function.
struct PerturbationField {
    FieldPair pair;

    PerturbationField() = default;
    explicit PerturbationField(FieldPair p) : pair(std::move(p)) {}
    explicit PerturbationField(std::size_t n) : pair(n) {}
    std::size_t size() const { return pair.size(); }
    bool operator==(const PerturbationField&) const = default;
};

enum class Direction { Forward, Backward };
enum class Equation { Linearized, Adjoint };

/// One dt of the linearized equations. `background` is the classical
/// state at the start of the step being taken (Forward) or undone
/// (Backward, i.e. the state one step earlier than `p`).
PerturbationField linearized_step(const PerturbationField& p, const FieldPair& background, const GratingConfig& g,
                                  const Grid& grid, Direction dir = Direction::Forward);

/// One dt of the adjoint equations, same conventions as linearized_step.
PerturbationField adjoint_step(const PerturbationField& p, const FieldPair& background, const GratingConfig& g,
                               const Grid& grid, Direction dir = Direction::Forward);

/// Real inner product: integral of Re(f_a* g_a + f_b* g_b) dz, trapezoid rule.
double inner_product(const PerturbationField& f, const PerturbationField& g, const Grid& grid);

/// Solves the adjoint equations backward from `measure_step` to 0 around
/// the trajectory and returns the back-propagated function at t = 0.
/// `measure_step` must be a stored step of `traj` (checkpoint or final);
/// -1 means the final step.
PerturbationField back_propagate(const PerturbationField& f, const Trajectory& traj, std::int64_t measure_step = -1);

/// Projection function paired with its measurement step.
struct Measurement {
    PerturbationField f;
    std::int64_t step = 0;
};

/// Back-propagates several measurements over one shared replay of the
/// background; results are in input order.
std::vector<PerturbationField> back_propagate(std::span<const Measurement> measurements, const Trajectory& traj);

/// Called with a step index and the lab-frame fields at that step.
using StepObserver = std::function<void(std::int64_t, std::span<const PerturbationField>)>;

/// Integrates several fields forward in time from t = 0 to `end_step`
/// (-1: final step), each under its own equation. The observer, if given,
/// sees step 0, every checkpoint step and the final step.
std::vector<PerturbationField> forward_solve(const Trajectory& traj, std::span<const Equation> equations,
                                             std::vector<PerturbationField> initial, std::int64_t end_step = -1,
                                             const StepObserver& observer = {});

} // namespace braggsqueeze
