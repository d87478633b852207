#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "braggsqueeze/classical.hpp"
#include "braggsqueeze/config.hpp"
#include "braggsqueeze/grid.hpp"
#include "braggsqueeze/measurement.hpp"

namespace braggsqueeze {

/// Gamma giving a fundamental-soliton threshold of 4.5 GW/cm^2 for the
/// reference setup (kappa 10/cm, delta 15/cm, 60 ps sech, L = 50 cm), from
/// calibrate_gamma at the default resolution.
inline constexpr double kCalibratedGamma = 0.016908;
inline constexpr double kFundamentalIntensity = 4.5;  // GW/cm^2

/// Everything needed for one simulation.
struct Setup {
    GratingConfig grating;
    PulseConfig pulse;
    GridOptions grid;
    /// Size leads and place the pulse with fit_leads before building the grid.
    bool auto_leads = true;
    std::size_t memory_budget_bytes = 0;  // 0 -> default_memory_budget_bytes()
    SqueezeOptions squeeze;
};

/// The reference experiment with the calibrated Gamma.
Setup reference_setup();

/// Copy of `s` with leads fitted when auto_leads is set.
Setup resolved(const Setup& s);

struct RunResult {
    SqueezeResult squeeze;
    TransitReport transit;
    double dz = 0.0;
    std::size_t n_z = 0;
    std::int64_t steps = 0;
};

/// One classical + quantum run.
RunResult run_experiment(const Setup& s);

/// Classifies the first grating pass; stops the run once the peak has
/// left the grating interior.
PeakClassification classify_setup(const Setup& s, const ClassifierOptions& opts = {});

/// Raised when classification is not ordered decay < flat < oscillate
/// along the scanned parameter, or the bracket does not straddle the
/// transition.
class ThresholdError : public std::runtime_error {
public:
    explicit ThresholdError(const std::string& what) : std::runtime_error(what) {}
};

struct RegimeSample {
    double value = 0.0;
    PeakClassification c;
};

struct ThresholdOptions {
    double lower = 0.5;       // bracket, same units as the scanned parameter
    double upper = 20.0;
    double rel_tol = 2e-3;    // bisection stops at this relative bracket width
    ClassifierOptions classifier;
};

struct ThresholdResult {
    double value = 0.0;       // midpoint of the flat window, or the decay/oscillate boundary
    double flat_lower = 0.0;  // flat window; equal to value when no flat sample was found
    double flat_upper = 0.0;
    bool flat_found = false;
    std::vector<RegimeSample> samples;  // every classification made, by value
};

/// Bisects peak intensity between the decay and oscillation regimes.
ThresholdResult find_threshold_intensity(const Setup& s, const ThresholdOptions& opts = {});

/// Bisects Gamma at fixed input intensity `target` so that `target` is the
/// threshold. Since the dynamics depend on Gamma * |U|^2 only, this is the
/// same as solving find_threshold_intensity(Gamma) = target.
ThresholdResult calibrate_gamma(double target, const Setup& s, ThresholdOptions opts = {});

/// Deterministic parallel map: fn(i) for i in [0, n), results by index.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

struct SweepRow {
    double x = 0.0;
    bool ok = false;
    std::string status;  // "ok", "ok-window2" (contained after a doubled time window) or the error category
    std::string error;
    RunResult result;
};

struct SweepOptions {
    int workers = 1;
};

std::vector<double> default_intensities();  // 0.5 .. 13.5 step 0.5
std::vector<double> default_lengths();      // 1, 2, 5, 10, 20, ..., 80

/// One run per intensity; rows sorted by intensity.
std::vector<SweepRow> sweep_intensity(const Setup& base, std::vector<double> intensities, const SweepOptions& opts = {});

/// One run per grating length with leads and time window refitted per length.
std::vector<SweepRow> sweep_length(const Setup& base, std::vector<double> lengths, const SweepOptions& opts = {});

struct ConvergenceRow {
    double resolution_factor = 1.0;
    double dz = 0.0;
    double transmission = 0.0;
    double ratio = 1.0;
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;
    /// log2 of successive difference ratios; NaN when differences vanish.
    double transmission_order = 0.0;
    double ratio_order = 0.0;
    /// Orders below 1.5 are flagged (the splitting is second order).
    bool transmission_flagged = false;
    bool ratio_flagged = false;
};

/// Runs `s` at resolution factors 1, 2, 4, ... (levels >= 3).
ConvergenceReport convergence_study(const Setup& s, int levels = 3);

/// Observed order from three values at successive halvings.
double observed_order(double coarse, double mid, double fine);

} // namespace braggsqueeze
