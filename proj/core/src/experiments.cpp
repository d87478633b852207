#include "braggsqueeze/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "braggsqueeze/errors.hpp"

namespace braggsqueeze {

Setup reference_setup()
{
    Setup s;
    s.grating.grating_length = 50.0;
    s.grating.kappa = 10.0;
    s.grating.delta = 15.0;
    s.grating.gamma = kCalibratedGamma;
    s.pulse.fwhm = 60.0;
    s.pulse.peak_intensity = kFundamentalIntensity;
    return s;
}

Setup resolved(const Setup& s)
{
    Setup r = s;
    if (r.auto_leads) fit_leads(r.grating, r.pulse, r.grid);
    return r;
}

RunResult run_experiment(const Setup& setup)
{
    const Setup s = resolved(setup);
    const Grid grid = build_grid(s.grating, s.pulse, s.grid);
    EvolveOptions eo;
    eo.memory_budget_bytes = s.memory_budget_bytes;
    const Trajectory traj = evolve(sech_pulse(s.pulse, s.grating, grid), s.grating, grid, eo);
    RunResult r;
    r.transit = transit(traj);
    r.squeeze = squeezing_ratio(traj, s.squeeze);
    r.dz = grid.dz;
    r.n_z = grid.n_z;
    r.steps = traj.steps();
    return r;
}

PeakClassification classify_setup(const Setup& setup, const ClassifierOptions& opts)
{
    const Setup s = resolved(setup);
    const Grid grid = build_grid(s.grating, s.pulse, s.grid);
    const double extent = s.pulse.spatial_extent(s.grating.v_g);
    const auto margin = static_cast<std::size_t>(std::ceil(opts.edge_margin_widths * extent / grid.dz));
    const std::size_t lo = grid.grating.begin + margin;
    const std::size_t hi = grid.grating.end > margin ? grid.grating.end - margin : 0;

    EvolveOptions eo;
    eo.memory_budget_bytes = s.memory_budget_bytes;
    eo.settle_tolerance = -1.0;
    bool entered = false;
    eo.stop = [&](std::int64_t, const StepStats& st) {
        const bool inside = st.grating_peak > 0.0 && st.grating_peak_cell >= lo && st.grating_peak_cell < hi;
        if (inside) entered = true;
        return entered && !inside;
    };
    const Trajectory traj = evolve(sech_pulse(s.pulse, s.grating, grid), s.grating, grid, eo);
    return classify_peak_trace(traj, extent, opts);
}

namespace {

int rank(PeakRegime r)
{
    switch (r) {
    case PeakRegime::Decay: return 0;
    case PeakRegime::Flat: return 1;
    case PeakRegime::Oscillate: return 2;
    case PeakRegime::Undetermined: return -1;
    }
    return -1;
}

std::string describe(const std::vector<RegimeSample>& samples)
{
    std::ostringstream os;
    os.precision(6);
    for (const auto& s : samples)
        os << "\n  " << s.value << ": " << to_string(s.c.regime) << " (min " << s.c.min_ratio << ", max "
           << s.c.max_ratio << ", maxima " << s.c.prominent_maxima << ")";
    return os.str();
}

// Bisection over a scalar whose classification goes decay -> flat -> oscillate.
ThresholdResult bisect_regimes(const std::function<PeakClassification(double)>& classify, const ThresholdOptions& o,
                               const char* what)
{
    if (!(o.lower > 0.0) || !(o.upper > o.lower)) throw ThresholdError(std::string("invalid bracket for ") + what);
    ThresholdResult res;
    auto sample = [&](double v) {
        RegimeSample s{v, classify(v)};
        res.samples.push_back(s);
        return s.c.regime;
    };
    auto fail = [&](const std::string& msg) {
        std::sort(res.samples.begin(), res.samples.end(),
                  [](const RegimeSample& a, const RegimeSample& b) { return a.value < b.value; });
        throw ThresholdError(msg + describe(res.samples));
    };

    if (sample(o.lower) != PeakRegime::Decay)
        fail(std::string("lower bracket of ") + what + " does not decay; scanned");
    if (sample(o.upper) != PeakRegime::Oscillate)
        fail(std::string("upper bracket of ") + what + " does not oscillate; scanned");

    auto mid = [](double a, double b) { return std::sqrt(a * b); };
    auto narrow = [&](double a, double b) { return b / a - 1.0 <= o.rel_tol; };

    double a = o.lower;  // decay
    double b = o.upper;  // oscillate
    double flat = std::numeric_limits<double>::quiet_NaN();
    while (!narrow(a, b)) {
        const double m = mid(a, b);
        const PeakRegime r = sample(m);
        if (r == PeakRegime::Decay) a = m;
        else if (r == PeakRegime::Oscillate) b = m;
        else if (r == PeakRegime::Flat) {
            flat = m;
            break;
        } else {
            fail(std::string("classifier could not resolve ") + what + "; scanned");
        }
    }

    if (std::isnan(flat)) {
        res.value = mid(a, b);
        res.flat_lower = res.flat_upper = res.value;
    } else {
        res.flat_found = true;
        double fl = flat;  // lowest flat
        double lo = a;
        while (!narrow(lo, fl)) {
            const double m = mid(lo, fl);
            const PeakRegime r = sample(m);
            if (r == PeakRegime::Decay) lo = m;
            else if (r == PeakRegime::Flat) fl = m;
            else fail(std::string("non-monotone classification in ") + what + "; scanned");
        }
        double fu = flat;  // highest flat
        double hi = b;
        while (!narrow(fu, hi)) {
            const double m = mid(fu, hi);
            const PeakRegime r = sample(m);
            if (r == PeakRegime::Oscillate) hi = m;
            else if (r == PeakRegime::Flat) fu = m;
            else fail(std::string("non-monotone classification in ") + what + "; scanned");
        }
        res.flat_lower = fl;
        res.flat_upper = fu;
        res.value = 0.5 * (fl + fu);
    }

    std::sort(res.samples.begin(), res.samples.end(),
              [](const RegimeSample& x, const RegimeSample& y) { return x.value < y.value; });
    for (std::size_t i = 1; i < res.samples.size(); ++i)
        if (rank(res.samples[i].c.regime) < rank(res.samples[i - 1].c.regime))
            throw ThresholdError(std::string("non-monotone classification in ") + what + "; scanned" +
                                 describe(res.samples));
    return res;
}

} // namespace

ThresholdResult find_threshold_intensity(const Setup& s, const ThresholdOptions& opts)
{
    return bisect_regimes(
        [&](double intensity) {
            Setup t = s;
            t.pulse.peak_intensity = intensity;
            return classify_setup(t, opts.classifier);
        },
        opts, "peak intensity");
}

ThresholdResult calibrate_gamma(double target, const Setup& s, ThresholdOptions opts)
{
    if (!(target > 0.0)) throw ThresholdError("calibration target must be > 0");
    if (opts.lower == ThresholdOptions{}.lower && opts.upper == ThresholdOptions{}.upper) {
        opts.lower = 1e-3;
        opts.upper = 0.2;
    }
    return bisect_regimes(
        [&](double gamma) {
            Setup t = s;
            t.grating.gamma = gamma;
            t.pulse.peak_intensity = target;
            return classify_setup(t, opts.classifier);
        },
        opts, "gamma");
}

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn)
{
    const auto w = static_cast<std::size_t>(std::max(1, workers));
    if (w == 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex m;
    auto body = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(m);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < std::min(w, n); ++k) pool.emplace_back(body);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

std::vector<double> default_intensities()
{
    std::vector<double> v;
    for (int k = 1; k <= 27; ++k) v.push_back(0.5 * k);
    return v;
}

std::vector<double> default_lengths() { return {1, 2, 5, 10, 20, 30, 40, 50, 60, 70, 80}; }

namespace {

SweepRow run_row(double x, const Setup& s)
{
    SweepRow row;
    row.x = x;
    try {
        row.result = run_experiment(s);
        row.ok = true;
        row.status = "ok";
    } catch (const ContainmentError& e) {
        row.status = "containment";
        row.error = e.what();
    } catch (const NumericalError& e) {
        row.status = "numerical";
        row.error = e.what();
    } catch (const ConfigError& e) {
        row.status = "config";
        row.error = e.what();
    } catch (const std::exception& e) {
        row.status = "error";
        row.error = e.what();
    }
    return row;
}

std::vector<SweepRow> sweep(std::vector<double> xs, const SweepOptions& opts,
                            const std::function<Setup(double)>& make)
{
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    std::vector<SweepRow> rows(xs.size());
    parallel_for(xs.size(), opts.workers, [&](std::size_t i) {
        Setup s = make(xs[i]);
        rows[i] = run_row(xs[i], s);
        if (rows[i].status != "containment") return;
        // slow trapped content: one retry with a doubled time window
        s.grid.slowdown_factor *= 2.0;
        s.auto_leads = true;
        SweepRow retry = run_row(xs[i], s);
        if (retry.ok) retry.status = "ok-window2";
        rows[i] = std::move(retry);
    });
    return rows;
}

} // namespace

std::vector<SweepRow> sweep_intensity(const Setup& base, std::vector<double> intensities, const SweepOptions& opts)
{
    return sweep(std::move(intensities), opts, [&](double I) {
        Setup s = base;
        s.pulse.peak_intensity = I;
        return s;
    });
}

std::vector<SweepRow> sweep_length(const Setup& base, std::vector<double> lengths, const SweepOptions& opts)
{
    return sweep(std::move(lengths), opts, [&](double L) {
        Setup s = base;
        s.grating.grating_length = L;
        s.auto_leads = true;
        return s;
    });
}

double observed_order(double coarse, double mid, double fine)
{
    const double d1 = std::fabs(coarse - mid);
    const double d2 = std::fabs(mid - fine);
    if (d1 == 0.0 || d2 == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return std::log2(d1 / d2);
}

ConvergenceReport convergence_study(const Setup& s, int levels)
{
    if (levels < 3) throw ConfigError("convergence study needs at least 3 levels");
    ConvergenceReport rep;
    double factor = std::max(1.0, s.grid.resolution_factor);
    for (int k = 0; k < levels; ++k, factor *= 2.0) {
        Setup t = s;
        t.grid.resolution_factor = factor;
        t.grid.dz_override = 0.0;
        const RunResult r = run_experiment(t);
        rep.rows.push_back({factor, r.dz, r.transit.transmission, r.squeeze.ratio});
    }
    const std::size_t n = rep.rows.size();
    rep.transmission_order =
        observed_order(rep.rows[n - 3].transmission, rep.rows[n - 2].transmission, rep.rows[n - 1].transmission);
    rep.ratio_order = observed_order(rep.rows[n - 3].ratio, rep.rows[n - 2].ratio, rep.rows[n - 1].ratio);
    rep.transmission_flagged = !(rep.transmission_order >= 1.5);
    rep.ratio_flagged = !(rep.ratio_order >= 1.5);
    return rep;
}

} // namespace braggsqueeze
