#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "braggsqueeze/classical.hpp"
#include "braggsqueeze/errors.hpp"
#include "braggsqueeze/experiments.hpp"
#include "braggsqueeze_io/config_file.hpp"
#include "braggsqueeze_io/field_file.hpp"
#include "braggsqueeze_io/metadata.hpp"
#include "braggsqueeze_io/report.hpp"

namespace fs = std::filesystem;
using namespace braggsqueeze;
using io::Json;

namespace {

enum Exit { kOk = 0, kConfig = 1, kNumerical = 2, kContainment = 3, kPartial = 4 };

struct Common {
    std::string config;
    std::string out = "out";
    int workers = 1;
    std::optional<double> dz_override;
    std::optional<std::int64_t> seed;
    std::string region = "leadout";
    std::optional<double> gamma_outside;
};

void add_common(CLI::App& cmd, Common& c)
{
    cmd.add_option("--config", c.config, "Config file (key = value)");
    cmd.add_option("--out", c.out, "Output directory")->capture_default_str();
    cmd.add_option("--workers", c.workers, "Parallel runs in sweeps")->check(CLI::PositiveNumber)->capture_default_str();
    cmd.add_option("--dz-override", c.dz_override, "Explicit dz, cm");
    cmd.add_option("--seed", c.seed, "Reserved; runs are deterministic");
    cmd.add_option("--region", c.region, "Photon-number projection region")
        ->check(CLI::IsMember({"leadout", "whole"}))
        ->capture_default_str();
    cmd.add_option("--gamma-outside", c.gamma_outside, "Kerr coefficient in the leads");
}

Setup load_setup(const Common& c)
{
    Setup s = c.config.empty() ? reference_setup() : io::load_config(c.config);
    if (c.dz_override) s.grid.dz_override = *c.dz_override;
    if (c.gamma_outside) s.grating.gamma_outside = *c.gamma_outside;
    s.squeeze.region = *parse_projection_region(c.region);
    s.grating.validate();
    return s;
}

Json base_metadata(const std::string& command, const Common& c, const Setup& s, const io::Stamp& st)
{
    Json j;
    j["tool"] = "braggsqueeze";
    j["version"] = BRAGGSQUEEZE_VERSION;
    j["command"] = command;
    j["provenance"] = io::stamp_json(st);
    j["config"] = io::setup_json(s);
    Json opts;
    opts["workers"] = c.workers;
    opts["seed"] = c.seed ? Json(*c.seed) : Json(nullptr);
    opts["memory_budget_bytes"] = s.memory_budget_bytes ? s.memory_budget_bytes : default_memory_budget_bytes();
    j["options"] = opts;
    return j;
}

fs::path prepare_out(const Common& c)
{
    fs::path dir(c.out);
    fs::create_directories(dir);
    return dir;
}

void write_json(const fs::path& path, const Json& j) { io::write_text(path, j.dump(2) + "\n"); }

// ---- run -------------------------------------------------------------------

int cmd_run(const Common& c, bool snapshots)
{
    const Setup setup = load_setup(c);
    const io::Stamp stamp = io::make_stamp(setup);
    const fs::path dir = prepare_out(c);

    const Setup s = resolved(setup);
    const Grid grid = build_grid(s.grating, s.pulse, s.grid);
    EvolveOptions eo;
    eo.memory_budget_bytes = s.memory_budget_bytes;
    const FieldPair init = sech_pulse(s.pulse, s.grating, grid);
    const Trajectory traj = evolve(init, s.grating, grid, eo);

    Json meta = base_metadata("run", c, setup, stamp);
    std::vector<std::string> files = {"result.csv", "metadata.json"};
    if (snapshots) {
        io::write_field(dir / "initial.field", {"initial", 0, s.grating, grid, init});
        io::write_field(dir / "final.field", {"final", traj.steps(), s.grating, grid, traj.final_state()});
        files.push_back("initial.field");
        files.push_back("final.field");
    }
    meta["files"] = files;

    RunResult r;
    r.transit = transit(traj);
    r.squeeze = squeezing_ratio(traj, s.squeeze);
    r.dz = grid.dz;
    r.n_z = grid.n_z;
    r.steps = traj.steps();

    io::write_text(dir / "result.csv", io::to_csv(io::run_table(setup, r), stamp));
    meta["result"] = io::run_json(r);
    write_json(dir / "metadata.json", meta);

    std::printf("T=%s R_final=%s (%s dB) R_min=%s (%s dB)\n", io::fmt9(r.transit.transmission).c_str(),
                io::fmt9(r.squeeze.ratio).c_str(), io::fmt9(r.squeeze.ratio_db).c_str(),
                io::fmt9(r.squeeze.ratio_min).c_str(), io::fmt9(r.squeeze.ratio_min_db).c_str());
    return kOk;
}

// ---- sweeps ------------------------------------------------------------------

std::vector<double> sorted_unique(std::vector<double> xs)
{
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    return xs;
}

int finish_sweep(const Common& c, const std::string& command, const std::string& x_column, const std::string& x_label,
                 const Setup& base, const std::vector<SweepRow>& rows, const std::vector<Setup>& setups)
{
    const io::Stamp stamp = io::make_stamp(base);
    const fs::path dir = prepare_out(c);
    const std::string stem = command;

    io::write_text(dir / (stem + ".csv"), io::to_csv(io::sweep_table(x_column, rows, setups), stamp));

    io::Series t{"transmission", {}, {}}, rf{"R_final", {}, {}}, rm{"R_min", {}, {}};
    for (const auto& r : rows) {
        const double nan = std::nan("");
        for (auto* s : {&t, &rf, &rm}) s->x.push_back(r.x);
        t.y.push_back(r.ok ? r.result.transit.transmission : nan);
        rf.y.push_back(r.ok ? r.result.squeeze.ratio_db : nan);
        rm.y.push_back(r.ok ? r.result.squeeze.ratio_min_db : nan);
    }
    const std::vector<io::Panel> panels = {{"transmission", {t}}, {"R (dB)", {rf, rm}}};
    io::write_text(dir / (stem + ".svg"), io::to_svg(command, x_label, panels, stamp));

    Json meta = base_metadata(command, c, base, stamp);
    meta["files"] = {stem + ".csv", stem + ".svg", "metadata.json"};
    Json jrows = Json::array();
    int failed = 0;
    for (const auto& r : rows) {
        Json jr;
        jr[x_column] = r.x;
        jr["status"] = r.status;
        if (r.ok)
            jr["result"] = io::run_json(r.result);
        else
            jr["error"] = r.error;
        jrows.push_back(jr);
        if (!r.ok) {
            ++failed;
            std::fprintf(stderr, "row %s=%s failed (%s): %s\n", x_column.c_str(), io::fmt9(r.x).c_str(),
                         r.status.c_str(), r.error.c_str());
        }
    }
    meta["rows"] = jrows;
    meta["failed_rows"] = failed;
    write_json(dir / "metadata.json", meta);

    std::printf("%zu rows, %d failed\n", rows.size(), failed);
    return failed ? kPartial : kOk;
}

int cmd_sweep_intensity(const Common& c, std::vector<double> values)
{
    const Setup base = load_setup(c);
    const auto xs = sorted_unique(values.empty() ? default_intensities() : values);
    std::vector<Setup> setups;
    for (double I : xs) {
        Setup s = base;
        s.pulse.peak_intensity = I;
        setups.push_back(s);
    }
    const auto rows = sweep_intensity(base, xs, {c.workers});
    return finish_sweep(c, "sweep-intensity", "I_GW_cm2", "peak intensity (GW/cm^2)", base, rows, setups);
}

int cmd_sweep_length(const Common& c, std::vector<double> values)
{
    const Setup base = load_setup(c);
    const auto xs = sorted_unique(values.empty() ? default_lengths() : values);
    std::vector<Setup> setups;
    for (double L : xs) {
        Setup s = base;
        s.grating.grating_length = L;
        s.auto_leads = true;
        setups.push_back(s);
    }
    const auto rows = sweep_length(base, xs, {c.workers});
    return finish_sweep(c, "sweep-length", "L_cm", "grating length (cm)", base, rows, setups);
}

// ---- calibrate ---------------------------------------------------------------

int cmd_calibrate(const Common& c, double target, double lower, double upper)
{
    const Setup base = load_setup(c);
    const io::Stamp stamp = io::make_stamp(base);
    const fs::path dir = prepare_out(c);

    ThresholdOptions opts;
    opts.lower = lower;
    opts.upper = upper;
    const ThresholdResult res = calibrate_gamma(target, base, opts);

    Setup derived = base;
    derived.grating.gamma = res.value;
    std::string cfg = "# derived by calibrate from config_hash=" + stamp.config_hash + "\n";
    cfg += "# resolution_factor=" + io::fmt9(stamp.resolution_factor) + " dz_cm=" + io::fmt9(stamp.dz) +
           " n_z=" + std::to_string(stamp.n_z) + "\n";
    cfg += "# threshold intensity " + io::fmt9(target) + " GW/cm^2, flat gamma window [" + io::fmt9(res.flat_lower) +
           ", " + io::fmt9(res.flat_upper) + "]\n";
    cfg += io::to_config_text(derived);
    io::write_text(dir / "calibrated.cfg", cfg);

    io::Table t;
    t.columns = {"gamma", "regime", "min_ratio", "max_ratio", "final_ratio", "prominent_maxima"};
    for (const auto& s : res.samples)
        t.rows.push_back({io::fmt9(s.value), std::string(to_string(s.c.regime)), io::fmt9(s.c.min_ratio),
                          io::fmt9(s.c.max_ratio), io::fmt9(s.c.final_ratio), std::to_string(s.c.prominent_maxima)});
    io::write_text(dir / "calibration.csv", io::to_csv(t, stamp, {"target_GW_cm2=" + io::fmt9(target)}));

    Json meta = base_metadata("calibrate", c, base, stamp);
    meta["files"] = {"calibrated.cfg", "calibration.csv", "metadata.json"};
    Json r;
    r["target_GW_cm2"] = target;
    r["gamma"] = res.value;
    r["flat_found"] = res.flat_found;
    r["flat_lower"] = res.flat_lower;
    r["flat_upper"] = res.flat_upper;
    r["derived_config_hash"] = io::config_hash(derived);
    meta["result"] = r;
    write_json(dir / "metadata.json", meta);

    std::printf("gamma* = %s  (flat window [%s, %s], %zu classifications)\n", io::fmt9(res.value).c_str(),
                io::fmt9(res.flat_lower).c_str(), io::fmt9(res.flat_upper).c_str(), res.samples.size());
    return kOk;
}

// ---- converge ----------------------------------------------------------------

int cmd_converge(const Common& c, int levels)
{
    const Setup base = load_setup(c);
    const io::Stamp stamp = io::make_stamp(base);
    const fs::path dir = prepare_out(c);
    const ConvergenceReport rep = convergence_study(base, levels);

    io::Table t;
    t.columns = {"resolution_factor", "dz_cm", "transmission", "R_final"};
    for (const auto& r : rep.rows)
        t.rows.push_back({io::fmt9(r.resolution_factor), io::fmt9(r.dz), io::fmt9(r.transmission), io::fmt9(r.ratio)});
    const std::vector<std::string> notes = {
        "transmission_order=" + io::fmt9(rep.transmission_order) + (rep.transmission_flagged ? " flagged" : ""),
        "R_order=" + io::fmt9(rep.ratio_order) + (rep.ratio_flagged ? " flagged" : ""),
    };
    io::write_text(dir / "converge.csv", io::to_csv(t, stamp, notes));

    Json meta = base_metadata("converge", c, base, stamp);
    meta["files"] = {"converge.csv", "metadata.json"};
    Json r;
    r["transmission_order"] = io::number_json(rep.transmission_order);
    r["R_order"] = io::number_json(rep.ratio_order);
    r["transmission_flagged"] = rep.transmission_flagged;
    r["R_flagged"] = rep.ratio_flagged;
    meta["result"] = r;
    write_json(dir / "metadata.json", meta);

    for (const auto& n : notes) std::printf("%s\n", n.c_str());
    return kOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Bragg grating soliton propagation and photon-number squeezing"};
    app.require_subcommand(1);

    Common common;
    bool snapshots = false;
    std::vector<double> values;
    double target = kFundamentalIntensity, lower = 1e-3, upper = 0.2;
    int levels = 3;

    auto* run = app.add_subcommand("run", "Single classical + quantum run");
    add_common(*run, common);
    run->add_flag("--snapshots", snapshots, "Write initial and final field containers");

    auto* si = app.add_subcommand("sweep-intensity", "Sweep the peak intensity");
    add_common(*si, common);
    si->add_option("--values", values, "Intensities, GW/cm^2")->delimiter(',');

    auto* sl = app.add_subcommand("sweep-length", "Sweep the grating length");
    add_common(*sl, common);
    sl->add_option("--values", values, "Lengths, cm")->delimiter(',');

    auto* cal = app.add_subcommand("calibrate", "Find the Kerr coefficient giving a threshold at --target");
    add_common(*cal, common);
    cal->add_option("--target", target, "Threshold intensity, GW/cm^2")->capture_default_str();
    cal->add_option("--lower", lower, "Lower Gamma bracket")->capture_default_str();
    cal->add_option("--upper", upper, "Upper Gamma bracket")->capture_default_str();

    auto* conv = app.add_subcommand("converge", "Convergence study over successive dz halvings");
    add_common(*conv, common);
    conv->add_option("--levels", levels, "Number of resolutions (>= 3)")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfig;
    }

    try {
        if (*run) return cmd_run(common, snapshots);
        if (*si) return cmd_sweep_intensity(common, values);
        if (*sl) return cmd_sweep_length(common, values);
        if (*cal) return cmd_calibrate(common, target, lower, upper);
        if (*conv) return cmd_converge(common, levels);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfig;
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "numerical failure at step %lld: %s\n", static_cast<long long>(e.step()), e.what());
        return kNumerical;
    } catch (const ContainmentError& e) {
        std::fprintf(stderr,
                     "containment violation: %s\n"
                     "  residual in grating: %s of input\n"
                     "  left the domain:     %s of input\n"
                     "  tolerance:           %s\n",
                     e.what(), io::fmt9(e.residual()).c_str(), io::fmt9(e.leaked()).c_str(),
                     io::fmt9(kContainmentTolerance).c_str());
        return kContainment;
    } catch (const ThresholdError& e) {
        std::fprintf(stderr, "calibration failed: %s\n", e.what());
        return kNumerical;
    } catch (const MeasurementError& e) {
        std::fprintf(stderr, "measurement failed: %s\n", e.what());
        return kNumerical;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kConfig;
    }
    return kOk;
}
