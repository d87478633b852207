#include "braggsqueeze_io/metadata.hpp"

#include <cmath>

#include "braggsqueeze/classical.hpp"

namespace braggsqueeze::io {

Json number_json(double v)
{
    if (!std::isfinite(v)) return nullptr;
    return v;
}

Json setup_json(const Setup& s)
{
    const GratingConfig& g = s.grating;
    Json j;
    j["grating_length"] = g.grating_length;
    j["kappa"] = g.kappa;
    j["delta"] = g.delta;
    j["gamma"] = g.gamma;
    j["v_g"] = g.v_g;
    j["gamma_outside"] = g.gamma_outside;
    j["bragg_wavelength"] = g.bragg_wavelength ? Json(*g.bragg_wavelength) : Json(nullptr);
    j["fwhm"] = s.pulse.fwhm;
    j["peak_intensity"] = s.pulse.peak_intensity;
    j["resolution_factor"] = s.grid.resolution_factor;
    j["dz_override"] = s.grid.dz_override;
    j["window_margin"] = s.grid.window_margin;
    j["slowdown_factor"] = s.grid.slowdown_factor;
    j["auto_leads"] = s.auto_leads;
    const Setup r = resolved(s);
    j["lead_in"] = r.grating.lead_in;
    j["lead_out"] = r.grating.lead_out;
    j["center"] = r.pulse.center;
    j["region"] = std::string(to_string(s.squeeze.region));
    j["max_measurements"] = s.squeeze.max_measurements;
    return j;
}

Json stamp_json(const Stamp& st)
{
    Json j;
    j["config_hash"] = st.config_hash;
    j["resolution_factor"] = st.resolution_factor;
    j["dz_cm"] = st.dz;
    j["n_z"] = st.n_z;
    return j;
}

Json run_json(const RunResult& r)
{
    Json j;
    j["transmission"] = number_json(r.transit.transmission);
    j["reflection"] = number_json(r.transit.reflection);
    j["residual"] = number_json(r.transit.residual);
    j["leaked"] = number_json(r.transit.leaked);
    j["R_final"] = number_json(r.squeeze.ratio);
    j["R_min"] = number_json(r.squeeze.ratio_min);
    j["R_db_final"] = number_json(r.squeeze.ratio_db);
    j["R_db_min"] = number_json(r.squeeze.ratio_min_db);
    j["measure_time_ps"] = number_json(r.squeeze.measure_time);
    j["min_measure_time_ps"] = number_json(r.squeeze.min_measure_time);
    j["region"] = std::string(to_string(r.squeeze.region));
    j["dz_cm"] = r.dz;
    j["n_z"] = r.n_z;
    j["steps"] = r.steps;
    j["checkpoint_stride"] = r.squeeze.provenance.checkpoint_stride;
    return j;
}

Json classification_json(const PeakClassification& c)
{
    Json j;
    j["regime"] = std::string(to_string(c.regime));
    j["reference"] = number_json(c.reference);
    j["min_ratio"] = number_json(c.min_ratio);
    j["max_ratio"] = number_json(c.max_ratio);
    j["final_ratio"] = number_json(c.final_ratio);
    j["prominent_maxima"] = c.prominent_maxima;
    j["first_step"] = c.first_step;
    j["last_step"] = c.last_step;
    return j;
}

} // namespace braggsqueeze::io
