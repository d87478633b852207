#include "braggsqueeze/config.hpp"

#include <cmath>
#include <string>

#include "braggsqueeze/errors.hpp"

namespace braggsqueeze {
namespace {

void require(bool ok, const std::string& msg)
{
    if (!ok) throw ConfigError(msg);
}

bool finite(double x) { return std::isfinite(x); }

} // namespace

void GratingConfig::validate() const
{
    require(finite(grating_length) && grating_length > 0.0, "grating_length must be > 0");
    require(finite(kappa) && kappa >= 0.0, "kappa must be >= 0");
    require(finite(delta), "delta must be finite");
    require(finite(gamma), "gamma must be finite");
    require(finite(v_g) && v_g > 0.0, "v_g must be > 0");
    require(finite(lead_in) && lead_in >= 0.0, "lead_in must be >= 0");
    require(finite(lead_out) && lead_out >= 0.0, "lead_out must be >= 0");
    require(finite(gamma_outside), "gamma_outside must be finite");
    if (bragg_wavelength) require(finite(*bragg_wavelength) && *bragg_wavelength > 0.0, "bragg_wavelength must be > 0");
}

void PulseConfig::validate() const
{
    require(finite(fwhm) && fwhm > 0.0, "fwhm must be > 0");
    require(finite(peak_intensity) && peak_intensity >= 0.0, "peak_intensity must be >= 0");
    require(finite(center), "center must be finite");
}

double PulseConfig::sech_width(double v_g) const
{
    // |sech(x)|^2 = 1/2  at  x = arccosh(sqrt 2)
    return v_g * fwhm / (2.0 * std::acosh(std::sqrt(2.0)));
}

void validate_pair(const GratingConfig& g, const PulseConfig& p)
{
    g.validate();
    p.validate();
    const double extent = p.spatial_extent(g.v_g);
    require(g.lead_in >= 2.0 * extent,
            "lead_in (" + std::to_string(g.lead_in) + " cm) cannot contain the pulse: need >= 2x the pulse extent (" +
                std::to_string(2.0 * extent) + " cm)");
    require(g.lead_out >= 2.0 * extent, "lead_out (" + std::to_string(g.lead_out) +
                                            " cm) must be >= 2x the pulse extent (" + std::to_string(2.0 * extent) +
                                            " cm)");
    require(p.center > 0.0 && p.center < g.lead_in, "pulse center must lie inside the lead-in region");
}

} // namespace braggsqueeze
