#pragma once

#include <optional>

namespace braggsqueeze {

// Units throughout: length cm, time ps, intensity GW/cm^2. Field amplitudes
// are sqrt(GW/cm^2) so that gamma * |U|^2 is a wavenumber in 1/cm.

/// Speed of light in silica (c / 1.45), cm/ps.
inline constexpr double kSilicaGroupVelocity = 0.0207;

struct GratingConfig {
    double grating_length = 50.0;  // cm
    double kappa = 10.0;           // 1/cm
    double delta = 15.0;           // 1/cm, detuning from the bandgap center
    double gamma = 0.0;            // 1/cm per GW/cm^2
    double v_g = kSilicaGroupVelocity;
    double lead_in = 10.0;   // cm, kappa = 0 buffer before the grating
    double lead_out = 10.0;  // cm, kappa = 0 buffer after the grating
    double gamma_outside = 0.0;
    std::optional<double> bragg_wavelength;  // nm, metadata only

    /// Throws ConfigError on an invalid combination.
    void validate() const;
};

struct PulseConfig {
    double fwhm = 60.0;           // intensity FWHM, ps
    double peak_intensity = 4.5;  // GW/cm^2
    double center = 5.0;          // cm from the left domain edge; must lie in the lead-in

    void validate() const;

    /// sech half-width z0 = v_g * fwhm / (2 arccosh(sqrt 2)), cm.
    double sech_width(double v_g) const;

    /// Intensity FWHM in space, v_g * fwhm, cm.
    double spatial_extent(double v_g) const { return v_g * fwhm; }
};

/// Checks that the pulse sits inside the lead-in and that both leads are at
/// least twice the pulse spatial extent.
void validate_pair(const GratingConfig& g, const PulseConfig& p);

} // namespace braggsqueeze
