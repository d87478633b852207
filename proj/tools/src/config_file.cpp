#include "braggsqueeze_io/config_file.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "braggsqueeze/errors.hpp"

namespace braggsqueeze::io {

namespace {

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double parse_number(const std::string& key, const std::string& text)
{
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) throw ConfigError("config key '" + key + "': '" + text + "' is not a number");
    return v;
}

std::string number(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

const std::vector<std::string>& config_keys()
{
    static const std::vector<std::string> keys = {
        "grating_length", "kappa", "delta", "gamma", "v_g", "lead_in", "lead_out", "gamma_outside",
        "bragg_wavelength", "fwhm", "peak_intensity", "center", "resolution_factor", "dz_override",
        "window_margin", "slowdown_factor",
    };
    return keys;
}

Setup parse_config(std::istream& in, const Setup& defaults)
{
    Setup s = defaults;
    std::map<std::string, double> values;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value, got '" + body + "'");
        const std::string key = trim(std::string_view(body).substr(0, eq));
        const std::string value = trim(std::string_view(body).substr(eq + 1));
        const auto& keys = config_keys();
        if (std::find(keys.begin(), keys.end(), key) == keys.end())
            throw ConfigError("unknown config key '" + key + "' (line " + std::to_string(lineno) + ")");
        if (values.count(key)) throw ConfigError("config key '" + key + "' given twice");
        values[key] = parse_number(key, value);
    }

    auto take = [&](const char* key, double& field) {
        if (auto it = values.find(key); it != values.end()) field = it->second;
    };
    take("grating_length", s.grating.grating_length);
    take("kappa", s.grating.kappa);
    take("delta", s.grating.delta);
    take("gamma", s.grating.gamma);
    take("v_g", s.grating.v_g);
    take("lead_in", s.grating.lead_in);
    take("lead_out", s.grating.lead_out);
    take("gamma_outside", s.grating.gamma_outside);
    if (auto it = values.find("bragg_wavelength"); it != values.end()) s.grating.bragg_wavelength = it->second;
    take("fwhm", s.pulse.fwhm);
    take("peak_intensity", s.pulse.peak_intensity);
    take("center", s.pulse.center);
    take("resolution_factor", s.grid.resolution_factor);
    take("dz_override", s.grid.dz_override);
    take("window_margin", s.grid.window_margin);
    take("slowdown_factor", s.grid.slowdown_factor);

    const int placed = static_cast<int>(values.count("lead_in")) + static_cast<int>(values.count("lead_out")) +
                       static_cast<int>(values.count("center"));
    if (placed != 0 && placed != 3)
        throw ConfigError("config keys 'lead_in', 'lead_out' and 'center' must be given together or not at all");
    s.auto_leads = placed == 0 ? defaults.auto_leads : false;

    try {
        s.grating.validate();
        s.pulse.validate();
        if (!s.auto_leads) validate_pair(s.grating, s.pulse);
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("invalid config: ") + e.what());
    }
    return s;
}

Setup load_config(const std::filesystem::path& path, const Setup& defaults)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
    return parse_config(in, defaults);
}

std::string to_config_text(const Setup& s)
{
    std::ostringstream os;
    auto put = [&](const char* k, double v) { os << k << " = " << number(v) << '\n'; };
    put("grating_length", s.grating.grating_length);
    put("kappa", s.grating.kappa);
    put("delta", s.grating.delta);
    put("gamma", s.grating.gamma);
    put("v_g", s.grating.v_g);
    if (!s.auto_leads) {
        put("lead_in", s.grating.lead_in);
        put("lead_out", s.grating.lead_out);
    }
    put("gamma_outside", s.grating.gamma_outside);
    if (s.grating.bragg_wavelength) put("bragg_wavelength", *s.grating.bragg_wavelength);
    put("fwhm", s.pulse.fwhm);
    put("peak_intensity", s.pulse.peak_intensity);
    if (!s.auto_leads) put("center", s.pulse.center);
    put("resolution_factor", s.grid.resolution_factor);
    put("dz_override", s.grid.dz_override);
    put("window_margin", s.grid.window_margin);
    put("slowdown_factor", s.grid.slowdown_factor);
    return os.str();
}

std::uint64_t fnv1a(std::string_view text)
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string config_hash(const Setup& s)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(to_config_text(s))));
    return buf;
}

} // namespace braggsqueeze::io
