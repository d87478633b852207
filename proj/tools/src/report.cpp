#include "braggsqueeze_io/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "braggsqueeze/grid.hpp"
#include "braggsqueeze_io/config_file.hpp"

namespace braggsqueeze::io {

Stamp make_stamp(const Setup& setup)
{
    Stamp st;
    st.config_hash = config_hash(setup);
    st.resolution_factor = setup.grid.resolution_factor;
    const Setup s = resolved(setup);
    const Grid g = build_grid(s.grating, s.pulse, s.grid);
    st.dz = g.dz;
    st.n_z = g.n_z;
    return st;
}

std::string fmt9(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

const std::vector<std::string>& run_columns()
{
    static const std::vector<std::string> cols = {
        "kappa",        "delta",      "gamma",   "length_cm",  "fwhm_ps",    "peak_GW_cm2", "dz_cm",
        "transmission", "reflection", "R_final", "R_min",      "R_db_final", "R_db_min",    "status",
    };
    return cols;
}

std::vector<std::string> run_row(const Setup& s, const RunResult& r, std::string_view status)
{
    const bool ok = status.starts_with("ok");
    const double nan = std::numeric_limits<double>::quiet_NaN();
    double dz = ok ? r.dz : nan;
    if (!ok) {
        try {
            const Setup rs = resolved(s);
            dz = build_grid(rs.grating, rs.pulse, rs.grid).dz;
        } catch (const std::exception&) {
        }
    }
    auto res = [&](double v) { return fmt9(ok ? v : nan); };
    return {
        fmt9(s.grating.kappa),
        fmt9(s.grating.delta),
        fmt9(s.grating.gamma),
        fmt9(s.grating.grating_length),
        fmt9(s.pulse.fwhm),
        fmt9(s.pulse.peak_intensity),
        fmt9(dz),
        res(r.transit.transmission),
        res(r.transit.reflection),
        res(r.squeeze.ratio),
        res(r.squeeze.ratio_min),
        res(r.squeeze.ratio_db),
        res(r.squeeze.ratio_min_db),
        std::string(status),
    };
}

Table run_table(const Setup& s, const RunResult& r)
{
    return {run_columns(), {run_row(s, r, "ok")}};
}

Table sweep_table(std::string_view x_column, const std::vector<SweepRow>& rows, const std::vector<Setup>& setups)
{
    if (rows.size() != setups.size()) throw std::invalid_argument("sweep_table: rows and setups differ in length");
    Table t;
    t.columns.push_back(std::string(x_column));
    t.columns.insert(t.columns.end(), run_columns().begin(), run_columns().end());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::vector<std::string> row{fmt9(rows[i].x)};
        auto rest = run_row(setups[i], rows[i].result, rows[i].status);
        row.insert(row.end(), rest.begin(), rest.end());
        t.rows.push_back(std::move(row));
    }
    return t;
}

namespace {

std::string join(const std::vector<std::string>& v)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += v[i];
    }
    return out;
}

} // namespace

std::string to_csv(const Table& t, const Stamp& stamp, const std::vector<std::string>& notes)
{
    std::ostringstream os;
    os << "# config_hash=" << stamp.config_hash << '\n';
    os << "# resolution_factor=" << fmt9(stamp.resolution_factor) << " dz_cm=" << fmt9(stamp.dz)
       << " n_z=" << stamp.n_z << '\n';
    for (const auto& n : notes) os << "# " << n << '\n';
    os << join(t.columns) << '\n';
    for (const auto& r : t.rows) os << join(r) << '\n';
    return os.str();
}

namespace {

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double v)
    {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void settle()
    {
        if (!(lo <= hi)) lo = 0.0, hi = 1.0;
        if (hi - lo < 1e-12 * std::max(1.0, std::fabs(hi))) {
            const double pad = std::max(1e-9, 0.05 * std::fabs(hi));
            lo -= pad;
            hi += pad;
        } else {
            const double pad = 0.05 * (hi - lo);
            lo -= pad;
            hi += pad;
        }
    }
};

std::string esc(std::string_view s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string px(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

// Rounds values that are zero up to plotting resolution.
std::string tick(double v, double span)
{
    if (std::fabs(v) < 1e-9 * span) v = 0.0;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

} // namespace

std::string to_svg(std::string_view title, std::string_view x_label, const std::vector<Panel>& panels,
                   const Stamp& stamp)
{
    const double width = 640, left = 80, right = 20, top = 40, panel_h = 220, gap = 50, bottom = 60;
    const double plot_w = width - left - right;
    const double height = top + panels.size() * panel_h + (panels.size() - 1) * gap + bottom;

    Range xr;
    for (const auto& p : panels)
        for (const auto& s : p.series)
            for (double x : s.x) xr.add(x);
    xr.settle();
    auto sx = [&](double x) { return left + (x - xr.lo) / (xr.hi - xr.lo) * plot_w; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px(width) << "\" height=\"" << px(height)
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<!-- config_hash=" << stamp.config_hash << " resolution_factor=" << fmt9(stamp.resolution_factor)
       << " dz_cm=" << fmt9(stamp.dz) << " n_z=" << stamp.n_z << " -->\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << px(width / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << esc(title)
       << "</text>\n";

    for (std::size_t k = 0; k < panels.size(); ++k) {
        const Panel& p = panels[k];
        const double y0 = top + k * (panel_h + gap);
        Range yr;
        for (const auto& s : p.series)
            for (double y : s.y) yr.add(y);
        yr.settle();
        auto sy = [&](double y) { return y0 + panel_h - (y - yr.lo) / (yr.hi - yr.lo) * panel_h; };

        os << "<rect x=\"" << px(left) << "\" y=\"" << px(y0) << "\" width=\"" << px(plot_w) << "\" height=\""
           << px(panel_h) << "\" fill=\"none\" stroke=\"black\"/>\n";
        for (int t = 0; t <= 4; ++t) {
            const double yv = yr.lo + (yr.hi - yr.lo) * t / 4.0;
            const double xv = xr.lo + (xr.hi - xr.lo) * t / 4.0;
            os << "<text x=\"" << px(left - 6) << "\" y=\"" << px(sy(yv) + 4) << "\" text-anchor=\"end\">"
               << tick(yv, yr.hi - yr.lo) << "</text>\n";
            if (k + 1 == panels.size())
                os << "<text x=\"" << px(sx(xv)) << "\" y=\"" << px(y0 + panel_h + 16)
                   << "\" text-anchor=\"middle\">" << tick(xv, xr.hi - xr.lo) << "</text>\n";
        }
        os << "<text transform=\"translate(" << px(18) << ',' << px(y0 + panel_h / 2)
           << ") rotate(-90)\" text-anchor=\"middle\">" << esc(p.y_label) << "</text>\n";

        for (std::size_t j = 0; j < p.series.size(); ++j) {
            const Series& s = p.series[j];
            const char* color = kColors[j % 4];
            std::string path;
            bool pen = false;
            for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
                    pen = false;
                    continue;
                }
                path += (pen ? " L" : " M") + px(sx(s.x[i])) + ' ' + px(sy(s.y[i]));
                pen = true;
                os << "<circle cx=\"" << px(sx(s.x[i])) << "\" cy=\"" << px(sy(s.y[i])) << "\" r=\"2.5\" fill=\""
                   << color << "\"/>\n";
            }
            if (!path.empty())
                os << "<path d=\"" << path.substr(1) << "\" fill=\"none\" stroke=\"" << color
                   << "\" stroke-width=\"1.5\"/>\n";
            if (!s.label.empty())
                os << "<text x=\"" << px(left + plot_w - 8) << "\" y=\"" << px(y0 + 16 + 14 * j)
                   << "\" text-anchor=\"end\" fill=\"" << color << "\">" << esc(s.label) << "</text>\n";
        }
    }
    os << "<text x=\"" << px(left + plot_w / 2) << "\" y=\"" << px(height - 20) << "\" text-anchor=\"middle\">"
       << esc(x_label) << "</text>\n";
    os << "</svg>\n";
    return os.str();
}

void write_text(const std::filesystem::path& path, std::string_view text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

} // namespace braggsqueeze::io
