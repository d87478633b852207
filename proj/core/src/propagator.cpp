#include "braggsqueeze/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace braggsqueeze {

CharacteristicField::CharacteristicField(const FieldPair& f, std::int64_t forward_steps, std::int64_t backward_steps)
    : n_(f.size()), fwd_left_(forward_steps), bwd_left_(backward_steps)
{
    if (!f.consistent()) throw std::invalid_argument("inconsistent field pair");
    if (forward_steps < 0 || backward_steps < 0) throw std::invalid_argument("negative buffer capacity");
    const auto fwd = static_cast<std::size_t>(forward_steps);
    const auto bwd = static_cast<std::size_t>(backward_steps);
    const std::size_t len = n_ + fwd + bwd;
    ar_.assign(len, 0.0);
    ai_.assign(len, 0.0);
    br_.assign(len, 0.0);
    bi_.assign(len, 0.0);
    // forward shifts move the u_a window left in memory and the u_b window right
    a_off_ = fwd;
    b_off_ = bwd;
    for (std::size_t i = 0; i < n_; ++i) {
        ar_[a_off_ + i] = f.a[i].real();
        ai_[a_off_ + i] = f.a[i].imag();
        br_[b_off_ + i] = f.b[i].real();
        bi_[b_off_ + i] = f.b[i].imag();
    }
}

void CharacteristicField::shift_forward()
{
    if (fwd_left_ <= 0) throw std::logic_error("characteristic buffer exhausted (forward)");
    --fwd_left_;
    ++bwd_left_;
    --a_off_;
    ++b_off_;
}

void CharacteristicField::shift_backward()
{
    if (bwd_left_ <= 0) throw std::logic_error("characteristic buffer exhausted (backward)");
    --bwd_left_;
    ++fwd_left_;
    ++a_off_;
    --b_off_;
}

FieldPair CharacteristicField::to_pair() const { return slice({0, n_}); }

FieldPair CharacteristicField::slice(CellRange r) const
{
    if (r.end > n_ || r.begin > r.end) throw std::out_of_range("slice outside the field window");
    FieldPair f(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        f.a[i] = a(r.begin + i);
        f.b[i] = b(r.begin + i);
    }
    return f;
}

std::vector<Complex> CharacteristicField::a_buffer() const
{
    std::vector<Complex> v(ar_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = {ar_[i], ai_[i]};
    return v;
}

std::vector<Complex> CharacteristicField::b_buffer() const
{
    std::vector<Complex> v(br_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = {br_[i], bi_[i]};
    return v;
}

double CharacteristicField::leaked_sum() const
{
    double s = 0.0;
    for (std::size_t i = 0; i < ar_.size(); ++i)
        if (i < a_off_ || i >= a_off_ + n_) s += ar_[i] * ar_[i] + ai_[i] * ai_[i];
    for (std::size_t i = 0; i < br_.size(); ++i)
        if (i < b_off_ || i >= b_off_ + n_) s += br_[i] * br_[i] + bi_[i] * bi_[i];
    return s;
}

LocalModel LocalModel::make(const GratingConfig& g, const Grid& grid)
{
    LocalModel m;
    const auto lead = local::SiteCoefficients::make(0.0, g.gamma_outside, grid.dz);
    const auto grating = local::SiteCoefficients::make(g.kappa, g.gamma, grid.dz);
    if (g.gamma_outside != 0.0) {
        if (grid.lead_in.size() > 0) m.segments.push_back({grid.lead_in, lead});
        m.segments.push_back({grid.grating, grating});
        if (grid.lead_out.size() > 0) m.segments.push_back({grid.lead_out, lead});
        m.active = grid.whole();
    } else {
        m.segments.push_back({grid.grating, grating});
        m.active = grid.grating;
    }
    return m;
}

Propagator::Propagator(const GratingConfig& g, const Grid& grid, const FieldPair& state, std::int64_t capacity)
    : grid_(&grid), model_(LocalModel::make(g, grid)), field_(state, capacity, 0)
{
    if (state.size() != grid.n_z) throw std::invalid_argument("state does not match grid");
}

namespace {

struct SpanStats {
    double sum = 0.0;
    double peak = 0.0;
    std::size_t where = 0;
};

SpanStats span_stats(local::ConstSiteSpan x, std::size_t n)
{
    const double* __restrict ar = x.ar;
    const double* __restrict ai = x.ai;
    const double* __restrict br = x.br;
    const double* __restrict bi = x.bi;
    SpanStats st;
    // fixed lane partition keeps the reduction order deterministic and vectorizable
    constexpr std::size_t L = 8;
    double sums[L] = {};
    double peaks[L] = {};
    const std::size_t body = n - n % L;
    for (std::size_t i = 0; i < body; i += L) {
        for (std::size_t j = 0; j < L; ++j) {
            const std::size_t k = i + j;
            const double I = ar[k] * ar[k] + ai[k] * ai[k] + br[k] * br[k] + bi[k] * bi[k];
            sums[j] += I;
            peaks[j] = peaks[j] > I ? peaks[j] : I;
        }
    }
    for (std::size_t k = body; k < n; ++k) {
        const double I = ar[k] * ar[k] + ai[k] * ai[k] + br[k] * br[k] + bi[k] * bi[k];
        sums[k - body] += I;
        peaks[k - body] = peaks[k - body] > I ? peaks[k - body] : I;
    }
    double sum = 0.0;
    double peak = 0.0;
    for (std::size_t j = 0; j < L; ++j) {
        sum += sums[j];
        peak = std::max(peak, peaks[j]);
    }
    st.sum = sum;
    st.peak = peak;
    for (std::size_t i = 0; i < n; ++i) {
        if (ar[i] * ar[i] + ai[i] * ai[i] + br[i] * br[i] + bi[i] * bi[i] == peak) {
            st.where = i;
            break;
        }
    }
    return st;
}

} // namespace

StepStats Propagator::step(std::span<double> records)
{
    const bool record = !records.empty();
    const std::size_t n_act = model_.n_active();
    if (record && records.size() < kRecordDoublesPerSite * n_act) throw std::invalid_argument("record buffer too small");

    auto half = [&](int h) {
        for (const Segment& seg : model_.segments) {
            const std::size_t off = seg.cells.begin - model_.active.begin;
            if (record)
                local::half_step_span<true>(field_.span(seg.cells.begin), seg.cells.size(), seg.coeff,
                                            record_half(records, n_act, h, off));
            else
                local::half_step_span<false>(field_.span(seg.cells.begin), seg.cells.size(), seg.coeff, {});
        }
    };
    half(0);
    field_.shift_forward();
    half(1);

    // The local half-step conserves |a|^2 + |b|^2 per site, so post-step
    // intensities bound the Kerr phase of both halves.
    StepStats stats;
    double content = 0.0;
    double peak_active = 0.0;
    double gh_max = 0.0;
    const CharacteristicField& f = field_;
    for (const Segment& seg : model_.segments) {
        gh_max = std::max(gh_max, std::fabs(seg.coeff.gh));
        const bool is_grating = seg.cells == grid_->grating;
        if (!is_grating && seg.coeff.gh == 0.0) continue;
        const SpanStats st = span_stats(f.span(seg.cells.begin), seg.cells.size());
        peak_active = std::max(peak_active, st.peak);
        if (is_grating) {
            content = st.sum;
            stats.grating_peak = st.peak;
            stats.grating_peak_cell = seg.cells.begin + st.where;
        }
    }
    stats.grating_content = content * grid_->dz;
    // |theta| <= gh (|a|^2 + 2|b|^2) <= 2 gh (|a|^2 + |b|^2)
    max_phase_ = 2.0 * gh_max * peak_active;
    stats.finite = std::isfinite(content) && std::isfinite(peak_active);
    return stats;
}

double Propagator::pending_content() const
{
    const local::ConstSiteSpan x = field_.span();
    const std::size_t n_z = grid_->n_z;
    double s = 0.0;
    for (std::size_t i = grid_->lead_in.begin; i < grid_->lead_in.end; ++i)
        s += trapezoid_weight(i, n_z) * (x.ar[i] * x.ar[i] + x.ai[i] * x.ai[i]);
    for (std::size_t i = grid_->grating.begin; i < grid_->grating.end; ++i)
        s += trapezoid_weight(i, n_z) * (x.ar[i] * x.ar[i] + x.ai[i] * x.ai[i] + x.br[i] * x.br[i] + x.bi[i] * x.bi[i]);
    for (std::size_t i = grid_->lead_out.begin; i < grid_->lead_out.end; ++i)
        s += trapezoid_weight(i, n_z) * (x.br[i] * x.br[i] + x.bi[i] * x.bi[i]);
    return s * grid_->dz;
}

} // namespace braggsqueeze
