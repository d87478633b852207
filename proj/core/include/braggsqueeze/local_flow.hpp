#pragma once

// Per-site sub-flows of the coupled-mode equations in the frame rotating
// with exp(i delta v_g t) (delta only contributes a global phase, which the
// callers apply separately).
//
// One local half-step of length h = dz/2 is the symmetric composition
//     C(h/2) . K(h) . C(h/2)
// with C the exact linear coupling rotation [[c, i s], [i s, c]] and K the
// exact SPM/XPM phase flow. Every sub-flow is solved exactly, so the
// classical half-step conserves |a|^2 + |b|^2 per site to rounding, and its
// derivative (the linearized map) is available in closed form, together
// with its inverse, transpose and inverse-transpose (the adjoint map).
//
// Linearized Kerr map at pre-flow background (a, b):
//     T = R (I + N),   R = diag(e^{i theta_a}, e^{i theta_b}),
//     N p = (i a dtheta_a(p), i b dtheta_b(p)),
//     dtheta_a = g (2 Re(a* p_a) + 4 Re(b* p_b)),  g = gamma h,
// and N^2 = 0, so T^{-1} = (I - N) R^{-1}. Transposes are taken with respect
// to the real inner product Re(x* y), under which
//     N^T y = g ((2 s_a + 4 s_b) a, (4 s_a + 2 s_b) b),  s_a = Re(conj(y_a) i a).
//
// Fields are stored as separate real/imaginary arrays so that the site
// loops vectorize.

#include <cmath>
#include <cstddef>

namespace braggsqueeze::local {

struct SiteCoefficients {
    double c = 1.0;   // cos(kappa h / 2)
    double s = 0.0;   // sin(kappa h / 2)
    double gh = 0.0;  // gamma * h

    static SiteCoefficients make(double kappa, double gamma, double dz)
    {
        const double h = 0.5 * dz;
        return {std::cos(0.5 * kappa * h), std::sin(0.5 * kappa * h), gamma * h};
    }
};

/// Largest Kerr phase per half-step the polynomial phasor is exact for.
inline constexpr double kMaxKerrPhase = 0.785398163397448;  // pi / 4

/// (cos theta, sin theta) for |theta| <= pi/4, accurate to rounding.
/// Branch-free so that site loops vectorize; callers bound theta.
inline void unit_phasor(double theta, double& cs, double& sn)
{
    const double t2 = theta * theta;
    // Taylor series through theta^16 / theta^17; truncation < 1e-17 on [-pi/4, pi/4]
    double c = 1.0 / 20922789888000.0;  // 1/16!
    c = c * t2 - 1.0 / 87178291200.0;
    c = c * t2 + 1.0 / 479001600.0;
    c = c * t2 - 1.0 / 3628800.0;
    c = c * t2 + 1.0 / 40320.0;
    c = c * t2 - 1.0 / 720.0;
    c = c * t2 + 1.0 / 24.0;
    c = c * t2 - 0.5;
    c = c * t2 + 1.0;
    double s = 1.0 / 355687428096000.0;  // 1/17!
    s = s * t2 - 1.0 / 1307674368000.0;
    s = s * t2 + 1.0 / 6227020800.0;
    s = s * t2 - 1.0 / 39916800.0;
    s = s * t2 + 1.0 / 362880.0;
    s = s * t2 - 1.0 / 5040.0;
    s = s * t2 + 1.0 / 120.0;
    s = s * t2 - 1.0 / 6.0;
    s = s * t2 + 1.0;
    cs = c;
    sn = theta * s;
}

/// One site: real/imaginary parts of both components.
struct Site {
    double ar, ai, br, bi;
};

/// (a, b) <- [[c, i s], [i s, c]] (a, b)
inline void couple(Site& x, double c, double s)
{
    const double ar = c * x.ar - s * x.bi;
    const double ai = c * x.ai + s * x.br;
    const double br = c * x.br - s * x.ai;
    const double bi = c * x.bi + s * x.ar;
    x = {ar, ai, br, bi};
}

struct Phasors {
    double car, sar, cbr, sbr;  // cos/sin of theta_a, theta_b
};

inline Phasors kerr_phasors(Site bg, double gh)
{
    const double ia = bg.ar * bg.ar + bg.ai * bg.ai;
    const double ib = bg.br * bg.br + bg.bi * bg.bi;
    Phasors e;
    unit_phasor(gh * (ia + 2.0 * ib), e.car, e.sar);
    unit_phasor(gh * (ib + 2.0 * ia), e.cbr, e.sbr);
    return e;
}

inline void rotate(Site& x, const Phasors& e)
{
    const double ar = x.ar * e.car - x.ai * e.sar;
    const double ai = x.ar * e.sar + x.ai * e.car;
    const double br = x.br * e.cbr - x.bi * e.sbr;
    const double bi = x.br * e.sbr + x.bi * e.cbr;
    x = {ar, ai, br, bi};
}

inline void unrotate(Site& x, const Phasors& e)
{
    const double ar = x.ar * e.car + x.ai * e.sar;
    const double ai = -x.ar * e.sar + x.ai * e.car;
    const double br = x.br * e.cbr + x.bi * e.sbr;
    const double bi = -x.br * e.sbr + x.bi * e.cbr;
    x = {ar, ai, br, bi};
}

/// Classical half-step; returns the pre-Kerr background.
inline Site half_step(Site& x, const SiteCoefficients& k)
{
    couple(x, k.c, k.s);
    const Site bg = x;
    rotate(x, kerr_phasors(bg, k.gh));
    couple(x, k.c, k.s);
    return bg;
}

// p <- p + N p   (sign = +1)  or  p - N p  (sign = -1)
inline void add_n(Site& p, Site bg, double gh, double sign)
{
    const double ra = bg.ar * p.ar + bg.ai * p.ai;
    const double rb = bg.br * p.br + bg.bi * p.bi;
    const double da = sign * gh * (2.0 * ra + 4.0 * rb);
    const double db = sign * gh * (2.0 * rb + 4.0 * ra);
    p.ar -= bg.ai * da;
    p.ai += bg.ar * da;
    p.br -= bg.bi * db;
    p.bi += bg.br * db;
}

// p <- p + N^T p   (sign = +1)  or  p - N^T p  (sign = -1)
inline void add_nt(Site& p, Site bg, double gh, double sign)
{
    const double sa = p.ai * bg.ar - p.ar * bg.ai;
    const double sb = p.bi * bg.br - p.br * bg.bi;
    const double fa = sign * gh * (2.0 * sa + 4.0 * sb);
    const double fb = sign * gh * (4.0 * sa + 2.0 * sb);
    p.ar += fa * bg.ar;
    p.ai += fa * bg.ai;
    p.br += fb * bg.br;
    p.bi += fb * bg.bi;
}

/// Which linear map to apply to a perturbation over one half-step.
enum class Map {
    Tangent,         // linearized fluctuation equations, forward in time
    TangentInverse,  // linearized equations, backward in time
    Adjoint,         // adjoint equations, forward in time   (= Tangent^{-T})
    AdjointInverse,  // adjoint equations, backward in time  (= Tangent^{T})
};

template <Map M>
inline void half_step_linear(Site& p, Site bg, const SiteCoefficients& k)
{
    const Phasors e = kerr_phasors(bg, k.gh);
    if constexpr (M == Map::Tangent) {
        couple(p, k.c, k.s);
        add_n(p, bg, k.gh, 1.0);  // T = R (I + N)
        rotate(p, e);
        couple(p, k.c, k.s);
    } else if constexpr (M == Map::Adjoint) {
        couple(p, k.c, k.s);
        add_nt(p, bg, k.gh, -1.0);  // T^{-T} = R (I - N^T)
        rotate(p, e);
        couple(p, k.c, k.s);
    } else if constexpr (M == Map::TangentInverse) {
        couple(p, k.c, -k.s);
        unrotate(p, e);  // T^{-1} = (I - N) R^{-1}
        add_n(p, bg, k.gh, -1.0);
        couple(p, k.c, -k.s);
    } else {
        couple(p, k.c, -k.s);
        unrotate(p, e);  // T^T = (I + N^T) R^{-1}
        add_nt(p, bg, k.gh, 1.0);
        couple(p, k.c, -k.s);
    }
}

// ---- span kernels -----------------------------------------------------------

/// Pointers to n sites stored as four arrays.
struct SiteSpan {
    double* ar;
    double* ai;
    double* br;
    double* bi;
};

struct ConstSiteSpan {
    const double* ar;
    const double* ai;
    const double* br;
    const double* bi;
};

// Restrict-qualified parameters (not locals) are what lets GCC drop the
// aliasing checks between the eight arrays.
template <bool Record>
inline void half_step_kernel(double* __restrict ar, double* __restrict ai, double* __restrict br,
                             double* __restrict bi, std::size_t n, const SiteCoefficients k, double* __restrict rar,
                             double* __restrict rai, double* __restrict rbr, double* __restrict rbi)
{
    for (std::size_t i = 0; i < n; ++i) {
        Site s{ar[i], ai[i], br[i], bi[i]};
        const Site bg = half_step(s, k);
        ar[i] = s.ar;
        ai[i] = s.ai;
        br[i] = s.br;
        bi[i] = s.bi;
        if constexpr (Record) {
            rar[i] = bg.ar;
            rai[i] = bg.ai;
            rbr[i] = bg.br;
            rbi[i] = bg.bi;
        }
    }
}

template <Map M>
inline void half_step_linear_kernel(double* __restrict ar, double* __restrict ai, double* __restrict br,
                                    double* __restrict bi, std::size_t n, const SiteCoefficients k,
                                    const double* __restrict rar, const double* __restrict rai,
                                    const double* __restrict rbr, const double* __restrict rbi)
{
    for (std::size_t i = 0; i < n; ++i) {
        Site s{ar[i], ai[i], br[i], bi[i]};
        half_step_linear<M>(s, Site{rar[i], rai[i], rbr[i], rbi[i]}, k);
        ar[i] = s.ar;
        ai[i] = s.ai;
        br[i] = s.br;
        bi[i] = s.bi;
    }
}

template <bool Record>
inline void half_step_span(SiteSpan x, std::size_t n, const SiteCoefficients k, SiteSpan rec)
{
    half_step_kernel<Record>(x.ar, x.ai, x.br, x.bi, n, k, rec.ar, rec.ai, rec.br, rec.bi);
}

template <Map M>
inline void half_step_linear_span(SiteSpan p, std::size_t n, const SiteCoefficients k, ConstSiteSpan rec)
{
    half_step_linear_kernel<M>(p.ar, p.ai, p.br, p.bi, n, k, rec.ar, rec.ai, rec.br, rec.bi);
}

} // namespace braggsqueeze::local
