#include <cmath>

#include "doctest.h"
#include "braggsqueeze/classical.hpp"
#include "braggsqueeze/errors.hpp"
#include "oracles.hpp"
#include "setups.hpp"

using namespace braggsqueeze;
using namespace testing_setups;

namespace {

// Grid whose grating spans most of the domain, for uniform-field checks.
struct Slab {
    GratingConfig g;
    Grid grid;
};

Slab slab(double kappa, double delta, double gamma)
{
    Slab s;
    s.g.kappa = kappa;
    s.g.delta = delta;
    s.g.gamma = gamma;
    s.g.grating_length = 4.0;
    s.g.lead_in = 0.5;
    s.g.lead_out = 0.5;
    PulseConfig p;
    p.fwhm = 10.0;
    p.center = 0.25;
    s.grid = build_grid(s.g, p);
    return s;
}

} // namespace

TEST_CASE("zero field is a fixed point")
{
    const Slab s = slab(10.0, 15.0, 0.1);
    const FieldPair zero(s.grid.n_z);
    CHECK(ncme_step(zero, s.g, s.grid) == zero);
}

TEST_CASE("uniform field without coupling or Kerr only picks up the detuning phase")
{
    const Slab s = slab(0.0, 15.0, 0.0);
    FieldPair f(s.grid.n_z);
    for (auto& z : f.a) z = Complex(0.6, -0.8);
    const int n = 50;
    FieldPair u = f;
    for (int k = 0; k < n; ++k) u = ncme_step(u, s.g, s.grid);
    const Complex expect = f.a[0] * std::polar(1.0, s.g.delta * s.grid.dz * n);
    for (std::size_t i = n; i < s.grid.n_z; ++i) {
        CHECK(std::abs(u.a[i] - expect) < 1e-12);
    }
}

TEST_CASE("uniform field with Kerr only: self-phase, modulus unchanged")
{
    const Slab s = slab(0.0, 0.0, 0.2);
    const double amp = 2.0;
    FieldPair f(s.grid.n_z);
    for (auto& z : f.a) z = amp;
    const int n = 200;
    FieldPair u = f;
    for (int k = 0; k < n; ++k) u = ncme_step(u, s.g, s.grid);
    const Complex expect = std::polar(amp, s.g.gamma * amp * amp * s.grid.dz * n);
    for (std::size_t i = s.grid.grating.begin + n; i < s.grid.grating.end; ++i) {
        CHECK(std::abs(u.a[i]) == doctest::Approx(amp).epsilon(1e-13));
        CHECK(std::abs(u.a[i] - expect) < 1e-11);
    }
}

TEST_CASE("single step conserves photon content")
{
    const Slab s = slab(10.0, 15.0, 0.3);
    FieldPair f = random_field(s.grid.n_z, 7, 2.0);
    // nothing leaves and nothing crosses a half-weight end cell in one step
    for (std::size_t i : {std::size_t{0}, std::size_t{1}, s.grid.n_z - 2, s.grid.n_z - 1}) f.a[i] = f.b[i] = 0.0;
    const FieldPair g = ncme_step(f, s.g, s.grid);
    CHECK(photon_content(g, s.grid) == doctest::Approx(photon_content(f, s.grid)).epsilon(1e-13));
}

TEST_CASE("non-finite input is reported with the step")
{
    const Slab s = slab(10.0, 15.0, 0.1);
    FieldPair f(s.grid.n_z);
    f.a[s.grid.grating.begin + 3] = std::nan("");
    CHECK_THROWS_AS(ncme_step(f, s.g, s.grid), NumericalError);
}

TEST_CASE("full run conserves photon content")
{
    const Built b = build(small_setup());
    const Trajectory traj = run(b);
    const double in = traj.initial_content();
    CHECK(photon_content(traj.final_state(), b.grid) == doctest::Approx(in).epsilon(1e-10));
    CHECK(traj.leaked_content() < 1e-11 * in);
    const TransitReport t = transit(traj);
    CHECK(t.transmission + t.reflection + t.residual + t.leaked == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("evolve matches repeated ncme_step")
{
    Setup s = small_setup();
    s.grating.grating_length = 0.5;
    const Built b = build(s);
    EvolveOptions o;
    o.max_steps = 300;
    o.settle_tolerance = -1.0;
    const Trajectory traj = run(b, o);
    FieldPair u = b.init;
    for (int k = 0; k < 300; ++k) u = ncme_step(u, b.setup.grating, b.grid);
    CHECK(max_abs_diff(traj.final_state(), u) < 1e-12 * max_abs(u));
}

TEST_CASE("replay reproduces the run bit for bit")
{
    const Built b = build(small_setup());
    EvolveOptions o;
    o.checkpoint_stride = 997;
    const Trajectory traj = run(b, o);
    REQUIRE(traj.checkpoint_count() >= 3);
    const std::int64_t first = traj.checkpoint_step(1);
    std::vector<double> rec(traj.record_bytes_per_step() / sizeof(double) * 997);
    const FieldPair replayed = traj.replay(first, 997, rec);
    CHECK(replayed == traj.rotating_state_at(traj.checkpoint_step(2)));
}

TEST_CASE("checkpoint stride does not change the result")
{
    const Built b = build(small_setup());
    EvolveOptions a, c;
    a.checkpoint_stride = 101;
    c.checkpoint_stride = 4000;
    CHECK(run(b, a).final_state() == run(b, c).final_state());
}

TEST_CASE("global phase leaves the moduli unchanged")
{
    const Built b = build(small_setup());
    FieldPair rotated = std::polar(1.0, 0.7) * b.init;
    EvolveOptions o;
    o.settle_tolerance = -1.0;
    o.max_steps = 3000;
    const Trajectory t0 = evolve(b.init, b.setup.grating, b.grid, o);
    const Trajectory t1 = evolve(rotated, b.setup.grating, b.grid, o);
    const FieldPair u0 = t0.final_state(), u1 = t1.final_state();
    double worst = 0.0;
    for (std::size_t i = 0; i < u0.size(); ++i) {
        worst = std::max(worst, std::fabs(std::abs(u0.a[i]) - std::abs(u1.a[i])));
        worst = std::max(worst, std::fabs(std::abs(u0.b[i]) - std::abs(u1.b[i])));
    }
    CHECK(worst < 1e-12 * max_abs(u0));
    for (std::size_t k = 0; k < t0.peak_trace().size(); ++k)
        CHECK(t0.peak_trace()[k] == doctest::Approx(t1.peak_trace()[k]).epsilon(1e-12));
}

TEST_CASE("no grating: everything is transmitted")
{
    Setup s = small_setup(0.0);
    s.grating.kappa = 0.0;
    const Built b = build(s);
    const Trajectory traj = run(b);
    const TransitReport t = transit(traj);
    // the run stops once less than 1e-6 of the input is still on its way
    CHECK(t.transmission == doctest::Approx(1.0).epsilon(2e-6));
    CHECK(t.reflection < 1e-9);
}

TEST_CASE("linear transmission against the uniform-grating formula")
{
    Setup s;
    s.grating.grating_length = 1.0;
    s.grating.kappa = 10.0;
    s.grating.delta = 15.0;
    s.grating.gamma = 0.0;
    s.pulse.fwhm = 150.0;
    s.pulse.peak_intensity = 1.0;
    const Built b = build(s);
    const Trajectory traj = run(b);
    const double z0 = b.setup.pulse.sech_width(b.setup.grating.v_g);
    const double expect = oracle::sech_averaged_transmission(10.0, 15.0, 1.0, z0);
    CHECK(transmission(traj) == doctest::Approx(expect).epsilon(0.01));
}

TEST_CASE("containment is enforced")
{
    Setup s = small_setup();
    s.grid.window_margin = 1.0;
    s.grid.slowdown_factor = 1.0;
    s.pulse.peak_intensity = 0.5;
    const Built b = build(s);
    EvolveOptions o;
    o.settle_tolerance = -1.0;
    o.max_steps = b.grid.n_t / 4;
    const Trajectory traj = run(b, o);
    CHECK_THROWS_AS(transit(traj), ContainmentError);
}

TEST_CASE("a weak pulse spreads in the grating")
{
    Setup s = small_setup(0.1, 0.5);
    s.grating.grating_length = 20.0;
    const PeakClassification c = classify_setup(s);
    CHECK(c.regime == PeakRegime::Decay);
    CHECK(c.min_ratio < 0.98);
}
