#include "patchsim/blocks.hpp"
#include "patchsim/engine.hpp"
#include "patchsim/errors.hpp"
#include "patchsim/netlist.hpp"
#include "patchsim/signal.hpp"

#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

using namespace patchsim;

namespace {

const char* kSpringmass =
    "block const  Y   val=-80            out=Y\n"
    "block pot    P16 gain=16 in=X       out=KX\n"
    "block pot    P3  gain=3  in=XDOT    out=BXDOT\n"
    "block adder  S1  in=KX,BXDOT,NEGY   out=NEGXDD\n"
    "block inv    N1  in=Y               out=NEGY\n"
    "block inv    N2  in=NEGXDD          out=XDD\n"
    "block int    I1  ic=-0.64 in=XDD    out=XDOT\n"
    "block int    I2  ic=2     in=XDOT   out=X\n"
    "probe X\n"
    "probe XDOT\n"
    "sim dt=0.001 t=10 method=rk4 limit=100\n";

/// Closed form of the damped spring-mass displacement used as an oracle.
double springmass_exact(double t) {
    const double omega = std::sqrt(55.0) / 2.0;
    const double a = 7.0;
    const double b = (-0.64 + 1.5 * a) / omega;
    return -5.0 + std::exp(-1.5 * t) * (a * std::cos(omega * t) + b * std::sin(omega * t));
}

} // namespace

TEST_CASE("compiling a patch splits state blocks from the static chain") {
    Schedule sched = compile(validate(parse(kSpringmass)));
    REQUIRE(sched.state_blocks.size() == 2);
    CHECK(sched.initial_conditions == std::vector<double>{-0.64, 2.0});
    CHECK(sched.static_order.size() == 6);

    Schedule memoryless = compile(validate(parse(
        "block const C val=3 out=Y\nprobe Y\nsim dt=0.1 t=1 method=euler\n")));
    CHECK(memoryless.state_blocks.empty());
    CHECK(memoryless.static_order.size() == 1);
}

TEST_CASE("the spring-mass run tracks the closed-form solution") {
    SimResult res = run(parse(kSpringmass));
    CHECK(res.n_steps == 10000);
    CHECK(res.method == Method::Rk4);
    REQUIRE(res.has_trace("X"));
    REQUIRE(res.has_trace("XDOT"));

    const Trace& x = res.trace("X");
    CHECK(x[0] == 2.0);
    for (double t : {0.5, 1.0, 2.5, 5.0, 10.0}) {
        CHECK(std::abs(trace_sample(x, t) - springmass_exact(t)) <= 1e-6);
    }

    // Forward second difference at the start recovers the initial
    // acceleration -80 - 3*(-0.64) - 16*2 = -110.08.
    const double dt = x.grid().dt;
    const double xdd0 = (x[2] - 2.0 * x[1] + x[0]) / (dt * dt);
    CHECK(std::abs(xdd0 - (-110.08)) <= 0.5);
}

TEST_CASE("asking for an unprobed trace fails loudly") {
    SimResult res = run(parse(kSpringmass));
    CHECK(!res.has_trace("GHOST"));
    CHECK_THROWS_AS(res.trace("GHOST"), const ContractError&);
}

TEST_CASE("repeated runs are bit-identical") {
    SimResult a = run(parse(kSpringmass));
    SimResult b = run(parse(kSpringmass));
    const Trace& xa = a.trace("X");
    const Trace& xb = b.trace("X");
    REQUIRE(xa.size() == xb.size());
    for (std::size_t k = 0; k < xa.size(); ++k) {
        REQUIRE(xa[k] == xb[k]);
    }
}

TEST_CASE("a linear patch scales exactly with its sources") {
    // x' = -x + c with x(0) = x0; doubling c and x0 doubles the whole
    // trajectory, and because scaling by 2 is exact in binary floating
    // point the doubled run matches bit for bit.
    auto patch = [](double c, double x0) {
        return "block const C val=" + format_double(c) +
               " out=C\n"
               "block inv N in=X out=NX\n"
               "block adder A in=NX,C out=D\n"
               "block int I ic=" +
               format_double(x0) +
               " in=D out=X\n"
               "probe X\n"
               "sim dt=0.01 t=4 method=rk4\n";
    };
    const SimResult base = run(parse(patch(0.3, 0.7)));
    const SimResult doubled = run(parse(patch(0.6, 1.4)));
    const Trace& one = base.trace("X");
    const Trace& two = doubled.trace("X");
    REQUIRE(one.size() == two.size());
    for (std::size_t k = 0; k < one.size(); ++k) {
        REQUIRE(2.0 * one[k] == two[k]);
    }
}

TEST_CASE("integrating a sine arch gives two units of area") {
    const std::string patch =
        "block sine S amp=1 omega=1 phase=0 out=U\n"
        "block int I ic=0 in=U out=OUT\n"
        "probe OUT\n"
        "sim dt=0.001 t=" +
        format_double(std::acos(-1.0)) + " method=rk4\n";
    SimResult res = run(parse(patch));
    const Trace& out = res.trace("OUT");
    const double integral = out[out.size() - 1];
    CHECK(std::abs(integral - 2.0) <= 1e-5);

    // The odometer-style readout agrees with the integrator.
    const std::size_t n = 20001;
    const double t_end = std::acos(-1.0);
    std::vector<double> samples(n);
    for (std::size_t k = 0; k < n; ++k) {
        samples[k] = std::sin(t_end * double(k) / double(n - 1));
    }
    const Trace arch(TimeGrid(0.0, t_end / double(n - 1), n - 1), samples, "U");
    const double disk = disk_rotations(arch, DiskIntegratorParams(1.0, 1.0));
    CHECK(std::abs(disk - 2.0) <= 1e-4);
    CHECK(std::abs(disk - integral) <= 1e-4);
}

TEST_CASE("forward Euler lands exactly on binary-exact step areas") {
    // A unit square wave flips sign at t = 1; with dt = 1/128 every Euler
    // partial sum is an exact binary number, so the integral is exact.
    SimResult res = run(parse(
        "block stepgen S times=0,1 levels=1,-1 out=U\n"
        "block int I ic=0 in=U out=OUT\n"
        "probe OUT\n"
        "sim dt=0.0078125 t=2 method=euler\n"));
    const Trace& out = res.trace("OUT");
    REQUIRE(out.size() == 257);
    CHECK(out[128] == 1.0);
    CHECK(out[256] == 0.0);
}

TEST_CASE("a sampled ramp becomes a staircase and back") {
    SimResult res = run(parse(
        "block const ONE val=1 out=U\n"
        "block int R ic=0 in=U out=RAMP\n"
        "block adc A n_bits=4 quantum=1 in=RAMP out=CODE\n"
        "block dac D quantum=1 in=CODE out=RECON\n"
        "probe RAMP\nprobe CODE\nprobe RECON\n"
        "sim dt=0.01 t=15 method=rk4 limit=1000\n"));
    const Trace& code = res.trace("CODE");
    const Trace& recon = res.trace("RECON");
    CHECK(trace_sample(code, 3.2) == 3.0);
    CHECK(trace_sample(recon, 3.2) == 3.0);
    CHECK(trace_sample(code, 7.8) == 8.0);
    CHECK(trace_sample(recon, 7.8) == 8.0);
    CHECK(trace_sample(recon, 14.9) == 15.0);
}

TEST_CASE("an in-circuit converter clamps instead of flagging overrange") {
    SimResult high = run(parse(
        "block const C val=500 out=U\n"
        "block adc A n_bits=4 quantum=1 in=U out=CODE\n"
        "probe CODE\n"
        "sim dt=0.1 t=1 method=euler limit=1000\n"));
    CHECK(high.trace("CODE")[0] == 15.0);

    SimResult low = run(parse(
        "block const C val=-3 out=U\n"
        "block adc A n_bits=4 quantum=1 in=U out=CODE\n"
        "probe CODE\n"
        "sim dt=0.1 t=1 method=euler limit=1000\n"));
    CHECK(low.trace("CODE")[0] == 0.0);
}

TEST_CASE("machine-limit excursions are logged per net and sample") {
    SimResult hot = run(parse(
        "block const C val=200 out=Y\nprobe Y\nsim dt=0.1 t=1 method=euler\n"));
    REQUIRE(hot.overloads.size() == 11);
    CHECK(hot.overloads[0].net == "Y");
    CHECK(hot.overloads[0].time == 0.0);
    CHECK(hot.overloads[0].value == 200.0);

    SimResult cool = run(parse(
        "block const C val=200 out=Y\nprobe Y\nsim dt=0.1 t=1 method=euler limit=300\n"));
    CHECK(cool.overloads.empty());
}

TEST_CASE("the reference patch overloads only during the ring-down") {
    // The raw (unscaled) problem genuinely exceeds the machine limit early
    // on: the initial acceleration is -110.08, and the first displacement
    // trough pushes the gain-16 tap to about -119. Everything decays below
    // 100 within the first couple of seconds.
    SimResult res = run(parse(kSpringmass));
    REQUIRE(!res.overloads.empty());
    for (const NetOverload& ov : res.overloads) {
        CHECK(ov.time < 1.5);
        CHECK((ov.net == "XDD" || ov.net == "NEGXDD" || ov.net == "KX"));
        CHECK(std::abs(ov.value) > 100.0);
    }
    CHECK(res.overloads[0].time == 0.0);
}

TEST_CASE("blowing up the step size reports divergence instead of garbage") {
    NetlistDoc doc = parse(kSpringmass);
    doc.sim.dt = 1.0;
    try {
        run(doc);
        FAIL("expected DivergedError");
    } catch (const DivergedError& e) {
        // The runaway can surface at a static block during a stage
        // evaluation before any state crosses the cap; either way the
        // report names a real block and an in-range time.
        CHECK(!e.block().empty());
        CHECK(e.time() > 0.0);
        CHECK(e.time() <= 10.0);
    }
}

TEST_CASE("the defining-equation residual is small for rk4 and larger for euler") {
    NetlistDoc doc = parse(kSpringmass);
    SimResult rk4 = run(doc);
    Trace res_rk4 = residual(rk4, springmass_residual());
    const double max_rk4 = trace_max_abs(res_rk4, 0.1, 9.9);
    CHECK(max_rk4 > 0.0);
    CHECK(max_rk4 <= 0.05);

    doc.sim.method = Method::Euler;
    Trace res_euler = residual(run(doc), springmass_residual());
    const double max_euler = trace_max_abs(res_euler, 0.1, 9.9);
    CHECK(max_euler > max_rk4);
    CHECK(max_euler <= 2.0);

    // The residual grid drops both endpoints of the run.
    CHECK(res_rk4.grid().time_at(0) == doctest::Approx(0.001).epsilon(1e-12));
    CHECK(res_rk4.size() == rk4.trace("X").size() - 2);
}

TEST_CASE("a quiescent patch has an exactly zero residual") {
    SimResult res = run(parse(
        "block const Z val=0 out=U\n"
        "block int I ic=0 in=U out=OUT\n"
        "probe OUT\n"
        "sim dt=0.01 t=1 method=rk4\n"));
    ResidualExpr expr;
    expr.terms.push_back({"OUT", 0, 1.0});
    expr.constant = 0.0;
    Trace r = residual(res, expr);
    CHECK(trace_max_abs(r, 0.0, 1.0) == 0.0);
}

TEST_CASE("residual evaluation rejects unusable inputs") {
    SimResult res = run(parse(
        "block const C val=1 out=U\nprobe U\nsim dt=0.5 t=0.5 method=euler\n"));
    ResidualExpr expr;
    expr.terms.push_back({"U", 0, 1.0});
    CHECK_THROWS_AS(residual(res, expr), const ContractError&);

    SimResult ok = run(parse(
        "block const C val=1 out=U\nprobe U\nsim dt=0.1 t=1 method=euler\n"));
    ResidualExpr ghost;
    ghost.terms.push_back({"MISSING", 0, 1.0});
    CHECK_THROWS_AS(residual(ok, ghost), const ContractError&);

    ResidualExpr bad_order;
    bad_order.terms.push_back({"U", 3, 1.0});
    CHECK_THROWS_AS(residual(ok, bad_order), const ContractError&);

    ResidualExpr empty;
    CHECK_THROWS_AS(residual(ok, empty), const ContractError&);
}

TEST_CASE("trace_max_abs restricts itself to the requested window") {
    SimResult res = run(parse(
        "block const C val=3 out=Y\nprobe Y\nsim dt=0.1 t=1 method=euler\n"));
    CHECK(trace_max_abs(res.trace("Y"), 0.2, 0.8) == 3.0);
    CHECK_THROWS_AS(trace_max_abs(res.trace("Y"), 0.9, 0.1), const ContractError&);
}

TEST_CASE("measured convergence orders match the integration methods") {
    const std::vector<double> dts{4e-3, 2e-3, 1e-3};
    NetlistDoc doc = parse(kSpringmass);

    ConvergenceReport rk4 = convergence_order(doc, dts);
    CHECK(rk4.applicable);
    CHECK(rk4.smooth);
    CHECK(rk4.slope > 3.5);
    CHECK(rk4.slope < 4.5);

    doc.sim.method = Method::Euler;
    ConvergenceReport euler = convergence_order(doc, dts);
    CHECK(euler.applicable);
    CHECK(euler.slope > 0.7);
    CHECK(euler.slope < 1.3);
}

TEST_CASE("convergence measurement flags cases it cannot judge") {
    // A constant patch is integrated exactly at every step size.
    ConvergenceReport flat = convergence_order(
        parse("block const C val=3 out=Y\nprobe Y\nsim dt=0.01 t=1 method=rk4\n"),
        {4e-3, 2e-3, 1e-3});
    CHECK(!flat.applicable);

    // A discontinuous source breaks the smoothness assumption.
    ConvergenceReport rough = convergence_order(
        parse("block stepgen S times=0,1 levels=1,-1 out=U\n"
              "block int I ic=0 in=U out=OUT\nprobe OUT\n"
              "sim dt=0.01 t=2 method=rk4\n"),
        {4e-3, 2e-3, 1e-3});
    CHECK(!rough.smooth);

    CHECK_THROWS_AS(convergence_order(parse(kSpringmass), {1e-3, 2e-3}),
                    const ContractError&);
    CHECK_THROWS_AS(convergence_order(parse(kSpringmass), {1e-3, 0.0, 2e-3}),
                    const ContractError&);
    CHECK_THROWS_AS(
        convergence_order(
            parse("block const C val=3 out=Y\nsim dt=0.01 t=1 method=rk4\n"),
            {4e-3, 2e-3, 1e-3}),
        const ContractError&);
}

TEST_CASE("a miscalibrated rate source drifts quadratically") {
    DriftReport d100 = drift_experiment(0.01, 100.0);
    CHECK(d100.drift_exact <= 1e-9);
    CHECK(std::abs(d100.drift_approx - 50.0) <= 1e-6);

    DriftReport d50 = drift_experiment(0.01, 50.0);
    CHECK(std::abs(d50.drift_approx - 12.5) <= 1e-6);

    DriftReport clean = drift_experiment(0.0, 100.0);
    CHECK(clean.drift_exact <= 1e-9);
    CHECK(clean.drift_approx <= 1e-9);

    CHECK_THROWS_AS(drift_experiment(-0.01, 100.0), const ContractError&);
    CHECK_THROWS_AS(drift_experiment(0.01, 0.0), const ContractError&);
}
