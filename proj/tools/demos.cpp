#include "demos.hpp"

#include "patchsim/blocks.hpp"
#include "patchsim/engine.hpp"
#include "patchsim/errors.hpp"
#include "patchsim/kernels.hpp"
#include "patchsim/plot.hpp"

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

namespace patchsim::demos {

namespace fs = std::filesystem;

const char* const kSpringmassNetlist =
    "# -x'' = 3x' + 16x - y ; y = -80 ; x(0)=2 ; x'(0)=-0.64\n"
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

namespace {

std::string strf(const char* fmt, ...) {
    char buf[256];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof(buf), fmt, args);
    va_end(args);
    return buf;
}

void write_demo_files(const fs::path& dir, const std::string& name, const SimResult& result,
                      const PlotSpec& spec, const std::string& report) {
    fs::create_directories(dir);
    write_csv_file((dir / (name + ".csv")).string(), result.traces);
    plot_svg(result, spec, (dir / (name + ".svg")).string());
    std::ofstream out(dir / (name + "_report.txt"), std::ios::binary);
    out << report;
}

PlotSpec two_series_plot(const std::string& title, const std::string& a, const std::string& b) {
    PlotSpec spec;
    spec.title = title;
    spec.series = {{a, ""}, {b, ""}};
    return spec;
}

/// Linear-interpolated zero-crossing times of value - level.
std::vector<double> crossing_times(const Trace& trace, double level) {
    std::vector<double> times;
    for (std::size_t k = 0; k + 1 < trace.size(); ++k) {
        const double a = trace[k] - level;
        const double b = trace[k + 1] - level;
        if (a * b < 0.0) {
            const double frac = a / (a - b);
            times.push_back(trace.grid().time_at(k) + frac * trace.grid().dt);
        }
    }
    return times;
}

std::string demo_springmass(const fs::path& dir) {
    SimResult result = run(parse(kSpringmassNetlist));
    const Trace& x = result.trace("X");

    const auto crossings = crossing_times(x, -5.0);
    double omega = 0.0;
    if (crossings.size() >= 2) {
        const double span = crossings.back() - crossings.front();
        omega = std::numbers::pi * static_cast<double>(crossings.size() - 1) / span;
    }
    const Trace res = residual(result, springmass_residual());

    std::string report = "spring-mass step response (rk4, dt=0.001, t=10)\n";
    report += strf("x(0) = %g\n", x[0]);
    report += strf("x(10) = %.3f  (steady state -5)\n", x[x.size() - 1]);
    report += strf("crossings of -5 = %zu\n", crossings.size());
    report += strf("damped angular frequency = %.4f rad/s  (predicted 3.7081)\n", omega);
    report += strf("max defining-equation residual on (0.1, 9.9) = %.6f\n",
                   trace_max_abs(res, 0.1, 9.9));
    report += strf("overloads = %zu\n", result.overloads.size());

    write_demo_files(dir, "springmass", result, two_series_plot("spring-mass", "X", "XDOT"),
                     report);
    return report;
}

std::string demo_gibbs(const fs::path& dir) {
    std::string report = "square-wave Fourier partial sums, amplitude 1\n";
    for (int n : {10, 25, 50, 100}) {
        const double peak = kernels::fourier_square_max(n, 2.0, 1.0, 200001);
        report += strf("overshoot n_terms=%d = %.6f\n", n, peak);
    }
    report += "the jump-point overshoot persists near 1.179 at every order\n";

    SimResult result = run(parse(
        "block fsquare F n_terms=50 period=2 out=APPROX\n"
        "block stepgen S times=0,1 levels=1,-1 out=SQUARE\n"
        "probe SQUARE\n"
        "probe APPROX\n"
        "sim dt=0.0005 t=2 method=rk4\n"));
    write_demo_files(dir, "gibbs", result,
                     two_series_plot("square wave vs 50-term Fourier sum", "SQUARE", "APPROX"),
                     report);
    return report;
}

std::string demo_drift(const fs::path& dir) {
    const double slope = 0.01;
    const double t_end = 100.0;
    const DriftReport rep = drift_experiment(slope, t_end);

    std::string report = "integrator drift from an imperfect step input\n";
    report += strf("residual slope after the jump = %g, t_end = %g\n", slope, t_end);
    report += strf("drift_exact = %.3g\n", rep.drift_exact);
    report += strf("drift_approx = %.3f  (predicted slope*t^2/2 = %.1f)\n", rep.drift_approx,
                   slope * t_end * t_end / 2.0);

    SimResult exact = run(parse(
        "block stepgen S times=0 levels=1 out=U\n"
        "block int I ic=0 in=U out=OUT\n"
        "probe OUT\n"
        "sim dt=0.01 t=100 method=rk4\n"));
    SimResult approx = run(parse(
        "block stepgen S times=0 levels=1 out=STEP\n"
        "block const E val=0.01 out=EPS\n"
        "block int R ic=0 in=EPS out=RAMP\n"
        "block adder A in=STEP,RAMP out=U\n"
        "block int I ic=0 in=U out=OUT\n"
        "probe OUT\n"
        "sim dt=0.01 t=100 method=rk4\n"));

    SimResult merged;
    merged.method = exact.method;
    merged.n_steps = exact.n_steps;
    const Trace& e = exact.trace("OUT");
    const Trace& a = approx.trace("OUT");
    merged.traces.emplace_back(e.grid(), e.values(), "IDEAL");
    merged.traces.emplace_back(a.grid(), a.values(), "DRIFTING");
    write_demo_files(dir, "drift", merged,
                     two_series_plot("integrator output, ideal vs drifting", "IDEAL", "DRIFTING"),
                     report);
    return report;
}

std::string demo_sine_integral(const fs::path& dir) {
    SimResult result = run(parse(
        "block sine U amp=1 omega=1 phase=0 out=U\n"
        "block int I ic=0 in=U out=OUT\n"
        "probe U\n"
        "probe OUT\n"
        "sim dt=0.0001 t=" + format_double(std::numbers::pi) + " method=rk4\n"));
    const Trace& out = result.trace("OUT");
    const double integral = out[out.size() - 1];
    const double wheel = disk_rotations(result.trace("U"), DiskIntegratorParams(1.0, 1.0));

    std::string report = "integral of sin(t) dt over [0, pi]\n";
    report += strf("integral = %.3f\n", integral);
    report += strf("disk-and-wheel check = %.6f\n", wheel);
    report += strf("difference = %.2e\n", std::abs(integral - wheel));

    write_demo_files(dir, "sine-integral", result,
                     two_series_plot("sin(t) and its running integral", "U", "OUT"), report);
    return report;
}

std::string demo_adc_roundtrip(const fs::path& dir) {
    std::string report = "4-bit converter, quantum 1: value -> digits -> value\n";
    int exact = 0;
    for (int v = 0; v <= 15; ++v) {
        const auto digits = adc(static_cast<double>(v), 4, 1.0);
        std::string bits;
        for (double d : digits) {
            bits += d > 2.5 ? '1' : '0';
        }
        const double back = dac(digits, 1.0);
        if (back == static_cast<double>(v)) {
            ++exact;
        }
        report += strf("%d -> %s -> %g\n", v, bits.c_str(), back);
    }
    report += strf("roundtrip exact for %d/16 codes\n", exact);

    SimResult result = run(parse(
        "block const C val=1 out=ONE\n"
        "block int I ic=0 in=ONE out=RAMP\n"
        "block adc A n_bits=4 quantum=1 in=RAMP out=CODE\n"
        "block dac D quantum=1 in=CODE out=RECON\n"
        "probe RAMP\n"
        "probe RECON\n"
        "sim dt=0.01 t=16 method=rk4\n"));
    write_demo_files(dir, "adc-roundtrip", result,
                     two_series_plot("ramp through a 4-bit convert/reconstruct pair", "RAMP",
                                     "RECON"),
                     report);
    return report;
}

} // namespace

const std::vector<std::string>& demo_names() {
    static const std::vector<std::string> names = {"springmass", "gibbs", "drift",
                                                   "sine-integral", "adc-roundtrip"};
    return names;
}

std::string run_demo(const std::string& name, const std::string& out_dir) {
    const fs::path dir(out_dir);
    if (name == "springmass") {
        return demo_springmass(dir);
    }
    if (name == "gibbs") {
        return demo_gibbs(dir);
    }
    if (name == "drift") {
        return demo_drift(dir);
    }
    if (name == "sine-integral") {
        return demo_sine_integral(dir);
    }
    if (name == "adc-roundtrip") {
        return demo_adc_roundtrip(dir);
    }
    throw ContractError("unknown demo '" + name + "'");
}

} // namespace patchsim::demos
