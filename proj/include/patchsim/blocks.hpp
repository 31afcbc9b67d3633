#pragma once

#include "patchsim/signal.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace patchsim {

/// Component kinds accepted by the netlist language.
enum class BlockKind {
    Const,
    SineSrc,
    FourierSquareSrc,
    StepGen,
    Adder,
    Inv,
    Pot,
    Integrator,
    LimitZero,
    LimitDead,
    LimitSat,
    LimitBang,
    Afg,
    Adc,
    Dac,
};

const char* block_kind_name(BlockKind kind);

/// Contact style of a switch-type step generator. Break-before-make opens
/// one contact before closing the next, giving a true jump;
/// make-before-break shorts two adjacent taps for `overlap` seconds, during
/// which the output sits at the mean of the two levels.
enum class ContactStyle { BreakBeforeMake, MakeBeforeBreak };

/// Piecewise-constant schedule for the step generator. Segment start times
/// are strictly increasing and the first one is 0.
struct StepSchedule {
    struct Segment {
        double start_time = 0.0;
        double level = 0.0;
    };

    std::vector<Segment> segments;
    ContactStyle contact = ContactStyle::BreakBeforeMake;
    double overlap = 0.0;

    StepSchedule() = default;
    StepSchedule(std::vector<Segment> segments, ContactStyle contact = ContactStyle::BreakBeforeMake,
                 double overlap = 0.0);
};

/// Mechanical disk-and-wheel integrator: disk A spins at omega_a
/// revolutions per second, the output wheel B picks up rotations
/// proportionally to the radial position of its contact point.
struct DiskIntegratorParams {
    double omega_a = 1.0;
    double gain = 1.0;

    DiskIntegratorParams() = default;
    DiskIntegratorParams(double omega_a, double gain);
};

/// Selector for the four discontinuity blocks (see eval_limiter).
enum class LimiterKind { Zero, Dead, Sat, Bang };

struct LimiterParams {
    double threshold = 0.0;   // zero, bang
    double half_width = 0.0;  // dead
    double level = 0.0;       // sat, bang
};

/// Exact sum of all inputs. Arity >= 2 is enforced at validate time.
double eval_adder(std::span<const double> inputs);

/// gain * input. Gains above 1 fold the make-up amplifier into the pot.
double eval_pot(double gain, double input);

/// -input.
double eval_inv(double input);

/// The four discontinuity transfer curves:
///   zero: max(0, x - threshold)
///   dead: 0 inside [-half_width, half_width], else x shifted toward 0 by half_width
///   sat:  clamp(x, -level, +level)
///   bang: -level below threshold, +level above, 0 at exactly threshold
double eval_limiter(LimiterKind kind, const LimiterParams& params, double input);

/// Piecewise-linear interpolation through >= 2 breakpoints with strictly
/// increasing abscissae; inputs outside the table clamp to the end values.
double eval_afg(std::span<const std::pair<double, double>> breakpoints, double input);

/// Output of the step generator at time t >= 0.
double eval_stepgen(const StepSchedule& schedule, double t);

/// Signed rotation count of wheel B after tracking `position` over its full
/// grid: gain * omega_a * integral of position dt (trapezoidal rule).
/// Negative positions ride the other side of the disk center and subtract.
double disk_rotations(const Trace& position, const DiskIntegratorParams& p);

/// Binary digit voltages (most-significant first, 0 V or 5 V) for
/// round(value / quantum), ties away from zero. The code must fit in
/// n_bits; anything negative or too large is a RangeError.
std::vector<double> adc(double value, int n_bits, double quantum);

/// Inverse of adc on representable values. Each entry must be within 0.5 V
/// of 0 or 5, otherwise MalformedDigitError.
double dac(std::span<const double> digit_voltages, double quantum);

/// Partial Fourier sum of a square wave of the given period and amplitude:
/// (4 A / pi) * sum over odd k <= 2 n_terms - 1 of sin(2 pi k t / period) / k.
double eval_fourier_square(double t, int n_terms, double period, double amplitude);

} // namespace patchsim
