#include "patchsim/blocks.hpp"

#include "patchsim/errors.hpp"
#include "patchsim/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace patchsim {

const char* block_kind_name(BlockKind kind) {
    switch (kind) {
        case BlockKind::Const: return "const";
        case BlockKind::SineSrc: return "sine";
        case BlockKind::FourierSquareSrc: return "fsquare";
        case BlockKind::StepGen: return "stepgen";
        case BlockKind::Adder: return "adder";
        case BlockKind::Inv: return "inv";
        case BlockKind::Pot: return "pot";
        case BlockKind::Integrator: return "int";
        case BlockKind::LimitZero: return "zero";
        case BlockKind::LimitDead: return "dead";
        case BlockKind::LimitSat: return "sat";
        case BlockKind::LimitBang: return "bang";
        case BlockKind::Afg: return "afg";
        case BlockKind::Adc: return "adc";
        case BlockKind::Dac: return "dac";
    }
    return "?";
}

StepSchedule::StepSchedule(std::vector<Segment> segs, ContactStyle contact, double overlap)
    : segments(std::move(segs)), contact(contact), overlap(overlap) {
    if (segments.empty()) {
        throw ContractError("StepSchedule: needs at least one segment");
    }
    if (segments.front().start_time != 0.0) {
        throw ContractError("StepSchedule: first segment must start at t = 0");
    }
    for (std::size_t i = 1; i < segments.size(); ++i) {
        if (!(segments[i].start_time > segments[i - 1].start_time)) {
            throw ContractError("StepSchedule: start times must be strictly increasing");
        }
    }
    if (overlap < 0.0) {
        throw ContractError("StepSchedule: overlap must be >= 0");
    }
}

DiskIntegratorParams::DiskIntegratorParams(double omega_a, double gain)
    : omega_a(omega_a), gain(gain) {
    if (!(omega_a > 0.0)) {
        throw ContractError("DiskIntegratorParams: omega_a must be > 0");
    }
    if (!(gain > 0.0)) {
        throw ContractError("DiskIntegratorParams: gain must be > 0");
    }
}

double eval_adder(std::span<const double> inputs) {
    double sum = 0.0;
    for (double v : inputs) {
        sum += v;
    }
    return sum;
}

double eval_pot(double gain, double input) {
    return gain * input;
}

double eval_inv(double input) {
    return -input;
}

double eval_limiter(LimiterKind kind, const LimiterParams& params, double input) {
    switch (kind) {
        case LimiterKind::Zero:
            return std::max(0.0, input - params.threshold);
        case LimiterKind::Dead: {
            const double w = params.half_width;
            if (std::abs(input) <= w) {
                return 0.0;
            }
            return input > 0.0 ? input - w : input + w;
        }
        case LimiterKind::Sat:
            return std::clamp(input, -params.level, params.level);
        case LimiterKind::Bang:
            if (input < params.threshold) {
                return -params.level;
            }
            if (input > params.threshold) {
                return params.level;
            }
            return 0.0;
    }
    return 0.0;
}

double eval_afg(std::span<const std::pair<double, double>> breakpoints, double input) {
    if (breakpoints.size() < 2) {
        throw ContractError("eval_afg: needs at least two breakpoints");
    }
    if (input <= breakpoints.front().first) {
        return breakpoints.front().second;
    }
    if (input >= breakpoints.back().first) {
        return breakpoints.back().second;
    }
    auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), input,
                               [](double x, const auto& bp) { return x < bp.first; });
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double u = (input - lo.first) / (hi.first - lo.first);
    return lo.second + u * (hi.second - lo.second);
}

double eval_stepgen(const StepSchedule& schedule, double t) {
    if (t < 0.0) {
        throw RangeError("eval_stepgen: t must be >= 0");
    }
    const auto& segs = schedule.segments;
    // Last segment whose start time is <= t.
    std::size_t j = 0;
    while (j + 1 < segs.size() && segs[j + 1].start_time <= t) {
        ++j;
    }
    if (schedule.contact == ContactStyle::MakeBeforeBreak && j > 0 &&
        t < segs[j].start_time + schedule.overlap) {
        // Two taps shorted: output sits at their mean.
        return 0.5 * (segs[j - 1].level + segs[j].level);
    }
    return segs[j].level;
}

double disk_rotations(const Trace& position, const DiskIntegratorParams& p) {
    const double integral =
        kernels::trapezoid(position.values(), position.grid().dt);
    return p.gain * p.omega_a * integral;
}

std::vector<double> adc(double value, int n_bits, double quantum) {
    if (n_bits < 1 || n_bits > 32) {
        throw ContractError("adc: n_bits must be in [1, 32]");
    }
    if (!(quantum > 0.0)) {
        throw ContractError("adc: quantum must be > 0");
    }
    const double ratio = value / quantum;
    const double max_code = std::ldexp(1.0, n_bits);  // 2^n_bits
    if (!(ratio >= 0.0) || !(ratio < max_code)) {
        throw RangeError("adc: value/quantum = " + std::to_string(ratio) +
                         " outside [0, 2^" + std::to_string(n_bits) + ")");
    }
    const auto code = static_cast<std::uint64_t>(std::llround(ratio));
    if (code >= static_cast<std::uint64_t>(max_code)) {
        throw RangeError("adc: value rounds past the top code");
    }
    std::vector<double> digits(static_cast<std::size_t>(n_bits));
    for (int bit = 0; bit < n_bits; ++bit) {
        const bool set = (code >> (n_bits - 1 - bit)) & 1u;
        digits[static_cast<std::size_t>(bit)] = set ? 5.0 : 0.0;
    }
    return digits;
}

double dac(std::span<const double> digit_voltages, double quantum) {
    if (digit_voltages.empty()) {
        throw ContractError("dac: needs at least one digit");
    }
    if (!(quantum > 0.0)) {
        throw ContractError("dac: quantum must be > 0");
    }
    std::uint64_t code = 0;
    for (double v : digit_voltages) {
        int bit;
        if (std::abs(v - 0.0) <= 0.5) {
            bit = 0;
        } else if (std::abs(v - 5.0) <= 0.5) {
            bit = 1;
        } else {
            throw MalformedDigitError("dac: digit voltage " + std::to_string(v) +
                                      " is not near 0 V or 5 V");
        }
        code = (code << 1) | static_cast<std::uint64_t>(bit);
    }
    return static_cast<double>(code) * quantum;
}

double eval_fourier_square(double t, int n_terms, double period, double amplitude) {
    if (n_terms < 1) {
        throw ContractError("eval_fourier_square: n_terms must be >= 1");
    }
    if (!(period > 0.0)) {
        throw ContractError("eval_fourier_square: period must be > 0");
    }
    const double w = 2.0 * M_PI / period;
    double sum = 0.0;
    for (int j = 0; j < n_terms; ++j) {
        const int k = 2 * j + 1;
        sum += std::sin(w * k * t) / k;
    }
    return 4.0 * amplitude / M_PI * sum;
}

} // namespace patchsim
