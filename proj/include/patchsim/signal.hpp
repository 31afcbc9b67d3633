#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace patchsim {

/// Uniform time grid. Sample k lives at t_start + k * dt, computed by
/// multiplication so that long grids do not accumulate additive drift.
struct TimeGrid {
    double t_start = 0.0;
    double dt = 0.0;
    std::size_t n_steps = 0;

    TimeGrid() = default;
    TimeGrid(double t_start, double dt, std::size_t n_steps);

    double time_at(std::size_t k) const { return t_start + static_cast<double>(k) * dt; }
    double t_end() const { return time_at(n_steps); }
    std::size_t n_samples() const { return n_steps + 1; }

    bool operator==(const TimeGrid&) const = default;
};

/// A sampled machine variable: one value per grid point, all finite.
class Trace {
public:
    Trace() = default;
    Trace(TimeGrid grid, std::vector<double> values, std::string name);

    const TimeGrid& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    const std::string& name() const { return name_; }
    double operator[](std::size_t k) const { return values_[k]; }
    std::size_t size() const { return values_.size(); }

private:
    TimeGrid grid_;
    std::vector<double> values_;
    std::string name_;
};

/// Electrical limits of the simulated machine, in machine units.
struct MachineLimits {
    double max_abs = 100.0;

    MachineLimits() = default;
    explicit MachineLimits(double max_abs);
};

/// Amplitude-scaling factor applied to a signal (never zero, so it can be
/// undone).
struct ScaleMap {
    double factor = 1.0;

    ScaleMap() = default;
    explicit ScaleMap(double factor);
};

/// One sample outside the machine limits.
struct OverloadViolation {
    double time = 0.0;
    double value = 0.0;

    bool operator==(const OverloadViolation&) const = default;
};

/// Linear interpolation of a trace at time t. Exact at grid points.
/// Throws RangeError for t outside [t_start, t_end].
double trace_sample(const Trace& trace, double t);

/// Multiply every sample by s.factor; the grid and name are unchanged.
Trace apply_scale(const Trace& trace, const ScaleMap& s);

/// Every sample with |value| strictly above lim.max_abs, in time order.
std::vector<OverloadViolation> check_overload(const Trace& trace, const MachineLimits& lim);

/// CSV trace file: header "t,<name1>,...", one row per grid point, values
/// printed with shortest round-trip-exact decimals. All traces must share
/// one grid.
void write_csv(std::ostream& out, const std::vector<Trace>& traces);
void write_csv_file(const std::string& path, const std::vector<Trace>& traces);

/// Read back a CSV trace file written by write_csv.
std::vector<Trace> read_csv(std::istream& in);

/// Shortest decimal representation of v that parses back to exactly v.
std::string format_double(double v);

} // namespace patchsim
