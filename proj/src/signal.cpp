#include "patchsim/signal.hpp"

#include "patchsim/errors.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

namespace patchsim {

TimeGrid::TimeGrid(double t_start, double dt, std::size_t n_steps)
    : t_start(t_start), dt(dt), n_steps(n_steps) {
    if (!(dt > 0.0)) {
        throw ContractError("TimeGrid: dt must be > 0");
    }
    if (n_steps < 1) {
        throw ContractError("TimeGrid: n_steps must be >= 1");
    }
}

Trace::Trace(TimeGrid grid, std::vector<double> values, std::string name)
    : grid_(grid), values_(std::move(values)), name_(std::move(name)) {
    if (values_.size() != grid_.n_samples()) {
        throw ContractError("Trace '" + name_ + "': expected " +
                            std::to_string(grid_.n_samples()) + " values, got " +
                            std::to_string(values_.size()));
    }
    for (std::size_t k = 0; k < values_.size(); ++k) {
        if (!std::isfinite(values_[k])) {
            throw ContractError("Trace '" + name_ + "': non-finite value at sample " +
                                std::to_string(k));
        }
    }
}

MachineLimits::MachineLimits(double max_abs) : max_abs(max_abs) {
    if (!(max_abs > 0.0)) {
        throw ContractError("MachineLimits: max_abs must be > 0");
    }
}

ScaleMap::ScaleMap(double factor) : factor(factor) {
    if (factor == 0.0 || !std::isfinite(factor)) {
        throw ContractError("ScaleMap: factor must be nonzero and finite");
    }
}

double trace_sample(const Trace& trace, double t) {
    const TimeGrid& g = trace.grid();
    if (!(t >= g.t_start) || !(t <= g.t_end())) {
        throw RangeError("trace_sample: t = " + format_double(t) + " outside [" +
                         format_double(g.t_start) + ", " + format_double(g.t_end()) + "]");
    }
    double s = (t - g.t_start) / g.dt;
    auto k = static_cast<std::size_t>(std::max(0.0, std::floor(s)));
    if (k >= g.n_steps) {
        k = g.n_steps - 1;
    }
    // Nudge the bracket so grid-point queries hit their sample exactly.
    while (k > 0 && t < g.time_at(k)) {
        --k;
    }
    while (k + 1 < g.n_steps && t >= g.time_at(k + 1)) {
        ++k;
    }
    const double t0 = g.time_at(k);
    const double t1 = g.time_at(k + 1);
    if (t == t0) {
        return trace[k];
    }
    if (t == t1) {
        return trace[k + 1];
    }
    const double u = (t - t0) / (t1 - t0);
    return trace[k] + u * (trace[k + 1] - trace[k]);
}

Trace apply_scale(const Trace& trace, const ScaleMap& s) {
    if (s.factor == 0.0) {
        throw ContractError("apply_scale: factor must be nonzero");
    }
    std::vector<double> scaled(trace.values());
    for (double& v : scaled) {
        v *= s.factor;
    }
    return Trace(trace.grid(), std::move(scaled), trace.name());
}

std::vector<OverloadViolation> check_overload(const Trace& trace, const MachineLimits& lim) {
    std::vector<OverloadViolation> out;
    for (std::size_t k = 0; k < trace.size(); ++k) {
        if (std::abs(trace[k]) > lim.max_abs) {
            out.push_back({trace.grid().time_at(k), trace[k]});
        }
    }
    return out;
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_csv(std::ostream& out, const std::vector<Trace>& traces) {
    if (traces.empty()) {
        throw ContractError("write_csv: no traces");
    }
    const TimeGrid& g = traces.front().grid();
    for (const Trace& tr : traces) {
        if (!(tr.grid() == g)) {
            throw ContractError("write_csv: traces do not share one grid");
        }
    }
    out << "t";
    for (const Trace& tr : traces) {
        out << "," << tr.name();
    }
    out << "\n";
    for (std::size_t k = 0; k < g.n_samples(); ++k) {
        out << format_double(g.time_at(k));
        for (const Trace& tr : traces) {
            out << "," << format_double(tr[k]);
        }
        out << "\n";
    }
}

void write_csv_file(const std::string& path, const std::vector<Trace>& traces) {
    std::ofstream out(path);
    if (!out) {
        throw Error("write_csv_file: cannot open '" + path + "'");
    }
    write_csv(out, traces);
}

namespace {

std::vector<std::string> split_comma(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

double parse_number(const std::string& s, std::size_t row) {
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') {
        throw Error("read_csv: bad number '" + s + "' in row " + std::to_string(row));
    }
    return v;
}

} // namespace

std::vector<Trace> read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw Error("read_csv: empty input");
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    auto header = split_comma(line);
    if (header.size() < 2 || header[0] != "t") {
        throw Error("read_csv: header must be t,<name>,...");
    }
    std::vector<double> times;
    std::vector<std::vector<double>> columns(header.size() - 1);
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        auto fields = split_comma(line);
        if (fields.size() != header.size()) {
            throw Error("read_csv: row " + std::to_string(row) + " has " +
                        std::to_string(fields.size()) + " fields, expected " +
                        std::to_string(header.size()));
        }
        times.push_back(parse_number(fields[0], row));
        for (std::size_t c = 1; c < fields.size(); ++c) {
            columns[c - 1].push_back(parse_number(fields[c], row));
        }
    }
    if (times.size() < 2) {
        throw Error("read_csv: need at least two rows");
    }
    TimeGrid grid(times.front(), times[1] - times[0], times.size() - 1);
    std::vector<Trace> traces;
    traces.reserve(columns.size());
    for (std::size_t c = 0; c < columns.size(); ++c) {
        traces.emplace_back(grid, std::move(columns[c]), header[c + 1]);
    }
    return traces;
}

} // namespace patchsim
