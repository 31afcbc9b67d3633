#include "patchsim/engine.hpp"

#include "patchsim/blocks.hpp"
#include "patchsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <span>

namespace patchsim {

namespace {

// Hard runaway cap, far above any plausible machine signal. Crossing it
// (or going non-finite) aborts the run as diverged; the sim directive's
// `limit` only logs overload warnings.
constexpr double kDivergeCap = 1e6;

LimiterKind limiter_kind(BlockKind kind) {
    switch (kind) {
        case BlockKind::LimitZero: return LimiterKind::Zero;
        case BlockKind::LimitDead: return LimiterKind::Dead;
        case BlockKind::LimitSat:  return LimiterKind::Sat;
        default:                   return LimiterKind::Bang;
    }
}

double max_adc_code(int n_bits) {
    return static_cast<double>((std::uint64_t{1} << n_bits) - 1);
}

class Runner {
public:
    explicit Runner(const CircuitGraph& graph)
        : graph_(graph), schedule_(compile(graph)), nets_(graph.net_names.size(), 0.0) {}

    SimResult run() {
        const SimDirective& sim = graph_.sim;
        const auto n = static_cast<std::size_t>(std::llround(sim.t_end / sim.dt));
        TimeGrid grid(0.0, sim.dt, n);

        SimResult result;
        result.method = sim.method;
        result.n_steps = n;

        std::vector<std::vector<double>> probe_rows(graph_.probe_nets.size());
        for (auto& rows : probe_rows) {
            rows.reserve(grid.n_samples());
        }

        std::vector<double> states = schedule_.initial_conditions;
        for (std::size_t k = 0; k <= n; ++k) {
            const double t = grid.time_at(k);
            eval_statics(t, states);
            for (std::size_t p = 0; p < graph_.probe_nets.size(); ++p) {
                probe_rows[p].push_back(nets_[static_cast<std::size_t>(graph_.probe_nets[p])]);
            }
            record_overloads(t, sim.limit, result.overloads);
            if (k == n) {
                break;
            }
            step(t, sim, states);
        }

        result.traces.reserve(probe_rows.size());
        for (std::size_t p = 0; p < probe_rows.size(); ++p) {
            result.traces.emplace_back(grid, std::move(probe_rows[p]), graph_.probe_names[p]);
        }
        return result;
    }

private:
    void step(double t, const SimDirective& sim, std::vector<double>& states) {
        const double dt = sim.dt;
        const std::size_t m = states.size();
        // Statics for time t are already in nets_, so the first derivative
        // read needs no re-evaluation.
        std::vector<double> k1 = derivatives();
        if (sim.method == Method::Euler) {
            for (std::size_t i = 0; i < m; ++i) {
                states[i] += dt * k1[i];
            }
        } else {
            std::vector<double> stage(m);
            for (std::size_t i = 0; i < m; ++i) {
                stage[i] = states[i] + 0.5 * dt * k1[i];
            }
            eval_statics(t + 0.5 * dt, stage);
            std::vector<double> k2 = derivatives();
            for (std::size_t i = 0; i < m; ++i) {
                stage[i] = states[i] + 0.5 * dt * k2[i];
            }
            eval_statics(t + 0.5 * dt, stage);
            std::vector<double> k3 = derivatives();
            for (std::size_t i = 0; i < m; ++i) {
                stage[i] = states[i] + dt * k3[i];
            }
            eval_statics(t + dt, stage);
            std::vector<double> k4 = derivatives();
            for (std::size_t i = 0; i < m; ++i) {
                states[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
        }
        for (std::size_t i = 0; i < m; ++i) {
            if (!std::isfinite(states[i]) || std::abs(states[i]) > kDivergeCap) {
                const auto b = static_cast<std::size_t>(schedule_.state_blocks[i]);
                throw DivergedError(graph_.blocks[b].name, t + dt);
            }
        }
    }

    void eval_statics(double t, std::span<const double> states) {
        for (std::size_t i = 0; i < states.size(); ++i) {
            const auto b = static_cast<std::size_t>(schedule_.state_blocks[i]);
            nets_[static_cast<std::size_t>(graph_.blocks[b].output_net)] = states[i];
        }
        for (int bi : schedule_.static_order) {
            const CompiledBlock& block = graph_.blocks[static_cast<std::size_t>(bi)];
            const double v = eval_block(block, t);
            if (!std::isfinite(v) || std::abs(v) > kDivergeCap) {
                throw DivergedError(block.name, t);
            }
            nets_[static_cast<std::size_t>(block.output_net)] = v;
        }
    }

    double eval_block(const CompiledBlock& block, double t) const {
        auto in = [&](std::size_t i) {
            return nets_[static_cast<std::size_t>(block.input_nets[i])];
        };
        switch (block.kind) {
            case BlockKind::Const:
                return block.value;
            case BlockKind::SineSrc:
                return block.amp * std::sin(block.omega * t + block.phase);
            case BlockKind::FourierSquareSrc:
                return eval_fourier_square(t, block.n_terms, block.period, block.amp);
            case BlockKind::StepGen:
                return eval_stepgen(block.schedule, t);
            case BlockKind::Adder: {
                double sum = 0.0;
                for (std::size_t i = 0; i < block.input_nets.size(); ++i) {
                    sum += in(i);
                }
                return sum;
            }
            case BlockKind::Inv:
                return eval_inv(in(0));
            case BlockKind::Pot:
                return eval_pot(block.gain, in(0));
            case BlockKind::LimitZero:
            case BlockKind::LimitDead:
            case BlockKind::LimitSat:
            case BlockKind::LimitBang:
                return eval_limiter(limiter_kind(block.kind), block.limiter, in(0));
            case BlockKind::Afg:
                return eval_afg(block.breakpoints, in(0));
            case BlockKind::Adc: {
                // In-circuit converter emits the integer code on its output
                // net, saturating at the ends of its range.
                const double code = std::round(in(0) / block.quantum);
                return std::clamp(code, 0.0, max_adc_code(block.n_bits));
            }
            case BlockKind::Dac:
                return std::round(in(0)) * block.quantum;
            case BlockKind::Integrator:
                break;  // stateful; handled by the stepper
        }
        return 0.0;
    }

    std::vector<double> derivatives() const {
        std::vector<double> d(schedule_.state_blocks.size());
        for (std::size_t i = 0; i < d.size(); ++i) {
            const auto b = static_cast<std::size_t>(schedule_.state_blocks[i]);
            d[i] = nets_[static_cast<std::size_t>(graph_.blocks[b].input_nets[0])];
        }
        return d;
    }

    void record_overloads(double t, double limit, std::vector<NetOverload>& out) const {
        for (std::size_t n = 0; n < nets_.size(); ++n) {
            if (std::abs(nets_[n]) > limit) {
                out.push_back({graph_.net_names[n], t, nets_[n]});
            }
        }
    }

    const CircuitGraph& graph_;
    Schedule schedule_;
    std::vector<double> nets_;
};

} // namespace

Schedule compile(const CircuitGraph& graph) {
    Schedule schedule;
    schedule.state_blocks = graph.integrators;
    schedule.initial_conditions.reserve(graph.integrators.size());
    for (int b : graph.integrators) {
        schedule.initial_conditions.push_back(graph.blocks[static_cast<std::size_t>(b)].ic);
    }
    schedule.static_order = graph.static_order;
    return schedule;
}

bool SimResult::has_trace(const std::string& net) const {
    return std::any_of(traces.begin(), traces.end(),
                       [&](const Trace& t) { return t.name() == net; });
}

const Trace& SimResult::trace(const std::string& net) const {
    for (const Trace& t : traces) {
        if (t.name() == net) {
            return t;
        }
    }
    throw ContractError("no probed trace named '" + net + "'");
}

SimResult run(const CircuitGraph& graph) {
    return Runner(graph).run();
}

SimResult run(const NetlistDoc& doc) {
    return run(validate(doc));
}

ResidualExpr springmass_residual() {
    ResidualExpr expr;
    expr.terms = {{"XDOT", 1, 1.0}, {"XDOT", 0, 3.0}, {"X", 0, 16.0}};
    expr.constant = 80.0;
    return expr;
}

Trace residual(const SimResult& result, const ResidualExpr& expr) {
    if (expr.terms.empty()) {
        throw ContractError("residual expression has no terms");
    }
    std::vector<const Trace*> traces;
    traces.reserve(expr.terms.size());
    for (const ResidualTerm& term : expr.terms) {
        if (term.derivative < 0 || term.derivative > 2) {
            throw ContractError("residual derivative order must be 0, 1, or 2");
        }
        traces.push_back(&result.trace(term.net));
    }
    const TimeGrid& grid = traces.front()->grid();
    if (grid.n_steps < 2) {
        throw ContractError("residual needs at least two steps of history");
    }
    const double dt = grid.dt;

    std::vector<double> values;
    values.reserve(grid.n_steps - 1);
    for (std::size_t k = 1; k < grid.n_steps; ++k) {
        double sum = expr.constant;
        for (std::size_t i = 0; i < expr.terms.size(); ++i) {
            const Trace& tr = *traces[i];
            const double c = expr.terms[i].coeff;
            switch (expr.terms[i].derivative) {
                case 0: sum += c * tr[k]; break;
                case 1: sum += c * (tr[k + 1] - tr[k - 1]) / (2.0 * dt); break;
                case 2: sum += c * (tr[k + 1] - 2.0 * tr[k] + tr[k - 1]) / (dt * dt); break;
            }
        }
        values.push_back(std::abs(sum));
    }
    TimeGrid inner(grid.time_at(1), dt, grid.n_steps - 2);
    return Trace(inner, std::move(values), "residual");
}

double trace_max_abs(const Trace& trace, double t_lo, double t_hi) {
    if (t_lo > t_hi) {
        throw ContractError("trace_max_abs window is empty (t_lo > t_hi)");
    }
    double best = 0.0;
    for (std::size_t k = 0; k < trace.size(); ++k) {
        const double t = trace.grid().time_at(k);
        if (t >= t_lo && t <= t_hi) {
            best = std::max(best, std::abs(trace[k]));
        }
    }
    return best;
}

namespace {

bool kind_is_smooth(BlockKind kind) {
    switch (kind) {
        case BlockKind::StepGen:
        case BlockKind::LimitZero:
        case BlockKind::LimitDead:
        case BlockKind::LimitSat:
        case BlockKind::LimitBang:
        case BlockKind::Afg:
        case BlockKind::Adc:
        case BlockKind::Dac:
            return false;
        default:
            return true;
    }
}

std::vector<Trace> run_with_dt(const NetlistDoc& doc, double dt) {
    NetlistDoc copy = doc;
    copy.sim.dt = dt;
    return run(copy).traces;
}

/// Largest pointwise gap between a coarse trace and the fine reference.
/// When the coarse step is an exact multiple of the reference step the
/// grids nest and samples align index-for-index; otherwise the reference
/// is interpolated.
double trace_gap(const Trace& coarse, const Trace& fine) {
    const double ratio_f = coarse.grid().dt / fine.grid().dt;
    const auto ratio = static_cast<std::size_t>(std::llround(ratio_f));
    const bool nested =
        ratio >= 1 && std::abs(ratio_f - static_cast<double>(ratio)) <= 1e-9 * ratio_f;
    double gap = 0.0;
    for (std::size_t k = 0; k < coarse.size(); ++k) {
        double ref;
        if (nested && k * ratio < fine.size()) {
            ref = fine[k * ratio];
        } else {
            const double t =
                std::clamp(coarse.grid().time_at(k), fine.grid().t_start, fine.grid().t_end());
            ref = trace_sample(fine, t);
        }
        gap = std::max(gap, std::abs(coarse[k] - ref));
    }
    return gap;
}

} // namespace

ConvergenceReport convergence_order(const NetlistDoc& doc, std::vector<double> dts) {
    if (dts.size() < 3) {
        throw ContractError("convergence_order needs at least three step sizes");
    }
    for (double dt : dts) {
        if (!(dt > 0.0)) {
            throw ContractError("convergence_order step sizes must be > 0");
        }
    }
    if (doc.probes.empty()) {
        throw ContractError("convergence_order needs at least one probe");
    }

    ConvergenceReport report;
    report.dts = dts;
    for (const BlockDecl& block : doc.blocks) {
        if (!kind_is_smooth(block.kind)) {
            report.smooth = false;
        }
    }

    const double dt_ref = *std::min_element(dts.begin(), dts.end()) / 16.0;
    const std::vector<Trace> reference = run_with_dt(doc, dt_ref);

    report.errors.reserve(dts.size());
    for (double dt : dts) {
        const std::vector<Trace> traces = run_with_dt(doc, dt);
        double err = 0.0;
        for (std::size_t i = 0; i < traces.size(); ++i) {
            err = std::max(err, trace_gap(traces[i], reference[i]));
        }
        report.errors.push_back(err);
    }

    report.applicable =
        std::any_of(report.errors.begin(), report.errors.end(), [](double e) { return e > 1e-12; });
    if (!report.applicable) {
        return report;
    }

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const auto n = static_cast<double>(dts.size());
    for (std::size_t i = 0; i < dts.size(); ++i) {
        const double x = std::log(dts[i]);
        const double y = std::log(std::max(report.errors[i], 1e-300));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    report.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return report;
}

DriftReport drift_experiment(double residual_slope, double t_end) {
    if (residual_slope < 0.0) {
        throw ContractError("residual slope must be >= 0");
    }
    if (!(t_end > 0.0)) {
        throw ContractError("t_end must be > 0");
    }
    const double dt = t_end / 10000.0;
    const std::string tail = " out=U\nblock int I ic=0 in=U out=OUT\nprobe OUT\nsim dt=" +
                             format_double(dt) + " t=" + format_double(t_end) + " method=rk4\n";

    const std::string exact_text = "block stepgen S times=0 levels=1" + tail;
    SimResult exact = run(parse(exact_text));

    const std::string approx_text =
        "block stepgen S times=0 levels=1 out=STEP\n"
        "block const E val=" + format_double(residual_slope) + " out=EPS\n"
        "block int R ic=0 in=EPS out=RAMP\n"
        "block adder A in=STEP,RAMP" + tail;
    SimResult approx = run(parse(approx_text));

    const double ideal = exact.trace("OUT").grid().t_end();
    DriftReport report;
    const Trace& e = exact.trace("OUT");
    const Trace& a = approx.trace("OUT");
    report.drift_exact = std::abs(e[e.size() - 1] - ideal);
    report.drift_approx = std::abs(a[a.size() - 1] - ideal);
    return report;
}

} // namespace patchsim
