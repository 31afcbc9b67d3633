#pragma once

#include "patchsim/netlist.hpp"
#include "patchsim/signal.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace patchsim {

/// Execution plan for one circuit: which blocks hold state and in what
/// order the memoryless blocks fire, with integrator outputs treated as
/// sources for that ordering.
struct Schedule {
    std::vector<int> state_blocks;            ///< integrator block indices, declaration order
    std::vector<double> initial_conditions;   ///< one per state block
    std::vector<int> static_order;            ///< every non-integrator block exactly once
};

Schedule compile(const CircuitGraph& graph);

/// A probed or internal net exceeding the machine limit at a grid point.
struct NetOverload {
    std::string net;
    double time = 0.0;
    double value = 0.0;
};

/// Everything a finished run produced. Immutable once returned.
struct SimResult {
    std::vector<Trace> traces;          ///< one per probe, in probe order
    std::vector<NetOverload> overloads; ///< grid-point limit violations, in time order
    Method method = Method::Rk4;
    std::size_t n_steps = 0;

    bool has_trace(const std::string& net) const;
    const Trace& trace(const std::string& net) const;
};

SimResult run(const NetlistDoc& doc);
SimResult run(const CircuitGraph& graph);

/// One term of a residual expression: coeff times the named trace, or a
/// central finite difference of it (derivative 1 or 2).
struct ResidualTerm {
    std::string net;
    int derivative = 0;
    double coeff = 1.0;
};

struct ResidualExpr {
    std::vector<ResidualTerm> terms;
    double constant = 0.0;
};

/// The defining-equation residual of the shipped spring-mass circuit,
/// written over its probed nets: d(XDOT)/dt + 3 XDOT + 16 X + 80.
ResidualExpr springmass_residual();

/// Pointwise |expr| over the interior grid points of the run (endpoints
/// carry no central difference and are excluded).
Trace residual(const SimResult& result, const ResidualExpr& expr);

/// Largest |value| among samples with time in [t_lo, t_hi]. t_lo must not
/// exceed t_hi.
double trace_max_abs(const Trace& trace, double t_lo, double t_hi);

/// Measured order of accuracy from a dt sweep: each run is compared
/// against a reference run at one sixteenth of the smallest step, taking
/// the largest pointwise trace difference over the whole trajectory.
/// Step sizes that divide evenly into the reference grid are compared
/// sample-for-sample; others fall back to interpolating the reference.
struct ConvergenceReport {
    double slope = 0.0;
    bool applicable = false;   ///< false when every error is at rounding level
    bool smooth = true;        ///< false when the circuit has discontinuous blocks
    std::vector<double> dts;
    std::vector<double> errors;
};

ConvergenceReport convergence_order(const NetlistDoc& doc, std::vector<double> dts);

/// Integrator drift driven by an imperfect step input: the exact step has
/// zero slope after the jump, the approximate one keeps a residual slope.
struct DriftReport {
    double drift_exact = 0.0;
    double drift_approx = 0.0;
};

DriftReport drift_experiment(double residual_slope, double t_end);

} // namespace patchsim
