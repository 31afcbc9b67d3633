#pragma once

#include "patchsim/blocks.hpp"

#include <map>
#include <string>
#include <vector>

namespace patchsim {

/// Value of one `key=...` item: either a list of reals (a scalar is a
/// one-element list) or a bare identifier such as `method=rk4`.
struct ParamValue {
    std::vector<double> numbers;
    std::string ident;

    bool is_ident() const { return !ident.empty(); }
    bool is_scalar() const { return numbers.size() == 1; }
    double scalar() const { return numbers.front(); }

    static ParamValue number(double v) { return {{v}, {}}; }
    static ParamValue list(std::vector<double> v) { return {std::move(v), {}}; }
    static ParamValue identifier(std::string s) { return {{}, std::move(s)}; }

    bool operator==(const ParamValue&) const = default;
};

/// One component instance as written in the netlist.
struct BlockDecl {
    std::string name;
    BlockKind kind = BlockKind::Const;
    std::map<std::string, ParamValue> params;
    std::vector<std::string> inputs;
    std::string output;
    int line = 0;
};

enum class Method { Euler, Rk4 };

const char* method_name(Method m);

/// The one `sim` line: step size, end time, method, machine limit.
struct SimDirective {
    double dt = 0.0;
    double t_end = 0.0;
    Method method = Method::Rk4;
    double limit = 100.0;
    int line = 0;
};

struct ProbeDecl {
    std::string net;
    int line = 0;
};

/// Parsed netlist document, declaration order preserved.
struct NetlistDoc {
    std::vector<BlockDecl> blocks;
    std::vector<ProbeDecl> probes;
    SimDirective sim;
};

/// Equality up to source positions (line numbers are ignored).
bool structurally_equal(const NetlistDoc& a, const NetlistDoc& b);

/// One block with resolved nets and typed parameters, ready to evaluate.
struct CompiledBlock {
    std::string name;
    BlockKind kind = BlockKind::Const;
    int line = 0;
    std::vector<int> input_nets;
    int output_net = -1;

    double value = 0.0;                              // const
    double gain = 1.0;                               // pot
    double ic = 0.0;                                 // int
    double amp = 1.0, omega = 1.0, phase = 0.0;      // sine (amp also fsquare)
    int n_terms = 1;                                 // fsquare
    double period = 1.0;                             // fsquare
    StepSchedule schedule;                           // stepgen
    LimiterParams limiter;                           // zero/dead/sat/bang
    std::vector<std::pair<double, double>> breakpoints;  // afg
    int n_bits = 8;                                  // adc
    double quantum = 1.0;                            // adc/dac
};

/// Validated dataflow graph. Nets are indices into net_names; static_order
/// is a deterministic topological order of the memoryless blocks with
/// integrator outputs treated as sources.
struct CircuitGraph {
    std::vector<CompiledBlock> blocks;
    std::vector<std::string> net_names;
    std::vector<int> net_driver;        // driving block index per net
    std::vector<int> static_order;      // non-integrator block indices
    std::vector<int> integrators;       // integrator block indices, in declaration order
    std::vector<int> probe_nets;
    std::vector<std::string> probe_names;
    SimDirective sim;
};

/// Parse the patch language:
///   block <kind> <name> [key=value ...] [in=<net>[,<net>...]] out=<net>
///   probe <net>
///   sim dt=<r> t=<r> method=<euler|rk4> [limit=<r>]
/// `#` starts a comment; blank lines are ignored. Declarations keep their
/// source line numbers. Throws ParseError.
NetlistDoc parse(const std::string& text);

/// Semantic checks (arity, one driver per net, no dangling nets, probes
/// driven, no algebraic loops) plus parameter typing. Throws ValidateError.
CircuitGraph validate(const NetlistDoc& doc);

/// Canonical text for a document: parse(format(d)) is structurally equal
/// to d. Keys print alphabetically; comments are not preserved.
std::string format(const NetlistDoc& doc);

} // namespace patchsim
