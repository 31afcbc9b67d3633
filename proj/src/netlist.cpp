#include "patchsim/netlist.hpp"

#include "patchsim/errors.hpp"
#include "patchsim/signal.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <set>
#include <sstream>
#include <unordered_map>

namespace patchsim {

const char* method_name(Method m) {
    return m == Method::Euler ? "euler" : "rk4";
}

namespace {

const std::unordered_map<std::string, BlockKind>& kind_table() {
    static const std::unordered_map<std::string, BlockKind> table = {
        {"const", BlockKind::Const},       {"sine", BlockKind::SineSrc},
        {"fsquare", BlockKind::FourierSquareSrc}, {"stepgen", BlockKind::StepGen},
        {"adder", BlockKind::Adder},       {"inv", BlockKind::Inv},
        {"pot", BlockKind::Pot},           {"int", BlockKind::Integrator},
        {"zero", BlockKind::LimitZero},    {"dead", BlockKind::LimitDead},
        {"sat", BlockKind::LimitSat},      {"bang", BlockKind::LimitBang},
        {"afg", BlockKind::Afg},           {"adc", BlockKind::Adc},
        {"dac", BlockKind::Dac},
    };
    return table;
}

bool is_identifier(const std::string& s) {
    if (s.empty() || (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_')) {
        return false;
    }
    return std::all_of(s.begin(), s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    });
}

std::optional<double> try_number(const std::string& s) {
    if (s.empty()) {
        return std::nullopt;
    }
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || !std::isfinite(v)) {
        return std::nullopt;
    }
    return v;
}

struct Token {
    std::string text;
    int col = 0;
};

std::vector<Token> tokenize(const std::string& line) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        if (line[i] == '#') {
            break;
        }
        if (std::isspace(static_cast<unsigned char>(line[i]))) {
            ++i;
            continue;
        }
        std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])) &&
               line[i] != '#') {
            ++i;
        }
        tokens.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
    }
    return tokens;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = s.find(',', start);
        if (pos == std::string::npos) {
            parts.push_back(s.substr(start));
            return parts;
        }
        parts.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

ParamValue parse_value(const std::string& text, int line, int col, const std::string& key) {
    auto parts = split_list(text);
    std::vector<double> numbers;
    numbers.reserve(parts.size());
    bool all_numbers = true;
    for (const auto& part : parts) {
        if (auto v = try_number(part)) {
            numbers.push_back(*v);
        } else {
            all_numbers = false;
            break;
        }
    }
    if (all_numbers) {
        return ParamValue::list(std::move(numbers));
    }
    if (parts.size() == 1 && is_identifier(parts[0])) {
        return ParamValue::identifier(parts[0]);
    }
    throw ParseError(line, col, "bad value '" + text + "' for key '" + key + "'");
}

struct KeyValue {
    std::string key;
    std::string value;
    int col = 0;
};

KeyValue split_key_value(const Token& tok, int line) {
    std::size_t eq = tok.text.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ParseError(line, tok.col, "expected key=value, got '" + tok.text + "'");
    }
    KeyValue kv{tok.text.substr(0, eq), tok.text.substr(eq + 1), tok.col};
    if (!is_identifier(kv.key)) {
        throw ParseError(line, tok.col, "bad key '" + kv.key + "'");
    }
    if (kv.value.empty()) {
        throw ParseError(line, tok.col, "empty value for key '" + kv.key + "'");
    }
    return kv;
}

BlockDecl parse_block_line(const std::vector<Token>& tokens, int line) {
    if (tokens.size() < 3) {
        throw ParseError(line, tokens.back().col, "block needs a kind and a name");
    }
    BlockDecl decl;
    decl.line = line;
    auto kind_it = kind_table().find(tokens[1].text);
    if (kind_it == kind_table().end()) {
        throw ParseError(line, tokens[1].col, "unknown block kind '" + tokens[1].text + "'");
    }
    decl.kind = kind_it->second;
    if (!is_identifier(tokens[2].text)) {
        throw ParseError(line, tokens[2].col, "bad block name '" + tokens[2].text + "'");
    }
    decl.name = tokens[2].text;

    for (std::size_t i = 3; i < tokens.size(); ++i) {
        KeyValue kv = split_key_value(tokens[i], line);
        if (kv.key == "in") {
            if (!decl.inputs.empty()) {
                throw ParseError(line, kv.col, "duplicate in= on block '" + decl.name + "'");
            }
            for (const auto& net : split_list(kv.value)) {
                if (!is_identifier(net)) {
                    throw ParseError(line, kv.col, "bad net name '" + net + "'");
                }
                decl.inputs.push_back(net);
            }
        } else if (kv.key == "out") {
            if (!decl.output.empty()) {
                throw ParseError(line, kv.col, "duplicate out= on block '" + decl.name + "'");
            }
            if (!is_identifier(kv.value)) {
                throw ParseError(line, kv.col, "bad net name '" + kv.value + "'");
            }
            decl.output = kv.value;
        } else {
            if (decl.params.count(kv.key)) {
                throw ParseError(line, kv.col,
                                 "duplicate key '" + kv.key + "' on block '" + decl.name + "'");
            }
            decl.params.emplace(kv.key, parse_value(kv.value, line, kv.col, kv.key));
        }
    }
    if (decl.output.empty()) {
        throw ParseError(line, tokens[0].col, "block '" + decl.name + "' is missing out=");
    }
    return decl;
}

SimDirective parse_sim_line(const std::vector<Token>& tokens, int line) {
    SimDirective sim;
    sim.line = line;
    bool have_dt = false, have_t = false, have_method = false;
    std::set<std::string> seen;
    for (std::size_t i = 1; i < tokens.size(); ++i) {
        KeyValue kv = split_key_value(tokens[i], line);
        if (!seen.insert(kv.key).second) {
            throw ParseError(line, kv.col, "duplicate sim key '" + kv.key + "'");
        }
        if (kv.key == "method") {
            if (kv.value == "euler") {
                sim.method = Method::Euler;
            } else if (kv.value == "rk4") {
                sim.method = Method::Rk4;
            } else {
                throw ParseError(line, kv.col, "unknown method '" + kv.value + "'");
            }
            have_method = true;
            continue;
        }
        auto v = try_number(kv.value);
        if (!v) {
            throw ParseError(line, kv.col, "bad number '" + kv.value + "' for sim " + kv.key);
        }
        if (kv.key == "dt") {
            sim.dt = *v;
            have_dt = true;
        } else if (kv.key == "t") {
            sim.t_end = *v;
            have_t = true;
        } else if (kv.key == "limit") {
            sim.limit = *v;
        } else {
            throw ParseError(line, kv.col, "unknown sim key '" + kv.key + "'");
        }
    }
    if (!have_dt || !have_t || !have_method) {
        throw ParseError(line, tokens[0].col, "sim needs dt=, t= and method=");
    }
    if (!(sim.dt > 0.0)) {
        throw ParseError(line, tokens[0].col, "sim: dt must be > 0");
    }
    if (!(sim.t_end > 0.0)) {
        throw ParseError(line, tokens[0].col, "sim: t must be > 0");
    }
    if (sim.t_end / sim.dt > 1e8) {
        throw ParseError(line, tokens[0].col, "sim: t/dt exceeds 1e8 steps");
    }
    if (!(sim.limit > 0.0)) {
        throw ParseError(line, tokens[0].col, "sim: limit must be > 0");
    }
    return sim;
}

} // namespace

NetlistDoc parse(const std::string& text) {
    NetlistDoc doc;
    std::unordered_map<std::string, int> block_lines;
    bool have_sim = false;
    int sim_line = 0;

    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        auto tokens = tokenize(line);
        if (tokens.empty()) {
            continue;
        }
        const std::string& head = tokens[0].text;
        if (head == "block") {
            BlockDecl decl = parse_block_line(tokens, line_no);
            auto [it, inserted] = block_lines.emplace(decl.name, line_no);
            if (!inserted) {
                throw ParseError(line_no, tokens[2].col,
                                 "duplicate block name '" + decl.name + "' (lines " +
                                     std::to_string(it->second) + " and " +
                                     std::to_string(line_no) + ")");
            }
            doc.blocks.push_back(std::move(decl));
        } else if (head == "probe") {
            if (tokens.size() != 2 || !is_identifier(tokens[1].text)) {
                throw ParseError(line_no, tokens[0].col, "probe needs one net name");
            }
            doc.probes.push_back({tokens[1].text, line_no});
        } else if (head == "sim") {
            if (have_sim) {
                throw ParseError(line_no, tokens[0].col,
                                 "duplicate sim directive (first at line " +
                                     std::to_string(sim_line) + ")");
            }
            doc.sim = parse_sim_line(tokens, line_no);
            have_sim = true;
            sim_line = line_no;
        } else {
            throw ParseError(line_no, tokens[0].col,
                             "expected 'block', 'probe', or 'sim', got '" + head + "'");
        }
    }
    if (!have_sim) {
        throw ParseError(std::max(1, line_no), 1, "missing sim directive");
    }
    return doc;
}

bool structurally_equal(const NetlistDoc& a, const NetlistDoc& b) {
    if (a.blocks.size() != b.blocks.size() || a.probes.size() != b.probes.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.blocks.size(); ++i) {
        const BlockDecl& x = a.blocks[i];
        const BlockDecl& y = b.blocks[i];
        if (x.name != y.name || x.kind != y.kind || x.params != y.params ||
            x.inputs != y.inputs || x.output != y.output) {
            return false;
        }
    }
    for (std::size_t i = 0; i < a.probes.size(); ++i) {
        if (a.probes[i].net != b.probes[i].net) {
            return false;
        }
    }
    return a.sim.dt == b.sim.dt && a.sim.t_end == b.sim.t_end &&
           a.sim.method == b.sim.method && a.sim.limit == b.sim.limit;
}

namespace {

class BlockParams {
public:
    BlockParams(const BlockDecl& decl) : decl_(decl) {}

    double scalar(const std::string& key) {
        const ParamValue& v = require(key);
        if (v.is_ident() || !v.is_scalar()) {
            fail("key '" + key + "' must be a single number");
        }
        return v.scalar();
    }

    double scalar_or(const std::string& key, double fallback) {
        return decl_.params.count(key) ? scalar(key) : fallback;
    }

    std::vector<double> list(const std::string& key) {
        const ParamValue& v = require(key);
        if (v.is_ident()) {
            fail("key '" + key + "' must be a number list");
        }
        return v.numbers;
    }

    std::string ident_or(const std::string& key, const std::string& fallback) {
        if (!decl_.params.count(key)) {
            return fallback;
        }
        const ParamValue& v = decl_.params.at(key);
        if (!v.is_ident()) {
            fail("key '" + key + "' must be an identifier");
        }
        return v.ident;
    }

    bool has(const std::string& key) const { return decl_.params.count(key) > 0; }

    void mark_known(std::initializer_list<std::string> keys) {
        for (const auto& k : keys) {
            known_.insert(k);
        }
    }

    void finish() {
        for (const auto& [key, value] : decl_.params) {
            if (!known_.count(key)) {
                fail("unknown key '" + key + "' for kind '" +
                     block_kind_name(decl_.kind) + "'");
            }
        }
    }

    [[noreturn]] void fail(const std::string& msg) {
        throw ValidateError("block '" + decl_.name + "': " + msg, decl_.line);
    }

private:
    const ParamValue& require(const std::string& key) {
        auto it = decl_.params.find(key);
        if (it == decl_.params.end()) {
            fail("missing required key '" + key + "'");
        }
        return it->second;
    }

    const BlockDecl& decl_;
    std::set<std::string> known_;
};

void compile_params(const BlockDecl& decl, CompiledBlock& block) {
    BlockParams p(decl);
    switch (decl.kind) {
        case BlockKind::Const:
            p.mark_known({"val"});
            block.value = p.scalar("val");
            break;
        case BlockKind::SineSrc:
            p.mark_known({"amp", "omega", "phase"});
            block.amp = p.scalar_or("amp", 1.0);
            block.omega = p.scalar_or("omega", 1.0);
            block.phase = p.scalar_or("phase", 0.0);
            break;
        case BlockKind::FourierSquareSrc: {
            p.mark_known({"n_terms", "period", "amp"});
            const double n = p.scalar("n_terms");
            if (n < 1.0 || n != std::floor(n)) {
                p.fail("n_terms must be a positive integer");
            }
            block.n_terms = static_cast<int>(n);
            block.period = p.scalar("period");
            if (!(block.period > 0.0)) {
                p.fail("period must be > 0");
            }
            block.amp = p.scalar_or("amp", 1.0);
            break;
        }
        case BlockKind::StepGen: {
            p.mark_known({"times", "levels", "contact", "overlap"});
            auto times = p.list("times");
            auto levels = p.list("levels");
            if (times.size() != levels.size()) {
                p.fail("times and levels must have the same length");
            }
            std::vector<StepSchedule::Segment> segments;
            segments.reserve(times.size());
            for (std::size_t i = 0; i < times.size(); ++i) {
                segments.push_back({times[i], levels[i]});
            }
            auto contact = p.ident_or("contact", "bbm");
            ContactStyle style;
            if (contact == "bbm") {
                style = ContactStyle::BreakBeforeMake;
            } else if (contact == "mbb") {
                style = ContactStyle::MakeBeforeBreak;
            } else {
                p.fail("contact must be bbm or mbb");
            }
            double overlap = p.scalar_or("overlap", 0.0);
            try {
                block.schedule = StepSchedule(std::move(segments), style, overlap);
            } catch (const ContractError& e) {
                p.fail(e.what());
            }
            break;
        }
        case BlockKind::Adder:
        case BlockKind::Inv:
            p.mark_known({});
            break;
        case BlockKind::Pot:
            p.mark_known({"gain"});
            block.gain = p.scalar("gain");
            break;
        case BlockKind::Integrator:
            p.mark_known({"ic"});
            block.ic = p.scalar_or("ic", 0.0);
            break;
        case BlockKind::LimitZero:
            p.mark_known({"threshold"});
            block.limiter.threshold = p.scalar_or("threshold", 0.0);
            break;
        case BlockKind::LimitDead:
            p.mark_known({"half_width"});
            block.limiter.half_width = p.scalar("half_width");
            if (block.limiter.half_width < 0.0) {
                p.fail("half_width must be >= 0");
            }
            break;
        case BlockKind::LimitSat:
            p.mark_known({"level"});
            block.limiter.level = p.scalar("level");
            if (!(block.limiter.level > 0.0)) {
                p.fail("level must be > 0");
            }
            break;
        case BlockKind::LimitBang:
            p.mark_known({"level", "threshold"});
            block.limiter.level = p.scalar("level");
            block.limiter.threshold = p.scalar_or("threshold", 0.0);
            break;
        case BlockKind::Afg: {
            p.mark_known({"xs", "ys"});
            auto xs = p.list("xs");
            auto ys = p.list("ys");
            if (xs.size() != ys.size()) {
                p.fail("xs and ys must have the same length");
            }
            if (xs.size() < 2) {
                p.fail("afg needs at least two breakpoints");
            }
            for (std::size_t i = 1; i < xs.size(); ++i) {
                if (!(xs[i] > xs[i - 1])) {
                    p.fail("xs must be strictly increasing");
                }
            }
            block.breakpoints.reserve(xs.size());
            for (std::size_t i = 0; i < xs.size(); ++i) {
                block.breakpoints.emplace_back(xs[i], ys[i]);
            }
            break;
        }
        case BlockKind::Adc: {
            p.mark_known({"n_bits", "quantum"});
            const double n = p.scalar("n_bits");
            if (n < 1.0 || n > 32.0 || n != std::floor(n)) {
                p.fail("n_bits must be an integer in [1, 32]");
            }
            block.n_bits = static_cast<int>(n);
            block.quantum = p.scalar("quantum");
            if (!(block.quantum > 0.0)) {
                p.fail("quantum must be > 0");
            }
            break;
        }
        case BlockKind::Dac:
            p.mark_known({"quantum"});
            block.quantum = p.scalar("quantum");
            if (!(block.quantum > 0.0)) {
                p.fail("quantum must be > 0");
            }
            break;
    }
    p.finish();
}

void check_arity(const BlockDecl& decl) {
    const std::size_t n = decl.inputs.size();
    std::size_t lo = 1, hi = 1;
    switch (decl.kind) {
        case BlockKind::Const:
        case BlockKind::SineSrc:
        case BlockKind::FourierSquareSrc:
        case BlockKind::StepGen:
            lo = hi = 0;
            break;
        case BlockKind::Adder:
            lo = 2;
            hi = static_cast<std::size_t>(-1);
            break;
        default:
            break;
    }
    if (n < lo || n > hi) {
        std::string expect = lo == hi ? std::to_string(lo) : "at least " + std::to_string(lo);
        throw ValidateError("block '" + decl.name + "' (" + block_kind_name(decl.kind) +
                                "): expected " + expect + " input(s), got " + std::to_string(n),
                            decl.line);
    }
}

} // namespace

CircuitGraph validate(const NetlistDoc& doc) {
    CircuitGraph graph;
    graph.sim = doc.sim;

    std::unordered_map<std::string, int> net_ids;
    auto net_id = [&](const std::string& name) {
        auto [it, inserted] = net_ids.emplace(name, static_cast<int>(graph.net_names.size()));
        if (inserted) {
            graph.net_names.push_back(name);
        }
        return it->second;
    };

    graph.blocks.reserve(doc.blocks.size());
    for (const BlockDecl& decl : doc.blocks) {
        check_arity(decl);
        CompiledBlock block;
        block.name = decl.name;
        block.kind = decl.kind;
        block.line = decl.line;
        compile_params(decl, block);
        for (const std::string& net : decl.inputs) {
            block.input_nets.push_back(net_id(net));
        }
        block.output_net = net_id(decl.output);
        graph.blocks.push_back(std::move(block));
    }

    graph.net_driver.assign(graph.net_names.size(), -1);
    for (std::size_t b = 0; b < graph.blocks.size(); ++b) {
        const CompiledBlock& block = graph.blocks[b];
        int& driver = graph.net_driver[static_cast<std::size_t>(block.output_net)];
        if (driver >= 0) {
            const CompiledBlock& first = graph.blocks[static_cast<std::size_t>(driver)];
            throw ValidateError("net '" + graph.net_names[static_cast<std::size_t>(block.output_net)] +
                                    "' driven by both '" + first.name + "' (line " +
                                    std::to_string(first.line) + ") and '" + block.name + "'",
                                block.line);
        }
        driver = static_cast<int>(b);
        if (block.kind == BlockKind::Integrator) {
            graph.integrators.push_back(static_cast<int>(b));
        }
    }

    for (const CompiledBlock& block : graph.blocks) {
        for (int net : block.input_nets) {
            if (graph.net_driver[static_cast<std::size_t>(net)] < 0) {
                throw ValidateError("undriven net '" + graph.net_names[static_cast<std::size_t>(net)] +
                                        "' used by block '" + block.name + "'",
                                    block.line);
            }
        }
    }

    for (const ProbeDecl& probe : doc.probes) {
        auto it = net_ids.find(probe.net);
        if (it == net_ids.end() || graph.net_driver[static_cast<std::size_t>(it->second)] < 0) {
            throw ValidateError("probe on undriven net '" + probe.net + "'", probe.line);
        }
        graph.probe_nets.push_back(it->second);
        graph.probe_names.push_back(probe.net);
    }

    // Dependency edges among memoryless blocks; integrator outputs act as
    // sources, so loops through an integrator are legal feedback.
    const std::size_t n_blocks = graph.blocks.size();
    std::vector<std::vector<int>> successors(n_blocks);
    std::vector<std::vector<int>> predecessors(n_blocks);
    std::vector<int> in_degree(n_blocks, 0);
    for (std::size_t b = 0; b < n_blocks; ++b) {
        if (graph.blocks[b].kind == BlockKind::Integrator) {
            continue;  // never ordered; reads happen after the static sweep
        }
        for (int net : graph.blocks[b].input_nets) {
            int d = graph.net_driver[static_cast<std::size_t>(net)];
            if (graph.blocks[static_cast<std::size_t>(d)].kind == BlockKind::Integrator) {
                continue;
            }
            successors[static_cast<std::size_t>(d)].push_back(static_cast<int>(b));
            predecessors[b].push_back(d);
            ++in_degree[b];
        }
    }

    std::set<int> ready;
    for (std::size_t b = 0; b < n_blocks; ++b) {
        if (graph.blocks[b].kind != BlockKind::Integrator && in_degree[b] == 0) {
            ready.insert(static_cast<int>(b));
        }
    }
    std::vector<bool> placed(n_blocks, false);
    while (!ready.empty()) {
        int b = *ready.begin();
        ready.erase(ready.begin());
        graph.static_order.push_back(b);
        placed[static_cast<std::size_t>(b)] = true;
        for (int succ : successors[static_cast<std::size_t>(b)]) {
            if (--in_degree[static_cast<std::size_t>(succ)] == 0) {
                ready.insert(succ);
            }
        }
    }

    std::size_t n_static = 0;
    for (std::size_t b = 0; b < n_blocks; ++b) {
        if (graph.blocks[b].kind != BlockKind::Integrator) {
            ++n_static;
        }
    }
    if (graph.static_order.size() != n_static) {
        // Walk predecessors among the unplaced blocks until one repeats;
        // that slice is a concrete algebraic cycle.
        int start = -1;
        for (std::size_t b = 0; b < n_blocks; ++b) {
            if (graph.blocks[b].kind != BlockKind::Integrator && !placed[b]) {
                start = static_cast<int>(b);
                break;
            }
        }
        std::vector<int> path;
        std::unordered_map<int, std::size_t> on_path;
        int cur = start;
        while (!on_path.count(cur)) {
            on_path[cur] = path.size();
            path.push_back(cur);
            for (int pred : predecessors[static_cast<std::size_t>(cur)]) {
                if (!placed[static_cast<std::size_t>(pred)]) {
                    cur = pred;
                    break;
                }
            }
        }
        std::vector<int> cycle(path.begin() + static_cast<std::ptrdiff_t>(on_path[cur]),
                               path.end());
        std::reverse(cycle.begin(), cycle.end());  // forward dataflow order
        std::string names;
        for (int b : cycle) {
            if (!names.empty()) {
                names += " -> ";
            }
            names += graph.blocks[static_cast<std::size_t>(b)].name;
        }
        throw ValidateError("algebraic loop (no integrator in cycle): " + names,
                            graph.blocks[static_cast<std::size_t>(cycle.front())].line);
    }

    return graph;
}

namespace {

std::string format_value(const ParamValue& v) {
    if (v.is_ident()) {
        return v.ident;
    }
    std::string out;
    for (std::size_t i = 0; i < v.numbers.size(); ++i) {
        if (i > 0) {
            out += ",";
        }
        out += format_double(v.numbers[i]);
    }
    return out;
}

} // namespace

std::string format(const NetlistDoc& doc) {
    std::string out;
    for (const BlockDecl& block : doc.blocks) {
        out += "block ";
        out += block_kind_name(block.kind);
        out += " ";
        out += block.name;
        for (const auto& [key, value] : block.params) {  // std::map: alphabetical
            out += " " + key + "=" + format_value(value);
        }
        if (!block.inputs.empty()) {
            out += " in=";
            for (std::size_t i = 0; i < block.inputs.size(); ++i) {
                if (i > 0) {
                    out += ",";
                }
                out += block.inputs[i];
            }
        }
        out += " out=" + block.output + "\n";
    }
    for (const ProbeDecl& probe : doc.probes) {
        out += "probe " + probe.net + "\n";
    }
    out += "sim dt=" + format_double(doc.sim.dt);
    out += " limit=" + format_double(doc.sim.limit);
    out += " method=";
    out += method_name(doc.sim.method);
    out += " t=" + format_double(doc.sim.t_end);
    out += "\n";
    return out;
}

} // namespace patchsim
