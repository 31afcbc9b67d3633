#include "demos.hpp"

#include "patchsim/engine.hpp"
#include "patchsim/errors.hpp"
#include "patchsim/plot.hpp"
#include "patchsim/repclass.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace patchsim;

// Exit code contract: 0 ok, 1 parse/validate/usage, 2 diverged run,
// 3 scheme classified not analog.
constexpr int kExitOk = 0;
constexpr int kExitBadInput = 1;
constexpr int kExitDiverged = 2;
constexpr int kExitNotAnalog = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ContractError("cannot open '" + path + "'");
    }
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

int cmd_run(const std::string& netlist_path, const std::string& csv_path,
            const std::string& svg_path) {
    const NetlistDoc doc = parse(read_file(netlist_path));
    const SimResult result = run(doc);

    for (const NetOverload& o : result.overloads) {
        std::cerr << "overload: net '" << o.net << "' at t = " << format_double(o.time)
                  << ", value " << format_double(o.value) << "\n";
    }

    if (result.traces.empty()) {
        std::cerr << "note: no probes declared, nothing to write\n";
        return kExitOk;
    }
    if (csv_path.empty()) {
        write_csv(std::cout, result.traces);
    } else {
        write_csv_file(csv_path, result.traces);
    }
    if (!svg_path.empty()) {
        PlotSpec spec;
        spec.title = std::filesystem::path(netlist_path).stem().string();
        for (const Trace& t : result.traces) {
            spec.series.push_back({t.name(), ""});
        }
        plot_svg(result, spec, svg_path);
    }
    return kExitOk;
}

int cmd_demo(const std::string& name, const std::string& out_dir) {
    std::cout << demos::run_demo(name, out_dir);
    return kExitOk;
}

int cmd_classify(const std::string& csv_path, double resolution) {
    std::ifstream in(csv_path, std::ios::binary);
    if (!in) {
        throw ContractError("cannot open '" + csv_path + "'");
    }
    const RepScheme scheme = read_scheme_csv(in, resolution);
    const Verdict verdict = classify(scheme);

    std::cout << "verdict: " << verdict_tag_name(verdict.tag) << "\n";
    if (verdict.degenerate) {
        std::cout << "note: no two magnitudes differ by the resolution; "
                     "vacuously monotone\n";
    }
    if (verdict.tag == VerdictTag::NotAnalog) {
        std::cout << "witnesses (0-based pair indices):\n";
        for (const auto& [i, j] : verdict.witnesses) {
            const auto& a = scheme.pairs[i];
            const auto& b = scheme.pairs[j];
            std::cout << "  (" << i << ", " << j << "): Q " << format_double(a.first) << " -> P "
                      << format_double(a.second) << "  vs  Q " << format_double(b.first)
                      << " -> P " << format_double(b.second) << "\n";
        }
        return kExitNotAnalog;
    }
    std::cout << "(finite sample: consistent with an analog representation)\n";
    return kExitOk;
}

int cmd_fmt(const std::string& netlist_path) {
    std::cout << format(parse(read_file(netlist_path)));
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"patchsim: patchable analog computer simulator"};
    app.require_subcommand(1);

    std::string netlist_path, csv_path, svg_path;
    auto* run_cmd = app.add_subcommand("run", "simulate a netlist and write its probes as CSV");
    run_cmd->add_option("netlist", netlist_path, "netlist file")->required();
    run_cmd->add_option("-o,--output", csv_path, "CSV output path (default: stdout)");
    run_cmd->add_option("--svg", svg_path, "also write an SVG plot of the probes");

    std::string demo_name, demo_dir = ".";
    auto* demo_cmd = app.add_subcommand("demo", "run a named demonstration");
    demo_cmd->add_option("name", demo_name, "one of: springmass, gibbs, drift, sine-integral, adc-roundtrip")
        ->required();
    demo_cmd->add_option("-d,--dir", demo_dir, "output directory (default: .)");

    std::string scheme_path;
    double resolution = 0.0;
    auto* classify_cmd =
        app.add_subcommand("classify", "test a Q,P scheme file for analog representation");
    classify_cmd->add_option("scheme", scheme_path, "CSV file with header Q,P")->required();
    classify_cmd->add_option("--resolution", resolution, "smallest magnitude difference that represents distinct quantities")
        ->required()
        ->check(CLI::NonNegativeNumber);

    std::string fmt_path;
    auto* fmt_cmd = app.add_subcommand("fmt", "print a netlist in canonical form");
    fmt_cmd->add_option("netlist", fmt_path, "netlist file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitBadInput;
    }

    try {
        if (run_cmd->parsed()) {
            return cmd_run(netlist_path, csv_path, svg_path);
        }
        if (demo_cmd->parsed()) {
            return cmd_demo(demo_name, demo_dir);
        }
        if (classify_cmd->parsed()) {
            return cmd_classify(scheme_path, resolution);
        }
        if (fmt_cmd->parsed()) {
            return cmd_fmt(fmt_path);
        }
    } catch (const DivergedError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDiverged;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    }
    return kExitBadInput;
}
