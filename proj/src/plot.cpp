#include "patchsim/plot.hpp"

#include "patchsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace patchsim {

namespace {

constexpr int kMaxPolylinePoints = 2000;
constexpr double kMarginLeft = 56.0;
constexpr double kMarginRight = 16.0;
constexpr double kMarginTop = 24.0;
constexpr double kMarginBottom = 40.0;

const char* palette(std::size_t i) {
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c",
                                   "#9467bd", "#ff7f0e", "#8c564b"};
    return colors[i % (sizeof(colors) / sizeof(colors[0]))];
}

std::string fixed2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

std::string escape_xml(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

} // namespace

std::string render_svg(const SimResult& result, const PlotSpec& spec) {
    if (spec.series.empty()) {
        throw ContractError("plot needs at least one series");
    }
    if (spec.width < 100 || spec.height < 80) {
        throw ContractError("plot area too small");
    }

    std::vector<const Trace*> traces;
    traces.reserve(spec.series.size());
    for (const SeriesSpec& s : spec.series) {
        traces.push_back(&result.trace(s.net));
    }

    const TimeGrid& grid = traces.front()->grid();
    double x_lo = grid.t_start;
    double x_hi = grid.t_end();
    if (x_hi <= x_lo) {
        x_hi = x_lo + 1.0;
    }
    double y_lo = traces.front()->values().front();
    double y_hi = y_lo;
    for (const Trace* t : traces) {
        for (double v : t->values()) {
            y_lo = std::min(y_lo, v);
            y_hi = std::max(y_hi, v);
        }
    }
    if (y_hi - y_lo < 1e-12) {
        y_lo -= 1.0;
        y_hi += 1.0;
    } else {
        const double pad = 0.05 * (y_hi - y_lo);
        y_lo -= pad;
        y_hi += pad;
    }

    const double w = static_cast<double>(spec.width);
    const double h = static_cast<double>(spec.height);
    const double plot_w = w - kMarginLeft - kMarginRight;
    const double plot_h = h - kMarginTop - kMarginBottom;
    auto px = [&](double t) { return kMarginLeft + (t - x_lo) / (x_hi - x_lo) * plot_w; };
    auto py = [&](double v) { return kMarginTop + (y_hi - v) / (y_hi - y_lo) * plot_h; };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(spec.width) +
           "\" height=\"" + std::to_string(spec.height) + "\" viewBox=\"0 0 " +
           std::to_string(spec.width) + " " + std::to_string(spec.height) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    // Frame and ticks.
    svg += "<g stroke=\"#444444\" stroke-width=\"1\" fill=\"none\">\n";
    svg += "<rect x=\"" + fixed2(kMarginLeft) + "\" y=\"" + fixed2(kMarginTop) + "\" width=\"" +
           fixed2(plot_w) + "\" height=\"" + fixed2(plot_h) + "\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double fx = px(x_lo + (x_hi - x_lo) * i / 4.0);
        const double fy = py(y_lo + (y_hi - y_lo) * i / 4.0);
        svg += "<line x1=\"" + fixed2(fx) + "\" y1=\"" + fixed2(h - kMarginBottom) + "\" x2=\"" +
               fixed2(fx) + "\" y2=\"" + fixed2(h - kMarginBottom + 5.0) + "\"/>\n";
        svg += "<line x1=\"" + fixed2(kMarginLeft - 5.0) + "\" y1=\"" + fixed2(fy) + "\" x2=\"" +
               fixed2(kMarginLeft) + "\" y2=\"" + fixed2(fy) + "\"/>\n";
    }
    svg += "</g>\n";

    svg += "<g font-family=\"monospace\" font-size=\"11\" fill=\"#222222\">\n";
    for (int i = 0; i <= 4; ++i) {
        const double xv = x_lo + (x_hi - x_lo) * i / 4.0;
        const double yv = y_lo + (y_hi - y_lo) * i / 4.0;
        svg += "<text x=\"" + fixed2(px(xv)) + "\" y=\"" + fixed2(h - kMarginBottom + 18.0) +
               "\" text-anchor=\"middle\">" + tick_label(xv) + "</text>\n";
        svg += "<text x=\"" + fixed2(kMarginLeft - 8.0) + "\" y=\"" + fixed2(py(yv) + 4.0) +
               "\" text-anchor=\"end\">" + tick_label(yv) + "</text>\n";
    }
    if (!spec.title.empty()) {
        svg += "<text x=\"" + fixed2(w / 2.0) + "\" y=\"16\" text-anchor=\"middle\">" +
               escape_xml(spec.title) + "</text>\n";
    }
    svg += "<text x=\"" + fixed2(kMarginLeft + plot_w / 2.0) + "\" y=\"" + fixed2(h - 6.0) +
           "\" text-anchor=\"middle\">" + escape_xml(spec.x_label) + "</text>\n";
    if (!spec.y_label.empty()) {
        svg += "<text x=\"14\" y=\"" + fixed2(kMarginTop + plot_h / 2.0) +
               "\" text-anchor=\"middle\" transform=\"rotate(-90 14 " +
               fixed2(kMarginTop + plot_h / 2.0) + ")\">" + escape_xml(spec.y_label) +
               "</text>\n";
    }
    svg += "</g>\n";

    for (std::size_t s = 0; s < traces.size(); ++s) {
        const Trace& trace = *traces[s];
        const std::size_t n = trace.size();
        const std::size_t stride = (n + kMaxPolylinePoints - 1) / kMaxPolylinePoints;
        std::string stroke = spec.series[s].stroke.empty() ? palette(s) : spec.series[s].stroke;
        svg += "<polyline fill=\"none\" stroke=\"" + stroke +
               "\" stroke-width=\"1.5\" points=\"";
        bool first = true;
        auto emit = [&](std::size_t k) {
            if (!first) {
                svg += " ";
            }
            first = false;
            svg += fixed2(px(trace.grid().time_at(k))) + "," + fixed2(py(trace[k]));
        };
        for (std::size_t k = 0; k < n; k += std::max<std::size_t>(stride, 1)) {
            emit(k);
        }
        if (stride > 1 && (n - 1) % stride != 0) {
            emit(n - 1);
        }
        svg += "\"/>\n";
    }

    svg += "</svg>\n";
    return svg;
}

void plot_svg(const SimResult& result, const PlotSpec& spec, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ContractError("cannot open '" + path + "' for writing");
    }
    out << render_svg(result, spec);
}

} // namespace patchsim
