#pragma once

#include "patchsim/engine.hpp"

#include <string>
#include <vector>

namespace patchsim {

/// One plotted trace: which probed net, and its stroke color (empty picks
/// from the default palette by position).
struct SeriesSpec {
    std::string net;
    std::string stroke;
};

/// Layout of a line chart. At least one series.
struct PlotSpec {
    int width = 800;
    int height = 480;
    std::vector<SeriesSpec> series;
    std::string title;
    std::string x_label = "t";
    std::string y_label;
};

/// Standalone SVG line chart of the named traces, axes scaled linearly to
/// the data extents, polylines decimated to at most 2000 points each.
/// Byte output is deterministic for fixed inputs. Unknown nets throw
/// ContractError.
std::string render_svg(const SimResult& result, const PlotSpec& spec);

void plot_svg(const SimResult& result, const PlotSpec& spec, const std::string& path);

} // namespace patchsim
