#ifndef NNREACH_REPORT_HPP
#define NNREACH_REPORT_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <nnreach/engine.hpp>

namespace nnreach
{

struct SimulationSummary {
    std::size_t count = 0;
    std::size_t samples = 0;
    std::size_t violations = 0; // samples outside the reach set
};

struct ReportExtras {
    // Seconds; written as null when empty.
    std::optional<double> wall_time;
    std::optional<SimulationSummary> simulations;
};

// {"cycles": [{"k", "input_hull", "segments": [{"t", "hull"}]}],
//  "final_hull", "variables", "verdict", "diagnostics", "wall_time"}
// Keys are sorted and numbers printed with 17 significant digits, so equal
// results give identical text.
std::string reach_report_json(const NNCSModel &model, const ReachResult &r, const ReportExtras &extras);
// Same, with one entry per piece under "runs" (each with its "piece" box).
std::string split_report_json(const NNCSModel &model, const SplitResult &s, const ReportExtras &extras);

struct PlotData {
    std::string xlabel;
    std::string ylabel;
    struct Rect {
        double x0, x1, y0, y1;
    };
    std::vector<Rect> reach;     // segment hulls
    std::optional<Rect> init;    // initial set
    std::optional<Rect> goal;    // goal box, clipped to the view
    std::vector<std::vector<std::pair<double, double>>> traces;
};

// Segment hulls of every result, projected onto lifted dimensions ix, iy.
PlotData projection(const NNCSModel &model, const std::vector<const ReachResult *> &runs, std::size_t ix,
                    std::size_t iy);

// Standalone SVG 1.1 document.
std::string render_svg(const PlotData &plot);

} // namespace nnreach

#endif
