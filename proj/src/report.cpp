#include <nnreach/report.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>
#include <json.hpp>

#include <nnreach/exceptions.hpp>

namespace nnreach
{

namespace
{

using nlohmann::json;

void write(const json &j, std::string &out, int indent)
{
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
    switch (j.type()) {
    case json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        bool first = true;
        for (const auto &[k, v] : j.items()) {
            if (!first) {
                out += ",\n";
            }
            first = false;
            out += inner + json(k).dump() + ": ";
            write(v, out, indent + 1);
        }
        out += "\n" + pad + "}";
        return;
    }
    case json::value_t::array: {
        // Arrays of scalars, and arrays of those, stay on one line.
        const auto scalars = [](const json &v) {
            return std::none_of(v.begin(), v.end(), [](const json &w) { return w.is_structured(); });
        };
        const bool flat = std::all_of(j.begin(), j.end(), [&](const json &v) {
            return !v.is_object() && (!v.is_array() || scalars(v));
        });
        if (j.empty()) {
            out += "[]";
            return;
        }
        if (flat) {
            out += "[";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i > 0) {
                    out += ", ";
                }
                write(j[i], out, indent + 1);
            }
            out += "]";
            return;
        }
        out += "[\n";
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (i > 0) {
                out += ",\n";
            }
            out += inner;
            write(j[i], out, indent + 1);
        }
        out += "\n" + pad + "]";
        return;
    }
    case json::value_t::number_float: {
        const double d = j.get<double>();
        out += std::isfinite(d) ? fmt::format("{:.17g}", d) : "null";
        return;
    }
    default:
        out += j.dump();
    }
}

std::string dump(const json &j)
{
    std::string out;
    write(j, out, 0);
    out += '\n';
    return out;
}

json box_json(const Box &b)
{
    json a = json::array();
    for (const auto &iv : b) {
        a.push_back(json::array({iv.lo(), iv.hi()}));
    }
    return a;
}

json cycles_json(const ReachResult &r)
{
    json cycles = json::array();
    for (const auto &c : r.cycles) {
        json segs = json::array();
        for (const auto &s : c.segments) {
            const Interval span = s.time_span();
            segs.push_back({{"t", json::array({span.lo(), span.hi()})}, {"hull", box_json(segment_hull(s))}});
        }
        cycles.push_back({{"k", c.k}, {"input_hull", box_json(c.input_hull())}, {"segments", std::move(segs)}});
    }
    return cycles;
}

json run_json(const ReachResult &r)
{
    return {{"cycles", cycles_json(r)},
            {"final_hull", box_json(tm_hull(r.final_tm))},
            {"verdict", to_string(r.verdict)},
            {"diagnostics", r.diagnostics}};
}

void add_common(json &doc, const NNCSModel &model, const ReportExtras &extras)
{
    doc["variables"] = model.dynamics.names();
    doc["goal_mode"] = to_string(model.goal_mode);
    doc["wall_time"] = extras.wall_time ? json(*extras.wall_time) : json(nullptr);
    if (extras.simulations) {
        doc["simulations"] = {{"count", extras.simulations->count},
                              {"samples", extras.simulations->samples},
                              {"violations", extras.simulations->violations}};
    }
}

} // namespace

std::string reach_report_json(const NNCSModel &model, const ReachResult &r, const ReportExtras &extras)
{
    json doc = run_json(r);
    add_common(doc, model, extras);
    return dump(doc);
}

std::string split_report_json(const NNCSModel &model, const SplitResult &s, const ReportExtras &extras)
{
    json runs = json::array();
    for (std::size_t i = 0; i < s.runs.size(); ++i) {
        json run = run_json(s.runs[i]);
        run["piece"] = box_json(s.pieces[i]);
        runs.push_back(std::move(run));
    }
    json doc = {{"runs", std::move(runs)}, {"verdict", to_string(s.verdict)}, {"diagnostics", s.diagnostics}};
    add_common(doc, model, extras);
    return dump(doc);
}

PlotData projection(const NNCSModel &model, const std::vector<const ReachResult *> &runs, std::size_t ix,
                    std::size_t iy)
{
    const auto &names = model.dynamics.names();
    if (ix >= names.size() || iy >= names.size()) {
        throw dimension_error(fmt::format("plot dimensions {}, {} out of range for {} variables", ix, iy, names.size()));
    }
    PlotData p;
    p.xlabel = names[ix];
    p.ylabel = names[iy];
    for (const auto *r : runs) {
        for (const auto &c : r->cycles) {
            for (const auto &s : c.segments) {
                const Box h = segment_hull(s);
                p.reach.push_back({h[ix].lo(), h[ix].hi(), h[iy].lo(), h[iy].hi()});
            }
        }
    }
    const std::size_t nx = model.init.size();
    if (ix < nx && iy < nx) {
        p.init = PlotData::Rect{model.init[ix].lo(), model.init[ix].hi(), model.init[iy].lo(), model.init[iy].hi()};
    }
    if (model.goal_mode != GoalMode::none && ix < model.n_states && iy < model.n_states) {
        const auto &gx = model.goal[ix];
        const auto &gy = model.goal[iy];
        p.goal = PlotData::Rect{gx.first, gx.second, gy.first, gy.second};
    }
    return p;
}

namespace
{

struct Axis {
    double lo = 0;
    double hi = 1;

    void fit(double a, double b)
    {
        if (std::isfinite(a)) {
            lo = std::min(lo, a);
        }
        if (std::isfinite(b)) {
            hi = std::max(hi, b);
        }
    }
};

// 1, 2 or 5 times a power of ten, giving about five intervals.
double tick_step(double span)
{
    const double raw = span / 5;
    const double p = std::pow(10., std::floor(std::log10(raw)));
    for (double m : {1., 2., 5.}) {
        if (m * p >= raw) {
            return m * p;
        }
    }
    return 10 * p;
}

std::string escape(const std::string &s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<':
            out += "&lt;";
            break;
        case '>':
            out += "&gt;";
            break;
        case '&':
            out += "&amp;";
            break;
        case '"':
            out += "&quot;";
            break;
        default:
            out += c;
        }
    }
    return out;
}

} // namespace

std::string render_svg(const PlotData &plot)
{
    constexpr double width = 640;
    constexpr double height = 480;
    constexpr double margin = 60;

    const double inf = std::numeric_limits<double>::infinity();
    Axis ax{inf, -inf};
    Axis ay{inf, -inf};
    for (const auto &r : plot.reach) {
        ax.fit(r.x0, r.x1);
        ay.fit(r.y0, r.y1);
    }
    if (plot.init) {
        ax.fit(plot.init->x0, plot.init->x1);
        ay.fit(plot.init->y0, plot.init->y1);
    }
    for (const auto &t : plot.traces) {
        for (const auto &[x, y] : t) {
            ax.fit(x, x);
            ay.fit(y, y);
        }
    }
    if (plot.goal) {
        ax.fit(plot.goal->x0, plot.goal->x1);
        ay.fit(plot.goal->y0, plot.goal->y1);
    }
    for (Axis *a : {&ax, &ay}) {
        if (!(a->lo <= a->hi)) {
            a->lo = 0;
            a->hi = 1;
        }
        const double pad = a->hi > a->lo ? 0.05 * (a->hi - a->lo) : 0.5;
        a->lo -= pad;
        a->hi += pad;
    }
    const auto sx = [&](double x) {
        return margin + (std::clamp(x, ax.lo, ax.hi) - ax.lo) / (ax.hi - ax.lo) * (width - 2 * margin);
    };
    const auto sy = [&](double y) {
        return height - margin - (std::clamp(y, ay.lo, ay.hi) - ay.lo) / (ay.hi - ay.lo) * (height - 2 * margin);
    };
    const auto rect = [&](const PlotData::Rect &r, const char *style) {
        return fmt::format("<rect x=\"{:.3f}\" y=\"{:.3f}\" width=\"{:.3f}\" height=\"{:.3f}\" {}/>\n", sx(r.x0),
                           sy(r.y1), std::max(sx(r.x1) - sx(r.x0), 0.5), std::max(sy(r.y0) - sy(r.y1), 0.5), style);
    };

    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += fmt::format("<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" "
                       "viewBox=\"0 0 {} {}\">\n",
                       width, height, width, height);
    out += "<rect x=\"0\" y=\"0\" width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    out += "<g id=\"axes\" stroke=\"black\" stroke-width=\"1\" font-family=\"sans-serif\" font-size=\"11\">\n";
    out += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\"/>\n", margin, height - margin,
                       width - margin);
    out += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\"/>\n", margin, height - margin, margin);
    for (int axis = 0; axis < 2; ++axis) {
        const Axis &a = axis == 0 ? ax : ay;
        const double step = tick_step(a.hi - a.lo);
        for (double v = std::ceil(a.lo / step) * step; v <= a.hi; v += step) {
            const double shown = std::abs(v) < step * 1e-9 ? 0. : v;
            if (axis == 0) {
                out += fmt::format("<line x1=\"{0:.3f}\" y1=\"{1}\" x2=\"{0:.3f}\" y2=\"{2}\"/>"
                                   "<text x=\"{0:.3f}\" y=\"{3}\" text-anchor=\"middle\" stroke=\"none\">{4:g}</text>\n",
                                   sx(v), height - margin, height - margin + 5, height - margin + 18, shown);
            } else {
                out += fmt::format("<line x1=\"{0}\" y1=\"{1:.3f}\" x2=\"{2}\" y2=\"{1:.3f}\"/>"
                                   "<text x=\"{3}\" y=\"{1:.3f}\" text-anchor=\"end\" stroke=\"none\">{4:g}</text>\n",
                                   margin - 5, sy(v), margin, margin - 8, shown);
            }
        }
    }
    out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" stroke=\"none\">{}</text>\n", width / 2,
                       height - 15, escape(plot.xlabel));
    out += fmt::format("<text x=\"15\" y=\"{0}\" text-anchor=\"middle\" stroke=\"none\" "
                       "transform=\"rotate(-90 15 {0})\">{1}</text>\n",
                       height / 2, escape(plot.ylabel));
    out += "</g>\n";

    if (plot.goal) {
        out += "<g id=\"goal\">\n";
        out += rect(*plot.goal, "fill=\"#7fbf7f\" fill-opacity=\"0.3\" stroke=\"#2f7f2f\"");
        out += "</g>\n";
    }
    out += "<g id=\"reach\">\n";
    for (const auto &r : plot.reach) {
        out += rect(r, "fill=\"#4f7fbf\" fill-opacity=\"0.35\" stroke=\"#2f4f8f\" stroke-width=\"0.3\"");
    }
    out += "</g>\n";
    if (plot.init) {
        out += "<g id=\"init\">\n";
        out += rect(*plot.init, "fill=\"none\" stroke=\"#bf3f3f\" stroke-width=\"1\"");
        out += "</g>\n";
    }
    out += "<g id=\"simulations\" fill=\"none\" stroke=\"black\" stroke-width=\"0.8\">\n";
    for (const auto &t : plot.traces) {
        if (t.empty()) {
            continue;
        }
        out += "<polyline points=\"";
        for (std::size_t i = 0; i < t.size(); ++i) {
            out += fmt::format("{}{:.3f},{:.3f}", i == 0 ? "" : " ", sx(t[i].first), sy(t[i].second));
        }
        out += "\"/>\n";
    }
    out += "</g>\n";
    out += "</svg>\n";
    return out;
}

} // namespace nnreach
