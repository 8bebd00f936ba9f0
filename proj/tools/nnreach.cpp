// nnreach: reachability analysis of neural-network control systems.
//
// Exit status: 0 verified, 1 not verified, 2 error.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include <nnreach/engine.hpp>
#include <nnreach/exceptions.hpp>
#include <nnreach/model_io.hpp>
#include <nnreach/report.hpp>

using namespace nnreach;

namespace
{

constexpr int exit_error = 2;

struct PlotRequest {
    std::size_t ix = 0;
    std::size_t iy = 0;
    std::string path;
};

std::vector<std::size_t> parse_counts(const std::string &s)
{
    std::vector<std::size_t> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        const auto comma = std::min(s.find(',', pos), s.size());
        const std::string tok = s.substr(pos, comma - pos);
        std::size_t used = 0;
        unsigned long v = 0;
        try {
            v = std::stoul(tok, &used);
        } catch (const std::exception &) {
            used = 0;
        }
        if (used == 0 || used != tok.size() || v == 0) {
            throw model_error(fmt::format("--split: '{}' is not a positive integer", tok));
        }
        out.push_back(v);
        pos = comma + 1;
    }
    return out;
}

PlotRequest parse_plot(const std::string &spec, const std::vector<std::string> &names)
{
    const auto colon = spec.find(':');
    const auto comma = spec.find(',');
    if (colon == std::string::npos || comma == std::string::npos || comma > colon || colon + 1 == spec.size()) {
        throw model_error(fmt::format("--plot: expected 'var1,var2:PATH.svg', got '{}'", spec));
    }
    const auto index = [&](const std::string &n) {
        const auto it = std::find(names.begin(), names.end(), n);
        if (it == names.end()) {
            throw model_error(fmt::format("--plot: unknown variable '{}'", n));
        }
        return static_cast<std::size_t>(it - names.begin());
    };
    return {index(spec.substr(0, comma)), index(spec.substr(comma + 1, colon - comma - 1)), spec.substr(colon + 1)};
}

void write_file(const std::string &path, const std::string &text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) {
        throw error(fmt::format("cannot write '{}'", path));
    }
}

std::vector<std::vector<double>> random_starts(const Box &init, std::size_t n)
{
    std::mt19937_64 gen(20210713);
    std::vector<std::vector<double>> out;
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<double> x;
        for (const auto &iv : init) {
            x.push_back(iv.is_point() ? iv.lo() : std::uniform_real_distribution<double>(iv.lo(), iv.hi())(gen));
        }
        out.push_back(std::move(x));
    }
    return out;
}

// Counts samples outside whichever run's initial piece holds x0.
std::size_t violations(const ClosedLoopTrace &tr, const std::vector<double> &x0, const std::vector<Box> &pieces,
                       const std::vector<const ReachResult *> &runs)
{
    std::size_t which = runs.size();
    for (std::size_t i = 0; i < pieces.size() && which == runs.size(); ++i) {
        bool in = true;
        for (std::size_t d = 0; d < x0.size(); ++d) {
            in = in && pieces[i][d].contains(x0[d]);
        }
        if (in) {
            which = i;
        }
    }
    if (which == runs.size()) {
        return tr.times.size();
    }
    const ReachResult &r = *runs[which];
    if (r.verdict == Verdict::error) {
        return 0;
    }
    std::size_t bad = 0;
    for (std::size_t j = 0; j < tr.times.size(); ++j) {
        const Box h = reach_hull_at(r, tr.times[j]);
        for (std::size_t i = 0; i < h.size(); ++i) {
            if (!h[i].contains(tr.states[j][i])) {
                ++bad;
                break;
            }
        }
    }
    return bad;
}

int run(int argc, char **argv)
{
    CLI::App app{"Reachability analysis for neural-network control systems"};
    std::string model_path;
    std::string network_path;
    unsigned order = 10;
    double abstol = 1e-15;
    std::string split;
    std::string out_path;
    std::string plot_spec;
    std::size_t simulate = 0;
    bool no_timing = false;
    app.add_option("--model", model_path, "Model file")->required();
    app.add_option("--network", network_path, "Controller network (JSON)")->required();
    auto *order_opt = app.add_option("--order", order, "Taylor model order")->check(CLI::Range(1u, max_order));
    auto *tol_opt = app.add_option("--abstol", abstol, "Step truncation tolerance")->check(CLI::PositiveNumber);
    app.add_option("--split", split, "Split counts per initial dimension, e.g. 3,1,8,1");
    app.add_option("--out", out_path, "JSON report path");
    app.add_option("--plot", plot_spec, "Projection plot, var1,var2:PATH.svg");
    app.add_option("--simulate", simulate, "Random closed-loop simulations to check and plot");
    app.add_flag("--no-timing", no_timing, "Write wall_time as null");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return exit_error;
    }

    auto loaded = load_model(model_path, network_path);
    const NNCSModel &model = loaded.model;
    ReachParams params;
    params.flow.order = order_opt->count() > 0 ? order : loaded.solver.order;
    params.flow.abstol = tol_opt->count() > 0 ? abstol : loaded.solver.abstol;
    const auto counts = split.empty() ? loaded.solver.split : parse_counts(split);
    std::optional<PlotRequest> plot;
    if (!plot_spec.empty()) {
        plot = parse_plot(plot_spec, model.dynamics.names());
    }

    const auto t0 = std::chrono::steady_clock::now();
    std::vector<Box> pieces{model.init};
    std::vector<const ReachResult *> runs;
    ReachResult single;
    SplitResult many;
    Verdict verdict = Verdict::error;
    std::string diagnostics;
    if (counts.empty()) {
        single = reach(model, params);
        runs.push_back(&single);
        verdict = single.verdict;
        diagnostics = single.diagnostics;
    } else {
        many = reach_split(model, counts, params);
        pieces = many.pieces;
        for (const auto &r : many.runs) {
            runs.push_back(&r);
        }
        verdict = many.verdict;
        diagnostics = many.diagnostics;
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    ReportExtras extras;
    if (!no_timing) {
        extras.wall_time = elapsed;
    }
    std::vector<ClosedLoopTrace> traces;
    if (simulate > 0) {
        SimulationSummary sum;
        for (const auto &x0 : random_starts(model.init, simulate)) {
            traces.push_back(simulate_closed_loop(model, x0));
            sum.count += 1;
            sum.samples += traces.back().times.size();
            sum.violations += violations(traces.back(), x0, pieces, runs);
        }
        extras.simulations = sum;
        if (sum.violations > 0) {
            std::cerr << fmt::format("warning: {} simulated samples lie outside the reach set\n", sum.violations);
        }
    }

    const std::string report =
        counts.empty() ? reach_report_json(model, single, extras) : split_report_json(model, many, extras);
    if (!out_path.empty()) {
        write_file(out_path, report);
    }
    if (plot) {
        auto data = projection(model, runs, plot->ix, plot->iy);
        for (const auto &tr : traces) {
            std::vector<std::pair<double, double>> line;
            for (const auto &s : tr.states) {
                line.emplace_back(s[plot->ix], s[plot->iy]);
            }
            data.traces.push_back(std::move(line));
        }
        write_file(plot->path, render_svg(data));
    }

    std::cout << fmt::format("verdict: {}\n", to_string(verdict));
    if (!diagnostics.empty()) {
        std::cerr << diagnostics << '\n';
    }
    switch (verdict) {
    case Verdict::verified:
        return 0;
    case Verdict::not_verified:
        return 1;
    default:
        return exit_error;
    }
}

} // namespace

int main(int argc, char **argv)
{
    try {
        return run(argc, argv);
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_error;
    }
}
