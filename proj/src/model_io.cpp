#include <nnreach/model_io.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include <nnreach/exceptions.hpp>
#include <nnreach/expr.hpp>

namespace nnreach
{

namespace
{

struct Entry {
    std::size_t line = 0;
    std::size_t column = 0; // of the value
    std::string key;
    std::string value;
};

struct Section {
    std::size_t line = 0;
    std::vector<Entry> entries;
};

const char *const section_names[] = {"vars", "inputs", "disturbances", "dynamics",
                                     "control", "init", "goal", "solver"};

std::string_view trim(std::string_view s)
{
    const auto ws = " \t\r";
    const auto a = s.find_first_not_of(ws);
    if (a == std::string_view::npos) {
        return {};
    }
    const auto b = s.find_last_not_of(ws);
    return s.substr(a, b - a + 1);
}

[[noreturn]] void syntax(std::size_t line, const std::string &msg, std::size_t column = 0)
{
    throw parse_error(column > 0 ? fmt::format("line {}, column {}: {}", line, column, msg)
                                 : fmt::format("line {}: {}", line, msg),
                      line, column);
}

[[noreturn]] void semantic(const Entry &e, const std::string &field, const std::string &msg)
{
    throw model_error(fmt::format("line {}: {}: {}", e.line, field, msg));
}

bool is_identifier(std::string_view s)
{
    if (s.empty() || (std::isalpha(static_cast<unsigned char>(s[0])) == 0 && s[0] != '_')) {
        return false;
    }
    return std::all_of(s.begin(), s.end(),
                       [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_'; });
}

std::map<std::string, Section> split_sections(std::string_view text)
{
    std::map<std::string, Section> out;
    Section *cur = nullptr;
    std::size_t lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        std::string_view raw = text.substr(pos, end - pos);
        pos = end + 1;
        ++lineno;
        if (const auto hash = raw.find('#'); hash != std::string_view::npos) {
            raw = raw.substr(0, hash);
        }
        const std::string_view line = trim(raw);
        if (line.empty()) {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                syntax(lineno, "unterminated section header");
            }
            const std::string name(trim(line.substr(1, line.size() - 2)));
            if (std::find(std::begin(section_names), std::end(section_names), name) == std::end(section_names)) {
                syntax(lineno, fmt::format("unknown section [{}]", name));
            }
            if (out.count(name) != 0) {
                syntax(lineno, fmt::format("duplicate section [{}]", name));
            }
            cur = &out[name];
            cur->line = lineno;
            continue;
        }
        if (cur == nullptr) {
            syntax(lineno, "content before the first section header");
        }
        Entry e;
        e.line = lineno;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            e.value = std::string(line);
            e.column = static_cast<std::size_t>(line.data() - raw.data()) + 1;
        } else {
            e.key = std::string(trim(line.substr(0, eq)));
            const auto rest = line.substr(eq + 1);
            const auto v = trim(rest);
            e.value = std::string(v);
            e.column = static_cast<std::size_t>((v.empty() ? rest.data() : v.data()) - raw.data()) + 1;
        }
        cur->entries.push_back(std::move(e));
    }
    return out;
}

double parse_number(const Entry &e, const std::string &field, std::string_view s, bool allow_inf)
{
    s = trim(s);
    if (allow_inf) {
        if (s == "inf" || s == "+inf") {
            return std::numeric_limits<double>::infinity();
        }
        if (s == "-inf") {
            return -std::numeric_limits<double>::infinity();
        }
    }
    if (!s.empty() && s.front() == '+') {
        s.remove_prefix(1);
    }
    double v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
        semantic(e, field, fmt::format("'{}' is not a finite number", s));
    }
    return v;
}

std::pair<double, double> parse_interval(const Entry &e, const std::string &field, bool allow_inf)
{
    const std::string_view s = trim(e.value);
    if (s.empty() || s.front() != '[') {
        const double v = parse_number(e, field, s, false);
        return {v, v};
    }
    if (s.back() != ']') {
        semantic(e, field, "expected '[lo, hi]'");
    }
    const auto body = s.substr(1, s.size() - 2);
    const auto comma = body.find(',');
    if (comma == std::string_view::npos || body.find(',', comma + 1) != std::string_view::npos) {
        semantic(e, field, "expected '[lo, hi]'");
    }
    const double lo = parse_number(e, field, body.substr(0, comma), allow_inf);
    const double hi = parse_number(e, field, body.substr(comma + 1), allow_inf);
    if (lo > hi) {
        semantic(e, field, fmt::format("lower bound {} exceeds upper bound {}", lo, hi));
    }
    return {lo, hi};
}

std::vector<std::string> parse_names(const Section &s, const char *section)
{
    std::vector<std::string> out;
    for (const auto &e : s.entries) {
        if (!e.key.empty()) {
            semantic(e, section, "expected a list of names");
        }
        std::string text = e.value;
        std::replace(text.begin(), text.end(), ',', ' ');
        std::istringstream in(text);
        std::string token;
        while (in >> token) {
            if (!is_identifier(token)) {
                semantic(e, section, fmt::format("'{}' is not a valid name", token));
            }
            out.push_back(token);
        }
    }
    return out;
}

std::size_t parse_count(const Entry &e, const std::string &field, std::size_t lo, std::size_t hi)
{
    const std::string_view s = trim(e.value);
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || v < lo || v > hi) {
        semantic(e, field, fmt::format("expected an integer in [{}, {}], got '{}'", lo, hi, s));
    }
    return v;
}

nlohmann::json parse_json(const Entry &e, const std::string &field)
{
    try {
        return nlohmann::json::parse(e.value);
    } catch (const nlohmann::json::exception &) {
        semantic(e, field, "malformed array");
    }
}

Eigen::VectorXd parse_vector(const Entry &e, const std::string &field, std::size_t n)
{
    const auto j = parse_json(e, field);
    if (!j.is_array() || j.size() != n) {
        semantic(e, field, fmt::format("expected an array of {} numbers", n));
    }
    Eigen::VectorXd v(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        if (!j[i].is_number()) {
            semantic(e, field, "expected numbers");
        }
        v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    }
    return v;
}

Eigen::MatrixXd parse_matrix(const Entry &e, const std::string &field, std::size_t rows, std::size_t cols)
{
    if (trim(e.value) == "identity") {
        if (rows != cols) {
            semantic(e, field, fmt::format("identity needs matching dimensions, have {} -> {}", cols, rows));
        }
        return Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    }
    const auto j = parse_json(e, field);
    if (!j.is_array() || j.size() != rows) {
        semantic(e, field, fmt::format("expected {} rows", rows));
    }
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows; ++r) {
        if (!j[r].is_array() || j[r].size() != cols) {
            semantic(e, field, fmt::format("row {} must have {} entries", r, cols));
        }
        for (std::size_t c = 0; c < cols; ++c) {
            if (!j[r][c].is_number()) {
                semantic(e, field, "expected numbers");
            }
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
        }
    }
    return m;
}

// Keyed entries of a section; rejects unknown and repeated keys.
std::map<std::string, const Entry *> keyed(const Section &s, const char *section,
                                           const std::vector<std::string> &allowed)
{
    std::map<std::string, const Entry *> out;
    for (const auto &e : s.entries) {
        if (e.key.empty()) {
            semantic(e, section, fmt::format("expected 'key = value', got '{}'", e.value));
        }
        if (std::find(allowed.begin(), allowed.end(), e.key) == allowed.end()) {
            semantic(e, fmt::format("{}.{}", section, e.key), "unknown key");
        }
        if (!out.emplace(e.key, &e).second) {
            semantic(e, fmt::format("{}.{}", section, e.key), "given twice");
        }
    }
    return out;
}

[[noreturn]] void missing(std::size_t line, const std::string &field)
{
    throw model_error(line > 0 ? fmt::format("line {}: {}: missing", line, field) : fmt::format("{}: missing", field));
}

} // namespace

LoadedModel parse_model(std::string_view text, const NeuralNetwork &net)
{
    const auto sections = split_sections(text);
    const auto section = [&](const char *name) -> const Section * {
        const auto it = sections.find(name);
        return it == sections.end() ? nullptr : &it->second;
    };
    for (const char *required : {"vars", "dynamics", "control", "init"}) {
        if (section(required) == nullptr) {
            throw model_error(fmt::format("[{}]: missing section", required));
        }
    }

    LoadedModel out;
    NNCSModel &m = out.model;
    m.network = net;

    const auto states = parse_names(*section("vars"), "vars");
    const auto inputs = section("inputs") != nullptr ? parse_names(*section("inputs"), "inputs")
                                                     : std::vector<std::string>{};
    std::vector<std::string> dists;
    std::vector<std::pair<double, double>> dist_bounds;
    if (const auto *s = section("disturbances")) {
        for (const auto &e : s->entries) {
            if (!is_identifier(e.key)) {
                semantic(e, "disturbances", "expected 'name = [lo, hi]'");
            }
            dists.push_back(e.key);
            dist_bounds.push_back(parse_interval(e, "disturbances." + e.key, false));
        }
    }
    if (states.empty()) {
        missing(section("vars")->line, "vars");
    }
    std::vector<std::string> lifted = states;
    lifted.insert(lifted.end(), dists.begin(), dists.end());
    lifted.insert(lifted.end(), inputs.begin(), inputs.end());
    for (std::size_t i = 0; i < lifted.size(); ++i) {
        const auto &n = lifted[i];
        if (n == "sin" || n == "cos" || n == "exp") {
            throw model_error(fmt::format("{}: '{}' is reserved", i < states.size() ? "vars" : "inputs", n));
        }
        if (std::find(lifted.begin(), lifted.begin() + static_cast<std::ptrdiff_t>(i), n) !=
            lifted.begin() + static_cast<std::ptrdiff_t>(i)) {
            throw model_error(fmt::format("vars: name '{}' declared twice", n));
        }
    }
    m.n_states = states.size();
    m.n_disturbances = dists.size();
    m.n_inputs = inputs.size();

    // Dynamics.
    std::vector<ExprPtr> rhs(lifted.size());
    for (const auto &e : section("dynamics")->entries) {
        if (e.key.size() < 2 || e.key.back() != '\'') {
            semantic(e, "dynamics", "expected \"name' = expression\"");
        }
        const std::string name(trim(std::string_view(e.key).substr(0, e.key.size() - 1)));
        const std::string field = fmt::format("dynamics.{}'", name);
        const auto it = std::find(lifted.begin(), lifted.end(), name);
        if (it == lifted.end()) {
            semantic(e, field, "not a declared variable");
        }
        const auto k = static_cast<std::size_t>(it - lifted.begin());
        if (rhs[k]) {
            semantic(e, field, "given twice");
        }
        try {
            rhs[k] = parse_expr(e.value, lifted);
        } catch (const parse_error &err) {
            const std::size_t col = e.column + err.column() - 1;
            std::string msg = err.what();
            if (const auto colon = msg.find(": "); msg.rfind("column", 0) == 0 && colon != std::string::npos) {
                msg = msg.substr(colon + 2);
            }
            syntax(e.line, fmt::format("{}: {}", field, msg), col);
        }
        if (k >= states.size() && !is_zero_constant(*rhs[k])) {
            semantic(e, field, "inputs and disturbances must have zero dynamics");
        }
    }
    for (std::size_t i = 0; i < lifted.size(); ++i) {
        if (!rhs[i]) {
            if (i < states.size()) {
                missing(section("dynamics")->line, fmt::format("dynamics.{}'", lifted[i]));
            }
            rhs[i] = expr_constant(0.);
        }
    }
    m.dynamics = Dynamics(lifted, rhs);

    // Control.
    {
        const auto *s = section("control");
        const auto kv = keyed(*s, "control",
                              {"period", "horizon_cycles", "horizon", "p2c", "p2c_offset", "c2p", "c2p_offset"});
        const auto at = [&](const char *k) -> const Entry * {
            const auto it = kv.find(k);
            return it == kv.end() ? nullptr : it->second;
        };
        if (at("period") == nullptr) {
            missing(s->line, "control.period");
        }
        m.period = parse_number(*at("period"), "control.period", at("period")->value, false);
        if (!(m.period > 0)) {
            semantic(*at("period"), "control.period", "must be positive");
        }
        if ((at("horizon_cycles") != nullptr) == (at("horizon") != nullptr)) {
            throw model_error(fmt::format("line {}: control.horizon_cycles: give exactly one of horizon_cycles and horizon",
                                          s->line));
        }
        if (const auto *e = at("horizon_cycles")) {
            m.cycles = parse_count(*e, "control.horizon_cycles", 0, 1000000);
        } else {
            const auto *h = at("horizon");
            const double T = parse_number(*h, "control.horizon", h->value, false);
            if (T < 0) {
                semantic(*h, "control.horizon", "must be nonnegative");
            }
            const double ratio = T / m.period;
            const double near = std::round(ratio);
            if (std::abs(ratio - near) <= 1e-9 * std::max(1., ratio)) {
                m.cycles = static_cast<std::size_t>(near);
            } else {
                m.cycles = static_cast<std::size_t>(std::floor(ratio));
                m.tail = T - static_cast<double>(m.cycles) * m.period;
                if (!(m.tail > 0 && m.tail < m.period)) {
                    m.tail = 0;
                }
            }
        }
        const std::size_t ni = net.input_dim();
        const std::size_t no = net.output_dim();
        const Entry identity{s->line, 0, "", "identity"};
        m.p2c.A = parse_matrix(at("p2c") != nullptr ? *at("p2c") : identity, "control.p2c", ni, states.size());
        m.p2c.b = at("p2c_offset") != nullptr ? parse_vector(*at("p2c_offset"), "control.p2c_offset", ni)
                                              : Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ni));
        m.c2p.A = parse_matrix(at("c2p") != nullptr ? *at("c2p") : identity, "control.c2p", inputs.size(), no);
        m.c2p.b = at("c2p_offset") != nullptr ? parse_vector(*at("c2p_offset"), "control.c2p_offset", inputs.size())
                                              : Eigen::VectorXd::Zero(static_cast<Eigen::Index>(inputs.size()));
    }

    // Initial set: states from [init], disturbances from [disturbances].
    {
        const auto *s = section("init");
        std::vector<std::optional<std::pair<double, double>>> box(states.size());
        for (const auto &e : s->entries) {
            const std::string field = "init." + e.key;
            const auto it = std::find(states.begin(), states.end(), e.key);
            if (e.key.empty() || it == states.end()) {
                semantic(e, field.empty() ? "init" : field, "not a state variable");
            }
            auto &slot = box[static_cast<std::size_t>(it - states.begin())];
            if (slot) {
                semantic(e, field, "given twice");
            }
            slot = parse_interval(e, field, false);
        }
        std::vector<Interval> ivs;
        for (std::size_t i = 0; i < states.size(); ++i) {
            if (!box[i]) {
                missing(s->line, "init." + states[i]);
            }
            ivs.emplace_back(box[i]->first, box[i]->second);
        }
        for (const auto &[lo, hi] : dist_bounds) {
            ivs.emplace_back(lo, hi);
        }
        m.init = Box(std::move(ivs));
    }

    // Goal.
    if (const auto *s = section("goal")) {
        const double inf = std::numeric_limits<double>::infinity();
        m.goal.assign(states.size(), {-inf, inf});
        std::vector<bool> seen(states.size(), false);
        const Entry *mode = nullptr;
        for (const auto &e : s->entries) {
            if (e.key == "mode") {
                if (mode != nullptr) {
                    semantic(e, "goal.mode", "given twice");
                }
                mode = &e;
                continue;
            }
            const std::string field = "goal." + e.key;
            const auto it = std::find(states.begin(), states.end(), e.key);
            if (e.key.empty() || it == states.end()) {
                semantic(e, e.key.empty() ? "goal" : field, "not a state variable");
            }
            const auto i = static_cast<std::size_t>(it - states.begin());
            if (seen[i]) {
                semantic(e, field, "given twice");
            }
            seen[i] = true;
            m.goal[i] = parse_interval(e, field, true);
        }
        if (mode == nullptr) {
            missing(s->line, "goal.mode");
        }
        const std::string_view v = trim(mode->value);
        if (v == "must_reach_at_T") {
            m.goal_mode = GoalMode::must_reach_at_T;
        } else if (v == "must_not_reach") {
            m.goal_mode = GoalMode::must_not_reach;
        } else if (v == "none") {
            m.goal_mode = GoalMode::none;
            m.goal.clear();
        } else {
            semantic(*mode, "goal.mode", fmt::format("unknown mode '{}'", v));
        }
    }

    // Solver.
    if (const auto *s = section("solver")) {
        const auto kv = keyed(*s, "solver", {"order", "abstol", "split"});
        if (const auto it = kv.find("order"); it != kv.end()) {
            out.solver.order = static_cast<unsigned>(parse_count(*it->second, "solver.order", 1, max_order));
        }
        if (const auto it = kv.find("abstol"); it != kv.end()) {
            out.solver.abstol = parse_number(*it->second, "solver.abstol", it->second->value, false);
            if (!(out.solver.abstol > 0)) {
                semantic(*it->second, "solver.abstol", "must be positive");
            }
        }
        if (const auto it = kv.find("split"); it != kv.end()) {
            const Entry &e = *it->second;
            std::string_view rest = e.value;
            while (true) {
                const auto comma = rest.find(',');
                Entry piece = e;
                piece.value = std::string(rest.substr(0, comma));
                out.solver.split.push_back(parse_count(piece, "solver.split", 1, 1000));
                if (comma == std::string_view::npos) {
                    break;
                }
                rest.remove_prefix(comma + 1);
            }
            if (out.solver.split.size() != states.size() && out.solver.split.size() != states.size() + dists.size()) {
                semantic(e, "solver.split", fmt::format("expected {} counts", states.size()));
            }
        }
    }

    m.validate();
    return out;
}

LoadedModel load_model(const std::string &model_path, const std::string &network_path)
{
    std::ifstream in(model_path);
    if (!in) {
        throw model_error(fmt::format("cannot open model file '{}'", model_path));
    }
    std::stringstream ss;
    ss << in.rdbuf();
    const auto net = load_network(network_path);
    return parse_model(ss.str(), net);
}

} // namespace nnreach
