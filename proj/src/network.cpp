#include <nnreach/network.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>
#include <utility>

#include <fmt/format.h>
#include <json.hpp>

#include <nnreach/exceptions.hpp>

#include "rounding.hpp"

namespace nnreach
{

NeuralNetwork::NeuralNetwork(std::vector<Layer> layers) : m_layers(std::move(layers))
{
    if (m_layers.empty()) {
        throw model_error("network has no layers");
    }
    for (std::size_t k = 0; k < m_layers.size(); ++k) {
        const auto &L = m_layers[k];
        if (L.W.rows() == 0 || L.W.cols() == 0) {
            throw model_error(fmt::format("layers[{}].W is empty", k));
        }
        if (L.b.size() != L.W.rows()) {
            throw model_error(
                fmt::format("layers[{}].b has length {}, W has {} rows", k, L.b.size(), L.W.rows()));
        }
        if (!L.W.allFinite() || !L.b.allFinite()) {
            throw model_error(fmt::format("layers[{}] has non-finite weights", k));
        }
        if (k > 0 && L.W.cols() != m_layers[k - 1].W.rows()) {
            throw model_error(fmt::format("layers[{}].W has {} columns, previous layer outputs {}", k, L.W.cols(),
                                          m_layers[k - 1].W.rows()));
        }
    }
}

std::size_t NeuralNetwork::input_dim() const noexcept
{
    return m_layers.empty() ? 0 : static_cast<std::size_t>(m_layers.front().W.cols());
}

std::size_t NeuralNetwork::output_dim() const noexcept
{
    return m_layers.empty() ? 0 : static_cast<std::size_t>(m_layers.back().W.rows());
}

NeuralNetwork parse_network(std::string_view json_text)
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error &e) {
        throw model_error(fmt::format("network JSON: {}", e.what()));
    }
    if (!doc.is_object() || !doc.contains("layers") || !doc["layers"].is_array()) {
        throw model_error("network JSON: expected an object with a \"layers\" array");
    }
    const auto number = [](const nlohmann::json &v, const std::string &where) {
        if (!v.is_number()) {
            throw model_error(fmt::format("{}: expected a number", where));
        }
        return v.get<double>();
    };
    std::vector<Layer> layers;
    const auto &jl = doc["layers"];
    for (std::size_t k = 0; k < jl.size(); ++k) {
        const auto &L = jl[k];
        const auto field = [k](const char *name) { return fmt::format("layers[{}].{}", k, name); };
        if (!L.is_object()) {
            throw model_error(fmt::format("layers[{}]: expected an object", k));
        }
        for (const char *name : {"W", "b", "activation"}) {
            if (!L.contains(name)) {
                throw model_error(fmt::format("{}: missing", field(name)));
            }
        }
        const auto &W = L["W"];
        if (!W.is_array() || W.empty() || !W[0].is_array()) {
            throw model_error(fmt::format("{}: expected a nonempty array of rows", field("W")));
        }
        const auto rows = W.size();
        const auto cols = W[0].size();
        Layer layer;
        layer.W.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        for (std::size_t i = 0; i < rows; ++i) {
            if (!W[i].is_array() || W[i].size() != cols) {
                throw model_error(fmt::format("{}: row {} has a different length than row 0", field("W"), i));
            }
            for (std::size_t j = 0; j < cols; ++j) {
                layer.W(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))
                    = number(W[i][j], fmt::format("{}[{}][{}]", field("W"), i, j));
            }
        }
        const auto &b = L["b"];
        if (!b.is_array()) {
            throw model_error(fmt::format("{}: expected an array", field("b")));
        }
        layer.b.resize(static_cast<Eigen::Index>(b.size()));
        for (std::size_t i = 0; i < b.size(); ++i) {
            layer.b(static_cast<Eigen::Index>(i)) = number(b[i], fmt::format("{}[{}]", field("b"), i));
        }
        const auto &act = L["activation"];
        if (act == "relu") {
            layer.activation = Activation::relu;
        } else if (act == "identity") {
            layer.activation = Activation::identity;
        } else {
            throw model_error(fmt::format("{}: expected \"relu\" or \"identity\"", field("activation")));
        }
        layers.push_back(std::move(layer));
    }
    return NeuralNetwork(std::move(layers));
}

NeuralNetwork load_network(const std::string &path)
{
    std::ifstream in(path);
    if (!in) {
        throw model_error(fmt::format("cannot open network file '{}'", path));
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_network(ss.str());
}

std::string network_to_json(const NeuralNetwork &net)
{
    nlohmann::json layers = nlohmann::json::array();
    for (const auto &L : net.layers()) {
        nlohmann::json W = nlohmann::json::array();
        for (Eigen::Index i = 0; i < L.W.rows(); ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (Eigen::Index j = 0; j < L.W.cols(); ++j) {
                row.push_back(L.W(i, j));
            }
            W.push_back(std::move(row));
        }
        nlohmann::json b = nlohmann::json::array();
        for (Eigen::Index i = 0; i < L.b.size(); ++i) {
            b.push_back(L.b(i));
        }
        layers.push_back({{"W", std::move(W)},
                          {"b", std::move(b)},
                          {"activation", L.activation == Activation::relu ? "relu" : "identity"}});
    }
    return nlohmann::json{{"layers", std::move(layers)}}.dump();
}

Eigen::VectorXd nn_eval(const NeuralNetwork &net, const Eigen::VectorXd &x)
{
    if (static_cast<std::size_t>(x.size()) != net.input_dim()) {
        throw dimension_error(
            fmt::format("network input has dimension {}, expected {}", x.size(), net.input_dim()));
    }
    Eigen::VectorXd v = x;
    for (const auto &L : net.layers()) {
        v = L.W * v + L.b;
        if (L.activation == Activation::relu) {
            v = v.cwiseMax(0.);
        }
    }
    return v;
}

namespace
{

Zonotope append_columns(Zonotope z, const std::vector<std::pair<Eigen::Index, double>> &cols)
{
    if (cols.empty()) {
        return z;
    }
    const auto p = z.generators.cols();
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(z.generators.rows(), p + static_cast<Eigen::Index>(cols.size()));
    g.leftCols(p) = z.generators;
    for (std::size_t k = 0; k < cols.size(); ++k) {
        g(cols[k].first, p + static_cast<Eigen::Index>(k)) = cols[k].second;
    }
    return {std::move(z.center), std::move(g)};
}

} // namespace

Zonotope nn_zono_forward(const NeuralNetwork &net, const Zonotope &z, const ZonoForwardOptions &opts)
{
    if (z.dim() != net.input_dim()) {
        throw dimension_error(
            fmt::format("zonotope has dimension {}, network input is {}", z.dim(), net.input_dim()));
    }
    const Rounding rounding = opts.track_rounding ? Rounding::track : Rounding::ignore;
    Zonotope cur = z;
    for (std::size_t k = 0; k < net.layers().size(); ++k) {
        const auto &L = net.layers()[k];
        cur = zono_affine(L.W, L.b, cur, rounding);
        if (L.activation != Activation::relu) {
            continue;
        }
        const Box hull = zono_interval_hull(cur);
        std::vector<std::pair<Eigen::Index, double>> fresh;
        std::vector<std::pair<Eigen::Index, double>> errors;
        for (Eigen::Index i = 0; i < cur.center.size(); ++i) {
            const double l = hull[static_cast<std::size_t>(i)].lo();
            const double u = hull[static_cast<std::size_t>(i)].hi();
            if (l >= 0) {
                continue;
            }
            if (u <= 0) {
                cur.center(i) = 0;
                cur.generators.row(i).setZero();
                continue;
            }
            // For any lambda in [0, 1], ReLU(a) - lambda * a ranges over
            // [0, max(-lambda * l, u - lambda * u)] on [l, u].
            const double lambda = std::clamp(u / (u - l), 0., 1.);
            const double top
                = std::max(detail::mul_up(lambda, -l), detail::add_up(u, -detail::mul_down(lambda, u)));
            const double mu = top * 0.5;
            const double gen = std::max(mu, detail::add_up(top, -mu));

            detail::RoundingBound rb;
            cur.center(i) = rb.add(rb.mul(lambda, cur.center(i)), mu);
            for (Eigen::Index j = 0; j < cur.generators.cols(); ++j) {
                cur.generators(i, j) = rb.mul(lambda, cur.generators(i, j));
            }
            if (opts.track_rounding && rb.bound() > 0) {
                errors.emplace_back(i, rb.bound());
            }
            if (opts.trace) {
                opts.trace->push_back(ReluRelaxation{k, static_cast<std::size_t>(i), l, u, lambda, mu,
                                                     static_cast<std::size_t>(cur.generators.cols()) + fresh.size()});
            }
            fresh.emplace_back(i, gen);
        }
        cur = append_columns(std::move(cur), fresh);
        cur = append_columns(std::move(cur), errors);
    }
    return cur;
}

} // namespace nnreach
