#ifndef NNREACH_NETWORK_HPP
#define NNREACH_NETWORK_HPP

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include <nnreach/zonotope.hpp>

namespace nnreach
{

enum class Activation { relu, identity };

struct Layer {
    Eigen::MatrixXd W;
    Eigen::VectorXd b;
    Activation activation = Activation::relu;
};

class NeuralNetwork
{
public:
    NeuralNetwork() = default;
    // Validates that consecutive layer shapes chain and entries are finite.
    explicit NeuralNetwork(std::vector<Layer> layers);

    [[nodiscard]] const std::vector<Layer> &layers() const noexcept
    {
        return m_layers;
    }
    [[nodiscard]] std::size_t input_dim() const noexcept;
    [[nodiscard]] std::size_t output_dim() const noexcept;

private:
    std::vector<Layer> m_layers;
};

// {"layers":[{"W":[[...],...],"b":[...],"activation":"relu"|"identity"}]}
NeuralNetwork parse_network(std::string_view json_text);
NeuralNetwork load_network(const std::string &path);
std::string network_to_json(const NeuralNetwork &net);

Eigen::VectorXd nn_eval(const NeuralNetwork &net, const Eigen::VectorXd &x);

// One crossing neuron replaced by lambda * a + mu with a fresh generator
// of magnitude mu in the given column.
struct ReluRelaxation {
    std::size_t layer;
    std::size_t neuron;
    double lower;
    double upper;
    double lambda;
    double mu;
    std::size_t column;
};

struct ZonoForwardOptions {
    // Append generator columns that bound the floating-point error of the
    // affine layers and ReLU scalings, so that the result contains the
    // exact image.
    bool track_rounding = false;
    // Receives the relaxations, in layer then neuron order.
    std::vector<ReluRelaxation> *trace = nullptr;
};

// Zonotope abstract transformer. Generator columns of z keep their
// positions; new columns are only appended.
Zonotope nn_zono_forward(const NeuralNetwork &net, const Zonotope &z, const ZonoForwardOptions &opts = {});

} // namespace nnreach

#endif
