#include <vector>

#include <doctest.h>

#include <nnreach/exceptions.hpp>
#include <nnreach/network.hpp>

#include "test_util.hpp"

using namespace nnreach;
using nnreach::test::Rng;

namespace
{

NeuralNetwork random_network(Rng &rng, std::size_t in, std::size_t layers, std::size_t width, std::size_t out)
{
    std::vector<Layer> ls;
    std::size_t prev = in;
    for (std::size_t k = 0; k < layers; ++k) {
        const std::size_t rows = (k + 1 == layers) ? out : static_cast<std::size_t>(rng.integer(1, static_cast<int>(width)));
        Layer L;
        L.W.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(prev));
        L.b.resize(static_cast<Eigen::Index>(rows));
        for (Eigen::Index i = 0; i < L.W.rows(); ++i) {
            for (Eigen::Index j = 0; j < L.W.cols(); ++j) {
                L.W(i, j) = rng.uniform(-1., 1.);
            }
            L.b(i) = rng.uniform(-0.5, 0.5);
        }
        L.activation = (k + 1 == layers && rng.coin()) ? Activation::identity : Activation::relu;
        ls.push_back(std::move(L));
        prev = rows;
    }
    return NeuralNetwork(std::move(ls));
}

// Straightforward scalar-loop evaluation.
std::vector<double> naive_eval(const NeuralNetwork &net, std::vector<double> v)
{
    for (const auto &L : net.layers()) {
        std::vector<double> next(static_cast<std::size_t>(L.W.rows()));
        for (Eigen::Index i = 0; i < L.W.rows(); ++i) {
            double s = L.b(i);
            for (Eigen::Index j = 0; j < L.W.cols(); ++j) {
                s += L.W(i, j) * v[static_cast<std::size_t>(j)];
            }
            next[static_cast<std::size_t>(i)] = (L.activation == Activation::relu && s < 0) ? 0. : s;
        }
        v = std::move(next);
    }
    return v;
}

} // namespace

TEST_CASE("nn_eval")
{
    Layer id{Eigen::Matrix2d::Identity(), Eigen::Vector2d::Zero(), Activation::identity};
    const NeuralNetwork lin({id});
    CHECK(nn_eval(lin, Eigen::Vector2d(-1, 2)) == Eigen::Vector2d(-1, 2));

    Layer relu{Eigen::Matrix2d::Identity(), Eigen::Vector2d::Zero(), Activation::relu};
    const NeuralNetwork r({relu});
    CHECK(nn_eval(r, Eigen::Vector2d(-1, 2)) == Eigen::Vector2d(0, 2));
    CHECK_THROWS_AS(nn_eval(r, Eigen::Vector3d(0, 0, 0)), dimension_error);

    Rng rng(41);
    const auto net = random_network(rng, 3, 2, 16, 2);
    for (int s = 0; s < 100; ++s) {
        std::vector<double> x{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
        const auto ref = naive_eval(net, x);
        const auto got = nn_eval(net, Eigen::Map<const Eigen::VectorXd>(x.data(), 3));
        for (std::size_t i = 0; i < 2; ++i) {
            CHECK(got(static_cast<Eigen::Index>(i)) == doctest::Approx(ref[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("network JSON")
{
    const auto net = parse_network(R"({"layers":[{"W":[[1,2],[3,4],[5,6]],"b":[0,1,2],"activation":"relu"},
                                                  {"W":[[1,0,-1]],"b":[0.5],"activation":"identity"}]})");
    CHECK(net.input_dim() == 2);
    CHECK(net.output_dim() == 1);
    CHECK(net.layers()[0].W(2, 1) == 6.);
    const auto again = parse_network(network_to_json(net));
    CHECK(again.layers()[1].b(0) == 0.5);
    CHECK(again.layers()[1].activation == Activation::identity);

    CHECK_THROWS_WITH_AS(parse_network(R"({"layers":[{"W":[[1,2],[3]],"b":[0,0],"activation":"relu"}]})"),
                         doctest::Contains("layers[0].W"), model_error);
    CHECK_THROWS_WITH_AS(parse_network(R"({"layers":[{"W":[[1,2]],"b":[0,0],"activation":"relu"}]})"),
                         doctest::Contains("layers[0].b"), model_error);
    CHECK_THROWS_WITH_AS(parse_network(R"({"layers":[{"W":[[1,2]],"b":[0],"activation":"tanh"}]})"),
                         doctest::Contains("layers[0].activation"), model_error);
    CHECK_THROWS_WITH_AS(parse_network(R"({"layers":[{"W":[[1,2]],"b":[0],"activation":"relu"},
                                                      {"W":[[1,2]],"b":[0],"activation":"relu"}]})"),
                         doctest::Contains("layers[1].W"), model_error);
    CHECK_THROWS_AS(parse_network("{"), model_error);
    CHECK_THROWS_AS(parse_network(R"({"layers":[]})"), model_error);
    CHECK_THROWS_AS(load_network("/nonexistent/net.json"), model_error);
}

TEST_CASE("nn_zono_forward stable cases")
{
    Layer L{Eigen::Matrix2d::Identity(), Eigen::Vector2d(5, -5), Activation::relu};
    const NeuralNetwork net({L});
    Eigen::MatrixXd g(2, 2);
    g << 1, 0.5, -0.5, 1;
    const Zonotope z(Eigen::Vector2d::Zero(), g);
    const auto out = nn_zono_forward(net, z);
    CHECK(out.num_generators() == 2);
    CHECK(out.center == Eigen::Vector2d(5, 0));
    CHECK(out.generators.row(0) == g.row(0));
    CHECK(out.generators.row(1).isZero(0));
}

TEST_CASE("nn_zono_forward crossing neuron")
{
    Layer L{Eigen::MatrixXd::Identity(1, 1), Eigen::VectorXd::Zero(1), Activation::relu};
    const NeuralNetwork net({L});
    const Zonotope z(Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Ones(1, 1));
    std::vector<ReluRelaxation> trace;
    ZonoForwardOptions opts;
    opts.trace = &trace;
    const auto out = nn_zono_forward(net, z, opts);
    CHECK(out.center(0) == 0.25);
    REQUIRE(out.num_generators() == 2);
    CHECK(out.generators(0, 0) == 0.5);
    CHECK(out.generators(0, 1) == 0.25);
    const auto h = zono_interval_hull(out);
    CHECK(h[0] == Interval(-0.5, 1.));
    REQUIRE(trace.size() == 1);
    CHECK(trace[0].lambda == 0.5);
    CHECK(trace[0].mu == 0.25);
    CHECK(trace[0].column == 1);
}

TEST_CASE("nn_zono_forward witness property")
{
    Rng rng(42);
    for (int n = 0; n < 5; ++n) {
        const auto net = random_network(rng, 3, 3, 12, 2);
        Eigen::MatrixXd g(3, 4);
        for (Eigen::Index i = 0; i < 3; ++i) {
            for (Eigen::Index j = 0; j < 4; ++j) {
                g(i, j) = rng.uniform(-0.5, 0.5);
            }
        }
        const Zonotope z(Eigen::Vector3d(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)), g);
        std::vector<ReluRelaxation> trace;
        ZonoForwardOptions opts;
        opts.trace = &trace;
        const auto out = nn_zono_forward(net, z, opts);
        // Column identity: the input generators keep their positions.
        CHECK(out.num_generators() == 4 + trace.size());

        for (int s = 0; s < 200; ++s) {
            Eigen::VectorXd zeta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(out.num_generators()));
            for (Eigen::Index j = 0; j < 4; ++j) {
                zeta(j) = rng.member(Interval(-1., 1.));
            }
            Eigen::VectorXd v = z.point(zeta.head(4));
            std::size_t t = 0;
            for (std::size_t k = 0; k < net.layers().size(); ++k) {
                const auto &L = net.layers()[k];
                Eigen::VectorXd a = L.W * v + L.b;
                if (L.activation == Activation::relu) {
                    for (; t < trace.size() && trace[t].layer == k; ++t) {
                        const auto &r = trace[t];
                        const double ai = a(static_cast<Eigen::Index>(r.neuron));
                        CHECK(ai >= r.lower - 1e-12);
                        CHECK(ai <= r.upper + 1e-12);
                        const double dev = std::max(ai, 0.) - (r.lambda * ai + r.mu);
                        REQUIRE(std::abs(dev) <= r.mu + 1e-12);
                        zeta(static_cast<Eigen::Index>(r.column)) = std::clamp(dev / r.mu, -1., 1.);
                    }
                    a = a.cwiseMax(0.);
                }
                v = a;
            }
            CHECK((out.point(zeta) - nn_eval(net, z.point(zeta.head(4)))).cwiseAbs().maxCoeff() <= 1e-9);
        }
    }
}

TEST_CASE("nn_zono_forward rounding columns")
{
    Rng rng(43);
    const auto net = random_network(rng, 2, 2, 8, 2);
    const Zonotope z(Eigen::Vector2d(0.1, -0.2), Eigen::Matrix2d::Identity() * 0.3);
    ZonoForwardOptions opts;
    opts.track_rounding = true;
    const auto tracked = nn_zono_forward(net, z, opts);
    const auto plain = nn_zono_forward(net, z);
    // Rounding columns widen the neuron bounds only marginally.
    CHECK((tracked.generators.leftCols(2) - plain.generators.leftCols(2)).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(tracked.num_generators() >= plain.num_generators());
    const auto ht = zono_interval_hull(tracked);
    const auto hp = zono_interval_hull(plain);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(ht[i].contains(hp[i].mid()));
        CHECK(std::abs(ht[i].width() - hp[i].width()) <= 1e-9);
    }
}
