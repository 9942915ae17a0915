#include <doctest.h>

#include <string>

#include "requforge/gadgets.hpp"
#include "requforge/rng.hpp"
#include "requforge/serialize.hpp"

using namespace requforge;

TEST_CASE("save/load: product gadget round-trips and still multiplies") {
    const Network p = product2();
    const Network q = load_network(save_network(p));
    CHECK(q.realize({2.0, 3.0})[0] == doctest::Approx(6.0));
    CHECK(q.input_dim() == 2);
    CHECK(q.layer_count() == p.layer_count());
}

TEST_CASE("save/load: weights survive bit-exactly") {
    SplitMix rng(401);
    std::vector<Layer> layers;
    int prev = 3;
    for (int l = 0; l < 3; ++l) {
        const int out = 1 + static_cast<int>(rng.next() % 4);
        Layer layer;
        layer.weights = Matrix(out, prev);
        layer.bias.resize(static_cast<std::size_t>(out));
        for (int i = 0; i < out; ++i) {
            for (int j = 0; j < prev; ++j) layer.weights.at(i, j) = rng.uniform(-1.0, 1.0) / 3.0;
            layer.bias[static_cast<std::size_t>(i)] = rng.uniform(-1.0, 1.0) * 1e-7;
        }
        prev = out;
        layers.push_back(std::move(layer));
    }
    const Network net(3, std::move(layers));
    const Network back = load_network(save_network(net));
    REQUIRE(back.layer_count() == net.layer_count());
    for (int l = 0; l < net.layer_count(); ++l) {
        const Layer& a = net.layers()[static_cast<std::size_t>(l)];
        const Layer& b = back.layers()[static_cast<std::size_t>(l)];
        CHECK(a.weights.data == b.weights.data);
        CHECK(a.bias == b.bias);
    }
}

TEST_CASE("load: empty and malformed streams") {
    CHECK_THROWS_AS(load_network(""), ParseError);
    CHECK_THROWS_AS(load_network("{not json"), ParseError);
    CHECK_THROWS_AS(load_network("[1,2,3]"), ParseError);
}

TEST_CASE("load: errors name the offending field") {
    const std::string missing_dim = R"({"activation":"requ","layers":[{"weights":[[1.0]],"bias":[0.0]}]})";
    CHECK_THROWS_WITH_AS(load_network(missing_dim),
                         doctest::Contains("input_dim"), ParseError);

    const std::string bad_act = R"({"input_dim":1,"activation":"relu","layers":[{"weights":[[1.0]],"bias":[0.0]}]})";
    CHECK_THROWS_WITH_AS(load_network(bad_act), doctest::Contains("activation"), ParseError);

    // second layer expects one input, row has two
    const std::string shape = R"({"input_dim":1,"activation":"requ",
      "layers":[{"weights":[[1.0]],"bias":[0.0]},{"weights":[[1.0,2.0]],"bias":[0.0]}]})";
    CHECK_THROWS_WITH_AS(load_network(shape), doctest::Contains("layers[1].weights"), ParseError);

    const std::string bias = R"({"input_dim":1,"activation":"requ","layers":[{"weights":[[1.0]],"bias":[0.0,1.0]}]})";
    CHECK_THROWS_WITH_AS(load_network(bias), doctest::Contains("layers[0].bias"), ParseError);
}
