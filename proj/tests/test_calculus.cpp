#include <doctest.h>

#include <cmath>

#include "requforge/calculus.hpp"
#include "requforge/gadgets.hpp"
#include "requforge/rng.hpp"

using namespace requforge;

namespace {

Network random_net(SplitMix& rng, int input_dim, int layers, int max_width = 4) {
    std::vector<Layer> ls;
    int prev = input_dim;
    for (int l = 0; l < layers; ++l) {
        const int out = 1 + static_cast<int>(rng.next() % static_cast<unsigned>(max_width));
        Layer layer;
        layer.weights = Matrix(out, prev);
        layer.bias.resize(static_cast<std::size_t>(out));
        for (int i = 0; i < out; ++i) {
            for (int j = 0; j < prev; ++j) layer.weights.at(i, j) = rng.uniform(-1.0, 1.0);
            layer.bias[static_cast<std::size_t>(i)] = rng.uniform(-1.0, 1.0);
        }
        prev = out;
        ls.push_back(std::move(layer));
    }
    return Network(input_dim, std::move(ls));
}

}  // namespace

TEST_CASE("concatenate: semantic compositionality on random nets") {
    SplitMix rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        const Network inner = random_net(rng, 3, 2);
        const Network outer = random_net(rng, inner.output_dim(), 2);
        const Network both = concatenate(outer, inner);
        for (int i = 0; i < 100; ++i) {
            std::vector<double> x{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
            const auto direct = outer.realize(inner.realize(x));
            const auto merged = both.realize(x);
            for (std::size_t k = 0; k < direct.size(); ++k)
                CHECK(merged[k] == doctest::Approx(direct[k]).epsilon(1e-12));
        }
    }
}

TEST_CASE("concatenate: identity twice, product over an identity stage") {
    const Network id2 = concatenate(identity_net(1.0), identity_net(1.0));
    CHECK(id2.realize({0.3})[0] == doctest::Approx(0.3));
    CHECK(complexity(id2).hidden_layers == 2);

    const Network prod = concatenate(product2(), identity_block(2, 10.0));
    CHECK(prod.realize({2.0, 5.0})[0] == doctest::Approx(10.0));
}

TEST_CASE("concatenate rejects dimension mismatch") {
    CHECK_THROWS_AS(concatenate(product2(), identity_net(1.0)), std::invalid_argument);
}

TEST_CASE("concatenate layer count") {
    SplitMix rng(5);
    const Network inner = random_net(rng, 1, 3);
    const Network outer = random_net(rng, inner.output_dim(), 2);
    CHECK(concatenate(outer, inner).layer_count() == 4);
}

TEST_CASE("parallelize: identity pair, width arithmetic, mixed branches") {
    const Network two = parallelize(identity_net(1.0), identity_net(1.0));
    const auto pair = two.realize({0.7});
    CHECK(pair.size() == 2);
    CHECK(pair[0] == doctest::Approx(0.7));
    CHECK(pair[1] == doctest::Approx(0.7));

    SplitMix rng(29);
    const Network a = random_net(rng, 2, 2, 2);
    const Network b = random_net(rng, 2, 2, 4);
    const Network ab = parallelize(a, b);
    for (int l = 0; l < ab.layer_count(); ++l)
        CHECK(ab.layers()[static_cast<std::size_t>(l)].weights.rows ==
              a.layers()[static_cast<std::size_t>(l)].weights.rows +
                  b.layers()[static_cast<std::size_t>(l)].weights.rows);

    // identity next to a bare activation net: (-1) -> (-1, 0)
    Matrix m1(1, 1), m2(1, 1);
    m1.at(0, 0) = 1.0;
    m2.at(0, 0) = 1.0;
    const Network rq(1, {Layer{m1, {0.0}}, Layer{m2, {0.0}}});
    const auto out = parallelize(identity_net(1.0), rq).realize({-1.0});
    CHECK(out[0] == doctest::Approx(-1.0));
    CHECK(out[1] == 0.0);
}

TEST_CASE("parallelize preserves each branch bit for bit") {
    SplitMix rng(31);
    const Network a = random_net(rng, 2, 3);
    const Network b = random_net(rng, 2, 3);
    const Network ab = parallelize(a, b);
    for (int i = 0; i < 50; ++i) {
        std::vector<double> x{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
        const auto va = a.realize(x);
        const auto vb = b.realize(x);
        const auto vab = ab.realize(x);
        for (std::size_t k = 0; k < va.size(); ++k) CHECK(vab[k] == va[k]);
        for (std::size_t k = 0; k < vb.size(); ++k) CHECK(vab[va.size() + k] == vb[k]);
    }
}

TEST_CASE("parallelize rejects unequal depth or input dimension") {
    SplitMix rng(37);
    const Network a = random_net(rng, 2, 2);
    const Network deeper = random_net(rng, 2, 3);
    CHECK_THROWS_AS(parallelize(a, deeper), std::invalid_argument);
    const Network other_input = random_net(rng, 3, 2);
    CHECK_THROWS_AS(parallelize(a, other_input), std::invalid_argument);
}

TEST_CASE("n-ary parallelization: fold layout matches pairwise semantics") {
    SplitMix rng(41);
    const Network a = random_net(rng, 1, 2);
    const Network b = random_net(rng, 1, 2);
    const Network c = random_net(rng, 1, 2);
    const std::vector<Network> nets{a, b, c};
    const Network folded = parallelize_all(nets);
    const Network right = parallelize(a, parallelize(b, c));
    for (int i = 0; i < 50; ++i) {
        std::vector<double> x{rng.uniform(-1.0, 1.0)};
        const auto u = folded.realize(x);
        const auto v = right.realize(x);
        REQUIRE(u.size() == v.size());
        for (std::size_t k = 0; k < u.size(); ++k) CHECK(u[k] == doctest::Approx(v[k]).epsilon(1e-14));
    }
}

TEST_CASE("identity_net: exact on [-s,s], not the identity outside") {
    // s=2 at t=1: (requ(3) - requ(1)) / 8 = (9 - 1) / 8 = 1
    CHECK(identity_net(2.0).realize({1.0})[0] == doctest::Approx(1.0));
    for (double s : {1.0, 2.0, 5.0}) {
        const Network id = identity_net(s);
        for (int i = 0; i < 1000; ++i) {
            const double t = -s + 2.0 * s * i / 999.0;
            CHECK(std::abs(id.realize({t})[0] - t) <= 1e-12 * s);
        }
        CHECK(id.realize({2.0 * s})[0] == doctest::Approx(9.0 * s / 4.0));
        CHECK(id.realize({2.0 * s})[0] != doctest::Approx(2.0 * s));
        CHECK(std::abs(id.realize({-s})[0] + s) <= 1e-12 * s);
    }
    CHECK_THROWS_AS(identity_net(0.0), std::invalid_argument);
    CHECK_THROWS_AS(identity_net(-1.0), std::invalid_argument);
}

TEST_CASE("identity_block passes tuples through") {
    const Network block = identity_block(3, 1.0);
    const auto out = block.realize({0.1, -0.2, 0.9});
    CHECK(out[0] == doctest::Approx(0.1));
    CHECK(out[1] == doctest::Approx(-0.2));
    CHECK(out[2] == doctest::Approx(0.9));
}

TEST_CASE("sync_depth pads to the requested depth and keeps values") {
    const Network padded = sync_depth(identity_net(1.0), 4, 1.0);
    CHECK(padded.hidden_layer_count() == 4);
    CHECK(padded.realize({0.5})[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK_THROWS_AS(sync_depth(identity_net(1.0), 0, 1.0), std::invalid_argument);

    // the overload without s reads the recorded output bound
    const Network auto_padded = sync_depth(identity_net(2.0), 3);
    CHECK(auto_padded.hidden_layer_count() == 3);
    CHECK(auto_padded.realize({1.7})[0] == doctest::Approx(1.7).epsilon(1e-12));
    Matrix raw(1, 1);
    raw.at(0, 0) = 1.0;
    CHECK_THROWS_AS(sync_depth(affine_net(std::move(raw), {0.0}), 2), std::invalid_argument);

    SplitMix rng(43);
    const Network net = random_net(rng, 2, 2);
    // outputs of a random net with inputs in [-1,1]^2 stay inside a loose box
    const Network synced = sync_depth(net, 5, 50.0);
    for (int i = 0; i < 50; ++i) {
        std::vector<double> x{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        const auto u = net.realize(x);
        const auto v = synced.realize(x);
        for (std::size_t k = 0; k < u.size(); ++k)
            CHECK(std::abs(u[k] - v[k]) <= 1e-12 * std::max(1.0, std::abs(u[k])));
    }
}
