#pragma once

// Composition algebra over ReQU networks: concatenation (function
// composition merged into one net), parallelization (block-diagonal
// stacking over a shared input), identity stages, and depth
// synchronization via identity padding.

#include <algorithm>
#include <span>
#include <stdexcept>
#include <vector>

#include "requforge/requ.hpp"

namespace requforge {

namespace detail {

inline Matrix matmul(const Matrix& a, const Matrix& b) {
    Matrix r(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i)
        for (int k = 0; k < a.cols; ++k) {
            const double aik = a.at(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < b.cols; ++j) r.at(i, j) += aik * b.at(k, j);
        }
    return r;
}

inline std::vector<double> matvec_plus(const Matrix& a, const std::vector<double>& x,
                                       const std::vector<double>& c) {
    std::vector<double> r(c);
    for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < a.cols; ++j) r[static_cast<std::size_t>(i)] += a.at(i, j) * x[static_cast<std::size_t>(j)];
    return r;
}

}  // namespace detail

/// Composition outer(inner(.)) merged into a single net: the inner net's
/// final affine layer fuses with the outer net's first layer, so the result
/// has layer_count(outer) + layer_count(inner) - 1 layers.
inline Network concatenate(const Network& outer, const Network& inner) {
    if (outer.input_dim() != inner.output_dim())
        throw std::invalid_argument("concatenate: outer expects " + std::to_string(outer.input_dim()) +
                                    " inputs, inner produces " + std::to_string(inner.output_dim()));
    std::vector<Layer> layers;
    layers.reserve(static_cast<std::size_t>(outer.layer_count() + inner.layer_count() - 1));
    for (int l = 0; l + 1 < inner.layer_count(); ++l)
        layers.push_back(inner.layers()[static_cast<std::size_t>(l)]);
    const Layer& in_last = inner.layers().back();
    const Layer& out_first = outer.layers().front();
    Layer merged;
    merged.weights = detail::matmul(out_first.weights, in_last.weights);
    merged.bias = detail::matvec_plus(out_first.weights, in_last.bias, out_first.bias);
    layers.push_back(std::move(merged));
    for (int l = 1; l < outer.layer_count(); ++l)
        layers.push_back(outer.layers()[static_cast<std::size_t>(l)]);
    return Network(inner.input_dim(), std::move(layers), outer.output_bound());
}

/// Block-diagonal stacking of two equal-depth nets reading the same input;
/// realizes x -> (a(x), b(x)). Per-branch arithmetic is untouched, so each
/// branch's outputs match the standalone net exactly.
inline Network parallelize(const Network& a, const Network& b) {
    if (a.layer_count() != b.layer_count())
        throw std::invalid_argument("parallelize: depth mismatch (" + std::to_string(a.layer_count()) +
                                    " vs " + std::to_string(b.layer_count()) + " layers); synchronize first");
    if (a.input_dim() != b.input_dim())
        throw std::invalid_argument("parallelize: input dimension mismatch");
    std::vector<Layer> layers;
    layers.reserve(static_cast<std::size_t>(a.layer_count()));
    for (int l = 0; l < a.layer_count(); ++l) {
        const Layer& la = a.layers()[static_cast<std::size_t>(l)];
        const Layer& lb = b.layers()[static_cast<std::size_t>(l)];
        Layer merged;
        if (l == 0) {
            // both branches read the shared input: stack vertically
            merged.weights = Matrix(la.weights.rows + lb.weights.rows, a.input_dim());
            for (int i = 0; i < la.weights.rows; ++i)
                for (int j = 0; j < la.weights.cols; ++j) merged.weights.at(i, j) = la.weights.at(i, j);
            for (int i = 0; i < lb.weights.rows; ++i)
                for (int j = 0; j < lb.weights.cols; ++j)
                    merged.weights.at(la.weights.rows + i, j) = lb.weights.at(i, j);
        } else {
            merged.weights = Matrix(la.weights.rows + lb.weights.rows, la.weights.cols + lb.weights.cols);
            for (int i = 0; i < la.weights.rows; ++i)
                for (int j = 0; j < la.weights.cols; ++j) merged.weights.at(i, j) = la.weights.at(i, j);
            for (int i = 0; i < lb.weights.rows; ++i)
                for (int j = 0; j < lb.weights.cols; ++j)
                    merged.weights.at(la.weights.rows + i, la.weights.cols + j) = lb.weights.at(i, j);
        }
        merged.bias = la.bias;
        merged.bias.insert(merged.bias.end(), lb.bias.begin(), lb.bias.end());
        layers.push_back(std::move(merged));
    }
    std::vector<double> bound;
    if (!a.output_bound().empty() && !b.output_bound().empty()) {
        bound = a.output_bound();
        bound.insert(bound.end(), b.output_bound().begin(), b.output_bound().end());
    }
    return Network(a.input_dim(), std::move(layers), std::move(bound));
}

/// Left fold of binary parallelization over two or more nets.
inline Network parallelize_all(std::span<const Network> nets) {
    if (nets.empty()) throw std::invalid_argument("parallelize_all: no networks");
    Network acc = nets[0];
    for (std::size_t i = 1; i < nets.size(); ++i) acc = parallelize(acc, nets[i]);
    return acc;
}

/// Single affine layer (no activation): x -> Ax + b.
inline Network affine_net(Matrix a, std::vector<double> b, std::vector<double> output_bound = {}) {
    const int in = a.cols;
    Layer layer{std::move(a), std::move(b)};
    return Network(in, {std::move(layer)}, std::move(output_bound));
}

/// One-hidden-layer exact identity on [-s, s]:
/// t -> (requ(t+s) - requ(-t+s)) / (4s).
inline Network identity_net(double s) {
    if (!(s > 0.0)) throw std::invalid_argument("identity_net: s must be positive");
    Layer hidden;
    hidden.weights = Matrix(2, 1);
    hidden.weights.at(0, 0) = 1.0;
    hidden.weights.at(1, 0) = -1.0;
    hidden.bias = {s, s};
    Layer out;
    out.weights = Matrix(1, 2);
    out.weights.at(0, 0) = 1.0 / (4.0 * s);
    out.weights.at(0, 1) = -1.0 / (4.0 * s);
    out.bias = {0.0};
    return Network(1, {std::move(hidden), std::move(out)}, {s});
}

/// Componentwise identity on [-s, s]^d, one hidden layer of width 2d.
inline Network identity_block(int d, double s) {
    if (d <= 0) throw std::invalid_argument("identity_block: d must be positive");
    if (!(s > 0.0)) throw std::invalid_argument("identity_block: s must be positive");
    Layer hidden;
    hidden.weights = Matrix(2 * d, d);
    hidden.bias.assign(static_cast<std::size_t>(2 * d), s);
    Layer out;
    out.weights = Matrix(d, 2 * d);
    out.bias.assign(static_cast<std::size_t>(d), 0.0);
    for (int k = 0; k < d; ++k) {
        hidden.weights.at(2 * k, k) = 1.0;
        hidden.weights.at(2 * k + 1, k) = -1.0;
        out.weights.at(k, 2 * k) = 1.0 / (4.0 * s);
        out.weights.at(k, 2 * k + 1) = -1.0 / (4.0 * s);
    }
    return Network(d, {std::move(hidden), std::move(out)},
                   std::vector<double>(static_cast<std::size_t>(d), s));
}

/// Pads `net` with identity stages until it has exactly `target_hidden`
/// hidden layers. Valid while every output of `net` stays within [-s, s].
inline Network sync_depth(const Network& net, int target_hidden, double s) {
    if (target_hidden < net.hidden_layer_count())
        throw std::invalid_argument("sync_depth: target " + std::to_string(target_hidden) +
                                    " below current depth " + std::to_string(net.hidden_layer_count()));
    Network result = net;
    while (result.hidden_layer_count() < target_hidden)
        result = concatenate(identity_block(result.output_dim(), s), result);
    return result;
}

/// Pads using the net's recorded conservative output bound as the identity range.
inline Network sync_depth(const Network& net, int target_hidden) {
    if (net.output_bound().empty())
        throw std::invalid_argument("sync_depth: net has no recorded output bound; pass s explicitly");
    double s = 0.0;
    for (double b : net.output_bound()) s = std::max(s, b);
    return sync_depth(net, target_hidden, s);
}

}  // namespace requforge
