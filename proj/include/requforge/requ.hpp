#pragma once

// Core value types for squared-rectifier (ReQU) feedforward networks:
// dense layer storage, forward evaluation, and size accounting.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace requforge {

/// Squared rectifier: max(0, x)^2.
inline double requ(double x) {
    const double p = x > 0.0 ? x : 0.0;
    return p * p;
}

// Dense row-major matrix.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {
        if (r < 0 || c < 0) throw std::invalid_argument("Matrix: negative shape");
    }

    double& at(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
    double at(int i, int j) const { return data[static_cast<std::size_t>(i) * cols + j]; }
};

struct Layer {
    Matrix weights;            // out x in
    std::vector<double> bias;  // out
};

struct ComplexityReport {
    int hidden_layers = 0;      // layer count - 1
    int max_width = 0;          // max over input_dim and all hidden layer widths
    std::int64_t nonzero_weights = 0;  // nonzero entries of every weight matrix and bias
};

// A feedforward net under the ReQU activation. The activation is applied
// componentwise after every layer except the last, which stays affine.
// Immutable after construction; evaluation is re-entrant.
class Network {
public:
    // `output_bound`, when nonempty, records a conservative bound |out_i| <= output_bound[i]
    // valid on the construction's intended input domain. Callers composing nets use it to
    // size identity stages; it is metadata, not enforced at evaluation time.
    Network(int input_dim, std::vector<Layer> layers, std::vector<double> output_bound = {})
        : input_dim_(input_dim),
          layers_(std::move(layers)),
          output_bound_(std::move(output_bound)) {
        validate();
        build_eval_cache();
    }

    int input_dim() const { return input_dim_; }
    int output_dim() const { return layers_.back().weights.rows; }
    int layer_count() const { return static_cast<int>(layers_.size()); }
    int hidden_layer_count() const { return layer_count() - 1; }
    const std::vector<Layer>& layers() const { return layers_; }
    const std::vector<double>& output_bound() const { return output_bound_; }
    std::int64_t nonzero_weights() const { return nonzeros_; }

    /// Forward pass. Rejects inputs whose length is not input_dim.
    std::vector<double> realize(std::span<const double> x) const {
        if (static_cast<int>(x.size()) != input_dim_)
            throw std::invalid_argument("realize: input has length " + std::to_string(x.size()) +
                                        ", network expects " + std::to_string(input_dim_));
        std::vector<double> cur(x.begin(), x.end());
        std::vector<double> next;
        const int last = layer_count() - 1;
        for (int l = 0; l <= last; ++l) {
            const CsrLayer& m = csr_[l];
            const int out = layers_[l].weights.rows;
            next.assign(static_cast<std::size_t>(out), 0.0);
            for (int i = 0; i < out; ++i) {
                double acc = layers_[l].bias[static_cast<std::size_t>(i)];
                for (std::int64_t k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k)
                    acc += m.val[static_cast<std::size_t>(k)] * cur[static_cast<std::size_t>(m.col[static_cast<std::size_t>(k)])];
                next[static_cast<std::size_t>(i)] = (l == last) ? acc : requ(acc);
            }
            cur.swap(next);
        }
        return cur;
    }

    std::vector<double> realize(std::initializer_list<double> x) const {
        return realize(std::span<const double>(x.begin(), x.size()));
    }

    double realize_scalar(std::span<const double> x) const {
        if (output_dim() != 1) throw std::invalid_argument("realize_scalar: network is not scalar-valued");
        return realize(x)[0];
    }

private:
    // Structural zeros dominate in composed nets; evaluation walks only the
    // nonzero entries. Skipping exact zeros leaves the accumulated value
    // unchanged, so this matches the dense forward pass bit for bit.
    struct CsrLayer {
        std::vector<std::int64_t> row_ptr;
        std::vector<int> col;
        std::vector<double> val;
    };

    void validate() const {
        if (input_dim_ <= 0) throw std::invalid_argument("Network: input_dim must be positive");
        if (layers_.empty()) throw std::invalid_argument("Network: at least one layer required");
        int prev = input_dim_;
        for (std::size_t l = 0; l < layers_.size(); ++l) {
            const Layer& ly = layers_[l];
            if (ly.weights.rows <= 0)
                throw std::invalid_argument("Network: layer " + std::to_string(l) + " has no rows");
            if (ly.weights.cols != prev)
                throw std::invalid_argument("Network: layer " + std::to_string(l) + " expects " +
                                            std::to_string(ly.weights.cols) + " inputs, previous width is " +
                                            std::to_string(prev));
            if (static_cast<int>(ly.bias.size()) != ly.weights.rows)
                throw std::invalid_argument("Network: layer " + std::to_string(l) + " bias length mismatch");
            prev = ly.weights.rows;
        }
        if (!output_bound_.empty() &&
            static_cast<int>(output_bound_.size()) != layers_.back().weights.rows)
            throw std::invalid_argument("Network: output_bound length mismatch");
    }

    void build_eval_cache() {
        csr_.resize(layers_.size());
        nonzeros_ = 0;
        for (std::size_t l = 0; l < layers_.size(); ++l) {
            const Matrix& w = layers_[l].weights;
            CsrLayer& m = csr_[l];
            m.row_ptr.assign(static_cast<std::size_t>(w.rows) + 1, 0);
            for (int i = 0; i < w.rows; ++i) {
                for (int j = 0; j < w.cols; ++j) {
                    const double v = w.at(i, j);
                    if (v != 0.0) {
                        m.col.push_back(j);
                        m.val.push_back(v);
                    }
                }
                m.row_ptr[static_cast<std::size_t>(i) + 1] = static_cast<std::int64_t>(m.col.size());
            }
            nonzeros_ += static_cast<std::int64_t>(m.col.size());
            for (double b : layers_[l].bias)
                if (b != 0.0) ++nonzeros_;
        }
    }

    int input_dim_;
    std::vector<Layer> layers_;
    std::vector<double> output_bound_;
    std::vector<CsrLayer> csr_;
    std::int64_t nonzeros_ = 0;
};

inline ComplexityReport complexity(const Network& net) {
    ComplexityReport rep;
    rep.hidden_layers = net.hidden_layer_count();
    rep.max_width = net.input_dim();
    for (int l = 0; l + 1 < net.layer_count(); ++l)
        rep.max_width = std::max(rep.max_width, net.layers()[static_cast<std::size_t>(l)].weights.rows);
    rep.nonzero_weights = net.nonzero_weights();
    return rep;
}

}  // namespace requforge
