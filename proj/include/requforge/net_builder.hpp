#pragma once

// Layer-by-layer assembly of ReQU nets. The builder tracks a "frontier"
// (outputs of the last committed hidden layer, or the raw input), lets the
// caller schedule neurons as affine expressions over that frontier, and
// materializes each committed layer as a dense Layer. Affine bookkeeping
// (sums, scalings, constants) is free: it folds into the next layer's rows
// or into the final affine layer.

#include <cassert>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "requforge/requ.hpp"

namespace requforge::detail {

struct LinTerm {
    int col;
    double coeff;
};

// Affine function of a builder frontier at one generation.
struct Expr {
    int gen = 0;
    std::vector<LinTerm> terms;
    double constant = 0.0;
};

inline Expr operator*(const Expr& e, double a) {
    Expr r = e;
    for (auto& t : r.terms) t.coeff *= a;
    r.constant *= a;
    return r;
}

inline Expr operator-(const Expr& e) { return e * -1.0; }

inline Expr operator+(const Expr& a, const Expr& b) {
    assert(a.gen == b.gen || a.terms.empty() || b.terms.empty());
    Expr r;
    r.gen = a.terms.empty() ? b.gen : a.gen;
    r.terms = a.terms;
    r.terms.insert(r.terms.end(), b.terms.begin(), b.terms.end());
    r.constant = a.constant + b.constant;
    return r;
}

inline Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

inline Expr operator+(const Expr& e, double c) {
    Expr r = e;
    r.constant += c;
    return r;
}

inline Expr operator-(const Expr& e, double c) { return e + (-c); }

class NetBuilder {
public:
    explicit NetBuilder(int input_dim) : input_dim_(input_dim), frontier_(input_dim) {
        if (input_dim <= 0) throw std::invalid_argument("NetBuilder: input_dim must be positive");
    }

    int gen() const { return gen_; }
    int frontier_size() const { return frontier_; }
    int pending_width() const { return static_cast<int>(pending_.size()); }

    Expr in(int i) const {
        assert(gen_ == 0 && i >= 0 && i < input_dim_);
        return Expr{0, {{i, 1.0}}, 0.0};
    }

    Expr lift(int col) const {
        assert(col >= 0 && col < frontier_);
        return Expr{gen_, {{col, 1.0}}, 0.0};
    }

    static Expr constant(double c) { return Expr{0, {}, c}; }

    /// Schedules a requ neuron for the next layer; returns its frontier column.
    int neuron(const Expr& e) {
        assert(e.gen == gen_ || e.terms.empty());
        pending_.push_back(e);
        return static_cast<int>(pending_.size()) - 1;
    }

    void commit_layer() {
        if (pending_.empty()) throw std::invalid_argument("NetBuilder: empty hidden layer");
        layers_.push_back(materialize(pending_));
        frontier_ = static_cast<int>(pending_.size());
        pending_.clear();
        ++gen_;
    }

    // --- handles: scheduled in one layer, resolved after commit_layer() ---

    // identity stage (requ(v+s) - requ(-v+s)) / (4s); exact for |v| <= s
    struct Carry {
        int a = -1, b = -1;
        int gen = -1;
        double s = 0.0;
        Expr val(const NetBuilder& nb) const {
            assert(nb.gen_ == gen + 1);
            const double c = 1.0 / (4.0 * s);
            return Expr{nb.gen_, {{a, c}, {b, -c}}, 0.0};
        }
    };

    Carry carry(const Expr& v, double s) {
        assert(s > 0.0);
        Carry h;
        h.gen = gen_;
        h.s = s;
        h.a = neuron(v + s);
        h.b = neuron(-v + s);
        return h;
    }

    // exact product of two values: 4 neurons, no domain restriction
    struct Prod {
        int p = -1, q = -1, r = -1, t = -1;
        int gen = -1;
        Expr val(const NetBuilder& nb) const {
            assert(nb.gen_ == gen + 1);
            return Expr{nb.gen_, {{p, 0.25}, {q, 0.25}, {r, -0.25}, {t, -0.25}}, 0.0};
        }
    };

    Prod mul(const Expr& u, const Expr& v) {
        Prod h;
        h.gen = gen_;
        h.p = neuron(u + v);
        h.q = neuron(-u - v);
        h.r = neuron(-u + v);
        h.t = neuron(u - v);
        return h;
    }

    // requ(v) + requ(-v) = v^2, exact for all reals
    struct Square {
        int a = -1, b = -1;
        int gen = -1;
        Expr val(const NetBuilder& nb) const {
            assert(nb.gen_ == gen + 1);
            return Expr{nb.gen_, {{a, 1.0}, {b, 1.0}}, 0.0};
        }
    };

    Square square(const Expr& v) {
        Square h;
        h.gen = gen_;
        h.a = neuron(v);
        h.b = neuron(-v);
        return h;
    }

    // single requ neuron; requ(v) = v^2 when v >= 0
    struct Requ {
        int a = -1;
        int gen = -1;
        Expr val(const NetBuilder& nb) const {
            assert(nb.gen_ == gen + 1);
            return Expr{nb.gen_, {{a, 1.0}}, 0.0};
        }
    };

    Requ unit(const Expr& v) {
        Requ h;
        h.gen = gen_;
        h.a = neuron(v);
        return h;
    }

    /// Appends the final affine layer computing `outputs` and returns the net.
    Network finish(const std::vector<Expr>& outputs, std::vector<double> output_bound = {}) {
        if (!pending_.empty()) throw std::invalid_argument("NetBuilder: uncommitted neurons at finish");
        layers_.push_back(materialize(outputs));
        return Network(input_dim_, std::move(layers_), std::move(output_bound));
    }

private:
    Layer materialize(const std::vector<Expr>& rows) const {
        Layer layer;
        layer.weights = Matrix(static_cast<int>(rows.size()), frontier_);
        layer.bias.resize(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            assert(rows[i].gen == gen_ || rows[i].terms.empty());
            for (const LinTerm& t : rows[i].terms)
                layer.weights.at(static_cast<int>(i), t.col) += t.coeff;
            layer.bias[i] = rows[i].constant;
        }
        return layer;
    }

    int input_dim_;
    int gen_ = 0;
    int frontier_;
    std::vector<Expr> pending_;
    std::vector<Layer> layers_;
};

}  // namespace requforge::detail
