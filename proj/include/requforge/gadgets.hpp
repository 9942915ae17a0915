#pragma once

// Exact ReQU building blocks: two-input product, d-fold product trees,
// monomials via repeated squaring, polynomial combinations, half-open box
// indicators, gated values, and an iterative square-root net.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "requforge/multiindex.hpp"
#include "requforge/net_builder.hpp"
#include "requforge/requ.hpp"

namespace requforge {

inline int floor_log2(int n) {
    if (n <= 0) throw std::invalid_argument("floor_log2: argument must be positive");
    int r = 0;
    while (n > 1) {
        n >>= 1;
        ++r;
    }
    return r;
}

inline int ceil_log2(int n) {
    if (n <= 0) throw std::invalid_argument("ceil_log2: argument must be positive");
    int r = floor_log2(n);
    return (1 << r) == n ? r : r + 1;
}

/// Exact product of two reals, one hidden layer of 4 neurons:
/// (requ(x+y) + requ(-x-y) - requ(-x+y) - requ(x-y)) / 4 = x*y for all x, y.
inline Network product2() {
    detail::NetBuilder b(2);
    auto h = b.mul(b.in(0), b.in(1));
    b.commit_layer();
    return b.finish({h.val(b)});
}

/// Exact product of all d inputs via a binary tree of two-input products;
/// odd leftovers ride through a product with the constant 1 (also exact).
/// ceil(log2(d)) hidden layers, width at most 4d.
inline Network product_d(int d) {
    if (d < 1) throw std::invalid_argument("product_d: d must be at least 1");
    detail::NetBuilder b(d);
    std::vector<detail::Expr> items;
    items.reserve(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) items.push_back(b.in(k));
    while (items.size() > 1) {
        std::vector<detail::NetBuilder::Prod> handles;
        for (std::size_t i = 0; i + 1 < items.size(); i += 2)
            handles.push_back(b.mul(items[i], items[i + 1]));
        if (items.size() % 2 == 1) handles.push_back(b.mul(items.back(), detail::NetBuilder::constant(1.0)));
        b.commit_layer();
        items.clear();
        for (const auto& h : handles) items.push_back(h.val(b));
    }
    return b.finish({items[0]});
}

namespace detail {

// Lockstep assembly of y * prod_k x_k^{r_k}: a fixed number of squaring
// layers (powers x^(2^t) by repeated squaring, everything else carried by
// identity stages sized to known bounds), then a fixed number of pairwise
// product layers. Several plans can share one builder, advancing together.
class PowerProductPlan {
public:
    PowerProductPlan(std::vector<Expr> xs, std::vector<double> x_bounds, Expr y, double y_bound,
                     std::vector<int> exps)
        : exps_(std::move(exps)) {
        slots_.push_back(Slot{y, y_bound, -1, 0});
        for (std::size_t j = 0; j < exps_.size(); ++j) {
            if (exps_[j] < 0) throw std::invalid_argument("PowerProductPlan: negative exponent");
            if (exps_[j] >= 1)
                slots_.push_back(Slot{xs[j], x_bounds[j], static_cast<int>(j), 1});
        }
    }

    static int squaring_layers(const std::vector<int>& exps) {
        int t = 0;
        for (int r : exps)
            if (r >= 1) t = std::max(t, floor_log2(r));
        return t;
    }

    static int product_layers(const std::vector<int>& exps) {
        int factors = 1;
        for (int r : exps) {
            int v = r;
            while (v > 0) {
                factors += v & 1;
                v >>= 1;
            }
        }
        return factors > 1 ? ceil_log2(factors) : 0;
    }

    // One squaring layer: the top power of each chain below its final power
    // gets squared; set-bit powers and the gate are carried.
    void schedule_squaring(NetBuilder& b, int layer_index) {
        pending_.clear();
        for (Slot& s : slots_) {
            const bool is_top = s.chain >= 0 && s.power == top_power(s.chain, layer_index);
            if (is_top && s.power < final_power(s.chain)) {
                Pending p;
                p.kind = s.power == 1 ? Pending::kSquare : Pending::kUnit;
                if (p.kind == Pending::kSquare)
                    p.square = b.square(s.expr);
                else
                    p.unit = b.unit(s.expr);
                p.slot = Slot{{}, s.bound * s.bound, s.chain, 2 * s.power};
                pending_.push_back(p);
                if (needed(s.chain, s.power)) pending_.push_back(make_carry(b, s));
            } else {
                pending_.push_back(make_carry(b, s));
            }
        }
    }

    // One product layer: adjacent pairs multiply, an odd slot is carried.
    void schedule_product(NetBuilder& b) {
        pending_.clear();
        for (std::size_t i = 0; i + 1 < slots_.size(); i += 2) {
            Pending p;
            p.kind = Pending::kProd;
            p.prod = b.mul(slots_[i].expr, slots_[i + 1].expr);
            p.slot = Slot{{}, slots_[i].bound * slots_[i + 1].bound, -1, 0};
            pending_.push_back(p);
        }
        if (slots_.size() % 2 == 1) pending_.push_back(make_carry(b, slots_.back()));
    }

    void resolve(NetBuilder& b) {
        slots_.clear();
        for (Pending& p : pending_) {
            switch (p.kind) {
                case Pending::kCarry: p.slot.expr = p.carry.val(b); break;
                case Pending::kSquare: p.slot.expr = p.square.val(b); break;
                case Pending::kUnit: p.slot.expr = p.unit.val(b); break;
                case Pending::kProd: p.slot.expr = p.prod.val(b); break;
            }
            slots_.push_back(p.slot);
        }
        pending_.clear();
    }

    const Expr& result() const { return slots_[0].expr; }
    double result_bound() const { return slots_[0].bound; }

private:
    struct Slot {
        Expr expr;
        double bound = 0.0;
        int chain = -1;  // x-coordinate index, or -1 for gate/product values
        int power = 0;
    };

    struct Pending {
        enum Kind { kCarry, kSquare, kUnit, kProd } kind = kCarry;
        NetBuilder::Carry carry;
        NetBuilder::Square square;
        NetBuilder::Requ unit;
        NetBuilder::Prod prod;
        Slot slot;
    };

    Pending make_carry(NetBuilder& b, const Slot& s) {
        Pending p;
        p.kind = Pending::kCarry;
        p.carry = b.carry(s.expr, s.bound);
        p.slot = s;
        return p;
    }

    int final_power(int chain) const { return 1 << floor_log2(exps_[static_cast<std::size_t>(chain)]); }
    int top_power(int chain, int layer_index) const {
        return std::min(final_power(chain), 1 << layer_index);
    }
    bool needed(int chain, int power) const {
        return (exps_[static_cast<std::size_t>(chain)] & power) != 0;
    }

    std::vector<int> exps_;
    std::vector<Slot> slots_;
    std::vector<Pending> pending_;
};

// Runs a set of plans over ta squaring layers and tb product layers.
inline void run_plans(NetBuilder& b, std::vector<PowerProductPlan>& plans, int ta, int tb) {
    for (int t = 0; t < ta; ++t) {
        for (auto& p : plans) p.schedule_squaring(b, t);
        b.commit_layer();
        for (auto& p : plans) p.resolve(b);
    }
    for (int t = 0; t < tb; ++t) {
        for (auto& p : plans) p.schedule_product(b);
        b.commit_layer();
        for (auto& p : plans) p.resolve(b);
    }
}

}  // namespace detail

/// Net with inputs (x_1..x_d, y) computing y * prod_k x_k^{exponents_k},
/// exact on [-s,s]^d x [-s,s]. All-zero exponents degenerate to returning y.
inline Network monomial_net(const std::vector<int>& exponents, double s) {
    const int d = static_cast<int>(exponents.size());
    if (d < 1) throw std::invalid_argument("monomial_net: empty exponent vector");
    if (!(s > 0.0)) throw std::invalid_argument("monomial_net: s must be positive");
    for (int r : exponents)
        if (r < 0) throw std::invalid_argument("monomial_net: negative exponent");
    detail::NetBuilder b(d + 1);
    std::vector<detail::Expr> xs;
    std::vector<double> xb(static_cast<std::size_t>(d), s);
    for (int k = 0; k < d; ++k) xs.push_back(b.in(k));
    std::vector<detail::PowerProductPlan> plans;
    plans.emplace_back(xs, xb, b.in(d), s, exponents);
    detail::run_plans(b, plans, detail::PowerProductPlan::squaring_layers(exponents),
                      detail::PowerProductPlan::product_layers(exponents));
    const double bound = plans[0].result_bound();
    return b.finish({plans[0].result()}, {bound});
}

/// Net with inputs (x_1..x_d, y_1..y_C), C = binomial(d+N, d), computing
/// sum_i w_i * y_i * m_i(x) exactly on [-s,s]^(d+C). Monomials m_i are
/// enumerated in graded-lex order of the exponent multi-index (see
/// multiindex.hpp); the weight vector indexes into that order.
inline Network polynomial_net(int d, int N, const std::vector<double>& weights, double s) {
    if (d < 1 || N < 1) throw std::invalid_argument("polynomial_net: need d >= 1 and N >= 1");
    if (!(s > 0.0)) throw std::invalid_argument("polynomial_net: s must be positive");
    const auto monomials = multi_indices_upto(d, N);
    if (weights.size() != monomials.size())
        throw std::invalid_argument("polynomial_net: expected " + std::to_string(monomials.size()) +
                                    " weights, got " + std::to_string(weights.size()));
    const int C = static_cast<int>(monomials.size());
    detail::NetBuilder b(d + C);
    std::vector<detail::Expr> xs;
    std::vector<double> xb(static_cast<std::size_t>(d), s);
    for (int k = 0; k < d; ++k) xs.push_back(b.in(k));
    int ta = 0, tb = 0;
    for (const auto& m : monomials) {
        ta = std::max(ta, detail::PowerProductPlan::squaring_layers(m));
        tb = std::max(tb, detail::PowerProductPlan::product_layers(m));
    }
    std::vector<detail::PowerProductPlan> plans;
    plans.reserve(monomials.size());
    for (int i = 0; i < C; ++i) plans.emplace_back(xs, xb, b.in(d + i), s, monomials[static_cast<std::size_t>(i)]);
    detail::run_plans(b, plans, ta, tb);
    detail::Expr out = detail::NetBuilder::constant(0.0);
    out.gen = b.gen();
    double bound = 0.0;
    for (int i = 0; i < C; ++i) {
        out = out + plans[static_cast<std::size_t>(i)].result() * weights[static_cast<std::size_t>(i)];
        bound += std::abs(weights[static_cast<std::size_t>(i)]) * plans[static_cast<std::size_t>(i)].result_bound();
    }
    return b.finish({out}, {bound});
}

/// Indicator of the half-open box [a, b): two hidden layers,
/// requ(1 - s^2 * sum_i(requ(-x_i + a_i + 1/s) + requ(x_i - b_i + 1/s))).
/// Equals the indicator whenever every coordinate avoids the two width-1/s
/// fringe strips, and stays within [0, 1] everywhere.
inline Network indicator_net(const std::vector<double>& a, const std::vector<double>& b_hi, double s) {
    const int d = static_cast<int>(a.size());
    if (d < 1 || b_hi.size() != a.size())
        throw std::invalid_argument("indicator_net: bound vectors must share a positive length");
    if (!(s > 0.0)) throw std::invalid_argument("indicator_net: s must be positive");
    for (int i = 0; i < d; ++i)
        if (!(b_hi[static_cast<std::size_t>(i)] - a[static_cast<std::size_t>(i)] >= 2.0 / s))
            throw std::invalid_argument("indicator_net: box too narrow, need b - a >= 2/s in every coordinate");
    const double inv_s = 1.0 / s;
    detail::NetBuilder nb(d);
    std::vector<int> cols;
    for (int i = 0; i < d; ++i) {
        cols.push_back(nb.neuron(-nb.in(i) + a[static_cast<std::size_t>(i)] + inv_s));
        cols.push_back(nb.neuron(nb.in(i) - b_hi[static_cast<std::size_t>(i)] + inv_s));
    }
    nb.commit_layer();
    detail::Expr penalty = detail::NetBuilder::constant(0.0);
    penalty.gen = nb.gen();
    for (int c : cols) penalty = penalty + nb.lift(c) * (s * s);
    const int h = nb.neuron(detail::NetBuilder::constant(1.0) - penalty);
    nb.commit_layer();
    return nb.finish({nb.lift(h)}, {1.0});
}

/// Gated value (x, y) -> y * 1_[a,b)(x): the indicator net with the gate y
/// carried through two identity stages, then an exact product. Requires
/// |y| <= s; exact where the indicator is exact.
inline Network gated_value_net(const std::vector<double>& a, const std::vector<double>& b_hi, double s) {
    const int d = static_cast<int>(a.size());
    if (d < 1 || b_hi.size() != a.size())
        throw std::invalid_argument("gated_value_net: bound vectors must share a positive length");
    if (!(s > 0.0)) throw std::invalid_argument("gated_value_net: s must be positive");
    for (int i = 0; i < d; ++i)
        if (!(b_hi[static_cast<std::size_t>(i)] - a[static_cast<std::size_t>(i)] >= 2.0 / s))
            throw std::invalid_argument("gated_value_net: box too narrow, need b - a >= 2/s in every coordinate");
    const double inv_s = 1.0 / s;
    detail::NetBuilder nb(d + 1);
    std::vector<int> cols;
    for (int i = 0; i < d; ++i) {
        cols.push_back(nb.neuron(-nb.in(i) + a[static_cast<std::size_t>(i)] + inv_s));
        cols.push_back(nb.neuron(nb.in(i) - b_hi[static_cast<std::size_t>(i)] + inv_s));
    }
    auto y1 = nb.carry(nb.in(d), s);
    nb.commit_layer();
    detail::Expr penalty = detail::NetBuilder::constant(0.0);
    penalty.gen = nb.gen();
    for (int c : cols) penalty = penalty + nb.lift(c) * (s * s);
    const int h = nb.neuron(detail::NetBuilder::constant(1.0) - penalty);
    auto y2 = nb.carry(y1.val(nb), s);
    nb.commit_layer();
    auto prod = nb.mul(y2.val(nb), nb.lift(h));
    nb.commit_layer();
    return nb.finish({prod.val(nb)}, {s});
}

/// Iteration count for the square-root net: smallest n with
/// 2^n >= t * (ln(1/2) + 3 ln(1/eps)) / eps^2.
inline int sqrt_iteration_count(double t, double eps) {
    const double target = t * (std::log(0.5) + 3.0 * std::log(1.0 / eps)) / (eps * eps);
    if (!(target > 1.0)) return 0;
    return static_cast<int>(std::ceil(std::log2(target)));
}

/// Square-root net with an explicit iteration count: realizes n steps of
///   s_{k+1} = s_k * (1 - c_k / (2t)),  c_{k+1} = c_k^2 * (c_k - 3t) / (4 t^2)
/// from the shifted start s_0 = (x + eps^2)/sqrt(t), c_0 = x + eps^2 - t.
/// The updates preserve x (t + c_k) = t s_k^2 with c_k -> 0, so s_k converges
/// to sqrt(x + eps^2) from below. Two hidden layers per iteration (squares
/// plus carries, then products).
inline Network sqrt_net_iterations(double t, double eps, int n) {
    if (!(t >= 1.0)) throw std::invalid_argument("sqrt_net: t must be at least 1");
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("sqrt_net: eps must lie in (0, 1)");
    if (n < 0) throw std::invalid_argument("sqrt_net: negative iteration count");
    const double c_bound = t;
    const double s_bound = std::sqrt(t) + 1.0;
    detail::NetBuilder b(1);
    detail::Expr c = b.in(0) + (eps * eps - t);
    detail::Expr s = b.in(0) * (1.0 / std::sqrt(t)) + (eps * eps) / std::sqrt(t);
    for (int k = 0; k < n; ++k) {
        auto sq = b.square(c);
        auto cc = b.carry(c, c_bound);
        auto sc = b.carry(s, s_bound);
        b.commit_layer();
        detail::Expr c2 = sq.val(b);
        c = cc.val(b);
        s = sc.val(b);
        auto pc = b.mul(c2, c * (1.0 / (4.0 * t * t)) - 3.0 / (4.0 * t));
        auto ps = b.mul(s, detail::NetBuilder::constant(1.0) - c * (1.0 / (2.0 * t)));
        b.commit_layer();
        c = pc.val(b);
        s = ps.val(b);
    }
    return b.finish({s}, {s_bound});
}

/// Square-root approximator: sup_{x in [0,t]} |sqrt(x) - net(x)| <= eps,
/// with the iteration count from sqrt_iteration_count.
inline Network sqrt_net(double t, double eps) {
    return sqrt_net_iterations(t, eps, sqrt_iteration_count(t, eps));
}

}  // namespace requforge
