#pragma once

// Full network constructions: the interior approximator (corner-selected
// piecewise Taylor evaluation), the per-cell window (bump) net, the
// boundary detector, the windowed approximator, and the final assembly
// summing 2^d shifted windowed approximators.

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "requforge/calculus.hpp"
#include "requforge/gadgets.hpp"
#include "requforge/multiindex.hpp"
#include "requforge/net_builder.hpp"
#include "requforge/partition.hpp"
#include "requforge/requ.hpp"
#include "requforge/taylor.hpp"

namespace requforge {

// ---- closed-form depth/width budgets -------------------------------------

inline int interior_budget_hidden_layers(int d, double r) {
    const int q = static_cast<int>(std::floor(r));
    const int lq = floor_log2(q);
    return lq + 2 * floor_log2(d + 1 + d * lq) + 5;
}

inline std::int64_t interior_budget_max_width(int d, double r, int M) {
    const int q = static_cast<int>(std::floor(r));
    const int lq = floor_log2(q);
    const std::int64_t B = binomial(d + q, d);
    std::int64_t Md = 1;
    for (int i = 0; i < d; ++i) Md *= M;
    const std::int64_t selector = (1 + B) * Md * std::max<std::int64_t>(4, 2 * d + 1) + 2;
    const std::int64_t poly = 2 * B * (d + 1 + d * lq);
    return std::max(selector, poly);
}

inline int predicted_hidden_layers(int d, double r) {
    return interior_budget_hidden_layers(d, r) + 3;
}

inline std::int64_t predicted_max_width(int d, double r, int M) {
    std::int64_t Md = 1;
    for (int i = 0; i < d; ++i) Md *= M;
    const std::int64_t detector = Md * (2 * d + 1) + 2 * d + 2 * d * Md;
    const std::int64_t window = 2 + Md * std::max<std::int64_t>(4, 2 * d + 1);
    const std::int64_t per_shift = interior_budget_max_width(d, r, M) + 2 * detector + window;
    return (std::int64_t{1} << d) * per_shift;
}

// ---- shared corner-selection machinery ------------------------------------

namespace detail {

struct CoarseBank {
    std::vector<Expr> x;   // identity-carried input, current generation
    std::vector<Expr> h;   // one indicator value per coarse cube
};

// Two hidden layers: stage one of every coarse-cube indicator plus input
// carries, then stage two plus input carries.
inline CoarseBank build_coarse_bank(NetBuilder& b, const PartitionPair& pp, double fringe) {
    const int d = pp.d();
    const std::int64_t Md = pp.coarse_count();
    const double s2 = 1.0 / (fringe * fringe);

    std::vector<NetBuilder::Carry> xc;
    for (int k = 0; k < d; ++k) xc.push_back(b.carry(b.in(k), 1.0));
    std::vector<std::vector<int>> stage1(static_cast<std::size_t>(Md));
    for (std::int64_t j = 0; j < Md; ++j) {
        const Cube cube = pp.coarse_cube(j);
        for (int k = 0; k < d; ++k) {
            stage1[static_cast<std::size_t>(j)].push_back(
                b.neuron(-b.in(k) + cube.bottom_left[static_cast<std::size_t>(k)] + fringe));
            stage1[static_cast<std::size_t>(j)].push_back(
                b.neuron(b.in(k) - (cube.bottom_left[static_cast<std::size_t>(k)] + cube.side) + fringe));
        }
    }
    b.commit_layer();

    std::vector<Expr> x1;
    for (auto& c : xc) x1.push_back(c.val(b));
    std::vector<NetBuilder::Carry> xc2;
    for (int k = 0; k < d; ++k) xc2.push_back(b.carry(x1[static_cast<std::size_t>(k)], 1.0));
    std::vector<int> stage2;
    for (std::int64_t j = 0; j < Md; ++j) {
        Expr penalty = NetBuilder::constant(0.0);
        penalty.gen = b.gen();
        for (int col : stage1[static_cast<std::size_t>(j)]) penalty = penalty + b.lift(col) * s2;
        stage2.push_back(b.neuron(NetBuilder::constant(1.0) - penalty));
    }
    b.commit_layer();

    CoarseBank bank;
    for (auto& c : xc2) bank.x.push_back(c.val(b));
    for (int col : stage2) bank.h.push_back(b.lift(col));
    return bank;
}

struct GateSpec {
    Expr value;
    double bound;
};

// Three hidden layers: for each fine offset i, a membership indicator of the
// box [phi1 + v_i, phi1 + v_i + fine_side) shared by all of i's gates, the
// gates carried alongside, then exact products gate * indicator. Returns one
// sum-over-offsets expression per gate slot. `extra_carries` values ride
// through the three layers unchanged and are returned afterwards.
inline std::pair<std::vector<Expr>, std::vector<Expr>> build_fine_selection(
    NetBuilder& b, const PartitionPair& pp, const std::vector<Expr>& x,
    const std::vector<Expr>& phi1, const std::vector<std::vector<GateSpec>>& gates_per_offset,
    double fringe, const std::vector<GateSpec>& extra_carries) {
    const int d = pp.d();
    const std::int64_t Md = pp.offset_count();
    const double s2 = 1.0 / (fringe * fringe);
    const std::size_t slots = gates_per_offset.empty() ? 0 : gates_per_offset[0].size();

    // layer 1: indicator stage one + first gate carries + extras
    std::vector<std::vector<int>> stage1(static_cast<std::size_t>(Md));
    std::vector<std::vector<NetBuilder::Carry>> g1(static_cast<std::size_t>(Md));
    for (std::int64_t i = 0; i < Md; ++i) {
        const std::vector<double> v = pp.offset(i);
        for (int k = 0; k < d; ++k) {
            const Expr lo = phi1[static_cast<std::size_t>(k)] + v[static_cast<std::size_t>(k)];
            stage1[static_cast<std::size_t>(i)].push_back(b.neuron(-x[static_cast<std::size_t>(k)] + lo + fringe));
            stage1[static_cast<std::size_t>(i)].push_back(
                b.neuron(x[static_cast<std::size_t>(k)] - lo - pp.fine_side() + fringe));
        }
        for (const GateSpec& g : gates_per_offset[static_cast<std::size_t>(i)])
            g1[static_cast<std::size_t>(i)].push_back(b.carry(g.value, g.bound));
    }
    std::vector<NetBuilder::Carry> e1;
    for (const GateSpec& g : extra_carries) e1.push_back(b.carry(g.value, g.bound));
    b.commit_layer();

    // layer 2: indicator stage two + second gate carries + extras
    std::vector<int> ind(static_cast<std::size_t>(Md));
    std::vector<std::vector<NetBuilder::Carry>> g2(static_cast<std::size_t>(Md));
    for (std::int64_t i = 0; i < Md; ++i) {
        Expr penalty = NetBuilder::constant(0.0);
        penalty.gen = b.gen();
        for (int col : stage1[static_cast<std::size_t>(i)]) penalty = penalty + b.lift(col) * s2;
        ind[static_cast<std::size_t>(i)] = b.neuron(NetBuilder::constant(1.0) - penalty);
        for (std::size_t g = 0; g < slots; ++g)
            g2[static_cast<std::size_t>(i)].push_back(
                b.carry(g1[static_cast<std::size_t>(i)][g].val(b),
                        gates_per_offset[static_cast<std::size_t>(i)][g].bound));
    }
    std::vector<NetBuilder::Carry> e2;
    for (std::size_t g = 0; g < extra_carries.size(); ++g)
        e2.push_back(b.carry(e1[g].val(b), extra_carries[g].bound));
    b.commit_layer();

    // layer 3: gate * indicator products + extras
    std::vector<std::vector<NetBuilder::Prod>> prods(static_cast<std::size_t>(Md));
    for (std::int64_t i = 0; i < Md; ++i)
        for (std::size_t g = 0; g < slots; ++g)
            prods[static_cast<std::size_t>(i)].push_back(
                b.mul(g2[static_cast<std::size_t>(i)][g].val(b), b.lift(ind[static_cast<std::size_t>(i)])));
    std::vector<NetBuilder::Carry> e3;
    for (std::size_t g = 0; g < extra_carries.size(); ++g)
        e3.push_back(b.carry(e2[g].val(b), extra_carries[g].bound));
    b.commit_layer();

    std::vector<Expr> selected(slots);
    for (std::size_t g = 0; g < slots; ++g) {
        Expr sum = NetBuilder::constant(0.0);
        sum.gen = b.gen();
        for (std::int64_t i = 0; i < Md; ++i)
            sum = sum + prods[static_cast<std::size_t>(i)][g].val(b);
        selected[g] = sum;
    }
    std::vector<Expr> extras;
    for (std::size_t g = 0; g < extra_carries.size(); ++g) extras.push_back(e3[g].val(b));
    return {std::move(selected), std::move(extras)};
}

}  // namespace detail

// ---- interior approximator -------------------------------------------------

/// Net agreeing with f to within spec.eps on every fine cube shrunk by
/// 1/M^(2r+2), and bounded by R e^(2d) on all of [-1,1)^d. Built from the
/// coarse-corner bank, the per-offset gated selection of fine corner and
/// derivative values, and an exact polynomial stage combining them.
inline Network interior_approximator(const HolderFunction& f, const PartitionPair& pp,
                                     const ApproximationSpec& spec) {
    using detail::Expr;
    using detail::GateSpec;
    using detail::NetBuilder;

    if (f.d != pp.d()) throw std::invalid_argument("interior_approximator: dimension mismatch");
    if (spec.M != pp.M()) throw std::invalid_argument("interior_approximator: spec.M disagrees with the partition");
    if (!(f.r >= 1.0)) throw std::invalid_argument("interior_approximator: r must be at least 1");
    if (!(static_cast<double>(spec.M) > grid_parameter_bound(spec.eps, f.r, f.R, f.d, spec.c)))
        throw std::invalid_argument("interior_approximator: M violates the grid-size hypothesis");

    const int d = pp.d();
    const std::int64_t Md = pp.coarse_count();
    const double fringe = std::pow(static_cast<double>(pp.M()), -(2.0 * f.r + 2.0));
    const double tau = std::max(2.0, f.R);
    const int q = f.degree();
    const auto alphas = multi_indices_upto(d, q);
    const std::int64_t C = static_cast<std::int64_t>(alphas.size());

    // derivative table: D^alpha f at every fine corner, addressed (alpha, offset i, coarse j)
    std::vector<std::vector<std::vector<double>>> deriv_tab(
        alphas.size(), std::vector<std::vector<double>>(static_cast<std::size_t>(Md),
                                                        std::vector<double>(static_cast<std::size_t>(Md))));
    {
        std::vector<double> corner(static_cast<std::size_t>(d));
        for (std::int64_t j = 0; j < Md; ++j) {
            const Cube cube = pp.coarse_cube(j);
            for (std::int64_t i = 0; i < Md; ++i) {
                const std::vector<double> v = pp.offset(i);
                for (int k = 0; k < d; ++k)
                    corner[static_cast<std::size_t>(k)] = cube.bottom_left[static_cast<std::size_t>(k)] + v[static_cast<std::size_t>(k)];
                for (std::size_t a = 0; a < alphas.size(); ++a)
                    deriv_tab[a][static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                        f.deriv(alphas[a], corner);
            }
        }
    }

    NetBuilder b(d);
    detail::CoarseBank bank = detail::build_coarse_bank(b, pp, fringe);

    std::vector<Expr> phi1(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) {
        Expr e = NetBuilder::constant(0.0);
        e.gen = b.gen();
        for (std::int64_t j = 0; j < Md; ++j)
            e = e + bank.h[static_cast<std::size_t>(j)] * pp.coarse_cube(j).bottom_left[static_cast<std::size_t>(k)];
        phi1[static_cast<std::size_t>(k)] = e;
    }

    // gates per offset: the shifted corner coordinates, then the derivative selectors
    std::vector<std::vector<GateSpec>> gates(static_cast<std::size_t>(Md));
    for (std::int64_t i = 0; i < Md; ++i) {
        const std::vector<double> v = pp.offset(i);
        for (int k = 0; k < d; ++k)
            gates[static_cast<std::size_t>(i)].push_back(
                GateSpec{phi1[static_cast<std::size_t>(k)] + v[static_cast<std::size_t>(k)], 1.0});
        for (std::int64_t a = 0; a < C; ++a) {
            Expr e = NetBuilder::constant(0.0);
            e.gen = b.gen();
            for (std::int64_t j = 0; j < Md; ++j)
                e = e + bank.h[static_cast<std::size_t>(j)] *
                            deriv_tab[static_cast<std::size_t>(a)][static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            gates[static_cast<std::size_t>(i)].push_back(GateSpec{e, tau});
        }
    }
    std::vector<GateSpec> carry_x;
    for (int k = 0; k < d; ++k) carry_x.push_back(GateSpec{bank.x[static_cast<std::size_t>(k)], 1.0});

    auto [selected, xs] = detail::build_fine_selection(b, pp, bank.x, phi1, gates, fringe, carry_x);

    // polynomial stage on z = x - (selected fine corner) and the selected derivatives
    std::vector<Expr> z(static_cast<std::size_t>(d));
    std::vector<double> z_bound(static_cast<std::size_t>(d), 2.0);
    for (int k = 0; k < d; ++k) z[static_cast<std::size_t>(k)] = xs[static_cast<std::size_t>(k)] - selected[static_cast<std::size_t>(k)];

    int ta = 0, tb = 0;
    for (const auto& a : alphas) {
        ta = std::max(ta, detail::PowerProductPlan::squaring_layers(a));
        tb = std::max(tb, detail::PowerProductPlan::product_layers(a));
    }
    std::vector<detail::PowerProductPlan> plans;
    plans.reserve(alphas.size());
    for (std::size_t a = 0; a < alphas.size(); ++a)
        plans.emplace_back(z, z_bound, selected[static_cast<std::size_t>(d) + a], tau, alphas[a]);
    detail::run_plans(b, plans, ta, tb);

    Expr out = NetBuilder::constant(0.0);
    out.gen = b.gen();
    for (std::size_t a = 0; a < alphas.size(); ++a)
        out = out + plans[a].result() * (1.0 / multi_factorial(alphas[a]));

    const double clip = f.R * std::exp(2.0 * d);
    return b.finish({out}, {clip});
}

// ---- window (bump) net ------------------------------------------------------

// Per-axis window profile G(t) on t = M^2 (x_k - corner_k) in [0, 2):
//   kCentered:      2 requ(t) - 4 requ(t - 1/2) + 4 requ(t - 3/2) - 2 requ(t - 2)
//                   peaks at 1 mid-cell, vanishes on both faces, and shifted
//                   copies at integer offsets sum to 1.
//   kHalfScaleRamp: a half-scale variant rising 0 -> 1 across the cell; kept
//                   for side-by-side comparison, it does not form a partition
//                   of unity.
enum class BumpProfile { kCentered, kHalfScaleRamp };

/// Net computing the product over axes of the window profile evaluated at
/// the offset from the containing fine cube's corner. Corner selection uses
/// a negligible fringe, so values are exact except within a ~1e-9 sliver of
/// the cell faces; outputs stay in [0, 1] everywhere.
inline Network bump_net(const PartitionPair& pp, BumpProfile profile = BumpProfile::kCentered) {
    using detail::Expr;
    using detail::GateSpec;
    using detail::NetBuilder;

    const int d = pp.d();
    const std::int64_t Md = pp.offset_count();
    const double fringe = 1e-9 * pp.fine_side();
    const double m2 = static_cast<double>(pp.M()) * pp.M();

    NetBuilder b(d);
    detail::CoarseBank bank = detail::build_coarse_bank(b, pp, fringe);
    std::vector<Expr> phi1(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) {
        Expr e = NetBuilder::constant(0.0);
        e.gen = b.gen();
        for (std::int64_t j = 0; j < Md; ++j)
            e = e + bank.h[static_cast<std::size_t>(j)] * pp.coarse_cube(j).bottom_left[static_cast<std::size_t>(k)];
        phi1[static_cast<std::size_t>(k)] = e;
    }
    std::vector<std::vector<GateSpec>> gates(static_cast<std::size_t>(Md));
    for (std::int64_t i = 0; i < Md; ++i) {
        const std::vector<double> v = pp.offset(i);
        for (int k = 0; k < d; ++k)
            gates[static_cast<std::size_t>(i)].push_back(
                GateSpec{phi1[static_cast<std::size_t>(k)] + v[static_cast<std::size_t>(k)], 1.0});
    }
    std::vector<GateSpec> carry_x;
    for (int k = 0; k < d; ++k) carry_x.push_back(GateSpec{bank.x[static_cast<std::size_t>(k)], 1.0});
    auto [corner, xs] = detail::build_fine_selection(b, pp, bank.x, phi1, gates, fringe, carry_x);

    // window profile layer: 4 neurons per axis
    std::vector<Expr> factors;
    for (int k = 0; k < d; ++k) {
        Expr t = (xs[static_cast<std::size_t>(k)] - corner[static_cast<std::size_t>(k)]) * m2;
        if (profile == BumpProfile::kHalfScaleRamp) t = t * -0.5;
        std::vector<int> n;
        if (profile == BumpProfile::kCentered) {
            n.push_back(b.neuron(t));
            n.push_back(b.neuron(t - 0.5));
            n.push_back(b.neuron(t - 1.5));
            n.push_back(b.neuron(t - 2.0));
        } else {
            n.push_back(b.neuron(t + 2.0));
            n.push_back(b.neuron(t + 1.5));
            n.push_back(b.neuron(t + 0.5));
            n.push_back(b.neuron(t));
        }
        factors.push_back(Expr{});  // filled after commit
        factors.back().gen = b.gen() + 1;
        factors.back().terms = {{n[0], 2.0}, {n[1], -4.0}, {n[2], 4.0}, {n[3], -2.0}};
    }
    b.commit_layer();

    // product tree over the d axis factors, everything in [0, 1]
    std::vector<Expr> items = factors;
    while (items.size() > 1) {
        std::vector<NetBuilder::Prod> prods;
        std::vector<NetBuilder::Carry> carries;
        for (std::size_t i = 0; i + 1 < items.size(); i += 2) prods.push_back(b.mul(items[i], items[i + 1]));
        if (items.size() % 2 == 1) carries.push_back(b.carry(items.back(), 1.0));
        b.commit_layer();
        items.clear();
        for (const auto& p : prods) items.push_back(p.val(b));
        for (const auto& c : carries) items.push_back(c.val(b));
    }
    return b.finish({items[0]}, {1.0});
}

// ---- boundary detector -------------------------------------------------------

/// Net valued in [0, 1] that flags the fringe shells of the fine partition:
/// it equals 1 on every fine cube's outer shell of width 1/M^(2r+2), equals 0
/// deep inside (beyond twice that), and transitions only within the
/// intermediate shell.
inline Network boundary_detector(const PartitionPair& pp, double r) {
    using detail::Expr;
    using detail::NetBuilder;

    if (!(r >= 1.0)) throw std::invalid_argument("boundary_detector: r must be at least 1");
    const int d = pp.d();
    const std::int64_t Md = pp.coarse_count();
    const double delta = std::pow(static_cast<double>(pp.M()), -(2.0 * r + 2.0));
    const double s2 = 1.0 / (delta * delta);

    NetBuilder b(d);

    // layer 1: stage one of shrunken-coarse indicators (for the coarse-shell
    // term) and of plain coarse indicators (for the corner bank), plus carries
    std::vector<NetBuilder::Carry> xc;
    for (int k = 0; k < d; ++k) xc.push_back(b.carry(b.in(k), 1.0));
    std::vector<std::vector<int>> shr1(static_cast<std::size_t>(Md)), full1(static_cast<std::size_t>(Md));
    for (std::int64_t j = 0; j < Md; ++j) {
        const Cube cube = pp.coarse_cube(j);
        for (int k = 0; k < d; ++k) {
            const double lo = cube.bottom_left[static_cast<std::size_t>(k)];
            const double hi = lo + cube.side;
            shr1[static_cast<std::size_t>(j)].push_back(b.neuron(-b.in(k) + lo + 2.0 * delta));
            shr1[static_cast<std::size_t>(j)].push_back(b.neuron(b.in(k) - hi + 2.0 * delta));
            full1[static_cast<std::size_t>(j)].push_back(b.neuron(-b.in(k) + lo + delta));
            full1[static_cast<std::size_t>(j)].push_back(b.neuron(b.in(k) - hi + delta));
        }
    }
    b.commit_layer();

    // layer 2: both indicator banks' stage two, carries
    std::vector<Expr> x1;
    for (auto& c : xc) x1.push_back(c.val(b));
    std::vector<NetBuilder::Carry> xc2;
    for (int k = 0; k < d; ++k) xc2.push_back(b.carry(x1[static_cast<std::size_t>(k)], 1.0));
    std::vector<int> shr2, full2;
    for (std::int64_t j = 0; j < Md; ++j) {
        Expr ps = NetBuilder::constant(0.0), pf = NetBuilder::constant(0.0);
        ps.gen = pf.gen = b.gen();
        for (int col : shr1[static_cast<std::size_t>(j)]) ps = ps + b.lift(col) * s2;
        for (int col : full1[static_cast<std::size_t>(j)]) pf = pf + b.lift(col) * s2;
        shr2.push_back(b.neuron(NetBuilder::constant(1.0) - ps));
        full2.push_back(b.neuron(NetBuilder::constant(1.0) - pf));
    }
    b.commit_layer();

    Expr coarse_shell = NetBuilder::constant(1.0);  // 1 - sum of shrunken-coarse indicators
    coarse_shell.gen = b.gen();
    for (int col : shr2) coarse_shell = coarse_shell + b.lift(col) * -1.0;
    std::vector<Expr> phi1(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) {
        Expr e = NetBuilder::constant(0.0);
        e.gen = b.gen();
        for (std::int64_t j = 0; j < Md; ++j)
            e = e + b.lift(full2[static_cast<std::size_t>(j)]) * pp.coarse_cube(j).bottom_left[static_cast<std::size_t>(k)];
        phi1[static_cast<std::size_t>(k)] = e;
    }
    std::vector<Expr> x2;
    for (auto& c : xc2) x2.push_back(c.val(b));

    // layers 3-4: shrunken fine-box indicators relative to the selected corner
    std::vector<std::vector<int>> fs1(static_cast<std::size_t>(Md));
    auto c1 = b.carry(coarse_shell, 1.0);
    for (std::int64_t i = 0; i < Md; ++i) {
        const std::vector<double> v = pp.offset(i);
        for (int k = 0; k < d; ++k) {
            const Expr lo = phi1[static_cast<std::size_t>(k)] + v[static_cast<std::size_t>(k)];
            fs1[static_cast<std::size_t>(i)].push_back(b.neuron(-x2[static_cast<std::size_t>(k)] + lo + 2.0 * delta));
            fs1[static_cast<std::size_t>(i)].push_back(
                b.neuron(x2[static_cast<std::size_t>(k)] - lo - pp.fine_side() + 2.0 * delta));
        }
    }
    b.commit_layer();

    auto c2 = b.carry(c1.val(b), 1.0);
    std::vector<int> fs2;
    for (std::int64_t i = 0; i < Md; ++i) {
        Expr p = NetBuilder::constant(0.0);
        p.gen = b.gen();
        for (int col : fs1[static_cast<std::size_t>(i)]) p = p + b.lift(col) * s2;
        fs2.push_back(b.neuron(NetBuilder::constant(1.0) - p));
    }
    b.commit_layer();

    Expr fine_shell = NetBuilder::constant(1.0);
    fine_shell.gen = b.gen();
    for (int col : fs2) fine_shell = fine_shell + b.lift(col) * -1.0;

    // layer 5: detector = 1 - requ(1 - fine_shell - coarse_shell)
    const int gate = b.neuron(NetBuilder::constant(1.0) - fine_shell - c2.val(b));
    b.commit_layer();
    Expr out = NetBuilder::constant(1.0);
    out.gen = b.gen();
    out = out + b.lift(gate) * -1.0;
    return b.finish({out}, {1.0});
}

// ---- windowed approximator ----------------------------------------------------

/// Per-partition approximator of w(x) * f(x): the interior net clipped to its
/// global bound and gated off by the boundary detector, then multiplied by
/// the window net, with depth synchronization between the three branches.
inline Network windowed_approximator(const HolderFunction& f, const PartitionPair& pp,
                                     const ApproximationSpec& spec) {
    using detail::Expr;
    using detail::NetBuilder;

    Network interior = interior_approximator(f, pp, spec);
    Network detector = boundary_detector(pp, f.r);
    Network window = bump_net(pp);

    const double clip = f.R * std::exp(2.0 * f.d);
    const int target = std::max({interior.hidden_layer_count(), detector.hidden_layer_count(),
                                 window.hidden_layer_count()});
    interior = sync_depth(interior, target);  // identity ranges from the recorded bounds
    detector = sync_depth(detector, target);
    window = sync_depth(window, target);
    Network par = parallelize(parallelize(interior, detector), window);

    // post-stage on (psi, e, w):
    //   clipped = (requ(psi - clip*e + clip) - requ(-psi - clip*e + clip)) / (4*clip)
    //   out     = w * ((1 - e) * clipped)
    NetBuilder b(3);
    const Expr psi = b.in(0), e = b.in(1), w = b.in(2);
    const int hi = b.neuron(psi - e * clip + clip);
    const int lo = b.neuron(-psi - e * clip + clip);
    auto ec = b.carry(e, 1.0);
    auto wc = b.carry(w, 1.0);
    b.commit_layer();
    Expr clipped = (b.lift(hi) - b.lift(lo)) * (1.0 / (4.0 * clip));
    auto gated = b.mul(NetBuilder::constant(1.0) - ec.val(b), clipped);
    auto wc2 = b.carry(wc.val(b), 1.0);
    b.commit_layer();
    auto prod = b.mul(wc2.val(b), gated.val(b));
    b.commit_layer();
    Network post = b.finish({prod.val(b)}, {clip});

    return concatenate(post, par);
}

// ---- full assembly ---------------------------------------------------------------

struct BuildOptions {
    double domain_half_width = 1.0;
    std::optional<int> m_override;
    std::optional<double> c_override;
    int c_validation_pairs = 20000;
    std::uint64_t c_validation_seed = 0xC0FFEE;
};

struct BuildReport {
    Network network;
    ApproximationSpec spec;           // per-shift error budget eps / 2^d, c, M, domain
    double eps = 0.0;                 // user-facing uniform error target
    int predicted_hidden = 0;
    std::int64_t predicted_width = 0;
    ComplexityReport measured;
    double clip_bound = 0.0;
    std::string fn_name;
    int d = 1;
    double r = 2.0;
    double R = 1.0;
};

namespace detail {

inline HolderFunction pull_back(const HolderFunction& f, double scale) {
    HolderFunction g = f;
    g.R = f.R * std::pow(std::max(1.0, scale), f.r);
    g.deriv = [inner = f.deriv, scale, d = f.d](const MultiIndex& a, std::span<const double> u) {
        std::vector<double> x(static_cast<std::size_t>(d));
        for (int k = 0; k < d; ++k) x[static_cast<std::size_t>(k)] = scale * u[static_cast<std::size_t>(k)];
        double s = 1.0;
        for (int j = 0; j < multi_degree(a); ++j) s *= scale;
        return s * inner(a, x);
    };
    return g;
}

}  // namespace detail

/// Builds the uniform approximator of f on [-a, a)^d for a = domain_half_width:
/// inputs are pre-scaled onto [-1/2, 1/2)^d, 2^d windowed approximators over
/// the shifted partitions run on the pulled-back function with per-shift
/// budget eps / 2^d, and their sum is the result.
inline BuildReport full_approximator(const HolderFunction& f, double eps,
                                     const BuildOptions& opts = {}) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("full_approximator: eps must lie in (0, 1)");
    if (!(f.r >= 1.0)) throw std::invalid_argument("full_approximator: r must be at least 1");
    if (!(opts.domain_half_width > 0.0))
        throw std::invalid_argument("full_approximator: domain half-width must be positive");

    const double scale = 2.0 * opts.domain_half_width;
    const HolderFunction g = detail::pull_back(f, scale);
    const double c = opts.c_override.value_or(taylor_constant(f.r, f.d));
    const double measured_c = validate_taylor_constant(g, opts.c_validation_pairs, opts.c_validation_seed);
    if (measured_c > c)
        throw std::runtime_error("full_approximator: remainder constant validation failed, measured " +
                                 std::to_string(measured_c) + " exceeds c = " + std::to_string(c) +
                                 "; rerun with a constant of at least the measured value");

    const int shifts = 1 << f.d;
    const double eps_term = eps / shifts;
    const int m_required = choose_M(eps_term, f.r, g.R, f.d, c);
    int M = m_required;
    if (opts.m_override) {
        if (*opts.m_override < m_required)
            throw std::invalid_argument("full_approximator: M override " + std::to_string(*opts.m_override) +
                                        " is below the required " + std::to_string(m_required));
        M = *opts.m_override;
    }
    const ApproximationSpec spec{eps_term, c, M, opts.domain_half_width};

    std::vector<Network> parts;
    parts.reserve(static_cast<std::size_t>(shifts));
    for (int kappa = 1; kappa <= shifts; ++kappa)
        parts.push_back(windowed_approximator(g, build_partitions(M, f.d, kappa), spec));
    Network par = parallelize_all(parts);

    Matrix ones(1, shifts);
    for (int k = 0; k < shifts; ++k) ones.at(0, k) = 1.0;
    Network summed = concatenate(affine_net(std::move(ones), {0.0}), par);

    Matrix prescale(f.d, f.d);
    for (int k = 0; k < f.d; ++k) prescale.at(k, k) = 1.0 / scale;
    Network full = concatenate(summed, affine_net(std::move(prescale), std::vector<double>(static_cast<std::size_t>(f.d), 0.0)));

    BuildReport rep{std::move(full), spec, eps,
                    predicted_hidden_layers(f.d, f.r), predicted_max_width(f.d, f.r, M),
                    {}, g.R * std::exp(2.0 * f.d), f.name, f.d, f.r, f.R};
    rep.measured = complexity(rep.network);
    return rep;
}

}  // namespace requforge
