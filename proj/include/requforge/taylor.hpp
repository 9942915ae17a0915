#pragma once

// Scalar reference machinery: smoothness-ball function containers with
// analytic derivatives, Taylor polynomials anchored at cube corners, the
// corner-selection recursion the nets mirror, remainder-constant handling
// with a brute-force validation sweep, and the grid-size rule.

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "requforge/multiindex.hpp"
#include "requforge/partition.hpp"
#include "requforge/rng.hpp"

namespace requforge {

// A function in the radius-R smoothness ball: d, smoothness order r, and an
// evaluator for D^alpha f at any point, |alpha| <= floor(r). alpha = 0 gives
// f itself. Evaluators must be deterministic and re-entrant.
struct HolderFunction {
    int d = 1;
    double r = 2.0;
    double R = 1.0;
    std::string name;
    std::function<double(const MultiIndex&, std::span<const double>)> deriv;

    int degree() const { return static_cast<int>(std::floor(r)); }

    double value(std::span<const double> x) const {
        return deriv(MultiIndex(static_cast<std::size_t>(d), 0), x);
    }
};

struct ApproximationSpec {
    double eps = 0.0;              // per-construction uniform error target
    double c = 0.0;                // remainder constant
    int M = 0;                     // grid parameter
    double domain_half_width = 1.0;
};

/// Taylor polynomial of total degree floor(r) around x0, evaluated at x.
inline double taylor_poly(const HolderFunction& f, std::span<const double> x0,
                          std::span<const double> x) {
    const auto alphas = multi_indices_upto(f.d, f.degree());
    std::vector<double> delta(static_cast<std::size_t>(f.d));
    for (int k = 0; k < f.d; ++k) delta[static_cast<std::size_t>(k)] = x[static_cast<std::size_t>(k)] - x0[static_cast<std::size_t>(k)];
    double sum = 0.0;
    for (const auto& a : alphas)
        sum += f.deriv(a, x0) * multi_power(delta, a) / multi_factorial(a);
    return sum;
}

/// Default remainder constant: 2 d^floor(r) / floor(r)!. Conservative; its
/// validity for a concrete function is checked by validate_taylor_constant.
inline double taylor_constant(double r, int d) {
    if (!(r > 0.0)) throw std::invalid_argument("taylor_constant: r must be positive");
    if (d < 1) throw std::invalid_argument("taylor_constant: d must be positive");
    const int q = static_cast<int>(std::floor(r));
    return 2.0 * std::pow(static_cast<double>(d), q) / factorial(q);
}

/// Brute-force check of |f(x) - T_x0 f(x)| <= c R ||x - x0||^r: returns the
/// largest measured ratio |remainder| / (R ||x - x0||^r) over seeded pairs
/// (x0 uniform in [-1,1]^d, x at mixed offset scales). Callers compare the
/// result against their constant.
inline double validate_taylor_constant(const HolderFunction& f, int pairs, std::uint64_t seed) {
    SplitMix rng(seed);
    double worst = 0.0;
    std::vector<double> x0(static_cast<std::size_t>(f.d)), x(static_cast<std::size_t>(f.d));
    const double scales[4] = {1.0, 0.3, 0.05, 0.01};
    for (int p = 0; p < pairs; ++p) {
        for (int k = 0; k < f.d; ++k) x0[static_cast<std::size_t>(k)] = -1.0 + 2.0 * rng.uniform();
        const double scale = scales[p % 4];
        double norm2 = 0.0;
        for (int k = 0; k < f.d; ++k) {
            const double off = scale * (2.0 * rng.uniform() - 1.0);
            x[static_cast<std::size_t>(k)] = x0[static_cast<std::size_t>(k)] + off;
            norm2 += off * off;
        }
        const double norm = std::sqrt(norm2);
        if (norm < 1e-8) continue;
        const double rem = std::abs(f.value(x) - taylor_poly(f, x0, x));
        const double ratio = rem / (f.R * std::pow(norm, f.r));
        worst = std::max(worst, ratio);
    }
    return worst;
}

/// Hypothesis bound for the grid parameter: (c R d^(r/2) / eps)^(1/(2r)).
inline double grid_parameter_bound(double eps, double r, double R, int d, double c) {
    return std::pow(c * R * std::pow(static_cast<double>(d), r / 2.0) / eps, 1.0 / (2.0 * r));
}

/// Smallest integer strictly above the hypothesis bound, never below 2.
inline int choose_M(double eps, double r, double R, int d, double c) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("choose_M: eps must lie in (0, 1)");
    if (!(r >= 1.0)) throw std::invalid_argument("choose_M: r must be at least 1");
    const double bound = grid_parameter_bound(eps, r, R, d, c);
    const int m = static_cast<int>(std::floor(bound)) + 1;
    return std::max(2, m);
}

/// Guaranteed uniform bound for the piecewise Taylor surrogate on the fine
/// partition: c * R * (2 sqrt(d) / M^2)^r.
inline double piecewise_error_bound(int d, int M, double r, double R, double c) {
    return c * R * std::pow(2.0 * std::sqrt(static_cast<double>(d)) / (static_cast<double>(M) * M), r);
}

/// Scalar mirror of the net's corner-selection recursion: locate the coarse
/// cube, read its corner, pick the fine offset whose box contains x, and
/// evaluate the Taylor polynomial anchored at the selected fine corner.
/// Agrees with taylor_poly at the located fine corner.
inline double psi_reference(const HolderFunction& f, const PartitionPair& pp,
                            std::span<const double> x) {
    if (f.d != pp.d()) throw std::invalid_argument("psi_reference: dimension mismatch");
    std::vector<double> phi0(x.begin(), x.end());
    const Cube coarse = pp.locate_coarse_cube(phi0);
    const std::vector<double>& phi1 = coarse.bottom_left;

    // offset index of the fine cube inside the coarse one
    std::int64_t off = 0;
    for (int k = 0; k < pp.d(); ++k) {
        int idx = static_cast<int>(std::floor((phi0[static_cast<std::size_t>(k)] - phi1[static_cast<std::size_t>(k)]) / pp.fine_side()));
        idx = std::max(0, std::min(pp.M() - 1, idx));
        off = off * pp.M() + idx;
    }
    const std::vector<double> v = pp.offset(off);

    std::vector<double> psi1(static_cast<std::size_t>(pp.d()));
    for (int k = 0; k < pp.d(); ++k) psi1[static_cast<std::size_t>(k)] = phi1[static_cast<std::size_t>(k)] + v[static_cast<std::size_t>(k)];

    std::vector<double> delta(static_cast<std::size_t>(pp.d()));
    for (int k = 0; k < pp.d(); ++k) delta[static_cast<std::size_t>(k)] = phi0[static_cast<std::size_t>(k)] - psi1[static_cast<std::size_t>(k)];

    const auto alphas = multi_indices_upto(f.d, f.degree());
    double sum = 0.0;
    for (const auto& a : alphas)
        sum += f.deriv(a, psi1) * multi_power(delta, a) / multi_factorial(a);
    return sum;
}

// ---- built-in test functions -------------------------------------------

namespace detail {

// n-th derivative of exp(-u^2) is P_n(u) exp(-u^2) with
// P_0 = 1 and P_{n+1} = P_n' - 2u P_n.
inline double gaussian_derivative_1d(int n, double u) {
    std::vector<double> poly{1.0};
    for (int k = 0; k < n; ++k) {
        std::vector<double> next(poly.size() + 1, 0.0);
        for (std::size_t i = 1; i < poly.size(); ++i) next[i - 1] += static_cast<double>(i) * poly[i];
        for (std::size_t i = 0; i < poly.size(); ++i) next[i + 1] -= 2.0 * poly[i];
        poly = std::move(next);
    }
    double val = 0.0;
    for (std::size_t i = poly.size(); i-- > 0;) val = val * u + poly[i];
    return val * std::exp(-u * u);
}

}  // namespace detail

inline const std::vector<std::string>& test_function_names() {
    static const std::vector<std::string> names{"const", "linear", "quadratic", "sin_sum", "exp_neg_sq"};
    return names;
}

/// Built-in registry. Radii are declared per function and checked
/// empirically by the test suite (max sampled |D^alpha f| <= R).
inline HolderFunction make_test_function(const std::string& name, int d, double r) {
    if (d < 1) throw std::invalid_argument("make_test_function: d must be positive");
    if (!(r >= 1.0)) throw std::invalid_argument("make_test_function: r must be at least 1");
    HolderFunction f;
    f.d = d;
    f.r = r;
    f.name = name;
    if (name == "const") {
        f.R = 1.0;
        f.deriv = [](const MultiIndex& a, std::span<const double>) {
            return multi_degree(a) == 0 ? 1.0 : 0.0;
        };
    } else if (name == "linear") {
        f.R = static_cast<double>(d);
        f.deriv = [](const MultiIndex& a, std::span<const double> x) {
            const int deg = multi_degree(a);
            if (deg == 0) {
                double s = 0.0;
                for (double v : x) s += v;
                return s;
            }
            return deg == 1 ? 1.0 : 0.0;
        };
    } else if (name == "quadratic") {
        f.R = std::max(2.0, static_cast<double>(d));
        f.deriv = [](const MultiIndex& a, std::span<const double> x) {
            const int deg = multi_degree(a);
            if (deg == 0) {
                double s = 0.0;
                for (double v : x) s += v * v;
                return s;
            }
            if (deg == 1) {
                for (std::size_t k = 0; k < a.size(); ++k)
                    if (a[k] == 1) return 2.0 * x[k];
            }
            if (deg == 2) {
                for (std::size_t k = 0; k < a.size(); ++k)
                    if (a[k] == 2) return 2.0;
                return 0.0;  // mixed second derivative
            }
            return 0.0;
        };
    } else if (name == "sin_sum") {
        f.R = 2.0;
        f.deriv = [](const MultiIndex& a, std::span<const double> x) {
            double s = 0.0;
            for (double v : x) s += v;
            const int n = multi_degree(a);
            return std::sin(s + 0.5 * M_PI * n);
        };
    } else if (name == "exp_neg_sq") {
        // third derivatives reach ~3.9, lower orders stay within 2
        f.R = r < 3.0 ? 2.0 : 5.0;
        f.deriv = [](const MultiIndex& a, std::span<const double> x) {
            double prod = 1.0;
            for (std::size_t k = 0; k < a.size(); ++k)
                prod *= detail::gaussian_derivative_1d(a[k], x[k]);
            return prod;
        };
    } else {
        throw std::invalid_argument("make_test_function: unknown function '" + name + "'");
    }
    return f;
}

}  // namespace requforge
