#pragma once

// Multi-index enumeration in graded lexicographic order: total degree
// ascending, ties broken by lexicographic comparison of the exponent tuple
// (first coordinate most significant). This ordering is a public contract:
// polynomial weight vectors and Taylor coefficient vectors index into it.

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace requforge {

using MultiIndex = std::vector<int>;

inline int multi_degree(const MultiIndex& a) {
    int s = 0;
    for (int v : a) s += v;
    return s;
}

inline double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

/// alpha! = prod_k alpha_k!
inline double multi_factorial(const MultiIndex& a) {
    double r = 1.0;
    for (int v : a) r *= factorial(v);
    return r;
}

/// (x - x0)^alpha componentwise power product.
inline double multi_power(const std::vector<double>& x, const MultiIndex& a) {
    double r = 1.0;
    for (std::size_t k = 0; k < a.size(); ++k)
        for (int i = 0; i < a[k]; ++i) r *= x[k];
    return r;
}

inline std::int64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    std::int64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

namespace detail {
inline void enumerate_degree(int d, int degree, MultiIndex& cur, int pos, int remaining,
                             std::vector<MultiIndex>& out) {
    if (pos == d - 1) {
        cur[static_cast<std::size_t>(pos)] = remaining;
        out.push_back(cur);
        return;
    }
    for (int v = 0; v <= remaining; ++v) {
        cur[static_cast<std::size_t>(pos)] = v;
        enumerate_degree(d, degree, cur, pos + 1, remaining - v, out);
    }
}
}  // namespace detail

/// All alpha in N_0^d with |alpha| <= max_degree, graded-lex order.
/// Size is binomial(d + max_degree, d).
inline std::vector<MultiIndex> multi_indices_upto(int d, int max_degree) {
    if (d <= 0) throw std::invalid_argument("multi_indices_upto: d must be positive");
    if (max_degree < 0) throw std::invalid_argument("multi_indices_upto: negative degree");
    std::vector<MultiIndex> out;
    MultiIndex cur(static_cast<std::size_t>(d), 0);
    for (int deg = 0; deg <= max_degree; ++deg)
        detail::enumerate_degree(d, deg, cur, 0, deg, out);
    return out;
}

}  // namespace requforge
