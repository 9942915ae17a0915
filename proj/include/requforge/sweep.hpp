#pragma once

// Uniform-norm verification sweeps: seeded sample points, threaded
// evaluation against a shared network, and deterministic CSV emission.
// Numbers print with 17 significant digits ('.' decimal, '\n' line ends),
// enough to round-trip doubles exactly.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "requforge/requ.hpp"
#include "requforge/rng.hpp"

namespace requforge {

inline std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

/// Thread cap for sweeps: REQU_FORGE_THREADS if set, else hardware concurrency.
inline int sweep_thread_count() {
    if (const char* env = std::getenv("REQU_FORGE_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

/// Point i of the sweep: d coordinates drawn from the per-index stream,
/// uniform in [lo, hi) per coordinate. Independent of thread count.
inline std::vector<double> sweep_point(std::uint64_t seed, std::uint64_t index, int d, double lo,
                                       double hi) {
    SplitMix rng = point_stream(seed, index);
    std::vector<double> x(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) x[static_cast<std::size_t>(k)] = rng.uniform(lo, hi);
    return x;
}

struct SweepRow {
    std::vector<double> x;
    double reference = 0.0;
    double output = 0.0;
    double abs_err = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;  // ordered by point index
    double max_abs_err = 0.0;
};

/// Evaluates `net` against `reference` on `points` seeded samples of
/// [lo, hi)^d, parallelized over points; row order is by point index.
inline SweepResult sweep_network(const Network& net,
                                 const std::function<double(std::span<const double>)>& reference,
                                 int points, std::uint64_t seed, double lo, double hi) {
    SweepResult result;
    result.rows.resize(static_cast<std::size_t>(points));
    const int threads = std::min(sweep_thread_count(), std::max(1, points));
    auto worker = [&](int tid) {
        for (int i = tid; i < points; i += threads) {
            SweepRow& row = result.rows[static_cast<std::size_t>(i)];
            row.x = sweep_point(seed, static_cast<std::uint64_t>(i), net.input_dim(), lo, hi);
            row.reference = reference(row.x);
            row.output = net.realize_scalar(row.x);
            row.abs_err = std::abs(row.output - row.reference);
        }
    };
    if (threads == 1 || points <= 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker, t);
        for (auto& th : pool) th.join();
    }
    for (const SweepRow& row : result.rows) result.max_abs_err = std::max(result.max_abs_err, row.abs_err);
    return result;
}

/// CSV with header x_1..x_d,f,phi,abs_err and one row per point.
inline std::string sweep_to_csv(const SweepResult& result, int d) {
    std::string out;
    for (int k = 1; k <= d; ++k) {
        out += "x_" + std::to_string(k);
        out += ',';
    }
    out += "f,phi,abs_err\n";
    for (const SweepRow& row : result.rows) {
        for (double v : row.x) {
            out += format_double(v);
            out += ',';
        }
        out += format_double(row.reference);
        out += ',';
        out += format_double(row.output);
        out += ',';
        out += format_double(row.abs_err);
        out += '\n';
    }
    return out;
}

}  // namespace requforge
