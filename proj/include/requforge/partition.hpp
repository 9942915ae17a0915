#pragma once

// Half-open cube partitions of [-1,1)^d: a coarse level of M^d cubes with
// side 2/M and a fine level of M^(2d) cubes with side 2/M^2, plus the 2^d
// variants whose selected coordinates are shifted right by 1/M^2. Fine
// corners decompose as coarse corner + offset, with the offset independent
// of which coarse cube is involved.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace requforge {

struct Cube {
    std::vector<double> bottom_left;
    double side = 0.0;

    int dim() const { return static_cast<int>(bottom_left.size()); }

    /// Half-open membership: bottom_left <= x < bottom_left + side per coordinate.
    bool contains(const std::vector<double>& x) const {
        for (std::size_t k = 0; k < bottom_left.size(); ++k) {
            const double off = x[k] - bottom_left[k];
            if (!(off >= 0.0 && off < side)) return false;
        }
        return true;
    }
};

/// Membership predicate for the sub-cube at distance >= delta from every face:
/// bottom_left + delta <= x < bottom_left + side - delta (upper face strict).
struct ShrunkenCube {
    Cube cube;
    double delta = 0.0;

    bool contains(const std::vector<double>& x) const {
        for (std::size_t k = 0; k < cube.bottom_left.size(); ++k) {
            const double off = x[k] - cube.bottom_left[k];
            if (!(off >= delta && off < cube.side - delta)) return false;
        }
        return true;
    }
};

inline ShrunkenCube shrink(const Cube& c, double delta) {
    if (!(delta > 0.0) || !(2.0 * delta < c.side))
        throw std::invalid_argument("shrink: need 0 < 2*delta < side");
    return ShrunkenCube{c, delta};
}

// Index arithmetic uses floor((x - origin)/side); points within an ulp of a
// face resolve by whatever the floor yields, matching half-open semantics.
class PartitionPair {
public:
    PartitionPair(int M, int d, int kappa) : M_(M), d_(d), kappa_(kappa) {
        if (M < 2) throw std::invalid_argument("PartitionPair: M must be at least 2");
        if (d < 1) throw std::invalid_argument("PartitionPair: d must be at least 1");
        if (kappa < 1 || kappa > (1 << d))
            throw std::invalid_argument("PartitionPair: kappa must lie in 1..2^d");
        coarse_side_ = 2.0 / M;
        fine_side_ = 2.0 / (static_cast<double>(M) * M);
        origin_.resize(static_cast<std::size_t>(d));
        for (int k = 0; k < d; ++k)
            origin_[static_cast<std::size_t>(k)] = -1.0 + (shifted(k) ? 1.0 / (static_cast<double>(M) * M) : 0.0);
        coarse_count_ = ipow(M, d);
        fine_count_ = ipow(M, 2 * d);
    }

    int M() const { return M_; }
    int d() const { return d_; }
    int kappa() const { return kappa_; }
    bool shifted(int k) const { return ((kappa_ - 1) >> k) & 1; }
    double coarse_side() const { return coarse_side_; }
    double fine_side() const { return fine_side_; }
    std::int64_t coarse_count() const { return coarse_count_; }
    std::int64_t fine_count() const { return fine_count_; }
    std::int64_t offset_count() const { return coarse_count_; }
    const std::vector<double>& origin() const { return origin_; }

    /// Coarse cube from its flat index (row-major over {0..M-1}^d, first
    /// coordinate most significant).
    Cube coarse_cube(std::int64_t index) const {
        const auto mi = unflatten(index, M_);
        Cube c;
        c.side = coarse_side_;
        c.bottom_left.resize(static_cast<std::size_t>(d_));
        for (int k = 0; k < d_; ++k)
            c.bottom_left[static_cast<std::size_t>(k)] = origin_[static_cast<std::size_t>(k)] + mi[static_cast<std::size_t>(k)] * coarse_side_;
        return c;
    }

    /// Offset of fine cube i relative to its coarse cube's corner; entries in
    /// {0, 2/M^2, ..., (M-1) * 2/M^2}, independent of the coarse cube.
    std::vector<double> offset(std::int64_t index) const {
        const auto mi = unflatten(index, M_);
        std::vector<double> v(static_cast<std::size_t>(d_));
        for (int k = 0; k < d_; ++k) v[static_cast<std::size_t>(k)] = mi[static_cast<std::size_t>(k)] * fine_side_;
        return v;
    }

    /// Fine cube given coarse index j and offset index i: corner is exactly
    /// coarse_cube(j).bottom_left + offset(i).
    Cube fine_cube(std::int64_t coarse_index, std::int64_t offset_index) const {
        Cube c = coarse_cube(coarse_index);
        const auto v = offset(offset_index);
        for (int k = 0; k < d_; ++k) c.bottom_left[static_cast<std::size_t>(k)] += v[static_cast<std::size_t>(k)];
        c.side = fine_side_;
        return c;
    }

    Cube fine_cube(std::int64_t index) const {
        // flat fine index = coarse index * M^d + offset index
        return fine_cube(index / coarse_count_, index % coarse_count_);
    }

    std::int64_t locate_coarse(const std::vector<double>& x) const {
        check_dim(x);
        std::int64_t flat = 0;
        for (int k = 0; k < d_; ++k) {
            const int idx = cell_index(x[static_cast<std::size_t>(k)], origin_[static_cast<std::size_t>(k)], coarse_side_, k);
            flat = flat * M_ + idx;
        }
        return flat;
    }

    /// Fine location nests inside the coarse location, so the returned cube's
    /// corner is exactly coarse corner + offset.
    std::int64_t locate_fine(const std::vector<double>& x) const {
        const std::int64_t j = locate_coarse(x);
        const Cube b = coarse_cube(j);
        std::int64_t off = 0;
        for (int k = 0; k < d_; ++k) {
            double rel = (x[static_cast<std::size_t>(k)] - b.bottom_left[static_cast<std::size_t>(k)]) / fine_side_;
            int idx = static_cast<int>(std::floor(rel));
            idx = std::max(0, std::min(M_ - 1, idx));
            off = off * M_ + idx;
        }
        return j * coarse_count_ + off;
    }

    Cube locate_coarse_cube(const std::vector<double>& x) const { return coarse_cube(locate_coarse(x)); }
    Cube locate_fine_cube(const std::vector<double>& x) const { return fine_cube(locate_fine(x)); }

private:
    static std::int64_t ipow(int base, int exp) {
        std::int64_t r = 1;
        for (int i = 0; i < exp; ++i) r *= base;
        return r;
    }

    std::vector<int> unflatten(std::int64_t index, int base) const {
        if (index < 0) throw std::invalid_argument("PartitionPair: negative cube index");
        std::vector<int> mi(static_cast<std::size_t>(d_));
        for (int k = d_ - 1; k >= 0; --k) {
            mi[static_cast<std::size_t>(k)] = static_cast<int>(index % base);
            index /= base;
        }
        if (index != 0) throw std::invalid_argument("PartitionPair: cube index out of range");
        return mi;
    }

    void check_dim(const std::vector<double>& x) const {
        if (static_cast<int>(x.size()) != d_)
            throw std::invalid_argument("PartitionPair: point has wrong dimension");
    }

    int cell_index(double x, double origin, double side, int k) const {
        const double rel = (x - origin) / side;
        const int idx = static_cast<int>(std::floor(rel));
        if (idx < 0 || idx >= M_)
            throw std::domain_error("PartitionPair: coordinate " + std::to_string(k + 1) +
                                    " value " + std::to_string(x) + " outside the covered region");
        return idx;
    }

    int M_, d_, kappa_;
    double coarse_side_, fine_side_;
    std::vector<double> origin_;
    std::int64_t coarse_count_, fine_count_;
};

inline PartitionPair build_partitions(int M, int d, int kappa) { return PartitionPair(M, d, kappa); }

}  // namespace requforge
