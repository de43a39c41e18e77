// Space-filling surjections between unit cubes with exact dyadic right
// inverses, built from the m-dimensional Hilbert curve in its reflected
// Gray-code form (transpose representation).
//
// Conventions. At depth b the curve is a bijection between the 2^(m*b)
// parameter cells and the m-dimensional cell lattice; both sides are
// represented by their lower corners, i.e. the corner grid
// {i*2^-b : 0 <= i < 2^b}. cell(y) clamps y = 1 into the last (closed) cell.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "anacomp/model.hpp"
#include "anacomp/rng.hpp"

namespace anacomp {

namespace hilbert {

// transpose <-> axes (b bits per axis, m axes); reflected Gray-code variant
inline void transpose_to_axes(std::vector<std::uint32_t>& X, int b, int m) {
    std::uint32_t N = 2u << (b - 1), P, Q, t;
    t = X[static_cast<std::size_t>(m - 1)] >> 1;
    for (int i = m - 1; i > 0; i--) X[static_cast<std::size_t>(i)] ^= X[static_cast<std::size_t>(i - 1)];
    X[0] ^= t;
    for (Q = 2; Q != N; Q <<= 1) {
        P = Q - 1;
        for (int i = m - 1; i >= 0; i--) {
            if (X[static_cast<std::size_t>(i)] & Q) {
                X[0] ^= P;
            } else {
                t = (X[0] ^ X[static_cast<std::size_t>(i)]) & P;
                X[0] ^= t;
                X[static_cast<std::size_t>(i)] ^= t;
            }
        }
    }
}

inline void axes_to_transpose(std::vector<std::uint32_t>& X, int b, int m) {
    std::uint32_t M = 1u << (b - 1), P, Q, t;
    for (Q = M; Q > 1; Q >>= 1) {
        P = Q - 1;
        for (int i = 0; i < m; i++) {
            if (X[static_cast<std::size_t>(i)] & Q) {
                X[0] ^= P;
            } else {
                t = (X[0] ^ X[static_cast<std::size_t>(i)]) & P;
                X[0] ^= t;
                X[static_cast<std::size_t>(i)] ^= t;
            }
        }
    }
    for (int i = 1; i < m; i++) X[static_cast<std::size_t>(i)] ^= X[static_cast<std::size_t>(i - 1)];
    t = 0;
    for (Q = M; Q > 1; Q >>= 1)
        if (X[static_cast<std::size_t>(m - 1)] & Q) t ^= Q - 1;
    for (int i = 0; i < m; i++) X[static_cast<std::size_t>(i)] ^= t;
}

// transpose layout: bit plane j (MSB first) of the index interleaves one bit
// per axis; identity for m = 1
inline std::vector<std::uint32_t> index_to_axes(std::uint64_t h, int b, int m) {
    if (m * b > 62) throw std::invalid_argument("hilbert index limited to m*b <= 62 bits");
    std::vector<std::uint32_t> X(static_cast<std::size_t>(m), 0);
    if (m == 1) {
        X[0] = static_cast<std::uint32_t>(h);
        return X;
    }
    for (int j = 0; j < b; j++)
        for (int i = 0; i < m; i++) {
            int bitpos = m * b - 1 - (j * m + i);
            if ((h >> bitpos) & 1u) X[static_cast<std::size_t>(i)] |= 1u << (b - 1 - j);
        }
    transpose_to_axes(X, b, m);
    return X;
}

inline std::uint64_t axes_to_index(std::vector<std::uint32_t> X, int b, int m) {
    if (m * b > 62) throw std::invalid_argument("hilbert index limited to m*b <= 62 bits");
    if (m == 1) return X[0];
    axes_to_transpose(X, b, m);
    std::uint64_t h = 0;
    for (int j = 0; j < b; j++)
        for (int i = 0; i < m; i++) {
            int bitpos = m * b - 1 - (j * m + i);
            if ((X[static_cast<std::size_t>(i)] >> (b - 1 - j)) & 1u) h |= std::uint64_t{1} << bitpos;
        }
    return h;
}

} // namespace hilbert

// Curve point for a dyadic parameter t on the m*b-bit grid; adjacent
// parameter cells map to face-adjacent target cells.
inline std::vector<double> hilbert_point(double t, int m, int b) {
    if (t < 0.0 || t > 1.0) throw std::invalid_argument("curve parameter must lie in [0,1]");
    if (t == 1.0) t = 1.0 - std::ldexp(1.0, -m * b); // clamp into the last (closed) cell
    double scaled = std::ldexp(t, m * b);
    if (scaled != std::floor(scaled))
        throw dimension_error("curve parameter is not on the m*b-bit grid");
    auto X = hilbert::index_to_axes(static_cast<std::uint64_t>(scaled), b, m);
    std::vector<double> y(static_cast<std::size_t>(m));
    for (int i = 0; i < m; i++) y[static_cast<std::size_t>(i)] = std::ldexp(static_cast<double>(X[static_cast<std::size_t>(i)]), -b);
    return y;
}

// Least parameter whose curve cell is the cell of y; exact roundtrip on the
// corner grid.
inline double hilbert_index(const std::vector<double>& y, int m, int b) {
    if (static_cast<int>(y.size()) != m) throw dimension_error("hilbert_index: dimension mismatch");
    std::vector<std::uint32_t> X(static_cast<std::size_t>(m));
    for (int i = 0; i < m; i++) {
        double v = y[static_cast<std::size_t>(i)];
        if (v < 0.0 || v > 1.0) throw std::invalid_argument("point outside the unit cube");
        double scaled = std::ldexp(v, 40); // reject non-dyadic inputs
        if (scaled != std::floor(scaled))
            throw dimension_error("hilbert_index: point off the dyadic grid");
        X[static_cast<std::size_t>(i)] = static_cast<std::uint32_t>(DyadicGrid::cell_index(v, b));
    }
    return std::ldexp(static_cast<double>(hilbert::axes_to_index(std::move(X), b, m)), -m * b);
}

// ---------------------------------------------------------------------------
// Cube surjections
// ---------------------------------------------------------------------------

// g : [0,1]^k -> [0,1]^n built coordinatewise: each source coordinate drives
// an m-dimensional curve with m = ceil(n/k); outputs are concatenated and
// truncated to n coordinates. Achieved exponent is 1/m; the right inverse
// re-synthesizes truncated coordinates as 0.
struct CurveMap {
    int source_dim = 1;
    int target_dim = 1;
    int bits = 4;      // target depth b
    int block_dim = 1; // m = ceil(n/k)
    std::string orientation = "reflected-gray";

    double alpha() const { return 1.0 / block_dim; }
    int source_bits() const { return block_dim * bits; }

    std::vector<double> forward(const std::vector<double>& s) const {
        if (static_cast<int>(s.size()) != source_dim) throw dimension_error("curve forward: dimension mismatch");
        std::vector<double> out;
        out.reserve(static_cast<std::size_t>(source_dim * block_dim));
        for (int i = 0; i < source_dim; ++i) {
            auto part = hilbert_point(s[static_cast<std::size_t>(i)], block_dim, bits);
            out.insert(out.end(), part.begin(), part.end());
        }
        out.resize(static_cast<std::size_t>(target_dim));
        return out;
    }

    std::vector<double> right_inverse(const std::vector<double>& y) const {
        if (static_cast<int>(y.size()) != target_dim) throw dimension_error("curve inverse: dimension mismatch");
        std::vector<double> s(static_cast<std::size_t>(source_dim), 0.0);
        for (int i = 0; i < source_dim; ++i) {
            std::vector<double> group(static_cast<std::size_t>(block_dim), 0.0);
            for (int q = 0; q < block_dim; ++q) {
                int idx = i * block_dim + q;
                if (idx < target_dim) group[static_cast<std::size_t>(q)] = y[static_cast<std::size_t>(idx)];
            }
            s[static_cast<std::size_t>(i)] = hilbert_index(group, block_dim, bits);
        }
        return s;
    }
};

inline CurveMap cube_surjection(int k, int n, int b) {
    if (k > n) throw std::invalid_argument("cube surjection needs source dim <= target dim");
    if (k < 1 || b < 1) throw std::invalid_argument("cube surjection: bad parameters");
    CurveMap map;
    map.source_dim = k;
    map.target_dim = n;
    map.bits = b;
    map.block_dim = (n + k - 1) / k;
    if (map.block_dim * b > 62) throw budget_error("cube surjection depth exceeds 62 index bits");
    return map;
}

// ---------------------------------------------------------------------------
// Empirical regularity estimation
// ---------------------------------------------------------------------------

// Empirical Holder data for a map between cubes: an exponent fit and the
// measured constant at a declared exponent.
//
// Pairs come from three sources: seeded uniform grid pairs, axis-adjacent
// grid pairs, and caller-supplied adversarial pairs. The pairs are bucketed
// by ceil(-log2 d_in); alpha_hat is the least-squares slope of the upper
// envelope log2 max(d_out) against log2 d_in over the finer half of the
// nonempty buckets, which tracks the exponent while ignoring the constant.
struct HolderEstimate {
    double alpha_hat = 1.0;
    double L_at_alpha = 0.0; // max d_out / d_in^alpha over all pairs
    std::size_t pairs = 0;
};

using PointPair = std::pair<std::vector<double>, std::vector<double>>;

// Pair population defining the measurement domain. The exponent is a slope
// across scales, so it is fitted on the modulus pairs (controlled dyadic
// axis steps); the constant is the sup over every pair, so isolated-scale
// features (signature separations and the like) land in the constant where
// they belong instead of corrupting the slope.
struct HolderPairs {
    std::vector<PointPair> modulus;  // slope fit and constant
    std::vector<PointPair> constant; // constant only
};

inline HolderEstimate holder_estimate_pairs(
    const std::function<std::vector<double>(const std::vector<double>&)>& fn,
    const HolderPairs& pairs, double p, double declared_alpha, int jobs = 1) {
    struct PairStat {
        double din, dout;
    };
    const std::size_t nm = pairs.modulus.size();
    std::vector<PairStat> all(nm + pairs.constant.size());
    parallel_for(all.size(), jobs, [&](std::size_t i) {
        const PointPair& pr = i < nm ? pairs.modulus[i] : pairs.constant[i - nm];
        double din = norm_distance(pr.first, pr.second, p);
        all[i] = {din, din <= 0.0 ? -1.0 : norm_distance(fn(pr.first), fn(pr.second), p)};
    });

    HolderEstimate est;
    double maxratio = 0.0;
    bool any_out = false;
    std::map<int, double> envelope; // bucket -> max dout over modulus pairs
    for (std::size_t i = 0; i < all.size(); ++i) {
        const auto& ps = all[i];
        if (ps.dout < 0.0) continue; // degenerate pair
        ++est.pairs;
        maxratio = std::max(maxratio, ps.dout / std::pow(ps.din, declared_alpha));
        if (ps.dout > 0.0) any_out = true;
        if (i < nm) {
            int bucket = static_cast<int>(std::ceil(-std::log2(ps.din) - 1e-12));
            auto [it, inserted] = envelope.emplace(bucket, ps.dout);
            if (!inserted) it->second = std::max(it->second, ps.dout);
        }
    }
    if (est.pairs == 0) return est;
    est.L_at_alpha = maxratio;
    if (!any_out) { // constant map
        est.alpha_hat = 1.0;
        est.L_at_alpha = 0.0;
        return est;
    }
    // longest run of consecutive scales (finer run on ties), then a least
    // squares fit over its finer half
    std::vector<std::pair<int, double>> rows(envelope.begin(), envelope.end());
    if (rows.empty()) return est;
    std::size_t run_begin = 0, run_len = 1, best_begin = 0, best_len = 1;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].first == rows[i - 1].first + 1) {
            ++run_len;
        } else {
            run_begin = i;
            run_len = 1;
        }
        if (run_len >= best_len) {
            best_len = run_len;
            best_begin = run_begin;
        }
    }
    std::vector<double> xs, ys;
    std::size_t start = best_begin + best_len / 2;
    if (best_begin + best_len - start < 2) start = best_len >= 2 ? best_begin + best_len - 2 : best_begin;
    for (std::size_t i = start; i < best_begin + best_len; ++i) {
        if (rows[i].second <= 0.0) continue;
        xs.push_back(-static_cast<double>(rows[i].first));
        ys.push_back(std::log2(rows[i].second));
    }
    if (xs.size() >= 2) {
        double n = static_cast<double>(xs.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sx += xs[i];
            sy += ys[i];
            sxx += xs[i] * xs[i];
            sxy += xs[i] * ys[i];
        }
        double denom = n * sxx - sx * sx;
        est.alpha_hat = denom == 0.0 ? declared_alpha : std::clamp((n * sxy - sx * sy) / denom, 0.0, 1.0);
    } else {
        // single scale: exponent from the ratio of logs
        est.alpha_hat = std::clamp(std::log2(std::max(rows[start].second, 1e-300)) /
                                       -static_cast<double>(rows[start].first),
                                   0.0, 1.0);
    }
    return est;
}

// Cube-domain estimate: seeded uniform grid pairs (constant), axis-adjacent
// pairs at every dyadic step (modulus witnesses) and caller adversarial pairs
// (constant).
inline HolderEstimate holder_estimate(
    const std::function<std::vector<double>(const std::vector<double>&)>& fn, int dim_in,
    int bits_in, double p, double declared_alpha, int samples, std::uint64_t seed,
    const std::vector<PointPair>& adversarial = {}, int jobs = 1) {
    const std::int64_t levels = (std::int64_t{1} << bits_in) + 1;
    HolderPairs pairs;
    pairs.modulus.reserve(static_cast<std::size_t>(samples));
    pairs.constant.reserve(static_cast<std::size_t>(samples) + adversarial.size());
    for (int t = 0; t < samples; ++t) {
        Rng rng = Rng::child(seed, static_cast<std::uint64_t>(t));
        std::vector<double> a(static_cast<std::size_t>(dim_in)), b(static_cast<std::size_t>(dim_in));
        for (int i = 0; i < dim_in; ++i)
            a[static_cast<std::size_t>(i)] =
                std::ldexp(static_cast<double>(rng.next_below(static_cast<std::uint64_t>(levels))), -bits_in);
        for (int i = 0; i < dim_in; ++i)
            b[static_cast<std::size_t>(i)] =
                std::ldexp(static_cast<double>(rng.next_below(static_cast<std::uint64_t>(levels))), -bits_in);
        pairs.constant.emplace_back(a, b);
        std::vector<double> c = a;
        auto axis = static_cast<std::size_t>(rng.next_below(static_cast<std::uint64_t>(dim_in)));
        int scale = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(bits_in)));
        double step = std::ldexp(1.0, -scale);
        double snapped = std::ldexp(std::floor(std::ldexp(c[axis], scale)), -scale);
        c[axis] = snapped + step <= 1.0 ? snapped + step : snapped - step;
        if (c[axis] >= 0.0) {
            std::vector<double> base = a;
            base[axis] = snapped;
            pairs.modulus.emplace_back(std::move(base), std::move(c));
        }
    }
    pairs.constant.insert(pairs.constant.end(), adversarial.begin(), adversarial.end());
    // adjacent grid pairs are modulus witnesses at the finest scale
    for (const auto& pr : adversarial)
        if (norm_distance(pr.first, pr.second, p) <= std::ldexp(1.0, -bits_in) * 1.000001)
            pairs.modulus.push_back(pr);
    return holder_estimate_pairs(fn, pairs, p, declared_alpha, jobs);
}

// Adjacent parameter pairs of a curve map, the adversarial witnesses for its
// exponent.
inline std::vector<std::pair<std::vector<double>, std::vector<double>>>
curve_adjacent_pairs(const CurveMap& map, int max_pairs = 4096) {
    std::vector<std::pair<std::vector<double>, std::vector<double>>> out;
    const int sb = map.source_bits();
    const std::uint64_t cells = std::uint64_t{1} << sb;
    const double step = std::ldexp(1.0, -sb);
    std::uint64_t stride = std::max<std::uint64_t>(1, cells / static_cast<std::uint64_t>(max_pairs));
    for (std::uint64_t c = 0; c + 1 < cells; c += stride) {
        std::vector<double> a(static_cast<std::size_t>(map.source_dim), 0.0);
        std::vector<double> b(static_cast<std::size_t>(map.source_dim), 0.0);
        a[0] = std::ldexp(static_cast<double>(c), -sb);
        b[0] = a[0] + step;
        out.emplace_back(std::move(a), std::move(b));
    }
    return out;
}

} // namespace anacomp
