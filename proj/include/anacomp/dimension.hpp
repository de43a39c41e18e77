// Covering numbers, box dimension, metric mean dimension and mean box
// dimension estimators over dyadic grids.
//
// Covering convention: a minimal open cover by diameter-<eps sets is replaced
// by the count of occupied half-open dyadic cells of side eps = 2^-j (last
// cell closed). Cells have sup-norm diameter < 2^-j, so the cell count is a
// valid upper bound on the minimal cover and both conventions give the same
// dimension limits; the cell count is an exact, reproducible integer.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <unordered_set>
#include <vector>

#include "anacomp/model.hpp"

namespace anacomp {

// ---------------------------------------------------------------------------
// Covering counts on point clouds
// ---------------------------------------------------------------------------

struct CoveringCount {
    int j = 0;               // scale 2^-j
    double epsilon = 0.0;
    std::uint64_t exact_cells = 0;   // occupied dyadic cells (sup norm)
    std::uint64_t greedy_upper = 0;  // greedy cover by open balls of radius eps/2
    std::uint64_t packing_lower = 0; // maximal eps-separated subset (greedy)
};

namespace detail {

inline void append_cell(std::string& key, std::int64_t cell) {
    for (int s = 0; s < 4; ++s) key.push_back(static_cast<char>((cell >> (8 * s)) & 0xff));
}

inline std::string cell_key(const Block& b, int j) {
    std::string key;
    key.reserve(4 * static_cast<std::size_t>(b.length()));
    for (int i = 0; i < b.length(); ++i)
        append_cell(key, DyadicGrid::cell_index(b.values[static_cast<std::size_t>(i)], j));
    return key;
}

} // namespace detail

// Three bounds on the eps-covering number of a finite cloud. packing_lower
// <= minimal cover <= min(exact_cells, greedy_upper) always; exact_cells <=
// greedy_upper additionally holds whenever the points sit on the 2^-j lattice.
inline CoveringCount covering_count(const std::vector<Block>& points, int j, double p = kInfNorm) {
    if (points.empty()) return {j, std::ldexp(1.0, -j), 0, 0, 0};
    if (j > points.front().bits) throw dimension_error("covering scale finer than the data grid");
    if (j > 24) throw std::invalid_argument("cell scale limited to j <= 24");
    CoveringCount out;
    out.j = j;
    out.epsilon = std::ldexp(1.0, -j);

    std::unordered_set<std::string> cells;
    for (const Block& b : points) cells.insert(detail::cell_key(b, j));
    out.exact_cells = cells.size();

    // greedy cover, deterministic first-uncovered order
    std::vector<bool> covered(points.size(), false);
    const double radius = out.epsilon / 2.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (covered[i]) continue;
        ++out.greedy_upper;
        for (std::size_t k = i; k < points.size(); ++k)
            if (!covered[k] && norm_distance(points[i], points[k], p) < radius) covered[k] = true;
    }

    // greedy maximal separated set
    std::vector<std::size_t> chosen;
    for (std::size_t i = 0; i < points.size(); ++i) {
        bool far = true;
        for (std::size_t c : chosen)
            if (norm_distance(points[i], points[c], p) < out.epsilon) {
                far = false;
                break;
            }
        if (far) chosen.push_back(i);
    }
    out.packing_lower = chosen.size();
    return out;
}

// ---------------------------------------------------------------------------
// Occupied-cell counts for whole families (log2 scale)
// ---------------------------------------------------------------------------

// log2 #(pi_n(S), sup norm, 2^-j) under the dyadic cell convention. Exact:
// computed by closed form or dynamic programming; for vanishing cubes by
// direct cell enumeration. A cell word is occupied iff choosing the zero
// value on its zero cells yields an admissible word, so for sparse families
// the count is sum over admissible supports s of (2^j - 1)^|s|.
inline double log2_cell_count(const SubshiftFamily& family, int n, int j, const DyadicGrid& grid,
                              const Budget& budget = {}) {
    if (j < 1 || j > grid.bits) throw dimension_error("cell scale must satisfy 1 <= j <= b");
    if (const auto* fs = std::get_if<FullShift>(&family.spec)) {
        if (fs->alphabet.empty()) return static_cast<double>(n) * j;
        std::set<std::int64_t> cells;
        for (double a : fs->alphabet) cells.insert(DyadicGrid::cell_index(a, j));
        return n * std::log2(static_cast<double>(cells.size()));
    }
    if (const auto* rc = std::get_if<ReciprocalAlphabet>(&family.spec)) {
        std::set<std::int64_t> cells;
        for (double a : reciprocal_alphabet_values(*rc, grid)) cells.insert(DyadicGrid::cell_index(a, j));
        return n * std::log2(static_cast<double>(cells.size()));
    }
    if (const auto* sp = std::get_if<SparseNK>(&family.spec)) {
        auto cs = detail::sparse_pattern_counts(n, sp->window, sp->max_support);
        const double nz = std::ldexp(1.0, j) - 1.0;
        double total = 0.0;
        for (std::size_t s = 0; s < cs.size(); ++s) total += cs[s] * std::pow(nz, static_cast<double>(s));
        return std::log2(total);
    }
    const auto& vc = std::get<VanishingCubes>(family.spec);
    // cells per coordinate occupied by grid values in [0, 2^-m]
    std::unordered_set<std::string> cells;
    {
        std::string zero;
        for (int i = 0; i < n; ++i) detail::append_cell(zero, 0);
        cells.insert(zero);
    }
    for (int m = 1; m <= vc.m_max; ++m) {
        std::vector<std::int64_t> coord_cells;
        {
            std::set<std::int64_t> cc;
            const std::int64_t top = std::int64_t{1} << std::max(0, grid.bits - m);
            for (std::int64_t i = 0; i <= top; ++i)
                cc.insert(DyadicGrid::cell_index(grid.from_index(i), j));
            coord_cells.assign(cc.begin(), cc.end());
        }
        for (int t = -(m - 1); t < n; ++t) {
            const int lo = std::max(0, t), hi = std::min(n - 1, t + m - 1);
            const int len = hi - lo + 1;
            if (len <= 0) continue;
            if (static_cast<double>(cells.size()) > budget.max_words)
                throw budget_error("cell enumeration budget exceeded for " + family.name());
            std::vector<std::int64_t> word(static_cast<std::size_t>(n), 0);
            std::vector<std::size_t> idx(static_cast<std::size_t>(len), 0);
            while (true) {
                for (int q = 0; q < len; ++q)
                    word[static_cast<std::size_t>(lo + q)] = coord_cells[idx[static_cast<std::size_t>(q)]];
                std::string key;
                key.reserve(4 * static_cast<std::size_t>(n));
                for (std::int64_t c : word) detail::append_cell(key, c);
                cells.insert(key);
                int k = len - 1;
                while (k >= 0 && ++idx[static_cast<std::size_t>(k)] == coord_cells.size())
                    idx[static_cast<std::size_t>(k--)] = 0;
                if (k < 0) break;
            }
        }
    }
    return std::log2(static_cast<double>(cells.size()));
}

// Generic fallback computing the same quantity by full enumeration; used as
// an independent route in tests.
inline double log2_cell_count_enumerated(const SubshiftFamily& family, int n, int j,
                                         const DyadicGrid& grid, const Budget& budget = {}) {
    std::unordered_set<std::string> cells;
    for_each_word(family, n, grid, budget, [&](const Block& b) { cells.insert(detail::cell_key(b, j)); });
    return std::log2(static_cast<double>(cells.size()));
}

// ---------------------------------------------------------------------------
// Dimension estimates
// ---------------------------------------------------------------------------

struct DimensionEstimate {
    double value = 0.0; // headline estimate (see per-estimator docs)
    std::vector<int> n_schedule;
    std::vector<int> j_schedule;
    // per-cell table h(n, 2^-j) = log2#(pi_n, 2^-j) / (n*j), row-major over
    // (n, j) in schedule order
    std::vector<double> h_table;
    std::vector<double> per_eps; // per-j aggregated column (meaning per estimator)
    double endpoint_slope = 0.0; // two-point slope at the two finest scales
    double ls_slope = 0.0;       // least-squares slope over the j schedule
    double ratio_at_finest = 0.0;
};

namespace detail {

inline double least_squares_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    const auto n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    double denom = n * sxx - sx * sx;
    return denom == 0.0 ? 0.0 : (n * sxy - sx * sy) / denom;
}

} // namespace detail

// Metric mean dimension. For each scale 2^-j the n-limit is realized as the
// minimum over the n schedule of log2#(pi_n)/n (valid by subadditivity);
// that column L(j) grows like mmdim * j + O(1), so the headline value is the
// slope of L at the finest scale, which cancels the O(1) bias. per_eps holds
// the raw ratios L(j)/j.
inline DimensionEstimate mmdim_estimate(const SubshiftFamily& family, std::vector<int> n_schedule,
                                        std::vector<int> j_schedule, const DyadicGrid& grid,
                                        const Budget& budget = {}) {
    if (j_schedule.size() < 2) throw std::invalid_argument("mmdim needs at least two scales");
    std::sort(n_schedule.begin(), n_schedule.end());
    std::sort(j_schedule.begin(), j_schedule.end());
    DimensionEstimate est;
    est.n_schedule = n_schedule;
    est.j_schedule = j_schedule;
    std::vector<double> L(j_schedule.size(), 0.0);
    for (std::size_t ji = 0; ji < j_schedule.size(); ++ji) {
        double best = kInfNorm;
        for (int n : n_schedule) {
            double v = log2_cell_count(family, n, j_schedule[ji], grid, budget) / n;
            est.h_table.push_back(v / j_schedule[ji]);
            best = std::min(best, v);
        }
        L[ji] = best;
        est.per_eps.push_back(best / j_schedule[ji]);
    }
    // h_table was filled j-major; reorder to (n, j) row-major
    {
        std::vector<double> reordered(est.h_table.size());
        const std::size_t nn = n_schedule.size(), nj = j_schedule.size();
        for (std::size_t ji = 0; ji < nj; ++ji)
            for (std::size_t ni = 0; ni < nn; ++ni) reordered[ni * nj + ji] = est.h_table[ji * nn + ni];
        est.h_table = std::move(reordered);
    }
    const std::size_t last = j_schedule.size() - 1;
    est.endpoint_slope = (L[last] - L[last - 1]) /
                         static_cast<double>(j_schedule[last] - j_schedule[last - 1]);
    std::vector<double> xs(j_schedule.begin(), j_schedule.end());
    est.ls_slope = detail::least_squares_slope(xs, L);
    est.ratio_at_finest = est.per_eps.back();
    est.value = est.endpoint_slope;
    return est;
}

// Mean box dimension: limits in the opposite order. For each n the box
// dimension of pi_n is estimated as the endpoint slope of log2 count against
// j; the n-limit is the smallest slope/n over the schedule (subadditive).
inline DimensionEstimate mbdim_estimate(const SubshiftFamily& family, std::vector<int> n_schedule,
                                        std::vector<int> j_schedule, const DyadicGrid& grid,
                                        const Budget& budget = {}) {
    if (j_schedule.size() < 2) throw std::invalid_argument("mbdim needs at least two scales");
    std::sort(n_schedule.begin(), n_schedule.end());
    std::sort(j_schedule.begin(), j_schedule.end());
    DimensionEstimate est;
    est.n_schedule = n_schedule;
    est.j_schedule = j_schedule;
    const std::size_t last = j_schedule.size() - 1;
    double best_ep = kInfNorm, best_ls = kInfNorm;
    for (int n : n_schedule) {
        std::vector<double> logs;
        for (int j : j_schedule) {
            double lc = log2_cell_count(family, n, j, grid, budget);
            logs.push_back(lc);
            est.h_table.push_back(lc / (static_cast<double>(n) * j));
        }
        double ep = (logs[last] - logs[last - 1]) /
                    static_cast<double>(j_schedule[last] - j_schedule[last - 1]) / n;
        std::vector<double> xs(j_schedule.begin(), j_schedule.end());
        double ls = detail::least_squares_slope(xs, logs) / n;
        best_ep = std::min(best_ep, ep);
        best_ls = std::min(best_ls, ls);
    }
    // per-j column: smallest ratio over n (diagnostic only)
    for (std::size_t ji = 0; ji < j_schedule.size(); ++ji) {
        double best = kInfNorm;
        for (std::size_t ni = 0; ni < n_schedule.size(); ++ni)
            best = std::min(best, est.h_table[ni * j_schedule.size() + ji]);
        est.per_eps.push_back(best);
    }
    est.endpoint_slope = best_ep;
    est.ls_slope = best_ls;
    est.ratio_at_finest = est.per_eps.back();
    est.value = best_ep;
    return est;
}

// Default schedules. Window families use n in {N, 2N, 3N}. Vanishing cubes
// need the two limit orders resolved in opposite regimes: the per-n box
// dimension is only visible at scales finer than the cube side 2^-n, so its
// n schedule stays below the finest scale b; the metric mean dimension takes
// the n limit first, so its schedule grows as far as the budget allows.
inline std::vector<int> default_n_schedule_mmdim(const SubshiftFamily& family, const DyadicGrid& grid) {
    (void)grid;
    if (const auto* sp = std::get_if<SparseNK>(&family.spec))
        return {sp->window, 2 * sp->window, 3 * sp->window};
    if (const auto* vc = std::get_if<VanishingCubes>(&family.spec))
        return {vc->m_max, 4 * vc->m_max, 16 * vc->m_max};
    return {4, 8, 12};
}

inline std::vector<int> default_n_schedule_mbdim(const SubshiftFamily& family, const DyadicGrid& grid) {
    if (const auto* sp = std::get_if<SparseNK>(&family.spec))
        return {sp->window, 2 * sp->window, 3 * sp->window};
    if (const auto* vc = std::get_if<VanishingCubes>(&family.spec)) {
        std::vector<int> n;
        for (int k = 2; k < std::min(vc->m_max + 1, grid.bits); ++k) n.push_back(k);
        if (n.empty()) n.push_back(1);
        return n;
    }
    return {4, 8, 12};
}

inline std::vector<int> default_j_schedule(const DyadicGrid& grid) {
    std::vector<int> j;
    for (int v = 2; v <= grid.bits; ++v) j.push_back(v);
    return j;
}

// Box dimension of a finite cloud: slope of log2 exact-cells against j,
// reported as (ls, endpoint); value is the endpoint slope.
inline DimensionEstimate box_dimension_estimate(const std::vector<Block>& points,
                                                std::vector<int> j_schedule) {
    if (j_schedule.size() < 3) throw std::invalid_argument("box dimension needs at least 3 scales");
    std::sort(j_schedule.begin(), j_schedule.end());
    DimensionEstimate est;
    est.j_schedule = j_schedule;
    std::vector<double> logs;
    for (int j : j_schedule) {
        auto c = covering_count(points, j);
        logs.push_back(std::log2(static_cast<double>(std::max<std::uint64_t>(1, c.exact_cells))));
        est.per_eps.push_back(logs.back() / j);
    }
    const std::size_t last = j_schedule.size() - 1;
    est.endpoint_slope =
        (logs[last] - logs[last - 1]) / static_cast<double>(j_schedule[last] - j_schedule[last - 1]);
    std::vector<double> xs(j_schedule.begin(), j_schedule.end());
    est.ls_slope = detail::least_squares_slope(xs, logs);
    est.ratio_at_finest = est.per_eps.back();
    est.value = est.endpoint_slope;
    return est;
}

// ---------------------------------------------------------------------------
// Dynamical covering consistency check
// ---------------------------------------------------------------------------

// Compares the projection count #(pi_n(S), sup, eps) with covering data for
// the dynamical metric tau_n(x,y) = max_{0<=t<n} tau(shift^t x, shift^t y)
// evaluated on extended windows of length n + 2m, and verifies the two
// inequalities behind their equivalence:
//   (1) tau_n dominates the sup distance of the length-n projections, so the
//       projection count is at most any tau_n covering count;
//   (2) representatives of the occupied cells of the extended projection form
//       an 8*eps net in tau_n, so the tau_n count at 8*eps is at most the
//       extended projection count at eps.
struct DynamicalCoveringReport {
    std::uint64_t projection_cells = 0;
    std::uint64_t dynamical_packing_lower = 0;
    std::uint64_t dynamical_greedy_upper = 0;
    std::uint64_t extended_projection_cells = 0;
    bool domination_ok = false; // (1)
    bool net_ok = false;        // (2)
    bool ok() const { return domination_ok && net_ok; }
};

namespace detail {

// tau_n over extended words u, v of length n + 2m (coordinates -m+1 .. n+m)
inline double tau_n_extended(const std::vector<double>& u, const std::vector<double>& v, int n, int m) {
    double worst = 0.0;
    const int len = static_cast<int>(u.size());
    for (int t = 0; t < n; ++t) {
        double s = 0.0;
        for (int i = 0; i < len; ++i) {
            int abs_coord = i - (m - 1); // coordinate index of slot i
            s += std::ldexp(1.0, -std::abs(abs_coord - t)) * std::abs(u[static_cast<std::size_t>(i)] -
                                                                      v[static_cast<std::size_t>(i)]);
        }
        worst = std::max(worst, s);
    }
    return worst;
}

} // namespace detail

inline DynamicalCoveringReport dynamical_covering_check(const SubshiftFamily& family, int n, int m,
                                                        int j, const DyadicGrid& grid,
                                                        const Budget& budget = {}) {
    if (n > 6 || grid.bits > 3) throw budget_error("dynamical check limited to n <= 6, b <= 3");
    DynamicalCoveringReport rep;
    const double eps = std::ldexp(1.0, -j);
    const int ext = n + 2 * m;
    auto ext_words = enumerate_words(family, ext, grid, budget);

    // projection count over the inner window (slots m-1 .. m-1+n-1)
    std::unordered_set<std::string> proj_cells, ext_cells;
    for (const Block& w : ext_words) {
        std::string inner;
        for (int i = 0; i < n; ++i)
            detail::append_cell(inner, DyadicGrid::cell_index(w.values[static_cast<std::size_t>(m - 1 + i)], j));
        proj_cells.insert(inner);
        ext_cells.insert(detail::cell_key(w, j));
    }
    rep.projection_cells = proj_cells.size();
    rep.extended_projection_cells = ext_cells.size();

    // (1) pointwise domination across all pairs
    rep.domination_ok = true;
    for (std::size_t a = 0; a < ext_words.size() && rep.domination_ok; ++a)
        for (std::size_t b = a + 1; b < ext_words.size(); ++b) {
            double dyn = detail::tau_n_extended(ext_words[a].values, ext_words[b].values, n, m);
            double proj = 0.0;
            for (int i = 0; i < n; ++i)
                proj = std::max(proj, std::abs(ext_words[a].values[static_cast<std::size_t>(m - 1 + i)] -
                                               ext_words[b].values[static_cast<std::size_t>(m - 1 + i)]));
            if (dyn + 1e-12 < proj) {
                rep.domination_ok = false;
                break;
            }
        }

    // greedy tau_n cover and packing at eps
    {
        std::vector<bool> covered(ext_words.size(), false);
        for (std::size_t a = 0; a < ext_words.size(); ++a) {
            if (covered[a]) continue;
            ++rep.dynamical_greedy_upper;
            for (std::size_t b = a; b < ext_words.size(); ++b)
                if (!covered[b] &&
                    detail::tau_n_extended(ext_words[a].values, ext_words[b].values, n, m) < eps / 2.0)
                    covered[b] = true;
        }
        std::vector<std::size_t> chosen;
        for (std::size_t a = 0; a < ext_words.size(); ++a) {
            bool far = true;
            for (std::size_t c : chosen)
                if (detail::tau_n_extended(ext_words[a].values, ext_words[c].values, n, m) < eps) {
                    far = false;
                    break;
                }
            if (far) chosen.push_back(a);
        }
        rep.dynamical_packing_lower = chosen.size();
    }

    // (2) cell representatives of the extended projection are an 8*eps net
    {
        std::map<std::string, std::size_t> reps;
        for (std::size_t a = 0; a < ext_words.size(); ++a)
            reps.emplace(detail::cell_key(ext_words[a], j), a); // first word per cell
        rep.net_ok = true;
        for (const Block& w : ext_words) {
            std::size_t r = reps.at(detail::cell_key(w, j));
            if (detail::tau_n_extended(w.values, ext_words[r].values, n, m) >= 8.0 * eps) {
                rep.net_ok = false;
                break;
            }
        }
    }
    return rep;
}

} // namespace anacomp
