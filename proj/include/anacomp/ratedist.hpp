// Rate-distortion functions on quantized alphabets: mutual information,
// distortion tables, an alternating-minimization solver with slope bisection,
// per-measure rate-distortion curves with the inf-over-n evaluation rule,
// rate-distortion dimension, the compression-rate lower bound they induce,
// and the variational estimate against a battery of measures.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "anacomp/model.hpp"

namespace anacomp {

// ---------------------------------------------------------------------------
// Joint pmf and mutual information
// ---------------------------------------------------------------------------

struct JointPMF {
    std::vector<Block> source_alphabet;
    std::vector<Block> reproduction_alphabet;
    std::vector<double> table; // row-major |X| x |Y|

    double& at(std::size_t x, std::size_t y) { return table[x * reproduction_alphabet.size() + y]; }
    double at(std::size_t x, std::size_t y) const { return table[x * reproduction_alphabet.size() + y]; }

    void validate() const {
        double total = 0.0;
        for (double v : table) {
            if (v < 0.0) throw std::invalid_argument("joint pmf has a negative entry");
            total += v;
        }
        if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("joint pmf mass must be 1 within 1e-12");
    }

    std::vector<double> marginal_x() const {
        std::vector<double> m(source_alphabet.size(), 0.0);
        for (std::size_t x = 0; x < source_alphabet.size(); ++x)
            for (std::size_t y = 0; y < reproduction_alphabet.size(); ++y) m[x] += at(x, y);
        return m;
    }
    std::vector<double> marginal_y() const {
        std::vector<double> m(reproduction_alphabet.size(), 0.0);
        for (std::size_t x = 0; x < source_alphabet.size(); ++x)
            for (std::size_t y = 0; y < reproduction_alphabet.size(); ++y) m[y] += at(x, y);
        return m;
    }
};

inline double entropy_bits(const std::vector<double>& p) {
    double h = 0.0;
    for (double v : p)
        if (v > 0.0) h -= v * std::log2(v);
    return h;
}

// sum p(x,y) log2 p(x,y) / (p(x) p(y)); zero-mass terms contribute 0
inline double mutual_information(const JointPMF& joint) {
    joint.validate();
    auto px = joint.marginal_x();
    auto py = joint.marginal_y();
    double info = 0.0;
    for (std::size_t x = 0; x < px.size(); ++x)
        for (std::size_t y = 0; y < py.size(); ++y) {
            double v = joint.at(x, y);
            if (v > 0.0) info += v * std::log2(v / (px[x] * py[y]));
        }
    return std::max(info, 0.0);
}

// Entry (x,y) = (1/n) sum_k |x_k - y_k|^p, the p-th power of the normalized
// l^p distance.
inline std::vector<double> distortion_table(const std::vector<Block>& xs, const std::vector<Block>& ys,
                                            double p) {
    if (std::isinf(p) || p < 1.0) throw std::invalid_argument("distortion table needs finite p >= 1");
    std::vector<double> d(xs.size() * ys.size());
    for (std::size_t a = 0; a < xs.size(); ++a) {
        if (!ys.empty() && xs[a].length() != ys[0].length())
            throw dimension_error("distortion table: alphabet dimension mismatch");
        for (std::size_t b = 0; b < ys.size(); ++b) {
            double s = 0.0;
            for (int i = 0; i < xs[a].length(); ++i)
                s += std::pow(std::abs(xs[a].values[static_cast<std::size_t>(i)] -
                                       ys[b].values[static_cast<std::size_t>(i)]), p);
            d[a * ys.size() + b] = s / xs[a].length();
        }
    }
    return d;
}

// ---------------------------------------------------------------------------
// Alternating-minimization solver
// ---------------------------------------------------------------------------

struct BAResult {
    double rate_bits = 0.0;          // bits for the whole block
    double achieved_distortion = 0.0;
    int iterations = 0;
    double slope = 0.0; // Lagrange multiplier at the returned point
    bool converged = true;
};

struct ba_error : std::runtime_error {
    BAResult last;
    ba_error(const std::string& msg, BAResult r) : std::runtime_error(msg), last(r) {}
};

namespace detail {

struct BAState {
    double rate = 0.0, distortion = 0.0;
    int iterations = 0;
};

// fixed-slope alternating minimization; q is warm-started across calls.
// Per-row minimum distortions are factored out of the exponentials so very
// steep slopes stay finite.
inline BAState ba_fixed_slope(const std::vector<double>& px, const std::vector<double>& d,
                              std::size_t ny, double slope, std::vector<double>& q, double tol,
                              int max_iter) {
    const std::size_t nx = px.size();
    std::vector<double> dmin(nx, std::numeric_limits<double>::infinity());
    for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t y = 0; y < ny; ++y) dmin[x] = std::min(dmin[x], d[x * ny + y]);
    std::vector<double> E(nx * ny);
    for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t y = 0; y < ny; ++y) E[x * ny + y] = std::exp(slope * (d[x * ny + y] - dmin[x]));

    BAState st;
    std::vector<double> z(nx), qn(ny);
    double prev_rate = -1.0, prev_dist = -1.0;
    for (st.iterations = 1; st.iterations <= max_iter; ++st.iterations) {
        for (std::size_t x = 0; x < nx; ++x) {
            double s = 0.0;
            const double* row = &E[x * ny];
            for (std::size_t y = 0; y < ny; ++y) s += q[y] * row[y];
            z[x] = s;
        }
        std::fill(qn.begin(), qn.end(), 0.0);
        double dist = 0.0, rate = 0.0;
        for (std::size_t x = 0; x < nx; ++x) {
            const double* row = &E[x * ny];
            const double* drow = &d[x * ny];
            const double scale = px[x] / z[x];
            for (std::size_t y = 0; y < ny; ++y) {
                double w = scale * q[y] * row[y];
                if (w > 0.0) {
                    qn[y] += w;
                    dist += w * drow[y];
                    rate += w * std::log2(row[y] / z[x]);
                }
            }
        }
        q.swap(qn);
        st.distortion = dist;
        st.rate = std::max(rate, 0.0);
        if (std::abs(st.rate - prev_rate) < tol && std::abs(st.distortion - prev_dist) < tol) break;
        prev_rate = st.rate;
        prev_dist = st.distortion;
    }
    return st;
}

} // namespace detail

// Minimal I(X;Y) in bits over conditionals with expected distortion at most
// `target` (in table units). Slope-parameter bisection, deterministic uniform
// initialization; the achieved distortion never exceeds the target, so the
// returned rate upper-bounds the true value at the target by at most the
// solver tolerance.
inline BAResult blahut_arimoto(const std::vector<double>& px, const std::vector<double>& d,
                               std::size_t ny, double target, double tol = 1e-9,
                               int max_iter = 10000) {
    const std::size_t nx = px.size();
    if (nx == 0 || ny == 0 || d.size() != nx * ny) throw std::invalid_argument("bad solver inputs");
    double mass = 0.0;
    for (double v : px) mass += v;
    if (std::abs(mass - 1.0) > 1e-9) throw std::invalid_argument("source pmf mass must be 1");

    // distortion of the best constant reproduction
    double dmax = std::numeric_limits<double>::infinity();
    for (std::size_t y = 0; y < ny; ++y) {
        double s = 0.0;
        for (std::size_t x = 0; x < nx; ++x) s += px[x] * d[x * ny + y];
        dmax = std::min(dmax, s);
    }
    double dmin = 0.0;
    for (std::size_t x = 0; x < nx; ++x) {
        double m = std::numeric_limits<double>::infinity();
        for (std::size_t y = 0; y < ny; ++y) m = std::min(m, d[x * ny + y]);
        dmin += px[x] * m;
    }
    if (target >= dmax - 1e-15) return {0.0, dmax, 0, 0.0, true};
    if (target < dmin - 1e-12)
        throw ba_error("target distortion below the attainable minimum", {0.0, dmin, 0, 0.0, false});
    if (target <= dmin + 1e-15) {
        // zero-slack case: deterministic assignment to a minimizing column
        std::vector<double> qy(ny, 0.0);
        for (std::size_t x = 0; x < nx; ++x) {
            std::size_t best = 0;
            for (std::size_t y = 1; y < ny; ++y)
                if (d[x * ny + y] < d[x * ny + best]) best = y;
            qy[best] += px[x];
        }
        return {entropy_bits(qy), dmin, 0, -std::numeric_limits<double>::infinity(), true};
    }

    std::vector<double> q(ny, 1.0 / static_cast<double>(ny));
    double s_hi = -1e-9; // distortion near dmax
    double s_lo = -1.0;
    detail::BAState st_lo;
    int total_iters = 0;
    for (int grow = 0; grow < 40; ++grow) {
        st_lo = detail::ba_fixed_slope(px, d, ny, s_lo, q, tol, max_iter);
        total_iters += st_lo.iterations;
        if (st_lo.distortion <= target) break;
        s_lo *= 8.0;
        if (grow == 39)
            throw ba_error("slope search failed to bracket the target distortion",
                           {st_lo.rate, st_lo.distortion, total_iters, s_lo, false});
    }
    detail::BAState best = st_lo;
    double best_slope = s_lo;
    for (int it = 0; it < 60; ++it) {
        double mid = -std::sqrt(s_lo * s_hi);
        auto st = detail::ba_fixed_slope(px, d, ny, mid, q, tol, max_iter);
        total_iters += st.iterations;
        if (st.distortion <= target) {
            s_lo = mid;
            if (st.distortion >= best.distortion) {
                best = st;
                best_slope = mid;
            }
        } else {
            s_hi = mid;
        }
        if (target - best.distortion < tol * (1.0 + target)) break;
    }
    return {best.rate, best.distortion, total_iters, best_slope, true};
}

// ---------------------------------------------------------------------------
// Rate-distortion curves
// ---------------------------------------------------------------------------

struct RDPoint {
    double eps = 0.0;      // distortion parameter (target is eps^p)
    double rate = 0.0;     // bits per coordinate after the inf-over-n rule
    double achieved_distortion = 0.0;
    int iterations = 0;
    double slope = 0.0;
    int best_n = 0; // block length attaining the inf
};

struct RDCurve {
    std::vector<int> n_schedule;
    double p = 2.0;
    std::vector<RDPoint> points;               // sorted by decreasing eps
    std::vector<std::vector<double>> per_n;    // per (eps index, n index) rates per coordinate
    bool inf_over_n = true;

    double max_rate() const {
        double m = 0.0;
        for (const auto& pt : points) m = std::max(m, pt.rate);
        return m;
    }
};

// Per-measure curve: for each (n, eps) the n-block source pmf on the grid is
// solved against the full grid reproduction alphabet and divided by n; the
// curve takes the inf over the n schedule per eps. Restricting reproductions
// to the grid overestimates the rate by at most the quantization distortion.
inline RDCurve rd_function(const MeasureSpec& measure, std::vector<int> n_schedule, double p,
                           std::vector<double> eps_schedule, const DyadicGrid& grid,
                           const Budget& budget = {}, double tol = 1e-9, int max_iter = 10000) {
    if (std::isinf(p) || p < 1.0) throw std::invalid_argument("rate-distortion needs finite p >= 1");
    std::sort(n_schedule.begin(), n_schedule.end());
    std::sort(eps_schedule.begin(), eps_schedule.end(), std::greater<>());
    RDCurve curve;
    curve.n_schedule = n_schedule;
    curve.p = p;
    curve.per_n.assign(eps_schedule.size(), std::vector<double>(n_schedule.size(), 0.0));
    curve.points.assign(eps_schedule.size(), {});

    for (std::size_t ni = 0; ni < n_schedule.size(); ++ni) {
        const int n = n_schedule[ni];
        auto sup = enumerate_support(measure, n, grid, budget);
        if (!sup) throw budget_error("n-marginal support not enumerable at n=" + std::to_string(n));
        std::vector<Block> xs;
        std::vector<double> px;
        for (auto& [b, pr] : *sup) {
            xs.push_back(b);
            px.push_back(pr);
        }
        // reproduction alphabet: full grid words
        double y_count = std::pow(static_cast<double>(grid.levels()), n);
        if (y_count * static_cast<double>(xs.size()) > budget.max_joint_entries)
            throw budget_error("joint table budget exceeded at n=" + std::to_string(n));
        std::vector<Block> ys;
        {
            std::vector<std::int64_t> idx(static_cast<std::size_t>(n), 0);
            while (true) {
                std::vector<double> v(static_cast<std::size_t>(n));
                for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = grid.from_index(idx[static_cast<std::size_t>(i)]);
                ys.emplace_back(std::move(v), grid);
                int k = n - 1;
                while (k >= 0 && ++idx[static_cast<std::size_t>(k)] == grid.levels()) idx[static_cast<std::size_t>(k--)] = 0;
                if (k < 0) break;
            }
        }
        auto d = distortion_table(xs, ys, p);
        for (std::size_t ei = 0; ei < eps_schedule.size(); ++ei) {
            const double eps = eps_schedule[ei];
            auto res = blahut_arimoto(px, d, ys.size(), std::pow(eps, p), tol, max_iter);
            double per_coord = res.rate_bits / n;
            curve.per_n[ei][ni] = per_coord;
            auto& pt = curve.points[ei];
            if (ni == 0 || per_coord < pt.rate) {
                pt = {eps, per_coord, res.achieved_distortion, res.iterations, res.slope, n};
            }
        }
    }
    return curve;
}

// Slope of the rate against log2(1/eps) at the smallest tabulated eps, with a
// least-squares diagnostic over the whole curve.
struct RDDimension {
    double value = 0.0;
    double ls_slope = 0.0;
};

inline RDDimension rd_dimension(const RDCurve& curve) {
    if (curve.points.size() < 2) throw std::invalid_argument("rate-distortion dimension needs >= 2 points");
    std::vector<double> xs, ys;
    for (const auto& pt : curve.points) {
        xs.push_back(std::log2(1.0 / pt.eps));
        ys.push_back(pt.rate);
    }
    RDDimension out;
    const std::size_t last = xs.size() - 1;
    out.value = (ys[last] - ys[last - 1]) / (xs[last] - xs[last - 1]);
    double n = static_cast<double>(xs.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    double denom = n * sxx - sx * sx;
    out.ls_slope = denom == 0.0 ? 0.0 : (n * sxy - sx * sy) / denom;
    return out;
}

// ---------------------------------------------------------------------------
// Compression-rate lower bound from a rate-distortion curve
// ---------------------------------------------------------------------------

// For a mean-l^p error eps achieved by a Borel encoder with an (L,alpha)
// Holder decoder in the same norm, the rate per coordinate is at least
//   R( ((L^p/2^(p*alpha)) + eps^(p(1-alpha)))^(1/p) * eps^alpha ) / log2(ceil(1/eps)).
// For sup-norm decoders eps is the mismatch probability and the p=1 curve is
// used with argument (L/2^alpha + eps^(1-alpha)) * eps^alpha.
//
// The curve is looked up conservatively: the rate at the next larger
// tabulated distortion, so the reported bound is never spuriously large.
inline double rd_rate_lower_bound(const RDCurve& curve, double eps, double L, double alpha,
                                  double p) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("bound needs eps in (0,1)");
    double arg;
    if (std::isinf(p)) {
        if (curve.p != 1.0) throw std::invalid_argument("sup-norm bound needs the p=1 curve");
        arg = (L / std::pow(2.0, alpha) + std::pow(eps, 1.0 - alpha)) * std::pow(eps, alpha);
    } else {
        arg = std::pow(std::pow(L, p) / std::pow(2.0, p * alpha) + std::pow(eps, p * (1.0 - alpha)),
                       1.0 / p) *
              std::pow(eps, alpha);
    }
    // smallest tabulated eps' >= arg (points sorted by decreasing eps)
    std::optional<double> rate;
    for (const auto& pt : curve.points) {
        if (pt.eps >= arg) rate = pt.rate;
        else break;
    }
    if (!rate) {
        if (arg < curve.points.back().eps)
            throw std::invalid_argument("distortion argument below the tabulated range");
        rate = 0.0; // beyond the largest tabulated distortion the bound degenerates
    }
    return *rate / std::log2(std::ceil(1.0 / eps));
}

// ---------------------------------------------------------------------------
// Variational estimate
// ---------------------------------------------------------------------------

struct VariationalEstimate {
    std::vector<double> eps;
    std::vector<double> sup_ratio; // sup over the battery of R(eps)/log2(1/eps)
    std::vector<std::size_t> arg_measure;
    double at_finest() const { return sup_ratio.back(); }
    double endpoint_slope = 0.0; // slope of sup R against log2(1/eps), bias-cancelling diagnostic
};

// Supremum over a battery of measures of R(eps)/log2(1/eps), the finite-scale
// variational quantity matching the metric mean dimension in the limit. Every
// measure is checked to be supported in the family by sampling.
inline VariationalEstimate variational_estimate(const std::vector<MeasureSpec>& measures,
                                                const SubshiftFamily& family,
                                                std::vector<double> eps_schedule, double p,
                                                std::vector<int> n_schedule, const DyadicGrid& grid,
                                                const Budget& budget = {}, int support_samples = 1000,
                                                std::uint64_t seed = 11) {
    if (measures.empty()) throw std::invalid_argument("empty measure battery");
    const int n_check = *std::max_element(n_schedule.begin(), n_schedule.end());
    for (std::size_t mi = 0; mi < measures.size(); ++mi) {
        auto samples = sample_windows(measures[mi], n_check, support_samples, split_seed(seed, mi), grid);
        for (std::size_t si = 0; si < samples.size(); ++si)
            if (!contains(family, samples[si], grid))
                throw std::invalid_argument("measure " + measures[mi].name() + " leaves the family " +
                                            family.name() + " (sample " + std::to_string(si) + ")");
    }
    std::sort(eps_schedule.begin(), eps_schedule.end(), std::greater<>());
    VariationalEstimate est;
    est.eps = eps_schedule;
    est.sup_ratio.assign(eps_schedule.size(), 0.0);
    est.arg_measure.assign(eps_schedule.size(), 0);
    std::vector<double> sup_rate(eps_schedule.size(), 0.0);
    for (std::size_t mi = 0; mi < measures.size(); ++mi) {
        auto curve = rd_function(measures[mi], n_schedule, p, eps_schedule, grid, budget);
        for (std::size_t ei = 0; ei < eps_schedule.size(); ++ei) {
            double ratio = curve.points[ei].rate / std::log2(1.0 / eps_schedule[ei]);
            if (ratio >= est.sup_ratio[ei]) {
                est.sup_ratio[ei] = ratio;
                est.arg_measure[ei] = mi;
            }
            sup_rate[ei] = std::max(sup_rate[ei], curve.points[ei].rate);
        }
    }
    if (eps_schedule.size() >= 2) {
        const std::size_t last = eps_schedule.size() - 1;
        double dx = std::log2(1.0 / eps_schedule[last]) - std::log2(1.0 / eps_schedule[last - 1]);
        est.endpoint_slope = (sup_rate[last] - sup_rate[last - 1]) / dx;
    }
    return est;
}

} // namespace anacomp
