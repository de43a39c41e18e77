// Domain types: dyadic grids, blocks, subshift families, stationary measure
// specifications and the basic distances on blocks.
//
// All coordinates live on a dyadic grid {i*2^-b : 0 <= i <= 2^b}. Dyadic
// rationals are exact in an IEEE double up to b = 52 bits, so quantized
// values, cell indices and roundtrips carry no floating point ambiguity.
#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "anacomp/rng.hpp"

namespace anacomp {

constexpr double kInfNorm = std::numeric_limits<double>::infinity();

struct budget_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct dimension_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct Budget {
    double max_words = 1e8;       // enumeration cap
    double max_joint_entries = 1e7; // rate-distortion table cap
};

// ---------------------------------------------------------------------------
// DyadicGrid
// ---------------------------------------------------------------------------

struct DyadicGrid {
    int bits = 6; // b >= 1; coordinates are multiples of 2^-b

    explicit DyadicGrid(int b = 6) : bits(b) {
        if (b < 1 || b > 40) throw std::invalid_argument("grid bits must be in [1,40]");
    }

    std::int64_t levels() const { return (std::int64_t{1} << bits) + 1; }
    double step() const { return std::ldexp(1.0, -bits); }

    // nearest grid point, ties away from zero; idempotent on grid points
    double quantize(double x) const {
        double clamped = std::clamp(x, 0.0, 1.0);
        return std::ldexp(std::llround(std::ldexp(clamped, bits)), -bits);
    }

    bool on_grid(double x) const {
        if (x < 0.0 || x > 1.0) return false;
        double scaled = std::ldexp(x, bits);
        return scaled == std::floor(scaled);
    }

    std::int64_t to_index(double x) const { return std::llround(std::ldexp(x, bits)); }
    double from_index(std::int64_t i) const { return std::ldexp(static_cast<double>(i), -bits); }

    // Half-open cells [i*2^-j,(i+1)*2^-j), last cell closed. Requires j <= bits
    // so cells are resolvable on the grid.
    static std::int64_t cell_index(double x, int j) {
        auto c = static_cast<std::int64_t>(std::floor(std::ldexp(x, j)));
        return std::min(c, (std::int64_t{1} << j) - 1);
    }
};

// ---------------------------------------------------------------------------
// Block
// ---------------------------------------------------------------------------

struct Block {
    std::vector<double> values;
    int bits = 6;

    Block() = default;
    Block(std::vector<double> v, const DyadicGrid& grid) : values(std::move(v)), bits(grid.bits) {
        for (double x : values) {
            if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("block value outside [0,1]");
            if (!grid.on_grid(x)) throw std::invalid_argument("block value off the dyadic grid");
        }
    }

    int length() const { return static_cast<int>(values.size()); }
    DyadicGrid grid() const { return DyadicGrid(bits); }

    bool operator==(const Block& o) const { return values == o.values; }
    bool operator<(const Block& o) const { return values < o.values; }
};

inline Block zero_block(int n, const DyadicGrid& grid) {
    return Block(std::vector<double>(static_cast<std::size_t>(n), 0.0), grid);
}

// ---------------------------------------------------------------------------
// Distances
// ---------------------------------------------------------------------------

// Normalized l^p distance: ((1/n) sum |x_k-y_k|^p)^(1/p); max for p = inf.
inline double norm_distance(const std::vector<double>& x, const std::vector<double>& y, double p) {
    if (x.size() != y.size()) throw dimension_error("norm_distance: length mismatch");
    if (x.empty()) return 0.0;
    if (std::isinf(p)) {
        double m = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) m = std::max(m, std::abs(x[k] - y[k]));
        return m;
    }
    if (p < 1.0) throw std::invalid_argument("norm index p must be >= 1");
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) s += std::pow(std::abs(x[k] - y[k]), p);
    return std::pow(s / static_cast<double>(x.size()), 1.0 / p);
}

inline double norm_distance(const Block& x, const Block& y, double p) {
    return norm_distance(x.values, y.values, p);
}

// Product-metric distance sum_{|i|<=w} 2^-|i| |x_i - y_i| on symmetric windows
// covering coordinates -w..w (odd length, index w is the center). Truncation
// error against the bi-infinite sum is at most 2^-(w-2) (values bounded by 1).
inline double tau_distance(const Block& x, const Block& y) {
    if (x.length() != y.length()) throw dimension_error("tau_distance: window extents differ");
    if (x.length() % 2 == 0) throw dimension_error("tau_distance: window length must be odd");
    const int w = (x.length() - 1) / 2;
    double s = 0.0;
    for (int i = -w; i <= w; ++i)
        s += std::ldexp(1.0, -std::abs(i)) * std::abs(x.values[static_cast<std::size_t>(i + w)] -
                                                      y.values[static_cast<std::size_t>(i + w)]);
    return s;
}

struct SupportInfo {
    std::vector<int> indices;
    int size() const { return static_cast<int>(indices.size()); }
};

inline SupportInfo support(const Block& x) {
    SupportInfo s;
    for (int i = 0; i < x.length(); ++i)
        if (x.values[static_cast<std::size_t>(i)] != 0.0) s.indices.push_back(i);
    return s;
}

inline int support_size(const Block& x) { return support(x).size(); }

// ---------------------------------------------------------------------------
// Subshift families
// ---------------------------------------------------------------------------

struct FullShift {
    // empty alphabet means the whole dyadic grid
    std::vector<double> alphabet;
};

struct SparseNK {
    int window;      // N
    int max_support; // K <= N, max nonzeros per length-N window
};

struct VanishingCubes {
    int m_max; // largest cube index m; cube [0,2^-m]^m on m consecutive coordinates
};

struct ReciprocalAlphabet {
    int n_max; // alphabet {0} union {1/n : n <= n_max}, rounded to the grid
};

struct SubshiftFamily {
    std::variant<FullShift, SparseNK, VanishingCubes, ReciprocalAlphabet> spec;

    static SubshiftFamily full_grid() { return {FullShift{}}; }
    static SubshiftFamily full(std::vector<double> alphabet) {
        std::sort(alphabet.begin(), alphabet.end());
        alphabet.erase(std::unique(alphabet.begin(), alphabet.end()), alphabet.end());
        if (alphabet.empty()) throw std::invalid_argument("explicit alphabet must be nonempty");
        return {FullShift{std::move(alphabet)}};
    }
    static SubshiftFamily sparse(int N, int K) {
        if (K < 0 || K > N || N < 1) throw std::invalid_argument("sparse family needs 0 <= K <= N");
        return {SparseNK{N, K}};
    }
    static SubshiftFamily vanishing_cubes(int m_max) {
        if (m_max < 1) throw std::invalid_argument("m_max must be >= 1");
        return {VanishingCubes{m_max}};
    }
    static SubshiftFamily reciprocal(int n_max) {
        if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
        return {ReciprocalAlphabet{n_max}};
    }

    std::string name() const {
        struct V {
            std::string operator()(const FullShift& f) const {
                return f.alphabet.empty() ? "full-grid" : "full-alphabet(" + std::to_string(f.alphabet.size()) + ")";
            }
            std::string operator()(const SparseNK& s) const {
                return "sparse(N=" + std::to_string(s.window) + ",K=" + std::to_string(s.max_support) + ")";
            }
            std::string operator()(const VanishingCubes& v) const {
                return "vanishing-cubes(m=" + std::to_string(v.m_max) + ")";
            }
            std::string operator()(const ReciprocalAlphabet& r) const {
                return "reciprocal(n=" + std::to_string(r.n_max) + ")";
            }
        };
        return std::visit(V{}, spec);
    }
};

// Alphabet of a reciprocal family realized on a grid, collisions removed.
inline std::vector<double> reciprocal_alphabet_values(const ReciprocalAlphabet& r, const DyadicGrid& grid) {
    std::set<double> vals{0.0};
    for (int n = 1; n <= r.n_max; ++n) vals.insert(grid.quantize(1.0 / n));
    return {vals.begin(), vals.end()};
}

namespace detail {

// span of the support (max index - min index + 1), 0 when empty
inline int support_span(const std::vector<double>& v) {
    int lo = -1, hi = -1;
    for (int i = 0; i < static_cast<int>(v.size()); ++i)
        if (v[static_cast<std::size_t>(i)] != 0.0) {
            if (lo < 0) lo = i;
            hi = i;
        }
    return lo < 0 ? 0 : hi - lo + 1;
}

inline bool vc_admissible(const std::vector<double>& v, int m_max) {
    int span = support_span(v);
    if (span == 0) return true;
    if (span > m_max) return false;
    double mx = 0.0;
    for (double x : v) mx = std::max(mx, x);
    // smallest admissible cube index is the span itself
    return mx <= std::ldexp(1.0, -span);
}

inline bool in_alphabet(double x, const std::vector<double>& alphabet) {
    return std::binary_search(alphabet.begin(), alphabet.end(), x);
}

} // namespace detail

// Window membership. A window is admissible when the family's defining
// condition holds restricted to the window: for sparse families only fully
// contained length-N subwindows are checked, so windows shorter than N are
// unconstrained.
inline bool contains(const SubshiftFamily& family, const Block& window, const DyadicGrid& grid) {
    const auto& v = window.values;
    if (const auto* fs = std::get_if<FullShift>(&family.spec)) {
        if (fs->alphabet.empty()) {
            for (double x : v)
                if (!grid.on_grid(x)) return false;
            return true;
        }
        for (double x : v)
            if (!detail::in_alphabet(x, fs->alphabet)) return false;
        return true;
    }
    if (const auto* sp = std::get_if<SparseNK>(&family.spec)) {
        const int n = window.length(), N = sp->window, K = sp->max_support;
        if (n < N) return true;
        int nz = 0;
        for (int i = 0; i < N; ++i) nz += v[static_cast<std::size_t>(i)] != 0.0;
        if (nz > K) return false;
        for (int j = 1; j + N <= n; ++j) {
            nz -= v[static_cast<std::size_t>(j - 1)] != 0.0;
            nz += v[static_cast<std::size_t>(j + N - 1)] != 0.0;
            if (nz > K) return false;
        }
        return true;
    }
    if (const auto* vc = std::get_if<VanishingCubes>(&family.spec)) {
        return detail::vc_admissible(v, vc->m_max);
    }
    const auto& rc = std::get<ReciprocalAlphabet>(family.spec);
    auto alpha = reciprocal_alphabet_values(rc, grid);
    for (double x : v)
        if (!detail::in_alphabet(x, alpha)) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Word enumeration
// ---------------------------------------------------------------------------

namespace detail {

// Admissible 0/1 support patterns of length n for SparseNK, counted by
// support size. dp over the occupancy of the last N-1 positions.
inline std::vector<double> sparse_pattern_counts(int n, int N, int K) {
    if (N > 24) throw budget_error("sparse pattern dp limited to N <= 24");
    const std::uint32_t mask_all = (N >= 2) ? ((1u << (N - 1)) - 1u) : 0u;
    // dp[mask][s]
    std::vector<std::vector<double>> dp(mask_all + 1, std::vector<double>(static_cast<std::size_t>(n) + 1, 0.0));
    dp[0][0] = 1.0;
    for (int i = 0; i < n; ++i) {
        std::vector<std::vector<double>> nd(mask_all + 1, std::vector<double>(static_cast<std::size_t>(n) + 1, 0.0));
        for (std::uint32_t mask = 0; mask <= mask_all; ++mask)
            for (int s = 0; s <= i; ++s) {
                double c = dp[mask][static_cast<std::size_t>(s)];
                if (c == 0.0) continue;
                for (std::uint32_t o = 0; o <= 1; ++o) {
                    std::uint32_t win = (mask << 1) | o;
                    if (i >= N - 1 && std::popcount(win & ((N >= 32) ? ~0u : ((1u << N) - 1u))) > K) continue;
                    nd[win & mask_all][static_cast<std::size_t>(s + static_cast<int>(o))] += c;
                }
            }
        dp.swap(nd);
    }
    std::vector<double> out(static_cast<std::size_t>(n) + 1, 0.0);
    for (std::uint32_t mask = 0; mask <= mask_all; ++mask)
        for (int s = 0; s <= n; ++s) out[static_cast<std::size_t>(s)] += dp[mask][static_cast<std::size_t>(s)];
    return out;
}

// prefix admissibility used by the lexicographic backtracking enumerator:
// true iff prefix + zeros is an admissible word
inline bool prefix_ok(const SubshiftFamily& family, const std::vector<double>& prefix, int pos,
                      const DyadicGrid& grid, const std::vector<double>* alphabet) {
    if (alphabet) return in_alphabet(prefix[static_cast<std::size_t>(pos)], *alphabet);
    if (const auto* sp = std::get_if<SparseNK>(&family.spec)) {
        const int N = sp->window, K = sp->max_support;
        if (pos + 1 < N) return true;
        int nz = 0;
        for (int i = pos - N + 1; i <= pos; ++i) nz += prefix[static_cast<std::size_t>(i)] != 0.0;
        return nz <= K;
    }
    if (const auto* vc = std::get_if<VanishingCubes>(&family.spec)) {
        std::vector<double> head(prefix.begin(), prefix.begin() + pos + 1);
        return vc_admissible(head, vc->m_max);
    }
    (void)grid;
    return true;
}

} // namespace detail

// log2 of #(pi_n(S) on the grid); closed forms where available, used for
// budget checks before any enumeration.
inline double log2_word_count(const SubshiftFamily& family, int n, const DyadicGrid& grid) {
    if (const auto* fs = std::get_if<FullShift>(&family.spec)) {
        double a = fs->alphabet.empty() ? static_cast<double>(grid.levels())
                                        : static_cast<double>(fs->alphabet.size());
        return n * std::log2(a);
    }
    if (const auto* rc = std::get_if<ReciprocalAlphabet>(&family.spec)) {
        return n * std::log2(static_cast<double>(reciprocal_alphabet_values(*rc, grid).size()));
    }
    if (const auto* sp = std::get_if<SparseNK>(&family.spec)) {
        auto cs = detail::sparse_pattern_counts(n, sp->window, sp->max_support);
        double nonzero = static_cast<double>(grid.levels() - 1);
        double total = 0.0;
        for (std::size_t s = 0; s < cs.size(); ++s) total += cs[s] * std::pow(nonzero, static_cast<double>(s));
        return std::log2(total);
    }
    const auto& vc = std::get<VanishingCubes>(family.spec);
    // overcount (placements may repeat words); good enough for a budget bound
    double total = 1.0;
    for (int m = 1; m <= vc.m_max; ++m) {
        double per = static_cast<double>((std::int64_t{1} << std::max(0, grid.bits - m)) + 1);
        for (int t = -(m - 1); t < n; ++t) {
            int len = std::min(n - 1, t + m - 1) - std::max(0, t) + 1;
            if (len > 0) total += std::pow(per, len);
        }
    }
    return std::log2(total);
}

// Streams pi_n(S) intersected with the grid in lexicographic order.
inline void for_each_word(const SubshiftFamily& family, int n, const DyadicGrid& grid,
                          const Budget& budget, const std::function<void(const Block&)>& fn) {
    if (n < 1) throw std::invalid_argument("word length must be positive");
    if (log2_word_count(family, n, grid) > std::log2(budget.max_words))
        throw budget_error("enumeration budget exceeded for " + family.name() +
                           " at n=" + std::to_string(n) + ", b=" + std::to_string(grid.bits));
    std::optional<std::vector<double>> alphabet;
    if (const auto* fs = std::get_if<FullShift>(&family.spec)) {
        alphabet = fs->alphabet.empty() ? std::vector<double>{} : fs->alphabet;
        if (alphabet->empty()) {
            alphabet->reserve(static_cast<std::size_t>(grid.levels()));
            for (std::int64_t i = 0; i < grid.levels(); ++i) alphabet->push_back(grid.from_index(i));
        }
    } else if (const auto* rc = std::get_if<ReciprocalAlphabet>(&family.spec)) {
        alphabet = reciprocal_alphabet_values(*rc, grid);
    }

    std::vector<double> word(static_cast<std::size_t>(n), 0.0);
    std::vector<double> values;
    if (alphabet) {
        values = *alphabet;
    } else {
        values.reserve(static_cast<std::size_t>(grid.levels()));
        for (std::int64_t i = 0; i < grid.levels(); ++i) values.push_back(grid.from_index(i));
    }
    const std::vector<double>* alpha_ptr = alphabet ? &*alphabet : nullptr;

    std::function<void(int)> rec = [&](int pos) {
        if (pos == n) {
            fn(Block(word, grid));
            return;
        }
        for (double v : values) {
            word[static_cast<std::size_t>(pos)] = v;
            if (detail::prefix_ok(family, word, pos, grid, alpha_ptr)) rec(pos + 1);
        }
        word[static_cast<std::size_t>(pos)] = 0.0;
    };
    rec(0);
}

inline std::vector<Block> enumerate_words(const SubshiftFamily& family, int n, const DyadicGrid& grid,
                                          const Budget& budget = {}) {
    std::vector<Block> out;
    for_each_word(family, n, grid, budget, [&](const Block& b) { out.push_back(b); });
    return out;
}

// ---------------------------------------------------------------------------
// Measures
// ---------------------------------------------------------------------------

struct ProductIID {
    std::vector<double> values; // grid points
    std::vector<double> probs;  // same length, nonnegative, sums to 1
};

// (1/N) sum_j shift^j of the product of nu-blocks, where nu is uniform on the
// grid over the first K block coordinates and a point mass at 0 elsewhere.
// Stationary by construction and supported in the (N,K)-sparse family.
struct ShiftAverageProduct {
    int window;      // N
    int max_support; // K
};

struct Empirical {
    std::vector<Block> samples;
    std::vector<double> weights; // normalized on construction
};

struct MeasureSpec {
    std::variant<ProductIID, ShiftAverageProduct, Empirical> spec;

    static MeasureSpec product_iid(std::vector<double> values, std::vector<double> probs) {
        if (values.size() != probs.size() || values.empty())
            throw std::invalid_argument("marginal values/probs mismatch");
        double total = 0.0;
        for (double p : probs) {
            if (p < 0.0) throw std::invalid_argument("negative probability");
            total += p;
        }
        if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("marginal mass must be 1 within 1e-12");
        return {ProductIID{std::move(values), std::move(probs)}};
    }
    static MeasureSpec uniform_iid(const DyadicGrid& grid) {
        std::vector<double> vals, probs;
        for (std::int64_t i = 0; i < grid.levels(); ++i) {
            vals.push_back(grid.from_index(i));
            probs.push_back(1.0 / static_cast<double>(grid.levels()));
        }
        return product_iid(std::move(vals), std::move(probs));
    }
    static MeasureSpec uniform_iid_on(std::vector<double> values) {
        std::vector<double> probs(values.size(), 1.0 / static_cast<double>(values.size()));
        return product_iid(std::move(values), std::move(probs));
    }
    static MeasureSpec shift_average(int N, int K) {
        if (K < 0 || K > N || N < 1) throw std::invalid_argument("shift-average needs 0 <= K <= N");
        return {ShiftAverageProduct{N, K}};
    }
    static MeasureSpec empirical(std::vector<Block> samples, std::vector<double> weights) {
        if (samples.empty() || samples.size() != weights.size())
            throw std::invalid_argument("empirical samples/weights mismatch");
        double total = 0.0;
        for (double w : weights) {
            if (w < 0.0) throw std::invalid_argument("negative weight");
            total += w;
        }
        if (total <= 0.0) throw std::invalid_argument("empirical weights sum to zero");
        for (double& w : weights) w /= total;
        return {Empirical{std::move(samples), std::move(weights)}};
    }

    std::string name() const {
        struct V {
            std::string operator()(const ProductIID& p) const {
                return "product-iid(" + std::to_string(p.values.size()) + ")";
            }
            std::string operator()(const ShiftAverageProduct& s) const {
                return "shift-average(N=" + std::to_string(s.window) + ",K=" + std::to_string(s.max_support) + ")";
            }
            std::string operator()(const Empirical& e) const {
                return "empirical(" + std::to_string(e.samples.size()) + ")";
            }
        };
        return std::visit(V{}, spec);
    }
};

namespace detail {

inline std::size_t pick_index(const std::vector<double>& probs, double u) {
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc) return i;
    }
    return probs.size() - 1;
}

} // namespace detail

// i.i.d. draws of x|_0^{n-1}; reproducible bit-for-bit given the seed.
inline std::vector<Block> sample_windows(const MeasureSpec& measure, int n, int count,
                                         std::uint64_t seed, const DyadicGrid& grid) {
    if (count < 1) throw std::invalid_argument("sample count must be >= 1");
    std::vector<Block> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int c = 0; c < count; ++c) {
        Rng rng = Rng::child(seed, static_cast<std::uint64_t>(c));
        std::vector<double> w(static_cast<std::size_t>(n), 0.0);
        if (const auto* pi = std::get_if<ProductIID>(&measure.spec)) {
            for (int i = 0; i < n; ++i)
                w[static_cast<std::size_t>(i)] = pi->values[detail::pick_index(pi->probs, rng.next_unit())];
        } else if (const auto* sa = std::get_if<ShiftAverageProduct>(&measure.spec)) {
            const int N = sa->window, K = sa->max_support;
            auto phase = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(N)));
            const auto levels = static_cast<std::uint64_t>(grid.levels());
            for (int i = 0; i < n; ++i)
                if ((i + phase) % N < K)
                    w[static_cast<std::size_t>(i)] = grid.from_index(static_cast<std::int64_t>(rng.next_below(levels)));
        } else {
            const auto& em = std::get<Empirical>(measure.spec);
            const Block& s = em.samples[detail::pick_index(em.weights, rng.next_unit())];
            if (s.length() < n) throw dimension_error("empirical sample shorter than requested window");
            std::copy(s.values.begin(), s.values.begin() + n, w.begin());
        }
        out.emplace_back(std::move(w), grid);
    }
    return out;
}

// Exact n-marginal as a finite pmf when enumerable within budget; nullopt
// otherwise. Used by the error functionals and the rate-distortion solver.
inline std::optional<std::vector<std::pair<Block, double>>>
enumerate_support(const MeasureSpec& measure, int n, const DyadicGrid& grid, const Budget& budget = {}) {
    std::map<Block, double> acc;
    if (const auto* pi = std::get_if<ProductIID>(&measure.spec)) {
        std::vector<std::pair<double, double>> atoms;
        for (std::size_t i = 0; i < pi->values.size(); ++i)
            if (pi->probs[i] > 0.0) atoms.emplace_back(pi->values[i], pi->probs[i]);
        if (n * std::log2(static_cast<double>(atoms.size())) > std::log2(budget.max_words)) return std::nullopt;
        std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
        std::vector<double> w(static_cast<std::size_t>(n), 0.0);
        while (true) {
            double p = 1.0;
            for (int i = 0; i < n; ++i) {
                w[static_cast<std::size_t>(i)] = atoms[idx[static_cast<std::size_t>(i)]].first;
                p *= atoms[idx[static_cast<std::size_t>(i)]].second;
            }
            acc[Block(w, grid)] += p;
            int k = n - 1;
            while (k >= 0 && ++idx[static_cast<std::size_t>(k)] == atoms.size()) idx[static_cast<std::size_t>(k--)] = 0;
            if (k < 0) break;
        }
    } else if (const auto* sa = std::get_if<ShiftAverageProduct>(&measure.spec)) {
        const int N = sa->window, K = sa->max_support;
        const auto levels = static_cast<std::size_t>(grid.levels());
        for (int phase = 0; phase < N; ++phase) {
            std::vector<int> active;
            for (int i = 0; i < n; ++i)
                if ((i + phase) % N < K) active.push_back(i);
            double total = static_cast<double>(active.size()) * std::log2(static_cast<double>(levels));
            if (total > std::log2(budget.max_words)) return std::nullopt;
            std::vector<std::size_t> idx(active.size(), 0);
            std::vector<double> w(static_cast<std::size_t>(n), 0.0);
            double p = (1.0 / N) * std::pow(1.0 / static_cast<double>(levels), static_cast<double>(active.size()));
            while (true) {
                for (std::size_t a = 0; a < active.size(); ++a)
                    w[static_cast<std::size_t>(active[a])] = grid.from_index(static_cast<std::int64_t>(idx[a]));
                acc[Block(w, grid)] += p;
                if (active.empty()) break;
                std::size_t k = active.size();
                while (k > 0 && ++idx[k - 1] == levels) idx[--k] = 0;
                if (k == 0) break;
            }
        }
    } else {
        const auto& em = std::get<Empirical>(measure.spec);
        for (std::size_t i = 0; i < em.samples.size(); ++i) {
            const Block& s = em.samples[i];
            if (s.length() < n) throw dimension_error("empirical sample shorter than requested window");
            std::vector<double> w(s.values.begin(), s.values.begin() + n);
            acc[Block(w, grid)] += em.weights[i];
        }
    }
    return std::vector<std::pair<Block, double>>(acc.begin(), acc.end());
}

// ---------------------------------------------------------------------------
// Regularity metadata
// ---------------------------------------------------------------------------

enum class RegClass { Borel, Linear, Lipschitz, Holder };

struct HolderSpec {
    RegClass cls = RegClass::Borel;
    double p = kInfNorm; // norm index
    double L = 1.0;      // constant, > 0 for Lipschitz/Holder
    double alpha = 1.0;  // exponent in (0,1]

    static HolderSpec borel() { return {RegClass::Borel, kInfNorm, 0.0, 1.0}; }
    static HolderSpec linear(double p, double L) { return {RegClass::Linear, p, L, 1.0}; }
    static HolderSpec lipschitz(double p, double L) { return {RegClass::Lipschitz, p, L, 1.0}; }
    static HolderSpec holder(double p, double L, double alpha) {
        if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must be in (0,1]");
        if (!(L > 0.0)) throw std::invalid_argument("L must be positive");
        return {RegClass::Holder, p, L, alpha};
    }
};

} // namespace anacomp
