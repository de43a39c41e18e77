// Compressor/decompressor pairs: the sparse support-signature codec, the cube
// quantizer, random linear encoders with nearest-word decoding, totalization
// of partial decoders, regularity certification and the measurable error
// functionals (mismatch probability, excess probability, mean l^p error).
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "anacomp/dimension.hpp"
#include "anacomp/model.hpp"
#include "anacomp/spacefill.hpp"

namespace anacomp {

struct CodecPair {
    int n = 1; // source block length
    int k = 1; // code block length
    std::function<Block(const Block&)> encode; // Block(n) -> Block(k)
    std::function<Block(const Block&)> decode; // Block(k) -> Block(n)
    HolderSpec encoder_reg = HolderSpec::borel();
    HolderSpec decoder_reg = HolderSpec::borel();
    std::string scheme = "identity";
    double rate() const { return static_cast<double>(k) / n; }
};

inline CodecPair identity_codec(int n, const DyadicGrid& grid) {
    CodecPair c;
    c.n = c.k = n;
    c.encode = [](const Block& b) { return b; };
    c.decode = [](const Block& b) { return b; };
    c.encoder_reg = HolderSpec::lipschitz(kInfNorm, 1.0);
    c.decoder_reg = HolderSpec::holder(kInfNorm, 1.0, 1.0);
    c.scheme = "identity";
    (void)grid;
    return c;
}

// ---------------------------------------------------------------------------
// Support families and signatures
// ---------------------------------------------------------------------------

// All subsets of {0..length-1} of the given size in lexicographic order, with
// combinatorial rank/unrank and a maximally separated signature embedding of
// the ranks into [1/2, 1].
struct SupportFamily {
    int length; // lN
    int size;   // lK

    SupportFamily(int length_, int size_) : length(length_), size(size_) {
        if (size < 0 || size > length) throw std::invalid_argument("support size out of range");
        double count_d = binom(length, size);
        if (count_d > 1e15) throw budget_error("support family too large");
        count = static_cast<std::uint64_t>(count_d);
        signature_bits = count > 1
            ? static_cast<int>(std::ceil(std::log2(2.0 * static_cast<double>(count - 1)))) + 2
            : 2;
    }

    static double binom(int n, int k) {
        if (k < 0 || k > n) return 0.0;
        double r = 1.0;
        for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
        return std::round(r);
    }

    std::uint64_t count = 1;
    int signature_bits = 2;

    // lexicographic rank of a sorted index set
    std::uint64_t rank(const std::vector<int>& set) const {
        double r = 0.0;
        int prev = -1;
        for (int i = 0; i < size; ++i) {
            for (int v = prev + 1; v < set[static_cast<std::size_t>(i)]; ++v)
                r += binom(length - v - 1, size - i - 1);
            prev = set[static_cast<std::size_t>(i)];
        }
        return static_cast<std::uint64_t>(r);
    }

    std::vector<int> unrank(std::uint64_t rank_in) const {
        std::vector<int> out;
        out.reserve(static_cast<std::size_t>(size));
        auto r = static_cast<double>(rank_in);
        int v = 0;
        for (int i = 0; i < size; ++i) {
            while (true) {
                double c = binom(length - v - 1, size - i - 1);
                if (r < c) break;
                r -= c;
                ++v;
            }
            out.push_back(v++);
        }
        return out;
    }

    // s(A) = 1/2 + rank/(2(#A-1)) rounded to the signature grid; the grid is
    // fine enough that distinct ranks stay distinct after rounding
    double signature(std::uint64_t r) const {
        if (count <= 1) return 1.0;
        double s = 0.5 + static_cast<double>(r) / (2.0 * static_cast<double>(count - 1));
        return std::ldexp(std::llround(std::ldexp(s, signature_bits)), -signature_bits);
    }

    double signature_gap() const {
        return count > 1 ? 1.0 / (2.0 * static_cast<double>(count - 1)) : 1.0;
    }

    // nearest-signature decoding of a coordinate value
    std::uint64_t nearest_rank(double s) const {
        if (count <= 1) return 0;
        double raw = (s - 0.5) * 2.0 * static_cast<double>(count - 1);
        auto r = static_cast<std::int64_t>(std::llround(raw));
        return static_cast<std::uint64_t>(std::clamp<std::int64_t>(r, 0, static_cast<std::int64_t>(count - 1)));
    }
};

// Support selector: supp(x) completed to size lK with the lowest-index zero
// coordinates of x.
inline std::vector<int> support_selector(const Block& x, int target_size) {
    auto sup = support(x).indices;
    if (static_cast<int>(sup.size()) > target_size)
        throw std::invalid_argument("support_selector: block exceeds the admissible support size");
    std::vector<int> out = sup;
    for (int i = 0; i < x.length() && static_cast<int>(out.size()) < target_size; ++i)
        if (x.values[static_cast<std::size_t>(i)] == 0.0) out.push_back(i);
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// Sparse support-signature codec
// ---------------------------------------------------------------------------

// Scheme: an admissible word of the (N,K)-sparse family at block length lN is
// reduced to its lK support values, compressed through the right inverse of a
// cube surjection psi : [0,1]^d -> [0,1]^lK with d = ceil(alpha*lK) + 1, and
// tagged with the signature of the support set. Off-family inputs map to the
// zero codeword; a zero last coordinate decodes to the zero block.
//
// Values are halved into the half-open corner lattice before indexing and
// doubled (with clipping) on decode, so value 1 roundtrips exactly; this
// doubles the decoder constant.
struct SparseCodecParams {
    int N = 4;
    int K = 1;
    int ell = 4;
    int alpha_den = 2; // alpha = 1/alpha_den
    int bits = 3;      // data grid
    double p = kInfNorm;
};

struct SparseCodec {
    SparseCodecParams params;
    SupportFamily supports;
    CurveMap curve; // psi : [0,1]^d -> [0,1]^lK at depth bits+1
    int d;

    explicit SparseCodec(const SparseCodecParams& pr)
        : params(pr),
          supports(pr.ell * pr.N, pr.ell * pr.K),
          curve(cube_surjection((pr.ell * pr.K + pr.alpha_den - 1) / pr.alpha_den + 1, pr.ell * pr.K,
                                pr.bits + 1)),
          d(curve.source_dim) {
        if (pr.alpha_den < 1) throw std::invalid_argument("alpha must be 1/q for integer q >= 1");
    }

    int block_length() const { return params.ell * params.N; }
    int code_length() const { return d + 1; }
    double alpha() const { return 1.0 / params.alpha_den; }

    Block encode(const Block& x) const {
        const DyadicGrid grid(params.bits);
        const auto family = SubshiftFamily::sparse(params.N, params.K);
        const DyadicGrid out_grid(std::max(curve.source_bits(), supports.signature_bits));
        if (x.length() != block_length() || !contains(family, x, grid) ||
            support_size(x) > supports.size)
            return zero_block(code_length(), out_grid);
        auto C = support_selector(x, supports.size);
        std::vector<double> u(static_cast<std::size_t>(supports.size));
        for (std::size_t i = 0; i < C.size(); ++i)
            u[i] = x.values[static_cast<std::size_t>(C[i])] / 2.0; // into the corner lattice
        auto t = curve.right_inverse(u);
        t.push_back(supports.signature(supports.rank(C)));
        return Block(std::move(t), out_grid);
    }

    Block decode(const Block& y) const {
        const DyadicGrid grid(params.bits);
        if (y.length() != code_length()) throw dimension_error("sparse decode: wrong code length");
        std::vector<double> out(static_cast<std::size_t>(block_length()), 0.0);
        const double sig = y.values.back();
        if (sig == 0.0) return Block(std::move(out), grid);
        auto A = supports.unrank(supports.nearest_rank(sig));
        std::vector<double> t(y.values.begin(), y.values.end() - 1);
        auto u = curve.forward(t);
        for (std::size_t i = 0; i < A.size(); ++i)
            out[static_cast<std::size_t>(A[i])] = grid.quantize(std::min(2.0 * u[i], 1.0));
        return Block(std::move(out), grid);
    }

    // Decoder constant at exponent alpha in the norm p, composed from the
    // measured constant of the inner curve map and the signature separation.
    double decoder_constant() const {
        const double a = alpha();
        const double p = params.p;
        auto psi = [this](const std::vector<double>& t) { return curve.forward(t); };
        auto est = holder_estimate(psi, d, curve.source_bits(), p, curve.alpha(), 2000, 17,
                                   curve_adjacent_pairs(curve));
        const double L_inner = 2.0 * std::max(est.L_at_alpha, 1.0);
        const double M = std::isinf(p)
            ? supports.signature_gap() / 2.0
            : supports.signature_gap() / 2.0 / std::pow(static_cast<double>(d + 1), 1.0 / p);
        double L_sep = 1.0 / std::pow(M, a);
        double L_eq = std::isinf(p)
            ? L_inner
            : L_inner * std::pow(static_cast<double>(d + 1) / d, a / p);
        double Lp = std::max(L_sep, L_eq);
        return std::isinf(p) ? Lp : Lp * std::pow(static_cast<double>(block_length()), 1.0 / p);
    }

    CodecPair as_pair() const {
        CodecPair c;
        c.n = block_length();
        c.k = code_length();
        auto self = *this;
        c.encode = [self](const Block& b) { return self.encode(b); };
        c.decode = [self](const Block& b) { return self.decode(b); };
        c.encoder_reg = HolderSpec::borel();
        c.decoder_reg = HolderSpec::holder(params.p, decoder_constant(), alpha());
        c.scheme = "sparse-support-signature";
        return c;
    }

    // Empirical decoder regularity measured on the closure of the encoder
    // image: random codeword pairs plus dyadic steps of the curve-parameter
    // coordinates. Signature coordinates stay on the signature lattice,
    // which is where the decoder operates.
    HolderEstimate empirical_decoder_regularity(int pair_count, std::uint64_t seed) const {
        const DyadicGrid grid(params.bits);
        const auto measure = MeasureSpec::shift_average(params.N, params.K);
        const int n = block_length();
        auto words = sample_windows(measure, n, pair_count, seed, grid);
        HolderPairs pairs;
        std::vector<std::vector<double>> codes;
        codes.reserve(words.size());
        for (const Block& w : words) codes.push_back(encode(w).values);
        for (std::size_t i = 0; i + 1 < codes.size(); i += 2)
            pairs.constant.emplace_back(codes[i], codes[i + 1]);
        const int pb = curve.source_bits();
        for (std::size_t i = 0; i < codes.size(); ++i) {
            Rng rng = Rng::child(seed ^ 0x5eed, i);
            auto v = codes[i];
            auto axis = static_cast<std::size_t>(rng.next_below(static_cast<std::uint64_t>(d)));
            int scale = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(pb)));
            double step = std::ldexp(1.0, -scale);
            double snapped = std::ldexp(std::floor(std::ldexp(v[axis], scale)), -scale);
            auto w = v;
            v[axis] = snapped;
            w[axis] = snapped + step <= 1.0 ? snapped + step : snapped - step;
            if (w[axis] >= 0.0) pairs.modulus.emplace_back(std::move(v), std::move(w));
        }
        const DyadicGrid code_grid(std::max(curve.source_bits(), supports.signature_bits));
        auto fn = [this, code_grid](const std::vector<double>& y) {
            return decode(Block(y, code_grid)).values;
        };
        return holder_estimate_pairs(fn, pairs, params.p, alpha());
    }
};

// ---------------------------------------------------------------------------
// Cube quantizer and the quantizer+curve codec
// ---------------------------------------------------------------------------

// Maps each point of [0,1]^k to the center of its dyadic cell of side 2^-j;
// sup error <= 2^-j / 2, codebook size 2^(j*k).
struct CubeQuantizer {
    int dim;
    int j;

    Block operator()(const Block& x) const {
        if (x.length() != dim) throw dimension_error("quantizer: dimension mismatch");
        std::vector<double> out(static_cast<std::size_t>(dim));
        for (int i = 0; i < dim; ++i) {
            auto c = DyadicGrid::cell_index(x.values[static_cast<std::size_t>(i)], j);
            out[static_cast<std::size_t>(i)] = std::ldexp(2.0 * static_cast<double>(c) + 1.0, -(j + 1));
        }
        return Block(std::move(out), DyadicGrid(j + 1));
    }

    double codebook_size() const { return std::pow(std::ldexp(1.0, j), dim); }

    std::vector<Block> codebook() const {
        if (codebook_size() > 1e7) throw budget_error("quantizer codebook too large to enumerate");
        std::vector<Block> out;
        std::vector<std::int64_t> idx(static_cast<std::size_t>(dim), 0);
        const std::int64_t cells = std::int64_t{1} << j;
        while (true) {
            std::vector<double> v(static_cast<std::size_t>(dim));
            for (int i = 0; i < dim; ++i)
                v[static_cast<std::size_t>(i)] = std::ldexp(2.0 * static_cast<double>(idx[static_cast<std::size_t>(i)]) + 1.0, -(j + 1));
            out.emplace_back(std::move(v), DyadicGrid(j + 1));
            int q = dim - 1;
            while (q >= 0 && ++idx[static_cast<std::size_t>(q)] == cells) idx[static_cast<std::size_t>(q--)] = 0;
            if (q < 0) break;
        }
        return out;
    }
};

inline CubeQuantizer cube_quantizer(int dim, int j) {
    if (j < 1) throw std::invalid_argument("quantizer scale must be 2^-j with j >= 1");
    return CubeQuantizer{dim, j};
}

// Universal zero-knowledge route: quantize at 2^-j, then compress the cell
// center through the right inverse of a cube surjection with k = ceil(n/q)
// source coordinates (alpha = 1/q). Decoding applies the surjection, so the
// sup reconstruction error is at most 2^-j/2 and the decoder inherits the
// curve exponent 1/ceil(n/k) >= 1/q.
inline CodecPair quantizer_curve_codec(int n, int q, int j, double p = kInfNorm) {
    const int k = (n + q - 1) / q;
    CurveMap curve = cube_surjection(k, n, j + 1); // centers live on the (j+1)-bit corner lattice
    CubeQuantizer quant{n, j};
    CodecPair c;
    c.n = n;
    c.k = k;
    const DyadicGrid code_grid(curve.source_bits());
    c.encode = [quant, curve, code_grid](const Block& x) {
        return Block(curve.right_inverse(quant(x).values), code_grid);
    };
    const DyadicGrid out_grid(j + 1);
    c.decode = [curve, out_grid](const Block& y) { return Block(curve.forward(y.values), out_grid); };
    c.encoder_reg = HolderSpec::borel();
    auto fwd = [curve](const std::vector<double>& t) { return curve.forward(t); };
    auto est = holder_estimate(fwd, k, curve.source_bits(), p, curve.alpha(), 2000, 19,
                               curve_adjacent_pairs(curve));
    c.decoder_reg = HolderSpec::holder(p, std::max(est.L_at_alpha, 1.0), curve.alpha());
    c.scheme = "quantizer-curve";
    return c;
}

// ---------------------------------------------------------------------------
// Random linear codec
// ---------------------------------------------------------------------------

struct LinearCodecReport {
    bool injective_on_words = false; // encoder separates all admissible word pairs
    double min_image_gap = 0.0;      // smallest pairwise distance between encoded words
    double inverse_constant = 0.0;   // measured constant of the inverse at the given alpha
    std::size_t words = 0;
};

struct LinearRandomCodec {
    Eigen::MatrixXd weights; // k x n, standard normal entries
    Eigen::VectorXd offset;  // affine shift per output row
    Eigen::VectorXd scale;   // affine scale per output row
    std::vector<Block> codebook_words;  // admissible words (lexicographic)
    std::vector<Eigen::VectorXd> codes; // encoded words
    int n = 1, k = 1;
    double p = 2.0;
    DyadicGrid grid{2};
    LinearCodecReport report;

    Eigen::VectorXd map_raw(const Block& x) const {
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i) v(i) = x.values[static_cast<std::size_t>(i)];
        Eigen::VectorXd y = weights * v;
        return (y - offset).cwiseQuotient(scale);
    }

    Block encode(const Block& x) const {
        Eigen::VectorXd y = map_raw(x);
        std::vector<double> out(static_cast<std::size_t>(k));
        // code coordinates are reported on a fine grid; quantization at 2^-40
        // is far below any pairwise separation that matters here
        const DyadicGrid fine(40);
        for (int i = 0; i < k; ++i) out[static_cast<std::size_t>(i)] = fine.quantize(y(i));
        return Block(std::move(out), fine);
    }

    // nearest admissible word in code space, ties to the lexicographically
    // smaller word
    Block decode(const Block& y) const {
        Eigen::VectorXd v(k);
        for (int i = 0; i < k; ++i) v(i) = y.values[static_cast<std::size_t>(i)];
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t w = 0; w < codes.size(); ++w) {
            double d = (codes[w] - v).lpNorm<Eigen::Infinity>();
            if (d < best_d - 1e-15) {
                best_d = d;
                best = w;
            }
        }
        return codebook_words[best];
    }

    CodecPair as_pair() const {
        CodecPair c;
        c.n = n;
        c.k = k;
        auto self = std::make_shared<LinearRandomCodec>(*this);
        c.encode = [self](const Block& b) { return self->encode(b); };
        c.decode = [self](const Block& b) { return self->decode(b); };
        c.encoder_reg = HolderSpec::linear(p, 1.0);
        c.decoder_reg = HolderSpec::borel();
        c.scheme = "linear-random";
        return c;
    }
};

// Random k x n Gaussian encoder, affinely rescaled into [0,1]^k, with
// exhaustive nearest-word decoding over the enumerated family. Rows are
// generated sequentially from the seed so a larger k extends a smaller one.
inline LinearRandomCodec linear_random_codec(const SubshiftFamily& family, int n, int k,
                                             std::uint64_t seed, const DyadicGrid& grid,
                                             double p = 2.0, const Budget& budget = {}) {
    if (k >= n) throw std::invalid_argument("linear codec needs k < n");
    LinearRandomCodec codec;
    codec.n = n;
    codec.k = k;
    codec.p = p;
    codec.grid = grid;
    codec.weights = Eigen::MatrixXd(k, n);
    for (int r = 0; r < k; ++r) {
        Rng rng = Rng::child(seed, static_cast<std::uint64_t>(r));
        for (int c = 0; c < n; ++c) codec.weights(r, c) = rng.next_normal();
    }
    codec.offset = Eigen::VectorXd(k);
    codec.scale = Eigen::VectorXd(k);
    for (int r = 0; r < k; ++r) {
        double lo = 0.0, hi = 0.0;
        for (int c = 0; c < n; ++c) {
            lo += std::min(codec.weights(r, c), 0.0);
            hi += std::max(codec.weights(r, c), 0.0);
        }
        codec.offset(r) = lo;
        codec.scale(r) = std::max(hi - lo, 1e-12);
    }
    codec.codebook_words = enumerate_words(family, n, grid, budget);
    codec.codes.reserve(codec.codebook_words.size());
    for (const Block& w : codec.codebook_words) codec.codes.push_back(codec.map_raw(w));

    auto& rep = codec.report;
    rep.words = codec.codebook_words.size();
    rep.injective_on_words = true;
    rep.min_image_gap = std::numeric_limits<double>::infinity();
    double max_ratio = 0.0;
    for (std::size_t a = 0; a < codec.codes.size(); ++a)
        for (std::size_t b = a + 1; b < codec.codes.size(); ++b) {
            double dy = norm_distance(
                std::vector<double>(codec.codes[a].data(), codec.codes[a].data() + k),
                std::vector<double>(codec.codes[b].data(), codec.codes[b].data() + k), p);
            rep.min_image_gap = std::min(rep.min_image_gap, dy);
            if (dy == 0.0) {
                rep.injective_on_words = false;
                continue;
            }
            double dx = norm_distance(codec.codebook_words[a], codec.codebook_words[b], p);
            max_ratio = std::max(max_ratio, dx / dy); // Lipschitz witness of the inverse
        }
    rep.inverse_constant = max_ratio;
    return codec;
}

// ---------------------------------------------------------------------------
// Totalization of a partial decoder
// ---------------------------------------------------------------------------

// Extends a map defined on a finite subset to a total decoder by nearest
// defined point (sup norm, ties to the earlier point) followed by clipping of
// each output coordinate to [0,1]. Values on the original subset are kept.
inline std::function<Block(const Block&)> clip_extend(
    std::vector<Block> domain, std::function<std::vector<double>(const Block&)> partial,
    const DyadicGrid& out_grid) {
    if (domain.empty()) throw std::invalid_argument("clip_extend: empty domain");
    return [domain = std::move(domain), partial = std::move(partial), out_grid](const Block& y) {
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < domain.size(); ++i) {
            double d = norm_distance(domain[i], y, kInfNorm);
            if (d < best_d - 1e-15) {
                best_d = d;
                best = i;
            }
        }
        auto raw = partial(domain[best]);
        for (double& v : raw) v = out_grid.quantize(std::clamp(v, 0.0, 1.0));
        return Block(std::move(raw), out_grid);
    };
}

// ---------------------------------------------------------------------------
// Regularity certification
// ---------------------------------------------------------------------------

struct RegularityCertificate {
    bool certified = false;
    double max_ratio = 0.0; // worst d_out / d_in^alpha observed
    std::size_t pairs_checked = 0;
    std::optional<std::pair<Block, Block>> violation;
};

// Confirms |f(x)-f(y)|_p <= L |x-y|_p^alpha over grid pairs: exhaustively at
// the given bits, or over seeded samples. The Linear class additionally
// requires agreement with the affine interpolation from axis evaluations.
inline RegularityCertificate verify_regularity(
    const std::function<Block(const Block&)>& fn, int dim_in, const HolderSpec& spec,
    bool exhaustive, int bits, std::uint64_t seed = 1, int samples = 20000) {
    RegularityCertificate cert;
    const DyadicGrid grid(bits);
    const double alpha = spec.cls == RegClass::Holder ? spec.alpha : 1.0;
    const double slack = 1.0 + 1e-9;

    std::vector<Block> points;
    if (exhaustive) {
        double total = static_cast<double>(dim_in) * std::log2(static_cast<double>(grid.levels()));
        if (total > std::log2(4e5)) throw budget_error("exhaustive regularity grid too large");
        std::vector<std::int64_t> idx(static_cast<std::size_t>(dim_in), 0);
        while (true) {
            std::vector<double> v(static_cast<std::size_t>(dim_in));
            for (int i = 0; i < dim_in; ++i) v[static_cast<std::size_t>(i)] = grid.from_index(idx[static_cast<std::size_t>(i)]);
            points.emplace_back(std::move(v), grid);
            int q = dim_in - 1;
            while (q >= 0 && ++idx[static_cast<std::size_t>(q)] == grid.levels()) idx[static_cast<std::size_t>(q--)] = 0;
            if (q < 0) break;
        }
    } else {
        Rng rng(seed);
        for (int s = 0; s < samples; ++s) {
            std::vector<double> v(static_cast<std::size_t>(dim_in));
            for (int i = 0; i < dim_in; ++i)
                v[static_cast<std::size_t>(i)] =
                    grid.from_index(static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(grid.levels()))));
            points.emplace_back(std::move(v), grid);
        }
    }

    std::vector<Block> images;
    images.reserve(points.size());
    for (const Block& pt : points) images.push_back(fn(pt));

    cert.certified = true;
    if (exhaustive) {
        for (std::size_t a = 0; a < points.size(); ++a)
            for (std::size_t b = a + 1; b < points.size(); ++b) {
                double din = norm_distance(points[a], points[b], spec.p);
                if (din == 0.0) continue;
                double dout = norm_distance(images[a], images[b], spec.p);
                ++cert.pairs_checked;
                double ratio = dout / std::pow(din, alpha);
                cert.max_ratio = std::max(cert.max_ratio, ratio);
                if (ratio > spec.L * slack && cert.certified) {
                    cert.certified = false;
                    cert.violation = {points[a], points[b]};
                }
            }
    } else {
        for (std::size_t a = 0; a + 1 < points.size(); a += 2) {
            double din = norm_distance(points[a], points[a + 1], spec.p);
            if (din == 0.0) continue;
            double dout = norm_distance(images[a], images[a + 1], spec.p);
            ++cert.pairs_checked;
            double ratio = dout / std::pow(din, alpha);
            cert.max_ratio = std::max(cert.max_ratio, ratio);
            if (ratio > spec.L * slack && cert.certified) {
                cert.certified = false;
                cert.violation = {points[a], points[a + 1]};
            }
        }
    }

    if (spec.cls == RegClass::Linear && cert.certified) {
        // affine consistency: f(x) agrees with f(0) + sum x_i (f(e_i) - f(0))
        Block zero = zero_block(dim_in, grid);
        Block f0 = fn(zero);
        std::vector<Block> basis;
        for (int i = 0; i < dim_in; ++i) {
            auto v = zero.values;
            v[static_cast<std::size_t>(i)] = 1.0;
            basis.push_back(fn(Block(v, grid)));
        }
        for (std::size_t a = 0; a < points.size() && cert.certified; ++a) {
            for (int o = 0; o < images[a].length(); ++o) {
                double pred = f0.values[static_cast<std::size_t>(o)];
                for (int i = 0; i < dim_in; ++i)
                    pred += points[a].values[static_cast<std::size_t>(i)] *
                            (basis[static_cast<std::size_t>(i)].values[static_cast<std::size_t>(o)] -
                             f0.values[static_cast<std::size_t>(o)]);
                if (std::abs(pred - images[a].values[static_cast<std::size_t>(o)]) > 1e-7) {
                    cert.certified = false;
                    cert.violation = {points[a], points[a]};
                    break;
                }
            }
        }
    }
    return cert;
}

// ---------------------------------------------------------------------------
// Error functionals
// ---------------------------------------------------------------------------

enum class ErrorMode { MismatchProb, ExcessProb, MeanLp };

struct ErrorEstimate {
    double value = 0.0;
    double half_width = 0.0; // binomial 95% half width; 0 for exact evaluation
    bool exact = false;
    std::size_t samples = 0;
};

// mu(g(f(x)) != x), mu(|x - g(f(x))|_p >= eps) or the mean-l^p error
// (integral of |x-g f x|_p^p)^(1/p). Exact expectation whenever the
// n-marginal support enumerates within budget, Monte-Carlo otherwise.
inline ErrorEstimate measure_error(const CodecPair& codec, const MeasureSpec& measure, int n,
                                   ErrorMode mode, double eps, double p, const DyadicGrid& grid,
                                   int samples = 100000, std::uint64_t seed = 7, int jobs = 1,
                                   const Budget& budget = {}) {
    if (codec.n != n) throw dimension_error("measure_error: codec block length mismatch");
    ErrorEstimate est;
    auto one = [&](const Block& x) -> double {
        Block back = codec.decode(codec.encode(x));
        switch (mode) {
            case ErrorMode::MismatchProb:
                return back == x ? 0.0 : 1.0;
            case ErrorMode::ExcessProb:
                return norm_distance(back, x, p) >= eps ? 1.0 : 0.0;
            case ErrorMode::MeanLp: {
                double d = norm_distance(back, x, p);
                return std::isinf(p) ? d : std::pow(d, p);
            }
        }
        return 0.0;
    };

    if (auto sup = enumerate_support(measure, n, grid, budget)) {
        double acc = 0.0;
        for (const auto& [blk, prob] : *sup) acc += prob * one(blk);
        est.exact = true;
        est.samples = sup->size();
        est.value = (mode == ErrorMode::MeanLp && !std::isinf(p)) ? std::pow(acc, 1.0 / p) : acc;
        return est;
    }

    const int shards = std::max(1, std::min(64, samples / 256));
    std::vector<double> acc(static_cast<std::size_t>(shards), 0.0);
    std::vector<int> cnt(static_cast<std::size_t>(shards), 0);
    parallel_for(static_cast<std::size_t>(shards), jobs, [&](std::size_t s) {
        int local = samples / shards + (static_cast<int>(s) < samples % shards ? 1 : 0);
        auto draws = sample_windows(measure, n, local, split_seed(seed, s), grid);
        for (const Block& x : draws) acc[s] += one(x);
        cnt[s] = local;
    });
    double total = 0.0;
    int m = 0;
    for (int s = 0; s < shards; ++s) {
        total += acc[static_cast<std::size_t>(s)];
        m += cnt[static_cast<std::size_t>(s)];
    }
    double mean = total / m;
    est.samples = static_cast<std::size_t>(m);
    if (mode == ErrorMode::MeanLp) {
        est.value = std::isinf(p) ? mean : std::pow(mean, 1.0 / p);
        est.half_width = 1.96 * std::sqrt(0.25 / m); // coarse bound
    } else {
        est.value = mean;
        est.half_width = 1.96 * std::sqrt(std::max(mean * (1.0 - mean), 1e-12) / m);
    }
    return est;
}

// l-fold product of a codec acting blockwise; realizes the rate inf rule.
inline CodecPair concatenate_codec(const CodecPair& base, int times) {
    CodecPair c;
    c.n = base.n * times;
    c.k = base.k * times;
    c.scheme = base.scheme + "-x" + std::to_string(times);
    c.encoder_reg = base.encoder_reg;
    c.decoder_reg = base.decoder_reg; // constant inflation measured separately
    int bn = base.n, bk = base.k;
    auto enc = base.encode, dec = base.decode;
    c.encode = [enc, bn, bk, times](const Block& x) {
        std::vector<double> out;
        int bits = 1;
        for (int t = 0; t < times; ++t) {
            std::vector<double> piece(x.values.begin() + t * bn, x.values.begin() + (t + 1) * bn);
            Block e = enc(Block(piece, DyadicGrid(x.bits)));
            bits = std::max(bits, e.bits);
            out.insert(out.end(), e.values.begin(), e.values.end());
        }
        (void)bk;
        return Block(out, DyadicGrid(bits));
    };
    c.decode = [dec, bn, bk, times](const Block& y) {
        std::vector<double> out;
        int bits = 1;
        for (int t = 0; t < times; ++t) {
            std::vector<double> piece(y.values.begin() + t * bk, y.values.begin() + (t + 1) * bk);
            Block d = dec(Block(piece, DyadicGrid(y.bits)));
            bits = std::max(bits, d.bits);
            out.insert(out.end(), d.values.begin(), d.values.end());
        }
        (void)bn;
        return Block(out, DyadicGrid(bits));
    };
    return c;
}

} // namespace anacomp
