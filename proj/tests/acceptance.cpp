// Acceptance suite: one check per shipped guarantee. Each criterion prints a
// pass/fail line with the measured values and appends a canonical transcript;
// the final criterion reruns the whole battery (same seeds, parallelism 8)
// and requires byte-identical transcripts. Exit code is the failure count.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "anacomp/serialize.hpp"

using namespace anacomp;

namespace {

struct Outcome {
    int id;
    std::string name;
    bool pass;
    std::string detail;
};

struct Suite {
    int jobs = 1;
    std::vector<Outcome> outcomes;
    std::string transcript;

    void record(int id, const std::string& name, bool pass, const std::string& detail) {
        outcomes.push_back({id, name, pass, detail});
        transcript += std::to_string(id) + "|" + name + "|" + detail + "\n";
    }
};

std::string fg(double v) { return format_general(v); }

// ---------------------------------------------------------------------------

void crit_sparse_dimensions(Suite& s) {
    auto t0 = std::chrono::steady_clock::now();
    DyadicGrid g(6);
    auto fam = SubshiftFamily::sparse(4, 1);
    auto mm = mmdim_estimate(fam, {4, 8, 12}, {2, 3, 4, 5, 6}, g);
    auto mb = mbdim_estimate(fam, {4, 8, 12}, {2, 3, 4, 5, 6}, g);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool pass = std::abs(mm.value - 0.25) <= 0.05 && std::abs(mb.value - 0.25) <= 0.05 && secs < 120.0;
    s.record(1, "sparse (4,1) mean dimensions = 1/4",
             pass, "mmdim=" + fg(mm.value) + " mbdim=" + fg(mb.value) + " secs=" + fg(secs));
}

void crit_full_shift_calibration(Suite& s) {
    DyadicGrid g(6);
    auto full = mmdim_estimate(SubshiftFamily::full_grid(), {4, 8, 12}, {2, 3, 4, 5, 6}, g);
    auto binary = mmdim_estimate(SubshiftFamily::full({0.0, 1.0}), {4, 8, 12}, {2, 3, 4, 5, 6}, g);
    bool exact = true;
    std::string col;
    for (std::size_t i = 0; i < binary.j_schedule.size(); ++i) {
        exact = exact && binary.per_eps[i] == 1.0 / binary.j_schedule[i];
        col += (i ? "," : "") + fg(binary.per_eps[i]);
    }
    bool pass = std::abs(full.value - 1.0) <= 0.02 && exact;
    s.record(2, "full-shift calibration", pass,
             "full-grid mmdim=" + fg(full.value) + " binary per-eps=[" + col + "] exact=" +
                 (exact ? "yes" : "no"));
}

void crit_vanishing_cubes(Suite& s) {
    DyadicGrid g(6);
    auto fam = SubshiftFamily::vanishing_cubes(6);
    auto mm = mmdim_estimate(fam, default_n_schedule_mmdim(fam, g), default_j_schedule(g), g);
    auto mb = mbdim_estimate(fam, default_n_schedule_mbdim(fam, g), default_j_schedule(g), g);
    bool decreasing = true;
    for (std::size_t i = 0; i + 1 < mm.per_eps.size(); ++i)
        decreasing = decreasing && mm.per_eps[i + 1] < mm.per_eps[i];
    bool pass = mm.value < mb.value - 0.3 && decreasing;
    s.record(3, "vanishing cubes order the two mean dimensions", pass,
             "mmdim=" + fg(mm.value) + " mbdim=" + fg(mb.value) +
                 " column-decreasing=" + (decreasing ? "yes" : "no"));
}

void crit_sparse_codec_exactness(Suite& s) {
    DyadicGrid g(3);
    auto fam = SubshiftFamily::sparse(4, 1);
    bool pass = true;
    std::string detail;
    for (int ell : {1, 2, 4}) {
        SparseCodec sc({4, 1, ell, 2, 3, kInfNorm});
        std::size_t words = 0, errors = 0;
        for_each_word(fam, sc.block_length(), g, {}, [&](const Block& w) {
            ++words;
            if (!(sc.decode(sc.encode(w)) == w)) ++errors;
        });
        const int lK = ell, lN = 4 * ell;
        const double expected_rate = static_cast<double>((lK + 1) / 2 + 1 + 1) / lN;
        const double rate = static_cast<double>(sc.code_length()) / sc.block_length();
        bool ok = errors == 0 && rate == expected_rate && rate <= 0.5 / 4.0 + 3.0 / lN + 1e-12;
        pass = pass && ok;
        detail += "l=" + std::to_string(ell) + ":words=" + std::to_string(words) + ",errors=" +
                  std::to_string(errors) + ",rate=" + fg(rate) + " ";
    }
    s.record(4, "sparse codec roundtrips exactly at the formula rate", pass, detail);
}

void crit_decoder_regularity(Suite& s) {
    SparseCodec sc({4, 1, 2, 2, 2, kInfNorm});
    double L = sc.decoder_constant();
    auto dec = [&](const Block& y) { return sc.decode(y); };
    auto cert = verify_regularity(dec, sc.code_length(), HolderSpec::holder(kInfNorm, L, 0.5), true, 2);
    auto reg = sc.empirical_decoder_regularity(20000, 13);
    bool pass = cert.certified && reg.alpha_hat >= 0.45;
    s.record(5, "sparse decoder certified at its declared regularity", pass,
             "L=" + fg(L) + " certified=" + (cert.certified ? "yes" : "no") + " max_ratio=" +
                 fg(cert.max_ratio) + " pairs=" + std::to_string(cert.pairs_checked) +
                 " alpha_hat=" + fg(reg.alpha_hat));
}

void crit_spacefill(Suite& s) {
    bool pass = true;
    std::string detail;
    for (auto [k, n, b] : std::vector<std::array<int, 3>>{{1, 2, 4}, {1, 3, 2}, {2, 4, 2}}) {
        auto map = cube_surjection(k, n, b);
        const std::uint64_t cells = std::uint64_t{1} << (n * b);
        std::size_t errors = 0;
        for (std::uint64_t c = 0; c < cells; ++c) {
            std::vector<double> y(static_cast<std::size_t>(n));
            std::uint64_t t = c;
            for (int i = 0; i < n; ++i) {
                y[static_cast<std::size_t>(i)] =
                    std::ldexp(static_cast<double>(t & ((std::uint64_t{1} << b) - 1)), -b);
                t >>= b;
            }
            if (map.forward(map.right_inverse(y)) != y) ++errors;
        }
        pass = pass && errors == 0;
        detail += "(" + std::to_string(k) + "," + std::to_string(n) + "," + std::to_string(b) +
                  "):errors=" + std::to_string(errors) + " ";
    }
    std::vector<double> Ls;
    for (int b : {3, 4, 5}) {
        auto map = cube_surjection(1, 2, b);
        auto fwd = [&](const std::vector<double>& t) { return map.forward(t); };
        Ls.push_back(holder_estimate(fwd, 1, map.source_bits(), kInfNorm, 0.5, 20000, 42,
                                     curve_adjacent_pairs(map), s.jobs)
                         .L_at_alpha);
    }
    double lo = *std::min_element(Ls.begin(), Ls.end());
    double hi = *std::max_element(Ls.begin(), Ls.end());
    pass = pass && hi <= 2.0 * lo;
    detail += "planar L=[" + fg(Ls[0]) + "," + fg(Ls[1]) + "," + fg(Ls[2]) + "]";
    s.record(6, "space-filling roundtrips and stable curve constant", pass, detail);
}

void crit_rd_oracle(Suite& s) {
    std::vector<double> px{0.5, 0.5};
    std::vector<double> d{0.0, 1.0, 1.0, 0.0};
    auto at = blahut_arimoto(px, d, 2, 0.1);
    auto zero = blahut_arimoto(px, d, 2, 0.0);
    auto free1 = blahut_arimoto(px, d, 2, 0.5);
    auto free2 = blahut_arimoto(px, d, 2, 0.75);
    bool pass = std::abs(at.rate_bits - 0.5310044) <= 1e-3 && zero.rate_bits == 1.0 &&
                free1.rate_bits == 0.0 && free2.rate_bits == 0.0;
    s.record(7, "rate-distortion solver against the binary closed form", pass,
             "R(0.1)=" + fg(at.rate_bits) + " R(0)=" + fg(zero.rate_bits) + " R(>=max)=" +
                 fg(free1.rate_bits));
}

void crit_variational(Suite& s) {
    // Sparse clause: shift-average measure on the (4,1)-sparse family.
    DyadicGrid g3(3);
    auto sparse_fam = SubshiftFamily::sparse(4, 1);
    auto sparse_est = variational_estimate({MeasureSpec::shift_average(4, 1)}, sparse_fam,
                                           {0.25, 0.125}, 2.0, {4}, g3);
    double sparse_ratio = sparse_est.at_finest();
    bool sparse_ok = std::abs(sparse_ratio - 0.25) <= 0.15;

    // Full-grid clause as stated: the ratio at eps = 2^-3 against the value 1.
    // A sup-norm quantizer at width 1/4 reproduces any source within 1/8, so
    // R(2^-3) <= log2(5) bits per coordinate for every stationary measure and
    // the ratio cannot exceed log2(5)/3 = 0.774 at this scale; the slope
    // diagnostic cancels that finite-scale offset and is reported alongside.
    DyadicGrid g6(6);
    auto full_fam = SubshiftFamily::full_grid();
    auto full_est = variational_estimate({MeasureSpec::uniform_iid(g6)}, full_fam,
                                         {0.25, 0.125}, 2.0, {1}, g6);
    double full_ratio = full_est.at_finest();
    bool full_ok = std::abs(full_ratio - 1.0) <= 0.15;

    bool pass = sparse_ok && full_ok;
    s.record(8, "variational ratios at eps = 2^-3", pass,
             "sparse_ratio=" + fg(sparse_ratio) + " (target 0.25+-0.15, " +
                 (sparse_ok ? "ok" : "FAIL") + ") full_ratio=" + fg(full_ratio) +
                 " (target 1+-0.15, " + (full_ok ? "ok" : "FAIL") +
                 "; ceiling log2(5)/3=0.7740 at this scale; slope diagnostic=" +
                 fg(full_est.endpoint_slope) + ")");
}

void crit_bound_consistency(Suite& s) {
    DyadicGrid g(3);
    auto measure = MeasureSpec::shift_average(4, 1);
    auto curve1 = rd_function(measure, {4}, 1.0, {1.0, 0.5, 0.25, 0.125, 0.0625}, g);
    auto curve2 = rd_function(measure, {4}, 2.0, {1.0, 0.5, 0.25, 0.125, 0.0625}, g);
    bool pass = true;
    std::string detail;

    // sparse codec: sup-norm decoder, exact zero mismatch probability
    for (int ell : {1, 2, 4}) {
        SparseCodec sc({4, 1, ell, 2, 3, kInfNorm});
        auto pair = sc.as_pair();
        auto err = measure_error(pair, measure, sc.block_length(), ErrorMode::MismatchProb, 0.0,
                                 2.0, g);
        double worst = -1.0;
        for (double eps : {0.25, 0.125, 0.0625}) {
            if (err.value > eps) continue; // bound applies at error levels above the achieved one
            double bound = rd_rate_lower_bound(curve1, eps, pair.decoder_reg.L, 0.5, kInfNorm);
            worst = std::max(worst, bound - pair.rate());
        }
        pass = pass && worst <= 0.0 && err.exact && err.value == 0.0;
        detail += "sparse l=" + std::to_string(ell) + ":slack=" + fg(-worst) + " ";
    }

    // identity codec: Lipschitz decoder in the 2-norm, zero error
    {
        auto id = identity_codec(4, g);
        auto err = measure_error(id, measure, 4, ErrorMode::MeanLp, 0.0, 2.0, g);
        double worst = -1.0;
        for (double eps : {0.25, 0.125, 0.0625}) {
            double bound = rd_rate_lower_bound(curve2, eps, 1.0, 1.0, 2.0);
            worst = std::max(worst, bound - id.rate());
        }
        pass = pass && worst <= 0.0 && err.value == 0.0;
        detail += "identity:slack=" + fg(-worst) + " ";
    }

    // quantizer+curve codec under the uniform grid measure, exact mean error
    {
        auto codec = quantizer_curve_codec(4, 2, 3, 2.0);
        auto uniform = MeasureSpec::uniform_iid(g);
        auto ucurve = rd_function(uniform, {2}, 2.0, {1.0, 0.5, 0.25, 0.125, 0.0625}, g);
        auto err = measure_error(codec, uniform, 4, ErrorMode::MeanLp, 0.0, 2.0, g);
        double eps = std::max(err.value, 0.0625);
        double bound = rd_rate_lower_bound(ucurve, eps, codec.decoder_reg.L, 0.5, 2.0);
        pass = pass && err.exact && bound <= codec.rate();
        detail += "quantizer:err=" + fg(err.value) + ",slack=" + fg(codec.rate() - bound);
    }
    s.record(9, "rate lower bound never exceeds an achieved rate", pass, detail);
}

void crit_bound_chain(Suite& s) {
    DyadicGrid g(6);
    auto rep = bound_chain(SubshiftFamily::sparse(4, 1), 2, kInfNorm, g, {}, 5, 10, 0.02);
    bool pass = true;
    std::string detail = "mmdim=" + fg(rep.mmdim) + " rate=" + fg(rep.sparse_rate) +
                         " mbdim=" + fg(rep.mbdim) + " ";
    for (const auto& row : rep.rows) {
        pass = pass && row.slack() >= -0.02;
        detail += "[" + row.name + " slack=" + fg(row.slack()) + "]";
    }
    s.record(10, "bound chain on the sparse family", pass, detail);
}

void crit_ball_entropy(Suite& s) {
    auto rows = ball_entropy_check(14, {0.125, 0.25, 0.375, 0.5});
    std::size_t violations = 0;
    for (const auto& r : rows)
        if (!r.holds()) ++violations;
    s.record(11, "binomial ball entropy bound for n <= 14", violations == 0,
             std::to_string(rows.size()) + " rows, " + std::to_string(violations) + " violations");
}

void crit_binary_shift_bound(Suite& s) {
    double v = binary_shift_bound(1.0, 1.0);
    bool monotone = true;
    double prev = 1.0;
    for (double L : {1.0, 10.0, 100.0, 1000.0}) {
        double b = binary_shift_bound(1.0, L);
        monotone = monotone && b < prev && b > 0.0;
        prev = b;
    }
    bool linear = binary_shift_bound(0.5, 1.0) == 0.5 * v;
    bool pass = std::abs(v - 0.062907) <= 1e-6 && monotone && linear;
    s.record(12, "two-symbol shift bound formula", pass,
             "value=" + fg(v) + " monotone=" + (monotone ? "yes" : "no") + " alpha-linear=" +
                 (linear ? "yes" : "no"));
}

void crit_lin_rank(Suite& s) {
    auto low = lin_rank_check(4, 1, 4, 7, 200, 5);
    auto at = lin_rank_check(4, 1, 4, 8, 200, 5);
    bool pass = low.rank_deficient == 200 && at.full_rank >= 190;
    s.record(13, "rank law at the sparse threshold", pass,
             "k=7: " + std::to_string(low.rank_deficient) + "/200 deficient; k=8: " +
                 std::to_string(at.full_rank) + "/200 full rank");
}

Suite run_battery(int jobs) {
    Suite s;
    s.jobs = jobs;
    crit_sparse_dimensions(s);
    crit_full_shift_calibration(s);
    crit_vanishing_cubes(s);
    crit_sparse_codec_exactness(s);
    crit_decoder_regularity(s);
    crit_spacefill(s);
    crit_rd_oracle(s);
    crit_variational(s);
    crit_bound_consistency(s);
    crit_bound_chain(s);
    crit_ball_entropy(s);
    crit_binary_shift_bound(s);
    crit_lin_rank(s);
    return s;
}

} // namespace

int main() {
    auto first = run_battery(1);
    auto second = run_battery(8); // same seeds, different parallelism degree

    int failures = 0;
    for (const auto& o : first.outcomes) {
        std::printf("[%s] criterion %2d: %s\n        %s\n", o.pass ? "PASS" : "FAIL", o.id,
                    o.name.c_str(), o.detail.c_str());
        if (!o.pass) ++failures;
    }
    bool deterministic = first.transcript == second.transcript;
    std::printf("[%s] criterion 14: byte-identical reruns under parallelism 1 and 8\n",
                deterministic ? "PASS" : "FAIL");
    if (!deterministic) ++failures;

    std::printf("%d/%d criteria passed\n", 14 - failures, 14);
    return failures;
}
