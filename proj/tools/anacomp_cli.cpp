// Command line front end: batch computations over subshift families and
// stationary measures, emitting CSV/JSON reports.
//
// Subcommands
//   dim        covering tables and dimension estimates for a family
//   codec      build a codec, run roundtrips, report rates and regularity
//   rd         rate-distortion curves for a measure
//   verify     inequality harnesses (bound-chain, ball-entropy, lin-rank,
//              variational, dynamical); exit code 1 when a check fails
//   spacefill  curve roundtrip/regularity checks
//
// Exit codes: 0 success, 1 inequality failure, 2 usage error, 3 budget error.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "anacomp/serialize.hpp"

using namespace anacomp;
namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// exact rational inputs: alpha as 1/q, eps as 2^-j
int parse_alpha_den(const std::string& s) {
    if (s.rfind("1/", 0) != 0) throw UsageError("alpha must be a reciprocal 1/q, got " + s);
    int q = std::stoi(s.substr(2));
    if (q < 1) throw UsageError("alpha denominator must be positive");
    return q;
}

int parse_eps_bits(const std::string& s) {
    if (s.rfind("2^-", 0) != 0) throw UsageError("eps must be a dyadic 2^-j, got " + s);
    int j = std::stoi(s.substr(3));
    if (j < 1) throw UsageError("eps exponent must be positive");
    return j;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::map<std::string, std::string> parse_kv(const std::string& s) {
    std::map<std::string, std::string> kv;
    if (s.empty()) return kv;
    for (const auto& part : split(s, ',')) {
        auto eq = part.find('=');
        if (eq == std::string::npos) throw UsageError("expected key=value, got " + part);
        kv[part.substr(0, eq)] = part.substr(eq + 1);
    }
    return kv;
}

// family spec grammar: full-grid | full-binary | full:<v0,v1,...> |
// sparse:N=..,K=.. | vanishing-cubes:m=.. | reciprocal:n=..
SubshiftFamily parse_family(const std::string& s) {
    auto colon = s.find(':');
    std::string head = s.substr(0, colon);
    std::string rest = colon == std::string::npos ? "" : s.substr(colon + 1);
    if (head == "full-grid") return SubshiftFamily::full_grid();
    if (head == "full-binary") return SubshiftFamily::full({0.0, 1.0});
    if (head == "full") {
        std::vector<double> vals;
        for (const auto& v : split(rest, ',')) vals.push_back(std::stod(v));
        return SubshiftFamily::full(std::move(vals));
    }
    if (head == "sparse") {
        auto kv = parse_kv(rest);
        return SubshiftFamily::sparse(std::stoi(kv.at("N")), std::stoi(kv.at("K")));
    }
    if (head == "vanishing-cubes") return SubshiftFamily::vanishing_cubes(std::stoi(parse_kv(rest).at("m")));
    if (head == "reciprocal") return SubshiftFamily::reciprocal(std::stoi(parse_kv(rest).at("n")));
    throw UsageError("unknown family: " + s + " (see README for the family grammar)");
}

MeasureSpec parse_measure(const std::string& s, const DyadicGrid& grid) {
    auto colon = s.find(':');
    std::string head = s.substr(0, colon);
    std::string rest = colon == std::string::npos ? "" : s.substr(colon + 1);
    if (head == "uniform-grid") return MeasureSpec::uniform_iid(grid);
    if (head == "uniform-binary") return MeasureSpec::uniform_iid_on({0.0, 1.0});
    if (head == "sparse-shift-avg") {
        auto kv = parse_kv(rest);
        return MeasureSpec::shift_average(std::stoi(kv.at("N")), std::stoi(kv.at("K")));
    }
    throw UsageError("unknown measure: " + s + " (see README for the measure grammar)");
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    for (const auto& part : split(s, ',')) out.push_back(std::stoi(part));
    return out;
}

void ensure_dir(const std::string& dir) { fs::create_directories(dir); }

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"analog compression toolkit: mean dimensions, codecs and rate-distortion bounds"};
    app.require_subcommand(1);

    std::string out_dir = "out";
    std::uint64_t seed = 1;
    int bits = 6;
    int jobs = 1;
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", seed, "global seed");
    app.add_option("--b", bits, "dyadic grid bits");
    app.add_option("--jobs", jobs, "parallelism degree (outputs are independent of it)");

    // ---- dim ----
    auto* dim = app.add_subcommand(
        "dim", "covering tables, metric mean dimension and mean box dimension of a family");
    std::string dim_family;
    std::string dim_n, dim_j;
    dim->add_option("--family", dim_family, "family spec, e.g. sparse:N=4,K=1")->required();
    dim->add_option("--n", dim_n, "block length schedule, comma separated");
    dim->add_option("--j", dim_j, "scale schedule (eps = 2^-j), comma separated");

    // ---- codec ----
    auto* codec = app.add_subcommand("codec", "build a codec and report rate, errors and regularity");
    std::string codec_scheme = "sparse";
    int cN = 4, cK = 1, cl = 4, ck = 3;
    std::string codec_alpha = "1/2", codec_roundtrip = "exhaustive";
    codec->add_option("scheme", codec_scheme, "sparse | linear | quantizer")->required();
    codec->add_option("--N", cN, "sparse window length");
    codec->add_option("--K", cK, "max nonzeros per window");
    codec->add_option("--l", cl, "number of windows per block");
    codec->add_option("--k", ck, "code dimension (linear scheme)");
    codec->add_option("--alpha", codec_alpha, "decoder exponent as a reciprocal, e.g. 1/2");
    codec->add_option("--roundtrip", codec_roundtrip, "exhaustive | sampled | none");

    // ---- rd ----
    auto* rd = app.add_subcommand("rd", "rate-distortion curve of a stationary measure");
    std::string rd_measure, rd_eps = "2^-2,2^-3";
    std::string rd_n = "4";
    double rd_p = 2.0;
    rd->add_option("--measure", rd_measure, "measure spec, e.g. sparse-shift-avg:N=4,K=1")->required();
    rd->add_option("--n", rd_n, "block length schedule");
    rd->add_option("--eps", rd_eps, "dyadic distortion parameters, e.g. 2^-2,2^-3");
    rd->add_option("--p", rd_p, "norm index (finite)");

    // ---- verify ----
    auto* verify = app.add_subcommand("verify", "inequality harnesses; exit 1 when a check fails");
    std::string v_what;
    std::string v_family = "sparse:N=4,K=1", v_alpha = "1/2";
    int v_nmax = 14, v_N = 4, v_K = 1, v_l = 4, v_k = 7, v_trials = 200;
    verify->add_option("what", v_what, "bound-chain | ball-entropy | lin-rank | variational | dynamical")
        ->required();
    verify->add_option("--family", v_family, "family spec");
    verify->add_option("--alpha", v_alpha, "decoder exponent 1/q");
    verify->add_option("--nmax", v_nmax, "max block length (ball-entropy)");
    verify->add_option("--N", v_N, "sparse window (lin-rank)");
    verify->add_option("--K", v_K, "sparse support (lin-rank)");
    verify->add_option("--l", v_l, "windows per block (lin-rank)");
    verify->add_option("--k", v_k, "code dimension (lin-rank)");
    verify->add_option("--trials", v_trials, "trial count (lin-rank)");

    // ---- spacefill ----
    auto* sf = app.add_subcommand("spacefill", "cube surjection roundtrip and regularity checks");
    std::string sf_what = "check";
    int sf_k = 1, sf_n = 2, sf_b = 4;
    sf->add_option("what", sf_what, "check");
    sf->add_option("--k", sf_k, "source dimension");
    sf->add_option("--n", sf_n, "target dimension");
    sf->add_option("--curve-b", sf_b, "curve depth in bits");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        ensure_dir(out_dir);
        const DyadicGrid grid(bits);
        Budget budget;

        if (dim->parsed()) {
            auto family = parse_family(dim_family);
            auto n_sched = dim_n.empty() ? default_n_schedule_mmdim(family, grid) : parse_int_list(dim_n);
            auto nb_sched = dim_n.empty() ? default_n_schedule_mbdim(family, grid) : parse_int_list(dim_n);
            auto j_sched = dim_j.empty() ? default_j_schedule(grid) : parse_int_list(dim_j);
            auto mm = mmdim_estimate(family, n_sched, j_sched, grid, budget);
            auto mb = mbdim_estimate(family, nb_sched, j_sched, grid, budget);
            json summary;
            summary["family"] = to_json(family);
            summary["bits"] = bits;
            summary["mmdim"] = to_json(mm);
            summary["mbdim"] = to_json(mb);
            write_file(out_dir + "/dim_summary.json", summary.dump(2) + "\n");
            write_file(out_dir + "/covering.csv",
                       covering_table_csv(family.name(), family, n_sched, j_sched, grid, budget));
            std::cout << "family: " << family.name() << "\n"
                      << "mmdim estimate: " << format_general(mm.value)
                      << " (ratio at finest eps: " << format_general(mm.ratio_at_finest) << ")\n"
                      << "mbdim estimate: " << format_general(mb.value) << "\n"
                      << "wrote " << out_dir << "/dim_summary.json, covering.csv\n";
            return 0;
        }

        if (codec->parsed()) {
            if (codec_scheme == "sparse") {
                SparseCodec sc({cN, cK, cl, parse_alpha_den(codec_alpha), bits, kInfNorm});
                auto family = SubshiftFamily::sparse(cN, cK);
                std::size_t errors = 0, words = 0;
                if (codec_roundtrip == "exhaustive") {
                    for_each_word(family, sc.block_length(), grid, budget, [&](const Block& w) {
                        ++words;
                        if (!(sc.decode(sc.encode(w)) == w)) ++errors;
                    });
                } else if (codec_roundtrip == "sampled") {
                    auto samples = sample_windows(MeasureSpec::shift_average(cN, cK), sc.block_length(),
                                                  20000, seed, grid);
                    for (const Block& w : samples) {
                        ++words;
                        if (!(sc.decode(sc.encode(w)) == w)) ++errors;
                    }
                }
                auto pair = sc.as_pair();
                auto reg = sc.empirical_decoder_regularity(20000, seed);
                json desc = codec_descriptor(
                    pair, {{"N", cN}, {"K", cK}, {"l", cl}, {"alpha", codec_alpha}, {"bits", bits}});
                desc["roundtrip"] = {{"mode", codec_roundtrip}, {"words", words}, {"errors", errors}};
                desc["measured"] = {{"alpha_hat", reg.alpha_hat}, {"L_at_alpha", reg.L_at_alpha}};
                write_file(out_dir + "/codec.json", desc.dump(2) + "\n");
                std::cout << "errors: " << errors << ", rate: " << format_general(pair.rate()) << "\n"
                          << "decoder: L=" << format_general(pair.decoder_reg.L)
                          << " alpha=" << format_general(pair.decoder_reg.alpha)
                          << " (measured alpha_hat " << format_general(reg.alpha_hat) << ")\n"
                          << "wrote " << out_dir << "/codec.json\n";
                return errors == 0 ? 0 : 1;
            }
            if (codec_scheme == "linear") {
                auto family = SubshiftFamily::sparse(cN, cK);
                auto lc = linear_random_codec(family, cN * cl, ck, seed, grid, 2.0, budget);
                json desc;
                desc["scheme"] = "linear-random";
                desc["n"] = lc.n;
                desc["k"] = lc.k;
                desc["rate"] = static_cast<double>(lc.k) / lc.n;
                desc["injective_on_words"] = lc.report.injective_on_words;
                desc["words"] = lc.report.words;
                desc["min_image_gap"] = lc.report.min_image_gap;
                desc["inverse_lipschitz_witness"] = lc.report.inverse_constant;
                desc["seed"] = seed;
                write_file(out_dir + "/codec.json", desc.dump(2) + "\n");
                std::cout << "injective: " << (lc.report.injective_on_words ? "yes" : "no")
                          << ", rate: " << format_general(static_cast<double>(lc.k) / lc.n) << "\n"
                          << "wrote " << out_dir << "/codec.json\n";
                return lc.report.injective_on_words ? 0 : 1;
            }
            if (codec_scheme == "quantizer") {
                auto qc = quantizer_curve_codec(cN * cl, parse_alpha_den(codec_alpha), bits);
                json desc = codec_descriptor(qc, {{"n", cN * cl}, {"alpha", codec_alpha}, {"j", bits}});
                write_file(out_dir + "/codec.json", desc.dump(2) + "\n");
                std::cout << "rate: " << format_general(qc.rate()) << " (ceiling alpha + 1/n = "
                          << format_general(1.0 / parse_alpha_den(codec_alpha) + 1.0 / (cN * cl))
                          << ")\nwrote " << out_dir << "/codec.json\n";
                return 0;
            }
            throw UsageError("unknown codec scheme: " + codec_scheme);
        }

        if (rd->parsed()) {
            auto measure = parse_measure(rd_measure, grid);
            std::vector<double> eps;
            for (const auto& e : split(rd_eps, ',')) eps.push_back(std::ldexp(1.0, -parse_eps_bits(e)));
            auto curve = rd_function(measure, parse_int_list(rd_n), rd_p, eps, grid, budget);
            write_file(out_dir + "/rd_curve.csv", rd_curve_csv(curve));
            write_file(out_dir + "/rd_curve.json", to_json(curve).dump(2) + "\n");
            auto dim_est = curve.points.size() >= 2 ? rd_dimension(curve) : RDDimension{};
            std::cout << "measure: " << measure.name() << " p=" << format_general(rd_p) << "\n";
            for (const auto& pt : curve.points)
                std::cout << "  eps=" << format_general(pt.eps) << " rate=" << format_general(pt.rate)
                          << " bits/coord (ratio " << format_general(pt.rate / std::log2(1.0 / pt.eps))
                          << ")\n";
            if (curve.points.size() >= 2)
                std::cout << "rate-distortion dimension (endpoint slope): "
                          << format_general(dim_est.value) << "\n";
            std::cout << "wrote " << out_dir << "/rd_curve.csv, rd_curve.json\n";
            return 0;
        }

        if (verify->parsed()) {
            if (v_what == "bound-chain") {
                auto family = parse_family(v_family);
                auto rep = bound_chain(family, parse_alpha_den(v_alpha), kInfNorm, grid, budget, seed);
                write_file(out_dir + "/bound_chain.json", to_json(rep).dump(2) + "\n");
                write_file(out_dir + "/bound_chain.csv", bound_chain_csv(rep));
                for (const auto& r : rep.rows)
                    std::cout << (r.holds() ? "  ok  " : " FAIL ") << r.name
                              << "  lhs=" << format_general(r.lhs) << " rhs=" << format_general(r.rhs)
                              << " slack=" << format_general(r.slack()) << "\n";
                std::cout << "wrote " << out_dir << "/bound_chain.{json,csv}\n";
                return rep.all_hold() ? 0 : 1;
            }
            if (v_what == "ball-entropy") {
                auto rows = ball_entropy_check(v_nmax, {0.125, 0.25, 0.375, 0.5});
                std::string csv = "n,delta,ball,bound,holds\n";
                bool ok = true;
                for (const auto& r : rows) {
                    ok = ok && r.holds();
                    csv += std::to_string(r.n) + "," + format_general(r.delta) + "," +
                           std::to_string(r.ball) + "," + format_general(r.bound) + "," +
                           (r.holds() ? "yes" : "no") + "\n";
                }
                write_file(out_dir + "/ball_entropy.csv", csv);
                std::cout << (ok ? "ball-entropy bound holds for all n <= " + std::to_string(v_nmax)
                                 : "ball-entropy bound VIOLATED")
                          << "\nwrote " << out_dir << "/ball_entropy.csv\n";
                return ok ? 0 : 1;
            }
            if (v_what == "lin-rank") {
                auto rep = lin_rank_check(v_N, v_K, v_l, v_k, v_trials, seed);
                std::cout << "subspace dim " << rep.subspace_dim << ", k=" << v_k << ": "
                          << rep.rank_deficient << "/" << rep.trials << " rank deficient\n";
                json j;
                j["n"] = rep.n;
                j["k"] = rep.k;
                j["subspace_dim"] = rep.subspace_dim;
                j["trials"] = rep.trials;
                j["rank_deficient"] = rep.rank_deficient;
                j["full_rank"] = rep.full_rank;
                write_file(out_dir + "/lin_rank.json", j.dump(2) + "\n");
                bool ok = v_k < rep.subspace_dim ? rep.rank_deficient == rep.trials
                                                 : rep.full_rank * 100 >= rep.trials * 95;
                return ok ? 0 : 1;
            }
            if (v_what == "variational") {
                auto family = parse_family(v_family);
                std::vector<MeasureSpec> battery;
                std::vector<int> n_sched;
                DyadicGrid vgrid(bits);
                if (const auto* sp = std::get_if<SparseNK>(&family.spec)) {
                    battery.push_back(MeasureSpec::shift_average(sp->window, sp->max_support));
                    n_sched = {sp->window};
                } else {
                    battery.push_back(MeasureSpec::uniform_iid(vgrid));
                    n_sched = {1};
                }
                auto est = variational_estimate(battery, family, {0.25, 0.125}, 2.0, n_sched, vgrid,
                                                budget);
                auto mm = mmdim_estimate(family, default_n_schedule_mmdim(family, vgrid),
                                         default_j_schedule(vgrid), vgrid, budget);
                json j;
                j["eps"] = est.eps;
                j["sup_ratio"] = est.sup_ratio;
                j["endpoint_slope"] = est.endpoint_slope;
                j["mmdim_estimate"] = mm.value;
                write_file(out_dir + "/variational.json", j.dump(2) + "\n");
                std::cout << "sup R(eps)/log2(1/eps) at finest eps: " << format_general(est.at_finest())
                          << "  (slope diagnostic " << format_general(est.endpoint_slope)
                          << ", mmdim estimate " << format_general(mm.value) << ")\n"
                          << "wrote " << out_dir << "/variational.json\n";
                return 0;
            }
            if (v_what == "dynamical") {
                auto family = parse_family(v_family);
                auto rep = dynamical_covering_check(family, 4, 3, 2, DyadicGrid(std::min(bits, 2)), budget);
                std::cout << "projection cells " << rep.projection_cells << ", dynamical packing "
                          << rep.dynamical_packing_lower << ", extended cells "
                          << rep.extended_projection_cells << ", domination "
                          << (rep.domination_ok ? "ok" : "FAIL") << ", net "
                          << (rep.net_ok ? "ok" : "FAIL") << "\n";
                return rep.ok() ? 0 : 1;
            }
            throw UsageError("unknown verify target: " + v_what);
        }

        if (sf->parsed()) {
            auto map = cube_surjection(sf_k, sf_n, sf_b);
            std::size_t errors = 0;
            std::uint64_t cells = std::uint64_t{1} << (sf_n * sf_b);
            if (cells > (1u << 24)) throw budget_error("spacefill check grid too large");
            for (std::uint64_t c = 0; c < cells; ++c) {
                std::vector<double> y(static_cast<std::size_t>(sf_n));
                std::uint64_t t = c;
                for (int i = 0; i < sf_n; ++i) {
                    y[static_cast<std::size_t>(i)] =
                        std::ldexp(static_cast<double>(t & ((std::uint64_t{1} << sf_b) - 1)), -sf_b);
                    t >>= sf_b;
                }
                if (map.forward(map.right_inverse(y)) != y) ++errors;
            }
            auto fwd = [&](const std::vector<double>& t) { return map.forward(t); };
            auto est = holder_estimate(fwd, sf_k, map.source_bits(), kInfNorm, map.alpha(), 20000, seed,
                                       curve_adjacent_pairs(map), jobs);
            std::string csv = "k,n,b,alpha,roundtrip_errors,cells,alpha_hat,L_at_alpha\n";
            csv += std::to_string(sf_k) + "," + std::to_string(sf_n) + "," + std::to_string(sf_b) + "," +
                   format_general(map.alpha()) + "," + std::to_string(errors) + "," +
                   std::to_string(cells) + "," + format_general(est.alpha_hat) + "," +
                   format_general(est.L_at_alpha) + "\n";
            write_file(out_dir + "/spacefill.csv", csv);
            std::cout << "roundtrip errors: " << errors << "/" << cells
                      << ", exponent tag " << format_general(map.alpha()) << ", measured alpha_hat "
                      << format_general(est.alpha_hat) << ", L " << format_general(est.L_at_alpha)
                      << "\nwrote " << out_dir << "/spacefill.csv\n";
            return errors == 0 ? 0 : 1;
        }
    } catch (const budget_error& e) {
        std::cerr << "budget error: " << e.what() << "\n";
        return 3;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
