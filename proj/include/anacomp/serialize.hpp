// JSON descriptions of families, measures and reports, plus the CSV emitters.
// Blocks serialize as decimal rows with exactly b fractional digits, which is
// lossless for b-bit dyadic values.
#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "anacomp/codec.hpp"
#include "anacomp/dimension.hpp"
#include "anacomp/harness.hpp"
#include "anacomp/model.hpp"
#include "anacomp/ratedist.hpp"

namespace anacomp {

using nlohmann::json;

inline std::string format_value(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

inline std::string format_general(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// Families and measures
// ---------------------------------------------------------------------------

inline json to_json(const SubshiftFamily& family) {
    json j;
    if (const auto* fs = std::get_if<FullShift>(&family.spec)) {
        j["type"] = "full";
        if (fs->alphabet.empty()) j["alphabet"] = "grid";
        else j["alphabet"] = fs->alphabet;
    } else if (const auto* sp = std::get_if<SparseNK>(&family.spec)) {
        j["type"] = "sparse";
        j["N"] = sp->window;
        j["K"] = sp->max_support;
    } else if (const auto* vc = std::get_if<VanishingCubes>(&family.spec)) {
        j["type"] = "vanishing-cubes";
        j["mMax"] = vc->m_max;
    } else {
        j["type"] = "reciprocal";
        j["nMax"] = std::get<ReciprocalAlphabet>(family.spec).n_max;
    }
    return j;
}

inline SubshiftFamily family_from_json(const json& j) {
    const std::string type = j.at("type");
    if (type == "full") {
        if (!j.contains("alphabet") || j["alphabet"] == "grid") return SubshiftFamily::full_grid();
        return SubshiftFamily::full(j["alphabet"].get<std::vector<double>>());
    }
    if (type == "sparse") return SubshiftFamily::sparse(j.at("N"), j.at("K"));
    if (type == "vanishing-cubes") return SubshiftFamily::vanishing_cubes(j.at("mMax"));
    if (type == "reciprocal") return SubshiftFamily::reciprocal(j.at("nMax"));
    throw std::invalid_argument("unknown family type: " + type);
}

inline json to_json(const MeasureSpec& measure) {
    json j;
    if (const auto* pi = std::get_if<ProductIID>(&measure.spec)) {
        j["type"] = "product-iid";
        j["values"] = pi->values;
        j["probs"] = pi->probs;
    } else if (const auto* sa = std::get_if<ShiftAverageProduct>(&measure.spec)) {
        j["type"] = "shift-average";
        j["N"] = sa->window;
        j["K"] = sa->max_support;
    } else {
        const auto& em = std::get<Empirical>(measure.spec);
        j["type"] = "empirical";
        json samples = json::array();
        for (const Block& b : em.samples) samples.push_back(b.values);
        j["samples"] = samples;
        j["weights"] = em.weights;
        j["bits"] = em.samples.empty() ? 6 : em.samples.front().bits;
    }
    return j;
}

inline MeasureSpec measure_from_json(const json& j) {
    const std::string type = j.at("type");
    if (type == "product-iid")
        return MeasureSpec::product_iid(j.at("values").get<std::vector<double>>(),
                                        j.at("probs").get<std::vector<double>>());
    if (type == "shift-average") return MeasureSpec::shift_average(j.at("N"), j.at("K"));
    if (type == "empirical") {
        DyadicGrid grid(j.value("bits", 6));
        std::vector<Block> samples;
        for (const auto& row : j.at("samples")) samples.emplace_back(row.get<std::vector<double>>(), grid);
        return MeasureSpec::empirical(std::move(samples), j.at("weights").get<std::vector<double>>());
    }
    throw std::invalid_argument("unknown measure type: " + type);
}

inline json to_json(const HolderSpec& spec) {
    static const char* names[] = {"borel", "linear", "lipschitz", "holder"};
    json j;
    j["class"] = names[static_cast<int>(spec.cls)];
    j["p"] = std::isinf(spec.p) ? json("inf") : json(spec.p);
    j["L"] = spec.L;
    j["alpha"] = spec.alpha;
    return j;
}

// ---------------------------------------------------------------------------
// Blocks
// ---------------------------------------------------------------------------

inline std::string block_csv_row(const Block& b) {
    std::string out;
    for (int i = 0; i < b.length(); ++i) {
        if (i) out += ",";
        out += format_value(b.values[static_cast<std::size_t>(i)], b.bits);
    }
    return out;
}

inline std::string blocks_to_csv(const std::vector<Block>& blocks) {
    std::string out;
    for (const Block& b : blocks) {
        out += block_csv_row(b);
        out += "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

inline json to_json(const DimensionEstimate& est) {
    json j;
    j["value"] = est.value;
    j["n_schedule"] = est.n_schedule;
    j["j_schedule"] = est.j_schedule;
    j["per_eps"] = est.per_eps;
    j["h_table"] = est.h_table;
    j["endpoint_slope"] = est.endpoint_slope;
    j["ls_slope"] = est.ls_slope;
    j["ratio_at_finest"] = est.ratio_at_finest;
    return j;
}

inline std::string covering_table_csv(const std::string& family, const SubshiftFamily& fam,
                                      const std::vector<int>& n_schedule,
                                      const std::vector<int>& j_schedule, const DyadicGrid& grid,
                                      const Budget& budget = {}) {
    std::string out = "family,n,j,count_method,count,h_value\n";
    for (int n : n_schedule)
        for (int j : j_schedule) {
            double lc = log2_cell_count(fam, n, j, grid, budget);
            out += family + "," + std::to_string(n) + "," + std::to_string(j) + ",exact-cells," +
                   format_general(std::pow(2.0, lc)) + "," +
                   format_general(lc / (static_cast<double>(n) * j)) + "\n";
        }
    return out;
}

inline json to_json(const RDCurve& curve) {
    json j;
    j["n_schedule"] = curve.n_schedule;
    j["p"] = curve.p;
    j["inf_over_n"] = curve.inf_over_n;
    json pts = json::array();
    for (const auto& pt : curve.points) {
        pts.push_back({{"eps", pt.eps},
                       {"rate", pt.rate},
                       {"achieved_distortion", pt.achieved_distortion},
                       {"iterations", pt.iterations},
                       {"slope", pt.slope},
                       {"best_n", pt.best_n}});
    }
    j["points"] = pts;
    return j;
}

inline std::string rd_curve_csv(const RDCurve& curve) {
    std::string out = "n,p,epsilon,rate,achieved_distortion,iterations\n";
    for (const auto& pt : curve.points)
        out += std::to_string(pt.best_n) + "," + format_general(curve.p) + "," +
               format_general(pt.eps) + "," + format_general(pt.rate) + "," +
               format_general(pt.achieved_distortion) + "," + std::to_string(pt.iterations) + "\n";
    return out;
}

inline json to_json(const BoundChainReport& rep) {
    json j;
    j["family"] = rep.family;
    j["alpha"] = rep.alpha;
    j["p"] = std::isinf(rep.p) ? json("inf") : json(rep.p);
    j["mmdim"] = rep.mmdim;
    j["mbdim"] = rep.mbdim;
    if (!std::isnan(rep.sparse_rate)) j["sparse_rate"] = rep.sparse_rate;
    if (!std::isnan(rep.linear_rate)) j["linear_rate"] = rep.linear_rate;
    if (!std::isnan(rep.curve_rate)) j["curve_rate"] = rep.curve_rate;
    json rows = json::array();
    for (const auto& r : rep.rows)
        rows.push_back({{"name", r.name},
                        {"lhs", r.lhs},
                        {"rhs", r.rhs},
                        {"slack", r.slack()},
                        {"tolerance", r.tolerance},
                        {"analytic_input", r.analytic_input},
                        {"holds", r.holds()}});
    j["rows"] = rows;
    j["all_hold"] = rep.all_hold();
    return j;
}

inline std::string bound_chain_csv(const BoundChainReport& rep) {
    std::string out = "family,inequality,lhs,rhs,slack,tolerance,analytic_input,holds\n";
    for (const auto& r : rep.rows)
        out += rep.family + ",\"" + r.name + "\"," + format_general(r.lhs) + "," +
               format_general(r.rhs) + "," + format_general(r.slack()) + "," +
               format_general(r.tolerance) + "," + (r.analytic_input ? "yes" : "no") + "," +
               (r.holds() ? "yes" : "no") + "\n";
    return out;
}

inline json codec_descriptor(const CodecPair& codec, const json& params = json::object()) {
    json j;
    j["scheme"] = codec.scheme;
    j["n"] = codec.n;
    j["k"] = codec.k;
    j["rate"] = codec.rate();
    j["encoder"] = to_json(codec.encoder_reg);
    j["decoder"] = to_json(codec.decoder_reg);
    j["params"] = params;
    return j;
}

// ---------------------------------------------------------------------------
// Run configuration
// ---------------------------------------------------------------------------

struct RunConfig {
    std::uint64_t seed = 1;
    int bits = 6;
    int jobs = 1;
    Budget budget;
    std::string out_dir = "out";

    json to_json() const {
        json j;
        j["seed"] = seed;
        j["bits"] = bits;
        j["jobs"] = jobs;
        j["budget"] = {{"max_words", budget.max_words}, {"max_joint_entries", budget.max_joint_entries}};
        j["out_dir"] = out_dir;
        return j;
    }

    static RunConfig from_json(const json& j) {
        RunConfig c;
        c.seed = j.value("seed", std::uint64_t{1});
        c.bits = j.value("bits", 6);
        c.jobs = j.value("jobs", 1);
        if (j.contains("budget")) {
            c.budget.max_words = j["budget"].value("max_words", 1e8);
            c.budget.max_joint_entries = j["budget"].value("max_joint_entries", 1e7);
        }
        c.out_dir = j.value("out_dir", "out");
        if (c.budget.max_words <= 0 || c.budget.max_joint_entries <= 0 || c.jobs <= 0)
            throw std::invalid_argument("budgets and jobs must be positive");
        return c;
    }
};

inline void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << contents;
}

} // namespace anacomp
