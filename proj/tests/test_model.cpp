#include <catch2/catch_amalgamated.hpp>

#include "anacomp/model.hpp"
#include "anacomp/serialize.hpp"

using namespace anacomp;

TEST_CASE("dyadic grid quantization") {
    DyadicGrid g(3);
    CHECK(g.quantize(0.13) == 0.125);
    CHECK(g.quantize(1.7) == 1.0);
    CHECK(g.quantize(-0.2) == 0.0);
    Rng rng(3);
    for (int i = 0; i < 1000; ++i) {
        double x = rng.next_unit();
        double q = g.quantize(x);
        CHECK(g.quantize(q) == q); // idempotent
        CHECK(g.on_grid(q));
    }
    CHECK(DyadicGrid::cell_index(1.0, 2) == 3); // last cell closed
    CHECK(DyadicGrid::cell_index(0.75, 2) == 3);
    CHECK(DyadicGrid::cell_index(0.0, 2) == 0);
}

TEST_CASE("block validation") {
    DyadicGrid g(2);
    CHECK_THROWS_AS(Block({0.3}, g), std::invalid_argument);  // off grid
    CHECK_THROWS_AS(Block({-0.25}, g), std::invalid_argument); // out of range
    Block b({0.25, 1.0, 0.0}, g);
    CHECK(b.length() == 3);
}

TEST_CASE("normalized lp distances") {
    DyadicGrid g(1);
    Block x({0.0, 0.0}, g), y({1.0, 1.0}, g);
    CHECK(norm_distance(x, y, kInfNorm) == 1.0);
    Block a({1.0, 0.0}, g), z({0.0, 0.0}, g);
    CHECK(norm_distance(a, z, 1.0) == 0.5); // normalization by n
    CHECK_THROWS_AS(norm_distance(Block({0.0}, g), x, 2.0), dimension_error);
}

TEST_CASE("norm ordering over random pairs") {
    // |.|_1 <= |.|_2 <= |.|_inf <= n |.|_1 on [0,1]^8
    DyadicGrid g(6);
    for (int trial = 0; trial < 10000; ++trial) {
        Rng rng = Rng::child(99, static_cast<std::uint64_t>(trial));
        std::vector<double> u(8), v(8);
        for (auto& c : u) c = g.from_index(static_cast<std::int64_t>(rng.next_below(65)));
        for (auto& c : v) c = g.from_index(static_cast<std::int64_t>(rng.next_below(65)));
        double d1 = norm_distance(u, v, 1.0), d2 = norm_distance(u, v, 2.0),
               di = norm_distance(u, v, kInfNorm);
        REQUIRE(d1 <= d2 + 1e-12);
        REQUIRE(d2 <= di + 1e-12);
        REQUIRE(di <= 8.0 * d1 + 1e-12);
    }
}

TEST_CASE("product metric on symmetric windows") {
    DyadicGrid g(1);
    Block x({0.5, 0.5, 0.5}, g);
    CHECK(tau_distance(x, x) == 0.0);
    // only the center coordinate differs by 1
    Block c0({0.5, 1.0, 0.5}, g), c1({0.5, 0.0, 0.5}, g);
    CHECK(tau_distance(c0, c1) == 1.0);
    Block ones({1, 1, 1, 1, 1}, g), zeros({0, 0, 0, 0, 0}, g);
    CHECK(tau_distance(ones, zeros) == 2.5); // 1 + 2*(1/2) + 2*(1/4)
    CHECK_THROWS_AS(tau_distance(ones, x), dimension_error);
}

TEST_CASE("support") {
    DyadicGrid g(2);
    CHECK(support_size(Block({0, 0, 0}, g)) == 0);
    auto s = support(Block({0.5, 0, 0.25}, g));
    CHECK(s.size() == 2);
    CHECK(s.indices == std::vector<int>{0, 2});
}

TEST_CASE("sparse words have bounded support") {
    DyadicGrid g(3);
    auto fam = SubshiftFamily::sparse(4, 1);
    for_each_word(fam, 4, g, {}, [](const Block& w) { REQUIRE(support_size(w) <= 1); });
}

TEST_CASE("family membership") {
    DyadicGrid g(3);
    auto sparse = SubshiftFamily::sparse(4, 1);
    CHECK(contains(sparse, Block({0.5, 0, 0, 0, 0.25, 0, 0, 0}, g), g));
    CHECK_FALSE(contains(sparse, Block({0.5, 0.25, 0, 0}, g), g));
    auto binary = SubshiftFamily::full({0.0, 1.0});
    CHECK(contains(binary, Block({0, 1, 1, 0}, g), g));
    CHECK_FALSE(contains(binary, Block({0, 0.5}, g), g));
    // windows shorter than N impose only fully visible subwindows
    CHECK(contains(sparse, Block({0.5, 0.25}, g), g));
    auto vc = SubshiftFamily::vanishing_cubes(3);
    CHECK(contains(vc, Block({0, 0.125, 0.125, 0}, g), g));   // span 2, values <= 1/4
    CHECK_FALSE(contains(vc, Block({0, 0.5, 0.5, 0}, g), g)); // values above 2^-span
    CHECK_FALSE(contains(vc, Block({0.125, 0, 0, 0.125}, g), g)); // span 4 > mMax
}

TEST_CASE("membership is shift consistent") {
    DyadicGrid g(2);
    for (const auto& fam :
         {SubshiftFamily::sparse(3, 1), SubshiftFamily::vanishing_cubes(2), SubshiftFamily::full({0.0, 1.0})}) {
        for_each_word(fam, 5, g, {}, [&](const Block& w) {
            for (int lo = 0; lo < w.length(); ++lo)
                for (int hi = lo; hi < w.length(); ++hi) {
                    std::vector<double> sub(w.values.begin() + lo, w.values.begin() + hi + 1);
                    REQUIRE(contains(fam, Block(sub, g), g));
                }
        });
    }
}

TEST_CASE("word enumeration counts and order") {
    DyadicGrid g2(2), g1(1);
    CHECK(enumerate_words(SubshiftFamily::full({0.0, 1.0}), 3, g2).size() == 8);
    CHECK(enumerate_words(SubshiftFamily::sparse(4, 1), 4, g2).size() == 17);
    auto words = enumerate_words(SubshiftFamily::sparse(2, 1), 2, g1);
    REQUIRE(words.size() == 5);
    std::vector<std::vector<double>> expect{{0, 0}, {0, 0.5}, {0, 1}, {0.5, 0}, {1, 0}};
    for (std::size_t i = 0; i < 5; ++i) CHECK(words[i].values == expect[i]);
    CHECK(std::is_sorted(words.begin(), words.end()));
}

TEST_CASE("enumeration budget is enforced") {
    DyadicGrid g(6);
    Budget small;
    small.max_words = 1e4;
    CHECK_THROWS_AS(enumerate_words(SubshiftFamily::full_grid(), 12, g, small), budget_error);
}

TEST_CASE("sparse pattern counts against direct filtering") {
    // enumeration (backtracking) and the closed form sum_s c_s (2^b)^s agree
    for (int N : {2, 3, 4})
        for (int K = 1; K < N; ++K)
            for (int n : {2, 4, 6, 8})
                for (int b : {1, 2, 3}) {
                    DyadicGrid g(b);
                    auto fam = SubshiftFamily::sparse(N, K);
                    std::size_t direct = 0;
                    for_each_word(fam, n, g, {}, [&](const Block&) { ++direct; });
                    double logc = log2_word_count(fam, n, g);
                    REQUIRE(std::llround(std::pow(2.0, logc)) == static_cast<long long>(direct));
                }
}

TEST_CASE("sampling determinism and admissibility") {
    DyadicGrid g(3);
    auto uniform = MeasureSpec::uniform_iid_on({0.0, 1.0});
    auto a = sample_windows(uniform, 4, 5, 42, g);
    auto b = sample_windows(uniform, 4, 5, 42, g);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) REQUIRE(a[i] == b[i]); // bit-for-bit
    auto sparse = MeasureSpec::shift_average(4, 1);
    auto fam = SubshiftFamily::sparse(4, 1);
    for (const Block& w : sample_windows(sparse, 12, 10000, 7, g)) REQUIRE(contains(fam, w, g));
}

TEST_CASE("law of large numbers for the iid marginal") {
    DyadicGrid g(1);
    auto uniform = MeasureSpec::uniform_iid_on({0.0, 1.0});
    auto samples = sample_windows(uniform, 1, 100000, 11, g);
    double mean = 0.0;
    for (const Block& s : samples) mean += s.values[0];
    mean /= static_cast<double>(samples.size());
    CHECK(std::abs(mean - 0.5) < 0.01);
}

TEST_CASE("shift-average windows are stationary") {
    // empirical laws of x|_0^{N-1} and x|_1^N agree in total variation
    const int N = 4, K = 1, S = 100000;
    DyadicGrid g(3);
    auto measure = MeasureSpec::shift_average(N, K);
    auto samples = sample_windows(measure, N + 1, S, 23, g);
    std::map<std::string, int> h0, h1;
    auto binned = [](const Block& w, int from, int len) {
        std::string key;
        for (int i = from; i < from + len; ++i)
            key += static_cast<char>('0' + DyadicGrid::cell_index(w.values[static_cast<std::size_t>(i)], 2));
        return key;
    };
    for (const Block& w : samples) {
        ++h0[binned(w, 0, N)];
        ++h1[binned(w, 1, N)];
    }
    double tv = 0.0;
    std::set<std::string> keys;
    for (auto& [k, v] : h0) keys.insert(k);
    for (auto& [k, v] : h1) keys.insert(k);
    for (const auto& k : keys)
        tv += std::abs((h0.count(k) ? h0[k] : 0) - (h1.count(k) ? h1[k] : 0));
    tv /= 2.0 * S;
    CHECK(tv < 0.02);
}

TEST_CASE("exact support enumeration carries unit mass") {
    DyadicGrid g(3);
    auto sup = enumerate_support(MeasureSpec::shift_average(4, 1), 4, g);
    REQUIRE(sup.has_value());
    CHECK(sup->size() == 33); // 4 positions x 8 nonzero values + the zero word
    double mass = 0.0;
    for (auto& [b, p] : *sup) mass += p;
    CHECK(std::abs(mass - 1.0) < 1e-12);
    auto fam = SubshiftFamily::sparse(4, 1);
    for (auto& [b, p] : *sup) REQUIRE(contains(fam, b, g));
}

TEST_CASE("measure validation") {
    CHECK_THROWS_AS(MeasureSpec::product_iid({0.0, 1.0}, {0.6, 0.6}), std::invalid_argument);
    CHECK_THROWS_AS(MeasureSpec::product_iid({0.0}, {-1.0}), std::invalid_argument);
}

TEST_CASE("family and measure json roundtrip") {
    for (const auto& fam : {SubshiftFamily::sparse(4, 1), SubshiftFamily::full_grid(),
                            SubshiftFamily::full({0.0, 0.5, 1.0}), SubshiftFamily::vanishing_cubes(6),
                            SubshiftFamily::reciprocal(12)}) {
        auto back = family_from_json(to_json(fam));
        CHECK(to_json(back) == to_json(fam));
    }
    auto m = MeasureSpec::shift_average(4, 1);
    CHECK(to_json(measure_from_json(to_json(m))) == to_json(m));
    RunConfig cfg;
    cfg.seed = 99;
    cfg.bits = 4;
    cfg.jobs = 8;
    CHECK(RunConfig::from_json(cfg.to_json()).to_json() == cfg.to_json());
}

TEST_CASE("block csv uses exactly b fractional digits") {
    DyadicGrid g(3);
    Block b({0.125, 1.0, 0.0}, g);
    CHECK(block_csv_row(b) == "0.125,1.000,0.000");
}

TEST_CASE("reciprocal alphabet collapses grid collisions") {
    DyadicGrid g(4);
    auto vals = reciprocal_alphabet_values(ReciprocalAlphabet{32}, g);
    CHECK(std::is_sorted(vals.begin(), vals.end()));
    CHECK(std::adjacent_find(vals.begin(), vals.end()) == vals.end()); // distinct
    CHECK(vals.front() == 0.0);
    CHECK(vals.back() == 1.0);
}
