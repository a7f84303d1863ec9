#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "corpus_router/retrieval.hpp"
#include "corpus_router/theory.hpp"

using namespace corpus_router;

TEST_CASE("variance proxy composes from relevance weight and noise") {
    const ScoreModelParams p{0.3, 2.0, 0.1, 0.05};
    CHECK(p.sigma_sq() == 2.0 * 2.0 * 0.1 * 0.1 + 0.05 * 0.05);  // exact
    CHECK(ScoreModelParams::with_sigma(0.3, 0.07).sigma() == doctest::Approx(0.07));
}

TEST_CASE("zero bias makes the unified argmax land uniformly: p = |R|/total") {
    const auto outcome = simulate_unified_vs_routed(ScoreModelParams::with_sigma(0.0, 0.05),
                                                    {500, 500, 500}, 0.95, 10000, 1);
    const double expected = 500.0 / 1500.0;
    CHECK(std::abs(outcome.p_unified_in_r - expected) <= 3.0 * outcome.se_unified());
}

TEST_CASE("strong bias starves unified retrieval while routing stays at router_acc") {
    const auto outcome = simulate_unified_vs_routed(ScoreModelParams::with_sigma(0.5, 0.05),
                                                    {500, 500, 500}, 0.95, 10000, 7);
    CHECK(outcome.p_unified_in_r < 0.01);
    CHECK(std::abs(outcome.p_routed_in_r - 0.95) < 0.01);

    // cross-check at 10x the trials: the estimate is not a sampling fluke
    const auto big = simulate_unified_vs_routed(ScoreModelParams::with_sigma(0.5, 0.05),
                                                {500, 500, 500}, 0.95, 100000, 8);
    CHECK(big.p_unified_in_r < 0.001);
}

TEST_CASE("simulation preconditions") {
    const auto params = ScoreModelParams::with_sigma(0.1, 0.05);
    CHECK_THROWS_AS(simulate_unified_vs_routed(params, {500, 0, 500}, 0.9, 100, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(simulate_unified_vs_routed(params, {0, 500, 500}, 0.9, 100, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(simulate_unified_vs_routed(params, {500, 500, 500}, 0.9, 0, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(simulate_unified_vs_routed(params, {500, 500, 500}, 1.5, 100, 1),
                    std::invalid_argument);
}

TEST_CASE("simulation is deterministic per seed and SE shrinks like sqrt(trials)") {
    const auto params = ScoreModelParams::with_sigma(0.05, 0.05);
    const auto a = simulate_unified_vs_routed(params, {200, 200, 200}, 0.9, 5000, 11);
    const auto b = simulate_unified_vs_routed(params, {200, 200, 200}, 0.9, 5000, 11);
    CHECK(a.p_unified_in_r == b.p_unified_in_r);
    CHECK(a.p_routed_in_r == b.p_routed_in_r);

    const auto big = simulate_unified_vs_routed(params, {200, 200, 200}, 0.9, 10000, 11);
    const double shrink = a.se_unified() / big.se_unified();
    CHECK(shrink == doctest::Approx(std::sqrt(2.0)).epsilon(0.15));
}

TEST_CASE("chernoff bound closed form") {
    SUBCASE("alpha zero gives |R||S|") {
        CHECK(chernoff_bound(ScoreModelParams::with_sigma(0.0, 0.05), {10, 10, 10}) ==
              doctest::Approx(100.0));
    }
    SUBCASE("hand-evaluated cell: 100 e^-4") {
        // alpha=0.2, sigma=0.05: alpha^2/(4 sigma^2) = 0.04/0.01 = 4
        const double bound =
            chernoff_bound(ScoreModelParams::with_sigma(0.2, 0.05), {10, 10, 10});
        CHECK(bound == doctest::Approx(100.0 * std::exp(-4.0)).epsilon(1e-12));
        CHECK(bound == doctest::Approx(1.8316).epsilon(1e-4));
    }
    SUBCASE("sigma zero with positive alpha returns the limit 0") {
        CHECK(chernoff_bound(ScoreModelParams::with_sigma(0.2, 0.0), {10, 10, 10}) == 0.0);
    }
    SUBCASE("vacuous bounds above 1 come back unclamped") {
        CHECK(chernoff_bound(ScoreModelParams::with_sigma(0.01, 0.5), {1000, 1000, 0}) >
              1.0);
    }
}

TEST_CASE("bound dominates the simulated unified probability across a small grid") {
    for (double alpha : {0.05, 0.2, 0.4}) {
        for (double sigma : {0.02, 0.1}) {
            const auto params = ScoreModelParams::with_sigma(alpha, sigma);
            const CorpusSizes sizes{200, 200, 200};
            const auto outcome = simulate_unified_vs_routed(params, sizes, 0.95, 4000, 3);
            const double bound = std::min(1.0, chernoff_bound(params, sizes));
            CHECK(bound >= outcome.p_unified_in_r - 3.0 * outcome.se_unified());
        }
    }
}

TEST_CASE("alpha_threshold closed form and paper operating point") {
    SUBCASE("the large-corpus operating point lands near 0.166") {
        const double threshold = alpha_threshold(
            {/*S*/ 1000000000000ULL, /*R*/ 1000000000000ULL, 1}, 0.8, 0.01);
        CHECK(threshold == doctest::Approx(0.166).epsilon(0.03));
        CHECK(std::abs(threshold - 0.166) < 0.005);
    }
    SUBCASE("independently recomputed mid-size value") {
        // 2*0.05*sqrt(ln(10^6)/0.9): ln(10^6)=13.8155, /0.9=15.3505, sqrt=3.9180
        const double threshold = alpha_threshold({1000, 1000, 1}, 0.9, 0.05);
        CHECK(threshold == doctest::Approx(2.0 * 0.05 * 3.91798).epsilon(1e-4));
        CHECK(threshold == doctest::Approx(0.392).epsilon(0.002));
    }
    SUBCASE("zero sigma needs no bias") {
        CHECK(alpha_threshold({10, 10, 1}, 0.8, 0.0) == 0.0);
    }
    SUBCASE("invalid router accuracy") {
        CHECK_THROWS_AS(alpha_threshold({10, 10, 1}, 0.0, 0.01), std::invalid_argument);
    }
}

TEST_CASE("threshold sufficiency: above it, routing beats unified in simulation") {
    const CorpusSizes sizes{500, 500, 500};
    const double r = 0.95;
    for (double sigma : {0.02, 0.05}) {
        const double needed = alpha_threshold(sizes, r, sigma);
        const auto params = ScoreModelParams::with_sigma(needed * 1.2, sigma);
        if (std::min(1.0, chernoff_bound(params, sizes)) < r) {
            const auto outcome = simulate_unified_vs_routed(params, sizes, r, 5000, 13);
            CHECK(outcome.p_routed_in_r > outcome.p_unified_in_r);
        }
    }
}

// Brute-force policy enumerator: every fixed policy, then the adaptive one.
namespace {
struct PolicyOracle {
    double best_fixed;
    double adaptive;
};
PolicyOracle enumerate_policies(const QualityTable& t) {
    PolicyOracle o{-1e300, 0.0};
    for (size_t g = 0; g < t.granularities.size(); ++g) {
        double sum = 0.0;
        for (const auto& row : t.values) sum += row[g];
        o.best_fixed = std::max(o.best_fixed, sum);
    }
    for (const auto& row : t.values)
        o.adaptive += *std::max_element(row.begin(), row.end());
    return o;
}
}  // namespace

TEST_CASE("granularity comparison on the two-query crossing example") {
    QualityTable t;
    t.query_ids = {"q1", "q2"};
    t.granularities = {"fine", "coarse"};
    t.values = {{0.9, 0.4}, {0.3, 0.8}};
    const auto cmp = compare_granularity_policies(t);
    CHECK(cmp.best_fixed_sum == doctest::Approx(1.2));
    CHECK(cmp.adaptive_sum == doctest::Approx(1.7));
    CHECK(cmp.strict);
}

TEST_CASE("an all-equal table gives no strict advantage") {
    QualityTable t;
    t.query_ids = {"q1", "q2", "q3"};
    t.granularities = {"fine", "coarse"};
    t.values = {{0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}};
    const auto cmp = compare_granularity_policies(t);
    CHECK(cmp.adaptive_sum == doctest::Approx(cmp.best_fixed_sum));
    CHECK(!cmp.strict);
}

TEST_CASE("adaptive never loses on random tables; strict iff argmaxes differ") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> quality(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        QualityTable t;
        const size_t queries = 1 + rng() % 20;
        const size_t grans = 1 + rng() % 4;
        for (size_t g = 0; g < grans; ++g) t.granularities.push_back("g" + std::to_string(g));
        for (size_t q = 0; q < queries; ++q) {
            t.query_ids.push_back("q" + std::to_string(q));
            std::vector<double> row;
            for (size_t g = 0; g < grans; ++g) row.push_back(quality(rng));
            t.values.push_back(row);
        }
        const auto cmp = compare_granularity_policies(t);
        const auto oracle = enumerate_policies(t);
        CHECK(cmp.best_fixed_sum == doctest::Approx(oracle.best_fixed).epsilon(1e-12));
        CHECK(cmp.adaptive_sum == doctest::Approx(oracle.adaptive).epsilon(1e-12));
        CHECK(cmp.adaptive_sum >= cmp.best_fixed_sum - 1e-12);

        // strict exactly when some query's argmax differs from the best fixed g
        size_t best_g = 0;
        double best_sum = -1e300;
        for (size_t g = 0; g < grans; ++g) {
            double sum = 0.0;
            for (const auto& row : t.values) sum += row[g];
            if (sum > best_sum) {
                best_sum = sum;
                best_g = g;
            }
        }
        bool any_differs = false;
        for (const auto& row : t.values)
            if (*std::max_element(row.begin(), row.end()) > row[best_g])
                any_differs = true;
        CHECK(cmp.strict == any_differs);
    }
}

TEST_CASE("incomplete tables are rejected") {
    QualityTable t;
    t.query_ids = {"q1", "q2"};
    t.granularities = {"fine", "coarse"};
    t.values = {{0.9, 0.4}};
    CHECK_THROWS_AS(compare_granularity_policies(t), std::invalid_argument);
    t.values = {{0.9, 0.4}, {0.3}};
    CHECK_THROWS_AS(compare_granularity_policies(t), std::invalid_argument);
}

TEST_CASE("bench_latency validates its inputs") {
    LatencyConfig bad;
    bad.pathway_count = 1;
    bad.corpus_sizes = {1000};
    CHECK_THROWS_AS(bench_latency(bad), std::invalid_argument);
    bad.pathway_count = 7;
    bad.corpus_sizes = {10};
    CHECK_THROWS_AS(bench_latency(bad), std::invalid_argument);
    bad.corpus_sizes = {1000};
    bad.repetitions = 2;
    CHECK_THROWS_AS(bench_latency(bad), std::invalid_argument);
}

TEST_CASE("small exact-scan bench produces positive times and a sane ratio") {
    LatencyConfig config;
    config.pathway_count = 4;
    config.corpus_sizes = {2000};
    config.dim = 16;
    config.repetitions = 3;
    config.route_cost_ms = 0.5;
    const auto report = bench_latency(config);
    CHECK(report.error.empty());
    REQUIRE(report.rows.size() == 1);
    CHECK(report.rows[0].t_unified_s > 0.0);
    CHECK(report.rows[0].t_routed_s > 0.0);
    CHECK(report.rows[0].ratio ==
          doctest::Approx(report.rows[0].t_unified_s / report.rows[0].t_routed_s));
    CHECK(report.rows[0].k == 4);
}

TEST_CASE("bucketed backend settles into the constant-factor regime") {
    // with the routing stub at zero, the ratio measures the backend's own
    // sqrt(kN)/sqrt(N) constant factor
    LatencyConfig config;
    config.pathway_count = 7;
    config.corpus_sizes = {10000, 100000};
    config.dim = 64;
    config.repetitions = 7;
    config.backend = LatencyBackend::bucketed;
    config.route_cost_ms = 0.0;
    const auto report = bench_latency(config);
    CHECK(report.error.empty());
    REQUIRE(report.rows.size() == 2);
    for (const auto& row : report.rows) CHECK(row.t_routed_s > 0.0);
    CHECK(report.rows.back().ratio >= 0.9);
}

TEST_CASE("score-model corpora realize the prescribed similarity structure") {
    std::mt19937_64 rng(23);
    std::vector<float> query(32);
    for (auto& x : query) x = std::uniform_real_distribution<float>(-1, 1)(rng);

    const auto params = ScoreModelParams::with_sigma(0.5, 0.02);
    const auto same = make_score_model_corpus(query, true, params, 200,
                                              GranularityScheme::default_scheme()
                                                  .parse_label("paragraph"),
                                              "same", 1);
    const auto other = make_score_model_corpus(query, false, params, 200,
                                               GranularityScheme::default_scheme()
                                                   .parse_label("image"),
                                               "required", 2);

    // same-modality similarities concentrate near alpha, others near zero
    double mean_same = 0.0, mean_other = 0.0;
    for (uint64_t i = 0; i < 200; ++i) {
        mean_same += cosine_score(query, same->primary(i));
        mean_other += cosine_score(query, other->primary(i));
    }
    mean_same /= 200;
    mean_other /= 200;
    CHECK(mean_same == doctest::Approx(0.5).epsilon(0.02));
    CHECK(std::abs(mean_other) < 0.02);

    // with a large bias the unified top-k all share the query's modality
    const auto top = unified_retrieve(query, {same, other}, 10);
    for (const auto& entry : top.entries) CHECK(entry.corpus_name == "same");
}

TEST_CASE("vector_at_similarity hits the requested cosine exactly") {
    std::mt19937_64 rng(29);
    std::vector<float> query(16);
    for (auto& x : query) x = std::uniform_real_distribution<float>(-1, 1)(rng);
    for (double s : {-0.9, -0.2, 0.0, 0.3, 0.77, 0.999}) {
        const auto v = vector_at_similarity(query, s, rng());
        CHECK(cosine_score(query, v) == doctest::Approx(s).epsilon(1e-5));
    }
    CHECK_THROWS_AS(vector_at_similarity(query, 1.0, 1), std::invalid_argument);
}
