#include <benchmark/benchmark.h>

#include <random>

#include "corpus_router/hash_embed.hpp"
#include "corpus_router/retrieval.hpp"
#include "corpus_router/routing.hpp"
#include "test_support.hpp"

using namespace corpus_router;

static void BM_HashEmbed(benchmark::State& state) {
    const int dim = static_cast<int>(state.range(0));
    const std::string text =
        "Which academic discipline do computer scientist Alan Turing and "
        "mathematician John von Neumann have in common?";
    for (auto _ : state) {
        auto v = hash_embed(text, dim, 7);
        benchmark::DoNotOptimize(v.data());
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_HashEmbed)->Arg(256)->Arg(1024)->Arg(4096);

static void BM_CosineScore(benchmark::State& state) {
    const int dim = static_cast<int>(state.range(0));
    std::mt19937_64 rng(1);
    const auto a = bench_support::random_unit(dim, rng);
    const auto b = bench_support::random_unit(dim, rng);
    for (auto _ : state) benchmark::DoNotOptimize(cosine_score(a, b));
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_CosineScore)->Arg(64)->Arg(256)->Arg(1024);

static void BM_RetrieveTopK(benchmark::State& state) {
    const uint64_t count = static_cast<uint64_t>(state.range(0));
    const int dim = 64;
    std::mt19937_64 rng(2);
    const auto corpus = bench_support::random_corpus(count, dim, rng);
    const auto query = bench_support::random_unit(dim, rng);
    for (auto _ : state) {
        auto result = retrieve_topk(query, *corpus, 10);
        benchmark::DoNotOptimize(result.entries.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(count));
}
BENCHMARK(BM_RetrieveTopK)->Arg(1000)->Arg(10000)->Arg(100000);

static void BM_UnifiedRetrieve(benchmark::State& state) {
    const uint64_t per_corpus = static_cast<uint64_t>(state.range(0));
    const int dim = 64;
    std::mt19937_64 rng(3);
    std::vector<std::shared_ptr<Corpus>> corpora;
    const auto& universe = GranularityScheme::default_scheme().universe();
    for (size_t p = 1; p < universe.size(); ++p)
        corpora.push_back(bench_support::random_corpus(per_corpus, dim, rng, universe[p]));
    const auto query = bench_support::random_unit(dim, rng);
    for (auto _ : state) {
        auto result = unified_retrieve(query, corpora, 10);
        benchmark::DoNotOptimize(result.entries.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(per_corpus * 7));
}
BENCHMARK(BM_UnifiedRetrieve)->Arg(1000)->Arg(10000);

static void BM_RouteTrained(benchmark::State& state) {
    TrainedRouterModel model;
    const auto& scheme = GranularityScheme::default_scheme();
    model.dim = static_cast<int>(state.range(0));
    model.labels = scheme.universe();
    std::mt19937_64 rng(4);
    std::normal_distribution<double> coef(0.0, 0.1);
    model.weights.resize(model.labels.size() * static_cast<size_t>(model.dim));
    model.bias.resize(model.labels.size());
    for (auto& w : model.weights) w = coef(rng);
    const std::string query = "Describe the moment Messi scored his goal.";
    for (auto _ : state) {
        auto d = route_trained(model, query);
        benchmark::DoNotOptimize(&d);
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_RouteTrained)->Arg(1024)->Arg(4096);

BENCHMARK_MAIN();
