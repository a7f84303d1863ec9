#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "corpus_router/corpus.hpp"
#include "corpus_router/pathway.hpp"

namespace corpus_router {

/// Parameters of the additive similarity model
///   s(q, c) = alpha * 1{same modality} + beta * r(q, c) + eps,
/// with r ~ N(0, sigma_r^2) and eps ~ N(0, sigma_eps^2). The Gaussian is
/// the simplest member of the sub-Gaussian class the analysis assumes; its
/// variance proxy is sigma_sq().
struct ScoreModelParams {
    double alpha = 0.0;
    double beta = 1.0;
    double sigma_r = 0.0;
    double sigma_eps = 0.0;

    double sigma_sq() const {
        return beta * beta * sigma_r * sigma_r + sigma_eps * sigma_eps;
    }
    double sigma() const;

    static ScoreModelParams with_sigma(double alpha, double sigma) {
        return {alpha, 1.0, sigma, 0.0};
    }
};

/// Sizes of the three disjoint parts of the unified corpus: items sharing
/// the query's modality (S), items of the required modality (R), and the
/// rest (O).
struct CorpusSizes {
    uint64_t same = 0;      // |S|
    uint64_t required = 0;  // |R|
    uint64_t other = 0;     // |O|

    uint64_t total() const { return same + required + other; }
};

struct SimOutcome {
    double p_unified_in_r = 0.0;
    double p_routed_in_r = 0.0;
    double chernoff = 0.0;
    uint64_t trials = 0;
    CorpusSizes sizes;
    double router_acc = 0.0;

    double se_unified() const;
    double se_routed() const;
};

/// Monte-Carlo comparison of unified-embedding retrieval against routed
/// retrieval under the additive score model. Per trial, every item draws an
/// independent Gaussian score term; same-modality items additionally
/// receive alpha. The unified success event is the global argmax landing in
/// R; the routed success event is Bernoulli(router_acc). Deterministic per
/// seed.
///
/// Errors: any empty part (the analysis assumes S, R nonempty), trials < 1,
/// router_acc outside [0, 1].
SimOutcome simulate_unified_vs_routed(const ScoreModelParams& params,
                                      const CorpusSizes& sizes, double router_acc,
                                      uint64_t trials, uint64_t seed);

/// Tail ceiling on the unified success probability:
///   |R| * |S| * exp(-alpha^2 / (4 sigma^2)).
/// alpha = 0 yields |R||S|; sigma = 0 with alpha > 0 returns the limit 0.
/// Values above 1 are returned as-is (the bound is vacuous there).
double chernoff_bound(const ScoreModelParams& params, const CorpusSizes& sizes);

/// Smallest modality bias guaranteeing the routed path wins:
///   2 sigma * sqrt(ln(|R||S|) / r),
/// natural log. Errors: r outside (0, 1].
double alpha_threshold(const CorpusSizes& sizes, double router_acc, double sigma);

/// Expected quality F for each (query, granularity) cell. Rows are queries;
/// every query must carry a value for every granularity.
struct QualityTable {
    std::vector<std::string> query_ids;
    std::vector<std::string> granularities;
    std::vector<std::vector<double>> values;  // [query][granularity]
};

struct GranularityComparison {
    double best_fixed_sum = 0.0;
    double adaptive_sum = 0.0;
    bool strict = false;
    std::string best_fixed_label;
};

/// Compares every fixed-granularity policy against the adaptive policy that
/// picks each query's best granularity. adaptive_sum can never be smaller;
/// it is strictly larger exactly when some query's argmax granularity
/// differs from the best fixed one.
GranularityComparison compare_granularity_policies(const QualityTable& table);

enum class LatencyBackend { exact_scan, bucketed };

std::string_view latency_backend_name(LatencyBackend b);
LatencyBackend parse_latency_backend(std::string_view name);

struct LatencyConfig {
    int pathway_count = 7;               // the analysis' k
    std::vector<uint64_t> corpus_sizes;  // N values, each >= 1000
    int dim = 64;
    LatencyBackend backend = LatencyBackend::exact_scan;
    int repetitions = 5;
    uint64_t seed = 0;
    double route_cost_ms = 2.0;  // fixed routing overhead C, stub delay
    int top_k = 10;
};

struct LatencyRow {
    uint64_t n = 0;
    int k = 0;
    double t_unified_s = 0.0;
    double t_routed_s = 0.0;
    double ratio = 0.0;  // t_unified / t_routed
};

struct LatencyReport {
    std::vector<LatencyRow> rows;
    LatencyBackend backend = LatencyBackend::exact_scan;
    std::string error;  // non-empty when the sweep stopped early
};

/// Builds pathway_count synthetic corpora of N items each and times unified
/// retrieval over all of them against routing (the stub delay plus a
/// single-corpus retrieval). Times are medians over repetitions. An
/// allocation failure stops the sweep and is reported in `error` instead of
/// crashing.
LatencyReport bench_latency(const LatencyConfig& config);

/// Builds a corpus whose cosine against `query_vec` follows the additive
/// score model: every item's similarity is
///   (same_modality_as_query ? alpha : 0) + beta * r + eps,
/// realized exactly by construction (clamped to (-1, 1)). Used to reproduce
/// the modality-gap failure of unified retrieval with real vectors.
std::shared_ptr<Corpus> make_score_model_corpus(
    const std::vector<float>& query_vec, bool same_modality_as_query,
    const ScoreModelParams& params, uint64_t count, Pathway pathway,
    const std::string& name, uint64_t seed);

/// One vector at an exact cosine similarity to query_vec (|s| < 1).
std::vector<float> vector_at_similarity(const std::vector<float>& query_vec, double s,
                                        uint64_t seed);

}  // namespace corpus_router
