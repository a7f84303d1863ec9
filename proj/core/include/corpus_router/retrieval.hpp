#pragma once

#include <span>
#include <string>
#include <vector>

#include "corpus_router/corpus.hpp"
#include "corpus_router/pathway.hpp"

namespace corpus_router {

/// Visual/text score fusion weight. The visual similarity carries
/// visual_weight, the textual one the remainder.
struct FusionWeights {
    double visual_weight = 0.8;
};

struct ScoredEntry {
    std::string item_id;
    std::string corpus_name;
    Pathway pathway;
    double score = 0.0;
};

/// Ranked list: score descending, ties broken by (corpus_name, item_id)
/// ascending; at most k entries.
struct RetrievalResult {
    std::vector<ScoredEntry> entries;
    int k = 0;
};

/// Standard cosine similarity, accumulated in double. For double-precision
/// unit-norm inputs this equals the inner product to within 1e-9; f32
/// inputs carry their storage rounding (about 1e-7).
/// Throws on dimension mismatch or zero-norm input.
double cosine_score(std::span<const float> a, std::span<const float> b);
double cosine_score(std::span<const double> a, std::span<const double> b);

/// w.visual_weight * visual_sim + (1 - w.visual_weight) * text_sim.
/// Both similarities must lie in [-1, 1].
double fused_score(double visual_sim, double text_sim, FusionWeights w);

/// Exact top-k scan over one corpus. Item score is the cosine between the
/// query and primary_vec; when the corpus carries aux vectors and an
/// auxiliary query vector is supplied, the score is
/// fused_score(cos(primary, query), cos(aux, aux_query), w). Without an
/// auxiliary query vector fusion degrades to primary-only.
///
/// Deterministic: equal inputs produce the identical ranked list.
RetrievalResult retrieve_topk(std::span<const float> query_vec, const Corpus& corpus,
                              int k, FusionWeights w = {},
                              std::span<const float> aux_query_vec = {});

/// Unified-embedding baseline: one ranked list over the union of all
/// corpora, equivalent to retrieve_topk on their concatenation. All corpora
/// must share the query dimension.
RetrievalResult unified_retrieve(std::span<const float> query_vec,
                                 const std::vector<std::shared_ptr<Corpus>>& corpora,
                                 int k, FusionWeights w = {},
                                 std::span<const float> aux_query_vec = {});

/// Retrieve-everything baseline: independent top-k per corpus, results in
/// canonical pathway order.
std::vector<RetrievalResult> retrieve_all(
    std::span<const float> query_vec,
    const std::vector<std::shared_ptr<Corpus>>& corpora, int k_per_corpus,
    FusionWeights w = {}, std::span<const float> aux_query_vec = {});

}  // namespace corpus_router
