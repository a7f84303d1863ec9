#pragma once

#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "corpus_router/pipeline.hpp"
#include "corpus_router/routing.hpp"

namespace corpus_router {

/// Ground truth for one query: the pathways it should route to and the
/// items counted as retrieval hits. gold_item_ids is empty exactly when
/// gold_pathways is {NONE}.
struct GoldRecord {
    std::string query_id;
    std::string query;
    PathwaySet gold_pathways;
    std::set<std::pair<std::string, std::string>> gold_item_ids;  // (corpus, id)
};

/// Parses the gold JSON Lines format:
///   {"query_id":..., "query":..., "gold_pathways":[...], "gold_items":[["corpus","id"],...]}
std::vector<GoldRecord> load_gold_file(std::istream& in, const GranularityScheme& scheme);
std::vector<GoldRecord> load_gold_file(const std::string& path,
                                       const GranularityScheme& scheme);

struct PathwayCounts {
    uint64_t total = 0;
    uint64_t router_correct = 0;
};

struct EvalReport {
    double router_accuracy = 0.0;
    double modality_accuracy = 0.0;
    std::map<int, double> recall_at;
    std::map<std::string, PathwayCounts> per_pathway;  // keyed by gold set label
    uint64_t count = 0;
    uint64_t modality_scored = 0;  // rows with non-NONE gold
    uint64_t recall_scored = 0;    // rows with gold items
    uint64_t errors = 0;

    void write_csv(std::ostream& out) const;
    void write_table(std::ostream& out) const;
};

/// Fraction of queries whose decision equals the gold pathway set exactly.
/// Decisions and gold are aligned by query_id; a mismatch is an error.
double router_accuracy(const std::vector<std::pair<std::string, RoutingDecision>>& decisions,
                       const std::vector<GoldRecord>& gold);

/// Fraction of scored queries whose retrieved entries cover exactly the
/// gold modalities (granularity ignored). Queries with gold {NONE} are not
/// scored.
double modality_accuracy(const std::vector<ContextBundle>& bundles,
                         const std::vector<GoldRecord>& gold);

/// Fraction of queries with at least one gold item among the top-k merged
/// entries. Queries with no gold items are excluded from the denominator.
double recall_at_k(const std::vector<ContextBundle>& bundles,
                   const std::vector<GoldRecord>& gold, int k);

/// Streams every gold query through route_and_retrieve and accumulates all
/// metrics. Per-query failures are counted, not propagated. `workers`
/// parallelizes across queries; results are accumulated in input order.
EvalReport run_eval(const std::vector<GoldRecord>& gold, const RouterFn& router,
                    const CorpusMap& corpora, const std::vector<int>& ks,
                    const EmbedFn& embedder, int workers = 1,
                    const GranularityScheme& scheme = GranularityScheme::default_scheme());

}  // namespace corpus_router
