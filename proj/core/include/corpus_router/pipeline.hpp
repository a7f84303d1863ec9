#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "corpus_router/corpus.hpp"
#include "corpus_router/retrieval.hpp"
#include "corpus_router/routing.hpp"

namespace corpus_router {

/// Any router: trained, prompt-backed, random, ensemble, or a test stub.
using RouterFn = std::function<RoutingDecision(const std::string& query)>;

/// Produces the query embedding. Throws to signal embedder failure.
using EmbedFn = std::function<std::vector<float>(const std::string& text)>;

struct MergedEntry {
    Pathway pathway;
    std::string corpus_name;
    std::string item_id;
    double score = 0.0;
    std::string text;  // payload "text" or "caption", empty when absent
};

/// Everything retrieved for one query: the routing decision, one
/// RetrievalResult per selected pathway (canonical order, NONE excluded),
/// and the flattened context list ordered canonical-pathway-major then by
/// per-corpus rank.
struct ContextBundle {
    std::string query_id;
    std::string query;
    RoutingDecision decision;
    std::vector<std::pair<Pathway, RetrievalResult>> contexts;
    std::vector<MergedEntry> merged;
    const GranularityScheme* scheme = &GranularityScheme::default_scheme();
};

using CorpusMap = std::map<Pathway, std::shared_ptr<Corpus>>;

/// Routes the query, retrieves top-k from each selected corpus, and merges.
/// A NONE decision yields empty contexts. Deterministic whenever the router
/// is. Errors: a selected pathway without a registered corpus; embedder
/// failure.
ContextBundle route_and_retrieve(
    const std::string& query, const RouterFn& router, const CorpusMap& corpora, int k,
    const EmbedFn& embedder, FusionWeights w = {}, const std::string& query_id = "",
    const GranularityScheme& scheme = GranularityScheme::default_scheme());

class ServiceClient;

/// Sends the query plus merged context texts to an external generator and
/// returns its reply verbatim. Never alters the bundle.
std::string generate_answer(const ContextBundle& bundle, ServiceClient& client);

}  // namespace corpus_router
