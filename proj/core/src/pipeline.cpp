#include "corpus_router/pipeline.hpp"

#include <stdexcept>

#include "corpus_router/service_client.hpp"

namespace corpus_router {

namespace {

std::string payload_text(const Corpus& corpus, const std::string& item_id) {
    const auto idx = corpus.find(item_id);
    if (!idx) return "";
    const auto j = corpus.parse_payload(*idx);
    if (j.contains("text") && j["text"].is_string()) return j["text"].get<std::string>();
    if (j.contains("caption") && j["caption"].is_string())
        return j["caption"].get<std::string>();
    return "";
}

}  // namespace

ContextBundle route_and_retrieve(const std::string& query, const RouterFn& router,
                                 const CorpusMap& corpora, int k,
                                 const EmbedFn& embedder, FusionWeights w,
                                 const std::string& query_id,
                                 const GranularityScheme& scheme) {
    if (k < 1) throw std::invalid_argument("route_and_retrieve: k must be >= 1");

    ContextBundle bundle;
    bundle.query_id = query_id;
    bundle.query = query;
    bundle.scheme = &scheme;
    bundle.decision = router(query);

    if (bundle.decision.pathways.count(Pathway::make_none())) return bundle;

    const std::vector<float> query_vec = embedder(query);

    // PathwaySet iterates in canonical order, so contexts come out ordered.
    for (const auto& pathway : bundle.decision.pathways) {
        const auto it = corpora.find(pathway);
        if (it == corpora.end())
            throw std::runtime_error("missing corpus for selected pathway '" +
                                     scheme.label(pathway) + "'");
        bundle.contexts.emplace_back(pathway,
                                     retrieve_topk(query_vec, *it->second, k, w));
    }

    for (const auto& [pathway, result] : bundle.contexts) {
        const auto& corpus = *corpora.at(pathway);
        for (const auto& entry : result.entries)
            bundle.merged.push_back({pathway, entry.corpus_name, entry.item_id,
                                     entry.score, payload_text(corpus, entry.item_id)});
    }
    return bundle;
}

std::string generate_answer(const ContextBundle& bundle, ServiceClient& client) {
    nlohmann::json contexts = nlohmann::json::array();
    for (const auto& entry : bundle.merged) {
        contexts.push_back({{"pathway", bundle.scheme->label(entry.pathway)},
                            {"id", entry.item_id},
                            {"text", entry.text}});
    }
    return generate_remote(client, bundle.query, contexts);
}

}  // namespace corpus_router
