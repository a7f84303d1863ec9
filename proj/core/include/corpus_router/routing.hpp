#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "corpus_router/pathway.hpp"

namespace corpus_router {

class ServiceClient;

enum class RouterSource {
    trained,
    prompt,
    random,
    ensemble_confidence,
    ensemble_majority,
};

std::string_view router_source_name(RouterSource s);

/// A routing verdict: the selected pathways with per-pathway confidence
/// scores. The set is never empty; NONE never co-occurs with other
/// pathways. `scores` may carry entries beyond the selected set (trained
/// routers report every label's score).
struct RoutingDecision {
    PathwaySet pathways;
    std::map<Pathway, double> scores;
    RouterSource source = RouterSource::trained;
};

/// One labeled routing example: query text and its multi-hot pathway
/// targets (NONE-exclusive).
struct RoutingExample {
    std::string query;
    PathwaySet labels;
};

struct RouterTrainingConfig {
    int epochs = 5;
    double learning_rate = 0.1;  // full-batch rate for the linear head
    uint64_t seed = 0;
    int dim = 4096;
};

/// Multi-label linear router over hashed query features: one logistic
/// output per pathway, thresholded at inference.
struct TrainedRouterModel {
    int dim = 0;
    uint64_t seed = 0;
    std::vector<Pathway> labels;  // canonical order, covers the scheme once
    std::vector<double> weights;  // labels.size() x dim, row-major
    std::vector<double> bias;     // per label
    double threshold = 0.8;

    /// Sigmoid scores for every label, canonical label order.
    std::vector<double> scores(const std::string& query) const;

    void save(const std::filesystem::path& path, const GranularityScheme& scheme) const;
    static TrainedRouterModel load(const std::filesystem::path& path,
                                   const GranularityScheme& scheme);
};

/// Trains the multi-label router with binary cross-entropy on multi-hot
/// targets by full-batch gradient descent. Deterministic given the dataset
/// order and config. When loss_history is non-null it receives the mean BCE
/// after each epoch.
///
/// Errors: empty dataset; a label outside the scheme.
TrainedRouterModel train_router(const std::vector<RoutingExample>& dataset,
                                const RouterTrainingConfig& config,
                                const GranularityScheme& scheme,
                                std::vector<double>* loss_history = nullptr);

/// Thresholded inference: selects every label whose sigmoid score reaches
/// model.threshold; when none does, falls back to the argmax label (ties
/// resolved in canonical order). NONE is dropped when co-selected with
/// other pathways unless its score is the maximum of the selection, in
/// which case only NONE is kept.
RoutingDecision route_trained(const TrainedRouterModel& model, const std::string& query);

/// Prompt-based router: renders the routing prompt for the active scheme,
/// sends it over the router wire protocol, and parses the reply label.
/// A malformed reply is retried once, then reported as an error.
RoutingDecision route_prompt(ServiceClient& client, const std::string& query,
                             const GranularityScheme& scheme);

/// Uniform single-pathway baseline over the scheme universe (NONE
/// included). Deterministic per seed.
RoutingDecision route_random(const GranularityScheme& scheme, uint64_t rng_seed);

/// Keeps the trained decision when its confidence (maximum selected-label
/// score) reaches conf_threshold, otherwise returns the fallback decision.
RoutingDecision route_ensemble_confidence(const RoutingDecision& trained_decision,
                                          const RoutingDecision& fallback,
                                          double conf_threshold = 0.8);

/// Majority vote over exactly three decisions: every pathway with at least
/// two votes is selected; an empty majority picks one of the three inputs
/// uniformly at random (seeded). Permutation-invariant in its inputs.
RoutingDecision route_ensemble_majority(const std::vector<RoutingDecision>& decisions,
                                        uint64_t rng_seed);

}  // namespace corpus_router
