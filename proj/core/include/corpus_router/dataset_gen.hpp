#pragma once

#include <cstdint>
#include <vector>

#include "corpus_router/routing.hpp"

namespace corpus_router {

/// Expands the routing prompt's seed queries into a labeled dataset by
/// deterministic token substitution: each single-label seed acts as a
/// template whose entity tokens rotate through fixed substitution pools.
/// Produces variants_per_pathway examples for every non-composite pathway
/// of the default scheme (NONE included); variant i of a pathway is the
/// same for every call.
std::vector<RoutingExample> synthetic_routing_dataset(int variants_per_pathway);

/// Deterministic train/eval split: every ceil(1/holdout)-th example (by
/// index, after a seeded shuffle) lands in the eval set.
struct DatasetSplit {
    std::vector<RoutingExample> train;
    std::vector<RoutingExample> eval;
};
DatasetSplit split_dataset(const std::vector<RoutingExample>& dataset,
                           double holdout_fraction, uint64_t seed);

}  // namespace corpus_router
