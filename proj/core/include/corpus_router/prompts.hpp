#pragma once

#include <string>
#include <vector>

#include "corpus_router/pathway.hpp"
#include "corpus_router/routing.hpp"

namespace corpus_router {

/// Version tag carried in router requests so replies can be traced to the
/// exact template text.
inline constexpr const char* kRoutePromptVersion = "route-v1";

/// Renders the few-shot classification prompt that turns a general language
/// model into a router: task statement, per-category criteria for the
/// active scheme, worked examples, and the query to classify. The model is
/// asked to answer with the category or categories joined by '+'.
std::string render_route_prompt(const GranularityScheme& scheme,
                                const std::string& query);

/// The worked examples embedded in the prompt, as labeled routing examples.
/// These also seed the synthetic dataset generator.
std::vector<RoutingExample> prompt_seed_examples(const GranularityScheme& scheme);

}  // namespace corpus_router
