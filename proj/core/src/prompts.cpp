#include "corpus_router/prompts.hpp"

#include <array>
#include <cctype>
#include <stdexcept>

namespace corpus_router {

namespace {

struct CategoryDef {
    const char* label;  // display form used in prompts
    const char* criterion;
};

// Default seven-way taxonomy.
constexpr std::array<CategoryDef, 7> kDefaultCategories{{
    {"No",
     "The query can be answered directly with common knowledge, reasoning, or "
     "computation without external data."},
    {"Paragraph",
     "The query requires retrieving factual descriptions, straightforward "
     "explanations, or concise summaries from a single source."},
    {"Document",
     "The query requires multi-hop reasoning, combining information from multiple "
     "sources or documents to form a complete answer."},
    {"Table",
     "The query requires information that is best represented in a tabular format, "
     "often involving comparisons or structured data."},
    {"Image",
     "The query focuses on visual aspects like appearances, structures, or spatial "
     "relationships."},
    {"Clip",
     "The query targets a short, specific moment or event within a video, without "
     "needing full context."},
    {"Video",
     "The query requires understanding dynamic events, motion, or sequences over "
     "time in a video."},
}};

// Extended taxonomy with four text and four video levels.
constexpr std::array<CategoryDef, 11> kExtendedCategories{{
    {"No",
     "The query can be answered directly with common knowledge, reasoning, or "
     "computation without external data."},
    {"Paragraph",
     "The query requires retrieving factual descriptions, straightforward "
     "explanations, or concise summaries from a single source."},
    {"Passage",
     "The query requires a detailed block of text (a few paragraphs) from a single "
     "source, with added context."},
    {"Section",
     "The query requires retrieving an extensive section of a document explaining a "
     "sub-topic, possibly with examples or elaboration."},
    {"Document",
     "The query requires multi-hop reasoning, combining information from multiple "
     "sources or documents to form a complete answer."},
    {"Table",
     "The query requires information that is best represented in a tabular format, "
     "often involving comparisons or structured data."},
    {"Image",
     "The query focuses on visual aspects like appearances, structures, or spatial "
     "relationships."},
    {"Clip",
     "The query targets a short, specific moment or event within a video, without "
     "needing full context."},
    {"Sequence",
     "The query targets a continuous stretch of related shots (about 10 minutes) "
     "that together form a self-contained mini-narrative or process, providing more "
     "context and flow than a standalone clip."},
    {"Segment",
     "The query targets a longer portion of a video (about 30 minutes) capturing a "
     "meaningful sub-scene or subplot-rich and cohesive enough to serve as its own "
     "chapter-like unit."},
    {"Video",
     "The query requires understanding dynamic events, motion, or sequences over "
     "time in a video."},
}};

struct SeedExample {
    const char* query;
    const char* labels;  // '+'-joined display labels
};

constexpr std::array<SeedExample, 17> kDefaultSeeds{{
    {"What is the capital of France?", "No"},
    {"What is the birth date of Alan Turing?", "Paragraph"},
    {"Which academic discipline do computer scientist Alan Turing and mathematician "
     "John von Neumann have in common?",
     "Document"},
    {"Among the recipients of the Turing Award, who had the earliest birth year?",
     "Table"},
    {"Describe the appearance of a blue whale.", "Image"},
    {"Describe the moment Messi scored his goal in the 2022 World Cup final.", "Clip"},
    {"Explain how Messi scored his goal in the 2022 World Cup final.", "Video"},
    {"Solve 12 \xc3\x97 8.", "No"},
    {"Who played a key role in the development of the iPhone?", "Paragraph"},
    {"Which Harvard University graduate played a key role in the development of the "
     "iPhone?",
     "Document"},
    {"What is the cheapest iPhone model available in 2023?", "Table"},
    {"Describe the structure of the Eiffel Tower.", "Image"},
    {"Describe the moment Darth Vader reveals he is Luke's father in Star Wars.",
     "Clip"},
    {"Analyze the sequence of events leading to the fall of the Empire in Star Wars.",
     "Video"},
    {"Describe the visual appearance and habitat of the blue whale.",
     "Paragraph+Image"},
    {"Compare the architectural features shown in Gothic and Renaissance cathedrals.",
     "Image+Table"},
    {"Describe the moment of the moon landing and explain the mission details.",
     "Paragraph+Clip"},
}};

constexpr std::array<SeedExample, 8> kExtendedSeeds{{
    {"What is the birth date of Alan Turing?", "Paragraph"},
    {"Summarize Alan Turing's concept of the Turing Machine.", "Passage"},
    {"Explain Alan Turing's contributions to cryptography during WWII.", "Section"},
    {"Which academic discipline do computer scientist Alan Turing and mathematician "
     "John von Neumann have in common?",
     "Document"},
    {"Describe the moment Messi scored his goal in the 2022 World Cup final.", "Clip"},
    {"Detail the sequence of passes and movements leading to Messi's goal in the 2022 "
     "World Cup final.",
     "Sequence"},
    {"Describe the build-up sequence during the mid-game period of the 2022 World Cup "
     "final.",
     "Segment"},
    {"Analyze how Argentina won the 2022 World Cup.", "Video"},
}};

std::string category_list(const GranularityScheme& scheme) {
    std::string out = "[";
    bool first = true;
    for (const auto& p : scheme.universe()) {
        if (!first) out += ", ";
        first = false;
        if (p.is_none()) {
            out += "No";
        } else {
            std::string label = scheme.label(p);
            label[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(label[0])));
            out += label;
        }
    }
    out += "]";
    return out;
}

template <size_t N>
void append_categories(std::string& out, const std::array<CategoryDef, N>& defs) {
    for (const auto& def : defs) {
        out += "- ";
        out += def.label;
        out += ": ";
        out += def.criterion;
        out += '\n';
    }
}

template <size_t N>
void append_examples(std::string& out, const std::array<SeedExample, N>& seeds) {
    for (const auto& seed : seeds) {
        out += "- \"";
        out += seed.query;
        out += "\" -> ";
        out += seed.labels;
        out += '\n';
    }
}

}  // namespace

std::string render_route_prompt(const GranularityScheme& scheme,
                                const std::string& query) {
    std::string out;
    out.reserve(4096);
    out += "Classify the following query into one or more categories from: ";
    out += category_list(scheme);
    out +=
        ", based on whether it requires retrieval-augmented generation (RAG) and the "
        "most appropriate modality. Consider:\n\n";
    if (scheme.kind() == SchemeKind::extended)
        append_categories(out, kExtendedCategories);
    else
        append_categories(out, kDefaultCategories);
    out += "\nExamples:\n";
    if (scheme.kind() == SchemeKind::extended)
        append_examples(out, kExtendedSeeds);
    else
        append_examples(out, kDefaultSeeds);
    out += "\nClassify the following query: ";
    out += query;
    out += "\nProvide only the category or categories combined with '+'.\n";
    return out;
}

std::vector<RoutingExample> prompt_seed_examples(const GranularityScheme& scheme) {
    std::vector<RoutingExample> out;
    auto add = [&](const char* query, const char* labels) {
        out.push_back({query, pathway_parse(labels, scheme)});
    };
    if (scheme.kind() == SchemeKind::extended) {
        for (const auto& seed : kExtendedSeeds) add(seed.query, seed.labels);
    } else {
        for (const auto& seed : kDefaultSeeds) add(seed.query, seed.labels);
    }
    return out;
}

}  // namespace corpus_router
