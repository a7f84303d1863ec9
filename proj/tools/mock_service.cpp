// Stdin/stdout mock for the router, embedder, and generator wire protocols:
// reads one JSON object per line, writes one JSON reply per line. Used by
// the test suite through exec: endpoints and handy for manual CLI runs.
//
// Modes:
//   route-fixed    always replies {"label": --label}
//   route-keyword  naive keyword routing over the default taxonomy
//   route-garbage  replies --label after --garbage-first malformed lines
//   embed          replies the deterministic hash embedding
//   echo-generate  replies {"answer": <the raw request line>}

#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "corpus_router/hash_embed.hpp"

namespace {

std::string keyword_label(const std::string& query) {
    auto has = [&](const char* word) { return query.find(word) != std::string::npos; };
    if (has("appearance") || has("structure") || has("look")) return "Image";
    if (has("moment")) return "Clip";
    if (has("sequence") || has("how")) return "Video";
    if (has("cheapest") || has("earliest") || has("compare")) return "Table";
    if (has(" and ") && has("common")) return "Document";
    if (has("birth") || has("who") || has("Who")) return "Paragraph";
    return "No";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"corpus-router mock service"};
    std::string mode = "route-fixed";
    std::string label = "No";
    int garbage_first = 0;
    app.add_option("--mode", mode)
        ->check(CLI::IsMember(
            {"route-fixed", "route-keyword", "route-garbage", "embed", "echo-generate"}));
    app.add_option("--label", label, "Reply label for route-fixed/route-garbage");
    app.add_option("--garbage-first", garbage_first,
                   "Number of malformed replies before behaving");
    CLI11_PARSE(app, argc, argv);

    std::string line;
    long served = 0;
    while (std::getline(std::cin, line)) {
        if (line.empty()) continue;
        ++served;
        nlohmann::json reply;
        try {
            const auto request = nlohmann::json::parse(line);
            const std::string op = request.value("op", "");
            if (mode == "route-garbage" && served <= garbage_first) {
                std::cout << "this is not json\n" << std::flush;
                continue;
            }
            if (op == "route") {
                if (mode == "route-keyword")
                    reply["label"] = keyword_label(request.value("query", ""));
                else
                    reply["label"] = label;
            } else if (op == "embed") {
                reply["vec"] = corpus_router::hash_embed_f32(
                    request.at("text").get<std::string>(), request.at("dim").get<int>(),
                    7);
            } else if (op == "generate") {
                reply["answer"] = line;
            } else {
                reply["error"] = "unknown op";
            }
        } catch (const std::exception& e) {
            reply = {{"error", e.what()}};
        }
        std::cout << reply.dump() << "\n" << std::flush;
    }
    return 0;
}
