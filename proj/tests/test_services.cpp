#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "corpus_router/hash_embed.hpp"
#include "corpus_router/prompts.hpp"
#include "corpus_router/routing.hpp"
#include "corpus_router/service_client.hpp"

using namespace corpus_router;
using nlohmann::json;

namespace {

const GranularityScheme& scheme() { return GranularityScheme::default_scheme(); }

std::string mock_endpoint(const std::string& args) {
    return std::string("exec:") + MOCK_SERVICE_BIN + " " + args;
}

// In-process scripted client for protocol-level tests.
class ScriptedClient : public ServiceClient {
public:
    explicit ScriptedClient(std::vector<std::string> replies)
        : replies_(std::move(replies)) {}
    std::string request_line(const std::string& line) override {
        requests.push_back(line);
        if (next_ >= replies_.size()) throw std::runtime_error("script exhausted");
        return replies_[next_++];
    }
    std::vector<std::string> requests;

private:
    std::vector<std::string> replies_;
    size_t next_ = 0;
};

}  // namespace

TEST_CASE("route prompt renders the taxonomy and wraps the query") {
    const auto prompt = render_route_prompt(scheme(), "What is the capital of France?");
    for (const char* label : {"No", "Paragraph", "Document", "Table", "Image", "Clip",
                              "Video"})
        CHECK(prompt.find(std::string("- ") + label + ":") != std::string::npos);
    CHECK(prompt.find("Classify the following query: What is the capital of France?") !=
          std::string::npos);
    CHECK(prompt.find("combined with '+'") != std::string::npos);

    const auto extended =
        render_route_prompt(GranularityScheme::extended_scheme(), "q");
    for (const char* label : {"Passage", "Section", "Sequence", "Segment"})
        CHECK(extended.find(std::string("- ") + label + ":") != std::string::npos);
}

TEST_CASE("prompt seed examples cover the taxonomy with the documented pairs") {
    const auto seeds = prompt_seed_examples(scheme());
    REQUIRE(seeds.size() == 17);
    auto find = [&](const std::string& q) -> const RoutingExample& {
        for (const auto& ex : seeds)
            if (ex.query == q) return ex;
        FAIL("seed not found: ", q);
        return seeds.front();
    };
    CHECK(find("What is the capital of France?").labels ==
          PathwaySet{Pathway::make_none()});
    CHECK(find("Describe the appearance of a blue whale.").labels ==
          PathwaySet{scheme().parse_label("image")});
    CHECK(find("Describe the visual appearance and habitat of the blue whale.").labels ==
          pathway_parse("Paragraph+Image", scheme()));
}

TEST_CASE("route_prompt over exec pipes parses the mock's label") {
    SUBCASE("single no-retrieval label") {
        auto client = open_service(mock_endpoint("--mode route-fixed --label No"));
        const auto d = route_prompt(*client, "What is the capital of France?", scheme());
        CHECK(d.pathways == PathwaySet{Pathway::make_none()});
        CHECK(d.source == RouterSource::prompt);
        CHECK(d.scores.at(Pathway::make_none()) == 1.0);
    }
    SUBCASE("composite label") {
        auto client =
            open_service(mock_endpoint("--mode route-fixed --label Paragraph+Image"));
        const auto d = route_prompt(
            *client, "Describe the visual appearance and habitat of the blue whale.",
            scheme());
        CHECK(d.pathways == pathway_parse("Paragraph+Image", scheme()));
    }
    SUBCASE("requests stay usable across many calls on one process") {
        auto client = open_service(mock_endpoint("--mode route-fixed --label Image"));
        for (int i = 0; i < 20; ++i) {
            const auto d = route_prompt(*client, "q" + std::to_string(i), scheme());
            CHECK(d.pathways == PathwaySet{scheme().parse_label("image")});
        }
    }
}

TEST_CASE("route_prompt retries a malformed reply once, then errors") {
    SUBCASE("one garbage reply is survivable") {
        auto client = ScriptedClient({"not json at all", R"({"label":"Image"})"});
        const auto d = route_prompt(client, "q", scheme());
        CHECK(d.pathways == PathwaySet{scheme().parse_label("image")});
        CHECK(client.requests.size() == 2);
    }
    SUBCASE("two bad replies exhaust the retry") {
        auto client = ScriptedClient({"garbage", "still garbage"});
        CHECK_THROWS_AS(route_prompt(client, "q", scheme()), std::runtime_error);
    }
    SUBCASE("an unknown label is an error after retry") {
        auto client =
            ScriptedClient({R"({"label":"Banana"})", R"({"label":"Banana"})"});
        CHECK_THROWS_AS(route_prompt(client, "q", scheme()), std::runtime_error);
    }
    SUBCASE("garbage-first mock exercises the same path end to end") {
        auto client = open_service(
            mock_endpoint("--mode route-garbage --garbage-first 1 --label Clip"));
        const auto d = route_prompt(*client, "q", scheme());
        CHECK(d.pathways == PathwaySet{scheme().parse_label("clip")});
    }
}

TEST_CASE("route_prompt under the extended scheme accepts its finer labels") {
    const auto& ext = GranularityScheme::extended_scheme();
    auto client = ScriptedClient({R"({"label":"Passage+Sequence"})"});
    const auto d = route_prompt(client, "summarize the concept", ext);
    CHECK(d.pathways == pathway_parse("Passage+Sequence", ext));
    // the rendered prompt offered the extended category list
    const auto request = json::parse(client.requests[0]);
    CHECK(request.at("prompt").get<std::string>().find("Segment") != std::string::npos);

    // those labels stay invalid under the default scheme
    auto strict = ScriptedClient({R"({"label":"Passage"})", R"({"label":"Passage"})"});
    CHECK_THROWS_AS(route_prompt(strict, "q", scheme()), std::runtime_error);
}

TEST_CASE("route_prompt requests carry the rendered prompt and raw query") {
    auto client = ScriptedClient({R"({"label":"No"})"});
    route_prompt(client, "Solve 12 x 8.", scheme());
    REQUIRE(client.requests.size() == 1);
    const auto request = json::parse(client.requests[0]);
    CHECK(request.at("op") == "route");
    CHECK(request.at("query") == "Solve 12 x 8.");
    CHECK(request.at("prompt").get<std::string>().find("Classify") != std::string::npos);
}

TEST_CASE("decision depends only on the reply text, not the framing") {
    // same reply over a scripted client, an exec pipe, and HTTP
    const std::string label = "Paragraph+Image";
    auto scripted = ScriptedClient({R"({"label":"Paragraph+Image"})"});
    const auto d1 = route_prompt(scripted, "q", scheme());

    auto piped = open_service(mock_endpoint("--mode route-fixed --label " + label));
    const auto d2 = route_prompt(*piped, "q", scheme());

    httplib::Server server;
    server.Post("/route", [&](const httplib::Request&, httplib::Response& res) {
        res.set_content(R"({"label":"Paragraph+Image"})", "application/json");
    });
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread server_thread([&] { server.listen_after_bind(); });
    server.wait_until_ready();
    auto http = open_service("http://127.0.0.1:" + std::to_string(port) + "/route");
    const auto d3 = route_prompt(*http, "q", scheme());
    server.stop();
    server_thread.join();

    CHECK(d1.pathways == d2.pathways);
    CHECK(d2.pathways == d3.pathways);
}

TEST_CASE("embed protocol returns the service vector") {
    auto client = open_service(mock_endpoint("--mode embed"));
    const auto vec = embed_remote(*client, "the capital of France", 64);
    REQUIRE(vec.size() == 64);
    // the mock embeds with hash_embed(text, dim, 7)
    CHECK(vec == hash_embed_f32("the capital of France", 64, 7));
}

TEST_CASE("embed protocol rejects a wrong-dimension reply") {
    auto client = ScriptedClient({R"({"vec":[1.0,0.0]})"});
    CHECK_THROWS_AS(embed_remote(client, "text", 8), std::runtime_error);
}

TEST_CASE("generate protocol returns the answer verbatim") {
    auto client = ScriptedClient({R"({"answer":"forty-two"})"});
    const auto answer = generate_remote(client, "what?", json::array());
    CHECK(answer == "forty-two");
    const auto request = json::parse(client.requests[0]);
    CHECK(request.at("op") == "generate");
    CHECK(request.at("contexts").is_array());
}

TEST_CASE("transport failure surfaces as generator unavailable") {
    auto client = open_service("exec:/bin/false");
    CHECK_THROWS_AS(generate_remote(*client, "q", json::array()), std::runtime_error);
}

TEST_CASE("unknown endpoint scheme is rejected") {
    CHECK_THROWS_AS(open_service("ftp://somewhere"), std::invalid_argument);
}
