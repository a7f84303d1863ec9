#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "corpus_router/pathway.hpp"

using namespace corpus_router;

TEST_CASE("default universe has exactly the seven canonical pathways in order") {
    const auto& scheme = GranularityScheme::default_scheme();
    const auto& u = scheme.universe();
    REQUIRE(u.size() == 7);
    const char* expected[] = {"none", "paragraph", "document", "table",
                              "image", "clip",      "video"};
    for (size_t i = 0; i < u.size(); ++i) CHECK(scheme.label(u[i]) == expected[i]);
    CHECK(std::is_sorted(u.begin(), u.end()));
    for (size_t i = 0; i + 1 < u.size(); ++i) CHECK(u[i] < u[i + 1]);
}

TEST_CASE("extended scheme slots labels by ordinal within modality") {
    const auto& scheme = GranularityScheme::extended_scheme();
    const auto& u = scheme.universe();
    REQUIRE(u.size() == 11);
    CHECK(scheme.label(u[1]) == "paragraph");
    CHECK(scheme.label(u[2]) == "passage");
    CHECK(scheme.label(u[3]) == "section");
    CHECK(scheme.label(u[4]) == "document");
    CHECK(scheme.label(u[5]) == "table");
    CHECK(scheme.label(u[10]) == "video");
    CHECK(std::is_sorted(u.begin(), u.end()));
}

TEST_CASE("modality names are case-insensitive on parse, lowercase on output") {
    CHECK(parse_modality("TEXT") == Modality::text);
    CHECK(parse_modality(" Video ") == Modality::video);
    CHECK(modality_name(Modality::table) == "table");
    CHECK_THROWS_AS(parse_modality("audio"), std::invalid_argument);
}

TEST_CASE("pathway_parse handles the prompt's label forms") {
    const auto& scheme = GranularityScheme::default_scheme();

    SUBCASE("composite label") {
        const auto set = pathway_parse("Paragraph+Image", scheme);
        REQUIRE(set.size() == 2);
        CHECK(set.count(Pathway::target(Modality::text, 1)));
        CHECK(set.count(Pathway::target(Modality::image, 1)));
    }
    SUBCASE("no-retrieval spellings") {
        CHECK(pathway_parse("No", scheme) == PathwaySet{Pathway::make_none()});
        CHECK(pathway_parse("none", scheme) == PathwaySet{Pathway::make_none()});
        CHECK(pathway_parse("NONE", scheme) == PathwaySet{Pathway::make_none()});
    }
    SUBCASE("set semantics: duplicates collapse, case folds") {
        const auto set = pathway_parse("image + IMAGE", scheme);
        REQUIRE(set.size() == 1);
        CHECK(set.count(Pathway::target(Modality::image, 1)));
    }
    SUBCASE("none is exclusive") {
        CHECK_THROWS_WITH_AS(pathway_parse("No+Image", scheme), "none is exclusive",
                             std::invalid_argument);
    }
    SUBCASE("unknown label") {
        CHECK_THROWS_AS(pathway_parse("Banana", scheme), std::invalid_argument);
        CHECK_THROWS_AS(pathway_parse("", scheme), std::invalid_argument);
        // extended-only labels do not parse under the default scheme
        CHECK_THROWS_AS(pathway_parse("Passage", scheme), std::invalid_argument);
    }
}

TEST_CASE("parse after format is the identity on every canonical label set") {
    for (const auto* scheme : {&GranularityScheme::default_scheme(),
                               &GranularityScheme::extended_scheme()}) {
        // every singleton
        for (const auto& p : scheme->universe()) {
            const PathwaySet set{p};
            CHECK(pathway_parse(pathway_format(set, *scheme), *scheme) == set);
        }
        // random non-NONE subsets
        std::mt19937_64 rng(7);
        const auto& u = scheme->universe();
        for (int trial = 0; trial < 200; ++trial) {
            PathwaySet set;
            for (size_t i = 1; i < u.size(); ++i)
                if (rng() % 2) set.insert(u[i]);
            if (set.empty()) set.insert(u[1 + rng() % (u.size() - 1)]);
            CHECK(pathway_parse(pathway_format(set, *scheme), *scheme) == set);
        }
    }
}

TEST_CASE("granularity levels are contiguous from 1 per modality") {
    for (const auto* scheme : {&GranularityScheme::default_scheme(),
                               &GranularityScheme::extended_scheme()}) {
        for (Modality m : {Modality::text, Modality::table, Modality::image,
                           Modality::video}) {
            const auto levels = scheme->levels(m);
            REQUIRE(!levels.empty());
            for (size_t i = 0; i < levels.size(); ++i)
                CHECK(levels[i].ordinal == static_cast<int>(i) + 1);
        }
    }
}
