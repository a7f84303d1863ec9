#include "corpus_router/dataset_gen.hpp"

#include <algorithm>
#include <array>
#include <random>
#include <span>
#include <stdexcept>
#include <string>

namespace corpus_router {

namespace {

// Substitution pools. Entities are deliberately shared across pathways so a
// router has to key on the query structure, not on the entity vocabulary.
constexpr std::array<const char*, 20> kPlaces{
    "France",   "Japan",   "Brazil", "Kenya",  "Norway", "Canada", "Peru",
    "Vietnam",  "Morocco", "Greece", "Chile",  "Iceland", "Egypt",  "Portugal",
    "Thailand", "Finland", "Mexico", "Jordan", "Nepal",  "Austria"};

constexpr std::array<const char*, 20> kPeople{
    "Alan Turing",       "Marie Curie",    "Isaac Newton",   "Ada Lovelace",
    "Nikola Tesla",      "Rosalind Franklin", "Charles Darwin", "Grace Hopper",
    "Albert Einstein",   "Katherine Johnson", "Leonhard Euler", "Emmy Noether",
    "James Clerk Maxwell", "Dorothy Hodgkin", "Carl Gauss",     "Lise Meitner",
    "Richard Feynman",   "Barbara McClintock", "Max Planck",     "Niels Bohr"};

constexpr std::array<const char*, 20> kProducts{
    "iPhone",        "Walkman",     "Gameboy",    "Polaroid camera", "Kindle",
    "Tesla Roadster", "ThinkPad",   "PlayStation", "Roomba",          "GoPro",
    "Fitbit",        "Chromecast",  "Dreamcast",  "MacBook",         "Zune",
    "Segway",        "Palm Pilot",  "Tamagotchi", "Discman",         "Steam Deck"};

constexpr std::array<const char*, 20> kAwards{
    "Turing Award",   "Nobel Prize in Physics", "Fields Medal",   "Abel Prize",
    "Booker Prize",   "Pulitzer Prize",         "Grammy Awards",  "Academy Awards",
    "Ballon d'Or",    "Hugo Award",             "Pritzker Prize", "Wolf Prize",
    "Kyoto Prize",    "Lasker Award",           "Templeton Prize", "Millennium Prize",
    "Breakthrough Prize", "Copley Medal",       "Leibniz Prize",  "Shaw Prize"};

constexpr std::array<const char*, 20> kAnimals{
    "blue whale",  "snow leopard", "red panda",     "great white shark", "peacock",
    "octopus",     "bald eagle",   "polar bear",    "chameleon",         "axolotl",
    "puffin",      "manta ray",    "fennec fox",    "king cobra",        "orangutan",
    "narwhal",     "tarantula",    "flamingo",      "komodo dragon",     "sea otter"};

constexpr std::array<const char*, 20> kLandmarks{
    "Eiffel Tower",   "Golden Gate Bridge", "Taj Mahal",      "Sagrada Familia",
    "Colosseum",      "Sydney Opera House", "Burj Khalifa",   "Big Ben",
    "Brooklyn Bridge", "Hagia Sophia",      "Petra",          "Machu Picchu",
    "Forbidden City", "Neuschwanstein Castle", "Angkor Wat",  "Mont Saint-Michel",
    "Pantheon",       "Space Needle",       "Tower Bridge",   "Alhambra"};

constexpr std::array<const char*, 20> kPlayers{
    "Messi",    "Ronaldo", "Pele",     "Maradona", "Zidane", "Mbappe",  "Neymar",
    "Modric",   "Iniesta", "Ronaldinho", "Henry",  "Beckham", "Kaka",    "Xavi",
    "Lewandowski", "Salah", "Benzema",  "Hazard",  "Griezmann", "Suarez"};

constexpr std::array<const char*, 20> kEvents{
    "2022 World Cup", "1998 World Cup",  "2014 World Cup", "Euro 2020",
    "Copa America 2021", "2010 World Cup", "Euro 2016",    "2006 World Cup",
    "Champions League 2019", "Euro 2012", "2018 World Cup", "Copa America 2015",
    "Champions League 2005", "Euro 2008", "1994 World Cup", "Olympic final 2016",
    "Champions League 2011", "Euro 2004", "2002 World Cup", "Club World Cup 2018"};

constexpr std::array<const char*, 20> kFilms{
    "Star Wars",     "The Matrix",   "Inception",     "Interstellar", "Gladiator",
    "The Godfather", "Jurassic Park", "Blade Runner", "Alien",        "Titanic",
    "Avatar",        "Casablanca",   "Goodfellas",    "Braveheart",   "Finding Nemo",
    "The Lion King", "Toy Story",    "Jaws",          "Rocky",        "Dune"};

constexpr std::array<const char*, 20> kUniversities{
    "Harvard University",  "Stanford University", "MIT",                "Oxford University",
    "Cambridge University", "Caltech",            "Princeton University", "Yale University",
    "ETH Zurich",          "Columbia University", "Berkeley",           "Cornell University",
    "University of Tokyo", "Sorbonne",            "Heidelberg University", "McGill University",
    "KAIST",               "Tsinghua University", "EPFL",               "Imperial College"};

// Label-neutral phrasing tails; they vary the surface form so large variant
// counts never repeat a query verbatim.
constexpr std::array<const char*, 5> kSuffixes{
    "", " Answer briefly.", " Keep the answer short.", " One sentence only.",
    " Be precise."};

std::string substitute(std::string text, const std::string& slot,
                       const std::string& value) {
    const auto pos = text.find(slot);
    if (pos == std::string::npos)
        throw std::logic_error("missing template slot " + slot);
    return text.replace(pos, slot.size(), value);
}

struct Template {
    const char* pattern;
    const char* slot;
    std::span<const char* const> pool;
};

// Two templates per pathway, derived from the prompt's worked examples.
// Variant i picks (template, entity, suffix) by index arithmetic, so the
// expansion is deterministic and duplicate-free up to
// templates * pool * suffixes variants.
std::vector<RoutingExample> expand_pathway(const char* label,
                                           std::span<const Template> templates,
                                           int variants) {
    const auto& scheme = GranularityScheme::default_scheme();
    const PathwaySet labels = pathway_parse(label, scheme);
    std::vector<RoutingExample> out;
    out.reserve(static_cast<size_t>(variants));
    for (size_t i = 0; i < static_cast<size_t>(variants); ++i) {
        const Template& t = templates[i % templates.size()];
        const size_t j = i / templates.size();
        const size_t entity = j % t.pool.size();
        const size_t suffix = (j / t.pool.size()) % kSuffixes.size();
        std::string query = substitute(t.pattern, t.slot, t.pool[entity]);
        query += kSuffixes[suffix];
        out.push_back({std::move(query), labels});
    }
    return out;
}

}  // namespace

std::vector<RoutingExample> synthetic_routing_dataset(int variants_per_pathway) {
    if (variants_per_pathway < 1)
        throw std::invalid_argument("variants_per_pathway must be >= 1");

    const Template none_templates[] = {
        {"What is the capital of {place}?", "{place}", kPlaces},
        {"Solve 12 x 8. Then name the currency of {place}.", "{place}", kPlaces},
    };
    const Template paragraph_templates[] = {
        {"What is the birth date of {person}?", "{person}", kPeople},
        {"Who played a key role in the development of the {product}?", "{product}",
         kProducts},
    };
    const Template document_templates[] = {
        {"Which academic discipline do computer scientist {person} and mathematician "
         "John von Neumann have in common?",
         "{person}", kPeople},
        {"Which {university} graduate played a key role in the development of the "
         "iPhone?",
         "{university}", kUniversities},
    };
    const Template table_templates[] = {
        {"Among the recipients of the {award}, who had the earliest birth year?",
         "{award}", kAwards},
        {"What is the cheapest {product} model available in 2023?", "{product}",
         kProducts},
    };
    const Template image_templates[] = {
        {"Describe the appearance of a {animal}.", "{animal}", kAnimals},
        {"Describe the structure of the {landmark}.", "{landmark}", kLandmarks},
    };
    const Template clip_templates[] = {
        {"Describe the moment {player} scored his goal in the 2022 World Cup final.",
         "{player}", kPlayers},
        {"Describe the moment the hero reveals the secret in {film}.", "{film}", kFilms},
    };
    const Template video_templates[] = {
        {"Explain how {player} scored his goal in the 2022 World Cup final.",
         "{player}", kPlayers},
        {"Analyze the sequence of events leading to the fall of the Empire in {film}.",
         "{film}", kFilms},
    };

    std::vector<RoutingExample> out;
    auto append = [&](const char* label, std::span<const Template> templates) {
        auto part = expand_pathway(label, templates, variants_per_pathway);
        out.insert(out.end(), part.begin(), part.end());
    };
    append("No", none_templates);
    append("Paragraph", paragraph_templates);
    append("Document", document_templates);
    append("Table", table_templates);
    append("Image", image_templates);
    append("Clip", clip_templates);
    append("Video", video_templates);
    return out;
}

DatasetSplit split_dataset(const std::vector<RoutingExample>& dataset,
                           double holdout_fraction, uint64_t seed) {
    if (holdout_fraction <= 0.0 || holdout_fraction >= 1.0)
        throw std::invalid_argument("holdout fraction must lie in (0, 1)");
    std::vector<size_t> order(dataset.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    const size_t eval_count =
        static_cast<size_t>(std::max(1.0, holdout_fraction * double(dataset.size())));
    DatasetSplit split;
    for (size_t i = 0; i < order.size(); ++i) {
        if (i < eval_count)
            split.eval.push_back(dataset[order[i]]);
        else
            split.train.push_back(dataset[order[i]]);
    }
    return split;
}

}  // namespace corpus_router
