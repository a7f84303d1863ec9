#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "corpus_router/corpus.hpp"
#include "corpus_router/hash_embed.hpp"
#include "corpus_router/retrieval.hpp"
#include "corpus_router/vector_file.hpp"
#include "test_util.hpp"

using namespace corpus_router;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const char* tag) {
    auto dir = fs::temp_directory_path() / (std::string("corpus_router_test_") + tag +
                                            std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("hash_embed is deterministic and unit-norm") {
    const auto a = hash_embed("abc", 64, 7);
    const auto b = hash_embed("abc", 64, 7);
    CHECK(a == b);
    CHECK(std::abs(l2_norm(a) - 1.0) < 1e-9);

    const auto c = hash_embed("abc", 64, 8);
    CHECK(a != c);  // seed matters

    // norm stays within 1e-9 of 1 on arbitrary inputs
    std::mt19937_64 rng(3);
    for (int i = 0; i < 50; ++i) {
        std::string text;
        const size_t len = 3 + rng() % 60;
        for (size_t j = 0; j < len; ++j) text += char('a' + rng() % 26);
        CHECK(std::abs(l2_norm(hash_embed(text, 32 + int(rng() % 200), 7)) - 1.0) < 1e-9);
    }
}

TEST_CASE("hash_embed rejects degenerate input") {
    CHECK_THROWS_WITH_AS(hash_embed("", 64, 7), "hash_embed: no features",
                         std::invalid_argument);
    CHECK_THROWS_AS(hash_embed("ab", 64, 7), std::invalid_argument);
    CHECK_THROWS_AS(hash_embed("abcdef", 7, 7), std::invalid_argument);
}

TEST_CASE("hash_embed preserves lexical-overlap ordering") {
    // oracle: plain double-precision dot product
    auto dot = [](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
        return s;
    };
    const auto full = hash_embed("the capital of France", 256, 7);
    const auto close = hash_embed("capital of France", 256, 7);
    const auto far = hash_embed("blue whale video", 256, 7);
    CHECK(dot(full, close) > dot(full, far));
}

TEST_CASE("build then load round-trips a small corpus byte-exactly") {
    const auto dir = temp_dir("roundtrip");
    const auto& scheme = GranularityScheme::default_scheme();

    std::vector<CorpusItem> items;
    for (int i = 0; i < 3; ++i) {
        CorpusItem item;
        item.id = "img" + std::to_string(i);
        item.primary_vec = {0.0f, 0.0f, 0.0f, 0.0f};
        item.primary_vec[static_cast<size_t>(i)] = 1.0f;
        item.payload = {{"caption", "picture " + std::to_string(i)},
                        {"media_ref", "img/" + std::to_string(i) + ".png"}};
        items.push_back(item);
    }
    const auto manifest =
        build_corpus(items, Pathway::target(Modality::image, 1), dir, scheme);
    CHECK(manifest.count == 3);
    CHECK(manifest.dim == 4);

    const auto corpus = load_corpus(dir / "image.manifest.json", scheme);
    REQUIRE(corpus->size() == 3);
    for (int i = 0; i < 3; ++i) {
        CHECK(corpus->id(static_cast<uint64_t>(i)) == items[static_cast<size_t>(i)].id);
        const auto payload = corpus->parse_payload(static_cast<uint64_t>(i));
        CHECK(payload.at("caption") == items[static_cast<size_t>(i)].payload.at("caption"));
    }

    // reloading and rebuilding from the loaded data produces identical files
    const auto before = fs::file_size(dir / manifest.vector_file);
    const auto again = load_corpus(dir / "image.manifest.json", scheme);
    CHECK(again->size() == corpus->size());
    CHECK(fs::file_size(dir / manifest.vector_file) == before);
    fs::remove_all(dir);
}

TEST_CASE("1000 hashed items survive the round-trip within normalization tolerance") {
    const auto dir = temp_dir("bulk");
    const auto& scheme = GranularityScheme::default_scheme();

    std::vector<CorpusItem> items;
    for (int i = 0; i < 1000; ++i) {
        CorpusItem item;
        item.id = "t" + std::to_string(i);
        item.primary_vec = hash_embed_f32("document number " + std::to_string(i), 64, 7);
        items.push_back(std::move(item));
    }
    build_corpus(items, Pathway::target(Modality::text, 1), dir, scheme);
    const auto corpus = load_corpus(dir / "paragraph.manifest.json", scheme);
    REQUIRE(corpus->size() == 1000);
    for (uint64_t i = 0; i < corpus->size(); ++i) {
        const auto got = corpus->primary(i);
        const auto& want = items[i].primary_vec;
        for (size_t d = 0; d < want.size(); ++d)
            CHECK(std::abs(got[d] - want[d]) < 1e-6);
    }
    fs::remove_all(dir);
}

TEST_CASE("build_corpus rejects bad inputs") {
    const auto dir = temp_dir("errors");
    const auto& scheme = GranularityScheme::default_scheme();
    const Pathway image = Pathway::target(Modality::image, 1);

    CHECK_THROWS_WITH_AS(build_corpus({}, image, dir, scheme), "empty corpus",
                         std::invalid_argument);

    std::vector<CorpusItem> mixed{{"a", {1.0f, 0.0f}, std::nullopt, {}},
                                  {"b", {1.0f, 0.0f, 0.0f}, std::nullopt, {}}};
    CHECK_THROWS_AS(build_corpus(mixed, image, dir, scheme), std::invalid_argument);

    std::vector<CorpusItem> dup{{"a", {1.0f, 0.0f}, std::nullopt, {}},
                                {"a", {0.0f, 1.0f}, std::nullopt, {}}};
    CHECK_THROWS_AS(build_corpus(dup, image, dir, scheme), std::invalid_argument);

    std::vector<CorpusItem> ok{{"a", {1.0f, 0.0f}, std::nullopt, {}}};
    CHECK_THROWS_AS(build_corpus(ok, Pathway::make_none(), dir, scheme),
                    std::invalid_argument);
    fs::remove_all(dir);
}

TEST_CASE("load_corpus detects corruption") {
    const auto dir = temp_dir("corrupt");
    const auto& scheme = GranularityScheme::default_scheme();
    std::mt19937_64 rng(5);
    const auto items = test_util::random_items(5, 8, rng);
    const auto manifest =
        build_corpus(items, Pathway::target(Modality::table, 1), dir, scheme);

    SUBCASE("vector file truncated by one byte") {
        const auto path = dir / manifest.vector_file;
        fs::resize_file(path, fs::file_size(path) - 1);
        CHECK_THROWS_WITH_AS(load_corpus(dir / "table.manifest.json", scheme),
                             "vector file: truncated payload", std::runtime_error);
    }
    SUBCASE("magic mismatch") {
        std::fstream f(dir / manifest.vector_file,
                       std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(0);
        f.write("WRONGMAG", 8);
        f.close();
        CHECK_THROWS_WITH_AS(load_corpus(dir / "table.manifest.json", scheme),
                             "vector file: magic mismatch", std::runtime_error);
    }
    SUBCASE("payload line count disagrees with manifest") {
        // drop the last payload line: 5 declared, 4 present
        std::ifstream in(dir / manifest.payload_file);
        std::vector<std::string> lines;
        std::string line;
        while (std::getline(in, line)) lines.push_back(line);
        in.close();
        std::ofstream out(dir / manifest.payload_file, std::ios::trunc);
        for (size_t i = 0; i + 1 < lines.size(); ++i) out << lines[i] << '\n';
        out.close();
        CHECK_THROWS_AS(load_corpus(dir / "table.manifest.json", scheme),
                        std::runtime_error);
        try {
            load_corpus(dir / "table.manifest.json", scheme);
        } catch (const std::runtime_error& e) {
            CHECK(std::string(e.what()).find("count mismatch") != std::string::npos);
        }
    }
    fs::remove_all(dir);
}

TEST_CASE("persistence property: random corpora round-trip ids, payloads, vectors") {
    const auto dir = temp_dir("property");
    const auto& scheme = GranularityScheme::default_scheme();
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        const size_t count = 1 + rng() % 50;
        const int dim = 8 + int(rng() % 24);
        const bool aux = rng() % 2 == 0;
        const auto items = test_util::random_items(count, dim, rng, "x", aux, 12);
        const auto sub = dir / std::to_string(trial);
        build_corpus(items, Pathway::target(Modality::video, 1), sub, scheme, "clipset");
        const auto corpus = load_corpus(sub / "clipset.manifest.json", scheme);
        REQUIRE(corpus->size() == count);
        CHECK(corpus->aux_dim().has_value() == aux);
        for (uint64_t i = 0; i < count; ++i) {
            CHECK(corpus->id(i) == items[i].id);
            CHECK(corpus->parse_payload(i).at("text") == items[i].payload.at("text"));
            // stored vectors are the normalized inputs
            auto want = items[i].primary_vec;
            l2_normalize(want);
            const auto got = corpus->primary(i);
            for (size_t d = 0; d < want.size(); ++d)
                CHECK(std::abs(got[d] - want[d]) <= 1e-6);
        }
    }
    fs::remove_all(dir);
}

TEST_CASE("vector file format is bit-exact and layout-stable") {
    const auto dir = temp_dir("vecfile");
    VectorMatrix m{3, 2, {1.0f, 2.0f, 3.0f, 4.0f, 5.0f, 6.0f}};
    write_vector_file(dir / "m.vec", m);

    // magic + header layout
    std::ifstream in(dir / "m.vec", std::ios::binary);
    char magic[8];
    in.read(magic, 8);
    CHECK(std::string(magic, 8) == "URAGVEC1");
    uint32_t dim = 0;
    uint64_t count = 0;
    in.read(reinterpret_cast<char*>(&dim), 4);
    in.read(reinterpret_cast<char*>(&count), 8);
    CHECK(dim == 3);
    CHECK(count == 2);
    float first = 0.0f;
    in.read(reinterpret_cast<char*>(&first), 4);
    CHECK(first == 1.0f);
    in.close();

    const auto back = read_vector_file(dir / "m.vec");
    CHECK(back.dim == m.dim);
    CHECK(back.count == m.count);
    CHECK(back.data == m.data);
    fs::remove_all(dir);
}
