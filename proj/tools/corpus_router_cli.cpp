#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "corpus_router/corpus.hpp"
#include "corpus_router/csv.hpp"
#include "corpus_router/eval.hpp"
#include "corpus_router/hash_embed.hpp"
#include "corpus_router/pipeline.hpp"
#include "corpus_router/prompts.hpp"
#include "corpus_router/retrieval.hpp"
#include "corpus_router/routing.hpp"
#include "corpus_router/service_client.hpp"
#include "corpus_router/theory.hpp"
#include "corpus_router/vector_file.hpp"

namespace cr = corpus_router;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------- helpers

uint64_t fnv1a64(std::string_view s) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

fs::path data_home() {
    if (const char* env = std::getenv("CORPUS_ROUTER_HOME")) return env;
    return "corpus_router_data";
}

std::vector<uint64_t> parse_u64_list(const std::string& csv) {
    std::vector<uint64_t> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stoull(tok));
    return out;
}

std::vector<int> parse_int_list(const std::string& csv) {
    std::vector<int> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
    return out;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    return out;
}

// Loads every *.manifest.json under the directory into a pathway->corpus map.
cr::CorpusMap load_corpora_dir(const fs::path& dir, const cr::GranularityScheme& scheme) {
    cr::CorpusMap corpora;
    if (!fs::is_directory(dir))
        throw std::runtime_error("corpora directory not found: " + dir.string());
    for (const auto& entry : fs::directory_iterator(dir)) {
        const auto name = entry.path().filename().string();
        if (name.size() < 14 || name.substr(name.size() - 14) != ".manifest.json") continue;
        auto corpus = cr::load_corpus(entry.path(), scheme);
        if (!corpora.emplace(corpus->pathway(), corpus).second)
            throw std::runtime_error("two corpora registered for pathway '" +
                                     scheme.label(corpus->pathway()) + "'");
    }
    if (corpora.empty())
        throw std::runtime_error("no *.manifest.json files in " + dir.string());
    return corpora;
}

std::vector<std::shared_ptr<cr::Corpus>> corpora_list(const cr::CorpusMap& map) {
    std::vector<std::shared_ptr<cr::Corpus>> out;
    for (const auto& [p, c] : map) out.push_back(c);
    return out;
}

// ----------------------------------------------------------- shared flags

struct CommonOpts {
    std::string scheme = "default7";
    uint64_t seed = 0;
    double threshold = 0.8;
    int workers = 1;
    int k = 5;
    std::string endpoint;
    std::string out;
};

const cr::GranularityScheme& scheme_of(const CommonOpts& o) {
    return cr::GranularityScheme::by_name(o.scheme);
}

struct RouterOpts {
    std::string kind = "trained";  // trained|prompt|random|fixed
    std::string model_path;
    std::string fixed_pathways;
    bool threshold_set = false;
};

// Builds a RouterFn. Prompt routers serialize requests through one client;
// random routers derive their draw from the query text so worker count
// never changes the output.
cr::RouterFn make_router(const RouterOpts& r, const CommonOpts& o,
                         const cr::GranularityScheme& scheme,
                         std::vector<std::unique_ptr<cr::ServiceClient>>& owned_clients) {
    if (r.kind == "trained") {
        if (r.model_path.empty())
            throw std::runtime_error("--router trained requires --model");
        auto model = std::make_shared<cr::TrainedRouterModel>(
            cr::TrainedRouterModel::load(r.model_path, scheme));
        if (r.threshold_set) model->threshold = o.threshold;
        return [model](const std::string& q) { return cr::route_trained(*model, q); };
    }
    if (r.kind == "prompt") {
        if (o.endpoint.empty())
            throw std::runtime_error("--router prompt requires --endpoint");
        owned_clients.push_back(cr::open_service(o.endpoint));
        auto* client = owned_clients.back().get();
        auto lock = std::make_shared<std::mutex>();
        return [client, lock, &scheme](const std::string& q) {
            std::scoped_lock guard(*lock);
            return cr::route_prompt(*client, q, scheme);
        };
    }
    if (r.kind == "random") {
        const uint64_t base = o.seed;
        return [base, &scheme](const std::string& q) {
            return cr::route_random(scheme, base ^ fnv1a64(q));
        };
    }
    if (r.kind == "fixed") {
        if (r.fixed_pathways.empty())
            throw std::runtime_error("--router fixed requires --pathways");
        cr::RoutingDecision decision;
        decision.source = cr::RouterSource::trained;
        decision.pathways = cr::pathway_parse(r.fixed_pathways, scheme);
        for (const auto& p : decision.pathways) decision.scores[p] = 1.0;
        return [decision](const std::string&) { return decision; };
    }
    throw std::runtime_error("unknown router kind: " + r.kind);
}

cr::EmbedFn make_embedder(const CommonOpts& o, int dim, uint64_t embed_seed,
                          std::vector<std::unique_ptr<cr::ServiceClient>>& owned_clients) {
    if (!o.endpoint.empty()) {
        owned_clients.push_back(cr::open_service(o.endpoint));
        auto* client = owned_clients.back().get();
        auto lock = std::make_shared<std::mutex>();
        return [client, lock, dim](const std::string& text) {
            std::scoped_lock guard(*lock);
            return cr::embed_remote(*client, text, dim);
        };
    }
    return [dim, embed_seed](const std::string& text) {
        return cr::hash_embed_f32(text, dim, embed_seed);
    };
}

json decision_to_json(const cr::RoutingDecision& d, const cr::GranularityScheme& scheme) {
    json names = json::array();
    for (const auto& p : d.pathways) names.push_back(scheme.label(p));
    json scores = json::object();
    for (const auto& [p, s] : d.scores) scores[scheme.label(p)] = s;
    return json{{"pathways", names},
                {"scores", scores},
                {"source", std::string(cr::router_source_name(d.source))}};
}

// ------------------------------------------------------------ subcommands

int cmd_ingest(const CommonOpts& o, const std::string& payload_path,
               const std::string& pathway_label, const std::string& vectors_path,
               const std::string& aux_vectors_path, int embed_dim,
               const std::string& name) {
    const auto& scheme = scheme_of(o);
    const cr::Pathway pathway = scheme.parse_label(pathway_label);

    std::ifstream in(payload_path);
    if (!in) throw std::runtime_error("cannot open payload file: " + payload_path);
    std::vector<cr::CorpusItem> items;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const json j = json::parse(line);
        cr::CorpusItem item;
        item.id = j.at("id").get<std::string>();
        item.payload = j;
        items.push_back(std::move(item));
    }
    if (items.empty()) throw std::runtime_error("empty corpus");

    if (!vectors_path.empty()) {
        const auto m = cr::read_vector_file(vectors_path);
        if (m.count != items.size())
            throw std::runtime_error("vector file count does not match payload lines");
        for (size_t i = 0; i < items.size(); ++i)
            items[i].primary_vec.assign(m.row(i), m.row(i) + m.dim);
        if (!aux_vectors_path.empty()) {
            const auto am = cr::read_vector_file(aux_vectors_path);
            if (am.count != items.size())
                throw std::runtime_error("aux vector file count does not match payload lines");
            for (size_t i = 0; i < items.size(); ++i)
                items[i].aux_text_vec.emplace(am.row(i), am.row(i) + am.dim);
        }
    } else {
        std::vector<std::unique_ptr<cr::ServiceClient>> clients;
        auto embed = make_embedder(o, embed_dim, o.seed, clients);
        for (auto& item : items) {
            std::string text;
            if (item.payload.contains("text") && item.payload["text"].is_string())
                text = item.payload["text"].get<std::string>();
            else if (item.payload.contains("caption") && item.payload["caption"].is_string())
                text = item.payload["caption"].get<std::string>();
            if (text.empty())
                throw std::runtime_error("item '" + item.id +
                                         "' has no text/caption to embed; pass --vectors");
            item.primary_vec = embed(text);
        }
    }

    const fs::path out_dir = o.out.empty() ? data_home() / "corpora" : fs::path(o.out);
    const auto manifest = cr::build_corpus(items, pathway, out_dir, scheme, name);
    std::cout << manifest.to_json(scheme).dump() << "\n";
    return 0;
}

int cmd_train_router(const CommonOpts& o, const std::string& data_path,
                     const cr::RouterTrainingConfig& config) {
    const auto& scheme = scheme_of(o);
    std::ifstream in(data_path);
    if (!in) throw std::runtime_error("cannot open dataset: " + data_path);
    std::vector<cr::RoutingExample> dataset;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const json j = json::parse(line);
        cr::RoutingExample ex;
        ex.query = j.at("query").get<std::string>();
        for (const auto& name : j.at("labels"))
            ex.labels.insert(scheme.parse_label(name.get<std::string>()));
        dataset.push_back(std::move(ex));
    }

    std::vector<double> losses;
    auto model = cr::train_router(dataset, config, scheme, &losses);
    model.threshold = o.threshold;
    const std::string out_path =
        o.out.empty() ? (data_home() / "router.model").string() : o.out;
    model.save(out_path, scheme);
    std::cerr << "trained on " << dataset.size() << " examples, " << config.epochs
              << " epochs; final BCE " << (losses.empty() ? 0.0 : losses.back()) << "\n";
    std::cout << out_path << "\n";
    return 0;
}

int cmd_route(const CommonOpts& o, const RouterOpts& r, const std::string& query,
              const std::string& file) {
    const auto& scheme = scheme_of(o);
    std::vector<std::unique_ptr<cr::ServiceClient>> clients;
    auto router = make_router(r, o, scheme, clients);

    std::ostream* out = &std::cout;
    std::ofstream out_file;
    if (!o.out.empty()) {
        out_file = open_out(o.out);
        out = &out_file;
    }

    struct Item {
        std::string id;
        std::string query;
    };
    std::vector<Item> batch;
    if (!query.empty()) {
        batch.push_back({"q0", query});
    } else {
        std::ifstream in(file);
        if (!in) throw std::runtime_error("cannot open query file: " + file);
        std::string line;
        size_t n = 0;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            Item item;
            if (!line.empty() && line.front() == '{') {
                const json j = json::parse(line);
                item.id = j.value("query_id", "q" + std::to_string(n));
                item.query = j.at("query").get<std::string>();
            } else {
                item.id = "q" + std::to_string(n);
                item.query = line;
            }
            batch.push_back(std::move(item));
            ++n;
        }
    }

    std::vector<json> results(batch.size());
    auto process = [&](size_t i) {
        json j = decision_to_json(router(batch[i].query), scheme);
        j["query_id"] = batch[i].id;
        j["query"] = batch[i].query;
        results[i] = std::move(j);
    };
    if (o.workers <= 1 || batch.size() <= 1) {
        for (size_t i = 0; i < batch.size(); ++i) process(i);
    } else {
        std::atomic<size_t> next{0};
        std::mutex error_lock;
        std::string first_error;
        std::vector<std::thread> pool;
        for (int w = 0; w < o.workers; ++w)
            pool.emplace_back([&] {
                for (;;) {
                    const size_t i = next.fetch_add(1);
                    if (i >= batch.size()) return;
                    try {
                        process(i);
                    } catch (const std::exception& e) {
                        std::scoped_lock guard(error_lock);
                        if (first_error.empty()) first_error = e.what();
                    }
                }
            });
        for (auto& t : pool) t.join();
        if (!first_error.empty()) throw std::runtime_error(first_error);
    }
    for (const auto& j : results) *out << j.dump() << "\n";
    return 0;
}

int cmd_retrieve(const CommonOpts& o, const RouterOpts& r, const std::string& query,
                 const std::string& corpora_dir, const std::string& mode, int embed_dim) {
    const auto& scheme = scheme_of(o);
    const auto corpora =
        load_corpora_dir(corpora_dir.empty() ? data_home() / "corpora" : fs::path(corpora_dir), scheme);

    std::vector<std::unique_ptr<cr::ServiceClient>> clients;
    const int dim = embed_dim > 0 ? embed_dim : static_cast<int>(
                                                    corpora.begin()->second->dim());
    auto embed = make_embedder(o, dim, o.seed, clients);

    std::ostream* out = &std::cout;
    std::ofstream out_file;
    if (!o.out.empty()) {
        out_file = open_out(o.out);
        out = &out_file;
    }

    auto emit = [&](const cr::Pathway& pathway, const cr::ScoredEntry& e, int rank) {
        const json j = {{"query", query},          {"pathway", scheme.label(pathway)},
                        {"corpus", e.corpus_name}, {"id", e.item_id},
                        {"score", e.score},        {"rank", rank}};
        *out << j.dump() << "\n";
    };

    if (mode == "unified") {
        const auto result = cr::unified_retrieve(embed(query), corpora_list(corpora), o.k);
        int rank = 1;
        for (const auto& e : result.entries) emit(e.pathway, e, rank++);
    } else if (mode == "all") {
        const auto results = cr::retrieve_all(embed(query), corpora_list(corpora), o.k);
        for (const auto& result : results) {
            int rank = 1;
            for (const auto& e : result.entries) emit(e.pathway, e, rank++);
        }
    } else if (mode == "routed") {
        auto router = make_router(r, o, scheme, clients);
        const auto bundle =
            cr::route_and_retrieve(query, router, corpora, o.k, embed, {}, "q0", scheme);
        int rank = 1;
        for (const auto& m : bundle.merged) {
            const json j = {{"query", query},          {"pathway", scheme.label(m.pathway)},
                            {"corpus", m.corpus_name}, {"id", m.item_id},
                            {"score", m.score},        {"rank", rank++},
                            {"text", m.text}};
            *out << j.dump() << "\n";
        }
    } else {
        throw std::runtime_error("unknown retrieve mode: " + mode);
    }
    return 0;
}

int cmd_eval(const CommonOpts& o, const RouterOpts& r, const std::string& gold_path,
             const std::string& corpora_dir, const std::string& ks_csv, int embed_dim) {
    const auto& scheme = scheme_of(o);
    const auto gold = cr::load_gold_file(gold_path, scheme);
    const auto corpora =
        load_corpora_dir(corpora_dir.empty() ? data_home() / "corpora" : fs::path(corpora_dir), scheme);

    std::vector<std::unique_ptr<cr::ServiceClient>> clients;
    const int dim = embed_dim > 0 ? embed_dim : static_cast<int>(
                                                    corpora.begin()->second->dim());
    auto embed = make_embedder(o, dim, o.seed, clients);
    auto router = make_router(r, o, scheme, clients);

    const auto report =
        cr::run_eval(gold, router, corpora, parse_int_list(ks_csv), embed, o.workers, scheme);
    report.write_table(std::cout);
    if (!o.out.empty()) {
        auto out = open_out(o.out);
        report.write_csv(out);
    }
    return 0;
}

int cmd_simulate(const CommonOpts& o, const cr::ScoreModelParams& params,
                 const std::string& sizes_csv, double router_acc, uint64_t trials) {
    const auto sizes_list = parse_u64_list(sizes_csv);
    if (sizes_list.size() != 3)
        throw std::runtime_error("--sizes wants three values: S,R,O");
    const cr::CorpusSizes sizes{sizes_list[0], sizes_list[1], sizes_list[2]};

    const auto outcome =
        cr::simulate_unified_vs_routed(params, sizes, router_acc, trials, o.seed);
    const double threshold = cr::alpha_threshold(sizes, router_acc, params.sigma());

    std::ostream* out = &std::cout;
    std::ofstream out_file;
    if (!o.out.empty()) {
        out_file = open_out(o.out);
        out = &out_file;
        std::cout << "p(unified in R)  " << cr::csv_num(outcome.p_unified_in_r, 4)
                  << "  +/- " << cr::csv_num(outcome.se_unified(), 4) << "\n"
                  << "p(routed in R)   " << cr::csv_num(outcome.p_routed_in_r, 4) << "\n"
                  << "chernoff bound   " << cr::csv_num(outcome.chernoff, 6) << "\n"
                  << "alpha threshold  " << cr::csv_num(threshold, 4) << "\n";
    }
    cr::write_csv_row(*out, {"alpha", "beta", "sigma_r", "sigma_eps", "sigma", "s", "r",
                             "o", "router_acc", "trials", "p_unified_in_r",
                             "p_routed_in_r", "se_unified", "chernoff_bound",
                             "alpha_threshold"});
    cr::write_csv_row(
        *out, {cr::csv_num(params.alpha), cr::csv_num(params.beta),
               cr::csv_num(params.sigma_r), cr::csv_num(params.sigma_eps),
               cr::csv_num(params.sigma()), std::to_string(sizes.same),
               std::to_string(sizes.required), std::to_string(sizes.other),
               cr::csv_num(router_acc), std::to_string(trials),
               cr::csv_num(outcome.p_unified_in_r), cr::csv_num(outcome.p_routed_in_r),
               cr::csv_num(outcome.se_unified()), cr::csv_num(outcome.chernoff, 9),
               cr::csv_num(threshold)});
    return 0;
}

int cmd_granularity(const CommonOpts& o, const std::string& table_path) {
    std::ifstream in(table_path);
    if (!in) throw std::runtime_error("cannot open quality table: " + table_path);

    cr::QualityTable table;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (header) {
            for (size_t i = 1; i < cells.size(); ++i) table.granularities.push_back(cells[i]);
            header = false;
            continue;
        }
        if (cells.size() != table.granularities.size() + 1)
            throw std::runtime_error("incomplete quality table row: " + line);
        table.query_ids.push_back(cells[0]);
        std::vector<double> row;
        for (size_t i = 1; i < cells.size(); ++i) row.push_back(std::stod(cells[i]));
        table.values.push_back(std::move(row));
    }

    const auto cmp = cr::compare_granularity_policies(table);
    std::cout << "best fixed policy  " << cmp.best_fixed_label << " (sum "
              << cr::csv_num(cmp.best_fixed_sum, 4) << ")\n"
              << "adaptive policy    sum " << cr::csv_num(cmp.adaptive_sum, 4) << "\n"
              << "strictly better    " << (cmp.strict ? "yes" : "no") << "\n";
    if (!o.out.empty()) {
        auto out = open_out(o.out);
        cr::write_csv_row(out, {"best_fixed_label", "best_fixed_sum", "adaptive_sum",
                                "strict"});
        cr::write_csv_row(out, {cmp.best_fixed_label, cr::csv_num(cmp.best_fixed_sum),
                                cr::csv_num(cmp.adaptive_sum), cmp.strict ? "true" : "false"});
    }
    return 0;
}

int cmd_bench(const CommonOpts& o, const cr::LatencyConfig& config) {
    const auto report = cr::bench_latency(config);

    std::ostream* out = &std::cout;
    std::ofstream out_file;
    if (!o.out.empty()) {
        out_file = open_out(o.out);
        out = &out_file;
        for (const auto& row : report.rows)
            std::cout << "N=" << row.n << "  unified " << cr::csv_num(row.t_unified_s, 6)
                      << "s  routed " << cr::csv_num(row.t_routed_s, 6) << "s  ratio "
                      << cr::csv_num(row.ratio, 3) << "\n";
    }
    cr::write_csv_row(*out, {"n", "k", "backend", "t_unified_s", "t_routed_s", "ratio"});
    for (const auto& row : report.rows)
        cr::write_csv_row(*out, {std::to_string(row.n), std::to_string(row.k),
                                 std::string(cr::latency_backend_name(report.backend)),
                                 cr::csv_num(row.t_unified_s, 6),
                                 cr::csv_num(row.t_routed_s, 6), cr::csv_num(row.ratio, 4)});
    if (!report.error.empty()) {
        std::cerr << "bench stopped early: " << report.error << "\n";
        return 2;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"corpus-router: routing-first multi-corpus retrieval engine"};
    app.require_subcommand(1);

    CommonOpts o;
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--scheme", o.scheme, "Granularity scheme: default7 or extended")
            ->capture_default_str();
        cmd->add_option("--seed", o.seed, "Seed for all randomness")->capture_default_str();
        cmd->add_option("--workers", o.workers, "Worker threads for batch commands")
            ->capture_default_str();
        cmd->add_option("--endpoint", o.endpoint,
                        "External service endpoint: exec:<cmd> or http://host:port/path");
        cmd->add_option("--out", o.out, "Output file (default: stdout)");
    };

    RouterOpts r;
    auto add_router = [&](CLI::App* cmd) {
        cmd->add_option("--router", r.kind, "Router: trained, prompt, random, or fixed")
            ->capture_default_str();
        cmd->add_option("--model", r.model_path, "Trained router model file");
        cmd->add_option("--pathways", r.fixed_pathways,
                        "Pathway labels for --router fixed, e.g. \"Paragraph+Image\"");
        auto* t = cmd->add_option("--threshold", o.threshold,
                                  "Sigmoid routing threshold for trained routers")
                      ->capture_default_str();
        cmd->callback([&r, t] { r.threshold_set = t->count() > 0; });
    };

    // ingest
    std::string payload_path, pathway_label, vectors_path, aux_vectors_path, name;
    int embed_dim = 256;
    auto* ingest = app.add_subcommand("ingest", "Build a corpus from payloads and vectors");
    add_common(ingest);
    ingest->add_option("--payload", payload_path, "Payload JSON Lines file")->required();
    ingest->add_option("--pathway", pathway_label, "Target pathway label")->required();
    ingest->add_option("--vectors", vectors_path, "Precomputed vector file");
    ingest->add_option("--aux-vectors", aux_vectors_path, "Auxiliary text vector file");
    ingest->add_option("--embed-dim", embed_dim, "Hash-embedding dimension when no vectors")
        ->capture_default_str();
    ingest->add_option("--name", name, "Corpus name (default: pathway label)");

    // train-router
    std::string train_data;
    cr::RouterTrainingConfig train_config;
    auto* train = app.add_subcommand("train-router", "Train the multi-label router");
    add_common(train);
    train->add_option("--data", train_data, "Routing dataset JSON Lines")->required();
    train->add_option("--epochs", train_config.epochs)->capture_default_str();
    train->add_option("--lr", train_config.learning_rate)->capture_default_str();
    train->add_option("--dim", train_config.dim)->capture_default_str();
    train->add_option("--threshold", o.threshold, "Threshold stored in the model")
        ->capture_default_str();

    // route
    std::string route_query, route_file;
    auto* route = app.add_subcommand("route", "Route queries to pathways");
    add_common(route);
    add_router(route);
    auto* route_source = route->add_option_group("query source");
    route_source->add_option("--query", route_query, "Single query");
    route_source->add_option("--file", route_file, "Query file: JSONL or plain lines");
    route_source->require_option(1);

    // retrieve
    std::string retrieve_query, corpora_dir, retrieve_mode = "routed";
    int retrieve_embed_dim = 0;
    auto* retrieve = app.add_subcommand("retrieve", "Retrieve merged contexts for a query");
    add_common(retrieve);
    add_router(retrieve);
    retrieve->add_option("--query", retrieve_query, "Query text")->required();
    retrieve->add_option("--corpora", corpora_dir, "Directory of corpus manifests");
    retrieve->add_option("--k", o.k, "Results per corpus")->capture_default_str();
    retrieve->add_option("--mode", retrieve_mode, "routed, unified, or all")
        ->capture_default_str();
    retrieve->add_option("--embed-dim", retrieve_embed_dim,
                         "Query embedding dimension (default: corpus dim)");

    // eval
    std::string gold_path, ks_csv = "1,3,5";
    auto* eval = app.add_subcommand("eval", "Evaluate routing and retrieval on a gold file");
    add_common(eval);
    add_router(eval);
    eval->add_option("--gold", gold_path, "Gold JSON Lines file")->required();
    eval->add_option("--corpora", corpora_dir, "Directory of corpus manifests");
    eval->add_option("--ks", ks_csv, "Recall cutoffs")->capture_default_str();
    eval->add_option("--embed-dim", retrieve_embed_dim,
                     "Query embedding dimension (default: corpus dim)");

    // simulate
    cr::ScoreModelParams sim_params;
    double sim_sigma = -1.0;
    std::string sim_sizes = "500,500,500";
    double sim_router_acc = 0.95;
    uint64_t sim_trials = 10000;
    auto* simulate = app.add_subcommand("simulate", "Monte-Carlo unified-vs-routed comparison");
    add_common(simulate);
    simulate->add_option("--alpha", sim_params.alpha, "Modality bias")->capture_default_str();
    simulate->add_option("--beta", sim_params.beta, "Relevance weight")->capture_default_str();
    simulate->add_option("--sigma-r", sim_params.sigma_r, "Relevance stdev")
        ->capture_default_str();
    simulate->add_option("--sigma-eps", sim_params.sigma_eps, "Noise stdev")
        ->capture_default_str();
    simulate->add_option("--sigma", sim_sigma,
                         "Shorthand: sets beta=1, sigma_r=sigma, sigma_eps=0");
    simulate->add_option("--sizes", sim_sizes, "S,R,O part sizes")->capture_default_str();
    simulate->add_option("--router-acc", sim_router_acc, "Routed success probability")
        ->capture_default_str();
    simulate->add_option("--trials", sim_trials)->capture_default_str();

    // granularity
    std::string table_path;
    auto* granularity =
        app.add_subcommand("granularity", "Compare fixed vs adaptive granularity policies");
    add_common(granularity);
    granularity->add_option("--table", table_path, "Quality table CSV")->required();

    // bench
    cr::LatencyConfig bench_config;
    std::string bench_ns = "10000,100000";
    std::string bench_backend = "exact_scan";
    auto* bench = app.add_subcommand("bench", "Latency sweep: unified vs routed");
    add_common(bench);
    bench->add_option("--k", bench_config.pathway_count, "Pathway count")
        ->capture_default_str();
    bench->add_option("--n", bench_ns, "Comma-separated corpus sizes")->capture_default_str();
    bench->add_option("--dim", bench_config.dim)->capture_default_str();
    bench->add_option("--backend", bench_backend, "exact_scan or bucketed")
        ->capture_default_str();
    bench->add_option("--reps", bench_config.repetitions)->capture_default_str();
    bench->add_option("--route-cost-ms", bench_config.route_cost_ms,
                      "Fixed routing overhead in milliseconds")
        ->capture_default_str();
    bench->add_option("--top-k", bench_config.top_k)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand(ingest))
            return cmd_ingest(o, payload_path, pathway_label, vectors_path,
                              aux_vectors_path, embed_dim, name);
        if (app.got_subcommand(train)) {
            train_config.seed = o.seed;
            return cmd_train_router(o, train_data, train_config);
        }
        if (app.got_subcommand(route)) return cmd_route(o, r, route_query, route_file);
        if (app.got_subcommand(retrieve))
            return cmd_retrieve(o, r, retrieve_query, corpora_dir, retrieve_mode,
                                retrieve_embed_dim);
        if (app.got_subcommand(eval))
            return cmd_eval(o, r, gold_path, corpora_dir, ks_csv, retrieve_embed_dim);
        if (app.got_subcommand(simulate)) {
            if (sim_sigma >= 0.0) sim_params = cr::ScoreModelParams::with_sigma(
                sim_params.alpha, sim_sigma);
            return cmd_simulate(o, sim_params, sim_sizes, sim_router_acc, sim_trials);
        }
        if (app.got_subcommand(granularity)) return cmd_granularity(o, table_path);
        if (app.got_subcommand(bench)) {
            bench_config.corpus_sizes = parse_u64_list(bench_ns);
            bench_config.backend = cr::parse_latency_backend(bench_backend);
            bench_config.seed = o.seed;
            return cmd_bench(o, bench_config);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
