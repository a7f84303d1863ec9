#include "corpus_router/eval.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "corpus_router/csv.hpp"

namespace corpus_router {

namespace {

std::set<Modality> modality_set(const PathwaySet& pathways) {
    std::set<Modality> out;
    for (const auto& p : pathways)
        if (!p.is_none()) out.insert(p.modality);
    return out;
}

std::set<Modality> retrieved_modalities(const ContextBundle& bundle) {
    std::set<Modality> out;
    for (const auto& entry : bundle.merged) out.insert(entry.pathway.modality);
    return out;
}

bool gold_hit_in_topk(const ContextBundle& bundle, const GoldRecord& record, int k) {
    const size_t limit = std::min<size_t>(bundle.merged.size(), static_cast<size_t>(k));
    for (size_t i = 0; i < limit; ++i) {
        if (record.gold_item_ids.count(
                {bundle.merged[i].corpus_name, bundle.merged[i].item_id}))
            return true;
    }
    return false;
}

void check_alignment(const std::string& got, const std::string& want) {
    if (got != want)
        throw std::invalid_argument("query_id mismatch: got '" + got + "', want '" +
                                    want + "'");
}

}  // namespace

std::vector<GoldRecord> load_gold_file(std::istream& in, const GranularityScheme& scheme) {
    std::vector<GoldRecord> out;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const std::exception& e) {
            throw std::runtime_error("gold file line " + std::to_string(line_no) + ": " +
                                     e.what());
        }
        GoldRecord r;
        r.query_id = j.at("query_id").get<std::string>();
        r.query = j.at("query").get<std::string>();
        for (const auto& name : j.at("gold_pathways"))
            r.gold_pathways.insert(scheme.parse_label(name.get<std::string>()));
        if (r.gold_pathways.empty())
            throw std::runtime_error("gold file line " + std::to_string(line_no) +
                                     ": empty gold_pathways");
        if (r.gold_pathways.size() > 1 && r.gold_pathways.count(Pathway::make_none()))
            throw std::runtime_error("gold file line " + std::to_string(line_no) +
                                     ": none is exclusive");
        if (j.contains("gold_items"))
            for (const auto& pair : j.at("gold_items"))
                r.gold_item_ids.insert(
                    {pair.at(0).get<std::string>(), pair.at(1).get<std::string>()});
        const bool is_none = r.gold_pathways.count(Pathway::make_none()) > 0;
        if (is_none != r.gold_item_ids.empty())
            throw std::runtime_error("gold file line " + std::to_string(line_no) +
                                     ": gold_items must be empty exactly for none");
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<GoldRecord> load_gold_file(const std::string& path,
                                       const GranularityScheme& scheme) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open gold file: " + path);
    return load_gold_file(in, scheme);
}

double router_accuracy(
    const std::vector<std::pair<std::string, RoutingDecision>>& decisions,
    const std::vector<GoldRecord>& gold) {
    if (decisions.size() != gold.size())
        throw std::invalid_argument("router_accuracy: size mismatch");
    if (gold.empty()) throw std::invalid_argument("router_accuracy: empty dataset");
    uint64_t correct = 0;
    for (size_t i = 0; i < gold.size(); ++i) {
        check_alignment(decisions[i].first, gold[i].query_id);
        if (decisions[i].second.pathways == gold[i].gold_pathways) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(gold.size());
}

double modality_accuracy(const std::vector<ContextBundle>& bundles,
                         const std::vector<GoldRecord>& gold) {
    if (bundles.size() != gold.size())
        throw std::invalid_argument("modality_accuracy: size mismatch");
    uint64_t scored = 0;
    uint64_t correct = 0;
    for (size_t i = 0; i < gold.size(); ++i) {
        check_alignment(bundles[i].query_id, gold[i].query_id);
        if (gold[i].gold_pathways.count(Pathway::make_none())) continue;
        ++scored;
        if (retrieved_modalities(bundles[i]) == modality_set(gold[i].gold_pathways))
            ++correct;
    }
    if (scored == 0) throw std::invalid_argument("modality_accuracy: no scored rows");
    return static_cast<double>(correct) / static_cast<double>(scored);
}

double recall_at_k(const std::vector<ContextBundle>& bundles,
                   const std::vector<GoldRecord>& gold, int k) {
    if (k < 1) throw std::invalid_argument("recall_at_k: k must be >= 1");
    if (bundles.size() != gold.size())
        throw std::invalid_argument("recall_at_k: size mismatch");
    uint64_t scored = 0;
    uint64_t hits = 0;
    for (size_t i = 0; i < gold.size(); ++i) {
        check_alignment(bundles[i].query_id, gold[i].query_id);
        if (gold[i].gold_item_ids.empty()) continue;
        ++scored;
        if (gold_hit_in_topk(bundles[i], gold[i], k)) ++hits;
    }
    if (scored == 0) throw std::invalid_argument("recall_at_k: no scored rows");
    return static_cast<double>(hits) / static_cast<double>(scored);
}

EvalReport run_eval(const std::vector<GoldRecord>& gold, const RouterFn& router,
                    const CorpusMap& corpora, const std::vector<int>& ks,
                    const EmbedFn& embedder, int workers,
                    const GranularityScheme& scheme) {
    if (gold.empty()) throw std::invalid_argument("run_eval: empty dataset");
    if (ks.empty()) throw std::invalid_argument("run_eval: no k values");
    const int max_k = *std::max_element(ks.begin(), ks.end());

    struct Row {
        bool ok = false;
        ContextBundle bundle;
    };
    std::vector<Row> rows(gold.size());

    auto process = [&](size_t i) {
        try {
            rows[i].bundle =
                route_and_retrieve(gold[i].query, router, corpora, max_k, embedder, {},
                                   gold[i].query_id, scheme);
            rows[i].ok = true;
        } catch (const std::exception&) {
            rows[i].ok = false;
            rows[i].bundle.query_id = gold[i].query_id;
        }
    };

    if (workers <= 1) {
        for (size_t i = 0; i < gold.size(); ++i) process(i);
    } else {
        std::atomic<size_t> next{0};
        auto worker = [&] {
            for (;;) {
                const size_t i = next.fetch_add(1);
                if (i >= gold.size()) return;
                process(i);
            }
        };
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    EvalReport report;
    report.count = gold.size();

    uint64_t router_correct = 0;
    uint64_t modality_correct = 0;
    std::map<int, uint64_t> recall_hits;
    for (size_t i = 0; i < gold.size(); ++i) {
        const auto& record = gold[i];
        auto& slot = report.per_pathway[pathway_format(record.gold_pathways, scheme)];
        slot.total += 1;
        if (!rows[i].ok) {
            report.errors += 1;
            continue;
        }
        const auto& bundle = rows[i].bundle;
        if (bundle.decision.pathways == record.gold_pathways) {
            ++router_correct;
            slot.router_correct += 1;
        }
        if (!record.gold_pathways.count(Pathway::make_none())) {
            report.modality_scored += 1;
            if (retrieved_modalities(bundle) == modality_set(record.gold_pathways))
                ++modality_correct;
        }
        if (!record.gold_item_ids.empty()) {
            report.recall_scored += 1;
            for (int k : ks)
                if (gold_hit_in_topk(bundle, record, k)) recall_hits[k] += 1;
        }
    }

    report.router_accuracy =
        static_cast<double>(router_correct) / static_cast<double>(report.count);
    report.modality_accuracy =
        report.modality_scored
            ? static_cast<double>(modality_correct) / static_cast<double>(report.modality_scored)
            : 0.0;
    for (int k : ks)
        report.recall_at[k] =
            report.recall_scored
                ? static_cast<double>(recall_hits[k]) / static_cast<double>(report.recall_scored)
                : 0.0;
    return report;
}

void EvalReport::write_csv(std::ostream& out) const {
    write_csv_row(out, {"metric", "value"});
    write_csv_row(out, {"router_accuracy", csv_num(router_accuracy)});
    write_csv_row(out, {"modality_accuracy", csv_num(modality_accuracy)});
    for (const auto& [k, v] : recall_at)
        write_csv_row(out, {"recall@" + std::to_string(k), csv_num(v)});
    write_csv_row(out, {"count", std::to_string(count)});
    write_csv_row(out, {"errors", std::to_string(errors)});
    for (const auto& [label, counts] : per_pathway)
        write_csv_row(out, {"pathway_total:" + label, std::to_string(counts.total)});
    for (const auto& [label, counts] : per_pathway)
        write_csv_row(out,
                      {"pathway_router_correct:" + label, std::to_string(counts.router_correct)});
}

void EvalReport::write_table(std::ostream& out) const {
    out << "router accuracy    " << csv_num(router_accuracy, 4) << '\n'
        << "modality accuracy  " << csv_num(modality_accuracy, 4) << '\n';
    for (const auto& [k, v] : recall_at)
        out << "recall@" << k << "           " << csv_num(v, 4) << '\n';
    out << "queries            " << count << " (" << errors << " errors)\n";
    out << "per gold pathway set:\n";
    for (const auto& [label, counts] : per_pathway)
        out << "  " << label << ": " << counts.router_correct << "/" << counts.total
            << " routed exactly\n";
}

}  // namespace corpus_router
