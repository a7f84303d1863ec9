#include "corpus_router/routing.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <stdexcept>

#include <json.hpp>

#include "corpus_router/hash_embed.hpp"
#include "corpus_router/prompts.hpp"
#include "corpus_router/service_client.hpp"
#include "corpus_router/vector_file.hpp"

namespace corpus_router {

namespace {

constexpr char kModelMagic[8] = {'U', 'R', 'A', 'G', 'R', 'T', 'R', '1'};

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Queries too short to produce a 3-gram map to the zero feature vector so
// that routing stays total. A bad feature dimension still throws.
std::vector<float> features_or_zero(const std::string& query, int dim, uint64_t seed) {
    if (dim < 8) throw std::invalid_argument("router feature dim must be >= 8");
    if (query.size() < 3) return std::vector<float>(static_cast<size_t>(dim), 0.0f);
    try {
        return hash_embed_f32(query, dim, seed);
    } catch (const std::invalid_argument&) {
        // fully cancelled gram signs leave a zero vector
        return std::vector<float>(static_cast<size_t>(dim), 0.0f);
    }
}

// Applies the NONE-exclusivity rule to a selected set with scores: NONE
// wins outright only when its score is the maximum of the selection.
void enforce_none_exclusive(PathwaySet& selected,
                            const std::map<Pathway, double>& scores) {
    const Pathway none = Pathway::make_none();
    if (selected.size() <= 1 || !selected.count(none)) return;
    double none_score = scores.at(none);
    bool none_is_max = true;
    for (const auto& p : selected)
        if (!(p == none) && scores.at(p) > none_score) none_is_max = false;
    if (none_is_max)
        selected = {none};
    else
        selected.erase(none);
}

}  // namespace

std::string_view router_source_name(RouterSource s) {
    switch (s) {
        case RouterSource::trained: return "trained";
        case RouterSource::prompt: return "prompt";
        case RouterSource::random: return "random";
        case RouterSource::ensemble_confidence: return "ensemble_confidence";
        case RouterSource::ensemble_majority: return "ensemble_majority";
    }
    throw std::logic_error("invalid router source");
}

std::vector<double> TrainedRouterModel::scores(const std::string& query) const {
    const auto x = features_or_zero(query, dim, seed);
    std::vector<double> out(labels.size());
    for (size_t l = 0; l < labels.size(); ++l) {
        const double* w = weights.data() + l * static_cast<size_t>(dim);
        double z = bias[l];
        for (int d = 0; d < dim; ++d) z += w[d] * x[static_cast<size_t>(d)];
        out[l] = sigmoid(z);
    }
    return out;
}

void TrainedRouterModel::save(const std::filesystem::path& path,
                              const GranularityScheme& scheme) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open model file for write: " + path.string());
    out.write(kModelMagic, sizeof(kModelMagic));

    nlohmann::json header{{"dim", dim},
                          {"seed", seed},
                          {"threshold", threshold},
                          {"bias", bias}};
    auto& names = header["labels"] = nlohmann::json::array();
    for (const auto& p : labels) names.push_back(scheme.label(p));
    const std::string header_str = header.dump();
    const uint32_t header_len = static_cast<uint32_t>(header_str.size());
    out.write(reinterpret_cast<const char*>(&header_len), sizeof(header_len));
    out.write(header_str.data(), header_len);

    VectorMatrix m{static_cast<uint32_t>(dim), labels.size(), {}};
    m.data.assign(weights.begin(), weights.end());
    write_vector_block(out, m);
    out.flush();
    if (!out) throw std::runtime_error("model write failed");
}

TrainedRouterModel TrainedRouterModel::load(const std::filesystem::path& path,
                                            const GranularityScheme& scheme) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open model file: " + path.string());
    char magic[8];
    in.read(magic, sizeof(magic));
    if (in.gcount() != sizeof(magic) || std::memcmp(magic, kModelMagic, sizeof(magic)) != 0)
        throw std::runtime_error("model file: magic mismatch");
    uint32_t header_len = 0;
    in.read(reinterpret_cast<char*>(&header_len), sizeof(header_len));
    std::string header_str(header_len, '\0');
    in.read(header_str.data(), header_len);
    if (!in) throw std::runtime_error("model file: truncated header");
    const auto header = nlohmann::json::parse(header_str);

    TrainedRouterModel model;
    model.dim = header.at("dim").get<int>();
    model.seed = header.at("seed").get<uint64_t>();
    model.threshold = header.at("threshold").get<double>();
    model.bias = header.at("bias").get<std::vector<double>>();
    for (const auto& name : header.at("labels"))
        model.labels.push_back(scheme.parse_label(name.get<std::string>()));

    if (model.threshold <= 0.0 || model.threshold >= 1.0)
        throw std::runtime_error("model file: threshold outside (0, 1)");
    // the label list must cover the active scheme exactly once each
    auto sorted = model.labels;
    std::sort(sorted.begin(), sorted.end());
    if (sorted != scheme.universe())
        throw std::runtime_error("model file: labels do not cover the scheme");

    const VectorMatrix m = read_vector_block(in);
    if (m.dim != static_cast<uint32_t>(model.dim) || m.count != model.labels.size())
        throw std::runtime_error("model file: weight matrix shape mismatch");
    model.weights.assign(m.data.begin(), m.data.end());
    if (model.bias.size() != model.labels.size())
        throw std::runtime_error("model file: bias length mismatch");
    return model;
}

TrainedRouterModel train_router(const std::vector<RoutingExample>& dataset,
                                const RouterTrainingConfig& config,
                                const GranularityScheme& scheme,
                                std::vector<double>* loss_history) {
    if (dataset.empty()) throw std::invalid_argument("train_router: empty dataset");
    if (config.epochs < 1) throw std::invalid_argument("train_router: epochs must be >= 1");
    if (config.learning_rate <= 0.0)
        throw std::invalid_argument("train_router: learning rate must be > 0");

    const auto& universe = scheme.universe();
    const size_t num_labels = universe.size();
    for (const auto& ex : dataset)
        for (const auto& p : ex.labels)
            if (!scheme.contains(p))
                throw std::invalid_argument("train_router: label outside scheme for query '" +
                                            ex.query + "'");

    // Features and multi-hot targets are fixed across epochs.
    const size_t n = dataset.size();
    const size_t dim = static_cast<size_t>(config.dim);
    std::vector<std::vector<float>> features;
    features.reserve(n);
    std::vector<std::vector<uint8_t>> targets(n, std::vector<uint8_t>(num_labels, 0));
    for (size_t i = 0; i < n; ++i) {
        features.push_back(features_or_zero(dataset[i].query, config.dim, config.seed));
        for (size_t l = 0; l < num_labels; ++l)
            if (dataset[i].labels.count(universe[l])) targets[i][l] = 1;
    }

    TrainedRouterModel model;
    model.dim = config.dim;
    model.seed = config.seed;
    model.labels = universe;
    model.weights.assign(num_labels * dim, 0.0);
    model.bias.assign(num_labels, 0.0);

    std::vector<double> grad_w(num_labels * dim);
    std::vector<double> grad_b(num_labels);
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::fill(grad_w.begin(), grad_w.end(), 0.0);
        std::fill(grad_b.begin(), grad_b.end(), 0.0);
        double loss = 0.0;
        for (size_t i = 0; i < n; ++i) {
            const auto& x = features[i];
            for (size_t l = 0; l < num_labels; ++l) {
                const double* w = model.weights.data() + l * dim;
                double z = model.bias[l];
                for (size_t d = 0; d < dim; ++d) z += w[d] * x[d];
                const double p = sigmoid(z);
                const double y = targets[i][l];
                // numerically safe BCE via the logit form
                loss += std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
                const double g = p - y;
                double* gw = grad_w.data() + l * dim;
                for (size_t d = 0; d < dim; ++d) gw[d] += g * x[d];
                grad_b[l] += g;
            }
        }
        const double scale = config.learning_rate / static_cast<double>(n);
        for (size_t j = 0; j < model.weights.size(); ++j) model.weights[j] -= scale * grad_w[j];
        for (size_t l = 0; l < num_labels; ++l) model.bias[l] -= scale * grad_b[l];
        if (loss_history)
            loss_history->push_back(loss / (static_cast<double>(n) * num_labels));
    }
    return model;
}

RoutingDecision route_trained(const TrainedRouterModel& model, const std::string& query) {
    const auto s = model.scores(query);
    RoutingDecision decision;
    decision.source = RouterSource::trained;
    for (size_t l = 0; l < model.labels.size(); ++l) decision.scores[model.labels[l]] = s[l];

    for (size_t l = 0; l < model.labels.size(); ++l)
        if (s[l] >= model.threshold) decision.pathways.insert(model.labels[l]);

    if (decision.pathways.empty()) {
        // fallback: argmax label, ties resolved in canonical label order
        size_t best = 0;
        for (size_t l = 1; l < s.size(); ++l)
            if (s[l] > s[best]) best = l;
        decision.pathways.insert(model.labels[best]);
    }
    enforce_none_exclusive(decision.pathways, decision.scores);
    return decision;
}

RoutingDecision route_prompt(ServiceClient& client, const std::string& query,
                             const GranularityScheme& scheme) {
    const std::string prompt = render_route_prompt(scheme, query);
    const nlohmann::json request{{"op", "route"}, {"prompt", prompt}, {"query", query}};

    std::string last_error;
    for (int attempt = 0; attempt < 2; ++attempt) {
        const std::string reply = client.request_line(request.dump());
        try {
            const auto j = nlohmann::json::parse(reply);
            const std::string label = j.at("label").get<std::string>();
            RoutingDecision decision;
            decision.source = RouterSource::prompt;
            decision.pathways = pathway_parse(label, scheme);
            for (const auto& p : decision.pathways) decision.scores[p] = 1.0;
            return decision;
        } catch (const std::exception& e) {
            last_error = e.what();
        }
    }
    throw std::runtime_error("route_prompt: unparseable router reply: " + last_error);
}

RoutingDecision route_random(const GranularityScheme& scheme, uint64_t rng_seed) {
    const auto& universe = scheme.universe();
    std::mt19937_64 rng(rng_seed);
    std::uniform_int_distribution<size_t> pick(0, universe.size() - 1);
    const Pathway chosen = universe[pick(rng)];
    RoutingDecision decision;
    decision.source = RouterSource::random;
    decision.pathways = {chosen};
    decision.scores[chosen] = 1.0 / static_cast<double>(universe.size());
    return decision;
}

RoutingDecision route_ensemble_confidence(const RoutingDecision& trained_decision,
                                          const RoutingDecision& fallback,
                                          double conf_threshold) {
    if (trained_decision.source != RouterSource::trained)
        throw std::invalid_argument("confidence ensemble expects a trained decision first");
    double confidence = 0.0;
    for (const auto& p : trained_decision.pathways)
        confidence = std::max(confidence, trained_decision.scores.at(p));
    RoutingDecision out = confidence >= conf_threshold ? trained_decision : fallback;
    out.source = RouterSource::ensemble_confidence;
    return out;
}

RoutingDecision route_ensemble_majority(const std::vector<RoutingDecision>& decisions,
                                        uint64_t rng_seed) {
    if (decisions.size() != 3)
        throw std::invalid_argument("majority ensemble expects exactly 3 decisions");

    std::map<Pathway, int> votes;
    for (const auto& d : decisions)
        for (const auto& p : d.pathways) votes[p] += 1;

    RoutingDecision out;
    out.source = RouterSource::ensemble_majority;
    for (const auto& [p, v] : votes)
        if (v >= 2) {
            out.pathways.insert(p);
            out.scores[p] = v / 3.0;
        }

    if (out.pathways.empty()) {
        // order the candidates canonically so the seeded draw does not
        // depend on input order
        std::vector<PathwaySet> candidates;
        for (const auto& d : decisions) candidates.push_back(d.pathways);
        std::sort(candidates.begin(), candidates.end());
        std::mt19937_64 rng(rng_seed);
        std::uniform_int_distribution<size_t> pick(0, 2);
        out.pathways = candidates[pick(rng)];
        for (const auto& p : out.pathways) out.scores[p] = 1.0 / 3.0;
    }
    enforce_none_exclusive(out.pathways, out.scores);
    return out;
}

}  // namespace corpus_router
