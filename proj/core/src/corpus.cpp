#include "corpus_router/corpus.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <unordered_set>

#include "corpus_router/hash_embed.hpp"
#include "corpus_router/vector_file.hpp"

namespace corpus_router {

namespace {

// Validates the item list and returns (dim, aux_dim). Aux vectors are
// all-or-nothing across the corpus so the aux file stays dense.
std::pair<uint32_t, std::optional<uint32_t>> check_items(
    const std::vector<CorpusItem>& items) {
    if (items.empty()) throw std::invalid_argument("empty corpus");

    const uint32_t dim = static_cast<uint32_t>(items.front().primary_vec.size());
    if (dim == 0) throw std::invalid_argument("zero-dimensional vectors");
    std::optional<uint32_t> aux_dim;
    if (items.front().aux_text_vec)
        aux_dim = static_cast<uint32_t>(items.front().aux_text_vec->size());

    std::unordered_set<std::string> seen;
    seen.reserve(items.size());
    for (const auto& item : items) {
        if (item.primary_vec.size() != dim)
            throw std::invalid_argument("dimension mismatch for item '" + item.id + "'");
        if (item.aux_text_vec.has_value() != aux_dim.has_value())
            throw std::invalid_argument(
                "aux vectors must be present on all items or none (item '" + item.id +
                "')");
        if (aux_dim && item.aux_text_vec->size() != *aux_dim)
            throw std::invalid_argument("aux dimension mismatch for item '" + item.id +
                                        "'");
        if (!seen.insert(item.id).second)
            throw std::invalid_argument("duplicate id '" + item.id + "'");
    }
    return {dim, aux_dim};
}

std::vector<float> gather_normalized(const std::vector<CorpusItem>& items, bool aux) {
    std::vector<float> flat;
    const size_t dim = aux ? items.front().aux_text_vec->size()
                           : items.front().primary_vec.size();
    flat.reserve(items.size() * dim);
    for (const auto& item : items) {
        std::vector<float> v = aux ? *item.aux_text_vec : item.primary_vec;
        l2_normalize(v);
        flat.insert(flat.end(), v.begin(), v.end());
    }
    return flat;
}

std::string payload_line_for(const CorpusItem& item) {
    nlohmann::json j = item.payload.is_object() ? item.payload : nlohmann::json::object();
    j["id"] = item.id;
    return j.dump();
}

}  // namespace

nlohmann::json CorpusManifest::to_json(const GranularityScheme& scheme) const {
    nlohmann::json j{
        {"name", name},
        {"pathway", scheme.label(pathway)},
        {"dim", dim},
        {"count", count},
        {"vector_file", vector_file},
        {"payload_file", payload_file},
    };
    if (aux_dim) j["aux_dim"] = *aux_dim;
    if (aux_vector_file) j["aux_vector_file"] = *aux_vector_file;
    return j;
}

CorpusManifest CorpusManifest::from_json(const nlohmann::json& j,
                                         const GranularityScheme& scheme) {
    CorpusManifest m;
    m.name = j.at("name").get<std::string>();
    m.pathway = scheme.parse_label(j.at("pathway").get<std::string>());
    m.dim = j.at("dim").get<uint32_t>();
    m.count = j.at("count").get<uint64_t>();
    m.vector_file = j.at("vector_file").get<std::string>();
    m.payload_file = j.at("payload_file").get<std::string>();
    if (j.contains("aux_dim")) m.aux_dim = j.at("aux_dim").get<uint32_t>();
    if (j.contains("aux_vector_file"))
        m.aux_vector_file = j.at("aux_vector_file").get<std::string>();
    return m;
}

Corpus::Corpus(std::string name, Pathway pathway, uint32_t dim,
               std::optional<uint32_t> aux_dim, std::vector<float> vectors,
               std::vector<float> aux_vectors, std::vector<std::string> ids,
               std::vector<std::string> payload_lines)
    : name_(std::move(name)),
      pathway_(pathway),
      dim_(dim),
      aux_dim_(aux_dim),
      vectors_(std::move(vectors)),
      aux_vectors_(std::move(aux_vectors)),
      ids_(std::move(ids)),
      payload_lines_(std::move(payload_lines)) {
    if (pathway_.is_none()) throw std::invalid_argument("corpus pathway cannot be none");
    if (vectors_.size() != ids_.size() * dim_)
        throw std::invalid_argument("vector storage does not match item count");
    if (aux_dim_ && aux_vectors_.size() != ids_.size() * *aux_dim_)
        throw std::invalid_argument("aux storage does not match item count");
    if (payload_lines_.size() != ids_.size())
        throw std::invalid_argument("payload count does not match item count");
}

nlohmann::json Corpus::parse_payload(uint64_t i) const {
    return nlohmann::json::parse(payload_lines_[i]);
}

std::optional<uint64_t> Corpus::find(const std::string& id) const {
    std::call_once(index_once_, [this] {
        id_index_.reserve(ids_.size());
        for (uint64_t i = 0; i < ids_.size(); ++i) id_index_.emplace(ids_[i], i);
    });
    const auto it = id_index_.find(id);
    if (it == id_index_.end()) return std::nullopt;
    return it->second;
}

CorpusManifest build_corpus(const std::vector<CorpusItem>& items, Pathway pathway,
                            const std::filesystem::path& out_dir,
                            const GranularityScheme& scheme, const std::string& name) {
    if (pathway.is_none()) throw std::invalid_argument("cannot build a corpus for none");
    const auto [dim, aux_dim] = check_items(items);

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw std::runtime_error("cannot create output dir: " + out_dir.string());

    CorpusManifest m;
    m.name = name.empty() ? scheme.label(pathway) : name;
    m.pathway = pathway;
    m.dim = dim;
    m.aux_dim = aux_dim;
    m.count = items.size();
    m.vector_file = m.name + ".vec";
    m.payload_file = m.name + ".payload.jsonl";
    if (aux_dim) m.aux_vector_file = m.name + ".aux.vec";

    VectorMatrix primary{dim, items.size(), gather_normalized(items, false)};
    write_vector_file(out_dir / m.vector_file, primary);
    if (aux_dim) {
        VectorMatrix auxm{*aux_dim, items.size(), gather_normalized(items, true)};
        write_vector_file(out_dir / *m.aux_vector_file, auxm);
    }

    std::ofstream payload_out(out_dir / m.payload_file, std::ios::binary | std::ios::trunc);
    if (!payload_out)
        throw std::runtime_error("cannot write payload file in " + out_dir.string());
    for (const auto& item : items) payload_out << payload_line_for(item) << '\n';
    payload_out.flush();
    if (!payload_out) throw std::runtime_error("payload write failed");

    std::ofstream manifest_out(out_dir / (m.name + ".manifest.json"),
                               std::ios::binary | std::ios::trunc);
    if (!manifest_out)
        throw std::runtime_error("cannot write manifest in " + out_dir.string());
    manifest_out << m.to_json(scheme).dump(2) << '\n';
    manifest_out.flush();
    if (!manifest_out) throw std::runtime_error("manifest write failed");
    return m;
}

std::shared_ptr<Corpus> load_corpus(const std::filesystem::path& manifest_path,
                                    const GranularityScheme& scheme) {
    std::ifstream manifest_in(manifest_path);
    if (!manifest_in)
        throw std::runtime_error("cannot open manifest: " + manifest_path.string());
    const auto m = CorpusManifest::from_json(nlohmann::json::parse(manifest_in), scheme);
    const auto dir = manifest_path.parent_path();

    VectorMatrix primary = read_vector_file(dir / m.vector_file);
    if (primary.dim != m.dim)
        throw std::runtime_error("corpus '" + m.name + "': dim mismatch");
    if (primary.count != m.count)
        throw std::runtime_error("corpus '" + m.name + "': count mismatch");

    VectorMatrix auxm;
    if (m.aux_vector_file) {
        auxm = read_vector_file(dir / *m.aux_vector_file);
        if (!m.aux_dim || auxm.dim != *m.aux_dim || auxm.count != m.count)
            throw std::runtime_error("corpus '" + m.name + "': aux count mismatch");
    }

    std::ifstream payload_in(dir / m.payload_file, std::ios::binary);
    if (!payload_in)
        throw std::runtime_error("cannot open payload file for '" + m.name + "'");
    std::vector<std::string> lines;
    std::vector<std::string> ids;
    lines.reserve(m.count);
    ids.reserve(m.count);
    std::string line;
    while (std::getline(payload_in, line)) {
        if (line.empty()) continue;
        const auto j = nlohmann::json::parse(line);
        ids.push_back(j.at("id").get<std::string>());
        lines.push_back(std::move(line));
    }
    if (lines.size() != m.count)
        throw std::runtime_error("corpus '" + m.name + "': count mismatch");

    return std::make_shared<Corpus>(m.name, m.pathway, m.dim, m.aux_dim,
                                    std::move(primary.data), std::move(auxm.data),
                                    std::move(ids), std::move(lines));
}

std::shared_ptr<Corpus> make_corpus(const std::vector<CorpusItem>& items,
                                    Pathway pathway, const std::string& name) {
    if (pathway.is_none()) throw std::invalid_argument("cannot build a corpus for none");
    const auto [dim, aux_dim] = check_items(items);
    std::vector<std::string> ids, lines;
    ids.reserve(items.size());
    lines.reserve(items.size());
    for (const auto& item : items) {
        ids.push_back(item.id);
        lines.push_back(payload_line_for(item));
    }
    return std::make_shared<Corpus>(
        name, pathway, dim, aux_dim, gather_normalized(items, false),
        aux_dim ? gather_normalized(items, true) : std::vector<float>{}, std::move(ids),
        std::move(lines));
}

}  // namespace corpus_router
