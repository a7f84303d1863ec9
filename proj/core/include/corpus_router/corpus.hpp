#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "corpus_router/pathway.hpp"

namespace corpus_router {

/// One embedded knowledge entry. primary_vec carries the modality-native
/// embedding; aux_text_vec optionally carries a caption/script embedding
/// used for score fusion on visual corpora.
struct CorpusItem {
    std::string id;
    std::vector<float> primary_vec;
    std::optional<std::vector<float>> aux_text_vec;
    nlohmann::json payload = nlohmann::json::object();
};

/// On-disk description of one corpus. count must equal both the vector-file
/// record count and the payload line count.
struct CorpusManifest {
    std::string name;
    Pathway pathway;
    uint32_t dim = 0;
    std::optional<uint32_t> aux_dim;
    uint64_t count = 0;
    std::string vector_file;
    std::optional<std::string> aux_vector_file;
    std::string payload_file;

    nlohmann::json to_json(const GranularityScheme& scheme) const;
    static CorpusManifest from_json(const nlohmann::json& j,
                                    const GranularityScheme& scheme);
};

/// Immutable in-memory corpus. Vectors are stored row-major and are
/// unit-L2-normalized at ingestion, so cosine similarity against a
/// normalized query reduces to an inner product. Safe for concurrent reads.
class Corpus {
public:
    Corpus(std::string name, Pathway pathway, uint32_t dim,
           std::optional<uint32_t> aux_dim, std::vector<float> vectors,
           std::vector<float> aux_vectors, std::vector<std::string> ids,
           std::vector<std::string> payload_lines);

    const std::string& name() const { return name_; }
    Pathway pathway() const { return pathway_; }
    uint32_t dim() const { return dim_; }
    std::optional<uint32_t> aux_dim() const { return aux_dim_; }
    uint64_t size() const { return ids_.size(); }

    const std::string& id(uint64_t i) const { return ids_[i]; }
    std::span<const float> primary(uint64_t i) const {
        return {vectors_.data() + i * dim_, dim_};
    }
    std::span<const float> aux(uint64_t i) const {
        return aux_dim_ ? std::span<const float>{aux_vectors_.data() + i * *aux_dim_, *aux_dim_}
                        : std::span<const float>{};
    }
    /// Raw payload line; parse_payload decodes it on demand.
    const std::string& payload_line(uint64_t i) const { return payload_lines_[i]; }
    nlohmann::json parse_payload(uint64_t i) const;

    /// Index of the item with the given id, if present. The lookup table is
    /// built once on first use.
    std::optional<uint64_t> find(const std::string& id) const;

    /// Number of full scans performed against this corpus; diagnostic only.
    uint64_t scan_count() const { return scans_.load(std::memory_order_relaxed); }
    void note_scan() const { scans_.fetch_add(1, std::memory_order_relaxed); }

private:
    std::string name_;
    Pathway pathway_;
    uint32_t dim_;
    std::optional<uint32_t> aux_dim_;
    std::vector<float> vectors_;
    std::vector<float> aux_vectors_;
    std::vector<std::string> ids_;
    std::vector<std::string> payload_lines_;
    mutable std::atomic<uint64_t> scans_{0};
    mutable std::once_flag index_once_;
    mutable std::unordered_map<std::string, uint64_t> id_index_;
};

/// Builds a corpus on disk: writes the vector file(s), the payload JSON
/// Lines file, and the manifest; returns the manifest. Vectors are
/// re-normalized on write. Single-writer; the corpus is not readable
/// mid-build.
///
/// Errors: empty item list, mixed dimensions, duplicate ids, unwritable
/// paths, aux vectors present on only part of the items.
CorpusManifest build_corpus(const std::vector<CorpusItem>& items, Pathway pathway,
                            const std::filesystem::path& out_dir,
                            const GranularityScheme& scheme,
                            const std::string& name = "");

/// Loads a corpus from its manifest, validating magic bytes, dimensions and
/// counts against the manifest.
std::shared_ptr<Corpus> load_corpus(const std::filesystem::path& manifest_path,
                                    const GranularityScheme& scheme);

/// Builds an in-memory corpus without touching the filesystem. Used by the
/// simulation lab and tests; applies the same validation and normalization
/// as build_corpus.
std::shared_ptr<Corpus> make_corpus(const std::vector<CorpusItem>& items,
                                    Pathway pathway, const std::string& name);

}  // namespace corpus_router
