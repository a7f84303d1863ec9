#include "corpus_router/pathway.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace corpus_router {

namespace {

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

}  // namespace

std::string_view modality_name(Modality m) {
    switch (m) {
        case Modality::text: return "text";
        case Modality::table: return "table";
        case Modality::image: return "image";
        case Modality::video: return "video";
    }
    throw std::logic_error("invalid modality value");
}

Modality parse_modality(std::string_view name) {
    const std::string lower = to_lower(trim(name));
    if (lower == "text") return Modality::text;
    if (lower == "table") return Modality::table;
    if (lower == "image") return Modality::image;
    if (lower == "video") return Modality::video;
    throw std::invalid_argument("unknown modality: " + std::string(name));
}

GranularityScheme::GranularityScheme(SchemeKind kind, std::string name,
                                     std::vector<GranularityLevel> levels)
    : kind_(kind), name_(std::move(name)), levels_(std::move(levels)) {
    universe_.push_back(Pathway::make_none());
    labels_.push_back("none");
    for (const auto& lvl : levels_) {
        universe_.push_back(Pathway::target(lvl.modality, lvl.ordinal));
        labels_.push_back(lvl.label);
    }
    if (!std::is_sorted(universe_.begin(), universe_.end()))
        throw std::logic_error("scheme levels must be listed in canonical order");
}

const GranularityScheme& GranularityScheme::default_scheme() {
    static const GranularityScheme scheme(
        SchemeKind::default7, "default7",
        {
            {Modality::text, 1, "paragraph"},
            {Modality::text, 2, "document"},
            {Modality::table, 1, "table"},
            {Modality::image, 1, "image"},
            {Modality::video, 1, "clip"},
            {Modality::video, 2, "video"},
        });
    return scheme;
}

const GranularityScheme& GranularityScheme::extended_scheme() {
    static const GranularityScheme scheme(
        SchemeKind::extended, "extended",
        {
            {Modality::text, 1, "paragraph"},
            {Modality::text, 2, "passage"},
            {Modality::text, 3, "section"},
            {Modality::text, 4, "document"},
            {Modality::table, 1, "table"},
            {Modality::image, 1, "image"},
            {Modality::video, 1, "clip"},
            {Modality::video, 2, "sequence"},
            {Modality::video, 3, "segment"},
            {Modality::video, 4, "video"},
        });
    return scheme;
}

const GranularityScheme& GranularityScheme::by_kind(SchemeKind kind) {
    return kind == SchemeKind::extended ? extended_scheme() : default_scheme();
}

const GranularityScheme& GranularityScheme::by_name(std::string_view name) {
    const std::string lower = to_lower(trim(name));
    if (lower == "default7" || lower == "default") return default_scheme();
    if (lower == "extended") return extended_scheme();
    throw std::invalid_argument("unknown scheme: " + std::string(name));
}

std::vector<GranularityLevel> GranularityScheme::levels(Modality m) const {
    std::vector<GranularityLevel> out;
    for (const auto& lvl : levels_)
        if (lvl.modality == m) out.push_back(lvl);
    return out;
}

const std::string& GranularityScheme::label(const Pathway& p) const {
    for (size_t i = 0; i < universe_.size(); ++i)
        if (universe_[i] == p) return labels_[i];
    throw std::invalid_argument("pathway not in scheme");
}

bool GranularityScheme::contains(const Pathway& p) const {
    return std::find(universe_.begin(), universe_.end(), p) != universe_.end();
}

Pathway GranularityScheme::parse_label(std::string_view label) const {
    const std::string lower = to_lower(trim(label));
    if (lower.empty()) throw std::invalid_argument("empty pathway label");
    if (lower == "no" || lower == "none") return Pathway::make_none();
    for (size_t i = 0; i < labels_.size(); ++i)
        if (labels_[i] == lower) return universe_[i];
    throw std::invalid_argument("unknown label: " + std::string(label));
}

PathwaySet pathway_parse(std::string_view label, const GranularityScheme& scheme) {
    if (trim(label).empty()) throw std::invalid_argument("empty pathway label");
    PathwaySet out;
    size_t start = 0;
    while (start <= label.size()) {
        const size_t plus = label.find('+', start);
        const std::string_view piece =
            label.substr(start, plus == std::string_view::npos ? std::string_view::npos
                                                               : plus - start);
        out.insert(scheme.parse_label(piece));
        if (plus == std::string_view::npos) break;
        start = plus + 1;
    }
    if (out.size() > 1 && out.count(Pathway::make_none()))
        throw std::invalid_argument("none is exclusive");
    return out;
}

std::string pathway_format(const PathwaySet& set, const GranularityScheme& scheme) {
    if (set.empty()) throw std::invalid_argument("empty pathway set");
    std::string out;
    for (const auto& p : set) {
        if (!out.empty()) out += '+';
        out += scheme.label(p);
    }
    return out;
}

}  // namespace corpus_router
