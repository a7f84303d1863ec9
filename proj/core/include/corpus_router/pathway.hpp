#pragma once

#include <compare>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace corpus_router {

/// The four knowledge modalities. Parsing is case-insensitive; canonical
/// output is lowercase.
enum class Modality : uint8_t { text = 0, table = 1, image = 2, video = 3 };

std::string_view modality_name(Modality m);
Modality parse_modality(std::string_view name);

/// One granularity level inside a modality. Ordinals are contiguous from 1
/// within each modality; a higher ordinal means a coarser unit.
struct GranularityLevel {
    Modality modality;
    int ordinal = 1;
    std::string label;
};

/// A routing target: either the no-retrieval option or a
/// (modality, granularity-level) pair.
///
/// Canonical total order: none first, then (modality, ordinal) ascending.
/// Under the default scheme this yields
///   none < paragraph < document < table < image < clip < video.
struct Pathway {
    bool none = true;
    Modality modality = Modality::text;
    int level = 1;

    static Pathway make_none() { return Pathway{}; }
    static Pathway target(Modality m, int lvl) { return Pathway{false, m, lvl}; }

    bool is_none() const { return none; }

    friend auto operator<=>(const Pathway& a, const Pathway& b) {
        // none sorts before every target
        if (auto c = (a.none ? 0 : 1) <=> (b.none ? 0 : 1); c != 0) return c;
        if (a.none) return std::strong_ordering::equal;
        if (auto c = a.modality <=> b.modality; c != 0) return c;
        return a.level <=> b.level;
    }
    friend bool operator==(const Pathway&, const Pathway&) = default;
};

using PathwaySet = std::set<Pathway>;

enum class SchemeKind { default7, extended };

/// The active granularity scheme: which levels exist per modality, their
/// labels, and the resulting pathway universe (NONE plus all targets).
class GranularityScheme {
public:
    static const GranularityScheme& default_scheme();
    static const GranularityScheme& extended_scheme();
    static const GranularityScheme& by_kind(SchemeKind kind);
    static const GranularityScheme& by_name(std::string_view name);

    SchemeKind kind() const { return kind_; }
    std::string_view name() const { return name_; }

    /// All pathways in canonical order, NONE included.
    const std::vector<Pathway>& universe() const { return universe_; }

    /// Levels for one modality, ordinal-ascending.
    std::vector<GranularityLevel> levels(Modality m) const;

    /// Canonical lowercase label ("none", "paragraph", ...).
    const std::string& label(const Pathway& p) const;

    bool contains(const Pathway& p) const;

    /// Resolve a single label (case-insensitive). "no"/"none" map to NONE.
    /// Throws std::invalid_argument on unknown labels.
    Pathway parse_label(std::string_view label) const;

private:
    GranularityScheme(SchemeKind kind, std::string name,
                      std::vector<GranularityLevel> levels);

    SchemeKind kind_;
    std::string name_;
    std::vector<GranularityLevel> levels_;  // all modalities, canonical order
    std::vector<Pathway> universe_;
    std::vector<std::string> labels_;  // aligned with universe_
};

/// Parses a routing label such as "Paragraph+Image" into a pathway set.
/// Splits on '+', trims whitespace, matches case-insensitively, and treats
/// duplicates as one. "No"/"None" select the no-retrieval pathway and may
/// not be combined with any other label.
PathwaySet pathway_parse(std::string_view label, const GranularityScheme& scheme);

/// Formats a pathway set as canonical labels joined by '+', in canonical
/// order. The inverse of pathway_parse on canonical label sets.
std::string pathway_format(const PathwaySet& set, const GranularityScheme& scheme);

}  // namespace corpus_router
