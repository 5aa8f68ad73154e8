#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "kgex/triple_set.hpp"

namespace kgex {

// Sidecar files next to a triple dataset: short names, per-language long
// descriptions, and an image directory keyed by flattened entity IRIs.
struct LexiconPaths {
    std::optional<std::filesystem::path> entity_labels;    // two-column id,text
    std::optional<std::filesystem::path> relation_labels;  // two-column id,text
    std::map<std::string, std::filesystem::path> descriptions;  // lang -> csv
    std::optional<std::filesystem::path> image_dir;
};

class Lexicon {
public:
    std::optional<std::string_view> entity_label(EntityId id) const;
    std::optional<std::string_view> relation_label(RelationId id) const;
    std::optional<std::string_view> description(EntityId id, const std::string& lang) const;
    std::optional<std::string_view> image_path(EntityId id) const;

    void set_entity_label(EntityId id, std::string label);
    void set_relation_label(RelationId id, std::string label);
    void set_description(EntityId id, const std::string& lang, std::string text);
    void set_image_path(EntityId id, std::string path);

    // Keys present in sidecar files but absent from the triple set.
    const std::vector<std::string>& orphan_warnings() const { return orphans_; }
    void add_orphan(std::string message) { orphans_.push_back(std::move(message)); }

    std::size_t labeled_entity_count() const { return entity_labels_.size(); }
    std::size_t image_count() const { return image_paths_.size(); }
    std::size_t description_count(const std::string& lang) const;
    // Entities with both a description in `lang` and an image.
    std::size_t multimodal_count(const std::string& lang) const;

    // Display helper: label when present, IRI local name otherwise.
    std::string entity_display(const TripleSet& set, EntityId id) const;
    std::string relation_display(const TripleSet& set, RelationId id) const;

private:
    std::unordered_map<EntityId, std::string> entity_labels_;
    std::unordered_map<RelationId, std::string> relation_labels_;
    std::map<std::string, std::unordered_map<EntityId, std::string>> descriptions_;
    std::unordered_map<EntityId, std::string> image_paths_;
    std::vector<std::string> orphans_;
};

Lexicon load_lexicon(const TripleSet& set, const LexiconPaths& paths);

// Image naming rule from the dataset distribution: IRI with all
// non-alphanumeric characters removed, extension .jpg.
std::string image_file_name(std::string_view entity_iri);

}  // namespace kgex
