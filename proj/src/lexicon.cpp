#include "kgex/lexicon.hpp"

#include <unordered_set>

#include "kgex/strings.hpp"

namespace kgex {

std::optional<std::string_view> Lexicon::entity_label(EntityId id) const {
    auto it = entity_labels_.find(id);
    if (it == entity_labels_.end()) return std::nullopt;
    return std::string_view(it->second);
}

std::optional<std::string_view> Lexicon::relation_label(RelationId id) const {
    auto it = relation_labels_.find(id);
    if (it == relation_labels_.end()) return std::nullopt;
    return std::string_view(it->second);
}

std::optional<std::string_view> Lexicon::description(EntityId id, const std::string& lang) const {
    auto lit = descriptions_.find(lang);
    if (lit == descriptions_.end()) return std::nullopt;
    auto it = lit->second.find(id);
    if (it == lit->second.end()) return std::nullopt;
    return std::string_view(it->second);
}

std::optional<std::string_view> Lexicon::image_path(EntityId id) const {
    auto it = image_paths_.find(id);
    if (it == image_paths_.end()) return std::nullopt;
    return std::string_view(it->second);
}

void Lexicon::set_entity_label(EntityId id, std::string label) {
    entity_labels_[id] = std::move(label);
}
void Lexicon::set_relation_label(RelationId id, std::string label) {
    relation_labels_[id] = std::move(label);
}
void Lexicon::set_description(EntityId id, const std::string& lang, std::string text) {
    descriptions_[lang][id] = std::move(text);
}
void Lexicon::set_image_path(EntityId id, std::string path) {
    image_paths_[id] = std::move(path);
}

std::size_t Lexicon::description_count(const std::string& lang) const {
    auto it = descriptions_.find(lang);
    return it == descriptions_.end() ? 0 : it->second.size();
}

std::size_t Lexicon::multimodal_count(const std::string& lang) const {
    auto it = descriptions_.find(lang);
    if (it == descriptions_.end()) return 0;
    std::size_t n = 0;
    for (const auto& [id, _] : it->second)
        if (image_paths_.count(id)) ++n;
    return n;
}

std::string Lexicon::entity_display(const TripleSet& set, EntityId id) const {
    auto label = entity_label(id);
    if (label) return std::string(*label);
    return iri_local_name(set.entity_iri(id));
}

std::string Lexicon::relation_display(const TripleSet& set, RelationId id) const {
    auto label = relation_label(id);
    if (label) return std::string(*label);
    return iri_local_name(set.relation_iri(id));
}

std::string image_file_name(std::string_view entity_iri) {
    return flatten_iri(entity_iri) + ".jpg";
}

Lexicon load_lexicon(const TripleSet& set, const LexiconPaths& paths) {
    Lexicon lex;

    if (paths.entity_labels) {
        for (auto& [key, text] : read_two_column_file(*paths.entity_labels)) {
            auto id = set.find_entity(key);
            if (!id) {
                lex.add_orphan("entity label key not in triple set: " + key);
                continue;
            }
            lex.set_entity_label(*id, text);
        }
    }
    if (paths.relation_labels) {
        for (auto& [key, text] : read_two_column_file(*paths.relation_labels)) {
            auto id = set.find_relation(key);
            if (!id) {
                lex.add_orphan("relation label key not in triple set: " + key);
                continue;
            }
            lex.set_relation_label(*id, text);
        }
    }
    for (const auto& [lang, path] : paths.descriptions) {
        for (auto& [key, text] : read_two_column_file(path)) {
            auto id = set.find_entity(key);
            if (!id) {
                lex.add_orphan("description key not in triple set (" + lang + "): " + key);
                continue;
            }
            lex.set_description(*id, lang, text);
        }
    }
    if (paths.image_dir) {
        std::unordered_set<std::string> files;
        if (std::filesystem::is_directory(*paths.image_dir)) {
            for (const auto& entry : std::filesystem::directory_iterator(*paths.image_dir))
                if (entry.is_regular_file()) files.insert(entry.path().filename().string());
        }
        for (EntityId id = 0; id < set.entity_count(); ++id) {
            std::string name = image_file_name(set.entity_iri(id));
            if (files.count(name))
                lex.set_image_path(id, (*paths.image_dir / name).string());
        }
    }
    return lex;
}

}  // namespace kgex
