#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "kgex/lexicon.hpp"
#include "kgex/model_client.hpp"
#include "kgex/prompt.hpp"
#include "kgex/triple_set.hpp"
#include "kgex/word_vectors.hpp"

namespace kgex {

struct ExtensionOptions {
    std::vector<RelationId> relations;  // relations to complete per subject
    double tau = 0.4;                   // phrase similarity acceptance threshold
    std::string language = "en";        // description language fed to the text model
    // Relations whose text-model candidates must pass the yes/no image check.
    std::vector<RelationId> visual_relations;
    std::size_t max_tokens = 256;
    std::size_t threads = 1;
    std::size_t max_subjects = 0;  // 0 keeps every subject
    PromptTemplate triple_prompt = PromptTemplate::triple_defaults();
    PromptTemplate verify_prompt = PromptTemplate::verify_defaults();
};

// One audit row per candidate phrase, plus one row per skipped query side
// (missing description or image) and per double parse failure. status is one
// of: accepted, duplicate-of-kg, duplicate-cross-model,
// rejected-by-image-check, parse-failed, skipped. nearest holds the closest
// KG tail IRI, the winning text phrase for cross-model duplicates, or the
// skip reason.
struct CandidateRecord {
    EntityId subject = 0;
    RelationId relation = 0;
    std::string surface;
    std::string source;  // "text" or "vision"
    std::string nearest;
    double similarity = 0.0;
    std::string status;
};

struct AcceptedCandidate {
    EntityId subject = 0;
    RelationId relation = 0;
    std::string phrase;
    std::string source;  // "text" or "vision"
};

struct ExtensionStats {
    std::uint64_t subjects = 0;
    std::uint64_t queries = 0;
    std::uint64_t raw_tail_count = 0;  // distinct pre-existing tails of the target relations
    std::uint64_t raw_candidates = 0;  // phrases the models produced
    std::uint64_t duplicates_kg = 0;
    std::uint64_t duplicates_cross = 0;
    std::uint64_t rejected_image = 0;
    std::uint64_t accepted = 0;
    std::uint64_t parse_failures = 0;
    std::uint64_t skipped_queries = 0;  // sides skipped for missing context

    // Every raw candidate ends in exactly one terminal bucket.
    bool telescopes() const {
        return raw_candidates == duplicates_kg + duplicates_cross + rejected_image + accepted;
    }
};

struct ExtensionResult {
    std::vector<CandidateRecord> audit;  // subject id order, stable across thread counts
    std::vector<AcceptedCandidate> accepted;
    ExtensionStats stats;
};

// Open-world completion. For every subject (head entity) and target relation
// the text model is prompted with the subject's description and the vision
// model with its image; replies are parsed as JSON arrays with one strict
// re-query. Candidates are matched against the labels of existing tails of
// the target relation (similarity >= tau marks duplicate-of-kg, the nearest
// tail is always recorded), deduplicated across the two models (text wins),
// and text candidates of visually checkable relations face a yes/no image
// check (unparseable verdicts are re-queried once, then rejected). Subjects
// run on a bounded thread pool; outputs are ordered by subject id so the
// thread count never changes the result.
ExtensionResult run_extension(const TripleSet& kg, const Lexicon& lexicon,
                              const WordVectors& vectors, ModelClient& text_model,
                              ModelClient* vision_model, const ExtensionOptions& options);

struct MergeResult {
    TripleSet merged;
    std::vector<std::pair<std::string, std::string>> new_entities;  // iri, phrase
    std::uint64_t new_triples = 0;
};

// Fresh entities are minted under this namespace so generated nodes stay
// distinguishable from dataset IRIs.
inline constexpr std::string_view kGeneratedNamespace = "urn:kgex:gen/";

// Adds one freshly minted entity and one triple per accepted candidate. The
// minted IRI records the run id and source model, so entity and triple
// counts both grow by exactly accepted.size() and relations are untouched.
MergeResult merge_extension(const TripleSet& kg, std::span<const AcceptedCandidate> accepted,
                            const std::string& run_id = "run0");

// subject,relation,surface,source,nearest,similarity,status
void write_audit_csv(std::ostream& out, const TripleSet& kg,
                     std::span<const CandidateRecord> records);

// Counts per pipeline stage plus ratios against the pre-existing tail pool.
void write_extension_stats(std::ostream& out, const ExtensionStats& stats,
                           const TripleSet& before, const TripleSet& after);

}  // namespace kgex
