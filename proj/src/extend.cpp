#include "kgex/extend.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "kgex/csv.hpp"
#include "kgex/error.hpp"
#include "kgex/strings.hpp"

namespace kgex {
namespace {

std::string normalize_phrase(std::string_view phrase) {
    std::string out;
    for (const std::string& token : tokenize(phrase)) {
        if (!out.empty()) out.push_back(' ');
        out += token;
    }
    return out;
}

struct TailEntry {
    EntityId id;
    std::string label;
    std::string normalized;
};

// Candidate phrase moving through the pipeline stages. status stays empty
// until a terminal decision is made.
struct Working {
    std::string surface;
    std::string normalized;
    std::string source;
    std::string status;
    std::string nearest;
    double similarity = 0.0;
};

struct SubjectOutput {
    std::vector<CandidateRecord> audit;
    std::vector<AcceptedCandidate> accepted;
    std::uint64_t queries = 0;
};

std::string read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return {};
    std::ostringstream bytes;
    bytes << in.rdbuf();
    return bytes.str();
}

class SubjectWorker {
public:
    SubjectWorker(const TripleSet& kg, const Lexicon& lexicon, const WordVectors& vectors,
                  ModelClient& text_model, ModelClient* vision_model,
                  const ExtensionOptions& options,
                  const std::unordered_map<RelationId, std::vector<TailEntry>>& tails)
        : kg_(kg),
          lexicon_(lexicon),
          vectors_(vectors),
          text_model_(text_model),
          vision_model_(vision_model),
          options_(options),
          tails_(tails) {}

    SubjectOutput run(EntityId subject) {
        SubjectOutput out;
        std::string subject_label = lexicon_.entity_display(kg_, subject);
        auto description = lexicon_.description(subject, options_.language);
        std::string image_b64;
        if (vision_model_ != nullptr) {
            if (auto path = lexicon_.image_path(subject))
                image_b64 = base64_encode(read_file_bytes(std::filesystem::path(*path)));
        }
        bool with_vision = vision_model_ != nullptr && !image_b64.empty();

        for (RelationId relation : options_.relations) {
            std::string relation_label = lexicon_.relation_display(kg_, relation);
            std::string base = slugify(subject_label) + "." + slugify(relation_label);

            std::vector<Working> cands;
            if (description && !trim(*description).empty()) {
                PromptContext context{subject_label, relation_label, std::string(*description)};
                query_phrases(text_model_, render_prompt(options_.triple_prompt, context), {},
                              base + ".text", "text", subject, relation, out, cands);
            } else {
                skip(subject, relation, "text", "missing description (" + options_.language + ")",
                     out);
            }
            if (with_vision) {
                PromptContext context{subject_label, relation_label, "the attached image"};
                query_phrases(*vision_model_, render_prompt(options_.triple_prompt, context),
                              image_b64, base + ".vision", "vision", subject, relation, out,
                              cands);
            } else if (vision_model_ != nullptr) {
                skip(subject, relation, "vision", "missing image", out);
            }

            match_against_kg(relation, cands);
            dedup_across_models(cands);
            bool check_images = with_vision &&
                                std::find(options_.visual_relations.begin(),
                                          options_.visual_relations.end(),
                                          relation) != options_.visual_relations.end();
            for (Working& cand : cands) {
                if (!cand.status.empty()) continue;
                if (check_images && cand.source == "text")
                    verify_visually(subject_label, image_b64, base, cand, out);
                if (cand.status.empty()) cand.status = "accepted";
            }

            for (Working& cand : cands) {
                if (cand.status == "accepted")
                    out.accepted.push_back(
                        AcceptedCandidate{subject, relation, cand.surface, cand.source});
                out.audit.push_back(CandidateRecord{subject, relation, std::move(cand.surface),
                                                    std::move(cand.source),
                                                    std::move(cand.nearest), cand.similarity,
                                                    std::move(cand.status)});
            }
        }
        return out;
    }

private:
    void skip(EntityId subject, RelationId relation, const char* source, std::string reason,
              SubjectOutput& out) {
        out.audit.push_back(
            CandidateRecord{subject, relation, "", source, std::move(reason), 0.0, "skipped"});
    }

    void query_phrases(ModelClient& client, const std::string& prompt,
                       const std::string& image_b64, const std::string& key, const char* source,
                       EntityId subject, RelationId relation, SubjectOutput& out,
                       std::vector<Working>& cands) {
        ModelRequest request{prompt, image_b64, options_.max_tokens, key};
        ++out.queries;
        ModelResponse response = client.complete(request);
        std::vector<std::string> phrases;
        try {
            phrases = parse_entity_array(response.text);
        } catch (const ParseError&) {
            ModelRequest retry = request;
            retry.prompt +=
                "\n\nThe previous reply could not be parsed. "
                "Respond with only a JSON array of strings.";
            retry.replay_key = key + ".retry";
            ++out.queries;
            ModelResponse second = client.complete(retry);
            try {
                phrases = parse_entity_array(second.text);
            } catch (const ParseError&) {
                out.audit.push_back(
                    CandidateRecord{subject, relation, "", source, "", 0.0, "parse-failed"});
                return;
            }
        }
        for (std::string& phrase : phrases) {
            Working cand;
            cand.normalized = normalize_phrase(phrase);
            cand.surface = std::move(phrase);
            cand.source = source;
            cands.push_back(std::move(cand));
        }
    }

    // Nearest existing tail of the relation by label similarity; >= tau
    // terminates the candidate as duplicate-of-kg.
    void match_against_kg(RelationId relation, std::vector<Working>& cands) {
        auto it = tails_.find(relation);
        static const std::vector<TailEntry> kNoTails;
        const std::vector<TailEntry>& pool = it == tails_.end() ? kNoTails : it->second;
        for (Working& cand : cands) {
            for (const TailEntry& tail : pool) {
                double sim = tail.normalized == cand.normalized
                                 ? 1.0
                                 : vectors_.phrase_similarity(cand.surface, tail.label);
                if (cand.nearest.empty() || sim > cand.similarity) {
                    cand.nearest = kg_.entity_iri(tail.id);
                    cand.similarity = sim;
                }
            }
            if (!cand.nearest.empty() && cand.similarity >= options_.tau)
                cand.status = "duplicate-of-kg";
        }
    }

    // A vision phrase close to any surviving text phrase collapses into it.
    void dedup_across_models(std::vector<Working>& cands) {
        for (Working& cand : cands) {
            if (cand.source != "vision" || !cand.status.empty()) continue;
            const Working* hit = nullptr;
            double best = 0.0;
            for (const Working& other : cands) {
                if (other.source != "text" || !other.status.empty()) continue;
                double sim = other.normalized == cand.normalized
                                 ? 1.0
                                 : vectors_.phrase_similarity(cand.surface, other.surface);
                if (sim >= options_.tau && (hit == nullptr || sim > best)) {
                    best = sim;
                    hit = &other;
                }
            }
            if (hit != nullptr) {
                cand.status = "duplicate-cross-model";
                cand.nearest = hit->surface;
                cand.similarity = best;
            }
        }
    }

    void verify_visually(const std::string& subject_label, const std::string& image_b64,
                         const std::string& base, Working& cand, SubjectOutput& out) {
        std::string question = "Does the image of " + subject_label + " show " + cand.surface +
                               "?";
        PromptContext context{subject_label, "", question};
        std::string key = base + ".verify." + slugify(cand.surface);
        ModelRequest request{render_prompt(options_.verify_prompt, context), image_b64,
                             options_.max_tokens, key};
        ++out.queries;
        std::optional<bool> verdict = parse_yes_no(vision_model_->complete(request).text);
        if (!verdict) {
            ModelRequest retry = request;
            retry.prompt += "\n\nAnswer with exactly one word: yes or no.";
            retry.replay_key = key + ".retry";
            ++out.queries;
            verdict = parse_yes_no(vision_model_->complete(retry).text);
            if (!verdict) {
                cand.status = "rejected-by-image-check";
                cand.nearest = "unparseable judgment";
                cand.similarity = 0.0;
                return;
            }
        }
        if (!*verdict) cand.status = "rejected-by-image-check";
    }

    const TripleSet& kg_;
    const Lexicon& lexicon_;
    const WordVectors& vectors_;
    ModelClient& text_model_;
    ModelClient* vision_model_;
    const ExtensionOptions& options_;
    const std::unordered_map<RelationId, std::vector<TailEntry>>& tails_;
};

}  // namespace

ExtensionResult run_extension(const TripleSet& kg, const Lexicon& lexicon,
                              const WordVectors& vectors, ModelClient& text_model,
                              ModelClient* vision_model, const ExtensionOptions& options) {
    if (options.relations.empty()) throw ConfigError("extension needs at least one relation");
    if (options.tau <= 0.0 || options.tau >= 1.0) throw ConfigError("tau must lie in (0, 1)");
    for (RelationId r : options.relations)
        if (r >= kg.relation_count()) throw ConfigError("extension relation is out of range");

    std::vector<bool> is_head(kg.entity_count(), false);
    for (const Triple& t : kg.triples()) is_head[t.head] = true;
    std::vector<EntityId> subjects;
    for (std::size_t e = 0; e < kg.entity_count(); ++e)
        if (is_head[e]) subjects.push_back(static_cast<EntityId>(e));
    if (options.max_subjects > 0 && subjects.size() > options.max_subjects)
        subjects.resize(options.max_subjects);

    std::unordered_map<RelationId, std::vector<TailEntry>> tails;
    std::unordered_set<EntityId> distinct_tails;
    for (RelationId relation : options.relations) {
        std::unordered_set<EntityId> seen;
        for (std::uint64_t key : kg.pairs(relation)) {
            EntityId tail = static_cast<EntityId>(key & 0xffffffffu);
            if (!seen.insert(tail).second) continue;
            distinct_tails.insert(tail);
            std::string label = lexicon.entity_display(kg, tail);
            tails[relation].push_back(TailEntry{tail, label, normalize_phrase(label)});
        }
        std::sort(tails[relation].begin(), tails[relation].end(),
                  [](const TailEntry& a, const TailEntry& b) { return a.id < b.id; });
    }

    SubjectWorker worker(kg, lexicon, vectors, text_model, vision_model, options, tails);
    std::vector<SubjectOutput> outputs(subjects.size());
    std::size_t threads = std::max<std::size_t>(1, options.threads);
    if (threads == 1 || subjects.size() <= 1) {
        for (std::size_t i = 0; i < subjects.size(); ++i) outputs[i] = worker.run(subjects[i]);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_lock;
        auto drain = [&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= subjects.size()) return;
                try {
                    outputs[i] = worker.run(subjects[i]);
                } catch (...) {
                    std::lock_guard<std::mutex> hold(failure_lock);
                    if (!failure) failure = std::current_exception();
                    return;
                }
            }
        };
        std::vector<std::thread> crew;
        for (std::size_t t = 0; t < std::min(threads, subjects.size()); ++t)
            crew.emplace_back(drain);
        for (std::thread& th : crew) th.join();
        if (failure) std::rethrow_exception(failure);
    }

    ExtensionResult result;
    result.stats.subjects = subjects.size();
    result.stats.raw_tail_count = distinct_tails.size();
    for (SubjectOutput& out : outputs) {
        result.stats.queries += out.queries;
        for (CandidateRecord& record : out.audit) {
            if (record.status == "parse-failed") {
                ++result.stats.parse_failures;
            } else if (record.status == "skipped") {
                ++result.stats.skipped_queries;
            } else {
                ++result.stats.raw_candidates;
                if (record.status == "duplicate-of-kg") ++result.stats.duplicates_kg;
                if (record.status == "duplicate-cross-model") ++result.stats.duplicates_cross;
                if (record.status == "rejected-by-image-check") ++result.stats.rejected_image;
                if (record.status == "accepted") ++result.stats.accepted;
            }
            result.audit.push_back(std::move(record));
        }
        for (AcceptedCandidate& a : out.accepted) result.accepted.push_back(std::move(a));
    }
    return result;
}

MergeResult merge_extension(const TripleSet& kg, std::span<const AcceptedCandidate> accepted,
                            const std::string& run_id) {
    MergeResult result;
    result.merged = kg;
    for (const AcceptedCandidate& cand : accepted) {
        std::string base = std::string(kGeneratedNamespace) + run_id + "/" + cand.source + "/" +
                           slugify(cand.phrase);
        std::string iri = base;
        for (int suffix = 2; result.merged.find_entity(iri).has_value(); ++suffix)
            iri = base + "-" + std::to_string(suffix);
        EntityId target = result.merged.intern_entity(iri, EntityKind::IriNode);
        result.merged.add(cand.subject, cand.relation, target);
        ++result.new_triples;
        result.new_entities.emplace_back(std::move(iri), cand.phrase);
    }
    return result;
}

void write_audit_csv(std::ostream& out, const TripleSet& kg,
                     std::span<const CandidateRecord> records) {
    CsvWriter writer(out);
    writer.write_record(
        {"subject", "relation", "surface", "source", "nearest", "similarity", "status"});
    for (const CandidateRecord& r : records) {
        writer.write_record({kg.entity_iri(r.subject), kg.relation_iri(r.relation), r.surface,
                             r.source, r.nearest,
                             r.nearest.empty() ? "" : format_double(r.similarity, 4), r.status});
    }
}

void write_extension_stats(std::ostream& out, const ExtensionStats& stats,
                           const TripleSet& before, const TripleSet& after) {
    auto line = [&](std::string_view name, std::uint64_t before_v, std::uint64_t after_v) {
        out << name << ": " << before_v << " -> " << after_v << "\n";
    };
    line("triples", before.size(), after.size());
    line("entities", before.entity_count(), after.entity_count());
    line("relations", before.relation_count(), after.relation_count());
    out << "subjects: " << stats.subjects << "\n";
    out << "queries: " << stats.queries << "\n";
    out << "existing tails: " << stats.raw_tail_count << "\n";
    out << "raw candidates: " << stats.raw_candidates << "\n";
    out << "duplicate-of-kg: " << stats.duplicates_kg << "\n";
    out << "duplicate-cross-model: " << stats.duplicates_cross << "\n";
    out << "rejected-by-image-check: " << stats.rejected_image << "\n";
    out << "accepted: " << stats.accepted << "\n";
    out << "parse failures: " << stats.parse_failures << "\n";
    out << "skipped queries: " << stats.skipped_queries << "\n";
    if (stats.raw_tail_count > 0) {
        auto ratio = [&](std::uint64_t count) {
            return format_double(static_cast<double>(count) /
                                     static_cast<double>(stats.raw_tail_count),
                                 4);
        };
        out << "raw/existing ratio: " << ratio(stats.raw_candidates) << "\n";
        out << "accepted/existing ratio: " << ratio(stats.accepted) << "\n";
    }
}

}  // namespace kgex
