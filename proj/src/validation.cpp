#include "kgex/validation.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "kgex/csv.hpp"
#include "kgex/error.hpp"
#include "kgex/strings.hpp"

namespace kgex {
namespace {

enum class Answer { Yes, No, Failed, Skipped };

std::string read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return {};
    std::ostringstream bytes;
    bytes << in.rdbuf();
    return bytes.str();
}

Answer ask_yes_no(ModelClient& client, const PromptTemplate& tmpl, const PromptContext& context,
                  const std::string& image_b64, std::size_t max_tokens, const std::string& key) {
    ModelRequest request{render_prompt(tmpl, context), image_b64, max_tokens, key};
    try {
        std::optional<bool> verdict = parse_yes_no(client.complete(request).text);
        if (!verdict) {
            ModelRequest retry = request;
            retry.prompt += "\n\nAnswer with exactly one word: yes or no.";
            retry.replay_key = key + ".retry";
            verdict = parse_yes_no(client.complete(retry).text);
        }
        if (!verdict) return Answer::No;
        return *verdict ? Answer::Yes : Answer::No;
    } catch (const TransportError&) {
        return Answer::Failed;
    }
}

void tally(RecoveryResult& result, Answer answer) {
    switch (answer) {
        case Answer::Yes:
            ++result.queried;
            ++result.recognized;
            break;
        case Answer::No:
            ++result.queried;
            break;
        case Answer::Failed:
            ++result.failures;
            break;
        case Answer::Skipped:
            ++result.skipped;
            break;
    }
}

}  // namespace

double f1_from_recall(double recall) { return 2.0 * recall / (1.0 + recall); }

std::vector<RecoveryResult> recover_ground_truth(const TripleSet& kg, const Lexicon& lexicon,
                                                 RelationId relation, ModelClient* text_model,
                                                 ModelClient* vision_model,
                                                 const RecoveryOptions& options) {
    if (text_model == nullptr && vision_model == nullptr)
        throw ConfigError("ground truth recovery needs at least one model client");
    if (relation >= kg.relation_count())
        throw ConfigError("recovery relation is out of range");

    std::vector<Triple> facts;
    for (const Triple& t : kg.triples())
        if (t.relation == relation) facts.push_back(t);

    std::string relation_label = lexicon.relation_display(kg, relation);
    struct PerTriple {
        Answer text = Answer::Skipped;
        Answer vision = Answer::Skipped;
    };
    std::vector<PerTriple> answers(facts.size());

    auto probe = [&](std::size_t i) {
        const Triple& t = facts[i];
        std::string subject_label = lexicon.entity_display(kg, t.head);
        std::string tail_label = lexicon.entity_display(kg, t.tail);
        std::string base = slugify(subject_label) + "." + slugify(relation_label) + ".recover." +
                           slugify(tail_label);
        if (text_model != nullptr) {
            std::string question = "Is the statement (" + subject_label + ", " + relation_label +
                                   ", " + tail_label + ") true?";
            answers[i].text =
                ask_yes_no(*text_model, options.verify_prompt,
                           PromptContext{subject_label, relation_label, question}, "",
                           options.max_tokens, base + ".text");
        }
        if (vision_model != nullptr) {
            std::string image_b64;
            if (auto path = lexicon.image_path(t.head))
                image_b64 = base64_encode(read_file_bytes(std::filesystem::path(*path)));
            if (!image_b64.empty()) {
                std::string question =
                    "Does the image of " + subject_label + " show " + tail_label + "?";
                answers[i].vision =
                    ask_yes_no(*vision_model, options.verify_prompt,
                               PromptContext{subject_label, relation_label, question}, image_b64,
                               options.max_tokens, base + ".vision");
            }
        }
    };

    std::size_t threads = std::max<std::size_t>(1, options.threads);
    if (threads == 1 || facts.size() <= 1) {
        for (std::size_t i = 0; i < facts.size(); ++i) probe(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_lock;
        auto drain = [&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= facts.size()) return;
                try {
                    probe(i);
                } catch (...) {
                    std::lock_guard<std::mutex> hold(failure_lock);
                    if (!failure) failure = std::current_exception();
                    return;
                }
            }
        };
        std::vector<std::thread> crew;
        for (std::size_t t = 0; t < std::min(threads, facts.size()); ++t)
            crew.emplace_back(drain);
        for (std::thread& th : crew) th.join();
        if (failure) std::rethrow_exception(failure);
    }

    std::vector<RecoveryResult> results;
    if (text_model != nullptr) {
        RecoveryResult text{"text-model", 0, 0, 0, 0};
        for (const PerTriple& a : answers) tally(text, a.text);
        results.push_back(text);
    }
    if (vision_model != nullptr) {
        RecoveryResult vision{"vision-model", 0, 0, 0, 0};
        for (const PerTriple& a : answers) tally(vision, a.vision);
        results.push_back(vision);
    }
    if (text_model != nullptr && vision_model != nullptr) {
        RecoveryResult combined{"combined", 0, 0, 0, 0};
        for (const PerTriple& a : answers) {
            bool text_usable = a.text == Answer::Yes || a.text == Answer::No;
            bool vision_usable = a.vision == Answer::Yes || a.vision == Answer::No;
            if (!text_usable && !vision_usable) {
                if (a.text == Answer::Failed || a.vision == Answer::Failed)
                    ++combined.failures;
                else
                    ++combined.skipped;
                continue;
            }
            ++combined.queried;
            if (a.text == Answer::Yes || a.vision == Answer::Yes) ++combined.recognized;
        }
        results.push_back(combined);
    }
    return results;
}

double PrecisionReport::mean_precision() const {
    if (per_annotator.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& [name, precision] : per_annotator) sum += precision;
    return sum / static_cast<double>(per_annotator.size());
}

namespace {

struct Tally {
    std::uint64_t correct = 0, total = 0;
};

void accumulate_annotations(std::istream& in, std::map<std::string, Tally>& tallies,
                            std::uint64_t& rows) {
    CsvReader reader(in);
    std::vector<std::string> fields;
    if (!reader.read_record(fields)) throw ParseError("annotation file is empty");

    std::size_t annotator_col = fields.size(), label_col = fields.size();
    for (std::size_t i = 0; i < fields.size(); ++i) {
        std::string name = to_lower(trim(fields[i]));
        if (name == "annotator") annotator_col = i;
        if (name == "label") label_col = i;
    }
    if (annotator_col == fields.size() || label_col == fields.size())
        throw ParseError("annotation header needs annotator and label columns", 1);

    while (reader.read_record(fields)) {
        if (fields.size() == 1 && fields[0].empty()) continue;
        if (fields.size() <= std::max(annotator_col, label_col))
            throw ParseError("annotation row is missing columns", reader.record_line());
        std::string label = to_lower(trim(fields[label_col]));
        bool correct;
        if (label == "correct")
            correct = true;
        else if (label == "incorrect")
            correct = false;
        else
            throw ParseError("label must be correct or incorrect, got '" + label + "'",
                             reader.record_line());
        Tally& tally = tallies[trim(fields[annotator_col])];
        tally.total += 1;
        tally.correct += correct ? 1 : 0;
        ++rows;
    }
}

PrecisionReport report_from_tallies(const std::map<std::string, Tally>& tallies,
                                    std::uint64_t rows) {
    PrecisionReport report;
    report.rows = rows;
    for (const auto& [name, tally] : tallies)
        report.per_annotator.emplace_back(
            name, static_cast<double>(tally.correct) / static_cast<double>(tally.total));
    return report;
}

}  // namespace

PrecisionReport compute_precision(std::istream& in) {
    std::map<std::string, Tally> tallies;
    std::uint64_t rows = 0;
    accumulate_annotations(in, tallies, rows);
    return report_from_tallies(tallies, rows);
}

PrecisionReport compute_precision(const std::filesystem::path& path) {
    auto in = open_input(path);
    return compute_precision(in);
}

PrecisionReport compute_precision(std::span<const std::filesystem::path> paths) {
    std::map<std::string, Tally> tallies;
    std::uint64_t rows = 0;
    for (const std::filesystem::path& path : paths) {
        auto in = open_input(path);
        accumulate_annotations(in, tallies, rows);
    }
    return report_from_tallies(tallies, rows);
}

const std::string TaxonomyMap::kUnknown = "unknown";

TaxonomyMap TaxonomyMap::load(const std::filesystem::path& path) {
    auto in = open_input(path);
    return load(in);
}

TaxonomyMap TaxonomyMap::load(std::istream& in) {
    TaxonomyMap map;
    CsvReader reader(in);
    std::vector<std::string> fields;
    bool first = true;
    while (reader.read_record(fields)) {
        if (fields.size() == 1 && fields[0].empty()) continue;
        if (fields.size() != 2)
            throw ParseError("taxonomy rows are category,keyword", reader.record_line());
        if (first && to_lower(trim(fields[0])) == "category") {
            first = false;
            continue;
        }
        first = false;
        std::string category = trim(fields[0]);
        std::string keyword = to_lower(trim(fields[1]));
        if (category.empty() || keyword.empty())
            throw ParseError("taxonomy category and keyword must be non-empty",
                             reader.record_line());
        map.rules_.emplace_back(std::move(category), std::move(keyword));
    }
    return map;
}

const std::string& TaxonomyMap::classify(std::string_view surface) const {
    std::string lowered = to_lower(surface);
    for (const auto& [category, keyword] : rules_) {
        if (lowered.find(keyword) != std::string::npos) return category;
    }
    return kUnknown;
}

std::vector<std::string> TaxonomyMap::categories() const {
    std::vector<std::string> out;
    for (const auto& [category, keyword] : rules_) {
        if (std::find(out.begin(), out.end(), category) == out.end()) out.push_back(category);
    }
    return out;
}

std::map<std::string, std::uint64_t> category_counts(std::span<const std::string> surfaces,
                                                     const TaxonomyMap& taxonomy) {
    std::map<std::string, std::uint64_t> counts;
    for (const std::string& surface : surfaces) ++counts[taxonomy.classify(surface)];
    return counts;
}

std::map<std::string, double> taxonomy_distribution(std::span<const std::string> surfaces,
                                                    const TaxonomyMap& taxonomy) {
    std::map<std::string, double> distribution;
    if (surfaces.empty()) return distribution;
    double total = static_cast<double>(surfaces.size());
    for (const auto& [category, count] : category_counts(surfaces, taxonomy))
        distribution[category] = 100.0 * static_cast<double>(count) / total;
    return distribution;
}

void write_distribution_csv(std::ostream& out,
                            const std::map<std::string, std::uint64_t>& counts) {
    std::uint64_t total = 0;
    for (const auto& [category, count] : counts) total += count;
    out << "category,count,percentage\n";
    for (const auto& [category, count] : counts) {
        double pct = total == 0 ? 0.0 : 100.0 * static_cast<double>(count) / total;
        out << category << ',' << count << ',' << format_double(pct, 2) << '\n';
    }
}

void write_recovery_csv(std::ostream& out, std::span<const RecoveryResult> results) {
    out << "model,queried,recognized,failures,skipped,recall,f1\n";
    for (const RecoveryResult& r : results) {
        out << r.model << ',' << r.queried << ',' << r.recognized << ',' << r.failures << ','
            << r.skipped << ',' << format_double(r.recall(), 4) << ','
            << format_double(r.f1(), 4) << '\n';
    }
}

}  // namespace kgex
