#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "kgex/lexicon.hpp"
#include "kgex/model_client.hpp"
#include "kgex/prompt.hpp"
#include "kgex/triple_set.hpp"

namespace kgex {

// Only known-true facts are queried, so precision is 1 by construction and
// F1 collapses to a function of recall alone.
double f1_from_recall(double recall);

struct RecoveryResult {
    std::string model;             // "text-model", "vision-model" or "combined"
    std::uint64_t queried = 0;     // usable yes/no answers
    std::uint64_t recognized = 0;  // yes answers
    std::uint64_t failures = 0;    // transport failures, excluded from queried
    std::uint64_t skipped = 0;     // missing context (e.g. subject without image)

    double recall() const {
        return queried == 0 ? 0.0 : static_cast<double>(recognized) / static_cast<double>(queried);
    }
    double f1() const { return f1_from_recall(recall()); }
};

struct RecoveryOptions {
    std::size_t max_tokens = 16;
    std::size_t threads = 1;
    PromptTemplate verify_prompt = PromptTemplate::verify_defaults();
};

// Asks each available model whether every existing (head, relation, tail)
// fact holds: the text model gets the statement as a yes/no question, the
// vision model is asked about the subject's image. Unparseable verdicts are
// re-queried once with a stricter prompt and then count as "no"; transport
// failures drop the query from the denominator. Returns one result per
// queried model plus "combined" (recognized by at least one model) when both
// ran. Triples are processed in KG order and reduced sequentially, so the
// thread count never changes the result.
std::vector<RecoveryResult> recover_ground_truth(const TripleSet& kg, const Lexicon& lexicon,
                                                 RelationId relation, ModelClient* text_model,
                                                 ModelClient* vision_model,
                                                 const RecoveryOptions& options = {});

struct PrecisionReport {
    std::vector<std::pair<std::string, double>> per_annotator;  // sorted by name
    std::uint64_t rows = 0;

    // Every annotator weighs the same regardless of how many rows they judged.
    double mean_precision() const;
};

// Annotation CSV (candidate,subject,relation,annotator,label) with a header
// naming at least the annotator and label columns; labels must be correct or
// incorrect. Anything else raises ParseError with the line number.
PrecisionReport compute_precision(std::istream& in);
PrecisionReport compute_precision(const std::filesystem::path& path);
// Several files merged into one report (tallies pooled per annotator).
PrecisionReport compute_precision(std::span<const std::filesystem::path> paths);

// Keyword taxonomy for entity surfaces: category,keyword-or-IRI rows checked
// in file order against the lowercased surface, first substring hit wins.
class TaxonomyMap {
public:
    static TaxonomyMap load(const std::filesystem::path& path);
    static TaxonomyMap load(std::istream& in);

    const std::string& classify(std::string_view surface) const;
    std::vector<std::string> categories() const;  // distinct, in file order
    std::size_t rule_count() const { return rules_.size(); }

    static const std::string kUnknown;

private:
    std::vector<std::pair<std::string, std::string>> rules_;  // category, lowercase keyword
};

std::map<std::string, std::uint64_t> category_counts(std::span<const std::string> surfaces,
                                                     const TaxonomyMap& taxonomy);

// Category -> percentage of all surfaces; values sum to 100 for non-empty
// input.
std::map<std::string, double> taxonomy_distribution(std::span<const std::string> surfaces,
                                                    const TaxonomyMap& taxonomy);

// category,count,percentage
void write_distribution_csv(std::ostream& out,
                            const std::map<std::string, std::uint64_t>& counts);

void write_recovery_csv(std::ostream& out, std::span<const RecoveryResult> results);

}  // namespace kgex
