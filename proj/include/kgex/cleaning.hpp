#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "kgex/lexicon.hpp"
#include "kgex/triple_set.hpp"

namespace kgex {

// Overlap of two relations' pair sets. Containment divides the intersection
// by the smaller set, which also flags subsumed relations; Jaccard is the
// stricter alternative behind a config switch.
enum class OverlapMetric { Containment, Jaccard };

struct CleaningPlan {
    double overlap_threshold = 0.97;             // in (0, 1]
    std::vector<std::string> name_patterns = {"ID", "URL"};  // case-sensitive substrings
    std::vector<std::string> manual_removals;    // relation IRIs
    std::uint64_t min_frequency = 2;             // keep relations with >= this many triples
    OverlapMetric overlap_metric = OverlapMetric::Containment;
    bool rerun_detectors_after_patterns = false;

    void validate() const;
    static CleaningPlan load(const std::filesystem::path& path);
};

// Unordered relation pair (r < s by IRI) with its overlap score.
struct FlaggedPair {
    RelationId first;
    RelationId second;
    double overlap;
};

// Pairs whose (head, tail) sets overlap at or above `threshold`.
std::vector<FlaggedPair> detect_near_duplicates(const TripleSet& set, double threshold,
                                                OverlapMetric metric = OverlapMetric::Containment);

// Pairs where one relation's pairs match the other's with head/tail swapped.
std::vector<FlaggedPair> detect_inverses(const TripleSet& set, double threshold,
                                         OverlapMetric metric = OverlapMetric::Containment);

struct RemovedPair {
    RelationId kept;
    RelationId dropped;
    double overlap;
};

struct CleaningReport {
    std::vector<RemovedPair> duplicate_pairs;
    std::vector<RemovedPair> inverse_pairs;
    // pattern -> relations removed by that pattern, in step order.
    std::vector<std::pair<std::string, std::vector<RelationId>>> pattern_removed;
    std::vector<RelationId> manual_removed;
    std::vector<RelationId> low_frequency_removed;
    std::vector<std::string> warnings;

    std::uint64_t triples_before = 0;
    std::uint64_t triples_after = 0;
    std::uint64_t relations_before = 0;
    std::uint64_t relations_after = 0;

    std::uint64_t removed_relation_count() const;

    void write_text(std::ostream& out, const TripleSet& set, const Lexicon& lexicon) const;
    void write_csv(std::ostream& out, const TripleSet& set) const;
};

// Runs the cleaning steps in order: near-duplicate/inverse removal, name
// patterns, manual list, minimum frequency. Pattern matching is over
// relation labels from the lexicon (property IRIs carry no words).
std::pair<TripleSet, CleaningReport> apply_cleaning(const TripleSet& set, const Lexicon& lexicon,
                                                    const CleaningPlan& plan);

}  // namespace kgex
