#include "kgex/cleaning.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_set>

#include "kgex/config.hpp"
#include "kgex/csv.hpp"
#include "kgex/error.hpp"
#include "kgex/strings.hpp"

namespace kgex {

void CleaningPlan::validate() const {
    if (!(overlap_threshold > 0.0 && overlap_threshold <= 1.0))
        throw ConfigError("overlap threshold must be in (0, 1]");
    if (min_frequency < 1) throw ConfigError("min frequency must be >= 1");
}

CleaningPlan CleaningPlan::load(const std::filesystem::path& path) {
    auto cfg = KeyValueConfig::load(path);
    CleaningPlan plan;
    plan.overlap_threshold = cfg.get_double("overlap_threshold", plan.overlap_threshold);
    if (cfg.has("name_patterns")) plan.name_patterns = cfg.get_list("name_patterns");
    plan.min_frequency =
        static_cast<std::uint64_t>(cfg.get_int("min_frequency", plan.min_frequency));
    std::string metric = to_lower(cfg.get_or("overlap_metric", "containment"));
    if (metric == "containment") plan.overlap_metric = OverlapMetric::Containment;
    else if (metric == "jaccard") plan.overlap_metric = OverlapMetric::Jaccard;
    else throw ConfigError("unknown overlap metric: " + metric);
    plan.rerun_detectors_after_patterns =
        cfg.get_bool("rerun_detectors", plan.rerun_detectors_after_patterns);
    if (auto manual = cfg.get("manual_list")) {
        auto in = open_input(*manual);
        std::string line;
        while (std::getline(in, line)) {
            std::string iri = trim(line);
            if (iri.empty() || iri[0] == '#') continue;
            plan.manual_removals.push_back(iri);
        }
    }
    plan.validate();
    return plan;
}

namespace {

double overlap_score(std::size_t intersection, std::size_t a, std::size_t b,
                     OverlapMetric metric) {
    if (a == 0 || b == 0) return 0.0;
    if (metric == OverlapMetric::Containment)
        return static_cast<double>(intersection) / static_cast<double>(std::min(a, b));
    return static_cast<double>(intersection) / static_cast<double>(a + b - intersection);
}

// Shared scan over relation pairs; `swap_second` turns it into the inverse
// detector. Only relations with at least one pair take part.
std::vector<FlaggedPair> detect_pairs(const TripleSet& set, double threshold,
                                      OverlapMetric metric, bool swap_second) {
    if (!(threshold > 0.0 && threshold <= 1.0))
        throw ConfigError("overlap threshold must be in (0, 1]");
    std::vector<FlaggedPair> flagged;
    const std::size_t n = set.relation_count();
    for (RelationId r = 0; r < n; ++r) {
        const PairSet& rp = set.pairs(r);
        if (rp.empty()) continue;
        for (RelationId s = r + 1; s < n; ++s) {
            const PairSet& sp = set.pairs(s);
            if (sp.empty()) continue;
            // Iterate the smaller set, membership-test in the larger.
            const PairSet* small = &rp;
            const PairSet* large = &sp;
            bool swap_small = swap_second;  // whether to swap keys of the small set
            if (sp.size() < rp.size()) {
                small = &sp;
                large = &rp;
                // overlap(r, swap(s)) counted from s's side uses the same swap
                // because (h,t) in r matches (t,h) in s symmetrically
            }
            std::size_t inter = 0;
            for (std::uint64_t key : *small) {
                std::uint64_t probe =
                    swap_small ? pair_key(pair_tail(key), pair_head(key)) : key;
                if (large->count(probe)) ++inter;
            }
            double score = overlap_score(inter, rp.size(), sp.size(), metric);
            if (score >= threshold) flagged.push_back({r, s, score});
        }
    }
    // Deterministic report order: by IRI of the pair.
    std::sort(flagged.begin(), flagged.end(), [&](const FlaggedPair& a, const FlaggedPair& b) {
        const std::string& ai = set.relation_iri(a.first);
        const std::string& bi = set.relation_iri(b.first);
        if (ai != bi) return ai < bi;
        return set.relation_iri(a.second) < set.relation_iri(b.second);
    });
    return flagged;
}

}  // namespace

std::vector<FlaggedPair> detect_near_duplicates(const TripleSet& set, double threshold,
                                                OverlapMetric metric) {
    return detect_pairs(set, threshold, metric, /*swap_second=*/false);
}

std::vector<FlaggedPair> detect_inverses(const TripleSet& set, double threshold,
                                         OverlapMetric metric) {
    return detect_pairs(set, threshold, metric, /*swap_second=*/true);
}

std::uint64_t CleaningReport::removed_relation_count() const {
    std::uint64_t n = duplicate_pairs.size() + inverse_pairs.size() + manual_removed.size() +
                      low_frequency_removed.size();
    for (const auto& [pattern, relations] : pattern_removed) n += relations.size();
    return n;
}

std::pair<TripleSet, CleaningReport> apply_cleaning(const TripleSet& set, const Lexicon& lexicon,
                                                    const CleaningPlan& plan) {
    plan.validate();
    CleaningReport report;
    report.triples_before = set.size();
    report.relations_before = set.relation_count();

    std::vector<bool> removed(set.relation_count(), false);

    // Step 1: near-duplicates and inverses in one pass. For each flagged pair
    // whose members are both still alive, drop the lexicographically larger
    // IRI. Pairs flagged by both detectors count as duplicates.
    auto process_flags = [&](const std::vector<FlaggedPair>& flags,
                             std::vector<RemovedPair>& out) {
        for (const FlaggedPair& f : flags) {
            if (removed[f.first] || removed[f.second]) continue;
            RelationId keep = f.first, drop = f.second;
            if (set.relation_iri(drop) < set.relation_iri(keep)) std::swap(keep, drop);
            removed[drop] = true;
            out.push_back({keep, drop, f.overlap});
        }
    };
    process_flags(detect_near_duplicates(set, plan.overlap_threshold, plan.overlap_metric),
                  report.duplicate_pairs);
    process_flags(detect_inverses(set, plan.overlap_threshold, plan.overlap_metric),
                  report.inverse_pairs);

    // Steps 2-3: name patterns over relation labels, in plan order.
    auto apply_pattern = [&](const std::string& pattern) {
        std::vector<RelationId> hits;
        for (RelationId r = 0; r < set.relation_count(); ++r) {
            if (removed[r]) continue;
            auto label = lexicon.relation_label(r);
            if (label && contains(*label, pattern)) {
                removed[r] = true;
                hits.push_back(r);
            }
        }
        report.pattern_removed.emplace_back(pattern, std::move(hits));
    };
    for (const std::string& pattern : plan.name_patterns) apply_pattern(pattern);

    if (plan.rerun_detectors_after_patterns) {
        // One extra detector pass over the survivors. Off by default; the
        // published procedure is a single pass.
        TripleSet interim = TripleSet::with_lexicons_of(set);
        for (const Triple& t : set.triples())
            if (!removed[t.relation]) interim.add(t.head, t.relation, t.tail);
        process_flags(
            detect_near_duplicates(interim, plan.overlap_threshold, plan.overlap_metric),
            report.duplicate_pairs);
        process_flags(detect_inverses(interim, plan.overlap_threshold, plan.overlap_metric),
                      report.inverse_pairs);
    }

    // Step 4a: manual relation list.
    for (const std::string& iri : plan.manual_removals) {
        auto r = set.find_relation(iri);
        if (!r) {
            report.warnings.push_back("manual removal not found: " + iri);
            continue;
        }
        if (removed[*r]) continue;
        removed[*r] = true;
        report.manual_removed.push_back(*r);
    }

    // Step 4b: low-frequency relations.
    for (RelationId r = 0; r < set.relation_count(); ++r) {
        if (removed[r]) continue;
        if (set.pairs(r).size() < plan.min_frequency) {
            removed[r] = true;
            report.low_frequency_removed.push_back(r);
        }
    }

    TripleSet cleaned;
    for (const Triple& t : set.triples()) {
        if (removed[t.relation]) continue;
        cleaned.add(set.entity_iri(t.head), set.relation_iri(t.relation), set.entity_iri(t.tail));
    }
    report.triples_after = cleaned.size();
    report.relations_after = cleaned.relation_count();
    return {std::move(cleaned), std::move(report)};
}

void CleaningReport::write_text(std::ostream& out, const TripleSet& set,
                                const Lexicon& lexicon) const {
    out << "cleaning report\n";
    out << "  triples:   " << triples_before << " -> " << triples_after << "\n";
    out << "  relations: " << relations_before << " -> " << relations_after << "\n";
    out << "near-duplicate pairs removed: " << duplicate_pairs.size() << "\n";
    for (const auto& p : duplicate_pairs)
        out << "  kept " << set.relation_iri(p.kept) << "  dropped " << set.relation_iri(p.dropped)
            << "  overlap " << format_double(p.overlap, 4) << "\n";
    out << "inverse pairs removed: " << inverse_pairs.size() << "\n";
    for (const auto& p : inverse_pairs)
        out << "  kept " << set.relation_iri(p.kept) << "  dropped " << set.relation_iri(p.dropped)
            << "  overlap " << format_double(p.overlap, 4) << "\n";
    for (const auto& [pattern, relations] : pattern_removed) {
        out << "pattern \"" << pattern << "\" removed: " << relations.size() << "\n";
        for (RelationId r : relations)
            out << "  " << set.relation_iri(r) << "  " << lexicon.relation_display(set, r) << "\n";
    }
    out << "manual removals: " << manual_removed.size() << "\n";
    for (RelationId r : manual_removed) out << "  " << set.relation_iri(r) << "\n";
    out << "low-frequency removals: " << low_frequency_removed.size() << "\n";
    for (RelationId r : low_frequency_removed) out << "  " << set.relation_iri(r) << "\n";
    for (const auto& w : warnings) out << "warning: " << w << "\n";
}

void CleaningReport::write_csv(std::ostream& out, const TripleSet& set) const {
    CsvWriter writer(out);
    writer.write_record({"category", "relation", "detail"});
    for (const auto& p : duplicate_pairs)
        writer.write_record({"duplicate", set.relation_iri(p.dropped),
                             "kept=" + set.relation_iri(p.kept) +
                                 " overlap=" + format_double(p.overlap, 4)});
    for (const auto& p : inverse_pairs)
        writer.write_record({"inverse", set.relation_iri(p.dropped),
                             "kept=" + set.relation_iri(p.kept) +
                                 " overlap=" + format_double(p.overlap, 4)});
    for (const auto& [pattern, relations] : pattern_removed)
        for (RelationId r : relations)
            writer.write_record({"pattern", set.relation_iri(r), pattern});
    for (RelationId r : manual_removed)
        writer.write_record({"manual", set.relation_iri(r), ""});
    for (RelationId r : low_frequency_removed)
        writer.write_record({"low-frequency", set.relation_iri(r), ""});
    for (const auto& w : warnings) writer.write_record({"warning", "", w});
}

}  // namespace kgex
