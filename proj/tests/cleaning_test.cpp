#include <fstream>
#include <sstream>

#include "doctest.h"
#include "kgex/cleaning.hpp"
#include "kgex/error.hpp"
#include "kgex/lexicon.hpp"
#include "kgex/strings.hpp"
#include "kgex/triple_set.hpp"
#include "support.hpp"

using namespace kgex;

namespace {

struct Sample {
    TripleSet set;
    Lexicon lexicon;
};

Sample load_sample() {
    Sample s;
    s.set = parse_triples(test::fixture("joconde_sample.csv")).set;
    LexiconPaths paths;
    paths.relation_labels = test::fixture("relation_labels.csv");
    s.lexicon = load_lexicon(s.set, paths);
    return s;
}

bool label_clean(const TripleSet& set, const Lexicon& lexicon, RelationId r) {
    auto label = lexicon.relation_label(r);
    if (!label) return true;
    return !contains(*label, "ID") && !contains(*label, "URL");
}

}  // namespace

TEST_CASE("default plan cleans the sample dataset as audited") {
    Sample s = load_sample();
    auto [cleaned, report] = apply_cleaning(s.set, s.lexicon, CleaningPlan{});

    CHECK(report.triples_before == 990);
    CHECK(report.relations_before == 15);
    CHECK(report.relations_after == 7);
    CHECK(report.triples_after == 788);
    CHECK(cleaned.size() == 788);

    REQUIRE(report.duplicate_pairs.size() == 1);
    CHECK(s.set.relation_iri(report.duplicate_pairs[0].kept) == "urn:jcd/prop/depicts");
    CHECK(s.set.relation_iri(report.duplicate_pairs[0].dropped) == "urn:jcd/prop/shows");
    CHECK(report.duplicate_pairs[0].overlap == doctest::Approx(0.975));

    REQUIRE(report.inverse_pairs.size() == 1);
    CHECK(s.set.relation_iri(report.inverse_pairs[0].kept) == "urn:jcd/prop/hasPart");
    CHECK(s.set.relation_iri(report.inverse_pairs[0].dropped) == "urn:jcd/prop/partOf");
    CHECK(report.inverse_pairs[0].overlap == doctest::Approx(1.0));

    REQUIRE(report.pattern_removed.size() == 2);
    CHECK(report.pattern_removed[0].first == "ID");
    CHECK(report.pattern_removed[0].second.size() == 2);
    CHECK(report.pattern_removed[1].first == "URL");
    CHECK(report.pattern_removed[1].second.size() == 1);
    CHECK(report.low_frequency_removed.size() == 3);
    CHECK(report.removed_relation_count() == 8);

    for (const char* survivor :
         {"urn:jcd/prop/creator", "urn:jcd/prop/depicts", "urn:jcd/prop/hasPart",
          "urn:jcd/prop/locatedIn", "urn:jcd/prop/material", "urn:jcd/prop/period",
          "urn:jcd/prop/technique"})
        CHECK(cleaned.pairs(*cleaned.find_relation(survivor)).size() > 0);
}

TEST_CASE("cleaned output satisfies all survivor properties") {
    Sample s = load_sample();
    auto [cleaned, report] = apply_cleaning(s.set, s.lexicon, CleaningPlan{});

    for (RelationId r = 0; r < cleaned.relation_count(); ++r) {
        std::size_t count = cleaned.pairs(r).size();
        if (count == 0) continue;  // removed relation, lexicon slot kept
        CHECK(count >= 2);
        CHECK(label_clean(cleaned, s.lexicon, r));
    }
    for (auto detector : {detect_near_duplicates, detect_inverses}) {
        for (OverlapMetric metric : {OverlapMetric::Containment, OverlapMetric::Jaccard}) {
            auto flagged = detector(cleaned, 0.97, metric);
            CHECK(flagged.empty());
        }
    }
}

TEST_CASE("cleaning is a fixed point") {
    Sample s = load_sample();
    auto [cleaned, first] = apply_cleaning(s.set, s.lexicon, CleaningPlan{});
    auto [again, second] = apply_cleaning(cleaned, s.lexicon, CleaningPlan{});
    CHECK(second.removed_relation_count() == 0);
    CHECK(again.size() == cleaned.size());
}

TEST_CASE("cleaning never grows and shrinks monotonically") {
    std::mt19937_64 rng(17);
    for (int round = 0; round < 15; ++round) {
        TripleSet set = test::random_graph(rng, 500);
        Lexicon empty;
        auto [cleaned, report] = apply_cleaning(set, empty, CleaningPlan{});
        CHECK(cleaned.size() <= set.size());
        CHECK(report.relations_after <= report.relations_before);
        CHECK(report.relations_before - report.relations_after ==
              report.removed_relation_count());
    }
}

TEST_CASE("jaccard switch keeps the asymmetric near-duplicate") {
    Sample s = load_sample();
    // depicts/shows overlap 0.975 by containment but only ~0.23 by Jaccard.
    auto contained = detect_near_duplicates(s.set, 0.97, OverlapMetric::Containment);
    REQUIRE(contained.size() == 1);
    auto jaccard = detect_near_duplicates(s.set, 0.97, OverlapMetric::Jaccard);
    CHECK(jaccard.empty());

    CleaningPlan plan;
    plan.overlap_metric = OverlapMetric::Jaccard;
    auto [cleaned, report] = apply_cleaning(s.set, s.lexicon, plan);
    CHECK(report.duplicate_pairs.empty());
    CHECK(cleaned.find_relation("urn:jcd/prop/shows").has_value());
    CHECK(cleaned.pairs(*cleaned.find_relation("urn:jcd/prop/shows")).size() == 40);
}

TEST_CASE("keep side of a flagged pair is the smaller IRI") {
    TripleSet set;
    for (int i = 0; i < 10; ++i) {
        std::string h = "urn:h" + std::to_string(i), t = "urn:t" + std::to_string(i);
        set.add(h, "urn:z-first", t);
        set.add(h, "urn:a-second", t);
    }
    auto flagged = detect_near_duplicates(set, 0.97);
    REQUIRE(flagged.size() == 1);
    Lexicon empty;
    auto [cleaned, report] = apply_cleaning(set, empty, CleaningPlan{});
    REQUIRE(report.duplicate_pairs.size() == 1);
    CHECK(set.relation_iri(report.duplicate_pairs[0].kept) == "urn:a-second");
    CHECK(set.relation_iri(report.duplicate_pairs[0].dropped) == "urn:z-first");
}

TEST_CASE("manual removals apply and unknown entries warn") {
    Sample s = load_sample();
    CleaningPlan plan;
    plan.manual_removals = {"urn:jcd/prop/technique", "urn:jcd/prop/not-there"};
    auto [cleaned, report] = apply_cleaning(s.set, s.lexicon, plan);
    REQUIRE(report.manual_removed.size() == 1);
    CHECK(s.set.relation_iri(report.manual_removed[0]) == "urn:jcd/prop/technique");
    REQUIRE(report.warnings.size() == 1);
    CHECK(report.warnings[0].find("not-there") != std::string::npos);
    CHECK(!cleaned.find_relation("urn:jcd/prop/technique").has_value());
}

TEST_CASE("plan validation rejects bad thresholds") {
    CleaningPlan plan;
    plan.overlap_threshold = 0.0;
    CHECK_THROWS_AS(plan.validate(), ConfigError);
    plan.overlap_threshold = 1.5;
    CHECK_THROWS_AS(plan.validate(), ConfigError);
    plan.overlap_threshold = 1.0;
    CHECK_NOTHROW(plan.validate());
}

TEST_CASE("plan loads from a config file") {
    auto dir = std::filesystem::temp_directory_path() / "kgex_plan_test";
    std::filesystem::create_directories(dir);
    {
        std::ofstream manual(dir / "manual.txt");
        manual << "urn:jcd/prop/period\n";
        std::ofstream cfg(dir / "plan.cfg");
        cfg << "overlap_threshold = 0.9\n"
            << "name_patterns = ID,URL,Wiki\n"
            << "min_frequency = 3\n"
            << "overlap_metric = jaccard\n"
            << "manual_list = " << (dir / "manual.txt").string() << "\n";
    }
    CleaningPlan plan = CleaningPlan::load(dir / "plan.cfg");
    CHECK(plan.overlap_threshold == doctest::Approx(0.9));
    CHECK(plan.name_patterns == std::vector<std::string>{"ID", "URL", "Wiki"});
    CHECK(plan.min_frequency == 3);
    CHECK(plan.overlap_metric == OverlapMetric::Jaccard);
    REQUIRE(plan.manual_removals.size() == 1);
    CHECK(plan.manual_removals[0] == "urn:jcd/prop/period");
}

TEST_CASE("report writers enumerate every removal") {
    Sample s = load_sample();
    auto [cleaned, report] = apply_cleaning(s.set, s.lexicon, CleaningPlan{});
    std::ostringstream text, csv;
    report.write_text(text, s.set, s.lexicon);
    report.write_csv(csv, s.set);
    CHECK(text.str().find("urn:jcd/prop/shows") != std::string::npos);
    CHECK(text.str().find("urn:jcd/prop/partOf") != std::string::npos);
    CHECK(csv.str().find("urn:jcd/prop/inventoryID") != std::string::npos);
    CHECK(csv.str().find("urn:jcd/prop/museumURL") != std::string::npos);
}
