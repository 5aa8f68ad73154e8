#include "doctest.h"

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "kgex/error.hpp"
#include "kgex/extend.hpp"
#include "kgex/lexicon.hpp"
#include "kgex/model_client.hpp"
#include "kgex/word_vectors.hpp"
#include "support.hpp"

using namespace kgex;

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

struct ExtensionFixture {
    TripleSet kg;
    Lexicon lexicon;
    WordVectors vectors;
    RelationId depicts = 0;

    ExtensionFixture() {
        auto dir = kgex::test::fixture("extension");
        kg = parse_triples(dir / "kg.csv").set;
        LexiconPaths paths;
        paths.entity_labels = dir / "entity_labels.csv";
        paths.relation_labels = dir / "relation_labels.csv";
        paths.descriptions["en"] = dir / "descriptions_en.csv";
        paths.image_dir = dir / "images";
        lexicon = load_lexicon(kg, paths);
        vectors = WordVectors::load(kgex::test::fixture("vectors.txt"));
        depicts = *kg.find_relation("urn:jcd/prop/depicts");
    }

    ExtensionOptions options(std::size_t threads) const {
        ExtensionOptions opts;
        opts.relations = {depicts};
        opts.visual_relations = {depicts};
        opts.threads = threads;
        return opts;
    }

    ExtensionResult run(std::size_t threads) const {
        ReplayClient text(kgex::test::fixture("extension") / "replay");
        ReplayClient vision(kgex::test::fixture("extension") / "replay");
        return run_extension(kg, lexicon, vectors, text, &vision, options(threads));
    }
};

std::string audit_text(const ExtensionFixture& fx, const ExtensionResult& result) {
    std::ostringstream out;
    write_audit_csv(out, fx.kg, result.audit);
    return out.str();
}

}  // namespace

TEST_CASE("audit output is byte identical across repeated runs and thread counts") {
    ExtensionFixture fx;
    std::string golden = read_file(kgex::test::fixture("extension") / "golden_audit.csv");
    for (std::size_t threads : {1ul, 8ul})
        for (int repeat = 0; repeat < 3; ++repeat) {
            ExtensionResult result = fx.run(threads);
            CHECK(audit_text(fx, result) == golden);
        }
}

TEST_CASE("every candidate reaches exactly one terminal status") {
    ExtensionFixture fx;
    ExtensionResult result = fx.run(1);
    const std::set<std::string> statuses = {"accepted",
                                            "duplicate-of-kg",
                                            "duplicate-cross-model",
                                            "rejected-by-image-check",
                                            "parse-failed",
                                            "skipped"};
    REQUIRE(result.audit.size() == 18);
    for (const CandidateRecord& record : result.audit)
        CHECK(statuses.count(record.status) == 1);
    CHECK(result.stats.telescopes());
}

TEST_CASE("the pipeline counters match the scripted scenario") {
    ExtensionFixture fx;
    ExtensionResult result = fx.run(1);
    CHECK(result.stats.subjects == 5);
    CHECK(result.stats.queries == 17);
    CHECK(result.stats.raw_tail_count == 8);
    CHECK(result.stats.raw_candidates == 15);
    CHECK(result.stats.duplicates_kg == 4);
    CHECK(result.stats.duplicates_cross == 1);
    CHECK(result.stats.rejected_image == 2);
    CHECK(result.stats.accepted == 8);
    CHECK(result.stats.parse_failures == 1);
    CHECK(result.stats.skipped_queries == 2);
}

TEST_CASE("near duplicates of existing tails are filtered, new phrases pass") {
    ExtensionFixture fx;
    ExtensionResult result = fx.run(1);

    std::map<std::string, const CandidateRecord*> by_surface;
    for (const CandidateRecord& record : result.audit)
        if (!record.surface.empty()) by_surface[record.surface] = &record;

    REQUIRE(by_surface.count("St. George"));
    CHECK(by_surface["St. George"]->status == "duplicate-of-kg");
    CHECK(by_surface["St. George"]->nearest == "urn:jcd/thing/saint-george");
    CHECK(by_surface["St. George"]->similarity > 0.999);

    REQUIRE(by_surface.count("horse"));
    CHECK(by_surface["horse"]->status == "accepted");
    REQUIRE(by_surface.count("jousting"));
    CHECK(by_surface["jousting"]->status == "accepted");

    REQUIRE(by_surface.count("dragon"));
    CHECK(by_surface["dragon"]->status == "duplicate-of-kg");
    CHECK(by_surface["dragon"]->similarity == 1.0);

    REQUIRE(by_surface.count("white horse"));
    CHECK(by_surface["white horse"]->status == "duplicate-cross-model");
    CHECK(by_surface["white horse"]->nearest == "horse");
    CHECK(by_surface["white horse"]->similarity ==
          doctest::Approx(0.7071067811865475).epsilon(1e-9));

    REQUIRE(by_surface.count("oak tree"));
    CHECK(by_surface["oak tree"]->status == "duplicate-of-kg");
    CHECK(by_surface["oak tree"]->nearest == "urn:jcd/thing/tree");

    REQUIRE(by_surface.count("curtains"));
    CHECK(by_surface["curtains"]->status == "rejected-by-image-check");
    REQUIRE(by_surface.count("ghost"));
    CHECK(by_surface["ghost"]->status == "rejected-by-image-check");
    CHECK(by_surface["ghost"]->nearest == "unparseable judgment");
}

TEST_CASE("accepted candidates sit below the similarity threshold") {
    ExtensionFixture fx;
    ExtensionResult result = fx.run(1);
    std::size_t accepted_rows = 0;
    for (const CandidateRecord& record : result.audit) {
        if (record.status != "accepted") continue;
        ++accepted_rows;
        CHECK(record.similarity < 0.4);
        CHECK(record.nearest.rfind("urn:", 0) == 0);
    }
    CHECK(accepted_rows == result.accepted.size());

    std::vector<std::string> phrases;
    for (const AcceptedCandidate& cand : result.accepted) phrases.push_back(cand.phrase);
    CHECK(phrases == std::vector<std::string>{"horse", "jousting", "armour", "lance", "lily",
                                              "sky", "boat", "sunset"});
}

TEST_CASE("accepted phrases stay dissimilar to every pre-existing tail") {
    ExtensionFixture fx;
    ExtensionResult result = fx.run(1);
    std::vector<std::string> tail_labels;
    for (std::uint64_t key : fx.kg.pairs(fx.depicts))
        tail_labels.push_back(
            fx.lexicon.entity_display(fx.kg, static_cast<EntityId>(key & 0xffffffffu)));
    REQUIRE(!tail_labels.empty());
    for (const AcceptedCandidate& cand : result.accepted)
        for (const std::string& label : tail_labels)
            CHECK(fx.vectors.phrase_similarity(cand.phrase, label) < 0.4);
}

TEST_CASE("sides without context are skipped, double parse failures recorded") {
    ExtensionFixture fx;
    ExtensionResult result = fx.run(1);

    std::vector<std::pair<std::string, std::string>> skips;  // source, reason
    for (const CandidateRecord& record : result.audit)
        if (record.status == "skipped") skips.emplace_back(record.source, record.nearest);
    REQUIRE(skips.size() == 2);
    CHECK(skips[0] == std::pair<std::string, std::string>{"text", "missing description (en)"});
    CHECK(skips[1] == std::pair<std::string, std::string>{"vision", "missing image"});

    const CandidateRecord* failed = nullptr;
    for (const CandidateRecord& record : result.audit)
        if (record.status == "parse-failed") failed = &record;
    REQUIRE(failed != nullptr);
    CHECK(failed->source == "text");
    CHECK(fx.kg.entity_iri(failed->subject) == "urn:jcd/work/badparse");
    CHECK(failed->surface.empty());
}

TEST_CASE("merging grows entities and triples by exactly the accepted count") {
    ExtensionFixture fx;
    ExtensionResult result = fx.run(1);
    MergeResult merged = merge_extension(fx.kg, result.accepted, "run7");

    CHECK(merged.new_triples == result.accepted.size());
    CHECK(merged.new_entities.size() == result.accepted.size());
    CHECK(merged.merged.size() == fx.kg.size() + result.accepted.size());
    CHECK(merged.merged.entity_count() == fx.kg.entity_count() + result.accepted.size());
    CHECK(merged.merged.relation_count() == fx.kg.relation_count());

    auto holds = [&](const std::string& h, const std::string& r, const std::string& t) {
        auto he = merged.merged.find_entity(h);
        auto re = merged.merged.find_relation(r);
        auto te = merged.merged.find_entity(t);
        return he && re && te && merged.merged.contains(*he, *re, *te);
    };
    for (const Triple& t : fx.kg.triples())
        CHECK(holds(fx.kg.entity_iri(t.head), fx.kg.relation_iri(t.relation),
                    fx.kg.entity_iri(t.tail)));
    for (const auto& [iri, phrase] : merged.new_entities) {
        CHECK(iri.rfind("urn:kgex:gen/run7/", 0) == 0);
        CHECK(!phrase.empty());
    }
    CHECK(holds("urn:jcd/work/george", "urn:jcd/prop/depicts",
                "urn:kgex:gen/run7/text/horse"));
}

TEST_CASE("minted IRIs add a numeric suffix on collision") {
    TripleSet kg;
    kg.add("urn:e/a", "urn:r/p", "urn:e/b");
    std::vector<AcceptedCandidate> accepted = {
        AcceptedCandidate{0, 0, "horse", "text"},
        AcceptedCandidate{0, 0, "horse", "text"},
        AcceptedCandidate{0, 0, "horse", "vision"},
    };
    MergeResult merged = merge_extension(kg, accepted, "r");
    REQUIRE(merged.new_entities.size() == 3);
    CHECK(merged.new_entities[0].first == "urn:kgex:gen/r/text/horse");
    CHECK(merged.new_entities[1].first == "urn:kgex:gen/r/text/horse-2");
    CHECK(merged.new_entities[2].first == "urn:kgex:gen/r/vision/horse");
    CHECK(merged.merged.size() == 4);
    CHECK(merged.merged.entity_count() == 5);
}

TEST_CASE("the stats writer reports stage counts and growth") {
    ExtensionFixture fx;
    ExtensionResult result = fx.run(1);
    MergeResult merged = merge_extension(fx.kg, result.accepted);
    std::ostringstream out;
    write_extension_stats(out, result.stats, fx.kg, merged.merged);
    std::string text = out.str();
    CHECK(text.find("triples: 8 -> 16") != std::string::npos);
    CHECK(text.find("entities: 13 -> 21") != std::string::npos);
    CHECK(text.find("relations: 1 -> 1") != std::string::npos);
    CHECK(text.find("raw candidates: 15") != std::string::npos);
    CHECK(text.find("accepted: 8") != std::string::npos);
    CHECK(text.find("raw/existing ratio: 1.8750") != std::string::npos);
    CHECK(text.find("accepted/existing ratio: 1.0000") != std::string::npos);
}

TEST_CASE("option validation rejects impossible settings") {
    ExtensionFixture fx;
    ReplayClient text(kgex::test::fixture("extension") / "replay");

    ExtensionOptions no_relations;
    CHECK_THROWS_AS(run_extension(fx.kg, fx.lexicon, fx.vectors, text, nullptr, no_relations),
                    ConfigError);

    ExtensionOptions bad_tau = fx.options(1);
    bad_tau.tau = 1.0;
    CHECK_THROWS_AS(run_extension(fx.kg, fx.lexicon, fx.vectors, text, nullptr, bad_tau),
                    ConfigError);

    ExtensionOptions out_of_range = fx.options(1);
    out_of_range.relations = {99};
    CHECK_THROWS_AS(run_extension(fx.kg, fx.lexicon, fx.vectors, text, nullptr, out_of_range),
                    ConfigError);
}

TEST_CASE("transport failures surface from any thread count") {
    ExtensionFixture fx;
    kgex::test::FailOnUseClient down;
    for (std::size_t threads : {1ul, 4ul})
        CHECK_THROWS_AS(
            run_extension(fx.kg, fx.lexicon, fx.vectors, down, nullptr, fx.options(threads)),
            TransportError);
}

TEST_CASE("text-only runs skip image checks and vision rows entirely") {
    ExtensionFixture fx;
    ReplayClient text(kgex::test::fixture("extension") / "replay");
    ExtensionResult result =
        run_extension(fx.kg, fx.lexicon, fx.vectors, text, nullptr, fx.options(1));
    for (const CandidateRecord& record : result.audit) CHECK(record.source != "vision");
    // Without the image check, the curtains and ghost candidates survive.
    std::size_t accepted = 0;
    for (const CandidateRecord& record : result.audit)
        if (record.status == "accepted") ++accepted;
    CHECK(accepted == 8);
    CHECK(result.stats.rejected_image == 0);
}
