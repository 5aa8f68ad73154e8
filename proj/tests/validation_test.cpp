#include "doctest.h"

#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "kgex/error.hpp"
#include "kgex/extend.hpp"
#include "kgex/validation.hpp"
#include "kgex/word_vectors.hpp"
#include "support.hpp"

using namespace kgex;

namespace {

struct RecoveryFixture {
    TripleSet kg;
    Lexicon lexicon;
    RelationId depicts = 0;

    RecoveryFixture() {
        auto dir = kgex::test::fixture("extension");
        kg = parse_triples(dir / "kg.csv").set;
        LexiconPaths paths;
        paths.entity_labels = dir / "entity_labels.csv";
        paths.relation_labels = dir / "relation_labels.csv";
        paths.descriptions["en"] = dir / "descriptions_en.csv";
        paths.image_dir = dir / "images";
        lexicon = load_lexicon(kg, paths);
        depicts = *kg.find_relation("urn:jcd/prop/depicts");
    }

    std::vector<RecoveryResult> run(std::size_t threads) const {
        ReplayClient text(kgex::test::fixture("extension") / "replay");
        ReplayClient vision(kgex::test::fixture("extension") / "replay");
        RecoveryOptions options;
        options.threads = threads;
        return recover_ground_truth(kg, lexicon, depicts, &text, &vision, options);
    }
};

class AlwaysYesClient : public ModelClient {
public:
    ModelResponse complete(const ModelRequest&) override { return ModelResponse{"yes"}; }
};

PrecisionReport report_from_text(const std::string& text) {
    std::istringstream in(text);
    return compute_precision(in);
}

std::vector<std::string> load_surfaces() {
    std::ifstream in(kgex::test::fixture("taxonomy_surfaces.txt"));
    REQUIRE(in.good());
    std::vector<std::string> surfaces;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) surfaces.push_back(line);
    return surfaces;
}

}  // namespace

TEST_CASE("f1 follows from recall when precision is one") {
    CHECK(std::abs(f1_from_recall(0.722) - 0.839) < 0.001);
    CHECK(std::abs(f1_from_recall(0.848) - 0.918) < 0.001);
    CHECK(std::abs(f1_from_recall(0.902) - 0.948) < 0.001);
    CHECK(f1_from_recall(1.0) == 1.0);
    CHECK(f1_from_recall(0.0) == 0.0);
    for (double r = 0.05; r < 1.0; r += 0.05)
        CHECK(f1_from_recall(r) > f1_from_recall(r - 0.05));
}

TEST_CASE("ground truth recovery tallies the scripted answers per model") {
    RecoveryFixture fx;
    auto results = fx.run(1);
    REQUIRE(results.size() == 3);

    CHECK(results[0].model == "text-model");
    CHECK(results[0].queried == 8);
    CHECK(results[0].recognized == 5);
    CHECK(results[0].failures == 0);
    CHECK(results[0].skipped == 0);
    CHECK(results[0].recall() == doctest::Approx(0.625).epsilon(1e-12));

    CHECK(results[1].model == "vision-model");
    CHECK(results[1].queried == 7);
    CHECK(results[1].recognized == 3);
    CHECK(results[1].skipped == 1);
    CHECK(results[1].recall() == doctest::Approx(3.0 / 7.0).epsilon(1e-12));
    CHECK(results[1].f1() == doctest::Approx(0.6).epsilon(1e-12));

    CHECK(results[2].model == "combined");
    CHECK(results[2].queried == 8);
    CHECK(results[2].recognized == 6);
    CHECK(results[2].skipped == 0);
    CHECK(results[2].recall() == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("recovery results do not depend on the thread count") {
    RecoveryFixture fx;
    auto one = fx.run(1);
    auto eight = fx.run(8);
    REQUIRE(one.size() == eight.size());
    for (std::size_t i = 0; i < one.size(); ++i) {
        CHECK(one[i].model == eight[i].model);
        CHECK(one[i].queried == eight[i].queried);
        CHECK(one[i].recognized == eight[i].recognized);
        CHECK(one[i].failures == eight[i].failures);
        CHECK(one[i].skipped == eight[i].skipped);
    }
}

TEST_CASE("unparseable verdicts are retried once and then count as no") {
    RecoveryFixture fx;
    kgex::test::ScriptedClient text;
    // One fact per subject; answer only the george triples, garble two.
    text.on("saint-george-and-the-dragon.depicts.recover.saint-george.text", "hard to say");
    text.on("saint-george-and-the-dragon.depicts.recover.saint-george.text.retry", "no");
    text.on("saint-george-and-the-dragon.depicts.recover.dragon.text", "mumble");
    text.on("saint-george-and-the-dragon.depicts.recover.dragon.text.retry", "mumble again");
    text.on("saint-george-and-the-dragon.depicts.recover.man.text", "Yes.");
    auto results = recover_ground_truth(fx.kg, fx.lexicon, fx.depicts, &text, nullptr, {});
    REQUIRE(results.size() == 1);
    // Remaining five facts hit missing script keys and fail transport.
    CHECK(results[0].queried == 3);
    CHECK(results[0].recognized == 1);
    CHECK(results[0].failures == 5);
}

TEST_CASE("transport failures leave the recall denominator") {
    RecoveryFixture fx;
    kgex::test::FailOnUseClient down;
    auto results = recover_ground_truth(fx.kg, fx.lexicon, fx.depicts, &down, nullptr, {});
    REQUIRE(results.size() == 1);
    CHECK(results[0].queried == 0);
    CHECK(results[0].failures == 8);
    CHECK(results[0].recall() == 0.0);
}

TEST_CASE("a model that always answers yes reaches full recall") {
    RecoveryFixture fx;
    AlwaysYesClient agreeable;
    auto results = recover_ground_truth(fx.kg, fx.lexicon, fx.depicts, &agreeable, nullptr, {});
    REQUIRE(results.size() == 1);
    CHECK(results[0].queried == 8);
    CHECK(results[0].recall() == 1.0);
    CHECK(results[0].f1() == 1.0);
}

TEST_CASE("recovery validates its inputs") {
    RecoveryFixture fx;
    CHECK_THROWS_AS(recover_ground_truth(fx.kg, fx.lexicon, fx.depicts, nullptr, nullptr, {}),
                    ConfigError);
    AlwaysYesClient client;
    CHECK_THROWS_AS(recover_ground_truth(fx.kg, fx.lexicon, 42, &client, nullptr, {}),
                    ConfigError);
}

TEST_CASE("recovery csv lists one row per model") {
    RecoveryFixture fx;
    auto results = fx.run(1);
    std::ostringstream out;
    write_recovery_csv(out, results);
    std::string text = out.str();
    CHECK(text.find("model,queried,recognized,failures,skipped,recall,f1") == 0);
    CHECK(text.find("text-model,8,5,0,0,") != std::string::npos);
    CHECK(text.find("combined,8,6,0,0,") != std::string::npos);
}

TEST_CASE("annotator precision matches the audited fixture") {
    PrecisionReport report = compute_precision(kgex::test::fixture("annotations.csv"));
    CHECK(report.rows == 50);
    REQUIRE(report.per_annotator.size() == 2);
    CHECK(report.per_annotator[0].first == "annotator-a");
    CHECK(report.per_annotator[0].second == doctest::Approx(0.92).epsilon(1e-12));
    CHECK(report.per_annotator[1].first == "annotator-b");
    CHECK(report.per_annotator[1].second == doctest::Approx(0.92).epsilon(1e-12));
    CHECK(report.mean_precision() == doctest::Approx(0.92).epsilon(1e-12));
}

TEST_CASE("precision is invariant under row order") {
    std::ifstream in(kgex::test::fixture("annotations.csv"));
    std::string header, line;
    std::getline(in, header);
    std::vector<std::string> rows;
    while (std::getline(in, line))
        if (!line.empty()) rows.push_back(line);
    std::mt19937_64 rng(71);
    std::shuffle(rows.begin(), rows.end(), rng);
    std::string shuffled = header + "\n";
    for (const std::string& row : rows) shuffled += row + "\n";

    PrecisionReport base = compute_precision(kgex::test::fixture("annotations.csv"));
    PrecisionReport reordered = report_from_text(shuffled);
    CHECK(reordered.rows == base.rows);
    REQUIRE(reordered.per_annotator.size() == base.per_annotator.size());
    for (std::size_t i = 0; i < base.per_annotator.size(); ++i) {
        CHECK(reordered.per_annotator[i].first == base.per_annotator[i].first);
        CHECK(reordered.per_annotator[i].second == base.per_annotator[i].second);
    }
}

TEST_CASE("annotators weigh equally regardless of row counts") {
    std::string text = "candidate,subject,relation,annotator,label\n";
    for (int i = 0; i < 8; ++i) text += "c,s,r,alice,correct\n";
    for (int i = 0; i < 2; ++i) text += "c,s,r,alice,incorrect\n";
    for (int i = 0; i < 9; ++i) text += "c,s,r,bob,correct\n";
    text += "c,s,r,bob,incorrect\n";
    for (int i = 0; i < 5; ++i) text += "c,s,r,bob,correct\n";  // extra rows, still 14/16
    PrecisionReport report = report_from_text(text);
    REQUIRE(report.per_annotator.size() == 2);
    CHECK(report.per_annotator[0].second == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(report.per_annotator[1].second == doctest::Approx(14.0 / 15.0).epsilon(1e-12));
    CHECK(report.mean_precision() ==
          doctest::Approx((0.8 + 14.0 / 15.0) / 2.0).epsilon(1e-12));
}

TEST_CASE("malformed annotation files are parse errors with line numbers") {
    CHECK_THROWS_AS(report_from_text("candidate,subject\nc,s\n"), ParseError);
    try {
        report_from_text("candidate,annotator,label\nc,alice,maybe\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        std::string what = e.what();
        CHECK(what.find("maybe") != std::string::npos);
        CHECK(what.find("line 2") != std::string::npos);
    }
    CHECK_THROWS_AS(report_from_text(""), ParseError);
}

TEST_CASE("precision pools tallies across several files") {
    auto dir = std::filesystem::temp_directory_path() / "kgex_precision_test";
    std::filesystem::create_directories(dir);
    auto a = dir / "a.csv", b = dir / "b.csv";
    {
        std::ofstream out(a);
        out << "candidate,annotator,label\nc1,alice,correct\nc2,alice,incorrect\n";
    }
    {
        std::ofstream out(b);
        out << "candidate,annotator,label\nc3,alice,correct\nc4,alice,correct\n";
    }
    std::vector<std::filesystem::path> paths = {a, b};
    PrecisionReport report = compute_precision(paths);
    CHECK(report.rows == 4);
    REQUIRE(report.per_annotator.size() == 1);
    CHECK(report.per_annotator[0].second == doctest::Approx(0.75).epsilon(1e-12));
    std::filesystem::remove_all(dir);
}

TEST_CASE("taxonomy classification is first substring hit in file order") {
    std::istringstream in(
        "category,keyword\n"
        "animal,horse\n"
        "action,riding\n"
        "color,white\n");
    TaxonomyMap map = TaxonomyMap::load(in);
    CHECK(map.rule_count() == 3);
    CHECK(map.classify("White Horse") == "animal");   // horse rule wins, listed first
    CHECK(map.classify("riding boots") == "action");
    CHECK(map.classify("white cloth") == "color");
    CHECK(map.classify("a ship at sea") == TaxonomyMap::kUnknown);
    CHECK(map.categories() == std::vector<std::string>{"animal", "action", "color"});
}

TEST_CASE("malformed taxonomy rows are parse errors") {
    std::istringstream missing("category,keyword\nanimal\n");
    CHECK_THROWS_AS(TaxonomyMap::load(missing), ParseError);
    std::istringstream blank("category,keyword\nanimal,\n");
    CHECK_THROWS_AS(TaxonomyMap::load(blank), ParseError);
}

TEST_CASE("the starter taxonomy reproduces the audited distribution") {
    TaxonomyMap map = TaxonomyMap::load(kgex::test::data_file("starter_taxonomy.csv"));
    std::vector<std::string> surfaces = load_surfaces();
    REQUIRE(surfaces.size() == 200);

    auto counts = category_counts(surfaces, map);
    const std::map<std::string, std::uint64_t> expected = {
        {"action", 14},   {"animal", 16},  {"body part", 14}, {"building", 16},
        {"clothing", 16}, {"color", 12},   {"material", 12},  {"nature", 20},
        {"object", 20},   {"person", 14},  {"religious", 12}, {"scene", 10},
        {"style", 8},     {"unknown", 16},
    };
    CHECK(counts == expected);

    auto distribution = taxonomy_distribution(surfaces, map);
    double sum = 0.0;
    for (const auto& [category, pct] : distribution) sum += pct;
    CHECK(std::abs(sum - 100.0) <= 0.1);
}

TEST_CASE("unknown captures exactly the unmapped surfaces") {
    TaxonomyMap map = TaxonomyMap::load(kgex::test::data_file("starter_taxonomy.csv"));
    std::set<std::string> unknown;
    for (const std::string& surface : load_surfaces())
        if (map.classify(surface) == TaxonomyMap::kUnknown) unknown.insert(surface);
    const std::set<std::string> expected = {
        "atelier mark",   "c. 1612",        "estate stamp",       "inv-88412",
        "lot 441",        "monogrammist",   "pentimento",         "provenance gap",
        "q14623",         "quadrille pattern", "salon entry",     "unidentified sitter",
        "untitled 7",     "verso inscription", "x-ray plate",     "zephyr motif",
    };
    CHECK(unknown == expected);
}

TEST_CASE("distribution csv reports counts and two-decimal percentages") {
    std::map<std::string, std::uint64_t> counts = {{"animal", 1}, {"unknown", 3}};
    std::ostringstream out;
    write_distribution_csv(out, counts);
    std::string text = out.str();
    CHECK(text.find("category,count,percentage") == 0);
    CHECK(text.find("animal,1,25.00") != std::string::npos);
    CHECK(text.find("unknown,3,75.00") != std::string::npos);
}

TEST_CASE("percentages sum to one hundred for random surface samples") {
    TaxonomyMap map = TaxonomyMap::load(kgex::test::data_file("starter_taxonomy.csv"));
    std::vector<std::string> pool = load_surfaces();
    std::mt19937_64 rng(72);
    for (int trial = 0; trial < 10; ++trial) {
        std::shuffle(pool.begin(), pool.end(), rng);
        std::size_t take = 1 + rng() % pool.size();
        std::vector<std::string> sample(pool.begin(), pool.begin() + take);
        auto distribution = taxonomy_distribution(sample, map);
        double sum = 0.0;
        for (const auto& [category, pct] : distribution) sum += pct;
        CHECK(std::abs(sum - 100.0) <= 0.1);
    }
}
