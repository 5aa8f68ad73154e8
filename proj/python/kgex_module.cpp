#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "kgex/checkpoint.hpp"
#include "kgex/cleaning.hpp"
#include "kgex/embedding.hpp"
#include "kgex/error.hpp"
#include "kgex/eval.hpp"
#include "kgex/extend.hpp"
#include "kgex/lexicon.hpp"
#include "kgex/model_client.hpp"
#include "kgex/profile.hpp"
#include "kgex/split.hpp"
#include "kgex/stats.hpp"
#include "kgex/training.hpp"
#include "kgex/triple_set.hpp"
#include "kgex/validation.hpp"
#include "kgex/word_vectors.hpp"

namespace py = pybind11;
using namespace kgex;

namespace {

EmbeddingConfig config_from_dict(const py::dict& values) {
    KeyValueConfig kv;
    for (auto item : values)
        kv.set(py::cast<std::string>(item.first), py::cast<std::string>(py::str(item.second)));
    return EmbeddingConfig::from_config(kv);
}

}  // namespace

PYBIND11_MODULE(_kgex, m) {
    m.doc() = "Knowledge graph cleaning, embedding benchmark and open-world extension";

    py::register_exception<Error>(m, "KgexError", PyExc_RuntimeError);

    py::class_<Triple>(m, "Triple")
        .def(py::init<EntityId, RelationId, EntityId>())
        .def_readwrite("head", &Triple::head)
        .def_readwrite("relation", &Triple::relation)
        .def_readwrite("tail", &Triple::tail)
        .def("__eq__", [](const Triple& a, const Triple& b) { return a == b; })
        .def("__repr__", [](const Triple& t) {
            std::ostringstream out;
            out << "Triple(" << t.head << ", " << t.relation << ", " << t.tail << ")";
            return out.str();
        });

    py::class_<TripleSet>(m, "TripleSet")
        .def(py::init<>())
        .def("intern_entity",
             [](TripleSet& s, const std::string& iri) { return s.intern_entity(iri); })
        .def("intern_relation",
             [](TripleSet& s, const std::string& iri) { return s.intern_relation(iri); })
        .def("add",
             [](TripleSet& s, const std::string& h, const std::string& r, const std::string& t) {
                 return s.add(h, r, t);
             })
        .def("contains", [](const TripleSet& s, EntityId h, RelationId r, EntityId t) {
            return s.contains(h, r, t);
        })
        .def("entity_iri",
             [](const TripleSet& s, EntityId id) { return s.entity_iri(id); })
        .def("relation_iri",
             [](const TripleSet& s, RelationId id) { return s.relation_iri(id); })
        .def("find_entity", [](const TripleSet& s, const std::string& iri) {
            return s.find_entity(iri);
        })
        .def("find_relation", [](const TripleSet& s, const std::string& iri) {
            return s.find_relation(iri);
        })
        .def_property_readonly("entity_count", &TripleSet::entity_count)
        .def_property_readonly("relation_count", &TripleSet::relation_count)
        .def("triples", &TripleSet::triples, py::return_value_policy::reference_internal)
        .def("__len__", &TripleSet::size);

    m.def(
        "parse_triples",
        [](const std::filesystem::path& path) {
            ParseResult result = parse_triples(path);
            return py::make_tuple(std::move(result.set), result.raw_records, result.collapsed);
        },
        py::arg("path"),
        "Parse a from,rel,to CSV; returns (set, raw_records, distinct_triples)");

    py::class_<GraphStats>(m, "GraphStats")
        .def_readonly("triple_count", &GraphStats::triple_count)
        .def_readonly("distinct_entity_count", &GraphStats::distinct_entity_count)
        .def_readonly("subject_entity_count", &GraphStats::subject_entity_count)
        .def_readonly("object_entity_count", &GraphStats::object_entity_count)
        .def_readonly("both_positions_count", &GraphStats::both_positions_count)
        .def_readonly("subject_object_sum", &GraphStats::subject_object_sum)
        .def_readonly("relation_count", &GraphStats::relation_count);

    m.def(
        "compute_stats",
        [](const TripleSet& set) { return compute_stats(set); }, py::arg("set"));

    py::class_<RelationProfile>(m, "RelationProfile")
        .def_readonly("relation", &RelationProfile::relation)
        .def_readonly("triple_count", &RelationProfile::triple_count)
        .def_readonly("tph", &RelationProfile::tph)
        .def_readonly("hpt", &RelationProfile::hpt)
        .def_property_readonly("cardinality", [](const RelationProfile& p) {
            return std::string(cardinality_name(p.cardinality));
        });

    m.def("profile_relations", &profile_relations, py::arg("set"));

    py::class_<CleaningPlan>(m, "CleaningPlan")
        .def(py::init<>())
        .def_readwrite("overlap_threshold", &CleaningPlan::overlap_threshold)
        .def_readwrite("name_patterns", &CleaningPlan::name_patterns)
        .def_readwrite("manual_removals", &CleaningPlan::manual_removals)
        .def_readwrite("min_frequency", &CleaningPlan::min_frequency);

    m.def(
        "apply_cleaning",
        [](const TripleSet& set, const CleaningPlan& plan,
           const std::map<std::string, std::string>& relation_labels) {
            Lexicon lexicon;
            for (const auto& [iri, label] : relation_labels)
                if (auto id = set.find_relation(iri)) lexicon.set_relation_label(*id, label);
            auto [cleaned, report] = apply_cleaning(set, lexicon, plan);
            py::dict summary;
            summary["triples_before"] = report.triples_before;
            summary["triples_after"] = report.triples_after;
            summary["relations_before"] = report.relations_before;
            summary["relations_after"] = report.relations_after;
            return py::make_tuple(std::move(cleaned), summary);
        },
        py::arg("set"), py::arg("plan") = CleaningPlan{},
        py::arg("relation_labels") = std::map<std::string, std::string>{},
        "Name patterns match against the supplied labels; returns (set, summary dict)");

    m.def(
        "split_dataset",
        [](const TripleSet& set, double train, double valid, double test, std::uint64_t seed) {
            DatasetSplit split = split_dataset(set, SplitRatios{train, valid, test}, seed);
            return py::make_tuple(std::move(split.train), std::move(split.valid),
                                  std::move(split.test));
        },
        py::arg("set"), py::arg("train") = 0.8, py::arg("valid") = 0.1, py::arg("test") = 0.1,
        py::arg("seed") = 0);

    py::class_<ModelParams>(m, "ModelParams")
        .def_property_readonly("kind",
                               [](const ModelParams& p) {
                                   return std::string(model_kind_name(p.kind));
                               })
        .def_readonly("entity_dim", &ModelParams::entity_dim)
        .def_readonly("relation_dim", &ModelParams::relation_dim)
        .def_readonly("entity_count", &ModelParams::entity_count)
        .def_readonly("relation_count", &ModelParams::relation_count)
        .def_readonly("seed", &ModelParams::seed);

    m.def(
        "train_model",
        [](const TripleSet& train, const py::dict& config) {
            TrainingResult result = train_model(train, config_from_dict(config));
            return py::make_tuple(std::move(result.params), result.epoch_losses);
        },
        py::arg("train"), py::arg("config"),
        "Train from a config dict (model, entity_dim, epochs, ...); returns (params, losses)");

    m.def(
        "score",
        [](const ModelParams& params, EntityId h, RelationId r, EntityId t) {
            return score(params, Triple{h, r, t});
        },
        py::arg("params"), py::arg("head"), py::arg("relation"), py::arg("tail"));

    m.def(
        "gradient_check",
        [](const TripleSet& train, const py::dict& config, std::size_t max_triples,
           double epsilon) {
            GradientCheckReport report =
                gradient_check(train, config_from_dict(config), max_triples, epsilon);
            return py::make_tuple(report.max_relative_deviation, report.checked_parameters);
        },
        py::arg("train"), py::arg("config"), py::arg("max_triples") = 4,
        py::arg("epsilon") = 1e-5);

    m.def("save_checkpoint",
          [](const ModelParams& params, const std::filesystem::path& path) {
              save_checkpoint(params, path);
          });
    m.def("load_checkpoint",
          [](const std::filesystem::path& path) { return load_checkpoint(path); });

    py::class_<RankingMetrics>(m, "RankingMetrics")
        .def_readonly("mean_rank", &RankingMetrics::mean_rank)
        .def_readonly("mrr", &RankingMetrics::mrr)
        .def_readonly("hits1", &RankingMetrics::hits1)
        .def_readonly("hits3", &RankingMetrics::hits3)
        .def_readonly("hits10", &RankingMetrics::hits10)
        .def_readonly("queries", &RankingMetrics::queries);

    m.def(
        "evaluate",
        [](const ModelParams& params, const TripleSet& test, const TripleSet& train,
           const std::vector<const TripleSet*>& filter_parts, const std::string& setting,
           std::size_t threads) {
            FilterIndex filter;
            for (const TripleSet* part : filter_parts) filter.add(*part);
            EvalOptions options;
            options.setting = setting == "raw" ? EvalSetting::Raw : EvalSetting::Filtered;
            options.threads = threads;
            return evaluate(params, test, train, &filter, options);
        },
        py::arg("params"), py::arg("test"), py::arg("train"), py::arg("filter_parts"),
        py::arg("setting") = "filtered", py::arg("threads") = 1);

    py::class_<WordVectors>(m, "WordVectors")
        .def_static("load",
                    [](const std::filesystem::path& path) { return WordVectors::load(path); })
        .def("phrase_similarity",
             [](const WordVectors& v, const std::string& a, const std::string& b) {
                 return v.phrase_similarity(a, b);
             })
        .def_property_readonly("dim", &WordVectors::dim)
        .def("__len__", &WordVectors::size);

    py::class_<AcceptedCandidate>(m, "AcceptedCandidate")
        .def(py::init([](EntityId subject, RelationId relation, const std::string& phrase,
                         const std::string& source) {
                 return AcceptedCandidate{subject, relation, phrase, source};
             }),
             py::arg("subject"), py::arg("relation"), py::arg("phrase"),
             py::arg("source") = "text")
        .def_readonly("subject", &AcceptedCandidate::subject)
        .def_readonly("relation", &AcceptedCandidate::relation)
        .def_readonly("phrase", &AcceptedCandidate::phrase)
        .def_readonly("source", &AcceptedCandidate::source);

    py::class_<CandidateRecord>(m, "CandidateRecord")
        .def_readonly("subject", &CandidateRecord::subject)
        .def_readonly("relation", &CandidateRecord::relation)
        .def_readonly("surface", &CandidateRecord::surface)
        .def_readonly("source", &CandidateRecord::source)
        .def_readonly("nearest", &CandidateRecord::nearest)
        .def_readonly("similarity", &CandidateRecord::similarity)
        .def_readonly("status", &CandidateRecord::status);

    m.def(
        "run_replay_extension",
        [](const TripleSet& kg, const std::filesystem::path& replay_dir,
           const WordVectors& vectors, const std::vector<RelationId>& relations,
           const std::map<std::string, std::string>& descriptions, double tau,
           std::size_t threads) {
            Lexicon lexicon;
            for (const auto& [iri, text] : descriptions)
                if (auto id = kg.find_entity(iri)) lexicon.set_description(*id, "en", text);
            ReplayClient text(replay_dir);
            ExtensionOptions options;
            options.relations = relations;
            options.tau = tau;
            options.threads = threads;
            ExtensionResult result = run_extension(kg, lexicon, vectors, text, nullptr, options);
            return py::make_tuple(result.audit, result.accepted);
        },
        py::arg("kg"), py::arg("replay_dir"), py::arg("vectors"), py::arg("relations"),
        py::arg("descriptions"), py::arg("tau") = 0.4, py::arg("threads") = 1,
        "Text-only extension against replay fixtures; returns (audit, accepted)");

    m.def(
        "merge_extension",
        [](const TripleSet& kg, const std::vector<AcceptedCandidate>& accepted,
           const std::string& run_id) {
            MergeResult result = merge_extension(kg, accepted, run_id);
            return py::make_tuple(std::move(result.merged), result.new_entities,
                                  result.new_triples);
        },
        py::arg("kg"), py::arg("accepted"), py::arg("run_id") = "run0");

    m.def("f1_from_recall", &f1_from_recall, py::arg("recall"));

    m.def(
        "compute_precision",
        [](const std::filesystem::path& path) {
            PrecisionReport report = compute_precision(path);
            return py::make_tuple(report.per_annotator, report.mean_precision());
        },
        py::arg("path"), "Returns ([(annotator, precision)...], mean)");

    py::class_<TaxonomyMap>(m, "TaxonomyMap")
        .def_static("load",
                    [](const std::filesystem::path& path) { return TaxonomyMap::load(path); })
        .def("classify",
             [](const TaxonomyMap& t, const std::string& surface) { return t.classify(surface); })
        .def_property_readonly("categories", &TaxonomyMap::categories);

    m.def(
        "taxonomy_distribution",
        [](const std::vector<std::string>& surfaces, const TaxonomyMap& taxonomy) {
            return taxonomy_distribution(surfaces, taxonomy);
        },
        py::arg("surfaces"), py::arg("taxonomy"));
}
