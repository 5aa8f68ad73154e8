#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kgex/checkpoint.hpp"
#include "kgex/cleaning.hpp"
#include "kgex/config.hpp"
#include "kgex/csv.hpp"
#include "kgex/embedding.hpp"
#include "kgex/error.hpp"
#include "kgex/eval.hpp"
#include "kgex/extend.hpp"
#include "kgex/lexicon.hpp"
#include "kgex/model_client.hpp"
#include "kgex/profile.hpp"
#include "kgex/prompt.hpp"
#include "kgex/split.hpp"
#include "kgex/stats.hpp"
#include "kgex/strings.hpp"
#include "kgex/training.hpp"
#include "kgex/triple_set.hpp"
#include "kgex/validation.hpp"
#include "kgex/word_vectors.hpp"

namespace {

using namespace kgex;
namespace fs = std::filesystem;

enum class LogLevel { Debug = 0, Info = 1, Warn = 2, Error = 3 };

LogLevel g_log_level = LogLevel::Info;

void log_at(LogLevel level, const std::string& message) {
    if (level < g_log_level) return;
    static const char* names[] = {"debug", "info", "warn", "error"};
    std::cerr << "[" << names[static_cast<int>(level)] << "] " << message << "\n";
}

void log_debug(const std::string& m) { log_at(LogLevel::Debug, m); }
void log_info(const std::string& m) { log_at(LogLevel::Info, m); }
void log_warn(const std::string& m) { log_at(LogLevel::Warn, m); }

struct GlobalArgs {
    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::size_t threads = 1;
    std::string log_level = "info";
    KeyValueConfig config;

    void finalize() {
        if (!config_path.empty()) config = KeyValueConfig::load(config_path);
        config.apply_env_overrides();
        if (!seed_given) seed = static_cast<std::uint64_t>(config.get_int("seed", 0));
        if (log_level == "debug")
            g_log_level = LogLevel::Debug;
        else if (log_level == "info")
            g_log_level = LogLevel::Info;
        else if (log_level == "warn")
            g_log_level = LogLevel::Warn;
        else if (log_level == "error")
            g_log_level = LogLevel::Error;
        else
            throw ConfigError("unknown log level: " + log_level);
    }

    fs::path out(const std::string& name) const { return fs::path(out_dir) / name; }
};

// Sidecar paths shared by the subcommands that need labels or context.
struct SidecarArgs {
    std::string entity_labels;
    std::string relation_labels;
    std::vector<std::string> descriptions;  // lang=path
    std::string image_dir;

    void add_flags(CLI::App* cmd) {
        cmd->add_option("--entity-labels", entity_labels, "Entity label CSV (iri,label)")
            ->check(CLI::ExistingFile);
        cmd->add_option("--relation-labels", relation_labels, "Relation label CSV (iri,label)")
            ->check(CLI::ExistingFile);
        cmd->add_option("--descriptions", descriptions,
                        "Description CSV per language, as lang=path (repeatable)");
        cmd->add_option("--image-dir", image_dir, "Directory of entity images")
            ->check(CLI::ExistingDirectory);
    }

    LexiconPaths paths() const {
        LexiconPaths out;
        if (!entity_labels.empty()) out.entity_labels = entity_labels;
        if (!relation_labels.empty()) out.relation_labels = relation_labels;
        for (const std::string& spec : descriptions) {
            std::size_t eq = spec.find('=');
            if (eq == std::string::npos || eq == 0 || eq + 1 >= spec.size())
                throw ConfigError("--descriptions expects lang=path, got '" + spec + "'");
            out.descriptions[spec.substr(0, eq)] = spec.substr(eq + 1);
        }
        if (!image_dir.empty()) out.image_dir = image_dir;
        return out;
    }
};

std::ofstream open_artifact(const GlobalArgs& global, const std::string& name) {
    return open_output(global.out(name));
}

void seed_comment(std::ostream& out, const GlobalArgs& global) {
    out << "# seed=" << global.seed << "\n";
}

void seed_line(std::ostream& out, const GlobalArgs& global) {
    out << "seed: " << global.seed << "\n";
}

Lexicon load_sidecars(const TripleSet& set, const SidecarArgs& sidecars) {
    Lexicon lexicon = load_lexicon(set, sidecars.paths());
    for (const std::string& warning : lexicon.orphan_warnings()) log_warn(warning);
    return lexicon;
}

RelationId resolve_relation(const TripleSet& set, const Lexicon& lexicon,
                            const std::string& wanted) {
    if (auto id = set.find_relation(wanted)) return *id;
    std::string lowered = to_lower(wanted);
    for (RelationId r = 0; r < set.relation_count(); ++r) {
        if (to_lower(lexicon.relation_display(set, r)) == lowered) return r;
        if (to_lower(iri_local_name(set.relation_iri(r))) == lowered) return r;
    }
    throw ConfigError("unknown relation: " + wanted);
}

std::vector<RelationId> default_visual_relations(const TripleSet& set, const Lexicon& lexicon) {
    std::vector<RelationId> out;
    for (RelationId r = 0; r < set.relation_count(); ++r) {
        if (to_lower(lexicon.relation_display(set, r)) == "depicts" ||
            to_lower(iri_local_name(set.relation_iri(r))) == "depicts")
            out.push_back(r);
    }
    return out;
}

void write_triples_artifact(const GlobalArgs& global, const std::string& name,
                            const TripleSet& set) {
    std::ofstream out = open_artifact(global, name);
    seed_comment(out, global);
    set.write_csv(out);
    if (!out) throw IoError("failed to write " + name);
}

// ---------------------------------------------------------------------------
// ingest

struct IngestArgs {
    std::string triples;
    SidecarArgs sidecars;
};

void run_ingest(const GlobalArgs& global, const IngestArgs& args) {
    ParseResult parsed = parse_triples(fs::path(args.triples));
    Lexicon lexicon = load_sidecars(parsed.set, args.sidecars);

    write_triples_artifact(global, "dataset.csv", parsed.set);

    std::ofstream report = open_artifact(global, "ingest.txt");
    seed_line(report, global);
    report << "source: " << args.triples << "\n";
    report << "header detected: " << (parsed.had_header ? "yes" : "no") << "\n";
    report << "raw records: " << parsed.raw_records << "\n";
    report << "distinct triples: " << parsed.collapsed << "\n";
    report << "entities: " << parsed.set.entity_count() << "\n";
    report << "relations: " << parsed.set.relation_count() << "\n";
    report << "entity labels: " << lexicon.labeled_entity_count() << "\n";
    report << "images: " << lexicon.image_count() << "\n";
    for (const auto& [lang, path] : args.sidecars.paths().descriptions) {
        report << "descriptions (" << lang << "): " << lexicon.description_count(lang) << "\n";
        report << "multimodal (" << lang << "): " << lexicon.multimodal_count(lang) << "\n";
    }
    log_info("ingested " + std::to_string(parsed.collapsed) + " triples");
}

// ---------------------------------------------------------------------------
// stats

struct StatsArgs {
    std::string triples;
    SidecarArgs sidecars;
    std::vector<std::string> shared_relations;
};

void run_stats(const GlobalArgs& global, const StatsArgs& args) {
    ParseResult parsed = parse_triples(fs::path(args.triples));
    Lexicon lexicon = load_sidecars(parsed.set, args.sidecars);

    std::vector<RelationId> shared;
    for (const std::string& name : args.shared_relations)
        shared.push_back(resolve_relation(parsed.set, lexicon, name));
    GraphStats stats = compute_stats(parsed.set, shared);

    {
        std::ofstream out = open_artifact(global, "stats.txt");
        seed_line(out, global);
        write_stats_text(out, stats, parsed.set, &lexicon);
    }
    {
        std::ofstream out = open_artifact(global, "stats.csv");
        seed_comment(out, global);
        write_stats_csv(out, stats, parsed.set);
    }

    std::vector<RelationProfile> profiles = profile_relations(parsed.set);
    std::array<std::uint64_t, 4> histogram = cardinality_histogram(profiles);
    {
        std::ofstream out = open_artifact(global, "cardinality.csv");
        seed_comment(out, global);
        out << "relation,pairs,tph,hpt,class\n";
        for (const RelationProfile& p : profiles) {
            out << parsed.set.relation_iri(p.relation) << ',' << p.triple_count << ','
                << format_double(p.tph, 4) << ',' << format_double(p.hpt, 4) << ','
                << cardinality_name(p.cardinality) << '\n';
        }
        out << "# 1-1=" << histogram[0] << " 1-n=" << histogram[1] << " n-1=" << histogram[2]
            << " n-n=" << histogram[3] << "\n";
    }
    log_info("stats written for " + std::to_string(stats.triple_count) + " triples");
}

// ---------------------------------------------------------------------------
// clean

struct CleanArgs {
    std::string triples;
    std::string plan_path;
    SidecarArgs sidecars;
};

void run_clean(const GlobalArgs& global, const CleanArgs& args) {
    ParseResult parsed = parse_triples(fs::path(args.triples));
    Lexicon lexicon = load_sidecars(parsed.set, args.sidecars);
    CleaningPlan plan =
        args.plan_path.empty() ? CleaningPlan{} : CleaningPlan::load(args.plan_path);
    plan.validate();

    auto [cleaned, report] = apply_cleaning(parsed.set, lexicon, plan);
    for (const std::string& warning : report.warnings) log_warn(warning);

    write_triples_artifact(global, "cleaned.csv", cleaned);
    {
        std::ofstream out = open_artifact(global, "cleaning_report.txt");
        seed_line(out, global);
        report.write_text(out, parsed.set, lexicon);
    }
    {
        std::ofstream out = open_artifact(global, "cleaning_report.csv");
        seed_comment(out, global);
        report.write_csv(out, parsed.set);
    }
    log_info("cleaning: " + std::to_string(report.relations_before) + " -> " +
             std::to_string(report.relations_after) + " relations, " +
             std::to_string(report.triples_before) + " -> " +
             std::to_string(report.triples_after) + " triples");
}

// ---------------------------------------------------------------------------
// split

struct SplitArgs {
    std::string triples;
    std::vector<double> ratios = {0.8, 0.1, 0.1};
};

void run_split(const GlobalArgs& global, const SplitArgs& args) {
    if (args.ratios.size() != 3)
        throw ConfigError("--ratios expects three values: train, valid, test");
    ParseResult parsed = parse_triples(fs::path(args.triples));
    SplitRatios ratios{args.ratios[0], args.ratios[1], args.ratios[2]};
    DatasetSplit split = split_dataset(parsed.set, ratios, global.seed);

    write_triples_artifact(global, "train.csv", split.train);
    write_triples_artifact(global, "valid.csv", split.valid);
    write_triples_artifact(global, "test.csv", split.test);

    std::ofstream report = open_artifact(global, "split.txt");
    seed_line(report, global);
    report << "ratios: " << format_double(ratios.train, 4) << "/"
           << format_double(ratios.valid, 4) << "/" << format_double(ratios.test, 4) << "\n";
    report << "train: " << split.train.size() << "\n";
    report << "valid: " << split.valid.size() << "\n";
    report << "test: " << split.test.size() << "\n";
    log_info("split " + std::to_string(parsed.set.size()) + " triples");
}

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
    std::string train_path;
    std::string model;
    std::int64_t epochs = -1;
    std::int64_t dim = -1;
    double learning_rate = -1.0;
    std::int64_t batch_size = -1;
};

void run_train(const GlobalArgs& global, const TrainArgs& args) {
    ParseResult parsed = parse_triples(fs::path(args.train_path));
    EmbeddingConfig config = EmbeddingConfig::from_config(global.config);
    if (!args.model.empty()) config.kind = parse_model_kind(args.model);
    if (args.epochs >= 0) config.epochs = static_cast<std::size_t>(args.epochs);
    if (args.dim > 0) config.entity_dim = static_cast<std::size_t>(args.dim);
    if (args.learning_rate > 0.0) config.learning_rate = args.learning_rate;
    if (args.batch_size > 0) config.batch_size = static_cast<std::size_t>(args.batch_size);
    config.seed = global.seed;
    config.validate();

    log_info("training " + std::string(model_kind_name(config.kind)) + " on " +
             std::to_string(parsed.set.size()) + " triples for " +
             std::to_string(config.epochs) + " epochs");
    TrainingResult result = train_model(parsed.set, config, [&](std::size_t epoch, double loss) {
        log_debug("epoch " + std::to_string(epoch + 1) + " loss " + format_double(loss, 6));
    });

    save_checkpoint(result.params, global.out("model.ckpt"));
    std::ofstream log = open_artifact(global, "train_log.csv");
    seed_comment(log, global);
    log << "epoch,loss\n";
    for (std::size_t i = 0; i < result.epoch_losses.size(); ++i)
        log << (i + 1) << ',' << format_double(result.epoch_losses[i], 6) << '\n';
    log_info("checkpoint written to " + global.out("model.ckpt").string());
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
    std::string checkpoint;
    std::string train_path;
    std::string valid_path;
    std::string test_path;
    std::string setting = "filtered";
    std::string dataset = "dataset";
};

void run_eval(const GlobalArgs& global, const EvalArgs& args) {
    ModelParams params = load_checkpoint(fs::path(args.checkpoint));
    ParseResult train = parse_triples(fs::path(args.train_path));
    TripleSet train_set = std::move(train.set);

    auto reparse = [&](const std::string& path) {
        TripleSet part = TripleSet::with_lexicons_of(train_set);
        ParseResult r = parse_triples(fs::path(path));
        for (const Triple& t : r.set.triples())
            part.add(r.set.entity_iri(t.head), r.set.relation_iri(t.relation),
                     r.set.entity_iri(t.tail));
        return part;
    };
    TripleSet test_set = reparse(args.test_path);
    if (params.entity_count < train_set.entity_count() ||
        params.relation_count < train_set.relation_count())
        throw ConfigError("checkpoint is smaller than the dataset lexicon");

    FilterIndex filter;
    filter.add(train_set);
    filter.add(test_set);
    std::optional<TripleSet> valid_set;
    if (!args.valid_path.empty()) {
        valid_set = reparse(args.valid_path);
        filter.add(*valid_set);
    }

    std::vector<EvalSetting> settings;
    if (args.setting == "raw")
        settings = {EvalSetting::Raw};
    else if (args.setting == "filtered")
        settings = {EvalSetting::Filtered};
    else if (args.setting == "both")
        settings = {EvalSetting::Raw, EvalSetting::Filtered};
    else
        throw ConfigError("--setting must be raw, filtered or both");

    std::vector<MetricsRow> rows;
    for (EvalSetting setting : settings) {
        EvalOptions options;
        options.setting = setting;
        options.threads = global.threads;
        RankingMetrics metrics = evaluate(params, test_set, train_set, &filter, options);
        rows.push_back(MetricsRow{std::string(model_kind_name(params.kind)), args.dataset,
                                  std::string(eval_setting_name(setting)), metrics});
    }

    {
        std::ofstream out = open_artifact(global, "metrics.csv");
        seed_comment(out, global);
        write_metrics_csv(out, rows);
    }
    {
        std::ofstream out = open_artifact(global, "metrics.txt");
        seed_line(out, global);
        out << std::left << std::setw(12) << "model" << std::setw(16) << "dataset"
            << std::setw(10) << "setting" << std::right << std::setw(10) << "MR" << std::setw(9)
            << "MRR" << std::setw(9) << "Hits@1" << std::setw(9) << "Hits@3" << std::setw(9)
            << "Hits@10" << "\n";
        for (const MetricsRow& row : rows) {
            out << std::left << std::setw(12) << row.model << std::setw(16) << row.dataset
                << std::setw(10) << row.setting << std::right << std::setw(10)
                << format_double(row.metrics.mean_rank, 2) << std::setw(9)
                << format_double(row.metrics.mrr, 4) << std::setw(9)
                << format_double(row.metrics.hits1, 4) << std::setw(9)
                << format_double(row.metrics.hits3, 4) << std::setw(9)
                << format_double(row.metrics.hits10, 4) << "\n";
        }
    }
    for (const MetricsRow& row : rows)
        log_info(row.model + " " + row.setting + " MRR " + format_double(row.metrics.mrr, 4));
}

// ---------------------------------------------------------------------------
// shared client plumbing for extend/validate

struct ClientArgs {
    std::string text_endpoint;
    std::string vision_endpoint;
    std::string replay_dir;
    bool no_vision = false;

    void add_flags(CLI::App* cmd) {
        cmd->add_option("--text-endpoint", text_endpoint, "Text model HTTP endpoint");
        cmd->add_option("--vision-endpoint", vision_endpoint, "Vision model HTTP endpoint");
        cmd->add_option("--replay", replay_dir, "Replay fixtures directory (no network)")
            ->check(CLI::ExistingDirectory);
        cmd->add_flag("--no-vision", no_vision, "Run without a vision model");
    }

    // Resolves endpoints from flags or config and builds the clients. In
    // replay mode both sides read fixtures and no network client exists.
    void build(const KeyValueConfig& config, std::unique_ptr<ModelClient>& text,
               std::unique_ptr<ModelClient>& vision) {
        std::string text_ep =
            !text_endpoint.empty() ? text_endpoint : config.get_or("text.endpoint", "");
        std::string vision_ep =
            !vision_endpoint.empty() ? vision_endpoint : config.get_or("vision.endpoint", "");
        std::string replay = !replay_dir.empty() ? replay_dir : config.get_or("replay.dir", "");
        if (!replay.empty() && (!text_endpoint.empty() || !vision_endpoint.empty()))
            throw ConfigError("--replay excludes --text-endpoint/--vision-endpoint");
        if (!replay.empty()) {
            text = std::make_unique<ReplayClient>(replay);
            if (!no_vision) vision = std::make_unique<ReplayClient>(replay);
            return;
        }
        if (text_ep.empty())
            throw ConfigError("a text model endpoint or --replay directory is required");
        text = std::make_unique<HttpModelClient>(text_ep, config.get_or("text.token", ""));
        if (!vision_ep.empty() && !no_vision)
            vision = std::make_unique<HttpModelClient>(vision_ep,
                                                       config.get_or("vision.token", ""));
    }
};

// ---------------------------------------------------------------------------
// extend

struct ExtendArgs {
    std::string triples;
    SidecarArgs sidecars;
    std::string vectors;
    std::vector<std::string> relations;
    std::vector<std::string> visual_relations;
    double tau = 0.4;
    std::string lang = "en";
    std::size_t max_inflight = 0;
    std::size_t max_subjects = 0;
    std::string run_id = "run0";
    std::string prompt_file;
    std::string verify_prompt_file;
    ClientArgs clients;
};

void run_extend(const GlobalArgs& global, const ExtendArgs& args) {
    ParseResult parsed = parse_triples(fs::path(args.triples));
    Lexicon lexicon = load_sidecars(parsed.set, args.sidecars);
    WordVectors vectors = WordVectors::load(fs::path(args.vectors));

    ExtensionOptions options;
    options.tau = args.tau;
    options.language = args.lang;
    options.threads = args.max_inflight > 0 ? args.max_inflight : global.threads;
    options.max_subjects = args.max_subjects;
    for (const std::string& name : args.relations)
        options.relations.push_back(resolve_relation(parsed.set, lexicon, name));
    if (!args.visual_relations.empty()) {
        for (const std::string& name : args.visual_relations)
            options.visual_relations.push_back(resolve_relation(parsed.set, lexicon, name));
    } else {
        options.visual_relations = default_visual_relations(parsed.set, lexicon);
    }
    if (!args.prompt_file.empty()) options.triple_prompt = PromptTemplate::load(args.prompt_file);
    if (!args.verify_prompt_file.empty())
        options.verify_prompt = PromptTemplate::load(args.verify_prompt_file);

    std::unique_ptr<ModelClient> text, vision;
    ClientArgs clients = args.clients;
    clients.build(global.config, text, vision);

    ExtensionResult result =
        run_extension(parsed.set, lexicon, vectors, *text, vision.get(), options);
    MergeResult merged = merge_extension(parsed.set, result.accepted, args.run_id);

    {
        std::ofstream out = open_artifact(global, "extension_audit.csv");
        seed_comment(out, global);
        write_audit_csv(out, parsed.set, result.audit);
    }
    write_triples_artifact(global, "extended.csv", merged.merged);
    {
        std::ofstream out = open_artifact(global, "new_entities.csv");
        seed_comment(out, global);
        out << "iri,surface\n";
        CsvWriter writer(out);
        for (const auto& [iri, surface] : merged.new_entities)
            writer.write_record({iri, surface});
    }
    {
        std::ofstream out = open_artifact(global, "extension_stats.txt");
        seed_line(out, global);
        write_extension_stats(out, result.stats, parsed.set, merged.merged);
    }
    log_info("extension accepted " + std::to_string(result.stats.accepted) + " of " +
             std::to_string(result.stats.raw_candidates) + " candidates");
}

// ---------------------------------------------------------------------------
// validate

struct ValidateArgs {
    std::string triples;
    SidecarArgs sidecars;
    std::string relation;
    std::vector<std::string> annotations;
    std::size_t max_inflight = 0;
    ClientArgs clients;
};

void run_validate(const GlobalArgs& global, const ValidateArgs& args) {
    if (args.triples.empty() && args.annotations.empty())
        throw ConfigError("validate needs --triples with --relation (recovery) or --annotations");

    if (!args.triples.empty()) {
        if (args.relation.empty())
            throw ConfigError("ground truth recovery needs --relation");
        ParseResult parsed = parse_triples(fs::path(args.triples));
        Lexicon lexicon = load_sidecars(parsed.set, args.sidecars);
        RelationId relation = resolve_relation(parsed.set, lexicon, args.relation);

        std::unique_ptr<ModelClient> text, vision;
        ClientArgs clients = args.clients;
        clients.build(global.config, text, vision);

        RecoveryOptions options;
        options.threads = args.max_inflight > 0 ? args.max_inflight : global.threads;
        std::vector<RecoveryResult> results =
            recover_ground_truth(parsed.set, lexicon, relation, text.get(), vision.get(), options);

        std::ofstream out = open_artifact(global, "recovery.csv");
        seed_comment(out, global);
        write_recovery_csv(out, results);
        for (const RecoveryResult& r : results)
            log_info(r.model + " recall " + format_double(r.recall(), 4) + " f1 " +
                     format_double(r.f1(), 4));
    }

    if (!args.annotations.empty()) {
        std::vector<fs::path> paths(args.annotations.begin(), args.annotations.end());
        PrecisionReport report = compute_precision(paths);
        std::ofstream out = open_artifact(global, "precision.csv");
        seed_comment(out, global);
        out << "annotator,precision\n";
        for (const auto& [name, precision] : report.per_annotator)
            out << name << ',' << format_double(precision, 4) << '\n';
        out << "mean," << format_double(report.mean_precision(), 4) << '\n';
        log_info("mean precision " + format_double(report.mean_precision(), 4) + " over " +
                 std::to_string(report.rows) + " rows");
    }
}

// ---------------------------------------------------------------------------
// report

struct ReportArgs {
    std::string audit;
    std::string surfaces;
    std::string taxonomy;
};

std::vector<std::string> surfaces_from_audit(const fs::path& path) {
    auto in = open_input(path);
    CsvReader reader(in);
    std::vector<std::string> fields;
    std::size_t surface_col = std::string::npos, status_col = std::string::npos;
    std::vector<std::string> out;
    bool header_seen = false;
    while (reader.read_record(fields)) {
        if (fields.size() == 1 && (fields[0].empty() || fields[0][0] == '#')) continue;
        if (!header_seen) {
            for (std::size_t i = 0; i < fields.size(); ++i) {
                std::string name = to_lower(trim(fields[i]));
                if (name == "surface") surface_col = i;
                if (name == "status") status_col = i;
            }
            if (surface_col == std::string::npos || status_col == std::string::npos)
                throw ParseError("audit header needs surface and status columns", 1);
            header_seen = true;
            continue;
        }
        if (fields.size() <= std::max(surface_col, status_col))
            throw ParseError("audit row is missing columns", reader.record_line());
        if (trim(fields[status_col]) == "accepted") out.push_back(trim(fields[surface_col]));
    }
    return out;
}

std::vector<std::string> surfaces_from_lines(const fs::path& path) {
    auto in = open_input(path);
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        std::string surface = trim(line);
        if (!surface.empty() && surface[0] != '#') out.push_back(surface);
    }
    return out;
}

void run_report(const GlobalArgs& global, const ReportArgs& args) {
    if (args.audit.empty() == args.surfaces.empty())
        throw ConfigError("report needs exactly one of --audit or --surfaces");
    std::vector<std::string> surfaces = !args.audit.empty()
                                            ? surfaces_from_audit(args.audit)
                                            : surfaces_from_lines(args.surfaces);
    TaxonomyMap taxonomy = TaxonomyMap::load(fs::path(args.taxonomy));
    std::map<std::string, std::uint64_t> counts = category_counts(surfaces, taxonomy);

    {
        std::ofstream out = open_artifact(global, "taxonomy.csv");
        seed_comment(out, global);
        write_distribution_csv(out, counts);
    }
    {
        std::ofstream out = open_artifact(global, "taxonomy.txt");
        seed_line(out, global);
        out << std::left << std::setw(20) << "category" << std::right << std::setw(8) << "count"
            << std::setw(12) << "percent" << "\n";
        std::uint64_t total = 0;
        for (const auto& [category, count] : counts) total += count;
        for (const auto& [category, count] : counts) {
            double pct = total == 0 ? 0.0 : 100.0 * static_cast<double>(count) /
                                                static_cast<double>(total);
            out << std::left << std::setw(20) << category << std::right << std::setw(8) << count
                << std::setw(12) << format_double(pct, 2) << "\n";
        }
    }
    log_info("classified " + std::to_string(surfaces.size()) + " surfaces into " +
             std::to_string(counts.size()) + " categories");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Knowledge graph cleaning, embedding benchmark and open-world extension"};
    app.require_subcommand(1);

    GlobalArgs global;
    app.add_option("--config", global.config_path, "Key-value config file")
        ->check(CLI::ExistingFile);
    app.add_option("--out", global.out_dir, "Output directory (default: out)");
    auto* seed_opt = app.add_option("--seed", global.seed, "Run seed recorded in outputs");
    app.add_option("--threads", global.threads, "Worker thread count");
    app.add_option("--log-level", global.log_level, "debug, info, warn or error");

    IngestArgs ingest;
    CLI::App* ingest_cmd = app.add_subcommand("ingest", "Parse a triple CSV and report counts");
    ingest_cmd->add_option("--triples", ingest.triples, "Triple CSV (from,rel,to)")
        ->required()
        ->check(CLI::ExistingFile);
    ingest.sidecars.add_flags(ingest_cmd);

    StatsArgs stats;
    CLI::App* stats_cmd = app.add_subcommand("stats", "Graph statistics and relation profiles");
    stats_cmd->add_option("--triples", stats.triples, "Triple CSV")
        ->required()
        ->check(CLI::ExistingFile);
    stats_cmd->add_option("--shared-relation", stats.shared_relations,
                          "Relation to count shared-tail heads for (repeatable)");
    stats.sidecars.add_flags(stats_cmd);

    CleanArgs clean;
    CLI::App* clean_cmd = app.add_subcommand("clean", "Run the relation cleaning pipeline");
    clean_cmd->add_option("--triples", clean.triples, "Triple CSV")
        ->required()
        ->check(CLI::ExistingFile);
    clean_cmd->add_option("--plan", clean.plan_path, "Cleaning plan file")
        ->check(CLI::ExistingFile);
    clean.sidecars.add_flags(clean_cmd);

    SplitArgs split;
    CLI::App* split_cmd = app.add_subcommand("split", "Seeded train/valid/test split");
    split_cmd->add_option("--triples", split.triples, "Triple CSV")
        ->required()
        ->check(CLI::ExistingFile);
    split_cmd->add_option("--ratios", split.ratios, "Train valid test fractions (sum 1)")
        ->expected(3);

    TrainArgs train;
    CLI::App* train_cmd = app.add_subcommand("train", "Train an embedding model");
    train_cmd->add_option("--train", train.train_path, "Training triple CSV")
        ->required()
        ->check(CLI::ExistingFile);
    train_cmd->add_option("--model", train.model, "transe, distmult, complex, complex-n3, tucker");
    train_cmd->add_option("--epochs", train.epochs, "Training epochs");
    train_cmd->add_option("--dim", train.dim, "Entity embedding dimension");
    train_cmd->add_option("--lr", train.learning_rate, "Learning rate");
    train_cmd->add_option("--batch-size", train.batch_size, "Batch size");

    EvalArgs eval_args;
    CLI::App* eval_cmd = app.add_subcommand("eval", "Link-prediction ranking metrics");
    eval_cmd->add_option("--checkpoint", eval_args.checkpoint, "Model checkpoint")
        ->required()
        ->check(CLI::ExistingFile);
    eval_cmd->add_option("--train", eval_args.train_path, "Training triple CSV")
        ->required()
        ->check(CLI::ExistingFile);
    eval_cmd->add_option("--valid", eval_args.valid_path, "Validation triple CSV")
        ->check(CLI::ExistingFile);
    eval_cmd->add_option("--test", eval_args.test_path, "Test triple CSV")
        ->required()
        ->check(CLI::ExistingFile);
    eval_cmd->add_option("--setting", eval_args.setting, "raw, filtered or both");
    eval_cmd->add_option("--dataset", eval_args.dataset, "Dataset name for the report");

    ExtendArgs extend;
    CLI::App* extend_cmd = app.add_subcommand("extend", "Open-world extension pipeline");
    extend_cmd->add_option("--triples", extend.triples, "Triple CSV")
        ->required()
        ->check(CLI::ExistingFile);
    extend_cmd->add_option("--vectors", extend.vectors, "Word vector file")
        ->required()
        ->check(CLI::ExistingFile);
    extend_cmd->add_option("--relation", extend.relations, "Relation to extend (repeatable)")
        ->required();
    extend_cmd->add_option("--visual-relation", extend.visual_relations,
                           "Relation whose text candidates face the image check (repeatable)");
    extend_cmd->add_option("--tau", extend.tau, "Similarity threshold in (0, 1)");
    extend_cmd->add_option("--lang", extend.lang, "Description language")
        ->check(CLI::IsMember({"en", "fr"}));
    extend_cmd->add_option("--max-inflight", extend.max_inflight,
                           "Concurrent subjects (default: --threads)");
    extend_cmd->add_option("--max-subjects", extend.max_subjects, "Subject cap, 0 = all");
    extend_cmd->add_option("--run-id", extend.run_id, "Run tag minted into new entity IRIs");
    extend_cmd->add_option("--prompt-file", extend.prompt_file, "Triple prompt template")
        ->check(CLI::ExistingFile);
    extend_cmd->add_option("--verify-prompt-file", extend.verify_prompt_file,
                           "Yes/no prompt template")
        ->check(CLI::ExistingFile);
    extend.sidecars.add_flags(extend_cmd);
    extend.clients.add_flags(extend_cmd);

    ValidateArgs validate;
    CLI::App* validate_cmd =
        app.add_subcommand("validate", "Ground-truth recovery and annotation precision");
    validate_cmd->add_option("--triples", validate.triples, "Triple CSV")
        ->check(CLI::ExistingFile);
    validate_cmd->add_option("--relation", validate.relation, "Relation to recover");
    validate_cmd->add_option("--annotations", validate.annotations,
                             "Annotation CSV (repeatable)");
    validate_cmd->add_option("--max-inflight", validate.max_inflight,
                             "Concurrent queries (default: --threads)");
    validate.sidecars.add_flags(validate_cmd);
    validate.clients.add_flags(validate_cmd);

    ReportArgs report;
    CLI::App* report_cmd = app.add_subcommand("report", "Taxonomy distribution report");
    report_cmd->add_option("--audit", report.audit, "Extension audit CSV")
        ->check(CLI::ExistingFile);
    report_cmd->add_option("--surfaces", report.surfaces, "Surface list, one per line")
        ->check(CLI::ExistingFile);
    report_cmd->add_option("--taxonomy", report.taxonomy, "Taxonomy rules CSV")
        ->required()
        ->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        global.seed_given = seed_opt->count() > 0;
        global.finalize();
        if (ingest_cmd->parsed()) run_ingest(global, ingest);
        if (stats_cmd->parsed()) run_stats(global, stats);
        if (clean_cmd->parsed()) run_clean(global, clean);
        if (split_cmd->parsed()) run_split(global, split);
        if (train_cmd->parsed()) run_train(global, train);
        if (eval_cmd->parsed()) run_eval(global, eval_args);
        if (extend_cmd->parsed()) run_extend(global, extend);
        if (validate_cmd->parsed()) run_validate(global, validate);
        if (report_cmd->parsed()) run_report(global, report);
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << e.what() << "\n";
        return 3;
    } catch (const IoError& e) {
        std::cerr << e.what() << "\n";
        return 4;
    } catch (const TransportError& e) {
        std::cerr << e.what() << "\n";
        return 5;
    } catch (const TrainingError& e) {
        std::cerr << e.what() << "\n";
        return 6;
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return 7;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 9;
    }
}
