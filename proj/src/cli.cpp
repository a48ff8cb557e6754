// Copyright (C) 2026 The ftopipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "ftopipe/cli.hpp"

#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "ftopipe/corpus.hpp"
#include "ftopipe/encoder.hpp"
#include "ftopipe/endpoint.hpp"
#include "ftopipe/error.hpp"
#include "ftopipe/evalharness.hpp"
#include "ftopipe/jsonl.hpp"
#include "ftopipe/pairgen.hpp"
#include "ftopipe/parallel.hpp"
#include "ftopipe/rng.hpp"
#include "ftopipe/text.hpp"
#include "ftopipe/ranker.hpp"
#include "ftopipe/scorer.hpp"
#include "ftopipe/slicer.hpp"
#include "json.hpp"

namespace ftopipe::cli {

namespace {

namespace fs = std::filesystem;

/// JSON config files: top-level keys set global options, and an object under
/// a subcommand name sets that subcommand's options. Values given on the
/// command line win.
class JsonConfig : public CLI::Config {
  public:
    std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
        nlohmann::ordered_json obj = dump(app, default_also);
        return obj.dump(2) + "\n";
    }

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        nlohmann::json obj;
        try {
            input >> obj;
        } catch (const nlohmann::json::exception& e) {
            throw CLI::ConversionError("config", std::string("invalid JSON config: ") + e.what());
        }
        if (!obj.is_object()) throw CLI::ConversionError("config", "JSON config must be an object");
        std::vector<CLI::ConfigItem> items;
        collect(obj, {}, items);
        return items;
    }

  private:
    static nlohmann::ordered_json dump(const CLI::App* app, bool default_also) {
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (const CLI::Option* opt : app->get_options()) {
            if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
            const std::string& name = opt->get_lnames().front();
            if (opt->count() > 0) {
                const auto& results = opt->results();
                obj[name] = results.size() == 1 ? nlohmann::ordered_json(results.front())
                                                : nlohmann::ordered_json(results);
            } else if (default_also && !opt->get_default_str().empty()) {
                obj[name] = opt->get_default_str();
            }
        }
        for (const CLI::App* sub : app->get_subcommands({})) {
            auto child = dump(sub, default_also);
            if (!child.empty()) obj[sub->get_name()] = std::move(child);
        }
        return obj;
    }

    static std::string scalar(const nlohmann::json& v) {
        if (v.is_string()) return v.get<std::string>();
        return v.dump();
    }

    static void collect(const nlohmann::json& obj, const std::vector<std::string>& parents,
                        std::vector<CLI::ConfigItem>& items) {
        for (const auto& [key, value] : obj.items()) {
            if (value.is_object()) {
                auto nested = parents;
                nested.push_back(key);
                collect(value, nested, items);
                continue;
            }
            CLI::ConfigItem item;
            item.parents = parents;
            item.name = key;
            if (value.is_array()) {
                for (const auto& v : value) item.inputs.push_back(scalar(v));
            } else if (!value.is_null()) {
                item.inputs.push_back(scalar(value));
            }
            items.push_back(std::move(item));
        }
    }
};

struct Streams {
    std::ostream& out;
    std::ostream& err;
};

// ---------------------------------------------------------------------------
// Option sets

struct IngestArgs {
    std::string corpus;
    bool strict = false;
    std::string out;
    std::string class_prefix;
    std::vector<std::string> languages;
    std::vector<std::string> kinds;
};

struct SynthArgs {
    SynthSpec spec;
    std::string out;
};

struct SliceArgs {
    std::string corpus;
    std::size_t min_words = 100;
    std::size_t max_words = 200;
    std::uint64_t seed = 0;
    std::string out;
};

struct PairsArgs {
    std::string corpus;
    std::uint64_t seed = 0;
    std::string out;
    std::string validation_out;
    double validation_fraction = 0.0;
    std::size_t min_words = 100;
    std::size_t max_words = 200;
    std::string claim_mode = "first_only";
    std::string class_prefix;
    std::vector<std::string> languages;
};

struct EncodeArgs {
    std::string pairs;
    std::string vocab;
    std::size_t max_len = kDefaultMaxLen;
    std::string out;
};

struct TrainArgs {
    std::string pairs;
    std::size_t epochs = 200;
    double lr = 0.1;
    std::uint64_t seed = 0;
    std::string out;
};

struct RankArgs {
    std::string query_abstract;
    std::string query_id = "query";
    std::string pool;
    std::string scorer = "baseline";
    std::string model;
    std::string endpoint;
    std::size_t top_k = 10;
    std::string claim_mode = "first_only";
    std::string format = "table";
    std::string vocab;
    std::size_t max_len = kDefaultMaxLen;
};

struct EvalArgs {
    std::string experiment;
    std::string out_dir;
    std::optional<std::string> corpus;
    bool synth = false;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> scorer;
    std::optional<std::string> endpoint;
    std::optional<std::size_t> epochs;
    std::optional<double> lr;
    std::optional<std::size_t> top_k;
    std::optional<std::size_t> min_words;
    std::optional<std::size_t> max_words;
    std::optional<std::size_t> max_len;
    std::optional<std::size_t> n_references;
    std::vector<std::string> references;
    bool exclude_references = false;
};

const std::vector<std::string> kClaimModes = {"first_only", "all"};

void add_slice_bounds(CLI::App* sub, std::size_t& min_words, std::size_t& max_words) {
    sub->add_option("--min-words", min_words, "Minimum words per description piece")->check(CLI::PositiveNumber);
    sub->add_option("--max-words", max_words, "Maximum words per description piece")->check(CLI::PositiveNumber);
}

// ---------------------------------------------------------------------------
// Subcommand bodies

std::vector<PatentDoc> load_docs(const std::string& path, Streams io) {
    LoadResult loaded = load_corpus(path, /*strict=*/false);
    for (const auto& [line, reason] : loaded.skipped_records) {
        io.err << "warning: skipped record at line " << line << ": " << reason << "\n";
    }
    return std::move(loaded.docs);
}

int run_ingest(const IngestArgs& a, Streams io) {
    LoadResult loaded = load_corpus(a.corpus, a.strict);
    for (const auto& [line, reason] : loaded.skipped_records) {
        io.err << "warning: skipped record at line " << line << ": " << reason << "\n";
    }
    CorpusFilter filter{a.class_prefix, {a.languages.begin(), a.languages.end()}, {a.kinds.begin(), a.kinds.end()}};
    const auto kept = filter_corpus(loaded.docs, filter);
    io.out << "records: " << loaded.total_records << "\n"
           << "accepted: " << loaded.docs.size() << "\n"
           << "skipped: " << loaded.skipped << "\n"
           << "after filter: " << kept.size() << "\n";
    if (!a.out.empty()) write_corpus(a.out, kept);
    return kExitOk;
}

int run_synth(const SynthArgs& a, Streams io) {
    const auto docs = synth_corpus(a.spec);
    write_corpus(a.out, docs);
    io.out << "patents: " << docs.size() << "\n";
    return kExitOk;
}

int run_slice(const SliceArgs& a, Streams io) {
    const auto docs = load_docs(a.corpus, io);
    const auto pieces = slice_corpus(docs, SliceBounds{a.min_words, a.max_words}, a.seed);
    write_pieces(a.out, pieces);
    io.out << "documents: " << docs.size() << "\n" << "pieces: " << pieces.size() << "\n";
    return kExitOk;
}

void print_label_counts(std::ostream& out, const std::string& name, std::span<const TrainingPair> pairs) {
    std::size_t positive = 0;
    for (const auto& p : pairs) positive += static_cast<std::size_t>(p.label == kMatchedLabel);
    out << name << ": " << pairs.size() << " (label " << kMatchedLabel << ": " << positive << ", label "
        << kMismatchedLabel << ": " << pairs.size() - positive << ")\n";
}

int run_pairs(const PairsArgs& a, Streams io) {
    auto docs = load_docs(a.corpus, io);
    if (!a.class_prefix.empty() || !a.languages.empty()) {
        docs = filter_corpus(docs, CorpusFilter{a.class_prefix, {a.languages.begin(), a.languages.end()}, {}});
    }
    const auto pieces = slice_corpus(docs, SliceBounds{a.min_words, a.max_words}, derive_seed(a.seed, "slice"));
    const auto claims = build_claim_source(docs, parse_claim_mode(a.claim_mode));
    const auto pairs = build_dataset(pieces, claims, derive_seed(a.seed, "pairs"));
    const auto split = split_validation(pairs, a.validation_fraction, derive_seed(a.seed, "validation"));

    write_pairs(a.out, split.train);
    if (!a.validation_out.empty()) write_pairs(a.validation_out, split.validation);

    io.out << "documents: " << docs.size() << "\n" << "pieces: " << pieces.size() << "\n";
    print_label_counts(io.out, "pairs", pairs);
    print_label_counts(io.out, "train", split.train);
    print_label_counts(io.out, "validation", split.validation);
    return kExitOk;
}

int run_encode(const EncodeArgs& a, Streams io) {
    const auto vocab = Vocabulary::load(a.vocab);
    const auto pairs = read_pairs(a.pairs);
    const auto encoded = encode_batch(pairs, vocab, a.max_len);
    std::vector<std::string> lines;
    lines.reserve(encoded.size());
    std::size_t truncated = 0;
    for (const auto& e : encoded) {
        lines.push_back(to_json_line(e));
        truncated += static_cast<std::size_t>(e.truncated);
    }
    write_lines(a.out, lines);
    io.out << "sequences: " << encoded.size() << "\n" << "truncated: " << truncated << "\n";
    return kExitOk;
}

int run_train(const TrainArgs& a, Streams io) {
    const auto pairs = read_pairs(a.pairs);
    const auto result = train_baseline(pairs, TrainOptions{a.epochs, a.lr, a.seed});
    result.model.save(a.out);
    std::ostringstream acc;
    acc.precision(4);
    acc << std::fixed << result.accuracy;
    io.out << "pairs: " << pairs.size() << "\n"
           << "final loss: " << result.loss_trace.back() << "\n"
           << "training accuracy: " << acc.str() << "\n";
    return kExitOk;
}

int run_rank(const RankArgs& a, Streams io) {
    std::string query = read_text(a.query_abstract);
    while (!query.empty() && is_ascii_space(query.back())) query.pop_back();
    const auto pool = load_docs(a.pool, io);

    std::unique_ptr<PairScorer> scorer;
    if (a.scorer == "baseline") {
        if (a.model.empty()) throw CLI::ValidationError("--model", "required with --scorer baseline");
        scorer = std::make_unique<BaselineScorer>(BaselineModel::load(a.model));
    } else {
        if (a.endpoint.empty()) throw CLI::ValidationError("--endpoint", "required with --scorer external");
        scorer = std::make_unique<ExternalScorer>(a.endpoint);
    }

    std::optional<Vocabulary> vocab;
    if (!a.vocab.empty()) vocab = Vocabulary::load(a.vocab);
    QueryOptions options;
    options.claim_mode = parse_claim_mode(a.claim_mode);
    options.vocab = vocab ? &*vocab : nullptr;
    options.max_len = a.max_len;

    const Ranking ranking = rank(a.query_id, query, pool, *scorer, a.top_k, options);
    for (const auto& w : ranking.warnings) io.err << "warning: " << w << "\n";
    if (a.format == "jsonl") {
        for (const auto& r : ranking.results) io.out << to_json_line(r) << "\n";
    } else {
        io.out << render_table("Query", a.query_id, ranking.results);
    }
    return kExitOk;
}

int run_eval(const EvalArgs& a, Streams io) {
    ExperimentConfig config;
    if (!a.experiment.empty()) config = ExperimentConfig::from_json(read_text(a.experiment));
    if (a.corpus) {
        config.corpus_path = *a.corpus;
        config.synth.reset();
    }
    if (a.synth && !config.synth) {
        config.synth = SynthSpec{};
        config.corpus_path.reset();
    }
    if (!config.corpus_path && !config.synth) {
        throw CLI::ValidationError("eval", "needs --corpus, --synth, or an --experiment file naming a corpus");
    }
    if (a.seed) {
        config.seed = *a.seed;
        if (config.synth) config.synth->seed = *a.seed;
    }
    if (a.scorer) config.scorer = *a.scorer;
    if (a.endpoint) config.endpoint_command = *a.endpoint;
    if (a.epochs) config.epochs = *a.epochs;
    if (a.lr) config.learning_rate = *a.lr;
    if (a.top_k) config.top_k = *a.top_k;
    if (a.min_words) config.bounds.min_words = *a.min_words;
    if (a.max_words) config.bounds.max_words = *a.max_words;
    if (a.max_len) config.max_len = *a.max_len;
    if (a.n_references) config.n_references = *a.n_references;
    if (!a.references.empty()) config.reference_ids = a.references;
    if (a.exclude_references) config.exclude_references = true;
    config.output_dir = a.out_dir;

    const EvalReport report = run_experiment(config);
    io.out << report.render_tables() << "\n";
    for (const auto& r : report.references) {
        io.out << r.reference_id << " self rank: ";
        if (r.self_rank) {
            io.out << *r.self_rank;
        } else {
            io.out << "n/a";
        }
        io.out << " of " << r.candidate_count << "\n";
    }
    io.out << "recall@1: " << report.recall_at_1 << "\n"
           << "recall@10: " << report.recall_at_10 << "\n"
           << "MRR: " << report.mean_reciprocal_rank << "\n";
    if (report.dataset) {
        const auto& d = *report.dataset;
        io.out << "training pairs: " << d.pairs << " (label 1: " << d.positive_pairs
               << ", label 0: " << d.negative_pairs << "), validation: " << d.validation_pairs << "\n";
    }
    return kExitOk;
}

}  // namespace

int dispatch(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Freedom-to-operate claim ranking pipeline", "ftopipe"};
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);
    app.config_formatter(std::make_shared<JsonConfig>());
    app.set_config("--config", "", "JSON config; flags given on the command line win");

    std::optional<int> threads;
    bool verbose = false;
    app.add_option("--threads", threads, "Worker threads (default: FTOPIPE_THREADS, then all cores)")
        ->check(CLI::PositiveNumber);
    app.add_flag("-v,--verbose", verbose, "Print progress to stderr");

    IngestArgs ingest;
    auto* ingest_cmd = app.add_subcommand("ingest", "Validate a corpus file and report record counts");
    ingest_cmd->add_option("--corpus", ingest.corpus, "Corpus JSON-lines file")->required();
    ingest_cmd->add_flag("--strict", ingest.strict, "Abort on the first malformed record");
    ingest_cmd->add_option("--out", ingest.out, "Write the validated, filtered corpus here");
    ingest_cmd->add_option("--class-prefix", ingest.class_prefix, "Keep docs with a classification starting with this");
    ingest_cmd->add_option("--language", ingest.languages, "Allowed language codes (repeatable)");
    ingest_cmd->add_option("--kind", ingest.kinds, "Allowed kind codes (repeatable)");

    SynthArgs synth;
    auto* synth_cmd = app.add_subcommand("synth", "Emit a synthetic corpus with planted topic affinity");
    synth_cmd->add_option("--n-patents", synth.spec.n_patents, "Number of patents")->check(CLI::Range(2, 1000000));
    synth_cmd->add_option("--topic-vocab", synth.spec.topic_vocab_size, "Private words per patent")
        ->check(CLI::PositiveNumber);
    synth_cmd->add_option("--shared-vocab", synth.spec.shared_vocab_size, "Shared boilerplate words")
        ->check(CLI::PositiveNumber);
    synth_cmd->add_option("--words", synth.spec.words_per_description, "Words per description")
        ->check(CLI::PositiveNumber);
    synth_cmd->add_option("--abstract-words", synth.spec.abstract_words, "Words per abstract")
        ->check(CLI::PositiveNumber);
    synth_cmd->add_option("--claim-words", synth.spec.claim_words, "Words per independent claim")
        ->check(CLI::PositiveNumber);
    synth_cmd->add_option("--topic-share", synth.spec.topic_share, "Share of description words from the private set")
        ->check(CLI::Range(0.0, 1.0));
    synth_cmd->add_option("--classification", synth.spec.classification, "Classification code for every doc");
    synth_cmd->add_option("--seed", synth.spec.seed, "Random seed");
    synth_cmd->add_option("--out", synth.out, "Output corpus file")->required();

    SliceArgs slice;
    auto* slice_cmd = app.add_subcommand("slice", "Slice descriptions into word-bounded pieces");
    slice_cmd->add_option("--corpus", slice.corpus, "Corpus JSON-lines file")->required();
    add_slice_bounds(slice_cmd, slice.min_words, slice.max_words);
    slice_cmd->add_option("--seed", slice.seed, "Random seed");
    slice_cmd->add_option("--out", slice.out, "Pieces JSON-lines output")->required();

    PairsArgs pairs;
    auto* pairs_cmd = app.add_subcommand("pairs", "Build the balanced description/claim pair dataset");
    pairs_cmd->add_option("--corpus", pairs.corpus, "Corpus JSON-lines file")->required();
    pairs_cmd->add_option("--seed", pairs.seed, "Random seed");
    pairs_cmd->add_option("--out", pairs.out, "Training pairs output")->required();
    pairs_cmd->add_option("--validation-out", pairs.validation_out, "Validation pairs output");
    pairs_cmd->add_option("--validation-fraction", pairs.validation_fraction, "Share of pairs held out")
        ->check(CLI::Range(0.0, 0.999999));
    add_slice_bounds(pairs_cmd, pairs.min_words, pairs.max_words);
    pairs_cmd->add_option("--claim-mode", pairs.claim_mode, "Independent claims per patent")
        ->check(CLI::IsMember(kClaimModes));
    pairs_cmd->add_option("--class-prefix", pairs.class_prefix, "Classification prefix filter");
    pairs_cmd->add_option("--language", pairs.languages, "Allowed language codes (repeatable)");

    EncodeArgs encode;
    auto* encode_cmd = app.add_subcommand("encode", "Tokenize pairs into fixed-length sequences");
    encode_cmd->add_option("--pairs", encode.pairs, "Pairs JSON-lines file")->required();
    encode_cmd->add_option("--vocab", encode.vocab, "WordPiece vocabulary, one token per line")->required();
    encode_cmd->add_option("--max-len", encode.max_len, "Sequence length including specials")
        ->check(CLI::Range(5, 1 << 20));
    encode_cmd->add_option("--out", encode.out, "Encoded JSON-lines output")->required();

    TrainArgs train;
    auto* train_cmd = app.add_subcommand("train-baseline", "Fit the lexical logistic baseline scorer");
    train_cmd->add_option("--pairs", train.pairs, "Pairs JSON-lines file")->required();
    train_cmd->add_option("--epochs", train.epochs, "Full-batch gradient steps");
    train_cmd->add_option("--lr", train.lr, "Learning rate")->check(CLI::PositiveNumber);
    train_cmd->add_option("--seed", train.seed, "Random seed");
    train_cmd->add_option("--out", train.out, "Model JSON output")->required();

    RankArgs rank_args;
    auto* rank_cmd = app.add_subcommand("rank", "Rank pool claims for one invention description");
    rank_cmd->add_option("--query-abstract", rank_args.query_abstract, "Text file with the invention description")
        ->required();
    rank_cmd->add_option("--query-id", rank_args.query_id, "Label for the query in output");
    rank_cmd->add_option("--pool", rank_args.pool, "Candidate corpus JSON-lines file")->required();
    rank_cmd->add_option("--scorer", rank_args.scorer, "Scoring backend")
        ->check(CLI::IsMember({"baseline", "external"}));
    rank_cmd->add_option("--model", rank_args.model, "Baseline model JSON");
    rank_cmd->add_option("--endpoint", rank_args.endpoint, "Shell command speaking the external-scorer protocol");
    rank_cmd->add_option("--top-k", rank_args.top_k, "Results to print")->check(CLI::PositiveNumber);
    rank_cmd->add_option("--claim-mode", rank_args.claim_mode, "Independent claims per candidate")
        ->check(CLI::IsMember(kClaimModes));
    rank_cmd->add_option("--format", rank_args.format, "Output format")->check(CLI::IsMember({"table", "jsonl"}));
    rank_cmd->add_option("--vocab", rank_args.vocab, "Vocabulary used to detect over-length pairs");
    rank_cmd->add_option("--max-len", rank_args.max_len, "Sequence length for the over-length check")
        ->check(CLI::Range(5, 1 << 20));

    EvalArgs eval;
    auto* eval_cmd = app.add_subcommand("eval", "Run the self-retrieval experiment end to end");
    eval_cmd->add_option("--experiment", eval.experiment, "Experiment JSON file");
    eval_cmd->add_option("--out-dir", eval.out_dir, "Directory for pairs, model, report")->required();
    eval_cmd->add_option("--corpus", eval.corpus, "Corpus JSON-lines file");
    eval_cmd->add_flag("--synth", eval.synth, "Use the default synthetic corpus");
    eval_cmd->add_option("--seed", eval.seed, "Random seed (also seeds the synthetic corpus)");
    eval_cmd->add_option("--scorer", eval.scorer, "Scoring backend")->check(CLI::IsMember({"baseline", "external"}));
    eval_cmd->add_option("--endpoint", eval.endpoint, "External scorer command");
    eval_cmd->add_option("--epochs", eval.epochs, "Baseline epochs [200]");
    eval_cmd->add_option("--lr", eval.lr, "Baseline learning rate [0.1]");
    eval_cmd->add_option("--top-k", eval.top_k, "Rows per reference table [10]");
    eval_cmd->add_option("--min-words", eval.min_words, "Minimum words per piece [100]");
    eval_cmd->add_option("--max-words", eval.max_words, "Maximum words per piece [200]");
    eval_cmd->add_option("--max-len", eval.max_len, "Sequence length [500]");
    eval_cmd->add_option("--n-references", eval.n_references, "References drawn from the search pool [5]");
    eval_cmd->add_option("--reference", eval.references, "Reference patent id (repeatable)");
    eval_cmd->add_flag("--exclude-references", eval.exclude_references, "Drop each reference from its own pool");

    std::vector<std::string> owned{"ftopipe"};
    owned.insert(owned.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : owned) argv.push_back(s.data());

    const Streams io{out, err};
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
        set_thread_count(resolve_thread_count(threads));
        if (verbose) err << "threads: " << thread_count() << "\n";

        if (ingest_cmd->parsed()) return run_ingest(ingest, io);
        if (synth_cmd->parsed()) return run_synth(synth, io);
        if (slice_cmd->parsed()) return run_slice(slice, io);
        if (pairs_cmd->parsed()) return run_pairs(pairs, io);
        if (encode_cmd->parsed()) return run_encode(encode, io);
        if (train_cmd->parsed()) return run_train(train, io);
        if (rank_cmd->parsed()) return run_rank(rank_args, io);
        if (eval_cmd->parsed()) return run_eval(eval, io);
        return kExitUsage;
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        const CLI::App* active = &app;
        for (const CLI::App* sub : app.get_subcommands()) active = sub;
        err << active->help();
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    }
}

}  // namespace ftopipe::cli
