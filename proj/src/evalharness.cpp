// Copyright (C) 2026 The ftopipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "ftopipe/evalharness.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

#include "ftopipe/endpoint.hpp"
#include "ftopipe/error.hpp"
#include "ftopipe/jsonl.hpp"
#include "ftopipe/pairgen.hpp"
#include "ftopipe/rng.hpp"
#include "ftopipe/text.hpp"
#include "json.hpp"

namespace ftopipe {

using ojson = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Synthetic corpora

std::string synth_word(std::size_t index) {
    static constexpr std::string_view consonants = "bcdfgklmnprstvz";
    static constexpr std::string_view vowels = "aeiou";
    constexpr std::size_t base = consonants.size() * vowels.size();
    std::string syllables;
    std::size_t digits = 0;
    do {
        const std::size_t d = index % base;
        syllables.insert(0, 1, vowels[d % vowels.size()]);
        syllables.insert(0, 1, consonants[d / vowels.size()]);
        index /= base;
        ++digits;
    } while (index > 0 || digits < 2);
    return syllables;
}

namespace {

class WordSource {
  public:
    WordSource(const SynthSpec& spec, std::size_t patent) : spec_(spec), patent_(patent) {}

    std::string draw(Rng& rng, double topic_share) const {
        if (rng.uniform01() < topic_share) {
            const std::size_t j = rng.below(spec_.topic_vocab_size);
            return synth_word(spec_.shared_vocab_size + patent_ * spec_.topic_vocab_size + j);
        }
        return synth_word(rng.below(spec_.shared_vocab_size));
    }

    std::string sentence(Rng& rng, std::size_t words, double topic_share) const {
        std::string out;
        for (std::size_t i = 0; i < words; ++i) {
            if (i > 0) out += ' ';
            out += draw(rng, topic_share);
        }
        return out;
    }

  private:
    const SynthSpec& spec_;
    std::size_t patent_;
};

}  // namespace

std::vector<PatentDoc> synth_corpus(const SynthSpec& spec) {
    if (spec.n_patents < 2) throw Error(ErrorCode::InvalidSpec, "n_patents must be >= 2");
    if (spec.topic_vocab_size == 0 || spec.shared_vocab_size == 0 || spec.words_per_description == 0 ||
        spec.abstract_words == 0 || spec.claim_words == 0) {
        throw Error(ErrorCode::InvalidSpec, "vocabulary and length sizes must be positive");
    }
    if (!(spec.topic_share >= 0.0 && spec.topic_share <= 1.0)) {
        throw Error(ErrorCode::InvalidSpec, "topic_share must lie in [0, 1]");
    }
    const double focused_share = std::min(1.0, spec.topic_share + 0.25);

    std::vector<PatentDoc> docs(spec.n_patents);
    for (std::size_t i = 0; i < spec.n_patents; ++i) {
        Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(i)));
        const WordSource words(spec, i);
        PatentDoc& doc = docs[i];
        doc.id = "US" + std::to_string(9000000 + i) + "B2";
        doc.kind_code = "B2";
        doc.language = "en";
        doc.classifications = {spec.classification};
        doc.abstract = words.sentence(rng, spec.abstract_words, focused_share);
        doc.description = words.sentence(rng, spec.words_per_description, spec.topic_share);
        doc.claims.push_back(
            Claim{1, "A system comprising " + words.sentence(rng, spec.claim_words, focused_share) + ".", true});
        doc.claims.push_back(Claim{
            2, "The system according to claim 1, wherein " + words.sentence(rng, spec.claim_words / 3 + 1, focused_share) + ".",
            false});
        if (i % 3 == 2) {
            doc.claims.push_back(
                Claim{3, "A method comprising " + words.sentence(rng, spec.claim_words, focused_share) + ".", true});
        }
    }
    return docs;
}

// ---------------------------------------------------------------------------
// Metrics

double recall_at(std::span<const std::optional<std::size_t>> self_ranks, std::size_t k) {
    if (self_ranks.empty()) return 0.0;
    const auto hits = std::count_if(self_ranks.begin(), self_ranks.end(),
                                    [k](const auto& r) { return r && *r <= k; });
    return static_cast<double>(hits) / static_cast<double>(self_ranks.size());
}

double mean_reciprocal_rank(std::span<const std::optional<std::size_t>> self_ranks) {
    if (self_ranks.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& r : self_ranks) {
        if (r) sum += 1.0 / static_cast<double>(*r);
    }
    return sum / static_cast<double>(self_ranks.size());
}

// ---------------------------------------------------------------------------
// Self-retrieval

namespace {

bool has_independent_claim(const PatentDoc& doc) {
    return std::any_of(doc.claims.begin(), doc.claims.end(), [](const Claim& c) { return c.is_independent; });
}

void fill_metrics(EvalReport& report) {
    std::vector<std::optional<std::size_t>> ranks;
    for (const auto& r : report.references) ranks.push_back(r.self_rank);
    report.recall_at_1 = recall_at(ranks, 1);
    report.recall_at_10 = recall_at(ranks, 10);
    report.mean_reciprocal_rank = mean_reciprocal_rank(ranks);
}

}  // namespace

EvalReport self_retrieval_eval(std::span<const PatentDoc> references, std::span<const PatentDoc> search_pool,
                               PairScorer& scorer, const SelfRetrievalOptions& options) {
    if (options.top_k == 0) throw Error(ErrorCode::InvalidArgument, "top_k must be >= 1");
    std::set<std::string> pool_ids;
    std::vector<PatentDoc> candidates;
    for (const auto& doc : search_pool) {
        pool_ids.insert(doc.id);
        if (has_independent_claim(doc)) candidates.push_back(doc);
    }
    for (const auto& ref : references) {
        if (!pool_ids.contains(ref.id)) throw Error(ErrorCode::ReferenceNotInPool, ref.id);
    }

    QueryOptions query;
    query.claim_mode = options.claim_mode;
    query.vocab = options.vocab;
    query.max_len = options.max_len;

    EvalReport report;
    for (const auto& ref : references) {
        ReferenceResult result;
        result.reference_id = ref.id;
        result.reference_claim = independent_claims(ref, ClaimMode::FirstOnly).front().number;

        std::vector<PatentDoc> own_candidates;
        std::span<const PatentDoc> pool = candidates;
        if (options.exclude_references) {
            std::copy_if(candidates.begin(), candidates.end(), std::back_inserter(own_candidates),
                         [&](const PatentDoc& d) { return d.id != ref.id; });
            pool = own_candidates;
        }

        // Full ranking so the self rank is known even outside top_k.
        Ranking ranking = rank(ref.id, ref.abstract, pool, scorer, std::max<std::size_t>(pool.size(), 1), query);
        result.candidate_count = ranking.results.size();
        for (const auto& r : ranking.results) {
            if (r.patent_id == ref.id && r.claim_number == result.reference_claim) {
                result.self_rank = r.rank;
                break;
            }
        }
        if (ranking.results.size() > options.top_k) ranking.results.resize(options.top_k);
        result.top = std::move(ranking.results);
        result.warnings = std::move(ranking.warnings);
        report.references.push_back(std::move(result));
    }
    fill_metrics(report);
    return report;
}

namespace {

ojson optional_json(const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); }

}  // namespace

std::string EvalReport::to_json() const {
    ojson obj;
    obj["recall_at_1"] = recall_at_1;
    obj["recall_at_10"] = recall_at_10;
    obj["mean_reciprocal_rank"] = mean_reciprocal_rank;
    auto refs = ojson::array();
    for (const auto& r : references) {
        ojson item;
        item["reference_id"] = r.reference_id;
        item["reference_claim"] = r.reference_claim;
        item["self_rank"] = r.self_rank ? ojson(*r.self_rank) : ojson(nullptr);
        item["candidate_count"] = r.candidate_count;
        auto top = ojson::array();
        for (const auto& t : r.top) {
            top.push_back({{"rank", t.rank},
                           {"patent_id", t.patent_id},
                           {"claim_number", t.claim_number},
                           {"logit_1", t.logit_1},
                           {"prob_1", t.prob_1}});
        }
        item["ranking"] = std::move(top);
        item["warnings"] = r.warnings;
        refs.push_back(std::move(item));
    }
    obj["references"] = std::move(refs);
    if (dataset) {
        const auto& d = *dataset;
        obj["dataset"] = {{"train_docs", d.train_docs},
                          {"search_docs", d.search_docs},
                          {"skipped_train_docs", d.skipped_train_docs},
                          {"pieces", d.pieces},
                          {"pairs", d.pairs},
                          {"positive_pairs", d.positive_pairs},
                          {"negative_pairs", d.negative_pairs},
                          {"train_pairs", d.train_pairs},
                          {"validation_pairs", d.validation_pairs},
                          {"train_accuracy", optional_json(d.train_accuracy)},
                          {"validation_accuracy", optional_json(d.validation_accuracy)}};
    } else {
        obj["dataset"] = nullptr;
    }
    return obj.dump(2) + "\n";
}

std::string EvalReport::render_tables() const {
    std::string out;
    for (std::size_t i = 0; i < references.size(); ++i) {
        if (i > 0) out += '\n';
        out += render_table("Reference patent " + std::to_string(i + 1), references[i].reference_id,
                            references[i].top);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Experiment config

std::string ExperimentConfig::to_json() const {
    ojson obj;
    obj["corpus_path"] = corpus_path ? ojson(corpus_path->string()) : ojson(nullptr);
    if (synth) {
        obj["synth"] = {{"n_patents", synth->n_patents},
                        {"topic_vocab_size", synth->topic_vocab_size},
                        {"shared_vocab_size", synth->shared_vocab_size},
                        {"words_per_description", synth->words_per_description},
                        {"abstract_words", synth->abstract_words},
                        {"claim_words", synth->claim_words},
                        {"topic_share", synth->topic_share},
                        {"classification", synth->classification},
                        {"seed", synth->seed}};
    } else {
        obj["synth"] = nullptr;
    }
    obj["train_class_prefix"] = train_class_prefix;
    obj["search_class_prefix"] = search_class_prefix;
    obj["languages"] = languages;
    obj["train_ids"] = train_ids;
    obj["search_ids"] = search_ids;
    obj["search_fraction"] = search_fraction;
    obj["train_count"] = train_count ? ojson(*train_count) : ojson(nullptr);
    obj["reference_ids"] = reference_ids;
    obj["n_references"] = n_references;
    obj["exclude_references"] = exclude_references;
    obj["min_words"] = bounds.min_words;
    obj["max_words"] = bounds.max_words;
    obj["claim_mode"] = std::string(claim_mode_name(claim_mode));
    obj["search_claim_mode"] = std::string(claim_mode_name(search_claim_mode));
    obj["validation_fraction"] = validation_fraction;
    obj["max_len"] = max_len;
    obj["scorer"] = scorer;
    obj["endpoint_command"] = endpoint_command;
    obj["epochs"] = epochs;
    obj["learning_rate"] = learning_rate;
    obj["seed"] = seed;
    obj["top_k"] = top_k;
    return obj.dump(2) + "\n";
}

ExperimentConfig ExperimentConfig::from_json(std::string_view text) {
    const auto obj = nlohmann::json::parse(text, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) throw Error(ErrorCode::SchemaError, "config is not a JSON object");
    ExperimentConfig c;
    try {
        auto get = [&](const char* key, auto& target) {
            const auto it = obj.find(key);
            if (it != obj.end() && !it->is_null()) it->get_to(target);
        };
        if (const auto it = obj.find("corpus_path"); it != obj.end() && !it->is_null()) {
            c.corpus_path = it->get<std::string>();
        }
        if (const auto it = obj.find("synth"); it != obj.end() && !it->is_null()) {
            SynthSpec s;
            auto sget = [&](const char* key, auto& target) {
                const auto jt = it->find(key);
                if (jt != it->end() && !jt->is_null()) jt->get_to(target);
            };
            sget("n_patents", s.n_patents);
            sget("topic_vocab_size", s.topic_vocab_size);
            sget("shared_vocab_size", s.shared_vocab_size);
            sget("words_per_description", s.words_per_description);
            sget("abstract_words", s.abstract_words);
            sget("claim_words", s.claim_words);
            sget("topic_share", s.topic_share);
            sget("classification", s.classification);
            sget("seed", s.seed);
            c.synth = s;
        }
        get("train_class_prefix", c.train_class_prefix);
        get("search_class_prefix", c.search_class_prefix);
        get("languages", c.languages);
        get("train_ids", c.train_ids);
        get("search_ids", c.search_ids);
        get("search_fraction", c.search_fraction);
        if (const auto it = obj.find("train_count"); it != obj.end() && !it->is_null()) {
            c.train_count = it->get<std::size_t>();
        }
        get("reference_ids", c.reference_ids);
        get("n_references", c.n_references);
        get("exclude_references", c.exclude_references);
        get("min_words", c.bounds.min_words);
        get("max_words", c.bounds.max_words);
        if (const auto it = obj.find("claim_mode"); it != obj.end() && !it->is_null()) {
            c.claim_mode = parse_claim_mode(it->get<std::string>());
        }
        if (const auto it = obj.find("search_claim_mode"); it != obj.end() && !it->is_null()) {
            c.search_claim_mode = parse_claim_mode(it->get<std::string>());
        }
        get("validation_fraction", c.validation_fraction);
        get("max_len", c.max_len);
        get("scorer", c.scorer);
        get("endpoint_command", c.endpoint_command);
        get("epochs", c.epochs);
        get("learning_rate", c.learning_rate);
        get("seed", c.seed);
        get("top_k", c.top_k);
        if (const auto it = obj.find("output_dir"); it != obj.end() && !it->is_null()) {
            c.output_dir = it->get<std::string>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::SchemaError, e.what());
    }
    return c;
}

// ---------------------------------------------------------------------------
// Experiment

namespace {

std::vector<PatentDoc> select_ids(std::span<const PatentDoc> docs, const std::vector<std::string>& ids) {
    std::map<std::string, const PatentDoc*> by_id;
    for (const auto& d : docs) by_id.emplace(d.id, &d);
    std::vector<PatentDoc> out;
    for (const auto& id : ids) {
        const auto it = by_id.find(id);
        if (it == by_id.end()) throw Error(ErrorCode::UnknownId, id);
        out.push_back(*it->second);
    }
    return out;
}

std::vector<PatentDoc> load_docs(const ExperimentConfig& config) {
    if (config.corpus_path) return load_corpus(*config.corpus_path, /*strict=*/false).docs;
    if (config.synth) return synth_corpus(*config.synth);
    throw Error(ErrorCode::InvalidArgument, "experiment needs corpus_path or synth");
}

double accuracy_of(const BaselineModel& model, std::span<const TrainingPair> pairs) {
    if (pairs.empty()) return 0.0;
    std::vector<ScoreRequest> requests;
    requests.reserve(pairs.size());
    for (const auto& p : pairs) requests.push_back(ScoreRequest{"", "", p.description_text, p.claim_text});
    const auto scores = score_batch_baseline(model, requests);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        correct += static_cast<std::size_t>((scores[i].logit_1 > scores[i].logit_0) == (pairs[i].label == kMatchedLabel));
    }
    return static_cast<double>(correct) / static_cast<double>(pairs.size());
}

}  // namespace

EvalReport run_experiment(const ExperimentConfig& config) {
    const std::vector<PatentDoc> docs = load_docs(config);

    // The search pool is drawn first; training takes what is left.
    std::vector<PatentDoc> search;
    if (!config.search_ids.empty()) {
        search = select_ids(docs, config.search_ids);
    } else {
        const auto candidates = filter_corpus(docs, CorpusFilter{config.search_class_prefix, config.languages, {}});
        search = split_disjoint(candidates, config.search_fraction, derive_seed(config.seed, "search_pool")).search;
    }
    std::set<std::string> search_ids;
    for (const auto& d : search) search_ids.insert(d.id);

    std::vector<PatentDoc> train;
    if (!config.train_ids.empty()) {
        train = select_ids(docs, config.train_ids);
    } else {
        for (auto& d : filter_corpus(docs, CorpusFilter{config.train_class_prefix, config.languages, {}})) {
            if (!search_ids.contains(d.id)) train.push_back(std::move(d));
        }
        if (config.train_count && *config.train_count < train.size()) {
            std::vector<std::size_t> order(train.size());
            std::iota(order.begin(), order.end(), std::size_t{0});
            Rng rng(derive_seed(config.seed, "train_pool"));
            rng.shuffle(std::span<std::size_t>(order));
            order.resize(*config.train_count);
            std::sort(order.begin(), order.end());
            std::vector<PatentDoc> kept;
            for (auto i : order) kept.push_back(std::move(train[i]));
            train = std::move(kept);
        }
    }
    for (const auto& d : train) {
        if (search_ids.contains(d.id)) throw Error(ErrorCode::OverlapDetected, d.id);
    }

    std::vector<PatentDoc> references;
    if (!config.reference_ids.empty()) {
        std::map<std::string, const PatentDoc*> by_id;
        for (const auto& d : search) by_id.emplace(d.id, &d);
        for (const auto& id : config.reference_ids) {
            const auto it = by_id.find(id);
            if (it == by_id.end()) throw Error(ErrorCode::ReferenceNotInPool, id);
            references.push_back(*it->second);
        }
    } else {
        std::vector<std::size_t> eligible;
        for (std::size_t i = 0; i < search.size(); ++i) {
            if (has_independent_claim(search[i]) && !search[i].abstract.empty()) eligible.push_back(i);
        }
        Rng rng(derive_seed(config.seed, "references"));
        rng.shuffle(std::span<std::size_t>(eligible));
        eligible.resize(std::min(eligible.size(), config.n_references));
        std::sort(eligible.begin(), eligible.end());
        for (auto i : eligible) references.push_back(search[i]);
    }

    DatasetStats stats;
    stats.search_docs = search.size();
    std::vector<PatentDoc> usable;
    for (const auto& d : train) {
        if (count_words(d.description) > 0 && has_independent_claim(d)) usable.push_back(d);
    }
    stats.train_docs = usable.size();
    stats.skipped_train_docs = train.size() - usable.size();

    const auto pieces = slice_corpus(usable, config.bounds, derive_seed(config.seed, "slice"));
    const auto claim_source = build_claim_source(usable, config.claim_mode);
    const auto pairs = build_dataset(pieces, claim_source, derive_seed(config.seed, "pairs"));
    const auto split = split_validation(pairs, config.validation_fraction, derive_seed(config.seed, "validation"));
    stats.pieces = pieces.size();
    stats.pairs = pairs.size();
    stats.positive_pairs = static_cast<std::size_t>(
        std::count_if(pairs.begin(), pairs.end(), [](const TrainingPair& p) { return p.label == kMatchedLabel; }));
    stats.negative_pairs = pairs.size() - stats.positive_pairs;
    stats.train_pairs = split.train.size();
    stats.validation_pairs = split.validation.size();

    if (!config.output_dir.empty()) {
        std::filesystem::create_directories(config.output_dir);
        write_text(config.output_dir / "config.json", config.to_json());
        write_pairs(config.output_dir / "pairs.jsonl", split.train);
        write_pairs(config.output_dir / "validation.jsonl", split.validation);
    }

    std::unique_ptr<PairScorer> scorer;
    if (config.scorer == "baseline") {
        TrainResult trained = train_baseline(split.train,
                                             TrainOptions{config.epochs, config.learning_rate, config.seed});
        stats.train_accuracy = trained.accuracy;
        if (!split.validation.empty()) stats.validation_accuracy = accuracy_of(trained.model, split.validation);
        if (!config.output_dir.empty()) trained.model.save(config.output_dir / "model.json");
        scorer = std::make_unique<BaselineScorer>(std::move(trained.model));
    } else if (config.scorer == "external") {
        if (config.endpoint_command.empty()) {
            throw Error(ErrorCode::InvalidArgument, "external scorer needs endpoint_command");
        }
        scorer = std::make_unique<ExternalScorer>(config.endpoint_command);
    } else {
        throw Error(ErrorCode::InvalidArgument, "unknown scorer " + config.scorer);
    }

    SelfRetrievalOptions options;
    options.top_k = config.top_k;
    options.claim_mode = config.search_claim_mode;
    options.exclude_references = config.exclude_references;
    options.max_len = config.max_len;
    EvalReport report = self_retrieval_eval(references, search, *scorer, options);
    report.dataset = stats;

    if (!config.output_dir.empty()) {
        write_text(config.output_dir / "report.json", report.to_json());
        write_text(config.output_dir / "tables.txt", report.render_tables());
    }
    return report;
}

}  // namespace ftopipe
