// Copyright (C) 2026 The ftopipe Authors
// SPDX-License-Identifier: Apache-2.0

// Serial reference kernels against their OpenMP counterparts. The thread
// count is the benchmark argument; 0 selects the serial reference.

#include <benchmark/benchmark.h>

#include "ftopipe/encoder.hpp"
#include "ftopipe/evalharness.hpp"
#include "ftopipe/pairgen.hpp"
#include "ftopipe/parallel.hpp"
#include "ftopipe/scorer.hpp"
#include "ftopipe/slicer.hpp"

namespace {

using namespace ftopipe;

struct Fixture {
    std::vector<PatentDoc> docs;
    std::vector<DescriptionPiece> pieces;
    ClaimSource claims;
    std::vector<TrainingPair> pairs;
    std::vector<ScoreRequest> requests;
    BaselineModel model;
    Vocabulary vocab = Vocabulary::from_tokens({"[PAD]", "[UNK]", "[CLS]", "[SEP]"});

    Fixture() {
        SynthSpec spec;
        spec.n_patents = 300;
        spec.words_per_description = 2000;
        spec.seed = 1;
        docs = synth_corpus(spec);
        pieces = reference::slice_corpus(docs, {100, 200}, 1);
        claims = build_claim_source(docs, ClaimMode::FirstOnly);
        pairs = build_dataset(pieces, claims, 1);
        model = train_baseline(pairs, {20, 0.1, 0}).model;
        for (std::size_t i = 0; i < pairs.size(); ++i)
            requests.push_back({"q", std::to_string(i), pairs[i].description_text, pairs[i].claim_text});
        std::vector<std::string> tokens = {"[PAD]", "[UNK]", "[CLS]", "[SEP]"};
        for (std::size_t i = 0; i < 2000; ++i) tokens.push_back(synth_word(i));
        vocab = Vocabulary::from_tokens(tokens);
    }
};

const Fixture& fixture() {
    static const Fixture f;
    return f;
}

void BM_SliceCorpus(benchmark::State& state) {
    const auto& f = fixture();
    const int threads = static_cast<int>(state.range(0));
    if (threads > 0) set_thread_count(threads);
    for (auto _ : state) {
        auto out = threads == 0 ? reference::slice_corpus(f.docs, {100, 200}, 7) : slice_corpus(f.docs, {100, 200}, 7);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.docs.size()));
}

void BM_NegativePairs(benchmark::State& state) {
    const auto& f = fixture();
    const int threads = static_cast<int>(state.range(0));
    if (threads > 0) set_thread_count(threads);
    for (auto _ : state) {
        auto out = threads == 0 ? reference::generate_negative_pairs(f.pieces, f.claims, f.pieces.size(), 7)
                                : generate_negative_pairs(f.pieces, f.claims, f.pieces.size(), 7);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.pieces.size()));
}

void BM_EncodeBatch(benchmark::State& state) {
    const auto& f = fixture();
    const int threads = static_cast<int>(state.range(0));
    if (threads > 0) set_thread_count(threads);
    for (auto _ : state) {
        auto out = threads == 0 ? reference::encode_batch(f.pairs, f.vocab, 500) : encode_batch(f.pairs, f.vocab, 500);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.pairs.size()));
}

void BM_ScoreBaseline(benchmark::State& state) {
    const auto& f = fixture();
    const int threads = static_cast<int>(state.range(0));
    if (threads > 0) set_thread_count(threads);
    for (auto _ : state) {
        auto out = threads == 0 ? reference::score_batch_baseline(f.model, f.requests)
                                : score_batch_baseline(f.model, f.requests);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.requests.size()));
}

BENCHMARK(BM_SliceCorpus)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NegativePairs)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EncodeBatch)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScoreBaseline)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
