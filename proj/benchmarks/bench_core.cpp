#include <benchmark/benchmark.h>

#include <memory>
#include <string>
#include <vector>

#include "morphtag/conllu.hpp"
#include "morphtag/training.hpp"

using namespace morphtag;

namespace {

std::string token_line(int id, const std::string& form, const std::string& lemma,
                       const std::string& upos, const std::string& feats) {
  return std::to_string(id) + "\t" + form + "\t" + lemma + "\t" + upos + "\t_\t" + feats +
         "\t0\tdep\t_\t_\n";
}

conllu::Document bench_corpus() {
  std::string text;
  const char* words[][2] = {{"dogs", "dog"},   {"bark", "bark"}, {"loudly", "loudly"},
                            {"cats", "cat"},   {"sleep", "sleep"}, {"a", "a"},
                            {"quick", "quick"}, {"runner", "runner"}};
  int id = 1;
  for (auto& w : words) text += token_line(id++, w[0], w[1], "NOUN", "Number=Sing");
  text += "\n";
  return conllu::parse(text);
}

Model bench_model() {
  Model m;  // paper-default dimensions
  build_schema(bench_corpus(), &m.schema, &m.chars);
  m.embeddings = EmbeddingTable(m.config.word_dim);
  Rng rng(1);
  m.params = std::make_unique<ModelParams>(m.config, m.schema, m.chars, &rng);
  return m;
}

void BM_ParseSerialize(benchmark::State& state) {
  std::string text;
  for (int i = 0; i < 100; ++i) text += conllu::serialize(bench_corpus());
  for (auto _ : state) {
    conllu::Document doc = conllu::parse(text);
    benchmark::DoNotOptimize(conllu::serialize(doc));
  }
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations()) *
                          static_cast<int64_t>(text.size()));
}
BENCHMARK(BM_ParseSerialize);

void BM_SentenceForward(benchmark::State& state) {
  Model m = bench_model();
  conllu::Document doc = bench_corpus();
  EncodedSentence enc = encode_labels(doc.sentences[0], m.schema, m.chars, m.config.max_word_len);
  Batch batch;
  batch.sentences.push_back(&enc);
  batch.padded_len.push_back(enc.length());
  TrainConfig cfg;
  for (auto _ : state) {
    Graph g(false);
    BatchLoss loss = batch_loss(g, batch, m, cfg);
    benchmark::DoNotOptimize(loss.sums.pos_sum);
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) * enc.length());
}
BENCHMARK(BM_SentenceForward);

void BM_SentenceForwardBackward(benchmark::State& state) {
  Model m = bench_model();
  conllu::Document doc = bench_corpus();
  EncodedSentence enc = encode_labels(doc.sentences[0], m.schema, m.chars, m.config.max_word_len);
  Batch batch;
  batch.sentences.push_back(&enc);
  batch.padded_len.push_back(enc.length());
  TrainConfig cfg;
  Rng rng(7);
  std::vector<Parameter*> params = m.params->all();
  for (auto _ : state) {
    Graph g(true, &rng);
    BatchLoss loss = batch_loss(g, batch, m, cfg);
    for (Parameter* p : params) p->zero_grad();
    g.backward(loss.total);
    benchmark::DoNotOptimize(params.front()->grad[0]);
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) * enc.length());
}
BENCHMARK(BM_SentenceForwardBackward);

void BM_GreedyPredict(benchmark::State& state) {
  Model m = bench_model();
  conllu::Document doc = bench_corpus();
  for (auto _ : state) {
    conllu::SentencePrediction pred = predict_sentence(doc.sentences[0], m);
    benchmark::DoNotOptimize(pred.words.size());
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) *
                          doc.sentences[0].word_count());
}
BENCHMARK(BM_GreedyPredict);

}  // namespace

BENCHMARK_MAIN();
