#include "morphtag/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "morphtag/utf8.hpp"

namespace morphtag {

void ModelConfig::validate() const {
  auto positive = [](int v, const char* name) {
    if (v < 1) throw std::runtime_error(std::string("ModelConfig: ") + name + " must be >= 1");
  };
  positive(word_dim, "word_dim");
  positive(char_emb_dim, "char_emb_dim");
  positive(char_lstm_dim, "char_lstm_dim");
  positive(extractor_dim, "extractor_dim");
  positive(extractor_layers, "extractor_layers");
  positive(decoder_dim, "decoder_dim");
  positive(pos_emb_dim, "pos_emb_dim");
  positive(max_word_len, "max_word_len");
  if (casing_dim != kCasingCount)
    throw std::runtime_error("ModelConfig: casing_dim must equal " + std::to_string(kCasingCount));
  if (decoder_dim != extractor_dim)
    throw std::runtime_error(
        "ModelConfig: decoder_dim must equal extractor_dim (the decoder starts from h^3)");
  if (max_decode_overrun < 0) throw std::runtime_error("ModelConfig: max_decode_overrun < 0");
  if (dropout_rate < Real(0) || dropout_rate >= Real(1))
    throw std::runtime_error("ModelConfig: dropout_rate must be in [0,1)");
}

namespace {

void init_glorot(Tensor& t, Rng& rng) {
  double fan_out = t.dim(0);
  double fan_in = t.rank() == 2 ? t.dim(1) : 1.0;
  double limit = std::sqrt(6.0 / (fan_in + fan_out));
  for (auto& v : t.data) v = static_cast<Real>(rng.uniform(-limit, limit));
}

void init_embedding(Tensor& t, Rng& rng) {
  for (auto& v : t.data) v = static_cast<Real>(rng.uniform(-0.05, 0.05));
}

}  // namespace

Parameter* ModelParams::make(const std::string& name, std::vector<int> shape) {
  owned_.push_back(std::make_unique<Parameter>(name, Tensor::zeros(std::move(shape))));
  return owned_.back().get();
}

ModelParams::ModelParams(const ModelConfig& config, const LabelSchema& schema,
                         const CharVocab& chars, Rng* rng) {
  config.validate();
  if (schema.pos_values.empty()) throw std::runtime_error("ModelParams: empty POS label set");

  const int nc = chars.size();
  const int ce = config.char_emb_dim;
  const int hc = config.char_lstm_dim;
  const int he = config.extractor_dim;
  const int hd = config.decoder_dim;
  char_count_ = nc;
  decoder_input_dim_ = he + ce + config.pos_emb_dim + nc;

  char_emb = make("char_emb", {nc, ce});
  auto make_lstm = [&](const std::string& prefix, int in, int hidden) {
    Lstm l;
    l.W = make(prefix + ".W", {4 * hidden, in});
    l.U = make(prefix + ".U", {4 * hidden, hidden});
    l.b = make(prefix + ".b", {4 * hidden});
    return l;
  };
  char_fwd = make_lstm("char_lstm.fwd", ce, hc);
  char_bwd = make_lstm("char_lstm.bwd", ce, hc);

  int in_dim = config.embedding_dim();
  for (int layer = 1; layer <= config.extractor_layers; ++layer) {
    extractor.push_back(make_lstm("extractor." + std::to_string(layer), in_dim, he));
    in_dim = he;
  }

  pos_W = make("head.pos.W", {static_cast<int>(schema.pos_values.size()), he});
  pos_b = make("head.pos.b", {static_cast<int>(schema.pos_values.size())});
  for (const std::string& key : schema.feature_keys) {
    int nv = static_cast<int>(schema.feature_values.at(key).size());
    feat_W.push_back(make("head.feat." + key + ".W", {nv, he}));
    feat_b.push_back(make("head.feat." + key + ".b", {nv}));
  }

  decoder_pos_emb = make("decoder.pos_emb", {config.max_word_len + 1, config.pos_emb_dim});
  decoder.Wzr = make("decoder.gru.Wzr", {2 * hd, decoder_input_dim_});
  decoder.Uzr = make("decoder.gru.Uzr", {2 * hd, hd});
  decoder.bzr = make("decoder.gru.bzr", {2 * hd});
  decoder.Wh = make("decoder.gru.Wh", {hd, decoder_input_dim_});
  decoder.Uh = make("decoder.gru.Uh", {hd, hd});
  decoder.bh = make("decoder.gru.bh", {hd});
  out_W = make("decoder.out.W", {nc, hd});
  out_b = make("decoder.out.b", {nc});

  if (rng) {
    init_embedding(char_emb->value, *rng);
    init_embedding(decoder_pos_emb->value, *rng);
    auto glorot_lstm = [&](Lstm& l, int hidden) {
      init_glorot(l.W->value, *rng);
      init_glorot(l.U->value, *rng);
      // forget-gate bias starts at 1
      for (int i = hidden; i < 2 * hidden; ++i) l.b->value[i] = Real(1);
    };
    glorot_lstm(char_fwd, hc);
    glorot_lstm(char_bwd, hc);
    for (auto& l : extractor) glorot_lstm(l, he);
    init_glorot(pos_W->value, *rng);
    for (auto* w : feat_W) init_glorot(w->value, *rng);
    init_glorot(decoder.Wzr->value, *rng);
    init_glorot(decoder.Uzr->value, *rng);
    init_glorot(decoder.Wh->value, *rng);
    init_glorot(decoder.Uh->value, *rng);
    init_glorot(out_W->value, *rng);
  }
}

std::vector<Parameter*> ModelParams::all() const {
  std::vector<Parameter*> out;
  out.reserve(owned_.size());
  for (const auto& p : owned_) out.push_back(p.get());
  return out;
}

Parameter* ModelParams::find(const std::string& name) const {
  for (const auto& p : owned_)
    if (p->name == name) return p.get();
  return nullptr;
}

namespace {

struct LstmState {
  Graph::Id h;
  Graph::Id c;
};

LstmState lstm_step(Graph& g, const ModelParams::Lstm& p, Graph::Id x, LstmState prev, int h) {
  Graph::Id gates = g.add(g.add(g.matmul(g.param(p.W), x), g.matmul(g.param(p.U), prev.h)),
                          g.param(p.b));
  Graph::Id in_gate = g.sigmoid(g.slice(gates, 0, h));
  Graph::Id forget_gate = g.sigmoid(g.slice(gates, h, h));
  Graph::Id candidate = g.tanh(g.slice(gates, 2 * h, h));
  Graph::Id out_gate = g.sigmoid(g.slice(gates, 3 * h, h));
  LstmState next;
  next.c = g.add(g.mul(forget_gate, prev.c), g.mul(in_gate, candidate));
  next.h = g.mul(out_gate, g.tanh(next.c));
  return next;
}

Graph::Id gru_step(Graph& g, const ModelParams::Gru& p, Graph::Id x, Graph::Id s_prev, int h) {
  Graph::Id zr = g.sigmoid(g.add(
      g.add(g.matmul(g.param(p.Wzr), x), g.matmul(g.param(p.Uzr), s_prev)), g.param(p.bzr)));
  Graph::Id update = g.slice(zr, 0, h);
  Graph::Id reset = g.slice(zr, h, h);
  Graph::Id candidate = g.tanh(g.add(
      g.add(g.matmul(g.param(p.Wh), x), g.matmul(g.param(p.Uh), g.mul(reset, s_prev))),
      g.param(p.bh)));
  return g.add(g.mul(g.affine(update, Real(-1), Real(1)), s_prev), g.mul(update, candidate));
}

Graph::Id one_hot(Graph& g, int size, int index) {
  Tensor t = Tensor::zeros({size});
  t[index] = Real(1);
  return g.constant(std::move(t));
}

}  // namespace

Graph::Id embed_word(Graph& g, const EncodedWord& word, const Model& m) {
  if (word.char_ids.empty()) throw std::runtime_error("embed_word: empty word");
  const ModelConfig& cfg = m.config;
  const ModelParams& p = *m.params;

  const std::vector<Real>& wv = m.embeddings.vector_for(word.form);
  Tensor word_vec({cfg.word_dim});
  if (!wv.empty()) {
    if (static_cast<int>(wv.size()) != cfg.word_dim)
      throw std::runtime_error("embed_word: pretrained dimension " + std::to_string(wv.size()) +
                               " != word_dim " + std::to_string(cfg.word_dim));
    std::copy(wv.begin(), wv.end(), word_vec.data.begin());
  }
  Graph::Id e_word = g.constant(std::move(word_vec));
  Graph::Id e_casing = one_hot(g, cfg.casing_dim, static_cast<int>(word.casing));

  Graph::Id table = g.param(p.char_emb);
  std::vector<Graph::Id> char_embs;
  char_embs.reserve(word.char_ids.size());
  for (int id : word.char_ids) char_embs.push_back(g.lookup(table, id));

  Graph::Id zero_h = g.constant(Tensor::zeros({cfg.char_lstm_dim}));
  LstmState fwd{zero_h, zero_h};
  for (size_t i = 0; i < char_embs.size(); ++i)
    fwd = lstm_step(g, p.char_fwd, char_embs[i], fwd, cfg.char_lstm_dim);
  LstmState bwd{zero_h, zero_h};
  for (size_t i = char_embs.size(); i > 0; --i)
    bwd = lstm_step(g, p.char_bwd, char_embs[i - 1], bwd, cfg.char_lstm_dim);

  return g.concat({e_word, e_casing, fwd.h, bwd.h});
}

Graph::Id embed_padding(Graph& g, const Model& m) {
  const ModelConfig& cfg = m.config;
  Tensor t = Tensor::zeros({cfg.embedding_dim()});
  t[cfg.word_dim + static_cast<int>(CasingCategory::kPadding)] = Real(1);
  return g.constant(std::move(t));
}

std::vector<Graph::Id> extract_features(Graph& g, const std::vector<Graph::Id>& embedded,
                                        const Model& m) {
  const ModelConfig& cfg = m.config;
  const ModelParams& p = *m.params;
  std::vector<Graph::Id> seq = embedded;
  Graph::Id zero = g.constant(Tensor::zeros({cfg.extractor_dim}));
  for (int layer = 0; layer < cfg.extractor_layers; ++layer) {
    LstmState state{zero, zero};
    for (auto& x : seq) {
      Graph::Id in = g.dropout(x, cfg.dropout_rate);
      state = lstm_step(g, p.extractor[static_cast<size_t>(layer)], in, state, cfg.extractor_dim);
      x = state.h;
    }
  }
  return seq;
}

HeadDistributions classify_heads(Graph& g, Graph::Id h3, const Model& m) {
  const ModelParams& p = *m.params;
  HeadDistributions out;
  out.pos = g.softmax(g.add(g.matmul(g.param(p.pos_W), h3), g.param(p.pos_b)));
  out.feats.reserve(p.feat_W.size());
  for (size_t k = 0; k < p.feat_W.size(); ++k)
    out.feats.push_back(g.softmax(g.add(g.matmul(g.param(p.feat_W[k]), h3), g.param(p.feat_b[k]))));
  return out;
}

Graph::Id decoder_input(Graph& g, Graph::Id h3, const EncodedWord& word, int j,
                        Graph::Id prev_char_vector, const Model& m) {
  if (j < 1) throw std::runtime_error("decoder_input: steps are 1-based");
  const ModelConfig& cfg = m.config;
  const ModelParams& p = *m.params;
  int n = static_cast<int>(word.char_ids.size());

  Graph::Id table = g.param(p.char_emb);
  Graph::Id char_emb =
      g.lookup(table, j <= n ? word.char_ids[static_cast<size_t>(j - 1)] : CharVocab::kPad);
  int remaining = std::clamp(n - j + 1, 0, cfg.max_word_len);
  Graph::Id position = g.lookup(g.param(p.decoder_pos_emb), remaining);
  return g.concat({h3, char_emb, position, prev_char_vector});
}

std::vector<Graph::Id> decode_lemma_teacher_forced(Graph& g, Graph::Id h3,
                                                   const EncodedWord& word, const Model& m) {
  const ModelParams& p = *m.params;
  const int nc = p.char_count();
  std::vector<Graph::Id> steps;
  steps.reserve(word.lemma_target.size());
  Graph::Id state = h3;  // s^0 = h^3
  for (size_t j = 1; j <= word.lemma_target.size(); ++j) {
    int prev = j == 1 ? CharVocab::kBos : word.lemma_target[j - 2];
    Graph::Id x = decoder_input(g, h3, word, static_cast<int>(j), one_hot(g, nc, prev), m);
    state = gru_step(g, p.decoder, x, state, m.config.decoder_dim);
    steps.push_back(g.softmax(g.add(g.matmul(g.param(p.out_W), state), g.param(p.out_b))));
  }
  return steps;
}

std::string decode_lemma_greedy(Graph& g, Graph::Id h3, const EncodedWord& word, const Model& m) {
  const ModelParams& p = *m.params;
  const int nc = p.char_count();
  const int n = static_cast<int>(word.char_ids.size());
  const int max_steps = n + m.config.max_decode_overrun;
  const std::vector<char32_t> form_chars = utf8::decode(word.form);

  std::string lemma;
  Graph::Id state = h3;
  int prev = CharVocab::kBos;
  for (int j = 1; j <= max_steps; ++j) {
    Graph::Id x = decoder_input(g, h3, word, j, one_hot(g, nc, prev), m);
    state = gru_step(g, p.decoder, x, state, m.config.decoder_dim);
    const Tensor& probs =
        g.value(g.softmax(g.add(g.matmul(g.param(p.out_W), state), g.param(p.out_b))));
    int best = 0;
    for (int i = 1; i < probs.size(); ++i)
      if (probs[i] > probs[best]) best = i;
    if (best == CharVocab::kEow) break;
    if (auto cp = m.chars.char_at(best)) {
      lemma += utf8::encode(*cp);
    } else if (best == CharVocab::kUnk && j <= n) {
      // copy the input character at this step position (it may itself be
      // outside the training alphabet)
      lemma += utf8::encode(form_chars[static_cast<size_t>(j - 1)]);
    }
    prev = best;
  }
  return lemma;
}

conllu::SentencePrediction predict_sentence(const conllu::Sentence& sentence, const Model& m) {
  conllu::SentencePrediction pred;
  std::vector<const conllu::Token*> words = sentence.word_tokens();
  if (words.empty()) return pred;

  Graph g(/*training=*/false);
  std::vector<Graph::Id> embedded;
  std::vector<EncodedWord> encoded;
  embedded.reserve(words.size());
  encoded.reserve(words.size());
  for (const conllu::Token* tok : words) {
    encoded.push_back(
        encode_word(tok->form, "_", "_", "_", m.schema, m.chars, m.config.max_word_len));
    embedded.push_back(embed_word(g, encoded.back(), m));
  }
  std::vector<Graph::Id> h3 = extract_features(g, embedded, m);

  for (size_t i = 0; i < words.size(); ++i) {
    HeadDistributions heads = classify_heads(g, h3[i], m);
    conllu::WordPrediction wp;
    const Tensor& pos_probs = g.value(heads.pos);
    int best = 0;
    for (int c = 1; c < pos_probs.size(); ++c)
      if (pos_probs[c] > pos_probs[best]) best = c;
    wp.upos = m.schema.pos_values[static_cast<size_t>(best)];
    for (size_t k = 0; k < heads.feats.size(); ++k) {
      const Tensor& fp = g.value(heads.feats[k]);
      int fbest = 0;
      for (int c = 1; c < fp.size(); ++c)
        if (fp[c] > fp[fbest]) fbest = c;
      const std::string& key = m.schema.feature_keys[k];
      wp.feats[key] = m.schema.feature_values.at(key)[static_cast<size_t>(fbest)];
    }
    wp.lemma = decode_lemma_greedy(g, h3[i], encoded[i], m);
    pred.words.push_back(std::move(wp));
  }
  return pred;
}

conllu::Document predict_document(const conllu::Document& doc, const Model& m) {
  std::vector<conllu::SentencePrediction> preds;
  preds.reserve(doc.sentences.size());
  for (const conllu::Sentence& s : doc.sentences) preds.push_back(predict_sentence(s, m));
  return conllu::merge_predictions(doc, preds);
}

}  // namespace morphtag
