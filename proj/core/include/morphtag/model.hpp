#pragma once

#include <memory>
#include <string>
#include <vector>

#include "morphtag/graph.hpp"
#include "morphtag/schema.hpp"

namespace morphtag {

struct ModelConfig {
  int word_dim = 300;
  int casing_dim = 8;
  int char_emb_dim = 30;
  int char_lstm_dim = 25;  // per direction
  int extractor_dim = 150;
  int extractor_layers = 3;
  int decoder_dim = 150;
  int pos_emb_dim = 5;
  int max_word_len = 64;       // char clamp for encoding and decoding
  int max_decode_overrun = 10; // greedy decoding runs at most n_i + this
  Real dropout_rate = Real(0.5);

  int embedding_dim() const { return word_dim + casing_dim + 2 * char_lstm_dim; }
  void validate() const;  // throws on inconsistent dimensions
};

// All named weight tensors. Construction asserts every shape; the creation
// order is fixed and defines the serialization order.
class ModelParams {
 public:
  struct Lstm {
    Parameter* W = nullptr;  // stacked gates [i;f;g;o], (4H, in)
    Parameter* U = nullptr;  // (4H, H)
    Parameter* b = nullptr;  // (4H,)
  };
  struct Gru {
    Parameter* Wzr = nullptr;  // stacked [z;r], (2H, in)
    Parameter* Uzr = nullptr;  // (2H, H)
    Parameter* bzr = nullptr;  // (2H,)
    Parameter* Wh = nullptr;   // candidate, (H, in)
    Parameter* Uh = nullptr;   // (H, H)
    Parameter* bh = nullptr;   // (H,)
  };

  // rng == nullptr leaves everything zero (used before loading weights).
  ModelParams(const ModelConfig& config, const LabelSchema& schema, const CharVocab& chars,
              Rng* rng);

  Parameter* char_emb = nullptr;  // (|C u specials|, char_emb_dim)
  Lstm char_fwd, char_bwd;
  std::vector<Lstm> extractor;           // one per layer
  Parameter* pos_W = nullptr;            // (|P|, extractor_dim)
  Parameter* pos_b = nullptr;            // (|P|,)
  std::vector<Parameter*> feat_W;        // per key, (|F^k|, extractor_dim)
  std::vector<Parameter*> feat_b;        // per key, (|F^k|,)
  Parameter* decoder_pos_emb = nullptr;  // (max_word_len + 1, pos_emb_dim)
  Gru decoder;
  Parameter* out_W = nullptr;  // (|C u specials|, decoder_dim)
  Parameter* out_b = nullptr;  // (|C u specials|,)

  std::vector<Parameter*> all() const;
  Parameter* find(const std::string& name) const;
  int decoder_input_dim() const { return decoder_input_dim_; }
  int char_count() const { return char_count_; }

 private:
  Parameter* make(const std::string& name, std::vector<int> shape);
  std::vector<std::unique_ptr<Parameter>> owned_;
  int decoder_input_dim_ = 0;
  int char_count_ = 0;
};

// A loaded model: everything needed to predict.
struct Model {
  ModelConfig config;
  LabelSchema schema;
  CharVocab chars;
  EmbeddingTable embeddings;
  std::unique_ptr<ModelParams> params;
};

// e(w) = [word vector | casing one-hot | char BiLSTM final states]
Graph::Id embed_word(Graph& g, const EncodedWord& word, const Model& m);
// Placeholder embedding for padded positions: zeros with the padding casing bit.
Graph::Id embed_padding(Graph& g, const Model& m);

// Three stacked unidirectional LSTM layers, zero initial state. In training
// mode each layer's inputs get dropout, one fresh mask per timestep.
std::vector<Graph::Id> extract_features(Graph& g, const std::vector<Graph::Id>& embedded,
                                        const Model& m);

struct HeadDistributions {
  Graph::Id pos;                 // softmax over P
  std::vector<Graph::Id> feats;  // softmax over each F^k, schema key order
};
HeadDistributions classify_heads(Graph& g, Graph::Id h3, const Model& m);

// x_i^j = [h3 | char emb of input char j | position emb of chars-remaining |
// previous-output indicator]; j is 1-based.
Graph::Id decoder_input(Graph& g, Graph::Id h3, const EncodedWord& word, int j,
                        Graph::Id prev_char_vector, const Model& m);

// Runs the decoder for lemma_target.size() steps feeding gold previous
// characters; returns the per-step output distributions.
std::vector<Graph::Id> decode_lemma_teacher_forced(Graph& g, Graph::Id h3,
                                                   const EncodedWord& word, const Model& m);

// Argmax decoding, feeding each step's one-hot output into the next. Stops on
// EOW or after n_i + max_decode_overrun steps. Emitted UNK is replaced by the
// input character at the same step position when that exists.
std::string decode_lemma_greedy(Graph& g, Graph::Id h3, const EncodedWord& word, const Model& m);

conllu::SentencePrediction predict_sentence(const conllu::Sentence& sentence, const Model& m);

// Predicts every sentence and rewrites the LEMMA/UPOS/FEATS columns of the
// word-token lines; everything else passes through untouched.
conllu::Document predict_document(const conllu::Document& doc, const Model& m);

}  // namespace morphtag
