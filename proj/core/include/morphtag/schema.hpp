#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "morphtag/conllu.hpp"
#include "morphtag/feats.hpp"
#include "morphtag/real.hpp"

namespace morphtag {

// Word-shape category encoded one-hot in the embedding layer. Rules apply in
// this order, first match wins; `padding` is reserved for batch placeholders
// and never produced by casing_of.
enum class CasingCategory : uint8_t {
  kNumeric = 0,
  kMainlyNumeric,
  kAllLower,
  kAllUpper,
  kInitialUpper,
  kContainsDigit,
  kOther,
  kPadding,
};

inline constexpr int kCasingCount = 8;

const char* casing_name(CasingCategory c);
CasingCategory casing_of(const std::string& word);

// POS label set and morphological feature catalog built from training data.
// Every feature value set contains the reserved value "None" at index 0;
// absent features train toward it.
struct LabelSchema {
  std::vector<std::string> pos_values;
  std::vector<std::string> feature_keys;  // sorted case-insensitively
  std::map<std::string, std::vector<std::string>> feature_values;

  std::optional<int> pos_index(const std::string& upos) const;
  std::optional<int> feature_value_index(const std::string& key, const std::string& value) const;
  int feature_count() const { return static_cast<int>(feature_keys.size()); }
};

// Character alphabet with reserved symbols. Indices 0..3 are PAD, UNK, EOW
// and the decoder start symbol; real characters follow in codepoint order.
class CharVocab {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr int kEow = 2;
  static constexpr int kBos = 3;  // decoder start-of-sequence indicator
  static constexpr int kReserved = 4;

  CharVocab() = default;
  explicit CharVocab(std::vector<char32_t> sorted_chars);

  int size() const { return kReserved + static_cast<int>(chars_.size()); }
  int index_of(char32_t c) const;  // kUnk when unseen
  const std::vector<char32_t>& chars() const { return chars_; }
  // Codepoint for a real-character index; nullopt for reserved indices.
  std::optional<char32_t> char_at(int index) const;

 private:
  std::vector<char32_t> chars_;
  std::unordered_map<char32_t, int> index_;
};

// Pretrained word vectors, frozen during training. Lookup policy: exact
// match, else lowercased match, else the zero vector.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  explicit EmbeddingTable(int dim) : dim_(dim), zero_(static_cast<size_t>(dim), Real(0)) {}

  int dim() const { return dim_; }
  size_t count() const { return order_.size(); }
  void insert(const std::string& token, std::vector<Real> v);
  const std::vector<Real>& vector_for(const std::string& word) const;
  bool contains(const std::string& token) const { return vectors_.count(token) != 0; }
  const std::vector<std::string>& tokens() const { return order_; }

 private:
  int dim_ = 0;
  std::vector<std::string> order_;  // insertion order, for serialization
  std::unordered_map<std::string, std::vector<Real>> vectors_;
  std::vector<Real> zero_;
};

// Model-ready view of one word: character indices, casing, classification
// targets (or masks where the annotation is missing/unseen) and the lemma
// target terminated by EOW.
struct EncodedWord {
  std::string form;
  std::vector<int> char_ids;  // input word characters, truncated to the clamp
  int full_length = 0;        // pre-truncation character count n_i
  CasingCategory casing = CasingCategory::kOther;
  int pos_target = -1;  // -1 = masked out of the POS loss
  std::vector<int> feat_targets;  // per feature key; -1 = masked
  std::vector<int> lemma_target;  // char ids + EOW; empty = masked
};

struct EncodedSentence {
  std::vector<EncodedWord> words;
  int length() const { return static_cast<int>(words.size()); }
};

// Scans training data for POS values, feature keys/values and the character
// alphabet (over forms and lemmas). Deterministic: value sets are sorted,
// "None" is prepended to every feature value set.
void build_schema(const conllu::Document& training, LabelSchema* schema, CharVocab* chars);

EncodedWord encode_word(const std::string& form, const std::string& lemma,
                        const std::string& upos, const std::string& feats_raw,
                        const LabelSchema& schema, const CharVocab& chars, int max_word_len);

EncodedSentence encode_labels(const conllu::Sentence& sentence, const LabelSchema& schema,
                              const CharVocab& chars, int max_word_len = 64);

}  // namespace morphtag
