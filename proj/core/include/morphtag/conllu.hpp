#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace morphtag::conllu {

// ID column of a token line: a plain word, a multiword range ("1-2") or an
// empty node ("5.1"). Only plain words are model inputs.
struct TokenId {
  enum class Kind { kWord, kMultiwordRange, kEmptyNode };
  Kind kind = Kind::kWord;
  int major = 0;  // word id / range start / empty-node major
  int minor = 0;  // range end / empty-node minor

  static TokenId word(int id) { return {Kind::kWord, id, 0}; }
  static TokenId range(int start, int end) { return {Kind::kMultiwordRange, start, end}; }
  static TokenId empty_node(int major, int minor) { return {Kind::kEmptyNode, major, minor}; }

  bool is_word() const { return kind == Kind::kWord; }
  std::string str() const;

  bool operator==(const TokenId&) const = default;
};

// One 10-column token line. Fields are kept verbatim so that serialization
// reproduces the original bytes.
struct Token {
  TokenId id;
  std::string form;
  std::string lemma;
  std::string upos;
  std::string xpos;
  std::string feats;
  std::string head;
  std::string deprel;
  std::string deps;
  std::string misc;

  bool operator==(const Token&) const = default;
};

struct Sentence {
  std::vector<std::string> comments;  // '#'-prefixed lines, verbatim
  std::vector<Token> tokens;

  // The model predicts over plain word tokens only.
  std::vector<const Token*> word_tokens() const;
  int word_count() const;

  bool operator==(const Sentence&) const = default;
};

struct Document {
  std::vector<Sentence> sentences;

  bool operator==(const Document&) const = default;
};

// Per-word model output used to rewrite the LEMMA/UPOS/FEATS columns.
struct WordPrediction {
  std::string lemma;
  std::string upos;
  std::map<std::string, std::string> feats;
};

struct SentencePrediction {
  std::vector<WordPrediction> words;
};

// Parses UTF-8 CoNLL-U text. Comments, field contents and sentence order are
// preserved. Errors carry the offending line number; non-monotonic word ids
// name the sentence.
Document parse(std::string_view text);

// Inverse of parse. Emits comments, token lines, and a blank line after each
// sentence; output ends with exactly one trailing newline.
std::string serialize(const Document& doc);

// Returns a copy of `baseline` whose word-token LEMMA, UPOS and FEATS columns
// are replaced by the predictions. Everything else is untouched. Predictions
// must align 1:1 with sentences and with each sentence's word tokens.
Document merge_predictions(const Document& baseline,
                           const std::vector<SentencePrediction>& predictions);

}  // namespace morphtag::conllu
