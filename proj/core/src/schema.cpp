#include "morphtag/schema.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "morphtag/utf8.hpp"

namespace morphtag {

const char* casing_name(CasingCategory c) {
  switch (c) {
    case CasingCategory::kNumeric: return "numeric";
    case CasingCategory::kMainlyNumeric: return "mainly_numeric";
    case CasingCategory::kAllLower: return "all_lower";
    case CasingCategory::kAllUpper: return "all_upper";
    case CasingCategory::kInitialUpper: return "initial_upper";
    case CasingCategory::kContainsDigit: return "contains_digit";
    case CasingCategory::kOther: return "other";
    case CasingCategory::kPadding: return "padding";
  }
  return "other";
}

CasingCategory casing_of(const std::string& word) {
  std::vector<char32_t> cps = utf8::decode(word);
  if (cps.empty()) throw std::runtime_error("casing_of: empty word");

  size_t digits = 0, lowers = 0, uppers = 0;
  for (char32_t c : cps) {
    if (utf8::is_digit(c)) ++digits;
    if (utf8::is_lower(c)) ++lowers;
    if (utf8::is_upper(c)) ++uppers;
  }
  size_t n = cps.size();
  if (digits == n) return CasingCategory::kNumeric;
  if (digits * 2 > n) return CasingCategory::kMainlyNumeric;
  if (lowers == n) return CasingCategory::kAllLower;
  if (uppers == n) return CasingCategory::kAllUpper;
  if (utf8::is_upper(cps[0])) return CasingCategory::kInitialUpper;
  if (digits > 0) return CasingCategory::kContainsDigit;
  return CasingCategory::kOther;
}

std::optional<int> LabelSchema::pos_index(const std::string& upos) const {
  auto it = std::find(pos_values.begin(), pos_values.end(), upos);
  if (it == pos_values.end()) return std::nullopt;
  return static_cast<int>(it - pos_values.begin());
}

std::optional<int> LabelSchema::feature_value_index(const std::string& key,
                                                    const std::string& value) const {
  auto it = feature_values.find(key);
  if (it == feature_values.end()) return std::nullopt;
  auto vit = std::find(it->second.begin(), it->second.end(), value);
  if (vit == it->second.end()) return std::nullopt;
  return static_cast<int>(vit - it->second.begin());
}

CharVocab::CharVocab(std::vector<char32_t> sorted_chars) : chars_(std::move(sorted_chars)) {
  for (size_t i = 0; i < chars_.size(); ++i)
    index_.emplace(chars_[i], kReserved + static_cast<int>(i));
}

int CharVocab::index_of(char32_t c) const {
  auto it = index_.find(c);
  return it == index_.end() ? kUnk : it->second;
}

std::optional<char32_t> CharVocab::char_at(int index) const {
  if (index < kReserved || index >= size()) return std::nullopt;
  return chars_[static_cast<size_t>(index - kReserved)];
}

void EmbeddingTable::insert(const std::string& token, std::vector<Real> v) {
  if (static_cast<int>(v.size()) != dim_)
    throw std::runtime_error("embedding for \"" + token + "\" has " + std::to_string(v.size()) +
                             " entries, expected " + std::to_string(dim_));
  auto [it, inserted] = vectors_.emplace(token, std::move(v));
  if (inserted) order_.push_back(token);
}

const std::vector<Real>& EmbeddingTable::vector_for(const std::string& word) const {
  auto it = vectors_.find(word);
  if (it != vectors_.end()) return it->second;
  std::string lower;
  lower.reserve(word.size());
  bool changed = false;
  for (const char32_t c : utf8::decode(word)) {
    char32_t l = c;
    if (c < 0x80 && utf8::is_upper(c)) {
      l = c + 0x20;
      changed = true;
    } else if (utf8::is_upper(c) && c >= 0xC0 && c <= 0xDE) {
      l = c + 0x20;
      changed = true;
    }
    lower += utf8::encode(l);
  }
  if (changed) {
    it = vectors_.find(lower);
    if (it != vectors_.end()) return it->second;
  }
  return zero_;
}

void build_schema(const conllu::Document& training, LabelSchema* schema, CharVocab* chars) {
  std::set<std::string> pos;
  std::map<std::string, std::set<std::string>> feats;
  std::set<char32_t> alphabet;
  bool any_tagged = false;

  for (const conllu::Sentence& sent : training.sentences) {
    for (const conllu::Token& tok : sent.tokens) {
      if (!tok.id.is_word()) continue;
      for (char32_t c : utf8::decode(tok.form)) alphabet.insert(c);
      if (tok.lemma != "_")
        for (char32_t c : utf8::decode(tok.lemma)) alphabet.insert(c);
      if (tok.upos != "_") {
        pos.insert(tok.upos);
        any_tagged = true;
      }
      if (tok.feats != "_")
        for (const auto& [k, v] : parse_feats(tok.feats)) feats[k].insert(v);
    }
  }
  if (!any_tagged)
    throw std::runtime_error("training data contains no word with a UPOS tag");

  schema->pos_values.assign(pos.begin(), pos.end());
  schema->feature_keys.clear();
  schema->feature_values.clear();
  for (const auto& [key, values] : feats) {
    schema->feature_keys.push_back(key);
    std::vector<std::string> ordered;
    ordered.push_back("None");
    ordered.insert(ordered.end(), values.begin(), values.end());
    schema->feature_values.emplace(key, std::move(ordered));
  }
  std::sort(schema->feature_keys.begin(), schema->feature_keys.end(),
            [](const std::string& a, const std::string& b) { return feat_key_less(a, b); });

  *chars = CharVocab(std::vector<char32_t>(alphabet.begin(), alphabet.end()));
}

EncodedWord encode_word(const std::string& form, const std::string& lemma,
                        const std::string& upos, const std::string& feats_raw,
                        const LabelSchema& schema, const CharVocab& chars, int max_word_len) {
  EncodedWord w;
  w.form = form;
  std::vector<char32_t> cps = utf8::decode(form);
  w.full_length = static_cast<int>(cps.size());
  int keep = std::min<int>(w.full_length, max_word_len);
  w.char_ids.reserve(static_cast<size_t>(keep));
  for (int i = 0; i < keep; ++i) w.char_ids.push_back(chars.index_of(cps[static_cast<size_t>(i)]));
  w.casing = casing_of(form);

  if (upos != "_") {
    auto idx = schema.pos_index(upos);
    w.pos_target = idx ? *idx : -1;
  }

  std::map<std::string, std::string> fmap;
  if (feats_raw != "_" && !feats_raw.empty()) fmap = parse_feats(feats_raw);
  w.feat_targets.resize(schema.feature_keys.size(), -1);
  for (size_t k = 0; k < schema.feature_keys.size(); ++k) {
    const std::string& key = schema.feature_keys[k];
    auto it = fmap.find(key);
    const std::string& value = it == fmap.end() ? "None" : it->second;
    auto idx = schema.feature_value_index(key, value);
    w.feat_targets[k] = idx ? *idx : -1;  // unseen value: masked
  }

  if (lemma != "_" && !lemma.empty()) {
    std::vector<char32_t> lps = utf8::decode(lemma);
    int lkeep = std::min<int>(static_cast<int>(lps.size()), max_word_len);
    w.lemma_target.reserve(static_cast<size_t>(lkeep) + 1);
    for (int i = 0; i < lkeep; ++i)
      w.lemma_target.push_back(chars.index_of(lps[static_cast<size_t>(i)]));
    w.lemma_target.push_back(CharVocab::kEow);
  }
  return w;
}

EncodedSentence encode_labels(const conllu::Sentence& sentence, const LabelSchema& schema,
                              const CharVocab& chars, int max_word_len) {
  EncodedSentence out;
  for (const conllu::Token* tok : sentence.word_tokens())
    out.words.push_back(
        encode_word(tok->form, tok->lemma, tok->upos, tok->feats, schema, chars, max_word_len));
  return out;
}

}  // namespace morphtag
