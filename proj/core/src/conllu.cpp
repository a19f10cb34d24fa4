#include "morphtag/conllu.hpp"

#include <cctype>
#include <stdexcept>

#include "morphtag/feats.hpp"
#include "morphtag/utf8.hpp"

namespace morphtag::conllu {

namespace {

[[noreturn]] void fail(size_t line_no, const std::string& msg) {
  throw std::runtime_error("line " + std::to_string(line_no) + ": " + msg);
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

TokenId parse_id(std::string_view field, size_t line_no) {
  size_t dash = field.find('-');
  size_t dot = field.find('.');
  if (dash != std::string_view::npos) {
    std::string_view a = field.substr(0, dash);
    std::string_view b = field.substr(dash + 1);
    if (!all_digits(a) || !all_digits(b)) fail(line_no, "malformed token id \"" + std::string(field) + "\"");
    int start = std::stoi(std::string(a));
    int end = std::stoi(std::string(b));
    if (start >= end) fail(line_no, "multiword range must have start < end");
    return TokenId::range(start, end);
  }
  if (dot != std::string_view::npos) {
    std::string_view a = field.substr(0, dot);
    std::string_view b = field.substr(dot + 1);
    if (!all_digits(a) || !all_digits(b)) fail(line_no, "malformed token id \"" + std::string(field) + "\"");
    int major = std::stoi(std::string(a));
    int minor = std::stoi(std::string(b));
    if (minor < 1) fail(line_no, "empty-node id must have minor >= 1");
    return TokenId::empty_node(major, minor);
  }
  if (!all_digits(field)) fail(line_no, "malformed token id \"" + std::string(field) + "\"");
  int id = std::stoi(std::string(field));
  if (id < 1) fail(line_no, "word id must be >= 1");
  return TokenId::word(id);
}

}  // namespace

std::string TokenId::str() const {
  switch (kind) {
    case Kind::kWord:
      return std::to_string(major);
    case Kind::kMultiwordRange:
      return std::to_string(major) + "-" + std::to_string(minor);
    case Kind::kEmptyNode:
      return std::to_string(major) + "." + std::to_string(minor);
  }
  return {};
}

std::vector<const Token*> Sentence::word_tokens() const {
  std::vector<const Token*> out;
  for (const Token& t : tokens)
    if (t.id.is_word()) out.push_back(&t);
  return out;
}

int Sentence::word_count() const {
  int n = 0;
  for (const Token& t : tokens) n += t.id.is_word() ? 1 : 0;
  return n;
}

Document parse(std::string_view text) {
  if (!utf8::valid(text)) throw std::runtime_error("input is not valid UTF-8");

  Document doc;
  Sentence current;
  int expected_word_id = 1;
  size_t line_no = 0;
  size_t sentence_start_line = 0;

  auto flush = [&]() {
    if (current.comments.empty() && current.tokens.empty()) return;
    if (current.tokens.empty())
      fail(line_no, "sentence " + std::to_string(doc.sentences.size() + 1) + " has comments but no tokens");
    doc.sentences.push_back(std::move(current));
    current = Sentence{};
    expected_word_id = 1;
  };

  size_t pos = 0;
  while (pos <= text.size()) {
    size_t nl = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    bool last = nl == std::string_view::npos;
    ++line_no;

    if (line.empty()) {
      flush();
    } else if (line[0] == '#') {
      if (!current.tokens.empty())
        fail(line_no, "comment after token lines within a sentence");
      if (current.comments.empty() && current.tokens.empty()) sentence_start_line = line_no;
      current.comments.emplace_back(line);
    } else {
      if (current.comments.empty() && current.tokens.empty()) sentence_start_line = line_no;
      std::vector<std::string_view> fields;
      size_t start = 0;
      while (true) {
        size_t tab = line.find('\t', start);
        if (tab == std::string_view::npos) {
          fields.push_back(line.substr(start));
          break;
        }
        fields.push_back(line.substr(start, tab - start));
        start = tab + 1;
      }
      if (fields.size() != 10)
        fail(line_no, "expected 10 tab-separated fields, found " + std::to_string(fields.size()));
      for (const auto& f : fields)
        if (f.empty()) fail(line_no, "empty field (use \"_\" for unspecified values)");

      Token tok;
      tok.id = parse_id(fields[0], line_no);
      tok.form = std::string(fields[1]);
      tok.lemma = std::string(fields[2]);
      tok.upos = std::string(fields[3]);
      tok.xpos = std::string(fields[4]);
      tok.feats = std::string(fields[5]);
      tok.head = std::string(fields[6]);
      tok.deprel = std::string(fields[7]);
      tok.deps = std::string(fields[8]);
      tok.misc = std::string(fields[9]);

      if (tok.id.is_word()) {
        if (tok.id.major != expected_word_id)
          fail(line_no, "sentence " + std::to_string(doc.sentences.size() + 1) +
                            " (starting at line " + std::to_string(sentence_start_line) +
                            "): non-monotonic word id " + std::to_string(tok.id.major) +
                            ", expected " + std::to_string(expected_word_id));
        ++expected_word_id;
      }
      current.tokens.push_back(std::move(tok));
    }

    if (last) break;
    pos = nl + 1;
  }
  flush();
  return doc;
}

std::string serialize(const Document& doc) {
  std::string out;
  for (const Sentence& s : doc.sentences) {
    for (const std::string& c : s.comments) {
      out += c;
      out += '\n';
    }
    for (const Token& t : s.tokens) {
      out += t.id.str();
      out += '\t';
      out += t.form;
      out += '\t';
      out += t.lemma;
      out += '\t';
      out += t.upos;
      out += '\t';
      out += t.xpos;
      out += '\t';
      out += t.feats;
      out += '\t';
      out += t.head;
      out += '\t';
      out += t.deprel;
      out += '\t';
      out += t.deps;
      out += '\t';
      out += t.misc;
      out += '\n';
    }
    out += '\n';
  }
  return out;
}

Document merge_predictions(const Document& baseline,
                           const std::vector<SentencePrediction>& predictions) {
  if (baseline.sentences.size() != predictions.size())
    throw std::runtime_error(
        "alignment error at sentence " +
        std::to_string(std::min(baseline.sentences.size(), predictions.size()) + 1) + ": " +
        std::to_string(baseline.sentences.size()) + " sentences vs " +
        std::to_string(predictions.size()) + " predictions");

  Document out = baseline;
  for (size_t si = 0; si < out.sentences.size(); ++si) {
    Sentence& sent = out.sentences[si];
    const SentencePrediction& pred = predictions[si];
    size_t wi = 0;
    for (Token& tok : sent.tokens) {
      if (!tok.id.is_word()) continue;
      if (wi >= pred.words.size())
        throw std::runtime_error("alignment error at sentence " + std::to_string(si + 1) + ": " +
                                 std::to_string(pred.words.size()) + " predicted words vs " +
                                 std::to_string(sent.word_count()) + " word tokens");
      const WordPrediction& wp = pred.words[wi++];
      tok.lemma = wp.lemma.empty() ? "_" : wp.lemma;
      tok.upos = wp.upos.empty() ? "_" : wp.upos;
      tok.feats = format_feats(wp.feats);
    }
    if (wi != pred.words.size())
      throw std::runtime_error("alignment error at sentence " + std::to_string(si + 1) + ": " +
                               std::to_string(pred.words.size()) + " predicted words vs " +
                               std::to_string(sent.word_count()) + " word tokens");
  }
  return out;
}

}  // namespace morphtag::conllu
