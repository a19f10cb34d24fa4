#include "morphtag/metrics.hpp"

#include <cstdio>
#include <stdexcept>

#include "morphtag/feats.hpp"

namespace morphtag {

EvalReport evaluate(const conllu::Document& gold, const conllu::Document& system) {
  if (gold.sentences.size() != system.sentences.size())
    throw std::runtime_error("evaluate: sentence count mismatch (" +
                             std::to_string(gold.sentences.size()) + " gold vs " +
                             std::to_string(system.sentences.size()) + " system)");

  int total = 0, pos_ok = 0, feats_ok = 0, lemma_ok = 0;
  for (size_t si = 0; si < gold.sentences.size(); ++si) {
    auto gw = gold.sentences[si].word_tokens();
    auto sw = system.sentences[si].word_tokens();
    if (gw.size() != sw.size())
      throw std::runtime_error("evaluate: sentence " + std::to_string(si + 1) +
                               " word count mismatch (" + std::to_string(gw.size()) + " gold vs " +
                               std::to_string(sw.size()) + " system)");
    for (size_t wi = 0; wi < gw.size(); ++wi) {
      if (gw[wi]->form != sw[wi]->form)
        throw std::runtime_error("evaluate: sentence " + std::to_string(si + 1) + " word " +
                                 std::to_string(wi + 1) + " form mismatch (\"" + gw[wi]->form +
                                 "\" vs \"" + sw[wi]->form + "\")");
      ++total;
      if (gw[wi]->upos == sw[wi]->upos) ++pos_ok;
      if (parse_feats(gw[wi]->feats) == parse_feats(sw[wi]->feats)) ++feats_ok;
      if (gw[wi]->lemma == sw[wi]->lemma) ++lemma_ok;
    }
  }

  EvalReport r;
  r.token_count = total;
  if (total > 0) {
    r.pos_accuracy = 100.0 * pos_ok / total;
    r.ufeats_accuracy = 100.0 * feats_ok / total;
    r.lemma_accuracy = 100.0 * lemma_ok / total;
  }
  return r;
}

std::string format_report(const EvalReport& report) {
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "Metric  | Accuracy\n"
                "--------+---------\n"
                "POS     | %8.2f\n"
                "UFeats  | %8.2f\n"
                "Lemma   | %8.2f\n"
                "Tokens  | %8d",
                report.pos_accuracy, report.ufeats_accuracy, report.lemma_accuracy,
                report.token_count);
  return buf;
}

}  // namespace morphtag
