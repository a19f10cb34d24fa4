#pragma once

#include <string>

#include "morphtag/conllu.hpp"

namespace morphtag {

// Token-level accuracies over plain word tokens, assuming gold tokenization.
struct EvalReport {
  double pos_accuracy = 0;     // percent
  double ufeats_accuracy = 0;  // percent, order-insensitive FEATS comparison
  double lemma_accuracy = 0;   // percent, exact string match
  int token_count = 0;
};

// Requires identical sentence/word-token structure and identical forms;
// throws naming the first mismatch otherwise.
EvalReport evaluate(const conllu::Document& gold, const conllu::Document& system);

std::string format_report(const EvalReport& report);

}  // namespace morphtag
