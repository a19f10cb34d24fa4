#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "morphtag/model.hpp"

namespace morphtag {

struct TrainConfig {
  double lambda_lemma = 1.0;
  double lambda_pos = 0.2;
  double lambda_feat_default = 1.0;
  std::map<std::string, double> lambda_feat;  // per-key overrides
  double lr_initial = 0.001;
  double lr_after_epoch7 = 0.0005;  // takes effect from epoch 7 (1-based)
  int patience = 5;
  int batch_size = 32;
  int max_epochs = 100;
  uint64_t seed = 42;
  double rmsprop_rho = 0.9;
  double rmsprop_eps = 1e-7;
  double grad_clip = 5.0;  // global norm; 0 disables

  double lambda_for(const std::string& feature_key) const {
    auto it = lambda_feat.find(feature_key);
    return it == lambda_feat.end() ? lambda_feat_default : it->second;
  }
  void validate() const;
};

// Per-task cross-entropy sums and the word counts they average over.
struct LossSums {
  double pos_sum = 0;
  int pos_count = 0;
  double lemma_sum = 0;  // sum of per-word mean step cross-entropies
  int lemma_count = 0;
  std::map<std::string, double> feat_sum;
  std::map<std::string, int> feat_count;

  void add(const LossSums& other);
  int unmasked_words() const;
};

// Mean per-task losses and their weighted combination. A task with no
// unmasked words reports 0.
struct LossBreakdown {
  double lemma = 0;
  double pos = 0;
  std::map<std::string, double> feats;
  double total = 0;
};

LossBreakdown make_breakdown(const LossSums& sums, const TrainConfig& config);

// Sentences grouped for one update, each padded to a common length with
// placeholder positions that are masked out of every loss term.
struct Batch {
  std::vector<const EncodedSentence*> sentences;
  std::vector<int> padded_len;  // >= each sentence's word count
};

// Deterministic per (seed, epoch): shuffles sentence order, groups into
// batches of `batch_size`, pads each batch to its own maximum length.
std::vector<Batch> make_batches(const std::vector<EncodedSentence>& data, int batch_size,
                                uint64_t seed, int epoch);

struct BatchLoss {
  Graph::Id total = -1;  // scalar node, defined while the graph is alive
  LossSums sums;
};

// Forward pass plus multitask loss assembly over one batch. Masked positions
// contribute exactly zero to every term. Throws if every word of the batch is
// masked for every task, or if the loss is non-finite.
BatchLoss batch_loss(Graph& g, const Batch& batch, const Model& m, const TrainConfig& config);

// RMSProp without momentum: a <- rho*a + (1-rho)*g^2, then
// theta <- theta - lr*g / (sqrt(a) + eps).
class RmsProp {
 public:
  RmsProp(std::vector<Parameter*> params, double rho, double eps);
  void zero_grads();
  void step(double lr);
  const std::vector<Parameter*>& params() const { return params_; }

 private:
  std::vector<Parameter*> params_;
  std::vector<Tensor> accum_;
  Real rho_, eps_;
};

// Scales all gradients so their global L2 norm is at most max_norm
// (no-op when max_norm <= 0). Returns the pre-clip norm.
double clip_gradients(const std::vector<Parameter*>& params, double max_norm);

struct EpochRecord {
  int epoch = 0;
  double lr = 0;
  LossBreakdown train_loss;
  LossBreakdown dev_loss;
};

struct TrainResult {
  std::vector<EpochRecord> history;
  int best_epoch = 0;
  double best_dev_loss = 0;
  int epochs_run = 0;
};

struct TrainHooks {
  // Called after each epoch; return false to stop training.
  std::function<bool(const EpochRecord&, const Model&)> on_epoch_end;
  // Replaces the computed dev loss (scripted-schedule testing).
  std::function<double(int epoch)> dev_loss_override;
};

// Builds the schema from the training document, initializes parameters from
// the seed, and runs RMSProp with the two-phase learning rate and dev-loss
// early stopping. The returned model carries the best checkpoint's weights.
Model train_model(const conllu::Document& train_doc, const conllu::Document& dev_doc,
                  EmbeddingTable embeddings, const ModelConfig& model_config,
                  const TrainConfig& train_config, TrainResult* result = nullptr,
                  const TrainHooks& hooks = {}, std::ostream* log = nullptr);

std::string format_epoch_record(const EpochRecord& rec);

}  // namespace morphtag
