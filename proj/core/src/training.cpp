#include "morphtag/training.hpp"

#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace morphtag {

void TrainConfig::validate() const {
  if (lambda_lemma < 0 || lambda_pos < 0 || lambda_feat_default < 0)
    throw std::runtime_error("TrainConfig: loss weights must be >= 0");
  for (const auto& [k, v] : lambda_feat)
    if (v < 0) throw std::runtime_error("TrainConfig: lambda for " + k + " must be >= 0");
  if (lr_initial <= 0 || lr_after_epoch7 <= 0)
    throw std::runtime_error("TrainConfig: learning rates must be > 0");
  if (patience < 1) throw std::runtime_error("TrainConfig: patience must be >= 1");
  if (batch_size < 1) throw std::runtime_error("TrainConfig: batch_size must be >= 1");
  if (max_epochs < 1) throw std::runtime_error("TrainConfig: max_epochs must be >= 1");
}

void LossSums::add(const LossSums& other) {
  pos_sum += other.pos_sum;
  pos_count += other.pos_count;
  lemma_sum += other.lemma_sum;
  lemma_count += other.lemma_count;
  for (const auto& [k, v] : other.feat_sum) feat_sum[k] += v;
  for (const auto& [k, v] : other.feat_count) feat_count[k] += v;
}

int LossSums::unmasked_words() const {
  int n = pos_count + lemma_count;
  for (const auto& [k, v] : feat_count) n += v;
  return n;
}

LossBreakdown make_breakdown(const LossSums& sums, const TrainConfig& config) {
  LossBreakdown b;
  b.pos = sums.pos_count ? sums.pos_sum / sums.pos_count : 0.0;
  b.lemma = sums.lemma_count ? sums.lemma_sum / sums.lemma_count : 0.0;
  b.total = config.lambda_lemma * b.lemma + config.lambda_pos * b.pos;
  for (const auto& [key, count] : sums.feat_count) {
    double mean = count ? sums.feat_sum.at(key) / count : 0.0;
    b.feats[key] = mean;
    b.total += config.lambda_for(key) * mean;
  }
  return b;
}

std::vector<Batch> make_batches(const std::vector<EncodedSentence>& data, int batch_size,
                                uint64_t seed, int epoch) {
  if (batch_size < 1) throw std::runtime_error("make_batches: batch_size must be >= 1");
  std::vector<size_t> order(data.size());
  std::iota(order.begin(), order.end(), size_t{0});
  Rng rng(seed + 0x9e3779b97f4a7c15ULL * static_cast<uint64_t>(epoch));
  rng.shuffle(order);

  std::vector<Batch> batches;
  for (size_t start = 0; start < order.size(); start += static_cast<size_t>(batch_size)) {
    Batch b;
    size_t end = std::min(order.size(), start + static_cast<size_t>(batch_size));
    int max_len = 0;
    for (size_t i = start; i < end; ++i) {
      b.sentences.push_back(&data[order[i]]);
      max_len = std::max(max_len, data[order[i]].length());
    }
    b.padded_len.assign(b.sentences.size(), max_len);
    batches.push_back(std::move(b));
  }
  return batches;
}

BatchLoss batch_loss(Graph& g, const Batch& batch, const Model& m, const TrainConfig& config) {
  if (batch.sentences.size() != batch.padded_len.size())
    throw std::runtime_error("batch_loss: padded_len does not align with sentences");

  BatchLoss out;
  std::vector<Graph::Id> pos_ces;
  std::vector<Graph::Id> lemma_word_means;
  std::vector<std::vector<Graph::Id>> feat_ces(m.schema.feature_keys.size());

  for (size_t si = 0; si < batch.sentences.size(); ++si) {
    const EncodedSentence& sent = *batch.sentences[si];
    int padded = std::max(batch.padded_len[si], sent.length());

    std::vector<Graph::Id> embedded;
    embedded.reserve(static_cast<size_t>(padded));
    for (const EncodedWord& w : sent.words) embedded.push_back(embed_word(g, w, m));
    for (int i = sent.length(); i < padded; ++i) embedded.push_back(embed_padding(g, m));

    std::vector<Graph::Id> h3 = extract_features(g, embedded, m);

    for (int i = 0; i < sent.length(); ++i) {
      const EncodedWord& w = sent.words[static_cast<size_t>(i)];
      HeadDistributions heads = classify_heads(g, h3[static_cast<size_t>(i)], m);
      if (w.pos_target >= 0) {
        Graph::Id ce = g.cross_entropy(heads.pos, w.pos_target);
        out.sums.pos_sum += static_cast<double>(g.scalar_value(ce));
        ++out.sums.pos_count;
        pos_ces.push_back(ce);
      }
      for (size_t k = 0; k < feat_ces.size(); ++k) {
        int target = w.feat_targets[k];
        if (target < 0) continue;
        Graph::Id ce = g.cross_entropy(heads.feats[k], target);
        const std::string& key = m.schema.feature_keys[k];
        out.sums.feat_sum[key] += static_cast<double>(g.scalar_value(ce));
        ++out.sums.feat_count[key];
        feat_ces[k].push_back(ce);
      }
      if (!w.lemma_target.empty()) {
        std::vector<Graph::Id> steps =
            decode_lemma_teacher_forced(g, h3[static_cast<size_t>(i)], w, m);
        std::vector<Graph::Id> step_ces;
        step_ces.reserve(steps.size());
        for (size_t j = 0; j < steps.size(); ++j)
          step_ces.push_back(g.cross_entropy(steps[j], w.lemma_target[j]));
        Graph::Id word_mean =
            g.affine(g.add_n(step_ces), Real(1) / static_cast<Real>(step_ces.size()), Real(0));
        out.sums.lemma_sum += static_cast<double>(g.scalar_value(word_mean));
        ++out.sums.lemma_count;
        lemma_word_means.push_back(word_mean);
      }
    }
  }

  if (out.sums.unmasked_words() == 0)
    throw std::runtime_error("batch_loss: batch has zero unmasked words");

  std::vector<Graph::Id> weighted;
  if (!lemma_word_means.empty())
    weighted.push_back(g.affine(
        g.add_n(lemma_word_means),
        static_cast<Real>(config.lambda_lemma / static_cast<double>(lemma_word_means.size())),
        Real(0)));
  if (!pos_ces.empty())
    weighted.push_back(g.affine(
        g.add_n(pos_ces),
        static_cast<Real>(config.lambda_pos / static_cast<double>(pos_ces.size())), Real(0)));
  for (size_t k = 0; k < feat_ces.size(); ++k) {
    if (feat_ces[k].empty()) continue;
    double lambda = config.lambda_for(m.schema.feature_keys[k]);
    weighted.push_back(g.affine(
        g.add_n(feat_ces[k]), static_cast<Real>(lambda / static_cast<double>(feat_ces[k].size())),
        Real(0)));
  }
  out.total = weighted.size() == 1 ? weighted[0] : g.add_n(weighted);

  if (!std::isfinite(static_cast<double>(g.scalar_value(out.total))))
    throw std::runtime_error("batch_loss: non-finite loss");
  return out;
}

RmsProp::RmsProp(std::vector<Parameter*> params, double rho, double eps)
    : params_(std::move(params)), rho_(static_cast<Real>(rho)), eps_(static_cast<Real>(eps)) {
  accum_.reserve(params_.size());
  for (Parameter* p : params_) accum_.push_back(Tensor::zeros(p->value.shape));
}

void RmsProp::zero_grads() {
  for (Parameter* p : params_) p->zero_grad();
}

void RmsProp::step(double lr) {
  const Real lr_r = static_cast<Real>(lr);
  for (size_t i = 0; i < params_.size(); ++i) {
    Parameter* p = params_[i];
    Tensor& a = accum_[i];
    for (int j = 0; j < p->value.size(); ++j) {
      Real grad = p->grad[j];
      a[j] = rho_ * a[j] + (Real(1) - rho_) * grad * grad;
      p->value[j] -= lr_r * grad / (std::sqrt(a[j]) + eps_);
    }
  }
}

double clip_gradients(const std::vector<Parameter*>& params, double max_norm) {
  double sq = 0;
  for (Parameter* p : params)
    for (int j = 0; j < p->grad.size(); ++j) sq += static_cast<double>(p->grad[j]) * p->grad[j];
  double norm = std::sqrt(sq);
  if (max_norm > 0 && norm > max_norm) {
    Real scale = static_cast<Real>(max_norm / norm);
    for (Parameter* p : params)
      for (int j = 0; j < p->grad.size(); ++j) p->grad[j] *= scale;
  }
  return norm;
}

std::string format_epoch_record(const EpochRecord& rec) {
  std::ostringstream os;
  double feat_total = 0;
  for (const auto& [k, v] : rec.train_loss.feats) feat_total += v;
  double dev_feat_total = 0;
  for (const auto& [k, v] : rec.dev_loss.feats) dev_feat_total += v;
  os << "epoch=" << rec.epoch << " lr=" << rec.lr                       //
     << " train_total=" << rec.train_loss.total                         //
     << " train_lemma=" << rec.train_loss.lemma                         //
     << " train_pos=" << rec.train_loss.pos                             //
     << " train_feats=" << feat_total                                   //
     << " dev_total=" << rec.dev_loss.total                             //
     << " dev_lemma=" << rec.dev_loss.lemma                             //
     << " dev_pos=" << rec.dev_loss.pos                                 //
     << " dev_feats=" << dev_feat_total;
  return os.str();
}

namespace {

std::vector<Tensor> snapshot_params(const std::vector<Parameter*>& params) {
  std::vector<Tensor> out;
  out.reserve(params.size());
  for (const Parameter* p : params) out.push_back(p->value);
  return out;
}

void restore_params(const std::vector<Parameter*>& params, const std::vector<Tensor>& snap) {
  for (size_t i = 0; i < params.size(); ++i) params[i]->value = snap[i];
}

}  // namespace

Model train_model(const conllu::Document& train_doc, const conllu::Document& dev_doc,
                  EmbeddingTable embeddings, const ModelConfig& model_config,
                  const TrainConfig& train_config, TrainResult* result, const TrainHooks& hooks,
                  std::ostream* log) {
  train_config.validate();
  if (train_doc.sentences.empty()) throw std::runtime_error("train: empty training document");
  if (dev_doc.sentences.empty()) throw std::runtime_error("train: empty development document");

  Model model;
  model.config = model_config;
  build_schema(train_doc, &model.schema, &model.chars);
  model.embeddings = std::move(embeddings);

  Rng rng(train_config.seed);
  model.params =
      std::make_unique<ModelParams>(model.config, model.schema, model.chars, &rng);

  auto encode_doc = [&](const conllu::Document& doc) {
    std::vector<EncodedSentence> out;
    for (const conllu::Sentence& s : doc.sentences) {
      EncodedSentence enc = encode_labels(s, model.schema, model.chars, model.config.max_word_len);
      if (enc.length() > 0) out.push_back(std::move(enc));
    }
    return out;
  };
  std::vector<EncodedSentence> train_enc = encode_doc(train_doc);
  std::vector<EncodedSentence> dev_enc = encode_doc(dev_doc);
  if (train_enc.empty()) throw std::runtime_error("train: no trainable sentences");
  if (dev_enc.empty()) throw std::runtime_error("train: no development sentences");

  std::vector<Parameter*> params = model.params->all();
  RmsProp optimizer(params, train_config.rmsprop_rho, train_config.rmsprop_eps);

  TrainResult local;
  TrainResult& res = result ? *result : local;
  double best_dev = 0;
  int best_epoch = 0;
  std::vector<Tensor> best_snapshot;
  int epochs_without_improvement = 0;

  for (int epoch = 1; epoch <= train_config.max_epochs; ++epoch) {
    double lr = epoch >= 7 ? train_config.lr_after_epoch7 : train_config.lr_initial;

    LossSums train_sums;
    for (const Batch& batch :
         make_batches(train_enc, train_config.batch_size, train_config.seed, epoch)) {
      Graph g(/*training=*/true, &rng);
      BatchLoss loss = batch_loss(g, batch, model, train_config);
      train_sums.add(loss.sums);
      optimizer.zero_grads();
      g.backward(loss.total);
      clip_gradients(params, train_config.grad_clip);
      optimizer.step(lr);
    }

    LossSums dev_sums;
    for (const Batch& batch : make_batches(dev_enc, train_config.batch_size, 0, 0)) {
      Graph g(/*training=*/false);
      dev_sums.add(batch_loss(g, batch, model, train_config).sums);
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.lr = lr;
    rec.train_loss = make_breakdown(train_sums, train_config);
    rec.dev_loss = make_breakdown(dev_sums, train_config);
    if (hooks.dev_loss_override) rec.dev_loss.total = hooks.dev_loss_override(epoch);
    res.history.push_back(rec);
    res.epochs_run = epoch;
    if (log) *log << format_epoch_record(rec) << "\n";

    double dev_total = rec.dev_loss.total;
    if (best_epoch == 0 || dev_total < best_dev) {
      best_dev = dev_total;
      best_epoch = epoch;
      best_snapshot = snapshot_params(params);
      epochs_without_improvement = 0;
    } else {
      ++epochs_without_improvement;
    }

    if (hooks.on_epoch_end && !hooks.on_epoch_end(rec, model)) break;
    if (epochs_without_improvement >= train_config.patience) break;
  }

  if (!best_snapshot.empty()) restore_params(params, best_snapshot);
  res.best_epoch = best_epoch;
  res.best_dev_loss = best_dev;
  return model;
}

}  // namespace morphtag
