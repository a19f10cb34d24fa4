// Command-line front end: `train` fits a model from CoNLL-U treebanks,
// `predict` rewrites the LEMMA/UPOS/FEATS columns of a CoNLL-U file, and
// `eval` reports token-level accuracies against a gold file.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <map>
#include <string>

#include "morphtag/bundle.hpp"
#include "morphtag/embeddings.hpp"
#include "morphtag/metrics.hpp"
#include "morphtag/model.hpp"
#include "morphtag/training.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

bool require_file(const std::string& path, const char* what) {
  if (std::filesystem::exists(path)) return true;
  std::cerr << "morphtag: " << what << " \"" << path << "\" does not exist\n";
  return false;
}

int run_train(const std::string& train_path, const std::string& dev_path,
              const std::string& emb_path, const std::string& out_dir,
              const std::string& config_path, const std::map<std::string, std::string>& flag_kv) {
  if (!require_file(train_path, "training file") || !require_file(dev_path, "dev file"))
    return kExitUsage;
  if (!emb_path.empty() && !require_file(emb_path, "embeddings file")) return kExitUsage;
  if (!config_path.empty() && !require_file(config_path, "config file")) return kExitUsage;

  try {
    morphtag::ModelConfig model_config;
    morphtag::TrainConfig train_config;
    if (!config_path.empty())
      morphtag::apply_config(morphtag::parse_config_file(config_path), &model_config,
                             &train_config);
    morphtag::apply_config(flag_kv, &model_config, &train_config);

    morphtag::EmbeddingTable embeddings(model_config.word_dim);
    if (!emb_path.empty()) {
      embeddings = morphtag::load_embeddings_file(emb_path, &std::cerr);
      if (embeddings.dim() != model_config.word_dim) {
        std::cerr << "morphtag: embeddings are " << embeddings.dim()
                  << "-dimensional; setting word_dim accordingly\n";
        model_config.word_dim = embeddings.dim();
      }
    }

    morphtag::conllu::Document train_doc =
        morphtag::conllu::parse(morphtag::read_file(train_path));
    morphtag::conllu::Document dev_doc = morphtag::conllu::parse(morphtag::read_file(dev_path));

    morphtag::TrainResult result;
    morphtag::Model model =
        morphtag::train_model(train_doc, dev_doc, std::move(embeddings), model_config,
                              train_config, &result, {}, &std::cout);
    morphtag::save_model(out_dir, model, result);
    std::cout << "best epoch " << result.best_epoch << " (dev loss " << result.best_dev_loss
              << "), model written to " << out_dir << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "morphtag: " << e.what() << "\n";
    return kExitRuntime;
  }
}

int run_predict(const std::string& model_dir, const std::string& input_path,
                const std::string& output_path) {
  if (!require_file(model_dir, "model directory") || !require_file(input_path, "input file"))
    return kExitUsage;
  try {
    morphtag::Model model = morphtag::load_model(model_dir);
    morphtag::conllu::Document doc = morphtag::conllu::parse(morphtag::read_file(input_path));
    morphtag::write_file(output_path,
                         morphtag::conllu::serialize(morphtag::predict_document(doc, model)));
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "morphtag: " << e.what() << "\n";
    return kExitRuntime;
  }
}

int run_eval(const std::string& gold_path, const std::string& pred_path, bool records) {
  if (!require_file(gold_path, "gold file") || !require_file(pred_path, "prediction file"))
    return kExitUsage;
  try {
    morphtag::conllu::Document gold = morphtag::conllu::parse(morphtag::read_file(gold_path));
    morphtag::conllu::Document pred = morphtag::conllu::parse(morphtag::read_file(pred_path));
    morphtag::EvalReport report = morphtag::evaluate(gold, pred);
    if (records) {
      char buf[160];
      std::snprintf(buf, sizeof(buf),
                    "pos_accuracy=%.2f ufeats_accuracy=%.2f lemma_accuracy=%.2f tokens=%d",
                    report.pos_accuracy, report.ufeats_accuracy, report.lemma_accuracy,
                    report.token_count);
      std::cout << buf << "\n";
    } else {
      std::cout << morphtag::format_report(report) << "\n";
    }
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "morphtag: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"joint lemma, part-of-speech and morphological-feature tagger"};
  app.require_subcommand(1);

  std::map<std::string, std::string> flag_kv;
  auto add_cfg = [&flag_kv](CLI::App* cmd, const std::string& flag, const std::string& key,
                            const std::string& desc) {
    cmd->add_option_function<std::string>(
        flag, [&flag_kv, key](const std::string& v) { flag_kv[key] = v; }, desc);
  };

  auto* train = app.add_subcommand("train", "train a model from CoNLL-U data");
  std::string train_path, dev_path, emb_path, out_dir, config_path;
  train->add_option("--train", train_path, "training CoNLL-U file")->required();
  train->add_option("--dev", dev_path, "development CoNLL-U file")->required();
  train->add_option("--embeddings", emb_path, "pretrained word vectors (text format)");
  train->add_option("--out", out_dir, "output model directory")->required();
  train->add_option("--config", config_path, "key = value configuration file");
  add_cfg(train, "--seed", "seed", "random seed (default 42)");
  add_cfg(train, "--lambda-lemma", "lambda_lemma", "lemma loss weight (default 1)");
  add_cfg(train, "--lambda-pos", "lambda_pos", "POS loss weight (default 0.2)");
  add_cfg(train, "--lambda-feat", "lambda_feat", "per-feature loss weight (default 1)");
  add_cfg(train, "--lr-initial", "lr_initial", "learning rate for epochs 1-6 (default 0.001)");
  add_cfg(train, "--lr-after-epoch7", "lr_after_epoch7",
          "learning rate from epoch 7 (default 0.0005)");
  add_cfg(train, "--patience", "patience", "early-stopping patience in epochs (default 5)");
  add_cfg(train, "--batch-size", "batch_size", "sentences per update (default 32)");
  add_cfg(train, "--max-epochs", "max_epochs", "epoch cap (default 100)");
  add_cfg(train, "--rmsprop-rho", "rmsprop_rho", "RMSProp decay (default 0.9)");
  add_cfg(train, "--rmsprop-eps", "rmsprop_eps", "RMSProp epsilon (default 1e-7)");
  add_cfg(train, "--grad-clip", "grad_clip", "global gradient-norm clip, 0 disables (default 5)");
  add_cfg(train, "--word-dim", "word_dim", "pretrained vector size (default 300)");
  add_cfg(train, "--char-emb-dim", "char_emb_dim", "character embedding size (default 30)");
  add_cfg(train, "--char-lstm-dim", "char_lstm_dim", "character LSTM size per direction (default 25)");
  add_cfg(train, "--extractor-dim", "extractor_dim", "feature extractor LSTM size (default 150)");
  add_cfg(train, "--extractor-layers", "extractor_layers", "feature extractor depth (default 3)");
  add_cfg(train, "--decoder-dim", "decoder_dim", "lemma decoder GRU size (default 150)");
  add_cfg(train, "--pos-emb-dim", "pos_emb_dim", "decoder position embedding size (default 5)");
  add_cfg(train, "--max-word-len", "max_word_len", "character clamp per word (default 64)");
  add_cfg(train, "--max-decode-overrun", "max_decode_overrun",
          "extra decoding steps past the word length (default 10)");
  add_cfg(train, "--dropout-rate", "dropout_rate", "dropout before each LSTM layer (default 0.5)");

  auto* predict = app.add_subcommand("predict", "annotate a CoNLL-U file with a trained model");
  std::string model_dir, input_path, output_path;
  predict->add_option("--model", model_dir, "model directory")->required();
  predict->add_option("--input", input_path, "input CoNLL-U file")->required();
  predict->add_option("--output", output_path, "output CoNLL-U file")->required();

  auto* eval = app.add_subcommand("eval", "compare a prediction against gold CoNLL-U");
  std::string gold_path, pred_path;
  bool records = false;
  eval->add_option("--gold", gold_path, "gold CoNLL-U file")->required();
  eval->add_option("--pred", pred_path, "predicted CoNLL-U file")->required();
  eval->add_flag("--records", records, "print line-oriented key=value records");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (train->parsed()) return run_train(train_path, dev_path, emb_path, out_dir, config_path, flag_kv);
  if (predict->parsed()) return run_predict(model_dir, input_path, output_path);
  if (eval->parsed()) return run_eval(gold_path, pred_path, records);
  return kExitUsage;
}
