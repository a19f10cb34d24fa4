#include <doctest.h>

#include <stdexcept>
#include <filesystem>
#include <sstream>
#include <string>

#include "morphtag/bundle.hpp"
#include "morphtag/embeddings.hpp"

using namespace morphtag;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("morphtag_test_" + tag + "_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string str(const std::string& name = "") const {
    return name.empty() ? path.string() : (path / name).string();
  }
};

std::string token_line(int id, const std::string& form, const std::string& lemma,
                       const std::string& upos, const std::string& feats) {
  return std::to_string(id) + "\t" + form + "\t" + lemma + "\t" + upos + "\t_\t" + feats +
         "\t0\tdep\t_\t_\n";
}

Model make_model(uint64_t seed = 3) {
  std::string text = token_line(1, "Dogs", "dog", "NOUN", "Number=Plur") +
                     token_line(2, "bark", "bark", "VERB", "Mood=Ind") + "\n";
  Model m;
  m.config.word_dim = 5;
  m.config.char_emb_dim = 3;
  m.config.char_lstm_dim = 2;
  m.config.extractor_dim = 4;
  m.config.extractor_layers = 2;
  m.config.decoder_dim = 4;
  m.config.pos_emb_dim = 2;
  m.config.max_word_len = 6;
  m.config.dropout_rate = Real(0.25);
  build_schema(conllu::parse(text), &m.schema, &m.chars);
  m.embeddings = EmbeddingTable(5);
  Rng er(8);
  for (const std::string& w : {"Dogs", "bark", "the"}) {
    std::vector<Real> v(5);
    for (auto& x : v) x = static_cast<Real>(er.uniform(-1, 1));
    m.embeddings.insert(w, std::move(v));
  }
  Rng rng(seed);
  m.params = std::make_unique<ModelParams>(m.config, m.schema, m.chars, &rng);
  return m;
}

}  // namespace

TEST_CASE("weights file round-trips byte for byte") {
  TempDir dir("weights");
  Tensor a({2, 3}, {1, 2, 3, 4, 5, 6});
  Tensor b({4}, {Real(0.25), Real(-1), Real(1e-8), Real(3)});
  std::vector<std::pair<std::string, const Tensor*>> tensors{{"alpha", &a}, {"beta.gamma", &b}};
  save_weights(dir.str("w.bin"), tensors);

  auto loaded = load_weights(dir.str("w.bin"));
  REQUIRE(loaded.size() == 2);
  CHECK(loaded[0].first == "alpha");
  CHECK(loaded[0].second.shape == std::vector<int>{2, 3});
  CHECK(loaded[1].second[0] == Real(0.25));

  std::vector<std::pair<std::string, const Tensor*>> again{
      {loaded[0].first, &loaded[0].second}, {loaded[1].first, &loaded[1].second}};
  save_weights(dir.str("w2.bin"), again);
  CHECK(read_file(dir.str("w.bin")) == read_file(dir.str("w2.bin")));
}

TEST_CASE("empty weights file is exactly magic plus zero count") {
  TempDir dir("weights_empty");
  save_weights(dir.str("empty.bin"), {});
  std::string bytes = read_file(dir.str("empty.bin"));
  REQUIRE(bytes.size() == 8);
  CHECK(bytes.substr(0, 4) == "MJW1");
  CHECK(bytes.substr(4) == std::string(4, '\0'));
}

TEST_CASE("weights loader rejects bad magic and truncation") {
  TempDir dir("weights_bad");
  Tensor a({2}, {1, 2});
  save_weights(dir.str("w.bin"), {{"a", &a}});
  std::string bytes = read_file(dir.str("w.bin"));

  std::string corrupted = bytes;
  corrupted[0] = 'X';
  write_file(dir.str("bad_magic.bin"), corrupted);
  CHECK_THROWS_WITH_AS(load_weights(dir.str("bad_magic.bin")),
                       doctest::Contains("bad magic"), std::runtime_error);

  write_file(dir.str("truncated.bin"), bytes.substr(0, bytes.size() - 3));
  CHECK_THROWS_WITH_AS(load_weights(dir.str("truncated.bin")), doctest::Contains("truncated"),
                       std::runtime_error);

  write_file(dir.str("trailing.bin"), bytes + "xx");
  CHECK_THROWS_AS(load_weights(dir.str("trailing.bin")), std::runtime_error);
}

TEST_CASE("model bundle round-trips to identical predictions") {
  TempDir dir("bundle");
  Model m = make_model();
  TrainResult history;
  EpochRecord rec;
  rec.epoch = 1;
  rec.lr = 0.001;
  rec.train_loss.total = 3.25;
  history.history.push_back(rec);
  save_model(dir.str(), m, history);

  CHECK(fs::exists(dir.path / kSchemaFileName));
  CHECK(fs::exists(dir.path / kWeightsFileName));
  CHECK(fs::exists(dir.path / kHistoryFileName));

  Model loaded = load_model(dir.str());
  CHECK(loaded.schema.pos_values == m.schema.pos_values);
  CHECK(loaded.schema.feature_keys == m.schema.feature_keys);
  CHECK(loaded.schema.feature_values == m.schema.feature_values);
  CHECK(loaded.chars.chars() == m.chars.chars());
  CHECK(loaded.config.extractor_dim == m.config.extractor_dim);
  CHECK(loaded.config.dropout_rate == m.config.dropout_rate);
  CHECK(loaded.embeddings.count() == m.embeddings.count());
  CHECK(loaded.embeddings.vector_for("the") == m.embeddings.vector_for("the"));

  conllu::Document doc = conllu::parse(token_line(1, "Dogs", "_", "_", "_") +
                                       token_line(2, "meow", "_", "_", "_") + "\n");
  conllu::Document a = predict_document(doc, m);
  conllu::Document b = predict_document(doc, loaded);
  CHECK(conllu::serialize(a) == conllu::serialize(b));

  // saving the loaded model reproduces the weights file byte for byte
  TempDir dir2("bundle2");
  save_model(dir2.str(), loaded, history);
  CHECK(read_file(dir.str(kWeightsFileName)) == read_file(dir2.str(kWeightsFileName)));
  CHECK(read_file(dir.str(kSchemaFileName)) == read_file(dir2.str(kSchemaFileName)));
}

TEST_CASE("bundle loader names missing and mismatched tensors") {
  TempDir dir("bundle_bad");
  Model m = make_model();
  save_model(dir.str(), m, {});

  // drop one tensor
  auto tensors = load_weights(dir.str(kWeightsFileName));
  std::vector<std::pair<std::string, const Tensor*>> kept;
  for (const auto& [name, t] : tensors)
    if (name != "decoder.out.W") kept.emplace_back(name, &t);
  save_weights(dir.str(kWeightsFileName), kept);
  CHECK_THROWS_WITH_AS(load_model(dir.str()), doctest::Contains("decoder.out.W"),
                       std::runtime_error);

  // wrong shape
  save_model(dir.str(), m, {});
  tensors = load_weights(dir.str(kWeightsFileName));
  for (auto& [name, t] : tensors)
    if (name == "head.pos.b") t = Tensor({7});
  std::vector<std::pair<std::string, const Tensor*>> reshaped;
  for (const auto& [name, t] : tensors) reshaped.emplace_back(name, &t);
  save_weights(dir.str(kWeightsFileName), reshaped);
  CHECK_THROWS_WITH_AS(load_model(dir.str()), doctest::Contains("head.pos.b"), std::runtime_error);
}

TEST_CASE("config text parses keys, comments and precedence") {
  auto kv = parse_config_text(
      "# comment\n"
      "extractor_dim = 8\n"
      "lambda_pos=0.3   # trailing comment\n"
      "lambda_feat.Number = 0.5\n"
      "\n"
      "seed = 9\n");
  ModelConfig mc;
  TrainConfig tc;
  apply_config(kv, &mc, &tc);
  CHECK(mc.extractor_dim == 8);
  CHECK(tc.lambda_pos == 0.3);
  CHECK(tc.lambda_feat.at("Number") == 0.5);
  CHECK(tc.seed == 9);

  CHECK_THROWS_WITH_AS(apply_config({{"no_such_key", "1"}}, &mc, &tc),
                       doctest::Contains("no_such_key"), std::runtime_error);
  CHECK_THROWS_AS(parse_config_text("just stuff\n"), std::runtime_error);
  CHECK_THROWS_AS(apply_config({{"patience", "soon"}}, &mc, &tc), std::runtime_error);
}

TEST_CASE("embeddings loader accepts an optional header") {
  std::ostringstream warn;
  EmbeddingTable with_header = parse_embeddings_text(
      "2 3\n"
      "dog 1 2 3\n"
      "cat 0.5 -1 2.25\n",
      &warn);
  CHECK(with_header.dim() == 3);
  CHECK(with_header.count() == 2);
  CHECK(with_header.vector_for("cat")[2] == Real(2.25));

  EmbeddingTable without_header = parse_embeddings_text(
      "dog 1 2 3\n"
      "cat 4 5 6\n");
  CHECK(without_header.dim() == 3);
  CHECK(without_header.count() == 2);
}

TEST_CASE("embeddings loader skips malformed lines with warnings") {
  std::ostringstream warn;
  EmbeddingTable t = parse_embeddings_text(
      "dog 1 2 3\n"
      "broken 1 2\n"
      "alsobroken 1 two 3\n"
      "dog 9 9 9\n"
      "cat 4 5 6\n",
      &warn);
  CHECK(t.count() == 2);
  CHECK(t.vector_for("dog")[0] == Real(1));  // first wins, duplicate skipped
  std::string w = warn.str();
  CHECK(w.find("line 2") != std::string::npos);
  CHECK(w.find("line 3") != std::string::npos);
  CHECK(w.find("duplicate") != std::string::npos);
}
