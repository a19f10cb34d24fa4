#include "morphtag/bundle.hpp"

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "morphtag/utf8.hpp"

namespace morphtag {

namespace {

void put_u32(std::string& out, uint32_t v) {
  out += static_cast<char>(v & 0xFF);
  out += static_cast<char>((v >> 8) & 0xFF);
  out += static_cast<char>((v >> 16) & 0xFF);
  out += static_cast<char>((v >> 24) & 0xFF);
}

void put_f32(std::string& out, float v) {
  uint32_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  put_u32(out, bits);
}

class Reader {
 public:
  Reader(std::string data, std::string path) : data_(std::move(data)), path_(std::move(path)) {}

  uint32_t u32() {
    need(4);
    uint32_t v = static_cast<uint8_t>(data_[pos_]) |
                 (static_cast<uint32_t>(static_cast<uint8_t>(data_[pos_ + 1])) << 8) |
                 (static_cast<uint32_t>(static_cast<uint8_t>(data_[pos_ + 2])) << 16) |
                 (static_cast<uint32_t>(static_cast<uint8_t>(data_[pos_ + 3])) << 24);
    pos_ += 4;
    return v;
  }

  float f32() {
    uint32_t bits = u32();
    float v;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
  }

  std::string bytes(size_t n) {
    need(n);
    std::string s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  bool at_end() const { return pos_ == data_.size(); }

 private:
  void need(size_t n) {
    if (pos_ + n > data_.size())
      throw std::runtime_error("truncated weights file " + path_);
  }
  std::string data_;
  std::string path_;
  size_t pos_ = 0;
};

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out) throw std::runtime_error("failed writing " + path);
}

void save_weights(const std::string& path,
                  const std::vector<std::pair<std::string, const Tensor*>>& tensors) {
  std::string out;
  out.append(kWeightsMagic, 4);
  put_u32(out, static_cast<uint32_t>(tensors.size()));
  for (const auto& [name, tensor] : tensors) {
    put_u32(out, static_cast<uint32_t>(name.size()));
    out += name;
    put_u32(out, static_cast<uint32_t>(tensor->shape.size()));
    for (int d : tensor->shape) put_u32(out, static_cast<uint32_t>(d));
    for (Real v : tensor->data) put_f32(out, static_cast<float>(v));
  }
  write_file(path, out);
}

std::vector<std::pair<std::string, Tensor>> load_weights(const std::string& path) {
  Reader r(read_file(path), path);
  if (r.bytes(4) != std::string(kWeightsMagic, 4))
    throw std::runtime_error("bad magic in weights file " + path);
  uint32_t count = r.u32();
  std::vector<std::pair<std::string, Tensor>> out;
  out.reserve(count);
  for (uint32_t t = 0; t < count; ++t) {
    std::string name = r.bytes(r.u32());
    uint32_t rank = r.u32();
    std::vector<int> shape(rank);
    size_t total = 1;
    for (uint32_t i = 0; i < rank; ++i) {
      shape[i] = static_cast<int>(r.u32());
      if (shape[i] < 0) throw std::runtime_error("negative dimension in tensor " + name);
      total *= static_cast<size_t>(shape[i]);
    }
    Tensor tensor(shape);
    for (size_t i = 0; i < total; ++i) tensor[static_cast<int>(i)] = static_cast<Real>(r.f32());
    out.emplace_back(std::move(name), std::move(tensor));
  }
  if (!r.at_end()) throw std::runtime_error("trailing bytes in weights file " + path);
  return out;
}

namespace {

constexpr const char* kSchemaHeader = "morphtag-schema v1";
constexpr const char* kPretrainedTensorName = "pretrained.table";

std::string real_str(double v) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return os.str();
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && line[i] == ' ') ++i;
    size_t start = i;
    while (i < line.size() && line[i] != ' ') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

}  // namespace

void save_model(const std::string& dir, const Model& model, const TrainResult& history) {
  std::filesystem::create_directories(dir);

  std::ostringstream schema;
  schema << kSchemaHeader << "\n";
  const ModelConfig& c = model.config;
  schema << "config word_dim " << c.word_dim << "\n"
         << "config casing_dim " << c.casing_dim << "\n"
         << "config char_emb_dim " << c.char_emb_dim << "\n"
         << "config char_lstm_dim " << c.char_lstm_dim << "\n"
         << "config extractor_dim " << c.extractor_dim << "\n"
         << "config extractor_layers " << c.extractor_layers << "\n"
         << "config decoder_dim " << c.decoder_dim << "\n"
         << "config pos_emb_dim " << c.pos_emb_dim << "\n"
         << "config max_word_len " << c.max_word_len << "\n"
         << "config max_decode_overrun " << c.max_decode_overrun << "\n"
         << "config dropout_rate " << real_str(static_cast<double>(c.dropout_rate)) << "\n";
  for (int i = 0; i < kCasingCount; ++i)
    schema << "casing " << casing_name(static_cast<CasingCategory>(i)) << "\n";
  for (const std::string& p : model.schema.pos_values) schema << "pos " << p << "\n";
  for (const std::string& key : model.schema.feature_keys)
    for (const std::string& value : model.schema.feature_values.at(key))
      schema << "feature " << key << " " << value << "\n";
  for (char32_t ch : model.chars.chars())
    schema << "char " << std::hex << static_cast<uint32_t>(ch) << std::dec << "\n";
  schema << "embedding_dim " << model.embeddings.dim() << "\n";
  for (const std::string& token : model.embeddings.tokens()) schema << "word " << token << "\n";
  schema << "end\n";
  write_file((std::filesystem::path(dir) / kSchemaFileName).string(), schema.str());

  std::vector<std::pair<std::string, const Tensor*>> tensors;
  for (const Parameter* p : model.params->all()) tensors.emplace_back(p->name, &p->value);
  Tensor pretrained({static_cast<int>(model.embeddings.count()), model.embeddings.dim()});
  int row = 0;
  for (const std::string& token : model.embeddings.tokens()) {
    const std::vector<Real>& v = model.embeddings.vector_for(token);
    std::copy(v.begin(), v.end(),
              pretrained.data.begin() + static_cast<size_t>(row) * model.embeddings.dim());
    ++row;
  }
  if (model.embeddings.count() > 0) tensors.emplace_back(kPretrainedTensorName, &pretrained);
  save_weights((std::filesystem::path(dir) / kWeightsFileName).string(), tensors);

  std::ostringstream hist;
  for (const EpochRecord& rec : history.history) hist << format_epoch_record(rec) << "\n";
  write_file((std::filesystem::path(dir) / kHistoryFileName).string(), hist.str());
}

Model load_model(const std::string& dir) {
  const std::string schema_path = (std::filesystem::path(dir) / kSchemaFileName).string();
  std::istringstream in(read_file(schema_path));

  Model model;
  std::string line;
  if (!std::getline(in, line) || line != kSchemaHeader)
    throw std::runtime_error(schema_path + ": not a morphtag schema file");

  std::vector<char32_t> chars;
  std::vector<std::string> words;
  std::map<std::string, std::string> config_kv;
  int casing_seen = 0;
  int embedding_dim = 0;
  bool ended = false;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_fields(line);
    const std::string& kind = fields[0];
    auto expect = [&](size_t n) {
      if (fields.size() != n)
        throw std::runtime_error(schema_path + ":" + std::to_string(line_no) +
                                 ": malformed " + kind + " line");
    };
    if (kind == "config") {
      expect(3);
      config_kv[fields[1]] = fields[2];
    } else if (kind == "casing") {
      expect(2);
      if (casing_seen >= kCasingCount ||
          fields[1] != casing_name(static_cast<CasingCategory>(casing_seen)))
        throw std::runtime_error(schema_path + ": unexpected casing order at line " +
                                 std::to_string(line_no));
      ++casing_seen;
    } else if (kind == "pos") {
      expect(2);
      model.schema.pos_values.push_back(fields[1]);
    } else if (kind == "feature") {
      expect(3);
      if (model.schema.feature_values.find(fields[1]) == model.schema.feature_values.end())
        model.schema.feature_keys.push_back(fields[1]);
      model.schema.feature_values[fields[1]].push_back(fields[2]);
    } else if (kind == "char") {
      expect(2);
      chars.push_back(static_cast<char32_t>(std::stoul(fields[1], nullptr, 16)));
    } else if (kind == "embedding_dim") {
      expect(2);
      embedding_dim = std::stoi(fields[1]);
    } else if (kind == "word") {
      expect(2);
      words.push_back(fields[1]);
    } else if (kind == "end") {
      ended = true;
      break;
    } else {
      throw std::runtime_error(schema_path + ":" + std::to_string(line_no) +
                               ": unknown record \"" + kind + "\"");
    }
  }
  if (!ended) throw std::runtime_error(schema_path + ": truncated (missing end record)");
  if (casing_seen != kCasingCount)
    throw std::runtime_error(schema_path + ": incomplete casing section");

  TrainConfig ignored;
  apply_config(config_kv, &model.config, &ignored);
  model.chars = CharVocab(std::move(chars));

  auto weights =
      load_weights((std::filesystem::path(dir) / kWeightsFileName).string());
  model.params = std::make_unique<ModelParams>(model.config, model.schema, model.chars, nullptr);

  const Tensor* pretrained = nullptr;
  std::set<std::string> loaded;
  for (auto& [name, tensor] : weights) {
    if (name == kPretrainedTensorName) {
      pretrained = &tensor;
      continue;
    }
    Parameter* p = model.params->find(name);
    if (!p) throw std::runtime_error("weights file has unknown tensor \"" + name + "\"");
    if (p->value.shape != tensor.shape)
      throw std::runtime_error("tensor \"" + name + "\" has shape " + shape_str(tensor.shape) +
                               ", expected " + shape_str(p->value.shape));
    p->value = tensor;
    loaded.insert(name);
  }
  for (const Parameter* p : model.params->all())
    if (loaded.find(p->name) == loaded.end())
      throw std::runtime_error("weights file is missing tensor \"" + p->name + "\"");

  model.embeddings = EmbeddingTable(embedding_dim);
  if (!words.empty()) {
    if (!pretrained)
      throw std::runtime_error("weights file is missing tensor \"" +
                               std::string(kPretrainedTensorName) + "\"");
    if (pretrained->dim(0) != static_cast<int>(words.size()) ||
        pretrained->dim(1) != embedding_dim)
      throw std::runtime_error("pretrained table shape " + shape_str(pretrained->shape) +
                               " does not match schema word list");
    for (size_t i = 0; i < words.size(); ++i) {
      std::vector<Real> v(pretrained->data.begin() + static_cast<long>(i) * embedding_dim,
                          pretrained->data.begin() + static_cast<long>(i + 1) * embedding_dim);
      model.embeddings.insert(words[i], std::move(v));
    }
  }
  return model;
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    size_t eq = line.find('=');
    auto trim = [](std::string s) {
      size_t a = s.find_first_not_of(" \t\r");
      size_t b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    std::string rest = trim(line);
    if (rest.empty()) continue;
    if (eq == std::string::npos)
      throw std::runtime_error("config line " + std::to_string(line_no) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw std::runtime_error("config line " + std::to_string(line_no) + ": expected key = value");
    out[key] = value;
  }
  return out;
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
  return parse_config_text(read_file(path));
}

void apply_config(const std::map<std::string, std::string>& kv, ModelConfig* model_config,
                  TrainConfig* train_config) {
  auto as_int = [](const std::string& key, const std::string& v) {
    try {
      size_t used = 0;
      int x = std::stoi(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
      return x;
    } catch (const std::exception&) {
      throw std::runtime_error("config key " + key + ": \"" + v + "\" is not an integer");
    }
  };
  auto as_real = [](const std::string& key, const std::string& v) {
    try {
      size_t used = 0;
      double x = std::stod(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
      return x;
    } catch (const std::exception&) {
      throw std::runtime_error("config key " + key + ": \"" + v + "\" is not a number");
    }
  };

  for (const auto& [key, value] : kv) {
    if (key == "word_dim") model_config->word_dim = as_int(key, value);
    else if (key == "casing_dim") model_config->casing_dim = as_int(key, value);
    else if (key == "char_emb_dim") model_config->char_emb_dim = as_int(key, value);
    else if (key == "char_lstm_dim") model_config->char_lstm_dim = as_int(key, value);
    else if (key == "extractor_dim") model_config->extractor_dim = as_int(key, value);
    else if (key == "extractor_layers") model_config->extractor_layers = as_int(key, value);
    else if (key == "decoder_dim") model_config->decoder_dim = as_int(key, value);
    else if (key == "pos_emb_dim") model_config->pos_emb_dim = as_int(key, value);
    else if (key == "max_word_len") model_config->max_word_len = as_int(key, value);
    else if (key == "max_decode_overrun") model_config->max_decode_overrun = as_int(key, value);
    else if (key == "dropout_rate") model_config->dropout_rate = static_cast<Real>(as_real(key, value));
    else if (key == "lambda_lemma") train_config->lambda_lemma = as_real(key, value);
    else if (key == "lambda_pos") train_config->lambda_pos = as_real(key, value);
    else if (key == "lambda_feat") train_config->lambda_feat_default = as_real(key, value);
    else if (key.rfind("lambda_feat.", 0) == 0)
      train_config->lambda_feat[key.substr(12)] = as_real(key, value);
    else if (key == "lr_initial") train_config->lr_initial = as_real(key, value);
    else if (key == "lr_after_epoch7") train_config->lr_after_epoch7 = as_real(key, value);
    else if (key == "patience") train_config->patience = as_int(key, value);
    else if (key == "batch_size") train_config->batch_size = as_int(key, value);
    else if (key == "max_epochs") train_config->max_epochs = as_int(key, value);
    else if (key == "seed") train_config->seed = static_cast<uint64_t>(as_int(key, value));
    else if (key == "rmsprop_rho") train_config->rmsprop_rho = as_real(key, value);
    else if (key == "rmsprop_eps") train_config->rmsprop_eps = as_real(key, value);
    else if (key == "grad_clip") train_config->grad_clip = as_real(key, value);
    else throw std::runtime_error("unknown config key \"" + key + "\"");
  }
}

}  // namespace morphtag
