#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "morphtag/model.hpp"
#include "morphtag/training.hpp"

namespace morphtag {

// Binary weights container: magic "MJW1", little-endian u32 tensor count,
// then per tensor: u32 name length, UTF-8 name, u32 rank, u32 dims...,
// followed by the row-major values as 32-bit little-endian IEEE-754 floats.
inline constexpr char kWeightsMagic[4] = {'M', 'J', 'W', '1'};

void save_weights(const std::string& path,
                  const std::vector<std::pair<std::string, const Tensor*>>& tensors);
std::vector<std::pair<std::string, Tensor>> load_weights(const std::string& path);

// Model directory layout. The schema file is line-oriented structured text
// (config values, casing order, label sets, feature catalog, char vocab and
// the pretrained-vector word list); weights and history sit beside it.
inline constexpr const char* kSchemaFileName = "schema.txt";
inline constexpr const char* kWeightsFileName = "weights.bin";
inline constexpr const char* kHistoryFileName = "history.txt";

void save_model(const std::string& dir, const Model& model, const TrainResult& history);
Model load_model(const std::string& dir);

// Line-oriented "key = value" configuration with '#' comments. Unknown keys
// are an error; CLI flags override file values override defaults.
std::map<std::string, std::string> parse_config_text(const std::string& text);
std::map<std::string, std::string> parse_config_file(const std::string& path);
void apply_config(const std::map<std::string, std::string>& kv, ModelConfig* model_config,
                  TrainConfig* train_config);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace morphtag
