#include "hero/checkpoint.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace hero {

using nlohmann::json;

namespace {

json matrix_to_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

[[noreturn]] void corrupt(const std::string& what) {
  throw CheckpointError(CheckpointError::Kind::CorruptCheckpoint, "corrupt checkpoint: " + what);
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) corrupt(where + ": expected a number");
  double x = v.get<double>();
  if (!std::isfinite(x)) corrupt(where + ": non-finite value");
  return x;
}

Mat matrix_from_json(const json& j, Eigen::Index rows, Eigen::Index cols, const std::string& where) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows)
    corrupt(where + ": expected " + std::to_string(rows) + " rows");
  Mat m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      corrupt(where + ": row " + std::to_string(i) + " should have " + std::to_string(cols) + " columns");
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = number(row[static_cast<std::size_t>(c)], where);
  }
  return m;
}

json gru_to_json(const GruParams& p) {
  json j = json::object();
  p.for_each([&](const char* name, const Mat& m) { j[name] = matrix_to_json(m); });
  return j;
}

GruParams gru_from_json(const json& j, int d, const std::string& where) {
  if (!j.is_object()) corrupt(where + ": expected an object");
  GruParams p = GruParams::zeros(d);
  p.for_each([&](const char* name, Mat& m) {
    auto it = j.find(name);
    if (it == j.end()) corrupt(where + ": missing " + name);
    m = matrix_from_json(*it, m.rows(), m.cols(), where + "." + name);
  });
  return p;
}

const json& require(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) corrupt(std::string("missing field \"") + key + "\"");
  return *it;
}

std::vector<std::string> string_list(const json& j, const std::string& where) {
  if (!j.is_array()) corrupt(where + ": expected an array");
  std::vector<std::string> out;
  for (const auto& v : j) {
    if (!v.is_string()) corrupt(where + ": expected strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

}  // namespace

std::string checkpoint_to_string(const ModelParams& model) {
  json j = json::object();
  j["version"] = kCheckpointVersion;
  j["mode"] = to_string(model.config.mode);
  j["ablation"] = to_string(model.config.ablation);
  j["d"] = model.config.d;
  j["attribute_vocab"] = {{"syntax", model.vocab.syntax}, {"rr", model.vocab.rr}};
  json reg = json::object();
  for (const auto& [key, bi] : model.params.registry)
    reg[key] = {{"fwd", gru_to_json(bi.fwd)}, {"bwd", gru_to_json(bi.bwd)}};
  j["registry"] = std::move(reg);
  json b = json::array();
  for (Eigen::Index i = 0; i < model.params.classifier.b.size(); ++i) b.push_back(model.params.classifier.b[i]);
  j["classifier"] = {{"W", matrix_to_json(model.params.classifier.W)}, {"b", std::move(b)}};
  return j.dump() + "\n";
}

ModelParams checkpoint_from_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    corrupt(e.what());
  }
  if (!j.is_object()) corrupt("top level is not an object");

  const json& version = require(j, "version");
  if (!version.is_number_integer()) corrupt("version is not an integer");
  if (version.get<long long>() != kCheckpointVersion)
    throw CheckpointError(CheckpointError::Kind::VersionMismatch,
                          "checkpoint version " + version.dump() + ", this build reads version " +
                              std::to_string(kCheckpointVersion));

  ModelConfig config;
  try {
    config.mode = parse_sharing_mode(require(j, "mode").get<std::string>());
    config.ablation = parse_ablation_mode(require(j, "ablation").get<std::string>());
  } catch (const json::exception& e) {
    corrupt(e.what());
  } catch (const std::invalid_argument& e) {
    corrupt(e.what());
  }
  const json& d = require(j, "d");
  if (!d.is_number_integer() || d.get<long long>() <= 0 || d.get<long long>() % 2 != 0)
    corrupt("d must be a positive even integer");
  config.d = static_cast<int>(d.get<long long>());

  const json& vocab_j = require(j, "attribute_vocab");
  AttributeVocab vocab;
  vocab.syntax = string_list(require(vocab_j, "syntax"), "attribute_vocab.syntax");
  vocab.rr = string_list(require(vocab_j, "rr"), "attribute_vocab.rr");

  for (const auto* list : {&vocab.syntax, &vocab.rr})
    if (!std::is_sorted(list->begin(), list->end()) ||
        std::adjacent_find(list->begin(), list->end()) != list->end())
      corrupt("attribute_vocab lists must be sorted and unique");
  ModelParams model = ModelParams::zeros(config, vocab);

  const json& reg = require(j, "registry");
  if (!reg.is_object() || reg.size() != model.params.registry.size())
    corrupt("registry does not match the " + std::string(to_string(config.mode)) + " key set");
  for (auto& [key, bi] : model.params.registry) {
    auto it = reg.find(key);
    if (it == reg.end()) corrupt("registry is missing aggregator '" + key + "'");
    bi.fwd = gru_from_json(require(*it, "fwd"), config.d, key + ".fwd");
    bi.bwd = gru_from_json(require(*it, "bwd"), config.d, key + ".bwd");
  }

  const json& cls = require(j, "classifier");
  model.params.classifier.W = matrix_from_json(require(cls, "W"), 2, config.d, "classifier.W");
  const json& b = require(cls, "b");
  if (!b.is_array() || b.size() != 2) corrupt("classifier.b must have 2 entries");
  model.params.classifier.b = Vec(2);
  model.params.classifier.b << number(b[0], "classifier.b"), number(b[1], "classifier.b");
  return model;
}

void save_model(const ModelParams& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError(CheckpointError::Kind::Io, "cannot write checkpoint " + path.string());
  out << checkpoint_to_string(model);
  if (!out) throw CheckpointError(CheckpointError::Kind::Io, "write failed for " + path.string());
}

ModelParams load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError(CheckpointError::Kind::Io, "cannot read checkpoint " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return checkpoint_from_string(buf.str());
}

}  // namespace hero
