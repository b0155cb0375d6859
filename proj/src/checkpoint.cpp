// SPDX-License-Identifier: Apache-2.0
#include "framing/checkpoint.hpp"

#include <fstream>

#include <json.hpp>

#include "framing/error.hpp"

namespace framing {

using nlohmann::json;

namespace {
constexpr const char* kFormat = "framing-checkpoint";
constexpr int kVersion = 1;
}  // namespace

void write_checkpoint(std::ostream& out, const Model& model, const KeyValues& config) {
  json doc;
  doc["format"] = kFormat;
  doc["version"] = kVersion;
  doc["config"] = config.entries();
  const ModelShape& shape = model.shape();
  doc["shape"] = {{"hidden", shape.hidden},
                  {"layers", shape.layers},
                  {"init_range", shape.init_range},
                  {"forget_bias", shape.forget_bias}};
  doc["vocabulary"] = model.embeddings().words();
  json heads = json::array();
  for (const auto& h : model.heads()) {
    json labels = json::array();
    for (std::size_t i = 0; i < h.labels.size(); ++i) {
      labels.push_back({{"code", h.labels.codes()[i]}, {"name", h.labels.names()[i]}});
    }
    heads.push_back({{"name", h.name},
                     {"label_set", h.labels.name()},
                     {"labels", labels},
                     {"adversarial", h.adversarial},
                     {"reversal_strength", h.reversal_strength}});
  }
  doc["heads"] = heads;
  json params = json::array();
  for (const auto& p : model.parameters().all()) {
    params.push_back({{"name", p.name},
                      {"rows", p.value.rows()},
                      {"cols", p.value.cols()},
                      {"trainable", p.trainable},
                      {"values", std::vector<double>(p.value.values().begin(),
                                                     p.value.values().end())}});
  }
  doc["parameters"] = params;
  out << doc.dump() << '\n';
}

void save_checkpoint(const std::filesystem::path& path, const Model& model,
                     const KeyValues& config) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint " + path.string());
  write_checkpoint(out, model, config);
}

Checkpoint read_checkpoint(std::istream& in, const std::string& source) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError("checkpoint " + source + ": " + e.what());
  }
  try {
    if (doc.at("format") != kFormat || doc.at("version") != kVersion) {
      throw DataError("checkpoint " + source + ": unsupported format");
    }
    KeyValues config;
    for (const auto& [k, v] : doc.at("config").items()) config.set(k, v.get<std::string>());

    ModelShape shape;
    const json& s = doc.at("shape");
    shape.hidden = s.at("hidden").get<std::size_t>();
    shape.layers = s.at("layers").get<std::size_t>();
    shape.init_range = s.at("init_range").get<double>();
    shape.forget_bias = s.at("forget_bias").get<double>();

    std::vector<HeadSpec> heads;
    for (const json& h : doc.at("heads")) {
      std::vector<std::pair<int, std::string>> entries;
      for (const json& l : h.at("labels")) {
        entries.emplace_back(l.at("code").get<int>(), l.at("name").get<std::string>());
      }
      heads.push_back(HeadSpec{h.at("name").get<std::string>(),
                               LabelSet(h.at("label_set").get<std::string>(), std::move(entries)),
                               h.at("adversarial").get<bool>(),
                               h.at("reversal_strength").get<double>()});
    }

    std::vector<Tensor2> values;
    std::vector<std::string> names;
    for (const json& p : doc.at("parameters")) {
      names.push_back(p.at("name").get<std::string>());
      values.emplace_back(p.at("rows").get<std::size_t>(), p.at("cols").get<std::size_t>(),
                          p.at("values").get<std::vector<double>>());
    }
    const Tensor2* embedding = nullptr;
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] == "embedding") embedding = &values[i];
    }
    if (embedding == nullptr) throw DataError("checkpoint " + source + ": no embedding table");

    EmbeddingTable table(doc.at("vocabulary").get<std::vector<std::string>>(), *embedding);
    Model model(std::move(table), shape, std::move(heads), Rng(0));
    ParameterSet& params = model.parameters();
    if (params.size() != names.size()) {
      throw DataError("checkpoint " + source + ": parameter count does not match the model");
    }
    for (std::size_t i = 0; i < names.size(); ++i) {
      Parameter& p = params.at(names[i]);
      if (!p.value.same_shape(values[i])) {
        throw DataError("checkpoint " + source + ": parameter '" + names[i] + "' has shape " +
                        values[i].shape_string() + ", model expects " + p.value.shape_string());
      }
      p.value = std::move(values[i]);
    }
    return Checkpoint{std::move(model), std::move(config)};
  } catch (const json::exception& e) {
    throw DataError("checkpoint " + source + ": " + e.what());
  }
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  return read_checkpoint(in, path.string());
}

}  // namespace framing
