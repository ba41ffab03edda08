#include "cluesynth/weights_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cluesynth/errors.hpp"

namespace cluesynth {

using nlohmann::json;

std::string weights_to_json(const WeightVector& theta, const ClueCatalog& catalog) {
  json doc;
  doc["format"] = kWeightsFormat;
  doc["catalog_fingerprint"] = catalog.fingerprint();
  doc["clue_ids"] = catalog.ids();
  json w = json::object();
  for (const auto& id : catalog.ids()) {
    auto v = theta.get(id);
    if (!v) throw Error(ErrorCode::missing_weight, "no weight for clue " + id);
    w[id] = *v;
  }
  doc["weights"] = std::move(w);
  return doc.dump(2) + "\n";
}

WeightVector weights_from_json(std::string_view text, const ClueCatalog& catalog) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw Error(ErrorCode::malformed_input, "weights file is not a JSON object");
  if (doc.value("format", std::string()) != kWeightsFormat) {
    throw Error(ErrorCode::malformed_input, "weights file format is not " + std::string(kWeightsFormat));
  }
  if (!doc.contains("catalog_fingerprint") || !doc["catalog_fingerprint"].is_string() ||
      !doc.contains("weights") || !doc["weights"].is_object()) {
    throw Error(ErrorCode::malformed_input, "weights file lacks catalog_fingerprint or weights");
  }
  const std::string fp = doc["catalog_fingerprint"].get<std::string>();
  if (fp != catalog.fingerprint()) {
    throw Error(ErrorCode::fingerprint_mismatch,
                "weights were trained for catalog " + fp + ", current catalog is " + catalog.fingerprint());
  }
  WeightVector theta;
  const json& w = doc["weights"];
  for (const auto& id : catalog.ids()) {
    auto it = w.find(id);
    if (it == w.end()) throw Error(ErrorCode::missing_weight, "no weight for clue " + id);
    if (!it->is_number()) throw Error(ErrorCode::malformed_input, "weight of " + id + " is not a number");
    theta.set(id, it->get<double>());
  }
  return theta;
}

void save_weights(const std::string& path, const WeightVector& theta, const ClueCatalog& catalog) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path);
  out << weights_to_json(theta, catalog);
  if (!out) throw Error(ErrorCode::io_error, "write failed: " + path);
}

WeightVector load_weights(const std::string& path, const ClueCatalog& catalog) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return weights_from_json(ss.str(), catalog);
}

}  // namespace cluesynth
