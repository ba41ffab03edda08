#pragma once

#include <string>
#include <string_view>

#include "cluesynth/clues.hpp"
#include "cluesynth/grammar.hpp"

namespace cluesynth {

inline constexpr std::string_view kWeightsFormat = "cluesynth-weights/1";

/// JSON document holding theta, tagged with the catalog fingerprint and the
/// clue ids in catalog order.
std::string weights_to_json(const WeightVector& theta, const ClueCatalog& catalog);

/// Throws Error(malformed_input) on bad JSON, Error(fingerprint_mismatch) when
/// the file was written for a different catalog, and Error(missing_weight)
/// when a catalog clue has no weight.
WeightVector weights_from_json(std::string_view text, const ClueCatalog& catalog);

void save_weights(const std::string& path, const WeightVector& theta, const ClueCatalog& catalog);
WeightVector load_weights(const std::string& path, const ClueCatalog& catalog);

}  // namespace cluesynth
