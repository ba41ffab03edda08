#pragma once

#include <atomic>
#include <cstddef>
#include <string>
#include <string_view>

#include "cluesynth/clues.hpp"
#include "cluesynth/dsl.hpp"
#include "cluesynth/grammar.hpp"

namespace cluesynth {

struct ServiceConfig {
  int max_concurrent = 4;
  int timeout_cap_ms = 10'000;
  int default_timeout_ms = 10'000;
  std::size_t preview_lines = 50;
  std::size_t max_candidates_cap = 50;
  ExecutionBudget budget;
};

struct ServiceResponse {
  int status = 200;
  std::string body;  // JSON
};

/// Request handlers of the HTTP API, independent of any transport. Shared
/// state is read-only apart from the in-flight search counter.
class Service {
 public:
  /// `weights_fingerprint` is empty when serving uniform weights.
  Service(ServiceConfig cfg, WeightVector theta, std::string weights_fingerprint,
          const ClueCatalog& catalog = standard_catalog());

  /// POST /api/infer
  ServiceResponse infer(std::string_view body);
  /// POST /api/apply
  ServiceResponse apply(std::string_view body) const;
  /// GET /api/meta
  ServiceResponse meta() const;

  const ServiceConfig& config() const { return cfg_; }
  int active_searches() const { return active_.load(); }

 private:
  ServiceConfig cfg_;
  WeightVector theta_;
  std::string weights_fingerprint_;
  const ClueCatalog& catalog_;
  std::atomic<int> active_{0};
};

/// First `n` lines of `text`.
std::string_view line_prefix(std::string_view text, std::size_t n);

}  // namespace cluesynth
