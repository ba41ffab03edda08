#include "cluesynth/service.hpp"

#include <cmath>

#include <json.hpp>

#include "cluesynth/errors.hpp"
#include "cluesynth/interpreter.hpp"
#include "cluesynth/search.hpp"

namespace cluesynth {

using nlohmann::ordered_json;

namespace {

ServiceResponse error_response(int status, std::string_view kind, const std::string& message) {
  ordered_json j;
  j["error"] = {{"kind", kind}, {"message", message}};
  return {status, j.dump()};
}

ServiceResponse ok(const ordered_json& j) { return {200, j.dump()}; }

class Slot {
 public:
  Slot(std::atomic<int>& n, int cap) : n_(n) { held_ = n_.fetch_add(1) < cap; }
  ~Slot() { n_.fetch_sub(1); }
  Slot(const Slot&) = delete;
  Slot& operator=(const Slot&) = delete;
  bool held() const { return held_; }

 private:
  std::atomic<int>& n_;
  bool held_ = false;
};

}  // namespace

std::string_view line_prefix(std::string_view text, std::size_t n) {
  std::size_t pos = 0;
  for (std::size_t i = 0; i < n; ++i) {
    pos = text.find('\n', pos);
    if (pos == std::string_view::npos) return text;
    if (i + 1 == n) return text.substr(0, pos);
    ++pos;
  }
  return text.substr(0, 0);
}

Service::Service(ServiceConfig cfg, WeightVector theta, std::string weights_fingerprint, const ClueCatalog& catalog)
    : cfg_(std::move(cfg)), theta_(std::move(theta)), weights_fingerprint_(std::move(weights_fingerprint)),
      catalog_(catalog) {
  for (const auto& id : catalog_.ids()) {
    if (!theta_.contains(id)) theta_.set(id, 0.0);
  }
}

ServiceResponse Service::infer(std::string_view body) {
  ordered_json req = ordered_json::parse(body, nullptr, false);
  if (req.is_discarded() || !req.is_object()) return error_response(400, "malformed_input", "body is not a JSON object");
  for (const char* key : {"example_input", "example_output"}) {
    if (!req.contains(key) || !req[key].is_string()) {
      return error_response(400, "malformed_input", std::string(key) + " must be a string");
    }
  }
  if (req.contains("data") && !req["data"].is_null() && !req["data"].is_string()) {
    return error_response(400, "malformed_input", "data must be a string");
  }
  int timeout_ms = cfg_.default_timeout_ms;
  if (req.contains("timeout_ms")) {
    if (!req["timeout_ms"].is_number_integer() || req["timeout_ms"].get<long long>() < 0) {
      return error_response(400, "malformed_input", "timeout_ms must be a non-negative integer");
    }
    timeout_ms = static_cast<int>(std::min<long long>(req["timeout_ms"].get<long long>(), cfg_.timeout_cap_ms));
  }
  timeout_ms = std::min(timeout_ms, cfg_.timeout_cap_ms);
  std::size_t max_candidates = 5;
  if (req.contains("max_candidates")) {
    if (!req["max_candidates"].is_number_integer() || req["max_candidates"].get<long long>() < 1) {
      return error_response(400, "malformed_input", "max_candidates must be a positive integer");
    }
    max_candidates = static_cast<std::size_t>(
        std::min<long long>(req["max_candidates"].get<long long>(), static_cast<long long>(cfg_.max_candidates_cap)));
  }

  SystemInput z;
  z.example_input = req["example_input"].get<std::string>();
  z.example_output = req["example_output"].get<std::string>();
  z.data_input = req.contains("data") && req["data"].is_string() ? req["data"].get<std::string>() : z.example_input;
  if (z.example_input.empty() || z.example_output.empty()) {
    return error_response(422, "empty_example", "example_input and example_output must be non-empty");
  }

  Slot slot(active_, cfg_.max_concurrent);
  if (!slot.held()) return error_response(503, "at_capacity", "too many searches in progress");

  SearchConfig sc;
  sc.timeout_seconds = timeout_ms / 1000.0;
  sc.budget = cfg_.budget;
  sc.max_candidates_per_band = max_candidates;
  SearchOutcome out;
  try {
    out = search(z, theta_, sc, catalog_);
  } catch (const Error& e) {
    return error_response(500, error_code_name(e.code()), e.what());
  }

  std::string_view preview_data = line_prefix(z.data_input, cfg_.preview_lines);
  ordered_json cands = ordered_json::array();
  for (std::size_t i = 0; i < out.candidates.size() && i < max_candidates; ++i) {
    const Candidate& c = out.candidates[i];
    ordered_json j;
    j["program"] = c.program.text();
    j["log_probability"] = c.logprob;
    j["probability"] = std::exp(c.logprob);
    j["size"] = c.program.size();
    EvalResult r = evaluate(c.program, preview_data, cfg_.budget);
    if (r && r.value().is_text()) {
      j["preview"] = r.value().text();
    } else {
      j["preview"] = nullptr;
      j["preview_error"] = r ? std::string("SortError") : std::string(eval_error_name(r.error().kind));
    }
    cands.push_back(std::move(j));
  }
  ordered_json resp;
  resp["status"] = status_name(out.status);
  resp["candidates"] = std::move(cands);
  resp["stats"] = {{"elapsed_ms", out.stats.elapsed_seconds * 1000.0},
                   {"programs_executed", out.stats.programs_executed},
                   {"programs_generated", out.stats.programs_generated},
                   {"bands", out.stats.bands}};
  resp["timeout_ms"] = timeout_ms;
  return ok(resp);
}

ServiceResponse Service::apply(std::string_view body) const {
  ordered_json req = ordered_json::parse(body, nullptr, false);
  if (req.is_discarded() || !req.is_object()) return error_response(400, "malformed_input", "body is not a JSON object");
  if (!req.contains("program_text") || !req["program_text"].is_string()) {
    return error_response(400, "malformed_input", "program_text must be a string");
  }
  if (!req.contains("data") || !req["data"].is_string()) {
    return error_response(400, "malformed_input", "data must be a string");
  }
  std::optional<Program> program;
  try {
    program = parse_program(req["program_text"].get<std::string>(), catalog_.registry());
  } catch (const Error& e) {
    return error_response(400, error_code_name(e.code()), e.what());
  }
  EvalResult r = evaluate(*program, req["data"].get<std::string>(), cfg_.budget);
  if (!r) return error_response(422, eval_error_name(r.error().kind), r.error().message);
  if (!r.value().is_text()) return error_response(400, "SortError", "program does not produce text");
  ordered_json resp;
  resp["output"] = r.value().text();
  return ok(resp);
}

ServiceResponse Service::meta() const {
  ordered_json fns = ordered_json::array();
  for (const auto* e : catalog_.registry().entries()) {
    ordered_json params = ordered_json::array();
    for (Sort s : e->desc.param_sorts) params.push_back(sort_name(s));
    fns.push_back({{"name", e->desc.name}, {"params", params}, {"returns", sort_name(e->desc.return_sort)},
                   {"doc", e->desc.doc}});
  }
  ordered_json clues = ordered_json::array();
  for (const auto& c : catalog_.clues()) clues.push_back({{"id", c.id}, {"name", c.name}});
  ordered_json resp;
  resp["functions"] = std::move(fns);
  resp["clues"] = std::move(clues);
  resp["catalog_fingerprint"] = catalog_.fingerprint();
  resp["weights_fingerprint"] = weights_fingerprint_.empty() ? ordered_json(nullptr) : ordered_json(weights_fingerprint_);
  resp["caps"] = {{"max_concurrent", cfg_.max_concurrent},
                  {"timeout_cap_ms", cfg_.timeout_cap_ms},
                  {"preview_lines", cfg_.preview_lines},
                  {"max_candidates", cfg_.max_candidates_cap},
                  {"budget_steps", cfg_.budget.max_steps}};
  return ok(resp);
}

}  // namespace cluesynth
