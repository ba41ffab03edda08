#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "cluesynth/corpus.hpp"
#include "cluesynth/learning.hpp"
#include "cluesynth/service.hpp"
#include "fixtures.hpp"
#include "http_server.hpp"

using namespace cluesynth;
using nlohmann::json;

namespace {

const char* kFullList =
    "Anthony Hopkins\nAl Pacino\nTom Hanks\nTom Hanks\nNicolas Cage\nGeoffrey Rush\nJack Nicholson\nHelen Hunt";
const char* kFullListOut =
    "Anthony Hopkins (1)\nAl Pacino (1)\nTom Hanks (2)\nNicolas Cage (1)\nGeoffrey Rush (1)\nJack Nicholson (1)\n"
    "Helen Hunt (1)";

// Fitted on the two counting variants only; the oscar counts task itself is not
// part of the training data.
const WeightVector& counting_weights() {
  static const WeightVector w = [] {
    Corpus c = load_corpus(CLUESYNTH_CORPUS);
    std::vector<Program> ann;
    for (const char* id : {"word-counts", "colon-counts"}) {
      ann.push_back(resolve_annotation(c.find(id)->training_task(), standard_catalog()));
    }
    return fit(ann, standard_catalog().ids(), {}).theta;
  }();
  return w;
}

json infer_body(const std::string& in, const std::string& out) {
  return {{"example_input", in}, {"example_output", out}};
}

json strip_timing(json j) {
  j.erase("stats");
  return j;
}

}  // namespace

TEST_CASE("infer returns the counts program with a preview") {
  Service svc({}, counting_weights(), "abc");
  json req = infer_body(fixtures::kOscars, fixtures::kOscarsOut);
  req["data"] = kFullList;
  auto r = svc.infer(req.dump());
  REQUIRE(r.status == 200);
  json j = json::parse(r.body);
  CHECK(j["status"] == "found");
  REQUIRE_FALSE(j["candidates"].empty());
  bool seen = false;
  for (const auto& c : j["candidates"]) {
    if (c["preview"] == kFullListOut) seen = true;
    CHECK(c["log_probability"].get<double>() <= 0.0);
    CHECK(c["size"].get<int>() > 0);
  }
  CHECK(seen);
  CHECK(j["stats"]["programs_executed"].get<long>() > 0);
}

TEST_CASE("infer validates its input") {
  Service svc({}, WeightVector{}, "");
  CHECK(svc.infer("not json").status == 400);
  CHECK(svc.infer(R"({"example_input": 3, "example_output": "a"})").status == 400);
  CHECK(svc.infer(R"({"example_input": "a", "example_output": "b", "timeout_ms": -1})").status == 400);
  auto r = svc.infer(infer_body("a", "").dump());
  CHECK(r.status == 422);
  CHECK(json::parse(r.body)["error"]["kind"] == "empty_example");
  CHECK(svc.infer(infer_body("", "a").dump()).status == 422);
}

TEST_CASE("infer with a tiny timeout reports a timeout") {
  Service svc({}, WeightVector{}, "");
  json req = infer_body(fixtures::kOscars, fixtures::kOscarsOut);
  req["timeout_ms"] = 1;
  auto r = svc.infer(req.dump());
  REQUIRE(r.status == 200);
  json j = json::parse(r.body);
  CHECK(j["status"] == "timeout");
  CHECK(j["timeout_ms"] == 1);
}

TEST_CASE("timeouts are capped and requests are stateless") {
  ServiceConfig cfg;
  cfg.timeout_cap_ms = 500;
  Service svc(cfg, WeightVector{}, "");
  json req = infer_body("b\na\nb", "a\nb");
  req["timeout_ms"] = 60000;
  req["max_candidates"] = 3;
  auto first = json::parse(svc.infer(req.dump()).body);
  CHECK(first["timeout_ms"] == 500);
  CHECK(first["candidates"].size() <= 3);
  for (int i = 0; i < 2; ++i) CHECK(strip_timing(json::parse(svc.infer(req.dump()).body)) == strip_timing(first));
}

TEST_CASE("previews use only the first lines of the data") {
  ServiceConfig cfg;
  cfg.preview_lines = 50;
  Service svc(cfg, WeightVector{}, "");
  std::string data;
  for (int i = 0; i < 60; ++i) data += (i ? "\n" : "") + std::string("w") + std::to_string(i);
  json req = infer_body("b\na", "B\nA");
  req["data"] = data;
  json j = json::parse(svc.infer(req.dump()).body);
  REQUIRE(j["status"] == "found");
  std::string preview = j["candidates"][0]["preview"];
  CHECK(std::count(preview.begin(), preview.end(), '\n') == 49);
  CHECK(preview.rfind("W49") == preview.size() - 3);
  CHECK(line_prefix("a\nb\nc", 2) == "a\nb");
  CHECK(line_prefix("a\nb", 5) == "a\nb");
  CHECK(line_prefix("a", 0).empty());
}

TEST_CASE("searches beyond the concurrency cap get 503") {
  ServiceConfig cfg;
  cfg.max_concurrent = 1;
  Service svc(cfg, WeightVector{}, "");
  json slow = infer_body(fixtures::kOscars, fixtures::kOscarsOut);
  slow["timeout_ms"] = 1500;
  std::thread t([&] { svc.infer(slow.dump()); });
  while (svc.active_searches() == 0) std::this_thread::sleep_for(std::chrono::milliseconds(1));
  auto r = svc.infer(infer_body("a", "A").dump());
  CHECK(r.status == 503);
  t.join();
  CHECK(svc.active_searches() == 0);
  CHECK(svc.infer(infer_body("a", "A").dump()).status == 200);
}

TEST_CASE("apply runs a program on data") {
  ServiceConfig cfg;
  cfg.budget.max_steps = 10'000;
  Service svc(cfg, WeightVector{}, "");
  json req = {{"program_text", fixtures::kCountsProgram}, {"data", kFullList}};
  auto r = svc.apply(req.dump());
  REQUIRE(r.status == 200);
  CHECK(json::parse(r.body)["output"] == kFullListOut);

  for (const char* bad : {"join(lines(x)", "nosuch(x)", "lines(x)"}) {
    CHECK(svc.apply(json{{"program_text", bad}, {"data", ""}}.dump()).status == 400);
  }
  CHECK(svc.apply(R"({"data": ""})").status == 400);

  std::string huge;
  for (int i = 0; i < 5000; ++i) huge += "line " + std::to_string(i) + "\n";
  auto big = svc.apply(json{{"program_text", fixtures::kCountsProgram}, {"data", huge}}.dump());
  CHECK(big.status == 422);
  CHECK(json::parse(big.body)["error"]["kind"] == "BudgetExceeded");
}

TEST_CASE("meta lists catalogs, fingerprints and caps") {
  ServiceConfig cfg;
  cfg.max_concurrent = 2;
  cfg.timeout_cap_ms = 1234;
  json uniform = json::parse(Service(cfg, WeightVector{}, "").meta().body);
  CHECK(uniform["weights_fingerprint"].is_null());
  CHECK(uniform["functions"].size() >= 30);
  CHECK(uniform["clues"].size() == standard_catalog().size());
  CHECK(uniform["catalog_fingerprint"] == standard_catalog().fingerprint());
  CHECK(uniform["caps"]["max_concurrent"] == 2);
  CHECK(uniform["caps"]["timeout_cap_ms"] == 1234);
  json trained = json::parse(Service(cfg, WeightVector{}, standard_catalog().fingerprint()).meta().body);
  CHECK(trained["weights_fingerprint"] == standard_catalog().fingerprint());
}

TEST_CASE("http server serves the api") {
  Service svc({}, WeightVector{}, "");
  http::Server server(svc);
  int port = server.bind("127.0.0.1", 0);
  REQUIRE(port > 0);
  std::thread t([&] { server.listen(); });
  server.wait_until_ready();

  httplib::Client cli("127.0.0.1", port);
  auto meta = cli.Get("/api/meta");
  REQUIRE(meta);
  CHECK(meta->status == 200);
  CHECK(meta->get_header_value("Content-Type").find("application/json") == 0);

  auto inf = cli.Post("/api/infer", infer_body("b\na", "B\nA").dump(), "application/json");
  REQUIRE(inf);
  CHECK(inf->status == 200);
  CHECK(json::parse(inf->body)["status"] == "found");

  auto bad = cli.Post("/api/infer", "{", "application/json");
  REQUIRE(bad);
  CHECK(bad->status == 400);

  auto app = cli.Post("/api/apply", json{{"program_text", "toUpper(x)"}, {"data", "q"}}.dump(), "application/json");
  REQUIRE(app);
  CHECK(json::parse(app->body)["output"] == "Q");

  auto pre = cli.Options("/api/infer");
  REQUIRE(pre);
  CHECK(pre->status == 204);
  CHECK_FALSE(pre->get_header_value("Access-Control-Allow-Origin").empty());

  server.stop();
  t.join();
}
