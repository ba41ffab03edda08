#include "doctest.h"

#include <cmath>
#include <random>

#include "cluesynth/errors.hpp"
#include "cluesynth/learning.hpp"
#include "cluesynth/weights_io.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace cluesynth;

namespace {

const std::vector<std::string> kIds = {"k0", "k1", "k2", "k3", "k4", "k5"};

// Annotated programs drawn from a random grammar's small derivations.
std::vector<Program> random_annotations(std::mt19937_64& rng, std::size_t count) {
  for (;;) {
    auto rg = oracles::random_grammar(rng);
    oracles::BruteForce bf(*rg.grammar, 5);
    const auto& all = bf.all(Sort::P);
    if (all.empty()) continue;
    std::uniform_int_distribution<std::size_t> pick(0, all.size() - 1);
    std::vector<Program> out;
    for (std::size_t i = 0; i < count; ++i) out.emplace_back(rg.grammar, all[pick(rng)]);
    return out;
  }
}

// Two leaves for P: "a" suggested by clue a, "b" by nothing.
std::shared_ptr<const Grammar> two_leaf_grammar() {
  Rule a = make_constant_rule(Sort::P, Value("a"));
  a.suggesters = {"a"};
  Rule b = make_constant_rule(Sort::P, Value("b"));
  return std::make_shared<const Grammar>(std::vector<Rule>{a, b});
}

std::vector<Program> two_to_one() {
  auto g = two_leaf_grammar();
  RuleIndex ia = *g->find("P->\"a\""), ib = *g->find("P->\"b\"");
  return {Program(g, {ia}), Program(g, {ia}), Program(g, {ib})};
}

double golden_min(const std::function<double(double)>& f, double lo, double hi) {
  const double r = (std::sqrt(5.0) - 1) / 2;
  double a = lo, b = hi;
  while (b - a > 1e-10) {
    double c = b - r * (b - a), d = a + r * (b - a);
    if (f(c) < f(d)) b = d; else a = c;
  }
  return (a + b) / 2;
}

}  // namespace

TEST_CASE("gradient matches central finite differences") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> w(0.0, 1.0);
  for (int trial = 0; trial < 15; ++trial) {
    auto anns = random_annotations(rng, 4);
    Objective obj(kIds);
    for (const auto& p : anns) obj.add(p);
    std::vector<double> theta(kIds.size());
    for (auto& t : theta) t = w(rng);
    const double lambda = 0.3;
    std::vector<double> grad(kIds.size());
    obj.value_and_gradient(theta, lambda, grad);
    for (std::size_t i = 0; i < theta.size(); ++i) {
      const double h = 1e-5;
      auto tp = theta, tm = theta;
      tp[i] += h;
      tm[i] -= h;
      double fd = (obj.value(tp, lambda) - obj.value(tm, lambda)) / (2 * h);
      CHECK(grad[i] == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
    }
  }
}

TEST_CASE("objective equals the direct log-likelihood") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    auto anns = random_annotations(rng, 3);
    WeightVector theta;
    std::normal_distribution<double> w(0.0, 1.0);
    for (const auto& id : kIds) theta.set(id, w(rng));
    double expect = 0;
    for (const auto& p : anns) {
      auto probs = oracles::rule_probabilities(p.grammar(), theta);
      expect -= std::log(oracles::derivation_probability(p.derivation(), probs));
    }
    double reg = 0;
    for (const auto& [id, v] : theta.values()) reg += 0.5 * 0.2 * v * v;
    CHECK(objective(theta, anns, 0.2, kIds) == doctest::Approx(expect + reg).epsilon(1e-10));
  }
}

TEST_CASE("fit reaches the same optimum from any start") {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> w(0.0, 3.0);
  for (int trial = 0; trial < 5; ++trial) {
    auto anns = random_annotations(rng, 6);
    OptimizerConfig cfg;
    cfg.lambda = 0.5;
    cfg.max_iterations = 5000;
    FitResult base = fit(anns, kIds, cfg);
    CHECK(base.converged);
    for (std::size_t i = 1; i < base.objective_trace.size(); ++i) {
      CHECK(base.objective_trace[i] <= base.objective_trace[i - 1]);
    }
    for (int s = 0; s < 3; ++s) {
      WeightVector start;
      for (const auto& id : kIds) start.set(id, w(rng));
      FitResult other = fit(anns, kIds, cfg, start);
      CHECK(other.converged);
      for (const auto& id : kIds) CHECK(*other.theta.get(id) == doctest::Approx(*base.theta.get(id)).epsilon(1e-5).scale(1.0));
    }
  }
}

TEST_CASE("one-parameter fit matches a grid minimizer") {
  auto anns = two_to_one();
  for (double lambda : {0.0, 0.1, 1.0, 10.0}) {
    auto f = [&](double a) { return 3 * std::log(std::exp(a) + 1) - 2 * a + 0.5 * lambda * a * a; };
    double oracle = golden_min(f, -10, 10);
    OptimizerConfig cfg;
    cfg.lambda = lambda;
    cfg.tolerance = 1e-10;
    FitResult r = fit(anns, {"a"}, cfg);
    CHECK(*r.theta.get("a") == doctest::Approx(oracle).epsilon(1e-6).scale(1.0));
  }
  OptimizerConfig cfg;
  cfg.lambda = 0;
  cfg.tolerance = 1e-10;
  CHECK(*fit(anns, {"a"}, cfg).theta.get("a") == doctest::Approx(std::log(2.0)).epsilon(1e-8));
}

TEST_CASE("strong regularization pins weights to zero") {
  std::mt19937_64 rng(3);
  auto anns = random_annotations(rng, 5);
  OptimizerConfig cfg;
  cfg.lambda = 1e6;
  FitResult r = fit(anns, kIds, cfg);
  for (const auto& id : kIds) CHECK(std::abs(*r.theta.get(id)) < 1e-5);
}

TEST_CASE("without annotations the gradient is lambda theta") {
  WeightVector theta;
  theta.set("k0", 1.5);
  theta.set("k1", -2.0);
  WeightVector g = gradient(theta, {}, 0.4, {"k0", "k1"});
  CHECK(*g.get("k0") == doctest::Approx(0.6));
  CHECK(*g.get("k1") == doctest::Approx(-0.8));
  CHECK(objective(theta, {}, 0.4, {"k0", "k1"}) == doctest::Approx(0.2 * (2.25 + 4.0)));
}

TEST_CASE("fit rejects non-finite objectives and unknown clues") {
  auto anns = two_to_one();
  WeightVector start;
  start.set("a", 1e300);
  OptimizerConfig cfg;
  try {
    fit(anns, {"a"}, cfg, start);
    FAIL("expected an exception");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::non_finite_objective);
  }
  try {
    fit(anns, {"zzz"}, cfg);
    FAIL("expected an exception");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::missing_weight);
  }
}

TEST_CASE("cross-validation picks from the grid") {
  auto g = two_leaf_grammar();
  RuleIndex ib = *g->find("P->\"b\"");
  // Only the unsuggested rule is used: the weakest penalty drives a lowest.
  std::vector<Program> anns(6, Program(g, {ib}));
  CHECK(cross_validate_lambda(anns, {"a"}) == 0.01);

  // No rule carries a clue: every lambda ties and the largest wins.
  Rule c = make_constant_rule(Sort::P, Value("c"));
  Rule d = make_constant_rule(Sort::P, Value("d"));
  auto g2 = std::make_shared<const Grammar>(std::vector<Rule>{c, d});
  std::vector<Program> flat(7, Program(g2, {0}));
  CHECK(cross_validate_lambda(flat, {"a"}, {1.0, 0.5, 3.0, 2.0}) == 3.0);

  // Mixed data against a one-dimensional fold-by-fold oracle.
  RuleIndex ia = *g->find("P->\"a\"");
  std::vector<Program> mixed(12, Program(g, {ia}));
  for (std::size_t i : {3u, 4u, 10u}) mixed[i] = Program(g, {ib});
  auto nll = [](bool is_a, double a) { return std::log(std::exp(a) + 1) - (is_a ? a : 0.0); };
  double best = 1e300, expect = 0;
  for (double lambda : kDefaultLambdaGrid) {
    double held = 0;
    for (std::size_t k = 0; k < 5; ++k) {
      auto f = [&](double a) {
        double v = 0.5 * lambda * a * a;
        for (std::size_t i = 0; i < mixed.size(); ++i) {
          if (i % 5 != k) v += nll(mixed[i].derivation()[0] == ia, a);
        }
        return v;
      };
      double a = golden_min(f, -20, 20);
      for (std::size_t i = k; i < mixed.size(); i += 5) held += nll(mixed[i].derivation()[0] == ia, a);
    }
    if (held < best - 1e-9) best = held, expect = lambda;
  }
  CHECK(cross_validate_lambda(mixed, {"a"}) == expect);
}

TEST_CASE("cross-validation prefers a weak penalty under a strong signal") {
  auto g = two_leaf_grammar();
  RuleIndex ia = *g->find("P->\"a\"");
  std::vector<Program> anns(10, Program(g, {ia}));
  // Held-out NLL recomputed directly: every fold trains on 8 copies of "a".
  auto held_out = [](double lambda) {
    double a = golden_min([&](double t) { return 8 * (std::log(std::exp(t) + 1) - t) + 0.5 * lambda * t * t; }, -50, 50);
    return std::log(std::exp(a) + 1) - a;
  };
  REQUIRE(held_out(0.1) < held_out(1e6));
  CHECK(cross_validate_lambda(anns, {"a"}, {1e6, 0.1}) == 0.1);
  CHECK(cross_validate_lambda(anns, {"a"}, {0.7}) == 0.7);
}

TEST_CASE("objective is convex along random segments") {
  std::mt19937_64 rng(29);
  std::normal_distribution<double> w(0.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    Objective obj(kIds);
    for (const auto& p : random_annotations(rng, 5)) obj.add(p);
    std::vector<double> t1(kIds.size()), t2(kIds.size()), mid(kIds.size());
    for (auto& v : t1) v = w(rng);
    for (auto& v : t2) v = w(rng);
    for (double t : {0.25, 0.5, 0.75}) {
      for (std::size_t i = 0; i < mid.size(); ++i) mid[i] = t * t1[i] + (1 - t) * t2[i];
      CHECK(obj.value(mid, 0.1) <= t * obj.value(t1, 0.1) + (1 - t) * obj.value(t2, 0.1) + 1e-9);
    }
  }
}

TEST_CASE("weights file round trip and fingerprint check") {
  const ClueCatalog& cat = standard_catalog();
  WeightVector theta = WeightVector::zeros(cat.ids());
  theta.set(cat.ids().front(), 1.25);
  std::string text = weights_to_json(theta, cat);
  CHECK(weights_from_json(text, cat) == theta);

  ClueCatalog smaller({cat.clues().begin(), cat.clues().end() - 1});
  try {
    weights_from_json(text, smaller);
    FAIL("expected an exception");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::fingerprint_mismatch);
  }
  try {
    weights_from_json("{not json", cat);
    FAIL("expected an exception");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::malformed_input);
  }
}

TEST_CASE("bootstrap annotates, keeps manual programs and warns") {
  std::vector<TrainingTask> tasks;
  tasks.push_back({"upper", {"b\na", "x\ny", "X\nY"}, "B\nA", std::nullopt});
  tasks.push_back({"dedup", {"q\nq\nr", "a\na\nb", "a\nb"}, "q\nr", std::nullopt});
  tasks.push_back({"manual", {"1\n2", "b\na", "a\nb"}, "1\n2", std::string("join(sort(split(x, \"\\n\"), alpha), \"\\n\")")});
  tasks.push_back({"outside", {"p", "a", "b"}, "q", std::string("monthName(toInt(x))")});

  BootstrapConfig cfg;
  cfg.rounds = 2;
  cfg.timeout_seconds = 2.0;
  TrainingReport rep = bootstrap(tasks, cfg);
  REQUIRE(rep.rounds.size() == 2);
  CHECK(rep.rounds[0].annotated <= rep.rounds[1].annotated);
  CHECK(rep.sources.at("manual") == "manual");
  CHECK(rep.annotations.count("upper") == 1);
  CHECK(rep.annotations.count("dedup") == 1);
  CHECK(rep.annotations.count("outside") == 0);
  CHECK(rep.warnings.size() >= 1);
  CHECK(rep.theta.size() == standard_catalog().size());
}

TEST_CASE("bootstrap with nothing to annotate fails") {
  std::vector<TrainingTask> tasks = {{"hopeless", {"abc", "abc", "zzz"}, "qqq", std::nullopt}};
  BootstrapConfig cfg;
  cfg.rounds = 1;
  cfg.timeout_seconds = 0.2;
  try {
    bootstrap(tasks, cfg);
    FAIL("expected an exception");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::no_annotations_found);
  }
}
