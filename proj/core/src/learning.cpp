#include "cluesynth/learning.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "cluesynth/errors.hpp"

namespace cluesynth {

Objective::Objective(std::vector<std::string> clue_ids) : ids_(std::move(clue_ids)) {
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (!index_.emplace(ids_[i], static_cast<int>(i)).second) {
      throw Error(ErrorCode::duplicate_name, "clue id listed twice: " + ids_[i]);
    }
  }
}

void Objective::add(const Program& annotation) {
  const Grammar& g = annotation.grammar();
  auto idx = [&](const std::string& id) {
    auto it = index_.find(id);
    if (it == index_.end()) throw Error(ErrorCode::missing_weight, "no parameter for clue " + id);
    return it->second;
  };

  std::array<double, kSortCount> uses{};
  std::map<int, double> observed;
  for (RuleIndex r : annotation.derivation()) {
    const Rule& rule = g.rule(r);
    uses[sort_index(rule.lhs)] += 1;
    for (const auto& s : rule.suggesters) observed[idx(s)] += 1;
  }

  Task task;
  for (std::size_t v = 0; v < kSortCount; ++v) {
    if (uses[v] == 0) continue;
    Group grp;
    grp.count = uses[v];
    for (RuleIndex r : g.rules_for(static_cast<Sort>(v))) {
      std::vector<int> s;
      for (const auto& id : g.rule(r).suggesters) s.push_back(idx(id));
      grp.rules.push_back(std::move(s));
    }
    task.groups.push_back(std::move(grp));
  }
  task.observed.assign(observed.begin(), observed.end());
  tasks_.push_back(std::move(task));
}

double Objective::task_terms(const Task& task, std::span<const double> theta, std::span<double> grad) const {
  double nll = 0;
  std::vector<double> score;
  for (const auto& grp : task.groups) {
    score.resize(grp.rules.size());
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < grp.rules.size(); ++r) {
      double s = 0;
      for (int k : grp.rules[r]) s += theta[static_cast<std::size_t>(k)];
      score[r] = s;
      mx = std::max(mx, s);
    }
    double z = 0;
    for (double s : score) z += std::exp(s - mx);
    nll += grp.count * (mx + std::log(z));
    if (!grad.empty()) {
      for (std::size_t r = 0; r < grp.rules.size(); ++r) {
        double w = grp.count * std::exp(score[r] - mx) / z;
        for (int k : grp.rules[r]) grad[static_cast<std::size_t>(k)] += w;
      }
    }
  }
  for (auto [k, c] : task.observed) {
    nll -= c * theta[static_cast<std::size_t>(k)];
    if (!grad.empty()) grad[static_cast<std::size_t>(k)] -= c;
  }
  return nll;
}

double Objective::value(std::span<const double> theta, double lambda) const {
  double f = 0;
  for (const auto& t : tasks_) f += task_terms(t, theta, {});
  for (double w : theta) f += 0.5 * lambda * w * w;
  return f;
}

double Objective::value_and_gradient(std::span<const double> theta, double lambda, std::span<double> grad) const {
  std::fill(grad.begin(), grad.end(), 0.0);
  double f = 0;
  for (const auto& t : tasks_) f += task_terms(t, theta, grad);
  for (std::size_t i = 0; i < theta.size(); ++i) {
    f += 0.5 * lambda * theta[i] * theta[i];
    grad[i] += lambda * theta[i];
  }
  return f;
}

double Objective::task_nll(std::size_t t, std::span<const double> theta) const {
  return task_terms(tasks_.at(t), theta, {});
}

std::vector<double> Objective::dense(const WeightVector& w) const {
  std::vector<double> out(ids_.size(), 0.0);
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (auto v = w.get(ids_[i])) out[i] = *v;
  }
  return out;
}

WeightVector Objective::weights(std::span<const double> theta) const {
  WeightVector w;
  for (std::size_t i = 0; i < ids_.size(); ++i) w.set(ids_[i], theta[i]);
  return w;
}

namespace {

Objective compile(const std::vector<Program>& annotations, const std::vector<std::string>& clue_ids) {
  Objective obj(clue_ids);
  for (const auto& p : annotations) obj.add(p);
  return obj;
}

double norm2(std::span<const double> v) {
  return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
}

void require_finite(double f, const char* what) {
  if (!std::isfinite(f)) throw Error(ErrorCode::non_finite_objective, what);
}

}  // namespace

double objective(const WeightVector& theta, const std::vector<Program>& annotations, double lambda,
                 const std::vector<std::string>& clue_ids) {
  Objective obj = compile(annotations, clue_ids);
  return obj.value(obj.dense(theta), lambda);
}

WeightVector gradient(const WeightVector& theta, const std::vector<Program>& annotations, double lambda,
                      const std::vector<std::string>& clue_ids) {
  Objective obj = compile(annotations, clue_ids);
  std::vector<double> g(obj.dimension());
  obj.value_and_gradient(obj.dense(theta), lambda, g);
  return obj.weights(g);
}

FitResult fit(const Objective& obj, const OptimizerConfig& cfg, const std::optional<WeightVector>& start) {
  if (!(cfg.lambda >= 0) || !(cfg.backtrack > 0 && cfg.backtrack < 1) || !(cfg.armijo_c > 0 && cfg.armijo_c < 1)) {
    throw Error(ErrorCode::invalid_argument, "optimizer settings out of range");
  }
  const std::size_t n = obj.dimension();
  std::vector<double> x = start ? obj.dense(*start) : std::vector<double>(n, 0.0);
  std::vector<double> g(n), xn(n), gn(n);

  FitResult res;
  double f = obj.value_and_gradient(x, cfg.lambda, g);
  require_finite(f, "objective at the starting point");
  res.objective_trace.push_back(f);
  double gnorm = norm2(g);
  double step = 1.0;

  while (gnorm > cfg.tolerance && res.iterations < cfg.max_iterations) {
    double gg = gnorm * gnorm;
    double fn = 0;
    bool accepted = false;
    for (double a = step; a > 1e-20; a *= cfg.backtrack) {
      for (std::size_t i = 0; i < n; ++i) xn[i] = x[i] - a * g[i];
      fn = obj.value_and_gradient(xn, cfg.lambda, gn);
      if (std::isfinite(fn) && fn <= f - cfg.armijo_c * a * gg) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;  // no representable descent step left

    double ss = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double s = xn[i] - x[i], y = gn[i] - g[i];
      ss += s * s;
      sy += s * y;
    }
    step = sy > 0 ? std::clamp(ss / sy, 1e-10, 1e10) : 1.0;

    x.swap(xn);
    g.swap(gn);
    f = fn;
    gnorm = norm2(g);
    require_finite(f, "objective during descent");
    res.objective_trace.push_back(f);
    ++res.iterations;
  }
  res.converged = gnorm <= cfg.tolerance;
  res.gradient_norm = gnorm;
  res.theta = obj.weights(x);
  return res;
}

FitResult fit(const std::vector<Program>& annotations, const std::vector<std::string>& clue_ids,
              const OptimizerConfig& cfg, const std::optional<WeightVector>& start) {
  return fit(compile(annotations, clue_ids), cfg, start);
}

double cross_validate_lambda(const std::vector<Program>& annotations, const std::vector<std::string>& clue_ids,
                             const std::vector<double>& grid, const OptimizerConfig& base) {
  if (grid.empty()) throw Error(ErrorCode::invalid_argument, "empty lambda grid");
  const std::size_t n = annotations.size();
  const std::size_t folds = std::min<std::size_t>(5, n);
  double best_lambda = grid.front();
  double best = std::numeric_limits<double>::infinity();
  if (folds < 2) return *std::max_element(grid.begin(), grid.end());

  Objective all = compile(annotations, clue_ids);
  for (double lambda : grid) {
    double held = 0;
    for (std::size_t k = 0; k < folds; ++k) {
      Objective train(clue_ids);
      for (std::size_t i = 0; i < n; ++i) {
        if (i % folds != k) train.add(annotations[i]);
      }
      OptimizerConfig cfg = base;
      cfg.lambda = lambda;
      std::vector<double> theta = all.dense(fit(train, cfg).theta);
      for (std::size_t i = k; i < n; i += folds) held += all.task_nll(i, theta);
    }
    held /= static_cast<double>(n);
    if (held < best - 1e-12 || (std::abs(held - best) <= 1e-12 && lambda > best_lambda)) {
      best = held;
      best_lambda = lambda;
    }
  }
  return best_lambda;
}

Program resolve_annotation(const TrainingTask& task, const ClueCatalog& catalog) {
  if (!task.annotation) throw Error(ErrorCode::invalid_argument, "task " + task.id + " has no annotation");
  std::shared_ptr<const Grammar> g;
  try {
    g = build_instance_grammar(task.z, catalog);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::vacuous_grammar) throw;
    throw Error(ErrorCode::annotation_outside_grammar, task.id + ": instance grammar is empty");
  }
  auto p = resolve_program(g, *task.annotation);
  if (!p) {
    throw Error(ErrorCode::annotation_outside_grammar,
                task.id + ": `" + *task.annotation + "` is not derivable from the instance grammar");
  }
  return std::move(*p);
}

TrainingReport bootstrap(const std::vector<TrainingTask>& tasks, const BootstrapConfig& cfg,
                         const ClueCatalog& catalog) {
  using clock = std::chrono::steady_clock;
  auto log = [&](const std::string& s) {
    if (cfg.log) cfg.log(s);
  };

  TrainingReport report;
  const std::vector<std::string> ids = catalog.ids();
  std::vector<std::optional<Program>> ann(tasks.size());
  std::vector<bool> manual(tasks.size(), false);

  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (!tasks[i].annotation) continue;
    try {
      ann[i] = resolve_annotation(tasks[i], catalog);
      manual[i] = true;
      report.sources[tasks[i].id] = "manual";
    } catch (const Error& e) {
      if (e.code() != ErrorCode::annotation_outside_grammar) throw;
      report.warnings.push_back(e.what());
      log(std::string("warning: ") + e.what());
    }
  }

  WeightVector theta = WeightVector::zeros(ids);
  for (std::size_t round = 1; round <= cfg.rounds; ++round) {
    auto t0 = clock::now();
    RoundReport rr;
    rr.round = round;

    SearchConfig sc;
    sc.timeout_seconds = cfg.timeout_seconds;
    sc.budget = cfg.budget;
    sc.max_candidates_per_band = 1;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      if (manual[i]) continue;
      sc.data_output = tasks[i].expected_output;
      SearchOutcome out = search(tasks[i].z, theta, sc, catalog);
      if (out.status == SearchStatus::found) {
        ann[i] = std::move(out.result);
        report.sources[tasks[i].id] = "round " + std::to_string(round);
        ++rr.found_by_search;
      }
      log("round " + std::to_string(round) + " " + tasks[i].id + ": " + std::string(status_name(out.status)) +
          (ann[i] ? " " + ann[i]->text() : ""));
    }

    std::vector<Program> annotations;
    for (const auto& a : ann) {
      if (a) annotations.push_back(*a);
    }
    if (annotations.empty()) {
      if (round == 1) throw Error(ErrorCode::no_annotations_found, "no task was annotated after the first round");
    }

    OptimizerConfig oc = cfg.optimizer;
    if (cfg.cross_validate) oc.lambda = cross_validate_lambda(annotations, ids, cfg.lambda_grid, cfg.optimizer);
    FitResult fr = fit(annotations, ids, oc);
    theta = fr.theta;

    rr.annotated = annotations.size();
    rr.coverage = tasks.empty() ? 0.0 : static_cast<double>(annotations.size()) / static_cast<double>(tasks.size());
    rr.lambda = oc.lambda;
    rr.objective = fr.objective_trace.back();
    rr.iterations = fr.iterations;
    rr.seconds = std::chrono::duration<double>(clock::now() - t0).count();
    if (!fr.converged) {
      report.warnings.push_back("round " + std::to_string(round) + ": optimizer stopped before convergence");
    }
    report.objective_trace = fr.objective_trace;
    report.rounds.push_back(rr);
    log("round " + std::to_string(round) + ": " + std::to_string(rr.annotated) + "/" + std::to_string(tasks.size()) +
        " annotated, objective " + std::to_string(rr.objective));
  }

  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (ann[i]) report.annotations[tasks[i].id] = ann[i]->text();
  }
  report.theta = theta;
  return report;
}

}  // namespace cluesynth
