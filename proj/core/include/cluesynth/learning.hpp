#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cluesynth/clues.hpp"
#include "cluesynth/grammar.hpp"
#include "cluesynth/search.hpp"

namespace cluesynth {

/// (x, x̄, ȳ, y) with an optional hand-written target program.
struct TrainingTask {
  std::string id;
  SystemInput z;
  Text expected_output;
  std::optional<std::string> annotation;  // program text
};

struct OptimizerConfig {
  double lambda = 0.1;
  std::size_t max_iterations = 500;
  double tolerance = 1e-6;  // on the gradient 2-norm
  double armijo_c = 1e-4;
  double backtrack = 0.5;
};

/// Regularized negative log-likelihood of annotated programs, compiled for
/// repeated evaluation. Parameters are dense, indexed like `clue_ids`.
class Objective {
 public:
  explicit Objective(std::vector<std::string> clue_ids);

  /// Throws Error(missing_weight) if a rule of the program is suggested by a
  /// clue outside `clue_ids`.
  void add(const Program& annotation);

  std::size_t dimension() const { return ids_.size(); }
  std::size_t size() const { return tasks_.size(); }
  const std::vector<std::string>& clue_ids() const { return ids_; }

  double value(std::span<const double> theta, double lambda) const;
  /// Writes the gradient into `grad` and returns the value.
  double value_and_gradient(std::span<const double> theta, double lambda, std::span<double> grad) const;
  /// Negative log-likelihood of task `t` alone, without the regularizer.
  double task_nll(std::size_t t, std::span<const double> theta) const;

  std::vector<double> dense(const WeightVector& w) const;
  WeightVector weights(std::span<const double> theta) const;

 private:
  struct Group {
    double count = 0;                     // n_V: uses of nonterminal V in the annotation
    std::vector<std::vector<int>> rules;  // suggester indices of every rule with lhs V
  };
  struct Task {
    std::vector<Group> groups;
    std::vector<std::pair<int, double>> observed;  // clue index -> activations along the annotation
  };

  double task_terms(const Task& task, std::span<const double> theta, std::span<double> grad) const;

  std::vector<std::string> ids_;
  std::map<std::string, int, std::less<>> index_;
  std::vector<Task> tasks_;
};

double objective(const WeightVector& theta, const std::vector<Program>& annotations, double lambda,
                 const std::vector<std::string>& clue_ids);
WeightVector gradient(const WeightVector& theta, const std::vector<Program>& annotations, double lambda,
                      const std::vector<std::string>& clue_ids);

struct FitResult {
  WeightVector theta;
  std::vector<double> objective_trace;  // objective after each accepted step, starting value first
  std::size_t iterations = 0;
  double gradient_norm = 0.0;
  bool converged = false;
};

/// Gradient descent with Armijo backtracking. Trial steps use the
/// Barzilai-Borwein length; start is theta = 0 unless given. Throws
/// Error(non_finite_objective).
FitResult fit(const Objective& obj, const OptimizerConfig& cfg, const std::optional<WeightVector>& start = {});
FitResult fit(const std::vector<Program>& annotations, const std::vector<std::string>& clue_ids,
              const OptimizerConfig& cfg, const std::optional<WeightVector>& start = {});

inline const std::vector<double> kDefaultLambdaGrid = {0.01, 0.1, 1.0, 10.0};

/// 5-fold cross-validation over annotations (annotation i goes to fold i % 5).
/// Picks the lambda with the lowest mean held-out NLL; near-ties go to the
/// largest lambda.
double cross_validate_lambda(const std::vector<Program>& annotations, const std::vector<std::string>& clue_ids,
                             const std::vector<double>& grid = kDefaultLambdaGrid, const OptimizerConfig& base = {});

/// Resolves a task's annotation text in its instance grammar. Throws
/// Error(annotation_outside_grammar) when a rule is missing.
Program resolve_annotation(const TrainingTask& task, const ClueCatalog& catalog);

struct BootstrapConfig {
  std::size_t rounds = 3;
  double timeout_seconds = 8.0;
  OptimizerConfig optimizer;
  bool cross_validate = false;
  std::vector<double> lambda_grid = kDefaultLambdaGrid;
  ExecutionBudget budget;
  std::function<void(const std::string&)> log;
};

struct RoundReport {
  std::size_t round = 0;
  std::size_t annotated = 0;
  std::size_t found_by_search = 0;
  double coverage = 0.0;
  double lambda = 0.0;
  double objective = 0.0;
  std::size_t iterations = 0;
  double seconds = 0.0;
};

struct TrainingReport {
  WeightVector theta;
  std::vector<RoundReport> rounds;
  std::vector<double> objective_trace;  // last fit
  std::map<std::string, std::string> annotations;  // task id -> program text
  std::map<std::string, std::string> sources;      // task id -> "manual" | "round N"
  std::vector<std::string> warnings;
};

/// Alternates search (consistent with both pairs) and fitting. Manual
/// annotations are kept as given; a searched annotation found in an earlier
/// round is kept when a later round does not find one. Throws
/// Error(no_annotations_found) when round 1 ends with no annotations.
TrainingReport bootstrap(const std::vector<TrainingTask>& tasks, const BootstrapConfig& cfg,
                         const ClueCatalog& catalog = standard_catalog());

}  // namespace cluesynth
