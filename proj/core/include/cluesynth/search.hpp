#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cluesynth/clues.hpp"
#include "cluesynth/dsl.hpp"
#include "cluesynth/grammar.hpp"

namespace cluesynth {

enum class SearchMode { learned, baseline };
enum class SearchStatus { found, not_found, timeout };

std::string_view status_name(SearchStatus s);

struct SearchConfig {
  double timeout_seconds = 10.0;
  double eta_decay = 0.25;
  double initial_eta_factor = 1.0;
  ExecutionBudget budget;
  SearchMode mode = SearchMode::learned;

  /// Consistent programs retained per band (the winner is always kept). Once
  /// the cap is reached, programs that cannot enter the retained set are
  /// pruned; 1 keeps only the winner.
  std::size_t max_candidates_per_band = 8;

  /// Also require output == `data_output` on `z.data_input` (bootstrap).
  std::optional<Text> data_output;

  bool trace = false;
  std::size_t trace_limit = 100'000;

  /// Called once per executed program with its log-probability (0 in
  /// baseline mode) and whether it was consistent.
  std::function<void(const Derivation&, double, bool)> observer;
};

struct Candidate {
  Program program;
  double logprob = 0.0;
};

struct SearchStats {
  std::uint64_t programs_generated = 0;  // complete derivations reached inside the active band / size
  std::uint64_t programs_executed = 0;   // of those, how many were run to a final output
  std::size_t bands = 0;                 // bands (learned) or size levels (baseline) visited
  double elapsed_seconds = 0.0;
  double final_eta = 0.0;                // learned: lower edge of the last band
};

struct SearchOutcome {
  SearchStatus status = SearchStatus::not_found;
  std::optional<Program> result;
  double logprob = -std::numeric_limits<double>::infinity();
  std::vector<Candidate> candidates;  // consistent programs of the winning band, best first
  SearchStats stats;
  std::vector<std::string> trace;     // band<TAB>program<TAB>probability<TAB>consistent
};

/// best[V]: maximum log-probability of a complete derivation from V.
struct MaxCompletionTable {
  std::array<double, kSortCount> best{};
  std::vector<double> child_best;  // per rule: sum of best over its child nonterminals
  std::vector<bool> usable;        // per rule: every child has a finite completion

  double operator[](Sort s) const { return best[sort_index(s)]; }
};

/// Monotone value iteration from -inf. Throws Error(no_finite_start) when
/// best[start] = -inf and `require_finite_start` is set.
MaxCompletionTable max_completion(const Grammar& g, const RuleProbabilities& rp, bool require_finite_start = true);

struct MinSizeTable {
  static constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
  std::array<std::uint32_t, kSortCount> min{};
  std::vector<std::uint32_t> child_min;

  std::uint32_t operator[](Sort s) const { return min[sort_index(s)]; }
};

MinSizeTable min_sizes(const Grammar& g);

struct ScoredDerivation {
  Derivation derivation;
  double logprob = 0.0;
};

/// Candidate order: higher probability, then fewer rules, then the
/// lexicographically smaller rule-index sequence.
bool precedes(const ScoredDerivation& a, const ScoredDerivation& b);

/// Every derivation with eta_low <= Pr < eta_high, in candidate order. The
/// top band is closed: eta_high >= 1 admits probability 1. eta_low = 0
/// requires max_size > 0, which caps derivation size.
std::vector<ScoredDerivation> enumerate_band(const Grammar& g, const RuleProbabilities& rp,
                                             const MaxCompletionTable& table, double eta_low, double eta_high,
                                             std::size_t max_size = 0);

/// Derivations in baseline order (size, then rule-index sequence) up to
/// `max_size`, at most `limit` of them.
std::vector<Derivation> enumerate_by_size(const Grammar& g, std::size_t max_size,
                                          std::size_t limit = std::numeric_limits<std::size_t>::max());

/// sigma_{theta,tau}: builds R_z, prices it with theta and searches.
SearchOutcome search(const SystemInput& z, const WeightVector& theta, const SearchConfig& cfg,
                     const ClueCatalog& catalog = standard_catalog());

/// Probability-ordered search on a prepared grammar.
SearchOutcome search_grammar(const std::shared_ptr<const Grammar>& g, const RuleProbabilities& rp,
                             const SystemInput& z, const SearchConfig& cfg);

/// Size-ordered search over the same clue-built grammar with all weights zero.
SearchOutcome baseline_search(const SystemInput& z, const SearchConfig& cfg,
                              const ClueCatalog& catalog = standard_catalog());
SearchOutcome baseline_search_grammar(const std::shared_ptr<const Grammar>& g, const SystemInput& z,
                                      const SearchConfig& cfg);

}  // namespace cluesynth
