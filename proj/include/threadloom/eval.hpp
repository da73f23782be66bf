#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "threadloom/corpus.hpp"
#include "threadloom/pairing.hpp"
#include "threadloom/scorer.hpp"
#include "threadloom/structure.hpp"

namespace threadloom {

// Confusion counts for the direct-reply class. Ratios with a zero
// denominator are 0.
struct Metrics {
  long long tp = 0;
  long long fp = 0;
  long long fn = 0;
  long long tn = 0;

  double precision() const;
  double recall() const;
  double f1() const;
  long long total() const { return tp + fp + fn + tn; }

  Metrics& operator+=(const Metrics& other);
  bool operator==(const Metrics&) const = default;
};

// predicted and gold must be subsets of universe; a pair outside it is a
// data Error.
Metrics evaluate_pairs(const PairSet& predicted, const PairSet& gold,
                       const PairSet& universe);

enum class MethodKind {
  co,        // creator-oriented baseline
  lr,        // last-reply baseline
  classify,  // independent pairwise decisions: score >= threshold
  tree,      // reconstruct_tree, then compare its links
};

struct Method {
  MethodKind kind = MethodKind::lr;
  ScorerModel scorer = ScorerModel::constant(0.5);
  double threshold = 0.5;
  std::string label;  // display name; defaults from kind

  std::string name() const;
};

// Accepts co, lr, classify, tree, and the shorthands oracle (classify with
// the oracle scorer) and oracle-tree. The scorer is used by classify/tree.
Method parse_method(std::string_view name, const ScorerModel& scorer, double threshold);

struct MethodResult {
  std::string name;
  std::string scorer;  // empty for baselines
  double threshold = 0.0;
  Metrics total;
  std::map<std::string, Metrics> per_source;
};

struct EvalReport {
  std::string dataset;
  std::uint64_t seed = 0;
  std::vector<MethodResult> methods;
};

// Runs the method on every thread touched by the universe and counts
// confusion over those pairs, overall and per thread source. Without an
// explicit universe every generated pair of the corpus is evaluated.
// Threads must carry gold parents.
MethodResult evaluate_method(const Corpus& corpus, const Method& method,
                             std::optional<std::span<const PairExample>> universe = {});

EvalReport evaluate(const Corpus& corpus, std::span<const Method> methods,
                    std::uint64_t seed,
                    std::optional<std::span<const PairExample>> universe = {});

// Aligned human-readable table. Metrics print with three decimals.
std::string render_report_table(const EvalReport& report, bool per_source);

// One JSON object per method (and per source when requested).
std::string render_report_records(const EvalReport& report, bool per_source);

}  // namespace threadloom
