#include "threadloom/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "json.hpp"
#include "threadloom/error.hpp"
#include "threadloom/kernels.hpp"

namespace threadloom {

namespace {

double ratio(long long num, long long den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

std::string fixed(double v, int decimals) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

// Left-aligned columns padded to the widest cell.
std::string align(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& row : rows) {
    width.resize(std::max(width.size(), row.size()), 0);
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::string out;
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      line += row[c];
      if (c + 1 < row.size()) line += std::string(width[c] - row[c].size() + 2, ' ');
    }
    out += line + "\n";
  }
  return out;
}

}  // namespace

double Metrics::precision() const { return ratio(tp, tp + fp); }
double Metrics::recall() const { return ratio(tp, tp + fn); }
double Metrics::f1() const {
  const double p = precision();
  const double r = recall();
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

Metrics& Metrics::operator+=(const Metrics& other) {
  tp += other.tp;
  fp += other.fp;
  fn += other.fn;
  tn += other.tn;
  return *this;
}

Metrics evaluate_pairs(const PairSet& predicted, const PairSet& gold,
                       const PairSet& universe) {
  for (const PairSet* set : {&predicted, &gold}) {
    for (const PostPair& p : *set) {
      if (!universe.contains(p)) {
        throw data_error("pair (" + std::to_string(p.earlier) + ", " +
                         std::to_string(p.later) + ") lies outside the evaluated universe");
      }
    }
  }
  Metrics m;
  for (const PostPair& p : universe) {
    const bool pred = predicted.contains(p);
    const bool truth = gold.contains(p);
    if (pred && truth) {
      ++m.tp;
    } else if (pred) {
      ++m.fp;
    } else if (truth) {
      ++m.fn;
    } else {
      ++m.tn;
    }
  }
  return m;
}

std::string Method::name() const {
  if (!label.empty()) return label;
  switch (kind) {
    case MethodKind::co: return "co";
    case MethodKind::lr: return "lr";
    case MethodKind::classify: return "classify";
    case MethodKind::tree: return "tree";
  }
  return "unknown";
}

Method parse_method(std::string_view name, const ScorerModel& scorer, double threshold) {
  validate_threshold(threshold);
  Method m;
  m.scorer = scorer;
  m.threshold = threshold;
  if (name == "co") {
    m.kind = MethodKind::co;
  } else if (name == "lr") {
    m.kind = MethodKind::lr;
  } else if (name == "classify") {
    m.kind = MethodKind::classify;
  } else if (name == "tree") {
    m.kind = MethodKind::tree;
  } else if (name == "oracle") {
    m.kind = MethodKind::classify;
    m.scorer = ScorerModel::oracle();
    m.label = "oracle";
  } else if (name == "oracle-tree") {
    m.kind = MethodKind::tree;
    m.scorer = ScorerModel::oracle();
    m.label = "oracle-tree";
  } else {
    throw usage_error("unknown method '" + std::string(name) +
                      "' (expected co, lr, classify, tree, oracle or oracle-tree)");
  }
  return m;
}

MethodResult evaluate_method(const Corpus& corpus, const Method& method,
                             std::optional<std::span<const PairExample>> universe) {
  std::vector<PairExample> all;
  std::span<const PairExample> pairs;
  if (universe) {
    pairs = *universe;
  } else {
    all = kernels::corpus_pairs(corpus);
    pairs = all;
  }
  const auto groups = detail::group_by_thread(corpus, pairs);
  for (const Thread* t : groups.threads) {
    if (!t->has_gold()) throw data_error("thread '" + t->id + "' has no gold tree to evaluate against");
  }

  const bool uses_scorer = method.kind == MethodKind::classify || method.kind == MethodKind::tree;
  if (uses_scorer) {
    method.scorer.validate();
    validate_threshold(method.threshold);
  }

  std::vector<double> scores;
  std::vector<PairSet> tree_links(groups.threads.size());
  if (method.kind == MethodKind::classify) {
    scores = kernels::pair_scores(method.scorer, corpus, pairs);
  } else if (method.kind == MethodKind::tree) {
    Corpus touched;
    touched.name = corpus.name;
    for (const Thread* t : groups.threads) touched.threads.push_back(*t);
    const auto trees = kernels::reconstruct_trees(touched, method.scorer, method.threshold);
    for (std::size_t g = 0; g < trees.size(); ++g) {
      tree_links[g] = tree_to_pairs(trees[g], groups.threads[g]->size());
    }
  }

  MethodResult result;
  result.name = method.name();
  if (uses_scorer) {
    result.scorer = method.scorer.describe();
    result.threshold = method.threshold;
  }
  for (std::size_t g = 0; g < groups.threads.size(); ++g) {
    const Thread& thread = *groups.threads[g];
    PairSet universe_t;
    PairSet predicted;
    for (std::size_t i : groups.members[g]) {
      const PostPair p{pairs[i].earlier_index, pairs[i].later_index};
      universe_t.insert(p);
      if (method.kind == MethodKind::classify && scores[i] >= method.threshold) {
        predicted.insert(p);
      }
    }
    PairSet candidates;
    switch (method.kind) {
      case MethodKind::co: candidates = creator_network_pairs(thread); break;
      case MethodKind::lr: candidates = last_reply_pairs(thread); break;
      case MethodKind::tree: candidates = tree_links[g]; break;
      case MethodKind::classify: break;
    }
    for (const PostPair& p : candidates) {
      if (universe_t.contains(p)) predicted.insert(p);
    }
    PairSet gold;
    for (const PostPair& p : tree_to_pairs(gold_tree(thread), thread.size())) {
      if (universe_t.contains(p)) gold.insert(p);
    }
    const Metrics m = evaluate_pairs(predicted, gold, universe_t);
    result.total += m;
    result.per_source[thread.source] += m;
  }
  return result;
}

EvalReport evaluate(const Corpus& corpus, std::span<const Method> methods,
                    std::uint64_t seed,
                    std::optional<std::span<const PairExample>> universe) {
  EvalReport report;
  report.dataset = corpus.name;
  report.seed = seed;
  for (const Method& m : methods) report.methods.push_back(evaluate_method(corpus, m, universe));
  return report;
}

std::string render_report_table(const EvalReport& report, bool per_source) {
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"method", "source", "scorer", "threshold", "tp", "fp", "fn", "tn", "P", "R", "F1"});
  auto add = [&](const MethodResult& r, const std::string& source, const Metrics& m) {
    rows.push_back({r.name, source, r.scorer.empty() ? "-" : r.scorer,
                    r.scorer.empty() ? "-" : fixed(r.threshold, 2), std::to_string(m.tp),
                    std::to_string(m.fp), std::to_string(m.fn), std::to_string(m.tn),
                    fixed(m.precision(), 3), fixed(m.recall(), 3), fixed(m.f1(), 3)});
  };
  for (const auto& r : report.methods) {
    add(r, "all", r.total);
    if (per_source) {
      for (const auto& [source, m] : r.per_source) add(r, source, m);
    }
  }
  return "dataset: " + report.dataset + "  seed: " + std::to_string(report.seed) + "\n" +
         align(rows);
}

std::string render_report_records(const EvalReport& report, bool per_source) {
  std::string out;
  auto add = [&](const MethodResult& r, const std::string& source, const Metrics& m) {
    nlohmann::ordered_json obj;
    obj["dataset"] = report.dataset;
    obj["seed"] = report.seed;
    obj["method"] = r.name;
    obj["source"] = source;
    if (!r.scorer.empty()) {
      obj["scorer"] = r.scorer;
      obj["threshold"] = r.threshold;
    }
    obj["tp"] = m.tp;
    obj["fp"] = m.fp;
    obj["fn"] = m.fn;
    obj["tn"] = m.tn;
    obj["precision"] = m.precision();
    obj["recall"] = m.recall();
    obj["f1"] = m.f1();
    out += obj.dump() + "\n";
  };
  for (const auto& r : report.methods) {
    add(r, "all", r.total);
    if (per_source) {
      for (const auto& [source, m] : r.per_source) add(r, source, m);
    }
  }
  return out;
}

}  // namespace threadloom
