#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "threadloom/corpus.hpp"
#include "threadloom/external.hpp"
#include "threadloom/features.hpp"
#include "threadloom/logistic.hpp"
#include "threadloom/pairing.hpp"
#include "threadloom/prompting.hpp"

namespace threadloom {

enum class ScorerKind { feature, constant, oracle, external };

// Maps a (earlier, later) pair of a thread to a reply probability.
struct ScorerModel {
  ScorerKind kind = ScorerKind::constant;
  std::vector<double> weights;  // feature: one per Feature, bias last
  double constant_value = 0.5;  // constant
  std::string endpoint;         // external
  PromptTemplate prompt = default_template();  // external: how pairs are rendered
  ExternalOptions external_options;

  static ScorerModel feature(std::vector<double> weights);
  static ScorerModel constant(double value);
  static ScorerModel oracle();
  static ScorerModel external(std::string endpoint,
                              PromptTemplate prompt = default_template());

  void validate() const;
  // "feature", "constant:0.7", "oracle" or "external:<endpoint>".
  std::string describe() const;
};

// Parses the --scorer flag. The feature kind takes its weights from
// model_path, which must then be nonempty.
ScorerModel parse_scorer_spec(std::string_view spec, const std::string& model_path = {});

double score(const ScorerModel& model, const PairExample& pair, const Thread& thread);

// Scores many pairs of one thread; external models send a single batch.
std::vector<double> score_thread_pairs(const ScorerModel& model, const Thread& thread,
                                       std::span<const PairExample> pairs);

// True iff score >= threshold.
PairLabel classify(const ScorerModel& model, const PairExample& pair,
                   const Thread& thread, double threshold = 0.5);

void validate_threshold(double threshold);

struct LabeledFeatures {
  FeatureVector features;
  PairLabel label = PairLabel::False;
};

ScorerModel train_feature_scorer(std::span<const LabeledFeatures> train,
                                 const TrainConfig& config);

// Generic-width variant; every row must have kFeatureCount entries to be
// usable as a feature scorer, but the trainer accepts any equal width and
// reports mismatches.
ScorerModel train_feature_scorer(const std::vector<std::vector<double>>& rows,
                                 std::span<const PairLabel> labels,
                                 const TrainConfig& config);

// Plain-text weight record, one "<feature_name> <value>" line per feature.
void write_model(std::ostream& out, const ScorerModel& model);
ScorerModel read_model(std::istream& in);
void save_model(const std::string& path, const ScorerModel& model);
ScorerModel load_model(const std::string& path);

}  // namespace threadloom
