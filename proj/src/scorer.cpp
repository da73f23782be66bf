#include "threadloom/scorer.hpp"

#include <cmath>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "threadloom/error.hpp"

namespace threadloom {

namespace {

double parse_real(std::string_view text, const std::string& what) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw usage_error(what + ": '" + std::string(text) + "' is not a number");
  }
  return value;
}

double oracle_score(const PairExample& pair, const Thread& thread) {
  if (!thread.gold_parents) {
    throw data_error("oracle scorer needs gold parents for thread '" + thread.id + "'");
  }
  auto it = thread.gold_parents->find(pair.later_index);
  return it != thread.gold_parents->end() && it->second == pair.earlier_index ? 1.0 : 0.0;
}

double linear_score(const std::vector<double>& w, const FeatureVector& f) {
  double z = 0.0;
  for (std::size_t j = 0; j < kFeatureCount; ++j) z += w[j] * f.values[j];
  return sigmoid(z);
}

}  // namespace

ScorerModel ScorerModel::feature(std::vector<double> weights) {
  ScorerModel m;
  m.kind = ScorerKind::feature;
  m.weights = std::move(weights);
  return m;
}

ScorerModel ScorerModel::constant(double value) {
  ScorerModel m;
  m.kind = ScorerKind::constant;
  m.constant_value = value;
  return m;
}

ScorerModel ScorerModel::oracle() {
  ScorerModel m;
  m.kind = ScorerKind::oracle;
  return m;
}

ScorerModel ScorerModel::external(std::string endpoint, PromptTemplate prompt) {
  ScorerModel m;
  m.kind = ScorerKind::external;
  m.endpoint = std::move(endpoint);
  m.prompt = std::move(prompt);
  return m;
}

void ScorerModel::validate() const {
  switch (kind) {
    case ScorerKind::feature:
      if (weights.size() != kFeatureCount) {
        throw usage_error("feature scorer needs " + std::to_string(kFeatureCount) +
                          " weights, got " + std::to_string(weights.size()));
      }
      for (double w : weights) {
        if (!std::isfinite(w)) throw usage_error("feature scorer weight is not finite");
      }
      break;
    case ScorerKind::constant:
      if (!(constant_value >= 0.0 && constant_value <= 1.0)) {
        throw usage_error("constant score must lie in [0, 1]");
      }
      break;
    case ScorerKind::oracle:
      break;
    case ScorerKind::external:
      if (endpoint.empty()) throw usage_error("external scorer needs an endpoint");
      prompt.validate();
      break;
  }
}

std::string ScorerModel::describe() const {
  switch (kind) {
    case ScorerKind::feature: return "feature";
    case ScorerKind::constant: {
      std::ostringstream out;
      out << "constant:" << constant_value;
      return out.str();
    }
    case ScorerKind::oracle: return "oracle";
    case ScorerKind::external: return "external:" + endpoint;
  }
  return "unknown";
}

ScorerModel parse_scorer_spec(std::string_view spec, const std::string& model_path) {
  if (spec == "feature") {
    if (model_path.empty()) throw usage_error("--scorer feature requires --model");
    return load_model(model_path);
  }
  if (spec == "oracle") return ScorerModel::oracle();
  if (spec.starts_with("constant:")) {
    auto m = ScorerModel::constant(parse_real(spec.substr(9), "constant scorer"));
    m.validate();
    return m;
  }
  if (spec.starts_with("external:")) {
    auto m = ScorerModel::external(std::string(spec.substr(9)));
    m.validate();
    return m;
  }
  throw usage_error("unknown scorer '" + std::string(spec) +
                    "' (expected feature, constant:<v>, oracle or external:<endpoint>)");
}

double score(const ScorerModel& model, const PairExample& pair, const Thread& thread) {
  return score_thread_pairs(model, thread, std::span(&pair, 1)).front();
}

std::vector<double> score_thread_pairs(const ScorerModel& model, const Thread& thread,
                                       std::span<const PairExample> pairs) {
  model.validate();
  std::vector<double> out;
  out.reserve(pairs.size());
  switch (model.kind) {
    case ScorerKind::constant:
      out.assign(pairs.size(), model.constant_value);
      break;
    case ScorerKind::oracle:
      for (const auto& p : pairs) out.push_back(oracle_score(p, thread));
      break;
    case ScorerKind::feature: {
      const ThreadFeatures ctx(thread);
      for (const auto& p : pairs) {
        out.push_back(linear_score(model.weights, ctx.extract(p.earlier_index, p.later_index)));
      }
      break;
    }
    case ScorerKind::external: {
      if (pairs.empty()) break;
      std::vector<PromptedExample> prompted;
      prompted.reserve(pairs.size());
      for (const auto& p : pairs) prompted.push_back(render_prompt(model.prompt, p));
      for (const auto& s : external_score_batch(model.endpoint, prompted, model.external_options)) {
        out.push_back(s.score);
      }
      break;
    }
  }
  return out;
}

void validate_threshold(double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw usage_error("threshold must lie in [0, 1]");
  }
}

PairLabel classify(const ScorerModel& model, const PairExample& pair,
                   const Thread& thread, double threshold) {
  validate_threshold(threshold);
  return to_label(score(model, pair, thread) >= threshold);
}

ScorerModel train_feature_scorer(std::span<const LabeledFeatures> train,
                                 const TrainConfig& config) {
  std::vector<std::vector<double>> rows;
  std::vector<PairLabel> labels;
  rows.reserve(train.size());
  labels.reserve(train.size());
  for (const auto& item : train) {
    rows.emplace_back(item.features.values.begin(), item.features.values.end());
    labels.push_back(item.label);
  }
  return train_feature_scorer(rows, labels, config);
}

ScorerModel train_feature_scorer(const std::vector<std::vector<double>>& rows,
                                 std::span<const PairLabel> labels,
                                 const TrainConfig& config) {
  LogisticProblem problem;
  problem.rows = rows;
  problem.targets.reserve(labels.size());
  for (PairLabel l : labels) problem.targets.push_back(l == PairLabel::True ? 1.0 : 0.0);
  if (!rows.empty() && rows.front().size() == kFeatureCount) problem.unpenalized = kBiasIndex;
  return ScorerModel::feature(fit_logistic(problem, config).weights);
}

void write_model(std::ostream& out, const ScorerModel& model) {
  if (model.kind != ScorerKind::feature) {
    throw usage_error("only feature scorers are persisted");
  }
  model.validate();
  out << "# threadloom feature scorer\n";
  char buf[64];
  for (std::size_t j = 0; j < kFeatureCount; ++j) {
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, model.weights[j]);
    out << feature_name(j) << ' ' << std::string_view(buf, ptr - buf) << '\n';
  }
}

ScorerModel read_model(std::istream& in) {
  std::map<std::string, double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    std::istringstream fields(line);
    std::string name, value;
    if (!(fields >> name >> value)) {
      throw data_error("model line " + std::to_string(line_no) + ": expected '<feature> <weight>'");
    }
    try {
      values[name] = parse_real(value, "weight");
    } catch (const Error& e) {
      throw data_error("model line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  std::vector<double> weights(kFeatureCount);
  for (std::size_t j = 0; j < kFeatureCount; ++j) {
    auto it = values.find(std::string(feature_name(j)));
    if (it == values.end()) {
      throw data_error("model is missing weight '" + std::string(feature_name(j)) + "'");
    }
    weights[j] = it->second;
  }
  if (values.size() != kFeatureCount) throw data_error("model has unknown feature names");
  auto model = ScorerModel::feature(std::move(weights));
  model.validate();
  return model;
}

void save_model(const std::string& path, const ScorerModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot write model file '" + path + "'");
  write_model(out, model);
}

ScorerModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open model file '" + path + "'");
  return read_model(in);
}

}  // namespace threadloom
