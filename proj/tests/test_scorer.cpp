#include <sstream>

#include "doctest.h"
#include "threadloom/error.hpp"
#include "threadloom/features.hpp"
#include "threadloom/kernels.hpp"
#include "threadloom/scorer.hpp"
#include "threadloom/synth.hpp"

using namespace threadloom;

namespace {

Thread chain3() {
  Thread t;
  t.id = "c";
  t.source = "s";
  t.posts = {{1, "a", "alpha beta", {}}, {2, "b", "beta gamma", {}}, {3, "a", "gamma delta", {}}};
  t.gold_parents = ParentMap{{2, 1}, {3, 2}};
  return t;
}

PairExample pair(const Thread& t, int e, int l) {
  for (const auto& p : generate_pairs(t)) {
    if (p.earlier_index == e && p.later_index == l) return p;
  }
  FAIL("no such pair");
  return {};
}

}  // namespace

TEST_CASE("constant and oracle scorers") {
  const Thread t = chain3();
  CHECK(score(ScorerModel::constant(0.7), pair(t, 1, 3), t) == 0.7);
  CHECK(score(ScorerModel::oracle(), pair(t, 1, 2), t) == 1.0);
  CHECK(score(ScorerModel::oracle(), pair(t, 1, 3), t) == 0.0);
  CHECK(classify(ScorerModel::constant(0.4), pair(t, 1, 2), t) == PairLabel::False);
  CHECK(classify(ScorerModel::constant(0.5), pair(t, 1, 2), t) == PairLabel::True);
  CHECK(classify(ScorerModel::constant(0.5), pair(t, 1, 2), t, 0.51) == PairLabel::False);

  Thread no_gold = t;
  no_gold.gold_parents.reset();
  CHECK_THROWS_AS(score(ScorerModel::oracle(), pair(no_gold, 1, 2), no_gold), Error);
  CHECK_THROWS_AS(classify(ScorerModel::constant(0.5), pair(t, 1, 2), t, 1.5), Error);
}

TEST_CASE("zero weights score one half") {
  const Thread t = chain3();
  const auto m = ScorerModel::feature(std::vector<double>(kFeatureCount, 0.0));
  for (const auto& p : generate_pairs(t)) CHECK(score(m, p, t) == 0.5);
  CHECK(classify(m, pair(t, 1, 2), t) == PairLabel::True);
}

TEST_CASE("a positive weight makes the score monotone in its feature") {
  const Thread t = chain3();
  std::vector<double> w(kFeatureCount, 0.0);
  w[static_cast<std::size_t>(Feature::positional_gap)] = 3.0;
  const auto m = ScorerModel::feature(w);
  // gap 1 beats gap 2
  CHECK(score(m, pair(t, 2, 3), t) > score(m, pair(t, 1, 3), t));
  CHECK(score(m, pair(t, 1, 2), t) == score(m, pair(t, 2, 3), t));
}

TEST_CASE("the oracle scorer classifies every synthetic pair correctly") {
  SynthOptions o;
  o.seed = 7;
  const Corpus c = synth_corpus(o);
  long long tp = 0, wrong = 0;
  for (const auto& t : c.threads) {
    for (const auto& p : generate_pairs(t)) {
      const bool predicted = classify(ScorerModel::oracle(), p, t) == PairLabel::True;
      const bool truth = *p.label == PairLabel::True;
      tp += predicted && truth;
      wrong += predicted != truth;
    }
  }
  CHECK(wrong == 0);
  CHECK(tp > 0);
}

TEST_CASE("scorer specs") {
  CHECK(parse_scorer_spec("oracle").kind == ScorerKind::oracle);
  const auto c = parse_scorer_spec("constant:0.25");
  CHECK(c.kind == ScorerKind::constant);
  CHECK(c.constant_value == 0.25);
  CHECK(c.describe() == "constant:0.25");
  const auto e = parse_scorer_spec("external:exec:cat");
  CHECK(e.kind == ScorerKind::external);
  CHECK(e.endpoint == "exec:cat");
  CHECK(e.describe() == "external:exec:cat");
  for (const char* bad : {"feature", "constant:x", "constant:2", "external:", "magic"}) {
    try {
      parse_scorer_spec(bad);
      FAIL("expected an error for " << bad);
    } catch (const Error& err) {
      CHECK(err.kind() == ErrorKind::usage);
    }
  }
}

TEST_CASE("model files round-trip exactly") {
  const auto m = ScorerModel::feature({0.1, -2.5, 1e-300, 3.0, 1.0 / 3.0, -0.0, 7e10, -1.25});
  std::stringstream buf;
  write_model(buf, m);
  CHECK(buf.str().rfind("# threadloom feature scorer\n", 0) == 0);
  const auto back = read_model(buf);
  CHECK(back.kind == ScorerKind::feature);
  CHECK(back.weights == m.weights);

  std::istringstream missing("cosine_tfidf 1\n");
  CHECK_THROWS_AS(read_model(missing), Error);
  std::istringstream junk("cosine_tfidf one\n");
  CHECK_THROWS_AS(read_model(junk), Error);
  std::stringstream out;
  CHECK_THROWS_AS(write_model(out, ScorerModel::oracle()), Error);
  CHECK_THROWS_AS(ScorerModel::feature({1.0, 2.0}).validate(), Error);
}

TEST_CASE("training on separable synthetic data beats chance") {
  SynthOptions o;
  o.n_threads = 15;
  const Corpus c = synth_corpus(o);
  const auto pairs = kernels::corpus_pairs(c);
  const auto feats = kernels::pair_features(c, pairs);
  std::vector<LabeledFeatures> train;
  for (std::size_t i = 0; i < pairs.size(); ++i) train.push_back({feats[i], *pairs[i].label});
  const auto model = train_feature_scorer(train, TrainConfig{});
  CHECK(model.weights.size() == kFeatureCount);
  const auto scores = kernels::pair_scores(model, c, pairs);
  long long correct = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    correct += (scores[i] >= 0.5) == (*pairs[i].label == PairLabel::True);
  }
  CHECK(static_cast<double>(correct) / static_cast<double>(pairs.size()) > 0.95);
  // content overlap carries the signal
  CHECK(model.weights[static_cast<std::size_t>(Feature::jaccard_content)] > 0.0);
}

TEST_CASE("bias is exempt from the penalty at full feature width") {
  std::vector<std::vector<double>> rows(20, std::vector<double>(kFeatureCount, 0.0));
  std::vector<PairLabel> labels(20, PairLabel::True);
  for (auto& r : rows) r[kBiasIndex] = 1.0;
  TrainConfig heavy;
  heavy.l2 = 10.0;
  const auto m = train_feature_scorer(rows, labels, heavy);
  // an unpenalized intercept is free to keep growing toward the all-True labels
  CHECK(m.weights[kBiasIndex] > 2.0);
}
