#include <algorithm>

#include "doctest.h"
#include "threadloom/kernels.hpp"
#include "threadloom/synth.hpp"

using namespace threadloom;

namespace {

Corpus corpus(std::uint64_t seed) {
  SynthOptions o;
  o.seed = seed;
  o.n_threads = 25;
  o.min_posts = 1;
  o.max_posts = 30;
  return synth_corpus(o);
}

}  // namespace

TEST_CASE("parallel kernels match the serial reference") {
  INFO("workers: " << kernels::max_workers());
  CHECK(kernels::max_workers() >= 1);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const Corpus c = corpus(seed);
    const auto pairs = kernels::corpus_pairs(c);
    CHECK(pairs == reference::corpus_pairs(c));

    const auto feats = kernels::pair_features(c, pairs);
    CHECK(feats == reference::pair_features(c, pairs));

    std::vector<double> w = {2.0, 3.0, 1.0, 0.5, 0.25, -0.5, -0.1, -2.0};
    for (const auto& model : {ScorerModel::feature(w), ScorerModel::oracle(),
                              ScorerModel::constant(0.3)}) {
      CHECK(kernels::pair_scores(model, c, pairs) == reference::pair_scores(model, c, pairs));
      CHECK(kernels::reconstruct_trees(c, model, 0.5) == reference::reconstruct_trees(c, model, 0.5));
    }
  }
}

TEST_CASE("kernels accept pairs from threads in any order") {
  const Corpus c = corpus(4);
  auto pairs = kernels::corpus_pairs(c);
  std::reverse(pairs.begin(), pairs.end());
  const ScorerModel m = ScorerModel::feature({1, 1, 1, 1, 1, 1, 1, -3});
  CHECK(kernels::pair_scores(m, c, pairs) == reference::pair_scores(m, c, pairs));
  CHECK(kernels::pair_features(c, pairs) == reference::pair_features(c, pairs));
}

TEST_CASE("kernel errors surface on the calling thread") {
  Corpus c = corpus(5);
  c.threads[3].gold_parents.reset();
  const auto pairs = kernels::corpus_pairs(c);
  CHECK_THROWS_AS(kernels::pair_scores(ScorerModel::oracle(), c, pairs), Error);
  CHECK_THROWS_AS(kernels::reconstruct_trees(c, ScorerModel::oracle(), 0.5), Error);
  auto stray = pairs;
  stray[0].thread_id = "nope";
  CHECK_THROWS_AS(kernels::pair_features(c, stray), Error);
}

TEST_CASE("external scoring through the kernels uses one batch") {
  const Corpus c = corpus(6);
  const auto pairs = kernels::corpus_pairs(c);
  const auto model = ScorerModel::external(std::string("exec:") + ECHO_SCORER_PATH + " --score 0.9");
  const auto scores = kernels::pair_scores(model, c, pairs);
  CHECK(scores == std::vector<double>(pairs.size(), 0.9));
  CHECK(scores == reference::pair_scores(model, c, pairs));
}
