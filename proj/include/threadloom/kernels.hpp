#pragma once

#include <span>
#include <vector>

#include "threadloom/corpus.hpp"
#include "threadloom/features.hpp"
#include "threadloom/pairing.hpp"
#include "threadloom/scorer.hpp"
#include "threadloom/structure.hpp"

// Corpus-wide loops. threadloom::kernels runs them with OpenMP across
// threads and pairs; threadloom::reference is the plain serial version the
// tests compare against. Both produce identical results in input order.
// External scorers are always driven as one batch from the calling thread.

namespace threadloom::kernels {

std::vector<PairExample> corpus_pairs(const Corpus& corpus);

std::vector<FeatureVector> pair_features(const Corpus& corpus,
                                         std::span<const PairExample> pairs);

std::vector<double> pair_scores(const ScorerModel& model, const Corpus& corpus,
                                std::span<const PairExample> pairs);

// One tree per thread, in corpus order.
std::vector<ReplyTree> reconstruct_trees(const Corpus& corpus, const ScorerModel& model,
                                         double threshold);

// Worker count the parallel kernels will use.
int max_workers();

}  // namespace threadloom::kernels

namespace threadloom::reference {

std::vector<PairExample> corpus_pairs(const Corpus& corpus);

std::vector<FeatureVector> pair_features(const Corpus& corpus,
                                         std::span<const PairExample> pairs);

std::vector<double> pair_scores(const ScorerModel& model, const Corpus& corpus,
                                std::span<const PairExample> pairs);

std::vector<ReplyTree> reconstruct_trees(const Corpus& corpus, const ScorerModel& model,
                                         double threshold);

}  // namespace threadloom::reference

namespace threadloom::detail {

// Pairs grouped by the thread they belong to, in order of first appearance.
struct ThreadGroups {
  std::vector<const Thread*> threads;
  std::vector<std::vector<std::size_t>> members;  // indices into the pair list
};

ThreadGroups group_by_thread(const Corpus& corpus, std::span<const PairExample> pairs);

std::vector<double> external_pair_scores(const ScorerModel& model,
                                         std::span<const PairExample> pairs);

}  // namespace threadloom::detail
