#include "threadloom/kernels.hpp"

namespace threadloom::reference {

std::vector<PairExample> corpus_pairs(const Corpus& corpus) {
  std::vector<PairExample> out;
  for (const Thread& t : corpus.threads) {
    auto pairs = generate_pairs(t);
    out.insert(out.end(), std::make_move_iterator(pairs.begin()),
               std::make_move_iterator(pairs.end()));
  }
  return out;
}

std::vector<FeatureVector> pair_features(const Corpus& corpus,
                                         std::span<const PairExample> pairs) {
  const auto groups = detail::group_by_thread(corpus, pairs);
  std::vector<FeatureVector> out(pairs.size());
  for (std::size_t g = 0; g < groups.threads.size(); ++g) {
    const ThreadFeatures ctx(*groups.threads[g]);
    for (std::size_t i : groups.members[g]) {
      out[i] = ctx.extract(pairs[i].earlier_index, pairs[i].later_index);
    }
  }
  return out;
}

std::vector<double> pair_scores(const ScorerModel& model, const Corpus& corpus,
                                std::span<const PairExample> pairs) {
  if (model.kind == ScorerKind::external) return detail::external_pair_scores(model, pairs);
  const auto groups = detail::group_by_thread(corpus, pairs);
  std::vector<double> out(pairs.size());
  for (std::size_t g = 0; g < groups.threads.size(); ++g) {
    std::vector<PairExample> subset;
    for (std::size_t i : groups.members[g]) subset.push_back(pairs[i]);
    const auto scores = score_thread_pairs(model, *groups.threads[g], subset);
    for (std::size_t k = 0; k < subset.size(); ++k) out[groups.members[g][k]] = scores[k];
  }
  return out;
}

std::vector<ReplyTree> reconstruct_trees(const Corpus& corpus, const ScorerModel& model,
                                         double threshold) {
  validate_threshold(threshold);
  std::vector<ReplyTree> out;
  if (model.kind == ScorerKind::external) {
    const auto pairs = corpus_pairs(corpus);
    const auto scores = detail::external_pair_scores(model, pairs);
    std::size_t offset = 0;
    for (const Thread& t : corpus.threads) {
      const std::size_t count = static_cast<std::size_t>(t.size()) * (t.size() - 1) / 2;
      out.push_back({t.id, choose_parents(t.size(), std::span(scores).subspan(offset, count),
                                          threshold)});
      offset += count;
    }
    return out;
  }
  for (const Thread& t : corpus.threads) out.push_back(reconstruct_tree(t, model, threshold));
  return out;
}

}  // namespace threadloom::reference
