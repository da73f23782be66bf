#include <exception>
#include <mutex>

#include "threadloom/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace threadloom::kernels {

namespace {

// Runs body(i) for i in [0, n) across the OpenMP team. The first exception
// thrown by any iteration is rethrown on the calling thread.
template <typename Body>
void parallel_for(std::size_t n, Body&& body) {
  std::exception_ptr error;
  std::mutex error_mutex;
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace

int max_workers() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

std::vector<PairExample> corpus_pairs(const Corpus& corpus) {
  const std::size_t n_threads = corpus.threads.size();
  std::vector<std::size_t> offsets(n_threads + 1, 0);
  for (std::size_t t = 0; t < n_threads; ++t) {
    const auto n = static_cast<std::size_t>(corpus.threads[t].size());
    offsets[t + 1] = offsets[t] + n * (n > 0 ? n - 1 : 0) / 2;
  }
  std::vector<PairExample> out(offsets.back());
  parallel_for(n_threads, [&](std::size_t t) {
    auto pairs = generate_pairs(corpus.threads[t]);
    std::move(pairs.begin(), pairs.end(), out.begin() + static_cast<std::ptrdiff_t>(offsets[t]));
  });
  return out;
}

std::vector<FeatureVector> pair_features(const Corpus& corpus,
                                         std::span<const PairExample> pairs) {
  const auto groups = detail::group_by_thread(corpus, pairs);
  std::vector<FeatureVector> out(pairs.size());
  parallel_for(groups.threads.size(), [&](std::size_t g) {
    const ThreadFeatures ctx(*groups.threads[g]);
    for (std::size_t i : groups.members[g]) {
      out[i] = ctx.extract(pairs[i].earlier_index, pairs[i].later_index);
    }
  });
  return out;
}

std::vector<double> pair_scores(const ScorerModel& model, const Corpus& corpus,
                                std::span<const PairExample> pairs) {
  if (model.kind == ScorerKind::external) return detail::external_pair_scores(model, pairs);
  model.validate();
  const auto groups = detail::group_by_thread(corpus, pairs);
  std::vector<double> out(pairs.size());
  parallel_for(groups.threads.size(), [&](std::size_t g) {
    std::vector<PairExample> subset;
    subset.reserve(groups.members[g].size());
    for (std::size_t i : groups.members[g]) subset.push_back(pairs[i]);
    const auto scores = score_thread_pairs(model, *groups.threads[g], subset);
    for (std::size_t k = 0; k < subset.size(); ++k) out[groups.members[g][k]] = scores[k];
  });
  return out;
}

std::vector<ReplyTree> reconstruct_trees(const Corpus& corpus, const ScorerModel& model,
                                         double threshold) {
  validate_threshold(threshold);
  if (model.kind == ScorerKind::external) {
    return reference::reconstruct_trees(corpus, model, threshold);
  }
  model.validate();
  std::vector<ReplyTree> out(corpus.threads.size());
  parallel_for(corpus.threads.size(), [&](std::size_t t) {
    out[t] = reconstruct_tree(corpus.threads[t], model, threshold);
  });
  return out;
}

}  // namespace threadloom::kernels
