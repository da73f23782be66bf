#include <unordered_map>

#include "threadloom/error.hpp"
#include "threadloom/kernels.hpp"

namespace threadloom::detail {

ThreadGroups group_by_thread(const Corpus& corpus, std::span<const PairExample> pairs) {
  std::unordered_map<std::string_view, const Thread*> by_id;
  for (const Thread& t : corpus.threads) by_id.emplace(t.id, &t);

  ThreadGroups groups;
  std::unordered_map<const Thread*, std::size_t> slot;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    auto it = by_id.find(pairs[i].thread_id);
    if (it == by_id.end()) {
      throw data_error("pair " + pairs[i].pair_id() + " names a thread missing from the corpus");
    }
    auto [s, inserted] = slot.emplace(it->second, groups.threads.size());
    if (inserted) {
      groups.threads.push_back(it->second);
      groups.members.emplace_back();
    }
    groups.members[s->second].push_back(i);
  }
  return groups;
}

std::vector<double> external_pair_scores(const ScorerModel& model,
                                         std::span<const PairExample> pairs) {
  model.validate();
  if (pairs.empty()) return {};
  std::vector<PromptedExample> prompted;
  prompted.reserve(pairs.size());
  for (const auto& p : pairs) prompted.push_back(render_prompt(model.prompt, p));
  std::vector<double> out;
  out.reserve(pairs.size());
  for (const auto& s : external_score_batch(model.endpoint, prompted, model.external_options)) {
    out.push_back(s.score);
  }
  return out;
}

}  // namespace threadloom::detail
