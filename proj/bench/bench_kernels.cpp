// Times the corpus-wide kernels against their serial reference.
//
//   bench_kernels [threads=400] [repeats=3]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>

#include "threadloom/kernels.hpp"
#include "threadloom/synth.hpp"

using namespace threadloom;

namespace {

double best_of(int repeats, const std::function<void()>& fn) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (s < best) best = s;
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  SynthOptions o;
  o.n_threads = argc > 1 ? std::atoi(argv[1]) : 400;
  const int repeats = argc > 2 ? std::atoi(argv[2]) : 3;
  o.min_posts = 10;
  o.max_posts = 40;
  const Corpus c = synth_corpus(o);
  const auto pairs = kernels::corpus_pairs(c);
  const ScorerModel model = ScorerModel::feature({2.0, 3.0, 1.0, 0.5, 0.25, -0.5, -0.1, -2.0});

  std::printf("threads=%d pairs=%zu workers=%d\n", o.n_threads, pairs.size(), kernels::max_workers());
  std::printf("%-18s %12s %12s %8s\n", "kernel", "reference_s", "parallel_s", "speedup");
  auto row = [&](const char* name, const std::function<void()>& ref, const std::function<void()>& par) {
    const double a = best_of(repeats, ref);
    const double b = best_of(repeats, par);
    std::printf("%-18s %12.4f %12.4f %8.2f\n", name, a, b, b > 0 ? a / b : 0.0);
  };
  row("corpus_pairs", [&] { reference::corpus_pairs(c); }, [&] { kernels::corpus_pairs(c); });
  row("pair_features", [&] { reference::pair_features(c, pairs); },
      [&] { kernels::pair_features(c, pairs); });
  row("pair_scores", [&] { reference::pair_scores(model, c, pairs); },
      [&] { kernels::pair_scores(model, c, pairs); });
  row("reconstruct_trees", [&] { reference::reconstruct_trees(c, model, 0.5); },
      [&] { kernels::reconstruct_trees(c, model, 0.5); });
  return 0;
}
