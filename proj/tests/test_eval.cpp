#include <algorithm>

#include "doctest.h"
#include "json.hpp"
#include "oracles.hpp"
#include "threadloom/error.hpp"
#include "threadloom/eval.hpp"
#include "threadloom/reference.hpp"
#include "threadloom/synth.hpp"

using namespace threadloom;

TEST_CASE("a hand-computed confusion") {
  const PairSet universe = {{1, 2}, {1, 3}, {2, 3}};
  const PairSet gold = {{1, 2}, {2, 3}};
  const PairSet predicted = {{1, 2}, {1, 3}};
  const Metrics m = evaluate_pairs(predicted, gold, universe);
  CHECK(m == Metrics{1, 1, 1, 0});
  CHECK(m.precision() == 0.5);
  CHECK(m.recall() == 0.5);
  CHECK(m.f1() == 0.5);
}

TEST_CASE("zero denominators give zero") {
  const Metrics none = evaluate_pairs({}, {}, {{1, 2}});
  CHECK(none.precision() == 0.0);
  CHECK(none.recall() == 0.0);
  CHECK(none.f1() == 0.0);
  CHECK(Metrics{}.f1() == 0.0);
  CHECK_THROWS_AS(evaluate_pairs({{1, 3}}, {}, {{1, 2}}), Error);
  CHECK_THROWS_AS(evaluate_pairs({}, {{1, 3}}, {{1, 2}}), Error);
}

TEST_CASE("metrics agree with brute force on every small configuration") {
  const std::vector<PostPair> all = {{1, 2}, {1, 3}, {2, 3}, {1, 4}, {2, 4}};
  for (std::size_t size = 0; size <= all.size(); ++size) {
    const std::vector<PostPair> universe(all.begin(), all.begin() + static_cast<long>(size));
    const unsigned subsets = 1u << size;
    std::vector<int> ids;
    for (std::size_t i = 0; i < size; ++i) ids.push_back(static_cast<int>(i));
    for (unsigned p = 0; p < subsets; ++p) {
      for (unsigned g = 0; g < subsets; ++g) {
        PairSet pred, gold, uni(universe.begin(), universe.end());
        std::set<int> pi, gi;
        for (std::size_t i = 0; i < size; ++i) {
          if (p >> i & 1u) pred.insert(universe[i]), pi.insert(static_cast<int>(i));
          if (g >> i & 1u) gold.insert(universe[i]), gi.insert(static_cast<int>(i));
        }
        const Metrics m = evaluate_pairs(pred, gold, uni);
        const auto c = oracle::confusion(ids, pi, gi);
        CHECK(m == Metrics{c.tp, c.fp, c.fn, c.tn});
        const auto expect = oracle::prf(c);
        CHECK(m.precision() == doctest::Approx(expect[0]));
        CHECK(m.recall() == doctest::Approx(expect[1]));
        CHECK(m.f1() == doctest::Approx(expect[2]));
      }
    }
  }
}

TEST_CASE("a constant 1.0 classifier has full recall and precision equal to the base rate") {
  SynthOptions o;
  o.n_threads = 8;
  const Corpus c = synth_corpus(o);
  const auto r = evaluate_method(c, parse_method("classify", ScorerModel::constant(1.0), 0.5));
  long long pairs = 0, positives = 0;
  for (const auto& t : c.threads) {
    pairs += t.size() * (t.size() - 1) / 2;
    positives += t.size() - 1;
  }
  CHECK(r.total.recall() == 1.0);
  CHECK(r.total.precision() == doctest::Approx(static_cast<double>(positives) / pairs));
  CHECK(r.total.total() == pairs);
}

TEST_CASE("baselines and oracles on shaped corpora") {
  SynthOptions o;
  o.shape = TreeShape::chain;
  const Corpus chain = synth_corpus(o);
  const ScorerModel none = ScorerModel::constant(0.5);
  CHECK(evaluate_method(chain, parse_method("lr", none, 0.5)).total.f1() == 1.0);
  o.shape = TreeShape::star;
  const Corpus star = synth_corpus(o);
  CHECK(evaluate_method(star, parse_method("co", none, 0.5)).total.f1() == 1.0);
  o.shape = TreeShape::random;
  const Corpus mixed = synth_corpus(o);
  for (const char* m : {"oracle", "oracle-tree"}) {
    const auto r = evaluate_method(mixed, parse_method(m, none, 0.5));
    CHECK(r.total.precision() == 1.0);
    CHECK(r.total.recall() == 1.0);
    CHECK(r.name == m);
    CHECK(r.scorer == "oracle");
  }
}

TEST_CASE("a restricted universe only counts its own pairs") {
  SynthOptions o;
  o.n_threads = 4;
  const Corpus c = synth_corpus(o);
  auto pairs = generate_pairs(c.threads[1]);
  pairs.resize(5);
  const auto r = evaluate_method(c, parse_method("co", ScorerModel::constant(0.5), 0.5),
                                 std::span<const PairExample>(pairs));
  CHECK(r.total.total() == 5);
  // (1,2)..(1,5) are CO links; (1,6) is the fifth pair
  CHECK(r.total.tp + r.total.fp == 5);

  PairExample stray = pairs.front();
  stray.thread_id = "missing";
  std::vector<PairExample> bad = {stray};
  CHECK_THROWS_AS(evaluate_method(c, parse_method("lr", ScorerModel::constant(0.5), 0.5),
                                  std::span<const PairExample>(bad)),
                  Error);
}

TEST_CASE("evaluation needs gold trees") {
  SynthOptions o;
  o.n_threads = 2;
  Corpus c = synth_corpus(o);
  c.threads[1].gold_parents.reset();
  try {
    evaluate_method(c, parse_method("co", ScorerModel::constant(0.5), 0.5));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::data);
  }
  CHECK_THROWS_AS(parse_method("magic", ScorerModel::constant(0.5), 0.5), Error);
  CHECK_THROWS_AS(parse_method("co", ScorerModel::constant(0.5), -1.0), Error);
}

TEST_CASE("per-source metrics sum to the total") {
  SynthOptions o;
  o.n_threads = 30;
  const Corpus c = synth_corpus(o);
  const auto r = evaluate_method(c, parse_method("lr", ScorerModel::constant(0.5), 0.5));
  Metrics sum;
  for (const auto& [_, m] : r.per_source) sum += m;
  CHECK(sum == r.total);
  CHECK(r.per_source.size() > 1);
}

TEST_CASE("report rendering") {
  SynthOptions o;
  o.n_threads = 3;
  const Corpus c = synth_corpus(o);
  const std::vector<Method> methods = {parse_method("co", ScorerModel::constant(0.5), 0.5),
                                       parse_method("oracle-tree", ScorerModel::constant(0.5), 0.5)};
  const auto report = evaluate(c, methods, 42);
  const auto table = render_report_table(report, true);
  CHECK(table.rfind("dataset: synth  seed: 42\n", 0) == 0);
  CHECK(table.find("oracle-tree") != std::string::npos);
  CHECK(table.find("1.000") != std::string::npos);

  const auto records = render_report_records(report, false);
  std::size_t lines = 0;
  for (char ch : records) lines += ch == '\n';
  CHECK(lines == 2);
  const auto first = nlohmann::json::parse(records.substr(0, records.find('\n')));
  CHECK(first["method"] == "co");
  CHECK(first["source"] == "all");
  CHECK_FALSE(first.contains("scorer"));
}

TEST_CASE("published reference rows") {
  const auto& rows = reference_results();
  CHECK(rows.size() == 40);
  auto find = [&](std::string_view dataset, std::string_view method, std::string_view model) {
    auto it = std::find_if(rows.begin(), rows.end(), [&](const ReferenceRow& r) {
      return r.dataset == dataset && r.method == method && r.model == model;
    });
    REQUIRE(it != rows.end());
    return *it;
  };
  const auto lr = find("Reddit", "LR", "-");
  CHECK(lr.precision == 0.72);
  CHECK(lr.recall == 0.12);
  CHECK(lr.f1 == 0.20);
  CHECK(find("Forum2", "NPP-IP", "BE-B").f1 == 0.67);
  CHECK(find("Forum3", "CO", "-").precision == 0.12);

  EvalReport report;
  report.dataset = "synth";
  const auto text = compare_with_reference(report, rows);
  CHECK(text.find("published*") != std::string::npos);
  CHECK(text.find("not used as targets") != std::string::npos);
}
