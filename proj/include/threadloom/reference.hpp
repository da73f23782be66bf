#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "threadloom/eval.hpp"

namespace threadloom {

// A published result row: dataset (Reddit, Forum1..3), method (CO, LR, NPP,
// NPP-IP), language-model tag ("-" for baselines) and P/R/F1 at two decimals.
struct ReferenceRow {
  std::string dataset;
  std::string method;
  std::string model;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

using ReferenceResults = std::vector<ReferenceRow>;

// Every row of the published Reddit and hacker-forum result tables.
const ReferenceResults& reference_results();

// Our metrics followed by the published rows, which are printed as context
// only and never scored against.
std::string compare_with_reference(const EvalReport& report,
                                   const ReferenceResults& reference);

}  // namespace threadloom
