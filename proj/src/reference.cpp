#include "threadloom/reference.hpp"

#include <algorithm>
#include <cstdio>

namespace threadloom {

namespace {

std::string two(double v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string three(double v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

struct ForumCells {
  const char* method;
  const char* model;
  double cells[3][3];  // Forum1..3 x (P, R, F1)
};

}  // namespace

const ReferenceResults& reference_results() {
  static const ReferenceResults rows = [] {
    ReferenceResults r = {
        {"Reddit", "CO", "-", 0.00, 1.00, 0.01},
        {"Reddit", "LR", "-", 0.72, 0.12, 0.20},
        {"Reddit", "NPP", "BE-B", 0.42, 0.46, 0.44},
        {"Reddit", "NPP", "BE-L", 0.36, 0.51, 0.42},
        {"Reddit", "NPP", "RB-B", 0.59, 0.33, 0.43},
        {"Reddit", "NPP", "RB-L", 0.41, 0.58, 0.48},
        {"Reddit", "NPP-IP", "BE-B", 0.48, 0.46, 0.47},
        {"Reddit", "NPP-IP", "BE-L", 0.64, 0.41, 0.50},
        {"Reddit", "NPP-IP", "RB-B", 0.62, 0.43, 0.51},
        {"Reddit", "NPP-IP", "RB-L", 0.39, 0.56, 0.46},
    };
    const ForumCells forums[] = {
        {"CO", "-", {{0.31, 1.00, 0.47}, {0.27, 1.00, 0.43}, {0.12, 1.00, 0.21}}},
        {"LR", "-", {{0.50, 0.00, 0.01}, {0.50, 0.09, 0.16}, {0.50, 0.13, 0.21}}},
        {"NPP", "BE-B", {{0.40, 0.37, 0.39}, {0.37, 0.61, 0.46}, {0.33, 0.65, 0.44}}},
        {"NPP", "BE-L", {{0.94, 0.27, 0.41}, {0.50, 0.34, 0.41}, {0.50, 0.33, 0.40}}},
        {"NPP", "RB-B", {{0.59, 0.38, 0.46}, {0.29, 0.50, 0.37}, {0.48, 0.43, 0.41}}},
        {"NPP", "RB-L", {{0.54, 0.55, 0.54}, {0.55, 0.58, 0.54}, {0.45, 0.40, 0.41}}},
        {"NPP-IP", "BE-B", {{0.55, 0.39, 0.45}, {0.71, 0.63, 0.67}, {0.61, 0.56, 0.58}}},
        {"NPP-IP", "BE-L", {{0.70, 0.43, 0.53}, {0.85, 0.31, 0.45}, {0.61, 0.60, 0.57}}},
        {"NPP-IP", "RB-B", {{0.50, 0.37, 0.42}, {0.52, 0.58, 0.48}, {0.53, 0.84, 0.46}}},
        {"NPP-IP", "RB-L", {{0.50, 0.87, 0.43}, {0.50, 0.34, 0.41}, {0.50, 0.33, 0.40}}},
    };
    for (int f = 0; f < 3; ++f) {
      const std::string dataset = "Forum" + std::to_string(f + 1);
      for (const auto& row : forums) {
        r.push_back({dataset, row.method, row.model, row.cells[f][0], row.cells[f][1],
                     row.cells[f][2]});
      }
    }
    return r;
  }();
  return rows;
}

std::string compare_with_reference(const EvalReport& report,
                                   const ReferenceResults& reference) {
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"origin", "dataset", "method", "model", "P", "R", "F1"});
  for (const auto& m : report.methods) {
    rows.push_back({"ours", report.dataset, m.name, m.scorer.empty() ? "-" : m.scorer,
                    three(m.total.precision()), three(m.total.recall()), three(m.total.f1())});
  }
  for (const auto& r : reference) {
    rows.push_back({"published*", r.dataset, r.method, r.model, two(r.precision), two(r.recall),
                    two(r.f1)});
  }

  std::vector<std::size_t> width(rows.front().size(), 0);
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::string out;
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      line += row[c];
      if (c + 1 < row.size()) line += std::string(width[c] - row[c].size() + 2, ' ');
    }
    out += line + "\n";
  }
  out +=
      "* published figures on private datasets; shown for context, not reproduced and not "
      "used as targets.\n";
  return out;
}

}  // namespace threadloom
