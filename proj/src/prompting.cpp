#include "threadloom/prompting.hpp"

#include <array>
#include <fstream>
#include <sstream>
#include <ostream>
#include <utility>

#include "json.hpp"
#include "threadloom/error.hpp"

namespace threadloom {

namespace {

constexpr std::array<std::pair<FramingTechnique, std::string_view>, 5>
    kFramingNames = {{
        {FramingTechnique::low_level_patterns, "low-level-patterns"},
        {FramingTechnique::itemized, "itemized"},
        {FramingTechnique::break_it_down, "break-it-down"},
        {FramingTechnique::enforce_constraints, "enforce-constraints"},
        {FramingTechnique::specialize, "specialize"},
    }};

constexpr std::string_view kInstruction =
    "Task Description:\n"
    "You are given two posts and you need to generate True if they are the "
    "direct reply relation, otherwise generate False.\n"
    "Positive Example:\n"
    "post1: Windows Defender Gets a New Name: Microsoft Defender\n"
    "post2: Bring back MSE and its ui even logo looks cool...\n"
    "output: True\n"
    "Negative Example:\n"
    "post1: Windows Defender Gets a New Name: Microsoft Defender\n"
    "post2: Title says it\n"
    "output: False";

}  // namespace

std::string_view framing_name(FramingTechnique t) {
  for (const auto& [tech, name] : kFramingNames) {
    if (tech == t) return name;
  }
  return "unknown";
}

std::optional<FramingTechnique> parse_framing(std::string_view name) {
  for (const auto& [tech, n] : kFramingNames) {
    if (n == name) return tech;
  }
  return std::nullopt;
}

void PromptTemplate::validate() const {
  if (separator.empty()) throw usage_error("prompt separator must be nonempty");
}

void PromptTemplate::validate_instructed() const {
  validate();
  if (instruction.empty()) throw usage_error("prompt instruction must be nonempty");
}

std::string_view default_instruction() { return kInstruction; }

PromptTemplate default_template() {
  PromptTemplate t;
  t.instruction = std::string(kInstruction);
  for (const auto& [tech, name] : kFramingNames) t.framing_tags.insert(tech);
  return t;
}

std::string load_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

PromptTemplate plain_template() { return PromptTemplate{}; }

PromptedExample render_prompt(const PromptTemplate& tmpl, const PairExample& pair) {
  tmpl.validate();
  if (pair.earlier_text.empty() || pair.later_text.empty()) {
    throw data_error("pair " + pair.pair_id() + " has an empty post text");
  }
  PromptedExample out;
  out.pair = pair;
  out.label = pair.label;
  std::string& text = out.text;
  text.reserve(tmpl.instruction.size() + pair.earlier_text.size() +
               pair.later_text.size() + tmpl.separator.size() + 20);
  if (!tmpl.instruction.empty()) {
    text += tmpl.instruction;
    text += '\n';
  }
  text += "post1: ";
  text += pair.earlier_text;
  text += '\n';
  text += tmpl.separator;
  text += "\npost2: ";
  text += pair.later_text;
  return out;
}

PromptedExample render_plain(const PairExample& pair) {
  return render_prompt(plain_template(), pair);
}

void write_prompted(std::ostream& out, const std::vector<PromptedExample>& items) {
  for (const auto& item : items) {
    nlohmann::ordered_json obj;
    obj["pair_id"] = item.pair_id();
    obj["text"] = item.text;
    if (item.label) obj["label"] = *item.label == PairLabel::True;
    out << obj.dump() << '\n';
  }
}

}  // namespace threadloom
