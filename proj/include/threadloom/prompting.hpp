#pragma once

#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "threadloom/pairing.hpp"

namespace threadloom {

// Prompt-design rules an instruction block can claim to follow.
enum class FramingTechnique {
  low_level_patterns,
  itemized,
  break_it_down,
  enforce_constraints,
  specialize,
};

std::string_view framing_name(FramingTechnique t);
std::optional<FramingTechnique> parse_framing(std::string_view name);

struct PromptTemplate {
  // Prepended verbatim; empty gives the plain pair rendering.
  std::string instruction;
  std::string separator = "[sep]";
  std::set<FramingTechnique> framing_tags;

  // Throws usage Error on an empty separator. An empty instruction is
  // allowed here; see validate_instructed.
  void validate() const;
  void validate_instructed() const;

  bool operator==(const PromptTemplate&) const = default;
};

// The canonical instruction block: task description, one positive and one
// negative example, outputs True/False. LF line endings, no trailing newline.
std::string_view default_instruction();

PromptTemplate default_template();

// Reads a whole file as-is (used for custom instruction blocks).
std::string load_text_file(const std::string& path);
PromptTemplate plain_template();

struct PromptedExample {
  PairExample pair;
  std::string text;
  std::optional<PairLabel> label;

  std::string pair_id() const { return pair.pair_id(); }
};

// instruction "\n" "post1: " earlier "\n" separator "\n" "post2: " later.
// The leading instruction and its newline are omitted when the instruction is
// empty. Texts are used as given. Empty post text is a data Error.
PromptedExample render_prompt(const PromptTemplate& tmpl, const PairExample& pair);

// render_prompt with plain_template().
PromptedExample render_plain(const PairExample& pair);

// Line-delimited {pair_id, text, label?}.
void write_prompted(std::ostream& out, const std::vector<PromptedExample>& items);

}  // namespace threadloom
