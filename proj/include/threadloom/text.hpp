#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace threadloom {

// Lowercases ASCII letters and splits on every byte that is not an ASCII
// letter or digit. Bytes >= 0x80 count as word characters so UTF-8 words
// survive intact. Empty tokens are dropped.
std::vector<std::string> tokenize(std::string_view text);

bool is_stopword(std::string_view token);

// Distinct non-stopword tokens.
std::set<std::string> content_words(std::string_view text);

// The stopword list, in the order the synthetic generator draws from it.
const std::vector<std::string>& stopwords();

}  // namespace threadloom
