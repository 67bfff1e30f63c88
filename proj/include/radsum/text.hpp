#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace radsum {

enum class Casing { original, lowercased };

/// Ordered word tokens. No token is empty or contains whitespace.
struct TokenSequence {
  std::vector<std::string> tokens;
  Casing casing = Casing::original;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
  bool operator==(const TokenSequence&) const = default;
};

/// Whitespace split, then leading and trailing characters from
/// .,;:!?()[]{}"'/ are peeled off into single-character tokens. Interior
/// hyphens, apostrophes and digits stay inside the word.
TokenSequence word_tokenize(std::string_view text);

TokenSequence lowercase(TokenSequence seq);
std::string to_lower(std::string_view text);
std::string join(std::span<const std::string> tokens, std::string_view sep = " ");

bool is_space(char c);
std::string_view trim(std::string_view text);

/// Default abbreviation list for sentence_split. "no." is deliberately absent.
const std::vector<std::string>& default_abbreviations();

/// Rule-based sentencizer. A whitespace-delimited chunk ending in . ! or ?
/// (optionally followed by closing quotes/brackets) ends a sentence unless it
/// is a listed abbreviation or a bare enumerator such as "2.". Sentences are
/// trimmed substrings of the input, never empty.
std::vector<std::string> sentence_split(std::string_view text);
std::vector<std::string> sentence_split(std::string_view text,
                                        std::span<const std::string> abbreviations);

}  // namespace radsum
