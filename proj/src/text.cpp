#include "radsum/text.hpp"

#include <algorithm>
#include <cctype>

namespace radsum {
namespace {

constexpr std::string_view kPeelable = ".,;:!?()[]{}\"'/";
constexpr std::string_view kClosers = "\"')]";

bool peelable(char c) { return kPeelable.find(c) != std::string_view::npos; }

template <typename Fn>
void for_each_chunk(std::string_view text, Fn&& fn) {
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > start) fn(start, i);
  }
}

bool all_digits(std::string_view s) {
  return !s.empty() &&
         std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c) != 0; });
}

bool ends_sentence(std::string_view chunk, std::span<const std::string> abbreviations) {
  std::string_view core = chunk;
  while (!core.empty() && kClosers.find(core.back()) != std::string_view::npos) {
    core.remove_suffix(1);
  }
  if (core.empty()) return false;
  char last = core.back();
  if (last != '.' && last != '!' && last != '?') return false;
  std::string lowered = to_lower(chunk);
  if (std::find(abbreviations.begin(), abbreviations.end(), lowered) != abbreviations.end()) {
    return false;
  }
  if (last == '.' && all_digits(core.substr(0, core.size() - 1))) return false;
  return true;
}

}  // namespace

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::string_view trim(std::string_view text) {
  while (!text.empty() && is_space(text.front())) text.remove_prefix(1);
  while (!text.empty() && is_space(text.back())) text.remove_suffix(1);
  return text;
}

std::string to_lower(std::string_view text) {
  std::string out(text);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string join(std::span<const std::string> tokens, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += sep;
    out += tokens[i];
  }
  return out;
}

TokenSequence word_tokenize(std::string_view text) {
  TokenSequence seq;
  for_each_chunk(text, [&](std::size_t begin, std::size_t end) {
    std::size_t lo = begin;
    std::size_t hi = end;
    while (lo < hi && peelable(text[lo])) {
      seq.tokens.emplace_back(1, text[lo]);
      ++lo;
    }
    std::size_t trail_start = hi;
    while (trail_start > lo && peelable(text[trail_start - 1])) --trail_start;
    if (trail_start > lo) seq.tokens.emplace_back(text.substr(lo, trail_start - lo));
    for (std::size_t k = trail_start; k < hi; ++k) seq.tokens.emplace_back(1, text[k]);
  });
  return seq;
}

TokenSequence lowercase(TokenSequence seq) {
  for (auto& t : seq.tokens) t = to_lower(t);
  seq.casing = Casing::lowercased;
  return seq;
}

const std::vector<std::string>& default_abbreviations() {
  static const std::vector<std::string> list = {
      "dr.", "mr.", "mrs.", "ms.", "st.", "vs.", "e.g.", "i.e.", "approx.", "fig.", "cf.",
  };
  return list;
}

std::vector<std::string> sentence_split(std::string_view text) {
  return sentence_split(text, default_abbreviations());
}

std::vector<std::string> sentence_split(std::string_view text,
                                        std::span<const std::string> abbreviations) {
  std::vector<std::string> sentences;
  std::size_t sentence_start = std::string_view::npos;
  std::size_t last_end = 0;
  for_each_chunk(text, [&](std::size_t begin, std::size_t end) {
    if (sentence_start == std::string_view::npos) sentence_start = begin;
    last_end = end;
    if (ends_sentence(text.substr(begin, end - begin), abbreviations)) {
      sentences.emplace_back(text.substr(sentence_start, end - sentence_start));
      sentence_start = std::string_view::npos;
    }
  });
  if (sentence_start != std::string_view::npos) {
    sentences.emplace_back(text.substr(sentence_start, last_end - sentence_start));
  }
  return sentences;
}

}  // namespace radsum
