#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

// Small text utilities shared by corpus and featurize. Text is UTF-8; only
// ASCII letters are case-folded, other code points pass through untouched.
namespace stylos::text {

// A byte belongs to a word if it is an ASCII letter or part of a multi-byte
// UTF-8 sequence (accented Latin letters and the like).
inline bool is_word_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

inline bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::string ascii_lower(std::string_view s);

// Trim and replace every whitespace run by a single ' '.
std::string collapse_whitespace(std::string_view s);

// Maximal runs of word bytes, lowercased.
std::vector<std::string> word_tokens(std::string_view s);

// Number of UTF-8 code points in `s`.
std::size_t codepoint_length(std::string_view s);

// Byte offsets of every code point start, plus s.size() as a sentinel.
std::vector<std::size_t> codepoint_offsets(std::string_view s);

std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL);

std::string hex64(std::uint64_t v);

}  // namespace stylos::text
