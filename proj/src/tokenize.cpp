// SPDX-License-Identifier: Apache-2.0
#include "framing/tokenize.hpp"

#include <cctype>

namespace framing {

namespace {

bool is_word_byte(unsigned char c) { return std::isalnum(c) || c >= 0x80; }
bool is_space(unsigned char c) { return std::isspace(c) != 0; }

bool joins(std::string_view s, std::size_t i) {
  if (i == 0 || i + 1 >= s.size()) return false;
  const auto prev = static_cast<unsigned char>(s[i - 1]);
  const auto next = static_cast<unsigned char>(s[i + 1]);
  const char c = s[i];
  if (c == '\'' || c == '-') return is_word_byte(prev) && is_word_byte(next);
  if (c == '.' || c == ',') return std::isdigit(prev) && std::isdigit(next);
  return false;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (is_space(c)) {
      flush();
    } else if (is_word_byte(c) || (!current.empty() && joins(text, i))) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else {
      flush();
      tokens.emplace_back(1, static_cast<char>(c));
    }
  }
  flush();
  return tokens;
}

std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

}  // namespace framing
