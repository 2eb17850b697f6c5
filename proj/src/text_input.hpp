#pragma once

#include <charconv>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mts/error.hpp"

namespace mts::detail {

// Whitespace-separated tokens with their 1-based line numbers.
class TokenStream {
 public:
  struct Token {
    std::string_view text;
    std::size_t line;
  };

  // Lines whose first non-blank character is in comment_chars are skipped.
  explicit TokenStream(std::string_view text, std::string_view comment_chars = "") {
    std::size_t line = 1;
    std::size_t i = 0;
    bool at_line_start = true;
    while (i < text.size()) {
      const char c = text[i];
      if (c == '\n') {
        ++line;
        ++i;
        at_line_start = true;
        continue;
      }
      if (c == ' ' || c == '\t' || c == '\r') {
        ++i;
        continue;
      }
      if (at_line_start && comment_chars.find(c) != std::string_view::npos) {
        while (i < text.size() && text[i] != '\n') ++i;
        continue;
      }
      at_line_start = false;
      const std::size_t begin = i;
      while (i < text.size() && text[i] != ' ' && text[i] != '\t' && text[i] != '\r' && text[i] != '\n') ++i;
      tokens_.push_back({text.substr(begin, i - begin), line});
    }
    last_line_ = line;
  }

  bool done() const { return pos_ >= tokens_.size(); }
  const Token& peek() const { return tokens_.at(pos_); }
  std::size_t line() const { return done() ? last_line_ : tokens_[pos_].line; }

  Token next(std::string_view what) {
    if (done()) throw InputError(last_line_, "unexpected end of input, expected " + std::string(what));
    return tokens_[pos_++];
  }

  template <typename Int>
  Int next_int(std::string_view what) {
    const Token token = next(what);
    Int value{};
    auto [ptr, ec] = std::from_chars(token.text.data(), token.text.data() + token.text.size(), value);
    if (ec != std::errc{} || ptr != token.text.data() + token.text.size())
      throw InputError(token.line, "expected " + std::string(what) + ", got '" + std::string(token.text) + "'");
    return value;
  }

  void expect_done() const {
    if (!done()) throw InputError(tokens_[pos_].line, "unexpected trailing input '" + std::string(tokens_[pos_].text) + "'");
  }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::size_t last_line_ = 1;
};

}  // namespace mts::detail
