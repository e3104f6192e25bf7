#pragma once

// Tokenizer shared by the concept and context-formula grammars. Both are
// parenthesized prefix forms over identifiers.

#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>

#include "idel/errors.hpp"

namespace idel::detail {

class SexprCursor {
 public:
  explicit SexprCursor(std::string_view text) : text_(text) {}

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool at_end() {
    skip_ws();
    return pos_ >= text_.size();
  }

  std::size_t position() const { return pos_; }

  bool peek_open() {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == '(';
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != c) {
      throw ParseError(std::string("expected '") + c + "'", pos_);
    }
    ++pos_;
  }

  // Reads a bare word; returns its start offset through `start`.
  std::string word(std::size_t& start) {
    skip_ws();
    start = pos_;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')') break;
      ++pos_;
    }
    if (start == pos_) throw ParseError("expected identifier", pos_);
    return std::string(text_.substr(start, pos_ - start));
  }

  void finish() {
    if (!at_end()) throw ParseError("trailing input", pos_);
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

inline bool is_identifier(std::string_view s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
  for (char c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  }
  return true;
}

}  // namespace idel::detail
