#include "card/sexpr.h"

#include <cctype>

#include "card/error.h"

namespace card {

std::string SExpr::str() const {
  if (!is_list) return atom;
  std::string out = "(";
  for (std::size_t k = 0; k < items.size(); ++k) {
    if (k) out += " ";
    out += items[k].str();
  }
  return out + ")";
}

namespace {

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  std::vector<SExpr> all() {
    std::vector<SExpr> out;
    skip();
    while (pos_ < text_.size()) {
      out.push_back(read());
      skip();
    }
    return out;
  }

 private:
  [[noreturn]] void error(const std::string& msg, int line, int col) {
    fail(ErrorKind::SyntaxError, std::to_string(line) + ":" + std::to_string(col) + ": " + msg);
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  SExpr read() {
    SExpr e;
    e.line = line_;
    e.column = col_;
    char c = text_[pos_];
    if (c == '(') {
      e.is_list = true;
      advance();
      skip();
      while (pos_ < text_.size() && text_[pos_] != ')') {
        e.items.push_back(read());
        skip();
      }
      if (pos_ >= text_.size()) error("unbalanced '('", e.line, e.column);
      advance();
      return e;
    }
    if (c == ')') error("unexpected ')'", line_, col_);
    if (c == '|') {
      advance();
      while (pos_ < text_.size() && text_[pos_] != '|') {
        e.atom += text_[pos_];
        advance();
      }
      if (pos_ >= text_.size()) error("unterminated '|'", e.line, e.column);
      advance();
      return e;
    }
    if (c == '"') {
      e.atom += c;
      advance();
      while (pos_ < text_.size() && text_[pos_] != '"') {
        e.atom += text_[pos_];
        advance();
      }
      if (pos_ >= text_.size()) error("unterminated string", e.line, e.column);
      e.atom += '"';
      advance();
      return e;
    }
    while (pos_ < text_.size()) {
      char d = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(d)) || d == '(' || d == ')' || d == ';') break;
      e.atom += d;
      advance();
    }
    return e;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace

std::vector<SExpr> read_sexprs(std::string_view text) { return Reader(text).all(); }

}  // namespace card
