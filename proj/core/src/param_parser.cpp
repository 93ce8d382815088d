#include <cctype>
#include <charconv>
#include <string>

#include "driverl/reward.hpp"

namespace driverl {

namespace {

constexpr std::string_view kAssignName = "new_mpc_params";

class Cursor {
 public:
  explicit Cursor(std::string_view text, std::size_t pos = 0) : text_(text), pos_(pos) {}

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  bool peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }
  bool at_end() const { return pos_ >= text_.size(); }
  std::size_t pos() const { return pos_; }

  bool identifier(std::string& out) {
    skip_ws();
    const std::size_t start = pos_;
    if (pos_ >= text_.size()) return false;
    const char c0 = text_[pos_];
    if (!(std::isalpha(static_cast<unsigned char>(c0)) || c0 == '_')) return false;
    ++pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    out.assign(text_.substr(start, pos_ - start));
    return true;
  }

  bool key(std::string& out) {
    skip_ws();
    if (pos_ < text_.size() && (text_[pos_] == '\'' || text_[pos_] == '"')) {
      const char quote = text_[pos_++];
      if (!identifier(out)) return false;
      if (pos_ < text_.size() && text_[pos_] == quote) {
        ++pos_;
        return true;
      }
      return false;
    }
    return identifier(out);
  }

  // [+-]? (digits ('.' digits*)? | '.' digits)
  bool number(double& out) {
    skip_ws();
    const std::size_t start = pos_;
    if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
    std::size_t int_digits = 0, frac_digits = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_, ++int_digits;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_, ++frac_digits;
    }
    if (int_digits + frac_digits == 0) {
      pos_ = start;
      return false;
    }
    std::string token(text_.substr(start, pos_ - start));
    if (token.front() == '+') token.erase(0, 1);
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
    return ec == std::errc() && ptr == token.data() + token.size();
  }

 private:
  std::string_view text_;
  std::size_t pos_;
};

// Offset of the '{' of the last assignment at or after `from`, npos if none.
std::size_t last_assignment(std::string_view text, std::size_t from) {
  std::size_t found = std::string_view::npos;
  std::size_t pos = text.find(kAssignName, from);
  while (pos != std::string_view::npos) {
    Cursor c(text, pos + kAssignName.size());
    if (c.eat('=') && c.peek('{')) {
      found = c.pos();
    }
    pos = text.find(kAssignName, pos + 1);
  }
  return found;
}

ExtractionResult parse_dict(std::string_view text, std::size_t brace) {
  ExtractionResult result;
  Cursor c(text, brace);
  c.eat('{');
  if (c.eat('}')) {
    result.ok = true;
    return result;
  }
  while (true) {
    std::string key;
    if (!c.key(key)) {
      result.error = "expected a parameter name at offset " + std::to_string(c.pos());
      return result;
    }
    if (!c.eat(':')) {
      result.error = "expected ':' after '" + key + "'";
      return result;
    }
    double value = 0.0;
    if (!c.number(value)) {
      result.error = "value of '" + key + "' is not a decimal number";
      return result;
    }
    result.params[key] = value;
    if (c.eat(',')) {
      if (c.eat('}')) break;
      continue;
    }
    if (c.eat('}')) break;
    result.error = c.at_end() ? std::string("unbalanced braces") : "unexpected character at offset " + std::to_string(c.pos());
    return result;
  }
  result.ok = true;
  return result;
}

}  // namespace

ExtractionResult extract_params(std::string_view completion) {
  const std::size_t brace = last_assignment(completion, 0);
  if (brace == std::string_view::npos) {
    ExtractionResult r;
    r.error = "no new_mpc_params assignment found";
    return r;
  }
  return parse_dict(completion, brace);
}

namespace detail {

// Used by the format scorer: is there a well-formed assignment at or after `from`?
bool has_wellformed_assignment(std::string_view text, std::size_t from) {
  const std::size_t brace = last_assignment(text, from);
  return brace != std::string_view::npos && parse_dict(text, brace).ok;
}

}  // namespace detail

}  // namespace driverl
