// Copyright 2026 The jsconform Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "js/lexer.h"

#include <array>
#include <cmath>
#include <cstdlib>
#include <string>

#include "absl/strings/str_cat.h"

namespace jsconform::js {
namespace {

bool IsIdStart(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' ||
         c == '$' || c >= 0x80;
}

bool IsIdPart(unsigned char c) { return IsIdStart(c) || (c >= '0' && c <= '9'); }

bool IsDigit(char c) { return c >= '0' && c <= '9'; }

int HexValue(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

// Longest punctuators first.
constexpr std::array<absl::string_view, 52> kPunctuators = {
    ">>>=", "...", "===", "!==", "**=", "<<=", ">>=", ">>>", "&&=", "||=",
    "?\?=",  "=>",  "==",  "!=",  "<=",  ">=",  "&&",  "||",  "??",  "?.",
    "++",   "--",  "+=",  "-=",  "*=",  "/=",  "%=",  "&=",  "|=",  "^=",
    "**",   "<<",  ">>",  "{",   "}",   "(",   ")",   "[",   "]",   ";",
    ",",    "<",   ">",   "+",   "-",   "*",   "/",   "%",   "&",   "|",
    "^",    "!",
};

// U+2028 / U+2029 in UTF-8.
bool IsUnicodeLineTerminator(absl::string_view s, size_t i) {
  return i + 2 < s.size() + 0 && static_cast<unsigned char>(s[i]) == 0xE2 &&
         static_cast<unsigned char>(s[i + 1]) == 0x80 &&
         (static_cast<unsigned char>(s[i + 2]) == 0xA8 ||
          static_cast<unsigned char>(s[i + 2]) == 0xA9);
}

}  // namespace

void AppendUtf8(std::string& out, uint32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string Lexer::Location(size_t offset) const {
  size_t line = 1, col = 1;
  for (size_t i = 0; i < offset && i < src_.size(); ++i) {
    if (src_[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return absl::StrCat(line, ":", col);
}

absl::Status Lexer::Error(size_t at, absl::string_view what) const {
  return absl::InvalidArgumentError(
      absl::StrCat("SyntaxError at ", Location(at), ": ", what));
}

absl::Status Lexer::SkipTrivia(bool& newline) {
  while (pos_ < src_.size()) {
    char c = src_[pos_];
    if (c == '\n' || c == '\r') {
      newline = true;
      ++pos_;
    } else if (c == ' ' || c == '\t' || c == '\v' || c == '\f') {
      ++pos_;
    } else if (IsUnicodeLineTerminator(src_, pos_)) {
      newline = true;
      pos_ += 3;
    } else if (static_cast<unsigned char>(c) == 0xC2 && pos_ + 1 < src_.size() &&
               static_cast<unsigned char>(src_[pos_ + 1]) == 0xA0) {
      pos_ += 2;  // NBSP
    } else if (static_cast<unsigned char>(c) == 0xEF && pos_ + 2 < src_.size() &&
               static_cast<unsigned char>(src_[pos_ + 1]) == 0xBB &&
               static_cast<unsigned char>(src_[pos_ + 2]) == 0xBF) {
      pos_ += 3;  // BOM
    } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
      while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
    } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '*') {
      size_t close = src_.find("*/", pos_ + 2);
      if (close == absl::string_view::npos) {
        return Error(pos_, "unterminated comment");
      }
      if (src_.substr(pos_, close - pos_).find('\n') != absl::string_view::npos) {
        newline = true;
      }
      pos_ = close + 2;
    } else {
      break;
    }
  }
  return absl::OkStatus();
}

absl::Status Lexer::Next(Token& out) {
  bool newline = false;
  if (absl::Status s = SkipTrivia(newline); !s.ok()) return s;
  out = Token{};
  out.newline_before = newline;
  out.begin = pos_;
  if (pos_ >= src_.size()) {
    out.kind = TokenKind::kEof;
    out.end = pos_;
    return absl::OkStatus();
  }
  unsigned char c = static_cast<unsigned char>(src_[pos_]);
  if (IsIdStart(c) || c == '\\' || c == '#') {
    if (c == '#') {
      ++pos_;
      out.kind = TokenKind::kPrivateName;
    } else {
      out.kind = TokenKind::kIdentifier;
    }
    while (pos_ < src_.size()) {
      unsigned char d = static_cast<unsigned char>(src_[pos_]);
      if (d == '\\' && pos_ + 1 < src_.size() && src_[pos_ + 1] == 'u') {
        pos_ += 2;
        continue;
      }
      if (IsUnicodeLineTerminator(src_, pos_) || !IsIdPart(d)) break;
      ++pos_;
    }
    if (pos_ == out.begin + (out.kind == TokenKind::kPrivateName ? 1 : 0)) {
      return Error(out.begin, "unexpected character");
    }
  } else if (IsDigit(static_cast<char>(c)) ||
             (c == '.' && pos_ + 1 < src_.size() && IsDigit(src_[pos_ + 1]))) {
    if (absl::Status s = ScanNumber(out); !s.ok()) return s;
  } else if (c == '"' || c == '\'') {
    if (absl::Status s = ScanString(out, static_cast<char>(c)); !s.ok()) return s;
  } else if (c == '`') {
    ++pos_;
    if (absl::Status s = ScanTemplateChunk(out); !s.ok()) return s;
  } else {
    out.kind = TokenKind::kPunctuator;
    absl::string_view rest = src_.substr(pos_);
    size_t len = 0;
    for (absl::string_view p : kPunctuators) {
      if (rest.substr(0, p.size()) == p) {
        len = p.size();
        break;
      }
    }
    if (len == 0) {
      switch (c) {
        case '.':
        case '~':
        case '?':
        case ':':
        case '=':
        case '@':
          len = 1;
          break;
        default:
          return Error(pos_, absl::StrCat("unexpected character '",
                                          std::string(1, static_cast<char>(c)),
                                          "'"));
      }
    }
    // "?." followed by a digit is a conditional, e.g. `a?.5:b`.
    if (rest.substr(0, 2) == "?." && rest.size() > 2 && IsDigit(rest[2])) len = 1;
    pos_ += len;
  }
  out.end = pos_;
  out.text = src_.substr(out.begin, out.end - out.begin);
  return absl::OkStatus();
}

absl::Status Lexer::ScanNumber(Token& out) {
  out.kind = TokenKind::kNumber;
  size_t start = pos_;
  auto digits = [&](auto pred) {
    size_t n = 0;
    while (pos_ < src_.size() && (pred(src_[pos_]) || src_[pos_] == '_')) {
      ++pos_;
      ++n;
    }
    return n;
  };
  if (src_[pos_] == '0' && pos_ + 1 < src_.size() &&
      (src_[pos_ + 1] == 'x' || src_[pos_ + 1] == 'X' || src_[pos_ + 1] == 'o' ||
       src_[pos_ + 1] == 'O' || src_[pos_ + 1] == 'b' || src_[pos_ + 1] == 'B')) {
    char radix_char = static_cast<char>(src_[pos_ + 1] | 0x20);
    int radix = radix_char == 'x' ? 16 : radix_char == 'o' ? 8 : 2;
    pos_ += 2;
    size_t n = digits([radix](char d) {
      int v = HexValue(d);
      return v >= 0 && v < radix;
    });
    if (n == 0) return Error(start, "missing digits");
    std::string body;
    for (char d : src_.substr(start + 2, pos_ - start - 2)) {
      if (d != '_') body.push_back(d);
    }
    out.number = static_cast<double>(std::strtoull(body.c_str(), nullptr, radix));
  } else {
    digits(IsDigit);
    if (pos_ < src_.size() && src_[pos_] == 'n') {
      ++pos_;  // BigInt
    } else {
      if (pos_ < src_.size() && src_[pos_] == '.') {
        ++pos_;
        digits(IsDigit);
      }
      if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
        size_t save = pos_;
        ++pos_;
        if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
        if (digits(IsDigit) == 0) {
          pos_ = save;
          return Error(save, "malformed exponent");
        }
      }
    }
    std::string body;
    for (char d : src_.substr(start, pos_ - start)) {
      if (d != '_' && d != 'n') body.push_back(d);
    }
    out.number = std::strtod(body.c_str(), nullptr);
  }
  if (pos_ < src_.size() && IsIdStart(static_cast<unsigned char>(src_[pos_]))) {
    return Error(pos_, "identifier directly after number");
  }
  return absl::OkStatus();
}

absl::Status Lexer::ScanEscape(std::string& out, bool in_template) {
  // pos_ is just past the backslash.
  if (pos_ >= src_.size()) return Error(pos_, "unterminated escape");
  char e = src_[pos_++];
  switch (e) {
    case 'n': out.push_back('\n'); return absl::OkStatus();
    case 't': out.push_back('\t'); return absl::OkStatus();
    case 'r': out.push_back('\r'); return absl::OkStatus();
    case 'b': out.push_back('\b'); return absl::OkStatus();
    case 'f': out.push_back('\f'); return absl::OkStatus();
    case 'v': out.push_back('\v'); return absl::OkStatus();
    case '\r':
      if (pos_ < src_.size() && src_[pos_] == '\n') ++pos_;
      return absl::OkStatus();
    case '\n':
      return absl::OkStatus();
    case 'x': {
      if (pos_ + 2 > src_.size() || HexValue(src_[pos_]) < 0 ||
          HexValue(src_[pos_ + 1]) < 0) {
        return Error(pos_, "malformed \\x escape");
      }
      AppendUtf8(out, static_cast<uint32_t>(HexValue(src_[pos_]) * 16 +
                                            HexValue(src_[pos_ + 1])));
      pos_ += 2;
      return absl::OkStatus();
    }
    case 'u': {
      uint32_t cp = 0;
      if (pos_ < src_.size() && src_[pos_] == '{') {
        size_t close = src_.find('}', pos_);
        if (close == absl::string_view::npos || close == pos_ + 1) {
          return Error(pos_, "malformed \\u{} escape");
        }
        for (size_t i = pos_ + 1; i < close; ++i) {
          int v = HexValue(src_[i]);
          if (v < 0) return Error(i, "malformed \\u{} escape");
          cp = cp * 16 + static_cast<uint32_t>(v);
          if (cp > 0x10FFFF) return Error(i, "code point out of range");
        }
        pos_ = close + 1;
      } else {
        if (pos_ + 4 > src_.size()) return Error(pos_, "malformed \\u escape");
        for (int i = 0; i < 4; ++i) {
          int v = HexValue(src_[pos_ + i]);
          if (v < 0) return Error(pos_, "malformed \\u escape");
          cp = cp * 16 + static_cast<uint32_t>(v);
        }
        pos_ += 4;
        // Combine surrogate pairs written as two escapes.
        if (cp >= 0xD800 && cp <= 0xDBFF && pos_ + 6 <= src_.size() &&
            src_[pos_] == '\\' && src_[pos_ + 1] == 'u') {
          uint32_t lo = 0;
          bool ok = true;
          for (int i = 0; i < 4; ++i) {
            int v = HexValue(src_[pos_ + 2 + i]);
            if (v < 0) ok = false;
            lo = lo * 16 + static_cast<uint32_t>(v < 0 ? 0 : v);
          }
          if (ok && lo >= 0xDC00 && lo <= 0xDFFF) {
            cp = 0x10000 + ((cp - 0xD800) << 10) + (lo - 0xDC00);
            pos_ += 6;
          }
        }
      }
      AppendUtf8(out, cp);
      return absl::OkStatus();
    }
    default:
      if (e >= '0' && e <= '9') {
        if (e == '0' && !(pos_ < src_.size() && IsDigit(src_[pos_]))) {
          out.push_back('\0');
          return absl::OkStatus();
        }
        if (in_template) return Error(pos_ - 1, "octal escape in template");
        // Legacy octal escape.
        uint32_t v = static_cast<uint32_t>(e - '0');
        while (pos_ < src_.size() && src_[pos_] >= '0' && src_[pos_] <= '7' &&
               v * 8 + static_cast<uint32_t>(src_[pos_] - '0') < 256) {
          v = v * 8 + static_cast<uint32_t>(src_[pos_++] - '0');
        }
        AppendUtf8(out, v);
        return absl::OkStatus();
      }
      out.push_back(e);
      return absl::OkStatus();
  }
}

absl::Status Lexer::ScanString(Token& out, char quote) {
  out.kind = TokenKind::kString;
  ++pos_;
  while (true) {
    if (pos_ >= src_.size()) return Error(out.begin, "unterminated string");
    char c = src_[pos_];
    if (c == quote) {
      ++pos_;
      return absl::OkStatus();
    }
    if (c == '\n' || c == '\r') return Error(pos_, "newline in string literal");
    if (c == '\\') {
      ++pos_;
      if (absl::Status s = ScanEscape(out.value, false); !s.ok()) return s;
      continue;
    }
    out.value.push_back(c);
    ++pos_;
  }
}

absl::Status Lexer::ScanTemplateChunk(Token& out) {
  // pos_ is just after '`' or the closing '}' of a substitution.
  out.kind = TokenKind::kTemplate;
  while (true) {
    if (pos_ >= src_.size()) return Error(out.begin, "unterminated template");
    char c = src_[pos_];
    if (c == '`') {
      ++pos_;
      out.template_tail = true;
      return absl::OkStatus();
    }
    if (c == '$' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '{') {
      pos_ += 2;
      out.template_tail = false;
      return absl::OkStatus();
    }
    if (c == '\\') {
      ++pos_;
      if (absl::Status s = ScanEscape(out.value, true); !s.ok()) return s;
      continue;
    }
    out.value.push_back(c);
    ++pos_;
  }
}

absl::Status Lexer::RescanRegExp(Token& tok) {
  pos_ = tok.begin + 1;
  bool in_class = false;
  while (true) {
    if (pos_ >= src_.size() || src_[pos_] == '\n' || src_[pos_] == '\r') {
      return Error(tok.begin, "unterminated regular expression");
    }
    char c = src_[pos_++];
    if (c == '\\') {
      if (pos_ >= src_.size() || src_[pos_] == '\n') {
        return Error(tok.begin, "unterminated regular expression");
      }
      ++pos_;
    } else if (c == '[') {
      in_class = true;
    } else if (c == ']') {
      in_class = false;
    } else if (c == '/' && !in_class) {
      break;
    }
  }
  while (pos_ < src_.size() && IsIdPart(static_cast<unsigned char>(src_[pos_]))) {
    char f = src_[pos_];
    if (absl::string_view("dgimsuy").find(f) == absl::string_view::npos) {
      return Error(pos_, "invalid regular expression flag");
    }
    ++pos_;
  }
  tok.kind = TokenKind::kRegExp;
  tok.end = pos_;
  tok.text = src_.substr(tok.begin, tok.end - tok.begin);
  return absl::OkStatus();
}

absl::Status Lexer::RescanTemplateContinuation(Token& tok) {
  pos_ = tok.begin + 1;
  Token chunk;
  chunk.begin = tok.begin;
  chunk.newline_before = tok.newline_before;
  if (absl::Status s = ScanTemplateChunk(chunk); !s.ok()) return s;
  chunk.end = pos_;
  chunk.text = src_.substr(chunk.begin, chunk.end - chunk.begin);
  tok = std::move(chunk);
  return absl::OkStatus();
}

}  // namespace jsconform::js
