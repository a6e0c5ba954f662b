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

#ifndef JSCONFORM_JS_LEXER_H_
#define JSCONFORM_JS_LEXER_H_

#include <cstddef>
#include <string>

#include "absl/status/status.h"
#include "absl/strings/string_view.h"

namespace jsconform::js {

enum class TokenKind {
  kEof,
  kIdentifier,  // includes reserved words; the parser decides
  kPunctuator,
  kNumber,
  kString,
  kTemplate,  // a template chunk; `template_tail` tells whether it closes
  kRegExp,
  kPrivateName,
};

struct Token {
  TokenKind kind = TokenKind::kEof;
  size_t begin = 0;
  size_t end = 0;
  absl::string_view text;
  bool newline_before = false;
  double number = 0;
  std::string value;  // decoded string literal / template cooked text
  bool template_tail = false;
};

// On-demand tokenizer. The parser drives regex and template rescans since
// only it knows the syntactic context.
class Lexer {
 public:
  explicit Lexer(absl::string_view source) : src_(source) {}

  // Scans the token starting at the current position.
  absl::Status Next(Token& out);
  // Rescans a '/' or '/=' punctuator token as a regular expression literal.
  absl::Status RescanRegExp(Token& tok);
  // Continues a template after the '}' that closes a substitution; `tok`
  // is that '}' token.
  absl::Status RescanTemplateContinuation(Token& tok);

  size_t position() const { return pos_; }
  void Reset(size_t pos) { pos_ = pos; }
  std::string Location(size_t offset) const;

 private:
  absl::Status SkipTrivia(bool& newline);
  absl::Status ScanString(Token& out, char quote);
  absl::Status ScanTemplateChunk(Token& out);
  absl::Status ScanNumber(Token& out);
  absl::Status ScanEscape(std::string& out, bool in_template);
  absl::Status Error(size_t at, absl::string_view what) const;

  absl::string_view src_;
  size_t pos_ = 0;
};

void AppendUtf8(std::string& out, uint32_t cp);

}  // namespace jsconform::js

#endif  // JSCONFORM_JS_LEXER_H_
