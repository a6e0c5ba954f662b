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

// Minimal HTML tokenizer: enough structure to find headings and algorithm
// lists in the specification's rendered HTML.

#ifndef JSCONFORM_SPECDB_HTML_H_
#define JSCONFORM_SPECDB_HTML_H_

#include <map>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"

namespace jsconform::specdb {

struct HtmlEvent {
  enum class Type { kStartTag, kEndTag, kText };
  Type type = Type::kText;
  std::string name;  // lower-case tag name
  std::map<std::string, std::string> attrs;
  std::string text;  // decoded, for kText
  size_t offset = 0;
  bool self_closing = false;

  bool HasClass(absl::string_view cls) const;
};

// Fails with the byte offset of unterminated tags and comments.
absl::StatusOr<std::vector<HtmlEvent>> TokenizeHtml(absl::string_view html);

std::string DecodeEntities(absl::string_view text);

}  // namespace jsconform::specdb

#endif  // JSCONFORM_SPECDB_HTML_H_
