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

#include "specdb/html.h"

#include <cctype>
#include <cstdlib>

#include "absl/strings/ascii.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "js/lexer.h"

namespace jsconform::specdb {
namespace {

struct NamedEntity {
  absl::string_view name;
  uint32_t code_point;
};

constexpr NamedEntity kEntities[] = {
    {"amp", '&'},      {"lt", '<'},       {"gt", '>'},       {"quot", '"'},
    {"apos", '\''},    {"nbsp", 0xA0},    {"infin", 0x221E}, {"le", 0x2264},
    {"ge", 0x2265},    {"ne", 0x2260},    {"minus", 0x2212}, {"ndash", 0x2013},
    {"mdash", 0x2014}, {"ldquo", 0x201C}, {"rdquo", 0x201D}, {"lsquo", 0x2018},
    {"rsquo", 0x2019}, {"times", 0xD7},   {"hellip", 0x2026}, {"sect", 0xA7},
    {"divide", 0xF7},  {"laquo", 0xAB},   {"raquo", 0xBB},   {"lceil", 0x2308}, {"rceil", 0x2309},
    {"lfloor", 0x230A}, {"rfloor", 0x230B}, {"pi", 0x3C0},
};

// Elements whose content is not markup.
bool IsRawTextElement(absl::string_view name) {
  return name == "script" || name == "style";
}

bool IsNameChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ||
         c == ':';
}

}  // namespace

bool HtmlEvent::HasClass(absl::string_view cls) const {
  auto it = attrs.find("class");
  if (it == attrs.end()) return false;
  for (absl::string_view c : absl::StrSplit(it->second, ' ', absl::SkipEmpty())) {
    if (c == cls) return true;
  }
  return false;
}

std::string DecodeEntities(absl::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '&') {
      out.push_back(text[i]);
      continue;
    }
    size_t semi = text.find(';', i);
    if (semi == absl::string_view::npos || semi - i > 10) {
      out.push_back('&');
      continue;
    }
    absl::string_view name = text.substr(i + 1, semi - i - 1);
    uint32_t cp = 0;
    if (!name.empty() && name[0] == '#') {
      std::string digits(name.substr(1));
      const bool hex = !digits.empty() && (digits[0] == 'x' || digits[0] == 'X');
      char* end = nullptr;
      const char* start = digits.c_str() + (hex ? 1 : 0);
      unsigned long v = std::strtoul(start, &end, hex ? 16 : 10);
      if (end != start && *end == '\0' && v <= 0x10FFFF) cp = v;
    } else {
      for (const auto& e : kEntities) {
        if (e.name == name) cp = e.code_point;
      }
    }
    if (cp == 0) {
      out.push_back('&');
      continue;
    }
    js::AppendUtf8(out, cp);
    i = semi;
  }
  return out;
}

absl::StatusOr<std::vector<HtmlEvent>> TokenizeHtml(absl::string_view html) {
  std::vector<HtmlEvent> events;
  size_t i = 0;
  auto error = [&](size_t at, absl::string_view what) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed HTML at byte ", at, ": ", what));
  };
  while (i < html.size()) {
    if (html[i] != '<') {
      size_t next = html.find('<', i);
      if (next == absl::string_view::npos) next = html.size();
      HtmlEvent text;
      text.offset = i;
      text.text = DecodeEntities(html.substr(i, next - i));
      events.push_back(std::move(text));
      i = next;
      continue;
    }
    const size_t start = i;
    if (html.substr(i, 4) == "<!--") {
      size_t end = html.find("-->", i + 4);
      if (end == absl::string_view::npos) return error(start, "unterminated comment");
      i = end + 3;
      continue;
    }
    if (html.substr(i, 2) == "<!" || html.substr(i, 2) == "<?") {
      size_t end = html.find('>', i);
      if (end == absl::string_view::npos) return error(start, "unterminated declaration");
      i = end + 1;
      continue;
    }
    const bool closing = i + 1 < html.size() && html[i + 1] == '/';
    size_t p = i + (closing ? 2 : 1);
    size_t name_begin = p;
    while (p < html.size() && IsNameChar(html[p])) ++p;
    if (p == name_begin) {
      // A bare '<' in text, e.g. "a < b" in sloppy markup.
      HtmlEvent text;
      text.offset = i;
      text.text = "<";
      events.push_back(std::move(text));
      ++i;
      continue;
    }
    HtmlEvent tag;
    tag.type = closing ? HtmlEvent::Type::kEndTag : HtmlEvent::Type::kStartTag;
    tag.offset = start;
    tag.name = absl::AsciiStrToLower(html.substr(name_begin, p - name_begin));
    // Attributes.
    while (true) {
      while (p < html.size() && std::isspace(static_cast<unsigned char>(html[p]))) ++p;
      if (p >= html.size()) return error(start, "unterminated tag");
      if (html[p] == '>') {
        ++p;
        break;
      }
      if (html[p] == '/' && p + 1 < html.size() && html[p + 1] == '>') {
        tag.self_closing = true;
        p += 2;
        break;
      }
      size_t an = p;
      while (p < html.size() && html[p] != '=' && html[p] != '>' &&
             !std::isspace(static_cast<unsigned char>(html[p])) &&
             !(html[p] == '/' && p + 1 < html.size() && html[p + 1] == '>')) {
        ++p;
      }
      if (p == an) {
        ++p;  // stray character
        continue;
      }
      std::string attr = absl::AsciiStrToLower(html.substr(an, p - an));
      std::string value;
      if (p < html.size() && html[p] == '=') {
        ++p;
        if (p < html.size() && (html[p] == '"' || html[p] == '\'')) {
          char q = html[p++];
          size_t end = html.find(q, p);
          if (end == absl::string_view::npos) {
            return error(start, "unterminated attribute value");
          }
          value = DecodeEntities(html.substr(p, end - p));
          p = end + 1;
        } else {
          size_t vb = p;
          while (p < html.size() && html[p] != '>' &&
                 !std::isspace(static_cast<unsigned char>(html[p]))) {
            ++p;
          }
          value = DecodeEntities(html.substr(vb, p - vb));
        }
      }
      tag.attrs[attr] = value;
    }
    i = p;
    const bool raw = !closing && IsRawTextElement(tag.name) && !tag.self_closing;
    const std::string name = tag.name;
    events.push_back(std::move(tag));
    if (raw) {
      std::string close = absl::StrCat("</", name);
      size_t end = i;
      while (true) {
        end = html.find("</", end);
        if (end == absl::string_view::npos) return error(start, "unterminated raw text element");
        if (absl::AsciiStrToLower(html.substr(end, close.size())) == close) break;
        end += 2;
      }
      i = end;
    }
  }
  return events;
}

}  // namespace jsconform::specdb
