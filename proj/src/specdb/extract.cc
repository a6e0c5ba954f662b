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

// Section segmentation, step classification and boundary resolution.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <set>

#include "absl/strings/ascii.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_replace.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"
#include "embedded_data.h"
#include "jsconform/specdb.h"
#include "specdb/html.h"

namespace jsconform::specdb {
namespace {

std::string CollapseWhitespace(absl::string_view text) {
  std::string out;
  bool space = false;
  for (size_t i = 0; i < text.size(); ++i) {
    unsigned char c = text[i];
    // U+00A0 arrives as C2 A0.
    bool is_space = std::isspace(c) ||
                    (c == 0xC2 && i + 1 < text.size() &&
                     static_cast<unsigned char>(text[i + 1]) == 0xA0);
    if (is_space) {
      if (c == 0xC2) ++i;
      space = !out.empty();
      continue;
    }
    if (space) out.push_back(' ');
    space = false;
    out.push_back(static_cast<char>(c));
  }
  return out;
}

// Parses numeric spellings used in algorithm text: "20", "-1", "10^21",
// "+Infinity", "-0".
std::optional<double> ParseSpecNumber(absl::string_view s) {
  if (s == "Infinity" || s == "+Infinity") return HUGE_VAL;
  if (s == "-Infinity") return -HUGE_VAL;
  if (s == "NaN") return std::nan("");
  if (s == "-0") return -0.0;
  if (size_t caret = s.find('^'); caret != absl::string_view::npos) {
    auto base = ParseSpecNumber(s.substr(0, caret));
    auto exp = ParseSpecNumber(s.substr(caret + 1));
    if (!base || !exp) return std::nullopt;
    return std::pow(*base, *exp);
  }
  std::string str(s);
  if (!str.empty() && str[0] == '+') str.erase(0, 1);
  if (!str.empty() && str.back() == '.') str.pop_back();
  char* end = nullptr;
  double d = std::strtod(str.c_str(), &end);
  if (str.empty() || *end != '\0') return std::nullopt;
  return d;
}

std::optional<Value> ParseSpecValue(absl::string_view s) {
  if (s == "null") return Value::Null();
  if (s == "true") return Value::Boolean(true);
  if (s == "false") return Value::Boolean(false);
  if (s == "undefined") return Value::Undefined();
  if (auto d = ParseSpecNumber(s)) return Value::Number(*d);
  return std::nullopt;
}

struct Heading {
  std::string text;
  std::string secnum;
  std::string id;
};

struct Section {
  Heading heading;
  std::vector<std::string> steps;
};

// Walks the event stream, cutting it into heading-delimited sections and
// collecting algorithm steps in document order.
class Segmenter {
 public:
  absl::Status Run(const std::vector<HtmlEvent>& events) {
    for (const HtmlEvent& e : events) {
      switch (e.type) {
        case HtmlEvent::Type::kStartTag:
          OnStart(e);
          break;
        case HtmlEvent::Type::kEndTag:
          if (absl::Status s = OnEnd(e); !s.ok()) return s;
          break;
        case HtmlEvent::Type::kText:
          OnText(e.text);
          break;
      }
    }
    return absl::OkStatus();
  }

  std::vector<Section>& sections() { return sections_; }

 private:
  struct Item {
    std::string text;
    bool emitted = false;
  };

  static bool IsHeading(absl::string_view name) {
    return name.size() == 2 && name[0] == 'h' && name[1] >= '1' && name[1] <= '6';
  }

  void OnStart(const HtmlEvent& e) {
    if (IsHeading(e.name)) {
      in_heading_ = true;
      heading_ = Heading{};
      heading_.id = pending_id_;
      if (auto it = e.attrs.find("id"); it != e.attrs.end()) heading_.id = it->second;
      return;
    }
    if (e.name == "emu-clause" || e.name == "emu-annex" || e.name == "section") {
      if (auto it = e.attrs.find("id"); it != e.attrs.end()) pending_id_ = it->second;
    }
    if (in_heading_ && e.name == "span" && e.HasClass("secnum")) {
      in_secnum_ = true;
      return;
    }
    if (e.name == "emu-alg") {
      ++alg_depth_;
      alg_text_.clear();
      alg_has_list_ = false;
      return;
    }
    if (e.name == "ol" && (alg_depth_ > 0 || e.HasClass("proc") || list_depth_ > 0)) {
      ++list_depth_;
      alg_has_list_ = true;
      if (!items_.empty()) EmitItem(items_.back());
      return;
    }
    if (e.name == "li" && list_depth_ > 0) {
      items_.emplace_back();
      return;
    }
    if (e.name == "sup") Append("^");
    if (e.name == "br") Append(alg_depth_ > 0 && items_.empty() ? "\n" : " ");
  }

  absl::Status OnEnd(const HtmlEvent& e) {
    if (IsHeading(e.name) && in_heading_) {
      in_heading_ = false;
      in_secnum_ = false;
      sections_.push_back(Section{heading_, {}});
      return absl::OkStatus();
    }
    if (e.name == "span" && in_secnum_) {
      in_secnum_ = false;
      return absl::OkStatus();
    }
    if (e.name == "li" && list_depth_ > 0) {
      if (items_.empty()) {
        return absl::InvalidArgumentError(absl::StrCat(
            "malformed HTML at byte ", e.offset, ": unmatched </li>"));
      }
      EmitItem(items_.back());
      items_.pop_back();
      return absl::OkStatus();
    }
    if (e.name == "ol" && list_depth_ > 0) {
      --list_depth_;
      // Items left open by sloppy markup close with their list.
      while (items_.size() > static_cast<size_t>(list_depth_)) {
        EmitItem(items_.back());
        items_.pop_back();
      }
      return absl::OkStatus();
    }
    if (e.name == "emu-alg" && alg_depth_ > 0) {
      --alg_depth_;
      if (!alg_has_list_) {
        // Unrendered source form: one "1. Step" per line.
        for (absl::string_view line : absl::StrSplit(alg_text_, '\n')) {
          std::string step = CollapseWhitespace(line);
          absl::string_view s = step;
          size_t k = 0;
          while (k < s.size() && (std::isalnum(static_cast<unsigned char>(s[k])))) ++k;
          if (k > 0 && k < s.size() && s[k] == '.' &&
              (k + 1 == s.size() || s[k + 1] == ' ')) {
            s.remove_prefix(std::min(s.size(), k + 2));
          }
          if (!s.empty()) Emit(std::string(s));
        }
      }
      alg_text_.clear();
    }
    return absl::OkStatus();
  }

  void OnText(const std::string& text) { Append(text); }

  void Append(absl::string_view text) {
    if (in_secnum_) {
      absl::StrAppend(&heading_.secnum, text);
    } else if (in_heading_) {
      absl::StrAppend(&heading_.text, text);
    } else if (!items_.empty()) {
      absl::StrAppend(&items_.back().text, text);
    } else if (alg_depth_ > 0 && !alg_has_list_) {
      absl::StrAppend(&alg_text_, text);
    }
  }

  void EmitItem(Item& item) {
    std::string text = CollapseWhitespace(item.text);
    item.text.clear();
    if (!text.empty()) Emit(std::move(text));
    item.emitted = true;
  }

  void Emit(std::string step) {
    if (!sections_.empty()) sections_.back().steps.push_back(std::move(step));
  }

  std::vector<Section> sections_;
  Heading heading_;
  std::string pending_id_;
  bool in_heading_ = false;
  bool in_secnum_ = false;
  int alg_depth_ = 0;
  int list_depth_ = 0;
  bool alg_has_list_ = false;
  std::string alg_text_;
  std::vector<Item> items_;
};

struct HeadingParam {
  std::string name;
  bool optional;
};

std::vector<HeadingParam> ParseHeadingParams(absl::string_view args) {
  std::vector<HeadingParam> out;
  int depth = 0;
  std::string current;
  bool current_optional = false;
  auto flush = [&] {
    const std::string cleaned =
        absl::StrReplaceAll(CollapseWhitespace(current), {{"_", ""}});
    absl::string_view view = cleaned;
    bool rest = absl::ConsumePrefix(&view, "...") ||
                absl::ConsumePrefix(&view, "\xE2\x80\xA6");  // …
    std::string name(absl::StripAsciiWhitespace(view));
    if (!name.empty()) {
      bool dup = std::any_of(out.begin(), out.end(),
                             [&](const HeadingParam& p) { return p.name == name; });
      if (!dup) out.push_back({name, current_optional || rest});
    }
    current.clear();
    current_optional = depth > 0;
  };
  for (char c : args) {
    if (c == '[') {
      flush();
      ++depth;
      current_optional = true;
    } else if (c == ']') {
      flush();
      depth = std::max(0, depth - 1);
      current_optional = depth > 0;
    } else if (c == ',') {
      flush();
    } else {
      current.push_back(c);
    }
  }
  flush();
  return out;
}

std::string ReceiverOf(absl::string_view name, bool global_constructor) {
  if (size_t p = name.find(".prototype."); p != absl::string_view::npos) {
    return std::string(name.substr(0, p));
  }
  if (size_t p = name.rfind('.'); p != absl::string_view::npos) {
    return std::string(name.substr(0, p));
  }
  if (global_constructor) return std::string(name);
  return "global";
}

void AddType(std::vector<JsType>& types, JsType t) {
  if (std::find(types.begin(), types.end(), t) == types.end()) {
    types.push_back(t);
    std::sort(types.begin(), types.end());
  }
}

// Resolves variable names to the parameter (or receiver) they were derived
// from, and records boundary conditions against the resolved target.
class BoundaryResolver {
 public:
  BoundaryResolver(ApiSpec& spec, const PatternTable& patterns)
      : spec_(spec), patterns_(patterns) {}

  void ProcessStep(SpecStep& step) {
    const std::string text = NormalizeStepText(step.raw_text);
    for (std::sregex_iterator it(text.begin(), text.end(), patterns_.alias()), end;
         it != end; ++it) {
      const std::string var = (*it)[1];
      const std::string func = (*it)[2];
      const std::string arg = (*it)[3];
      std::optional<std::string> target = Resolve(arg);
      if (!target) continue;
      aliases_[var] = *target;
      if (*target != kReceiver) {
        if (auto t = patterns_.ConversionType(func)) {
          AddType(MutableParam(*target)->declared_types, *t);
        }
      }
    }
    if (step.kind != StepKind::kIf && step.kind != StepKind::kLet) return;
    // Each pattern consumes what it matched so that, e.g., a range test is
    // not also reported as two one-sided comparisons.
    std::string remaining = text;
    for (const auto& pattern : patterns_.boundaries()) {
      std::smatch m;
      std::string::const_iterator from = remaining.cbegin();
      std::string next;
      bool any = false;
      while (std::regex_search(from, remaining.cend(), m, pattern.re)) {
        any = true;
        step.boundary_tag = true;
        Record(pattern, m, step.index);
        next.append(from, m[0].first);
        next.append(m.length(0), ' ');
        from = m[0].second;
        if (m.length(0) == 0) break;
      }
      if (any) {
        next.append(from, remaining.cend());
        remaining = std::move(next);
      }
    }
  }

 private:
  ParamSpec* MutableParam(absl::string_view name) {
    for (auto& p : spec_.parameters) {
      if (p.name == name) return &p;
    }
    return nullptr;
  }

  std::optional<std::string> Resolve(const std::string& word) {
    if (patterns_.IsReceiverWord(word)) return std::string(kReceiver);
    if (MutableParam(word) != nullptr) return word;
    if (auto it = aliases_.find(word); it != aliases_.end()) return it->second;
    return std::nullopt;
  }

  void Record(const PatternTable::BoundaryPattern& pattern, const std::smatch& m,
              int step_index) {
    auto group = [&](int g) -> std::string { return g > 0 ? m[g].str() : ""; };
    std::optional<std::string> target = Resolve(group(pattern.target_group));
    if (!target) return;
    BoundaryCondition bc;
    bc.target = *target;
    bc.predicate = pattern.predicate;
    bc.origin_step = step_index;
    switch (pattern.predicate) {
      case Predicate::kIsUndefined:
        break;
      case Predicate::kInRange: {
        auto lo = ParseSpecNumber(group(pattern.lo_group));
        auto hi = ParseSpecNumber(group(pattern.hi_group));
        if (!lo || !hi || *lo > *hi) return;
        bc.lo = *lo;
        bc.hi = *hi;
        break;
      }
      case Predicate::kEquals:
      case Predicate::kLessThan:
      case Predicate::kGreaterThan: {
        std::optional<Value> v = pattern.fixed_value;
        if (!v) v = ParseSpecValue(group(pattern.value_group));
        if (!v) return;
        bc.value = *v;
        break;
      }
      case Predicate::kIsType: {
        std::optional<JsType> t = pattern.fixed_type;
        if (!t) {
          auto parsed = ParseJsType(group(pattern.type_group));
          if (!parsed.ok()) return;
          t = *parsed;
        }
        bc.type = *t;
        break;
      }
    }
    if (*target == kReceiver) {
      if (std::find(spec_.receiver_boundaries.begin(),
                    spec_.receiver_boundaries.end(),
                    bc) == spec_.receiver_boundaries.end()) {
        spec_.receiver_boundaries.push_back(bc);
      }
      return;
    }
    ParamSpec* param = MutableParam(*target);
    if (bc.predicate == Predicate::kIsType) AddType(param->declared_types, bc.type);
    if (std::find(param->boundaries.begin(), param->boundaries.end(), bc) ==
        param->boundaries.end()) {
      param->boundaries.push_back(bc);
    }
  }

  ApiSpec& spec_;
  const PatternTable& patterns_;
  std::map<std::string, std::string> aliases_;
};

std::optional<ApiSpec> ClassifySection(const Section& section,
                                       const PatternTable& patterns) {
  std::string text = CollapseWhitespace(section.heading.text);
  std::string secnum = CollapseWhitespace(section.heading.secnum);
  // Headings without a secnum span may carry the clause number inline.
  static const std::regex kInlineNumber(R"(^((?:[A-Z]|\d+)(?:\.\d+)+|\d+)\s+)");
  std::smatch m;
  if (std::regex_search(text, m, kInlineNumber)) {
    if (secnum.empty()) secnum = m[1];
    text = m.suffix();
  }
  ApiSpec spec;
  if (std::regex_match(text, m, patterns.api_heading())) {
    const std::string name = m[1];
    const bool qualified = name.find('.') != std::string::npos;
    if (!qualified && !patterns.IsGlobalName(name)) return std::nullopt;
    spec.name = name;
    const bool ctor = !qualified && absl::ascii_isupper(name[0]);
    spec.receiver_type = ReceiverOf(name, ctor);
    for (const HeadingParam& hp : ParseHeadingParams(m[2].str())) {
      ParamSpec p;
      p.name = hp.name;
      p.optional = hp.optional;
      spec.parameters.push_back(std::move(p));
    }
  } else if (std::regex_match(text, m, patterns.accessor_heading())) {
    spec.name = m[1];
    spec.receiver_type = ReceiverOf(spec.name, false);
  } else if (std::regex_match(text, m, patterns.object_heading())) {
    absl::string_view name = text;
    absl::ConsumePrefix(&name, "The ");
    spec.name = std::string(name);
    spec.receiver_type = m[1];
  } else {
    return std::nullopt;
  }
  spec.source_section = !secnum.empty()             ? secnum
                        : !section.heading.id.empty() ? section.heading.id
                                                      : text;
  return spec;
}

}  // namespace

std::string NormalizeStepText(absl::string_view text) {
  std::string s = absl::StrReplaceAll(
      text, {{"\xE2\x89\xA4", "<="},       // ≤
             {"\xE2\x89\xA5", ">="},       // ≥
             {"\xE2\x89\xA0", "!="},       // ≠
             {"\xE2\x88\x92", "-"},        // −
             {"\xE2\x80\x93", "-"},        // –
             {"\xE2\x88\x9E", "Infinity"},  // ∞
             {"\xE2\x80\x9C", "\""},
             {"\xE2\x80\x9D", "\""},
             {"_", ""},
             {"*", ""}});
  s = CollapseWhitespace(s);
  // Drop the ? and ! completion shorthands.
  static const std::regex kMacro(R"((^|[\s(,])[?!] )");
  s = std::regex_replace(s, kMacro, "$1");
  return s;
}

SpecStep ExtractStep(absl::string_view line, int index,
                     const PatternTable& patterns) {
  SpecStep step;
  step.index = index;
  step.raw_text = std::string(line);
  const std::string text = NormalizeStepText(line);
  for (const auto& p : patterns.steps()) {
    std::smatch m;
    if (!std::regex_search(text, m, p.re)) continue;
    step.kind = p.kind;
    if (p.var_group > 0 && m[p.var_group].matched) step.var = m[p.var_group];
    if (p.func_group > 0 && m[p.func_group].matched) step.func = m[p.func_group];
    break;
  }
  if (step.kind == StepKind::kIf || step.kind == StepKind::kLet) {
    for (const auto& b : patterns.boundaries()) {
      if (std::regex_search(text, b.re)) {
        step.boundary_tag = true;
        break;
      }
    }
  }
  return step;
}

absl::StatusOr<ParseResult> ParseSpecDocument(absl::string_view html,
                                              const PatternTable& patterns) {
  auto events = TokenizeHtml(html);
  if (!events.ok()) return events.status();
  Segmenter segmenter;
  if (absl::Status s = segmenter.Run(*events); !s.ok()) return s;

  ParseResult result;
  for (const Section& section : segmenter.sections()) {
    std::optional<ApiSpec> spec = ClassifySection(section, patterns);
    if (!spec) continue;
    BoundaryResolver resolver(*spec, patterns);
    for (const std::string& raw : section.steps) {
      SpecStep step = ExtractStep(raw, static_cast<int>(spec->steps.size()) + 1,
                                  patterns);
      step.boundary_tag = false;  // re-derived by the resolver
      resolver.ProcessStep(step);
      spec->steps.push_back(std::move(step));
    }
    spec->prose_only = spec->steps.empty();
    for (ParamSpec& p : spec->parameters) {
      for (const BoundaryCondition& bc : p.boundaries) {
        if (bc.predicate == Predicate::kIsUndefined) p.optional = true;
        if (bc.predicate == Predicate::kInRange && !p.value_range) {
          p.value_range = {bc.lo, bc.hi};
        }
      }
    }
    result.apis.push_back(*std::move(spec));
  }
  if (result.apis.empty()) result.warnings.push_back("no API sections found");
  return result;
}

Value TypeRepresentative(JsType type) {
  switch (type) {
    case JsType::kUndefined: return Value::Undefined();
    case JsType::kNull: return Value::Null();
    case JsType::kBoolean: return Value::Boolean(true);
    case JsType::kNumber: return Value::Number(3);
    case JsType::kString: return Value::String("abc");
    case JsType::kObject: return Value::Object({{"a", Value::Number(1)}});
    case JsType::kArray:
      return Value::Array({Value::Number(1), Value::Number(2), Value::Number(3)});
    case JsType::kFunction: return Value::FunctionStub();
  }
  return Value::Undefined();
}

absl::StatusOr<std::vector<Value>> BoundaryValues(const ApiSpec& spec,
                                                  absl::string_view param) {
  const std::vector<BoundaryCondition>* boundaries = nullptr;
  std::vector<JsType> declared;
  if (param == kReceiver) {
    boundaries = &spec.receiver_boundaries;
    if (auto t = ParseJsType(spec.receiver_type); t.ok()) declared.push_back(*t);
  } else {
    const ParamSpec* p = spec.FindParam(param);
    if (p == nullptr) {
      return absl::NotFoundError(
          absl::StrCat(spec.name, " has no parameter '", param, "'"));
    }
    boundaries = &p->boundaries;
    declared = p->declared_types;
  }

  std::vector<Value> values;
  auto add = [&](Value v) {
    if (std::find(values.begin(), values.end(), v) == values.end()) {
      values.push_back(std::move(v));
    }
  };
  bool numeric = false, typed = false;
  for (const BoundaryCondition& bc : *boundaries) {
    switch (bc.predicate) {
      case Predicate::kIsUndefined:
        add(Value::Undefined());
        break;
      case Predicate::kInRange:
        numeric = true;
        add(Value::Number(bc.lo - 1));
        add(Value::Number(bc.lo));
        add(Value::Number(bc.hi));
        add(Value::Number(bc.hi + 1));
        break;
      case Predicate::kLessThan:
        numeric = true;
        if (bc.value.type() == JsType::kNumber) add(Value::Number(bc.value.number() - 1));
        add(bc.value);
        break;
      case Predicate::kGreaterThan:
        numeric = true;
        add(bc.value);
        if (bc.value.type() == JsType::kNumber) add(Value::Number(bc.value.number() + 1));
        break;
      case Predicate::kEquals:
        add(bc.value);
        break;
      case Predicate::kIsType:
        typed = true;
        break;
    }
  }
  if (!numeric || typed) {
    if (declared.empty()) {
      for (JsType t : AllJsTypes()) add(TypeRepresentative(t));
    } else {
      for (JsType t : declared) add(TypeRepresentative(t));
      static constexpr JsType kMismatchOrder[] = {
          JsType::kNumber, JsType::kString,   JsType::kBoolean, JsType::kObject,
          JsType::kArray,  JsType::kFunction, JsType::kNull,    JsType::kUndefined};
      for (JsType t : kMismatchOrder) {
        if (std::find(declared.begin(), declared.end(), t) == declared.end()) {
          add(TypeRepresentative(t));
          break;
        }
      }
    }
  }
  return values;
}

CoverageReport Coverage(const SpecDb& db) {
  CoverageReport r;
  r.total_sections = static_cast<int>(db.apis.size());
  for (const ApiSpec& api : db.apis) {
    if (!api.prose_only && !api.steps.empty()) ++r.extracted;
  }
  r.empty = r.total_sections == 0;
  r.ratio = r.empty ? 0.0 : static_cast<double>(r.extracted) / r.total_sections;
  return r;
}

const SpecDb& BundledDb() {
  static const SpecDb* db = [] {
    auto parsed = ParseSpecDocument(data::kSpecSubset);
    if (!parsed.ok()) {
      fprintf(stderr, "bundled spec subset is broken: %s\n",
              std::string(parsed.status().message()).c_str());
      abort();
    }
    return new SpecDb{std::move(parsed->apis)};
  }();
  return *db;
}

}  // namespace jsconform::specdb
