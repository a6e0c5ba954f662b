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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "absl/strings/ascii.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"
#include "embedded_data.h"
#include "jsconform/progen.h"

namespace jsconform::progen {
namespace {

// How often each statement production is chosen.
enum Production { kVarDecl, kApiCall, kArith, kIf, kFor };
const std::vector<double> kProductionWeights = {3, 4, 2, 1, 1};

const std::vector<std::string> kWords = {
    "Albert Einstein", "abc", "hello world", "", "A", "test", "JavaScript",
    "12", "a,b,c", "  padded  ", "anA", "NaN"};

struct Var {
  std::string name;
  std::optional<JsType> type;  // unset for API results
};

// Types whose values the grammar can write as receivers for prototype
// methods of the named object.
std::optional<JsType> ReceiverJsType(absl::string_view receiver) {
  if (receiver == "String") return JsType::kString;
  if (receiver == "Number") return JsType::kNumber;
  if (receiver == "Array") return JsType::kArray;
  if (receiver == "Object") return JsType::kObject;
  if (receiver == "Function") return JsType::kFunction;
  if (receiver == "Boolean") return JsType::kBoolean;
  return std::nullopt;
}

// Literal receivers for objects that have no literal syntax.
std::optional<std::string> ConstructedReceiver(absl::string_view receiver) {
  if (receiver == "Map") return "new Map([[\"a\", 1], [\"b\", 2]])";
  if (receiver == "%TypedArray%") return "new Uint8Array([1, 2, 3])";
  if (receiver == "Date") return "new Date(0)";
  if (receiver == "Set") return "new Set([1, 2])";
  return std::nullopt;
}

bool NeedsNew(absl::string_view name) {
  if (name.find('.') != absl::string_view::npos) return false;
  return (absl::EndsWith(name, "Array") && name != "Array") || name == "Map" ||
         name == "Set" || name == "Date" || name == "Promise";
}

std::vector<std::string> HeaderParams(absl::string_view header) {
  std::vector<std::string> out;
  size_t open = header.find('(');
  size_t close = header.find(')', open);
  if (open == absl::string_view::npos || close == absl::string_view::npos) {
    return out;
  }
  for (absl::string_view p :
       absl::StrSplit(header.substr(open + 1, close - open - 1), ',')) {
    p = absl::StripAsciiWhitespace(p);
    if (!p.empty()) out.emplace_back(p);
  }
  return out;
}

class Builder {
 public:
  Builder(const GenConfig& cfg, const std::vector<const specdb::ApiSpec*>& apis,
          Rng& rng)
      : cfg_(cfg), apis_(apis), rng_(rng), sink_(cfg.max_words) {}

  TestProgram Build() {
    auto header = PickSeedHeader(cfg_.seed_header_corpus.empty()
                                     ? BundledSeedHeaders()
                                     : cfg_.seed_header_corpus,
                                 rng_);
    const std::string seed = header.ok() ? *header : "function f() {";
    sink_.Push(seed);
    sink_.Push("\n");
    for (const std::string& p : HeaderParams(seed)) {
      static const std::vector<JsType> kParamTypes = {
          JsType::kNumber, JsType::kString, JsType::kArray, JsType::kObject,
          JsType::kBoolean};
      static const std::vector<double> kParamWeights = {4, 4, 2, 1, 1};
      scope_.push_back({p, kParamTypes[rng_.Weighted(kParamWeights)]});
    }

    const int n = static_cast<int>(rng_.UniformInt(1, 8));
    int end_at = -1, stray_at = -1;
    const double r = rng_.UniformReal();
    if (r < cfg_.noise / 2) {
      end_at = static_cast<int>(rng_.Uniform(n));
    } else if (r < cfg_.noise) {
      stray_at = static_cast<int>(rng_.Uniform(n));
    }
    for (int i = 0; i < n && !sink_.stopped(); ++i) {
      if (i == end_at) sink_.EndToken();
      if (i == stray_at) sink_.Push("  )\n");
      Statement(1);
    }
    std::string ret = "undefined";
    if (!scope_.empty()) ret = scope_.back().name;
    sink_.Push(absl::StrCat("  return ", ret, ";\n"));
    sink_.Push("}");
    sink_.Push("\n");
    return TestProgram::FromSource(sink_.text(), TestProgram::Origin::kBuiltIn,
                                   seed);
  }

 private:
  std::string Indent(int depth) { return std::string(2 * depth, ' '); }

  std::string Fresh(absl::string_view prefix = "v") {
    return absl::StrCat(prefix, next_id_++);
  }

  void Statement(int depth) {
    switch (static_cast<Production>(rng_.Weighted(kProductionWeights))) {
      case kVarDecl: {
        JsType t = AllJsTypes()[rng_.Uniform(AllJsTypes().size())];
        Declare(depth, t, Expr(t));
        break;
      }
      case kApiCall: {
        std::string call = ApiCall();
        if (call.empty()) call = Expr(JsType::kNumber);
        Declare(depth, std::nullopt, call);
        break;
      }
      case kArith:
        if (rng_.Bernoulli(0.6)) {
          static const std::vector<std::string> kOps = {"+", "-", "*", "/",
                                                        "%"};
          Declare(depth, JsType::kNumber,
                  absl::StrCat(Expr(JsType::kNumber), " ", rng_.Pick(kOps),
                               " ", Expr(JsType::kNumber)));
        } else {
          Declare(depth, JsType::kString,
                  absl::StrCat(Expr(JsType::kString), " + ",
                               Expr(rng_.Bernoulli(0.5) ? JsType::kString
                                                        : JsType::kNumber)));
        }
        break;
      case kIf:
        sink_.Push(absl::StrCat(Indent(depth), "if (", Expr(JsType::kNumber),
                                " > ", Expr(JsType::kNumber), ") {\n"));
        Simple(depth + 1);
        if (rng_.Bernoulli(0.5)) {
          sink_.Push(absl::StrCat(Indent(depth), "} else {\n"));
          Simple(depth + 1);
        }
        sink_.Push(absl::StrCat(Indent(depth), "}\n"));
        break;
      case kFor: {
        std::string i = Fresh("i");
        sink_.Push(absl::StrCat(Indent(depth), "for (var ", i, " = 0; ", i,
                                " < ", rng_.UniformInt(1, 4), "; ", i,
                                "++) {\n"));
        Simple(depth + 1);
        sink_.Push(absl::StrCat(Indent(depth), "}\n"));
        break;
      }
    }
  }

  // Statement inside a branch or loop body. Nothing it declares joins the
  // typed scope, since it may not run.
  void Simple(int depth) {
    std::vector<const Var*> typed;
    for (const Var& v : scope_) {
      if (v.type) typed.push_back(&v);
    }
    if (!typed.empty() && rng_.Bernoulli(0.5)) {
      const Var* v = typed[rng_.Uniform(typed.size())];
      sink_.Push(absl::StrCat(Indent(depth), v->name, " = ", Expr(*v->type),
                              ";\n"));
      return;
    }
    std::string call = ApiCall();
    if (call.empty()) call = Expr(JsType::kString);
    sink_.Push(absl::StrCat(Indent(depth), call, ";\n"));
  }

  void Declare(int depth, std::optional<JsType> type, absl::string_view init) {
    std::string name = Fresh();
    sink_.Push(absl::StrCat(Indent(depth), "var ", name, " = ", init, ";\n"));
    scope_.push_back({name, type});
  }

  // A variable of type `t` (most recent first, limited to the top k), or a
  // fresh literal.
  std::string Expr(JsType t) {
    std::vector<const Var*> candidates;
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it) {
      if (it->type == t) candidates.push_back(&*it);
      if (static_cast<int>(candidates.size()) >= cfg_.top_k) break;
    }
    if (!candidates.empty() && rng_.Bernoulli(0.5)) {
      return candidates[rng_.Uniform(candidates.size())]->name;
    }
    return Literal(t);
  }

  std::string Literal(JsType t) {
    switch (t) {
      case JsType::kUndefined:
        return "undefined";
      case JsType::kNull:
        return "null";
      case JsType::kBoolean:
        return rng_.Bernoulli(0.5) ? "true" : "false";
      case JsType::kNumber:
        return NumberLiteral();
      case JsType::kString:
        return ToJsLiteral(Value::String(rng_.Pick(kWords)));
      case JsType::kArray: {
        std::vector<std::string> items;
        int n = static_cast<int>(rng_.UniformInt(0, 4));
        for (int i = 0; i < n; ++i) {
          items.push_back(rng_.Bernoulli(0.7) ? NumberLiteral()
                                              : Literal(JsType::kString));
        }
        return absl::StrCat("[", absl::StrJoin(items, ", "), "]");
      }
      case JsType::kObject:
        return absl::StrCat("{a: ", NumberLiteral(), ", b: ",
                            Literal(JsType::kString), "}");
      case JsType::kFunction:
        return "function (x) { return x; }";
    }
    return "undefined";
  }

  std::string NumberLiteral() {
    switch (rng_.Weighted({5, 2, 2, 1, 1})) {
      case 0:
        return absl::StrCat(rng_.UniformInt(0, 30));
      case 1:
        return absl::StrCat("(-", rng_.UniformInt(1, 100), ")");
      case 2:
        return absl::StrCat(rng_.UniformInt(0, 99), ".", rng_.UniformInt(1, 99));
      case 3: {
        static const std::vector<std::string> kSpecial = {
            "NaN", "Infinity", "1e21", "9007199254740993", "(-0)"};
        return rng_.Pick(kSpecial);
      }
      default:
        return absl::StrCat(rng_.UniformInt(100, 100000));
    }
  }

  std::string Receiver(absl::string_view receiver) {
    if (auto t = ReceiverJsType(receiver)) {
      std::string e = Expr(*t);
      // Member access on anything but a plain identifier gets parentheses,
      // which covers numeric, object and function literals.
      const bool identifier =
          !e.empty() && !absl::ascii_isdigit(e[0]) &&
          e.find_first_not_of("abcdefghijklmnopqrstuvwxyz"
                              "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_$") ==
              std::string::npos;
      if (!identifier) return absl::StrCat("(", e, ")");
      return e;
    }
    if (auto c = ConstructedReceiver(receiver)) {
      return absl::StrCat("(", *c, ")");
    }
    return "";
  }

  std::string ApiCall() {
    if (apis_.empty()) return "";
    const specdb::ApiSpec& api = *apis_[rng_.Uniform(apis_.size())];
    std::string callee;
    const size_t proto = api.name.find(".prototype.");
    if (proto != std::string::npos) {
      std::string recv = Receiver(api.receiver_type);
      if (recv.empty()) return "";
      callee = absl::StrCat(recv, ".", api.name.substr(proto + 11));
    } else if (NeedsNew(api.name)) {
      callee = absl::StrCat("new ", api.name);
    } else {
      callee = api.name;
    }
    std::vector<std::string> args;
    for (const specdb::ParamSpec& p : api.parameters) {
      if (p.optional && !rng_.Bernoulli(0.6)) break;
      JsType t;
      if (!p.declared_types.empty()) {
        t = rng_.Pick(p.declared_types);
      } else {
        static const std::vector<JsType> kAny = {
            JsType::kNumber, JsType::kString, JsType::kArray,
            JsType::kObject, JsType::kFunction, JsType::kBoolean};
        t = rng_.Pick(kAny);
      }
      args.push_back(Expr(t));
    }
    return absl::StrCat(callee, "(", absl::StrJoin(args, ", "), ")");
  }

  const GenConfig& cfg_;
  const std::vector<const specdb::ApiSpec*>& apis_;
  Rng& rng_;
  TokenSink sink_;
  std::vector<Var> scope_;
  int next_id_ = 0;
};

std::vector<const specdb::ApiSpec*> CallableApis(const specdb::SpecDb& db) {
  std::vector<const specdb::ApiSpec*> out;
  for (const auto& api : db.apis) {
    if (api.name.find(' ') != std::string::npos) continue;
    if (api.name[0] == '%' && api.name.find(".prototype.") == std::string::npos)
      continue;
    out.push_back(&api);
  }
  return out;
}

}  // namespace

absl::string_view ValidityName(Validity v) {
  switch (v) {
    case Validity::kValid: return "valid";
    case Validity::kInvalid: return "invalid";
    case Validity::kUnchecked: return "unchecked";
  }
  return "unchecked";
}

TestProgram TestProgram::FromSource(std::string source, Origin origin,
                                    std::string seed_header) {
  TestProgram p;
  p.id = ContentHash(source);
  p.source = std::move(source);
  p.origin = origin;
  p.seed_header = std::move(seed_header);
  return p;
}

absl::Status GenConfig::Validate() const {
  if (top_k <= 0) return absl::InvalidArgumentError("top_k must be positive");
  if (max_words <= 0) {
    return absl::InvalidArgumentError("max_words must be positive");
  }
  if (!(keep_invalid_fraction >= 0 && keep_invalid_fraction <= 1)) {
    return absl::InvalidArgumentError("keep_invalid_fraction must be in [0,1]");
  }
  if (!(noise >= 0 && noise <= 1)) {
    return absl::InvalidArgumentError("noise must be in [0,1]");
  }
  return absl::OkStatus();
}

const std::vector<std::string>& BundledSeedHeaders() {
  static const auto* headers = [] {
    auto* out = new std::vector<std::string>();
    for (absl::string_view line :
         absl::StrSplit(data::kSeedHeaders, '\n', absl::SkipWhitespace())) {
      out->emplace_back(absl::StripAsciiWhitespace(line));
    }
    return out;
  }();
  return *headers;
}

absl::StatusOr<std::vector<std::string>> LoadSeedHeaders(
    const std::filesystem::path& path) {
  auto text = ReadFile(path);
  if (!text.ok()) return text.status();
  std::vector<std::string> out;
  for (absl::string_view line :
       absl::StrSplit(*text, '\n', absl::SkipWhitespace())) {
    out.emplace_back(absl::StripAsciiWhitespace(line));
  }
  if (out.empty()) {
    return absl::InvalidArgumentError(
        absl::StrCat("no seed headers in ", path.string()));
  }
  return out;
}

absl::StatusOr<std::string> PickSeedHeader(
    const std::vector<std::string>& corpus, Rng& rng) {
  if (corpus.empty()) {
    return absl::InvalidArgumentError("seed header corpus is empty");
  }
  return corpus[rng.Uniform(corpus.size())];
}

void TokenSink::Push(absl::string_view fragment) {
  if (stopped()) return;
  for (size_t i = 0; i < fragment.size(); ++i) {
    const char c = fragment[i];
    const bool space = absl::ascii_isspace(static_cast<unsigned char>(c));
    if (!space && !in_word_) {
      if (static_cast<int>(words_) == max_words_) {
        stop_ = Stop::kWordCap;
        return;
      }
      ++words_;
    }
    in_word_ = !space;
    text_.push_back(c);
    if (c == '{') {
      ++depth_;
      opened_ = true;
    } else if (c == '}') {
      --depth_;
      if (opened_ && depth_ <= 0) {
        stop_ = Stop::kBalanced;
        return;
      }
    }
  }
}

void TokenSink::EndToken() {
  if (!stopped()) stop_ = Stop::kEndToken;
}

std::string ApplyStopRules(absl::string_view text, int max_words,
                           TokenSink::Stop* stop) {
  TokenSink sink(max_words);
  const size_t eof = text.find("<EOF>");
  sink.Push(text.substr(0, eof));
  if (eof != absl::string_view::npos) sink.EndToken();
  if (stop != nullptr) *stop = sink.stop();
  return sink.text();
}

TestProgram GenerateBuiltin(const GenConfig& cfg, const specdb::SpecDb& db,
                            Rng& rng) {
  const auto apis = CallableApis(db);
  return Builder(cfg, apis, rng).Build();
}

std::vector<TestProgram> GenerateBatch(const GenConfig& cfg,
                                       const specdb::SpecDb& db, int count,
                                       int jobs) {
  std::vector<TestProgram> out(std::max(count, 0));
  const auto apis = CallableApis(db);
  std::atomic<int> next{0};
  auto work = [&] {
    for (int i = next++; i < count; i = next++) {
      Rng rng(DeriveSeed(cfg.rng_seed, i));
      out[i] = Builder(cfg, apis, rng).Build();
    }
  };
  jobs = std::clamp(jobs, 1, std::max(count, 1));
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace jsconform::progen
