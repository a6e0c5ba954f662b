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
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "absl/strings/match.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "datagen/internal.h"
#include "jsconform/datagen.h"
#include "jsconform/js/ast.h"
#include "js/lexer.h"

namespace jsconform::datagen {
namespace {

using js::Node;
using js::NodeKind;

struct Edit {
  size_t begin, end;
  std::string text;
};

// Applies non-overlapping edits; a later edit of the same range wins.
std::string ApplyEdits(const std::string& source, std::vector<Edit> edits) {
  std::stable_sort(edits.begin(), edits.end(), [](const Edit& a, const Edit& b) {
    return a.begin > b.begin;
  });
  std::string out = source;
  size_t floor = std::string::npos;
  for (size_t i = 0; i < edits.size(); ++i) {
    const Edit& e = edits[i];
    if (i + 1 < edits.size() && edits[i + 1].begin == e.begin &&
        edits[i + 1].end == e.end) {
      continue;  // superseded by the later edit of the same range
    }
    if (floor != std::string::npos && e.end > floor) continue;
    out.replace(e.begin, e.end - e.begin, e.text);
    floor = e.begin;
  }
  return out;
}

std::optional<JsType> FirstDeclared(const specdb::ApiSpec& spec,
                                    absl::string_view param) {
  const specdb::ParamSpec* p = spec.FindParam(param);
  if (p == nullptr || p->declared_types.empty()) return std::nullopt;
  return p->declared_types[0];
}

// Values of the entry call at top level, e.g. `foo(s, 0, len)` after
// `var s = "Albert";`.
std::vector<std::optional<Value>> TopLevelCallValues(const js::Ast& ast,
                                                     const EntryFunction& entry) {
  std::vector<std::optional<Value>> out(entry.params.size());
  const auto top = js::Statements(ast.root());
  for (size_t s = 0; s < top.size(); ++s) {
    const Node* call = nullptr;
    js::Walk(*top[s], [&](const Node& n) {
      if (call != nullptr || internal::IsFunction(n)) return false;
      if (n.kind == NodeKind::kCall && n.child(0) &&
          n.child(0)->kind == NodeKind::kIdentifier &&
          n.child(0)->name == entry.name) {
        call = &n;
        return false;
      }
      return true;
    });
    if (call == nullptr) continue;
    for (size_t i = 1; i < call->children.size() && i - 1 < out.size(); ++i) {
      const Node& arg = *call->children[i];
      if (auto v = internal::LiteralValue(arg)) {
        out[i - 1] = v;
        continue;
      }
      if (arg.kind != NodeKind::kIdentifier) continue;
      for (size_t j = s; j-- > 0;) {
        const Node& st = *top[j];
        if (st.kind == NodeKind::kVarDecl) {
          for (const auto& d : st.children) {
            if (d->child(0)->kind == NodeKind::kIdentifier &&
                d->child(0)->name == arg.name) {
              out[i - 1] = d->child(1) ? internal::LiteralValue(*d->child(1))
                                       : std::optional<Value>(Value::Undefined());
            }
          }
          if (out[i - 1]) break;
        } else if (internal::AssignsTo(st, arg.name)) {
          break;
        }
      }
    }
    break;
  }
  return out;
}

progen::TestProgram Derived(const progen::TestProgram& prog, std::string source) {
  if (source == prog.source) return prog;
  progen::TestProgram p =
      progen::TestProgram::FromSource(std::move(source), prog.origin, prog.seed_header);
  p.command_id = prog.command_id;
  p.validity = prog.validity;
  return p;
}

}  // namespace

absl::string_view MutationKindName(MutationOrigin::Kind kind) {
  switch (kind) {
    case MutationOrigin::Kind::kAsGenerated: return "as_generated";
    case MutationOrigin::Kind::kBoundary: return "boundary";
    case MutationOrigin::Kind::kRandom: return "random";
    case MutationOrigin::Kind::kArity: return "arity";
  }
  return "as_generated";
}

std::vector<Binding> AsGeneratedBindings(const progen::TestProgram& prog,
                                         const specdb::SpecDb& db) {
  auto entry = internal::EntryOf(prog);
  if (!entry) return {};
  std::vector<std::optional<Value>> values(entry->params.size());
  std::vector<std::optional<JsType>> types(entry->params.size());
  if (auto ast = js::Parse(prog.source); ast.ok()) {
    values = TopLevelCallValues(*ast, *entry);
    for (const CallSite& site : FindApiCalls(prog, db)) {
      const specdb::ApiSpec* spec = db.Find(site.api_name);
      if (spec == nullptr) continue;
      if (site.receiver_binding && site.receiver_binding->entry_param >= 0) {
        auto& t = types[site.receiver_binding->entry_param];
        if (!t) t = internal::ReceiverJsType(spec->receiver_type);
      }
      for (const ArgBinding& a : site.args) {
        if (a.entry_param < 0) continue;
        auto& t = types[a.entry_param];
        if (!t) t = FirstDeclared(*spec, a.param_name);
      }
    }
  }
  std::vector<Binding> out;
  for (size_t i = 0; i < entry->params.size(); ++i) {
    Value v = values[i] ? *values[i]
                        : specdb::TypeRepresentative(types[i].value_or(JsType::kNumber));
    out.push_back({entry->params[i], std::move(v), true});
  }
  return out;
}

absl::StatusOr<std::vector<TestCase>> MutateTestData(
    const progen::TestProgram& prog, const CallSite& site,
    const specdb::ApiSpec& spec, const specdb::SpecDb& db,
    const DatagenConfig& cfg, Rng& rng) {
  if (site.api_name != spec.name) {
    return absl::InvalidArgumentError(absl::StrCat(
        "call site names ", site.api_name, " but spec is ", spec.name));
  }
  const std::vector<Binding> base = AsGeneratedBindings(prog, db);
  std::set<std::string> used;
  for (const CallSite& s : FindApiCalls(prog, db)) used.insert(s.api_name);
  const std::vector<std::string> apis_used(used.begin(), used.end());
  const size_t passed = site.arg_ranges.size();

  std::vector<TestCase> out;
  std::vector<std::string> notes;
  auto emit = [&](std::vector<Edit> edits, std::vector<Binding> bindings,
                  MutationOrigin origin) -> absl::Status {
    auto tc = SynthesizeDriver(Derived(prog, ApplyEdits(prog.source, edits)),
                               bindings);
    if (!tc.ok()) return tc.status();
    tc->program_id = prog.id;
    tc->origin = std::move(origin);
    tc->api = spec.name;
    tc->apis_used = apis_used;
    tc->notes = notes;
    out.push_back(*std::move(tc));
    return absl::OkStatus();
  };

  // Binds `v` to `b`: through the driver for entry parameters, otherwise by
  // rewriting the literal or definition. Absent arguments are collected in
  // `appended` and written as one insertion before the closing paren.
  auto bind = [&](const ArgBinding& b, const Value& v,
                  std::vector<Binding>& bindings, std::vector<Edit>& edits,
                  std::map<size_t, Value>& appended, size_t arg_index) {
    if (b.entry_param >= 0) {
      for (Binding& x : bindings) {
        if (x.in_driver && x.variable == b.variable) x.value = v;
      }
      return;
    }
    if (b.absent) {
      appended[arg_index] = v;
      return;
    }
    std::string text = ToJsLiteral(v);
    // A literal receiver needs parens: `3.toFixed()` does not parse.
    if (arg_index == SIZE_MAX && b.kind == ArgBinding::Kind::kLiteral) {
      text = absl::StrCat("(", text, ")");
    }
    edits.push_back({b.edit_begin, b.edit_end, b.edit_prefix + text});
    bindings.push_back({b.variable.empty()
                            ? absl::StrCat(spec.name, "#", b.param_name)
                            : b.variable,
                        v, false});
  };
  auto flush_appended = [&](std::map<size_t, Value>& appended,
                            std::vector<Edit>& edits,
                            std::vector<Binding>& bindings) {
    if (appended.empty()) return;
    std::vector<std::string> parts;
    for (size_t i = passed; i <= appended.rbegin()->first; ++i) {
      auto it = appended.find(i);
      parts.push_back(it == appended.end() ? "undefined" : ToJsLiteral(it->second));
      if (it != appended.end()) {
        bindings.push_back({absl::StrCat(spec.name, "#", site.args[i].param_name),
                            it->second, false});
      }
    }
    edits.push_back({site.close_paren, site.close_paren,
                     absl::StrCat(passed > 0 ? ", " : "", absl::StrJoin(parts, ", "))});
  };

  struct Target {
    const ArgBinding* binding;
    size_t arg_index;  // SIZE_MAX for the receiver
  };
  std::vector<Target> targets;
  if (site.receiver_binding && !spec.receiver_boundaries.empty()) {
    targets.push_back({&*site.receiver_binding, SIZE_MAX});
  }
  for (size_t i = 0; i < site.args.size(); ++i) {
    if (absl::StartsWith(site.args[i].param_name, "#extra")) continue;
    targets.push_back({&site.args[i], i});
  }
  std::vector<Target> mutable_targets;
  for (const Target& t : targets) {
    if (t.binding->kind == ArgBinding::Kind::kOpaque) {
      notes.push_back(absl::StrCat("skipped ", t.binding->param_name, ": ",
                                   t.binding->note));
    } else {
      mutable_targets.push_back(t);
    }
  }

  if (absl::Status s = emit({}, base, {}); !s.ok()) return s;

  for (const Target& t : mutable_targets) {
    auto values = specdb::BoundaryValues(spec, t.binding->param_name);
    if (!values.ok()) return values.status();
    for (const Value& v : *values) {
      std::vector<Binding> bindings = base;
      std::vector<Edit> edits;
      std::map<size_t, Value> appended;
      bind(*t.binding, v, bindings, edits, appended, t.arg_index);
      flush_appended(appended, edits, bindings);
      absl::Status s = emit(std::move(edits), std::move(bindings),
                            {MutationOrigin::Kind::kBoundary,
                             t.binding->param_name, DebugString(v)});
      if (!s.ok()) return s;
    }
  }

  std::vector<Target> random_targets;
  for (const Target& t : mutable_targets) {
    if (t.arg_index != SIZE_MAX) random_targets.push_back(t);
  }
  for (int r = 0; r < cfg.random_cases_per_site && !random_targets.empty(); ++r) {
    std::vector<Binding> bindings = base;
    std::vector<Edit> edits;
    std::map<size_t, Value> appended;
    for (const Target& t : random_targets) {
      const specdb::ParamSpec* p = spec.FindParam(t.binding->param_name);
      const std::vector<JsType>& types = p != nullptr && !p->declared_types.empty()
                                             ? p->declared_types
                                             : AllJsTypes();
      bind(*t.binding, RandomValue(rng.Pick(types), rng), bindings, edits,
           appended, t.arg_index);
    }
    flush_appended(appended, edits, bindings);
    absl::Status s = emit(std::move(edits), std::move(bindings),
                          {MutationOrigin::Kind::kRandom, "", absl::StrCat(r)});
    if (!s.ok()) return s;
  }

  // Drop optional trailing arguments, one more each time.
  for (size_t k = passed; k-- > 0;) {
    if (k >= spec.parameters.size() || !spec.parameters[k].optional) break;
    const size_t from = k == 0 ? site.arg_ranges[0].first : site.arg_ranges[k - 1].second;
    absl::Status s = emit({{from, site.close_paren, ""}}, base,
                          {MutationOrigin::Kind::kArity, spec.parameters[k].name,
                           "drop"});
    if (!s.ok()) return s;
  }
  {
    // One argument beyond the declared count.
    std::vector<std::string> parts;
    for (size_t i = passed; i < spec.parameters.size(); ++i) parts.push_back("undefined");
    static const std::vector<JsType> kScalar = {JsType::kNumber, JsType::kString,
                                                JsType::kBoolean, JsType::kNull};
    parts.push_back(ToJsLiteral(RandomValue(rng.Pick(kScalar), rng)));
    absl::Status s = emit(
        {{site.close_paren, site.close_paren,
          absl::StrCat(passed > 0 ? ", " : "", absl::StrJoin(parts, ", "))}},
        base, {MutationOrigin::Kind::kArity, "", "extra"});
    if (!s.ok()) return s;
  }
  return out;
}

std::vector<TestCase> GenerateTestCases(const progen::TestProgram& prog,
                                        const specdb::SpecDb& db,
                                        const DatagenConfig& cfg,
                                        uint64_t seed) {
  std::vector<TestCase> out;
  std::set<std::string> seen;
  const auto sites = FindApiCalls(prog, db);
  if (sites.empty()) {
    auto tc = SynthesizeDriver(prog, AsGeneratedBindings(prog, db));
    if (tc.ok()) out.push_back(*std::move(tc));
    return out;
  }
  for (size_t i = 0; i < sites.size(); ++i) {
    const specdb::ApiSpec* spec = db.Find(sites[i].api_name);
    if (spec == nullptr) continue;
    Rng rng(DeriveSeed(seed, i));
    auto cases = MutateTestData(prog, sites[i], *spec, db, cfg, rng);
    if (!cases.ok()) continue;
    for (TestCase& tc : *cases) {
      if (seen.insert(tc.id).second) out.push_back(std::move(tc));
    }
  }
  return out;
}

Value RandomValue(JsType t, Rng& rng) {
  switch (t) {
    case JsType::kUndefined:
      return Value::Undefined();
    case JsType::kNull:
      return Value::Null();
    case JsType::kBoolean:
      return Value::Boolean(rng.Bernoulli(0.5));
    case JsType::kNumber:
      switch (rng.Weighted({3, 2, 1, 1, 1, 2})) {
        case 0:  // small integers
          return Value::Number(static_cast<double>(rng.UniformInt(-10, 10)));
        case 1: {  // large integers, up to and past 2^53
          double mag = std::ldexp(1.0, static_cast<int>(rng.UniformInt(10, 60)));
          double v = std::floor(mag * (1 + rng.UniformReal()));
          return Value::Number(rng.Bernoulli(0.5) ? v : -v);
        }
        case 2:
          return Value::Number(rng.Bernoulli(0.5) ? 0.0 : -0.0);
        case 3:
          return Value::Number(rng.Bernoulli(0.5)
                                   ? std::numeric_limits<double>::infinity()
                                   : -std::numeric_limits<double>::infinity());
        case 4:
          return Value::Number(std::nan(""));
        default:  // decimals with up to three fraction digits
          return Value::Number(static_cast<double>(rng.UniformInt(-1000000, 1000000)) /
                               1000.0);
      }
    case JsType::kString: {
      static const std::vector<uint32_t> kUnicode = {
          0xE9, 0xDF, 0x3A9, 0x416, 0x5D0, 0x627, 0x4E2D, 0x6587,
          0x301, 0x200B, 0xFEFF, 0x1F600, 0x1F4A9, 0x10348};
      const bool unicode = rng.Bernoulli(0.25);
      const size_t cap = rng.Bernoulli(0.8) ? 16 : 64;
      const size_t len = rng.Uniform(cap + 1);
      std::string s;
      size_t units = 0;
      while (units < len) {
        uint32_t cp = unicode && rng.Bernoulli(0.5)
                          ? rng.Pick(kUnicode)
                          : static_cast<uint32_t>(rng.UniformInt(0x20, 0x7E));
        const size_t w = cp > 0xFFFF ? 2 : 1;
        if (units + w > len) break;
        js::AppendUtf8(s, cp);
        units += w;
      }
      return Value::String(std::move(s));
    }
    case JsType::kArray: {
      std::vector<Value> items;
      const int n = static_cast<int>(rng.UniformInt(0, 4));
      static const std::vector<JsType> kScalar = {JsType::kNumber, JsType::kString,
                                                  JsType::kBoolean, JsType::kNull};
      for (int i = 0; i < n; ++i) items.push_back(RandomValue(rng.Pick(kScalar), rng));
      return Value::Array(std::move(items));
    }
    case JsType::kObject: {
      static const std::vector<std::string> kKeys = {"a", "b", "length", "key",
                                                     "x", "valueOf"};
      std::vector<std::pair<std::string, Value>> fields;
      const int n = static_cast<int>(rng.UniformInt(0, 3));
      for (int i = 0; i < n; ++i) {
        const std::string& k = rng.Pick(kKeys);
        bool dup = false;
        for (const auto& f : fields) dup |= f.first == k;
        if (!dup) fields.emplace_back(k, RandomValue(JsType::kNumber, rng));
      }
      return Value::Object(std::move(fields));
    }
    case JsType::kFunction:
      return Value::FunctionStub();
  }
  return Value::Undefined();
}

nlohmann::json CaseMeta(const TestCase& tc) {
  nlohmann::json bindings = nlohmann::json::array();
  for (const Binding& b : tc.bindings) {
    bindings.push_back({{"variable", b.variable},
                        {"value", ValueToJson(b.value)},
                        {"in_driver", b.in_driver}});
  }
  nlohmann::json origin = {{"kind", MutationKindName(tc.origin.kind)}};
  if (!tc.origin.param.empty()) origin["param"] = tc.origin.param;
  if (!tc.origin.detail.empty()) origin["detail"] = tc.origin.detail;
  return {{"id", tc.id},
          {"program_id", tc.program_id},
          {"api", tc.api.empty() ? nlohmann::json(nullptr) : nlohmann::json(tc.api)},
          {"apis", tc.apis_used},
          {"mutation_origin", origin},
          {"bindings", bindings},
          {"notes", tc.notes},
          {"driver_offset", tc.program.source.size()}};
}

absl::StatusOr<TestCase> CaseFromMeta(std::string source, const nlohmann::json& meta) {
  if (!meta.is_object()) return absl::InvalidArgumentError("case meta: not an object");
  size_t offset = source.size();
  if (meta.contains("driver_offset")) {
    if (!meta["driver_offset"].is_number_unsigned() ||
        meta["driver_offset"].get<size_t>() > source.size()) {
      return absl::InvalidArgumentError("case meta: /driver_offset out of range");
    }
    offset = meta["driver_offset"].get<size_t>();
  }
  TestCase tc;
  tc.driver = source.substr(offset);
  source.resize(offset);
  tc.program = progen::TestProgram::FromSource(std::move(source),
                                               progen::TestProgram::Origin::kExternal, "");
  tc.program_id = meta.value("program_id", tc.program.id);
  if (meta.contains("api") && meta["api"].is_string()) tc.api = meta["api"].get<std::string>();
  if (meta.contains("apis") && meta["apis"].is_array()) {
    for (const auto& a : meta["apis"]) {
      if (a.is_string()) tc.apis_used.push_back(a.get<std::string>());
    }
  }
  if (meta.contains("mutation_origin") && meta["mutation_origin"].is_object()) {
    const auto& o = meta["mutation_origin"];
    const std::string kind = o.value("kind", "as_generated");
    for (auto k : {MutationOrigin::Kind::kAsGenerated, MutationOrigin::Kind::kBoundary,
                   MutationOrigin::Kind::kRandom, MutationOrigin::Kind::kArity}) {
      if (MutationKindName(k) == kind) tc.origin.kind = k;
    }
    tc.origin.param = o.value("param", "");
    tc.origin.detail = o.value("detail", "");
  }
  if (meta.contains("notes") && meta["notes"].is_array()) {
    for (const auto& n : meta["notes"]) {
      if (n.is_string()) tc.notes.push_back(n.get<std::string>());
    }
  }
  tc.id = ContentHash(tc.source());
  return tc;
}

}  // namespace jsconform::datagen
