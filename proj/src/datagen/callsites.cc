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

#include "absl/container/flat_hash_map.h"
#include "absl/strings/match.h"
#include "absl/strings/str_cat.h"
#include "datagen/internal.h"
#include "jsconform/datagen.h"

namespace jsconform::datagen {

using js::Node;
using js::NodeKind;

namespace internal {

bool IsFunction(const Node& n) {
  return n.kind == NodeKind::kFunctionDecl ||
         n.kind == NodeKind::kFunctionExpr ||
         n.kind == NodeKind::kArrowFunction;
}

std::optional<Value> LiteralValue(const Node& n) {
  switch (n.kind) {
    case NodeKind::kNumber:
      return Value::Number(n.number_value);
    case NodeKind::kString:
      return Value::String(n.string_value);
    case NodeKind::kBoolean:
      return Value::Boolean(n.flag);
    case NodeKind::kNull:
      return Value::Null();
    case NodeKind::kIdentifier:
      if (n.name == "undefined") return Value::Undefined();
      if (n.name == "NaN") return Value::Number(std::nan(""));
      if (n.name == "Infinity") {
        return Value::Number(std::numeric_limits<double>::infinity());
      }
      return std::nullopt;
    case NodeKind::kUnary:
      if (n.name == "-" && n.child(0) != nullptr) {
        auto v = LiteralValue(*n.child(0));
        if (v && v->type() == JsType::kNumber) return Value::Number(-v->number());
      }
      return std::nullopt;
    case NodeKind::kArray: {
      std::vector<Value> items;
      for (const auto& c : n.children) {
        if (c == nullptr || c->kind == NodeKind::kHole) return std::nullopt;
        auto v = LiteralValue(*c);
        if (!v) return std::nullopt;
        items.push_back(*v);
      }
      return Value::Array(std::move(items));
    }
    case NodeKind::kObject: {
      std::vector<std::pair<std::string, Value>> fields;
      for (const auto& c : n.children) {
        if (c->kind != NodeKind::kProperty || c->string_value != "init" ||
            c->flag || c->child(0) == nullptr) {
          return std::nullopt;
        }
        auto v = LiteralValue(*c->child(0));
        if (!v) return std::nullopt;
        fields.emplace_back(c->name, *v);
      }
      return Value::Object(std::move(fields));
    }
    case NodeKind::kFunctionExpr:
    case NodeKind::kArrowFunction:
      return Value::FunctionStub();
    default:
      return std::nullopt;
  }
}

bool AssignsTo(const Node& root, absl::string_view name) {
  bool found = false;
  js::Walk(root, [&](const Node& n) {
    if (found) return false;
    auto is_name = [&](const Node* t) {
      return t != nullptr && t->kind == NodeKind::kIdentifier && t->name == name;
    };
    switch (n.kind) {
      case NodeKind::kAssign:
      case NodeKind::kUpdate:
        found = is_name(n.child(0));
        break;
      case NodeKind::kVarDeclarator:
        found = is_name(n.child(0)) && n.child(1) != nullptr;
        break;
      case NodeKind::kForIn:
      case NodeKind::kForOf:
        if (is_name(n.child(0))) found = true;
        break;
      case NodeKind::kFunctionDecl:
        found = n.name == name;
        break;
      default:
        break;
    }
    return !found;
  });
  return found;
}

std::vector<std::string> ParamNames(const Node& fn) {
  std::vector<std::string> out;
  const Node* params = fn.child(0);
  if (params == nullptr) return out;
  for (size_t i = 0; i < params->children.size(); ++i) {
    const Node* p = params->child(i);
    if (p != nullptr && p->kind == NodeKind::kAssign) p = p->child(0);
    if (p != nullptr && p->kind == NodeKind::kIdentifier) {
      out.push_back(p->name);
    } else {
      out.push_back(absl::StrCat("__p", i));
    }
  }
  return out;
}

std::optional<JsType> ReceiverJsType(absl::string_view receiver) {
  if (receiver == "String") return JsType::kString;
  if (receiver == "Number") return JsType::kNumber;
  if (receiver == "Array") return JsType::kArray;
  if (receiver == "Object") return JsType::kObject;
  if (receiver == "Function") return JsType::kFunction;
  if (receiver == "Boolean") return JsType::kBoolean;
  return std::nullopt;
}

}  // namespace internal

namespace {

using internal::AssignsTo;
using internal::IsFunction;
using internal::LiteralValue;

bool IsLoop(const Node& n) {
  return n.kind == NodeKind::kFor || n.kind == NodeKind::kForIn ||
         n.kind == NodeKind::kForOf || n.kind == NodeKind::kWhile ||
         n.kind == NodeKind::kDoWhile;
}

bool HoldsStatements(const Node& n) {
  return n.kind == NodeKind::kProgram || n.kind == NodeKind::kBlock ||
         n.kind == NodeKind::kCase;
}

class Finder {
 public:
  Finder(const js::Ast& ast, const specdb::SpecDb& db) : ast_(ast), db_(db) {
    js::Walk(ast.root(), [&](const Node& n) {
      if (n.IsStatement()) {
        index_[&n] = static_cast<int>(statements_.size());
        statements_.push_back(&n);
      }
      return true;
    });
    entry_ = FindEntry(ast);
    if (entry_) entry_node_ = EntryNode();
  }

  std::vector<CallSite> Run() {
    Visit(ast_.root());
    return std::move(sites_);
  }

 private:
  const Node* EntryNode() const {
    const Node* s = statements_[entry_->statement];
    if (s->kind == NodeKind::kFunctionDecl) return s;
    for (const auto& d : s->children) {
      if (d && d->child(1) && IsFunction(*d->child(1))) return d->child(1);
    }
    return nullptr;
  }

  void Visit(const Node& n) {
    chain_.push_back(&n);
    for (size_t i = 0; i < n.children.size(); ++i) {
      if (n.children[i] == nullptr) continue;
      child_index_.push_back(static_cast<int>(i));
      Visit(*n.children[i]);
      child_index_.pop_back();
    }
    chain_.pop_back();
    // Post-order so nested calls (arguments) come after their parents in
    // source order of completion; sites are sorted below anyway.
    if (n.kind == NodeKind::kCall || n.kind == NodeKind::kNew) Match(n);
  }

  std::vector<const specdb::ApiSpec*> WithSuffix(absl::string_view suffix) {
    std::vector<const specdb::ApiSpec*> out;
    for (const auto& api : db_.apis) {
      if (absl::EndsWith(api.name, suffix)) out.push_back(&api);
    }
    return out;
  }

  void Match(const Node& call) {
    const Node* callee = call.child(0);
    if (callee == nullptr) return;
    const specdb::ApiSpec* api = nullptr;
    std::optional<ArgBinding> receiver;
    if (callee->kind == NodeKind::kMember && !callee->flag) {
      const Node* object = callee->child(0);
      if (object->kind == NodeKind::kIdentifier) {
        api = db_.Find(absl::StrCat(object->name, ".", callee->name));
      }
      if (api == nullptr) {
        auto candidates = WithSuffix(absl::StrCat(".prototype.", callee->name));
        if (candidates.empty()) return;
        receiver = Resolve(*object, call);
        receiver->param_name = std::string(specdb::kReceiver);
        api = candidates[0];
        std::optional<JsType> type;
        if (receiver->current_value) type = receiver->current_value->type();
        std::string constructed;
        if (object->kind == NodeKind::kNew && object->child(0) &&
            object->child(0)->kind == NodeKind::kIdentifier) {
          constructed = object->child(0)->name;
        }
        for (const auto* c : candidates) {
          if ((type && internal::ReceiverJsType(c->receiver_type) == type) ||
              (!constructed.empty() &&
               (c->receiver_type == constructed ||
                (c->receiver_type == "%TypedArray%" &&
                 absl::EndsWith(constructed, "Array"))))) {
            api = c;
            break;
          }
        }
      }
    } else if (callee->kind == NodeKind::kIdentifier) {
      api = db_.Find(callee->name);
      if (api != nullptr && api->name.find(' ') != std::string::npos) api = nullptr;
    }
    if (api == nullptr) return;

    CallSite site;
    site.api_name = api->name;
    site.receiver_binding = receiver;
    site.close_paren = call.end - 1;
    // The innermost statement holding the call, and the path below it.
    size_t s = chain_.size();
    while (s > 0 && !chain_[s - 1]->IsStatement()) --s;
    if (s == 0) return;
    site.statement = index_[chain_[s - 1]];
    site.path.assign(child_index_.begin() + (s - 1), child_index_.end());

    const size_t limit = api->parameters.size() + 2;
    for (size_t i = 1; i < call.children.size() && site.args.size() < limit; ++i) {
      const Node& arg = *call.children[i];
      ArgBinding b;
      if (arg.kind == NodeKind::kSpread) {
        b.note = "spread argument";
      } else {
        b = Resolve(arg, call);
      }
      const size_t pi = i - 1;
      b.param_name = pi < api->parameters.size()
                         ? api->parameters[pi].name
                         : absl::StrCat("#extra", pi - api->parameters.size());
      site.args.push_back(std::move(b));
      site.arg_ranges.emplace_back(arg.begin, arg.end);
    }
    for (size_t pi = site.args.size(); pi < api->parameters.size(); ++pi) {
      ArgBinding b;
      b.param_name = api->parameters[pi].name;
      b.kind = ArgBinding::Kind::kLiteral;
      b.current_value = Value::Undefined();
      b.absent = true;
      b.edit_begin = b.edit_end = site.close_paren;
      site.args.push_back(std::move(b));
    }
    sites_.push_back(std::move(site));
  }

  ArgBinding Literal(const Node& expr, Value v) {
    ArgBinding b;
    b.kind = ArgBinding::Kind::kLiteral;
    b.current_value = std::move(v);
    b.edit_begin = expr.begin;
    b.edit_end = expr.end;
    return b;
  }

  static ArgBinding Opaque(std::string why) {
    ArgBinding b;
    b.note = std::move(why);
    return b;
  }

  // Straight-line reaching definition of the identifier `expr`, searched
  // backwards through the statement lists enclosing `call`.
  ArgBinding Resolve(const Node& expr, const Node& call) {
    if (auto v = LiteralValue(expr)) return Literal(expr, *v);
    if (expr.kind != NodeKind::kIdentifier) return Opaque("computed expression");
    const std::string& name = expr.name;
    // chain_ holds the ancestors of `call` (root first) while Match runs.
    const Node* below = &call;
    std::optional<ArgBinding> undeclared_init;
    for (size_t i = chain_.size(); i-- > 0; below = chain_[i]) {
      const Node& a = *chain_[i];
      if (IsFunction(a)) {
        auto params = internal::ParamNames(a);
        auto it = std::find(params.begin(), params.end(), name);
        if (undeclared_init) return *undeclared_init;
        if (it == params.end()) return Opaque("captured or free variable");
        if (&a != entry_node_) return Opaque("parameter of an inner function");
        ArgBinding b;
        b.kind = ArgBinding::Kind::kVariable;
        b.variable = name;
        b.def_statement = entry_->statement;
        b.entry_param = static_cast<int>(it - params.begin());
        return b;
      }
      if (IsLoop(a) && AssignsTo(a, name)) return Opaque("assigned in a loop");
      if (!HoldsStatements(a)) continue;
      auto stmts = js::Statements(a);
      auto pos = std::find(stmts.begin(), stmts.end(), below);
      if (pos == stmts.end()) continue;
      while (pos != stmts.begin()) {
        const Node& st = **--pos;
        if (auto def = CleanDefinition(st, name)) {
          if (def->edit_prefix.empty()) return *def;
          // `var x;` does not reset an earlier value; keep looking.
          if (!undeclared_init) undeclared_init = def;
          continue;
        }
        if (AssignsTo(st, name)) return Opaque("assigned under control flow");
      }
    }
    if (undeclared_init) return *undeclared_init;
    return Opaque("undefined variable");
  }

  // `var name = init;`, `var name;` or `name = init;` as a whole statement.
  std::optional<ArgBinding> CleanDefinition(const Node& st,
                                            absl::string_view name) {
    ArgBinding b;
    b.kind = ArgBinding::Kind::kVariable;
    b.variable = std::string(name);
    b.def_statement = index_[&st];
    if (st.kind == NodeKind::kVarDecl) {
      const Node* decl = nullptr;
      for (const auto& d : st.children) {
        if (d && d->child(0) && d->child(0)->kind == NodeKind::kIdentifier &&
            d->child(0)->name == name) {
          decl = d.get();
        }
      }
      if (decl == nullptr) return std::nullopt;
      if (const Node* init = decl->child(1)) {
        b.current_value = LiteralValue(*init);
        b.edit_begin = init->begin;
        b.edit_end = init->end;
      } else {
        b.current_value = Value::Undefined();
        b.edit_begin = b.edit_end = decl->child(0)->end;
        b.edit_prefix = " = ";
      }
      return b;
    }
    if (st.kind == NodeKind::kExpressionStmt && st.child(0) &&
        st.child(0)->kind == NodeKind::kAssign && st.child(0)->name == "=") {
      const Node& a = *st.child(0);
      if (a.child(0)->kind != NodeKind::kIdentifier || a.child(0)->name != name) {
        return std::nullopt;
      }
      if (AssignsTo(*a.child(1), name)) return std::nullopt;
      b.current_value = LiteralValue(*a.child(1));
      b.edit_begin = a.child(1)->begin;
      b.edit_end = a.child(1)->end;
      return b;
    }
    return std::nullopt;
  }

  const js::Ast& ast_;
  const specdb::SpecDb& db_;
  std::vector<const Node*> statements_;
  absl::flat_hash_map<const Node*, int> index_;
  std::optional<EntryFunction> entry_;
  const Node* entry_node_ = nullptr;
  std::vector<const Node*> chain_;
  std::vector<int> child_index_;
  std::vector<CallSite> sites_;
};

}  // namespace

absl::string_view ArgKindName(ArgBinding::Kind kind) {
  switch (kind) {
    case ArgBinding::Kind::kLiteral: return "literal";
    case ArgBinding::Kind::kVariable: return "variable";
    case ArgBinding::Kind::kOpaque: return "opaque";
  }
  return "opaque";
}

std::optional<EntryFunction> FindEntry(const js::Ast& ast) {
  const Node& root = ast.root();
  int index = 0;
  // Statement indices are pre-order; top-level statements are preceded by
  // the program node and the statements nested in earlier siblings.
  std::optional<EntryFunction> out;
  js::Walk(root, [&](const Node& n) {
    if (out) return false;
    if (!n.IsStatement()) return true;
    const int here = index++;
    if (&n == &root) return true;
    bool top = std::find_if(root.children.begin(), root.children.end(),
                            [&](const auto& c) { return c.get() == &n; }) !=
               root.children.end();
    if (top && n.kind == NodeKind::kFunctionDecl) {
      out = EntryFunction{n.name, internal::ParamNames(n), here};
    } else if (top && n.kind == NodeKind::kVarDecl) {
      for (const auto& d : n.children) {
        const Node* init = d ? d->child(1) : nullptr;
        if (init && IsFunction(*init) &&
            d->child(0)->kind == NodeKind::kIdentifier) {
          out = EntryFunction{d->child(0)->name, internal::ParamNames(*init),
                              here};
          break;
        }
      }
    }
    return true;
  });
  return out;
}

std::vector<CallSite> FindApiCalls(const progen::TestProgram& prog,
                                   const specdb::SpecDb& db) {
  auto ast = js::Parse(prog.source);
  if (!ast.ok()) return {};
  auto sites = Finder(*ast, db).Run();
  std::stable_sort(sites.begin(), sites.end(),
                   [](const CallSite& a, const CallSite& b) {
                     return a.close_paren < b.close_paren;
                   });
  return sites;
}

}  // namespace jsconform::datagen
