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

// A lightweight JavaScript syntax tree. Every node records the byte range
// it covers in the original source so that consumers can rewrite programs
// by splicing text rather than by pretty-printing trees.

#ifndef JSCONFORM_JS_AST_H_
#define JSCONFORM_JS_AST_H_

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"

namespace jsconform::js {

enum class NodeKind {
  // Statements.
  kProgram,
  kFunctionDecl,
  kClassDecl,
  kVarDecl,        // name = "var" | "let" | "const"
  kVarDeclarator,  // [target, init?]
  kBlock,
  kEmpty,
  kExpressionStmt,
  kIf,       // [test, then, else?]
  kFor,      // [init?, test?, update?, body]
  kForIn,    // [left, right, body]
  kForOf,    // [left, right, body]
  kWhile,    // [test, body]
  kDoWhile,  // [body, test]
  kContinue,
  kBreak,
  kReturn,  // [arg?]
  kThrow,   // [arg]
  kTry,     // [block, catch?, finally?]
  kCatch,   // [param?, block]
  kSwitch,  // [discriminant, case...]
  kCase,    // [test? (null for default), statement...]
  kLabeled,
  kDebugger,
  kWith,  // [object, body]
  // Expressions.
  kFunctionExpr,  // [params, body]
  kArrowFunction,  // [params, body-or-expression]
  kClassExpr,
  kClassBody,
  kParams,
  kIdentifier,
  kNumber,
  kString,
  kTemplate,
  kRegExp,
  kBoolean,
  kNull,
  kThis,
  kSuper,
  kArray,
  kHole,
  kObject,
  kProperty,  // name = key text; [key-expr?, value]
  kSpread,
  kCall,    // [callee, arg...]
  kNew,     // [callee, arg...]
  kMember,  // [object], name = property
  kIndex,   // [object, property]
  kUnary,
  kUpdate,
  kBinary,
  kLogical,
  kAssign,
  kConditional,
  kSequence,
  kMetaProperty,
};

absl::string_view NodeKindName(NodeKind kind);

struct Node {
  NodeKind kind;
  size_t begin = 0;
  size_t end = 0;
  // Identifier name, operator, property key, declaration keyword or label.
  std::string name;
  // Decoded string value for kString; numeric value for kNumber.
  std::string string_value;
  double number_value = 0;
  bool flag = false;  // prefix update, optional chain, computed key, etc.
  // Absent optional children are stored as null.
  std::vector<std::unique_ptr<Node>> children;

  const Node* child(size_t i) const {
    return i < children.size() ? children[i].get() : nullptr;
  }
  size_t size() const { return end - begin; }
  bool IsStatement() const;
  bool IsExpression() const;
};

// A parsed program. Owns its source so ranges stay valid.
class Ast {
 public:
  Ast(std::string source, std::unique_ptr<Node> root)
      : source_(std::move(source)), root_(std::move(root)) {}

  const Node& root() const { return *root_; }
  const std::string& source() const { return source_; }
  absl::string_view Text(const Node& node) const {
    return absl::string_view(source_).substr(node.begin, node.end - node.begin);
  }

 private:
  std::string source_;
  std::unique_ptr<Node> root_;
};

// Parses ECMAScript source (a practical ES2020 subset: no modules, no
// early-error checking). Errors carry "line:column".
absl::StatusOr<Ast> Parse(std::string source);

// True when `source` parses.
bool IsSyntacticallyValid(absl::string_view source);

// Pre-order traversal; `visit` returns false to skip a subtree.
void Walk(const Node& node, const std::function<bool(const Node&)>& visit);

// Statements directly owned by `node` (program, block, case clause); empty
// for every other kind.
std::vector<const Node*> Statements(const Node& node);

}  // namespace jsconform::js

#endif  // JSCONFORM_JS_AST_H_
