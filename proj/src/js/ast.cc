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

#include "jsconform/js/ast.h"

namespace jsconform::js {

absl::string_view NodeKindName(NodeKind kind) {
  switch (kind) {
    case NodeKind::kProgram: return "Program";
    case NodeKind::kFunctionDecl: return "FunctionDecl";
    case NodeKind::kClassDecl: return "ClassDecl";
    case NodeKind::kVarDecl: return "VarDecl";
    case NodeKind::kVarDeclarator: return "VarDeclarator";
    case NodeKind::kBlock: return "Block";
    case NodeKind::kEmpty: return "Empty";
    case NodeKind::kExpressionStmt: return "ExpressionStmt";
    case NodeKind::kIf: return "If";
    case NodeKind::kFor: return "For";
    case NodeKind::kForIn: return "ForIn";
    case NodeKind::kForOf: return "ForOf";
    case NodeKind::kWhile: return "While";
    case NodeKind::kDoWhile: return "DoWhile";
    case NodeKind::kContinue: return "Continue";
    case NodeKind::kBreak: return "Break";
    case NodeKind::kReturn: return "Return";
    case NodeKind::kThrow: return "Throw";
    case NodeKind::kTry: return "Try";
    case NodeKind::kCatch: return "Catch";
    case NodeKind::kSwitch: return "Switch";
    case NodeKind::kCase: return "Case";
    case NodeKind::kLabeled: return "Labeled";
    case NodeKind::kDebugger: return "Debugger";
    case NodeKind::kWith: return "With";
    case NodeKind::kFunctionExpr: return "FunctionExpr";
    case NodeKind::kArrowFunction: return "ArrowFunction";
    case NodeKind::kClassExpr: return "ClassExpr";
    case NodeKind::kClassBody: return "ClassBody";
    case NodeKind::kParams: return "Params";
    case NodeKind::kIdentifier: return "Identifier";
    case NodeKind::kNumber: return "Number";
    case NodeKind::kString: return "String";
    case NodeKind::kTemplate: return "Template";
    case NodeKind::kRegExp: return "RegExp";
    case NodeKind::kBoolean: return "Boolean";
    case NodeKind::kNull: return "Null";
    case NodeKind::kThis: return "This";
    case NodeKind::kSuper: return "Super";
    case NodeKind::kArray: return "Array";
    case NodeKind::kHole: return "Hole";
    case NodeKind::kObject: return "Object";
    case NodeKind::kProperty: return "Property";
    case NodeKind::kSpread: return "Spread";
    case NodeKind::kCall: return "Call";
    case NodeKind::kNew: return "New";
    case NodeKind::kMember: return "Member";
    case NodeKind::kIndex: return "Index";
    case NodeKind::kUnary: return "Unary";
    case NodeKind::kUpdate: return "Update";
    case NodeKind::kBinary: return "Binary";
    case NodeKind::kLogical: return "Logical";
    case NodeKind::kAssign: return "Assign";
    case NodeKind::kConditional: return "Conditional";
    case NodeKind::kSequence: return "Sequence";
    case NodeKind::kMetaProperty: return "MetaProperty";
  }
  return "?";
}

bool Node::IsStatement() const {
  return kind >= NodeKind::kFunctionDecl && kind <= NodeKind::kWith &&
         kind != NodeKind::kVarDeclarator && kind != NodeKind::kCatch &&
         kind != NodeKind::kCase;
}

bool Node::IsExpression() const {
  return kind >= NodeKind::kFunctionExpr && kind != NodeKind::kClassBody &&
         kind != NodeKind::kParams && kind != NodeKind::kHole &&
         kind != NodeKind::kProperty && kind != NodeKind::kSpread;
}

void Walk(const Node& node, const std::function<bool(const Node&)>& visit) {
  if (!visit(node)) return;
  for (const auto& c : node.children) {
    if (c != nullptr) Walk(*c, visit);
  }
}

std::vector<const Node*> Statements(const Node& node) {
  std::vector<const Node*> out;
  size_t first = 0;
  switch (node.kind) {
    case NodeKind::kProgram:
    case NodeKind::kBlock:
      break;
    case NodeKind::kCase:
      first = 1;
      break;
    default:
      return out;
  }
  for (size_t i = first; i < node.children.size(); ++i) {
    if (node.children[i] != nullptr) out.push_back(node.children[i].get());
  }
  return out;
}

}  // namespace jsconform::js
