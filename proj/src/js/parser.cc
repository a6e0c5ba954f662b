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

// Recursive-descent parser producing jsconform::js::Node trees.
//
// The parser throws a private exception type internally so that each
// production can bail out without threading status through every frame;
// nothing escapes Parse().

#include <memory>
#include <string>
#include <utility>

#include "absl/container/flat_hash_set.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/string_view.h"
#include "jsconform/js/ast.h"
#include "js/lexer.h"

namespace jsconform::js {
namespace {

using NodePtr = std::unique_ptr<Node>;

struct SyntaxFailure {
  absl::Status status;
};

const absl::flat_hash_set<absl::string_view>& ReservedWords() {
  static const auto* words = new absl::flat_hash_set<absl::string_view>{
      "break",  "case",   "catch",  "class",    "const",   "continue",
      "debugger", "default", "delete", "do",    "else",    "export",
      "extends", "finally", "for",  "function", "if",      "import",
      "in",     "instanceof", "new", "return",  "super",   "switch",
      "this",   "throw",  "try",    "typeof",   "var",     "void",
      "while",  "with",   "null",   "true",     "false",   "enum"};
  return *words;
}

bool IsAssignOp(absl::string_view op) {
  static const auto* ops = new absl::flat_hash_set<absl::string_view>{
      "=",   "+=",  "-=",   "*=", "/=", "%=",  "**=", "<<=",
      ">>=", ">>>=", "&=",  "|=", "^=", "&&=", "||=", "?\?="};
  return ops->contains(op);
}

int BinaryPrecedence(absl::string_view op, bool no_in) {
  if (op == "??") return 1;
  if (op == "||") return 2;
  if (op == "&&") return 3;
  if (op == "|") return 4;
  if (op == "^") return 5;
  if (op == "&") return 6;
  if (op == "==" || op == "!=" || op == "===" || op == "!==") return 7;
  if (op == "<" || op == ">" || op == "<=" || op == ">=" || op == "instanceof") {
    return 8;
  }
  if (op == "in") return no_in ? 0 : 8;
  if (op == "<<" || op == ">>" || op == ">>>") return 9;
  if (op == "+" || op == "-") return 10;
  if (op == "*" || op == "/" || op == "%") return 11;
  if (op == "**") return 12;
  return 0;
}

class Parser {
 public:
  explicit Parser(absl::string_view source) : src_(source), lex_(source) {}

  NodePtr ParseProgram() {
    Advance();
    auto program = Make(NodeKind::kProgram, 0);
    while (tok_.kind != TokenKind::kEof) {
      program->children.push_back(ParseStatement());
    }
    program->begin = 0;
    program->end = src_.size();
    return program;
  }

 private:
  struct FunctionContext {
    bool in_function = false;
    bool generator = false;
    bool async = false;
  };

  [[noreturn]] void Fail(absl::string_view what) { FailAt(tok_.begin, what); }
  [[noreturn]] void FailAt(size_t at, absl::string_view what) {
    throw SyntaxFailure{absl::InvalidArgumentError(
        absl::StrCat("SyntaxError at ", lex_.Location(at), ": ", what))};
  }
  [[noreturn]] void Unexpected() {
    if (tok_.kind == TokenKind::kEof) Fail("unexpected end of input");
    Fail(absl::StrCat("unexpected token '", tok_.text, "'"));
  }

  void Advance() {
    prev_end_ = tok_.end;
    if (absl::Status s = lex_.Next(tok_); !s.ok()) throw SyntaxFailure{s};
  }

  // Token after the current one, without consuming anything.
  Token PeekNext() {
    Token saved = tok_;
    size_t saved_pos = lex_.position();
    size_t saved_prev = prev_end_;
    Token next;
    absl::Status s = lex_.Next(next);
    lex_.Reset(saved_pos);
    tok_ = saved;
    prev_end_ = saved_prev;
    if (!s.ok()) {
      next = Token{};
      next.kind = TokenKind::kEof;
    }
    return next;
  }

  bool IsPunct(absl::string_view p) const {
    return tok_.kind == TokenKind::kPunctuator && tok_.text == p;
  }
  bool IsWord(absl::string_view w) const {
    return tok_.kind == TokenKind::kIdentifier && tok_.text == w;
  }
  bool EatPunct(absl::string_view p) {
    if (!IsPunct(p)) return false;
    Advance();
    return true;
  }
  void Expect(absl::string_view p) {
    if (!EatPunct(p)) {
      if (tok_.kind == TokenKind::kEof) Fail(absl::StrCat("expected '", p, "'"));
      Fail(absl::StrCat("expected '", p, "' but found '", tok_.text, "'"));
    }
  }
  void ExpectWord(absl::string_view w) {
    if (!IsWord(w)) Fail(absl::StrCat("expected '", w, "'"));
    Advance();
  }

  void ConsumeSemicolon() {
    if (EatPunct(";")) return;
    if (IsPunct("}") || tok_.kind == TokenKind::kEof || tok_.newline_before) {
      return;
    }
    Unexpected();
  }

  NodePtr Make(NodeKind kind, size_t begin) {
    auto n = std::make_unique<Node>();
    n->kind = kind;
    n->begin = begin;
    return n;
  }
  NodePtr Finish(NodePtr n) {
    n->end = prev_end_;
    return n;
  }

  bool IsIdentifierToken() const {
    if (tok_.kind != TokenKind::kIdentifier) return false;
    if (ReservedWords().contains(tok_.text)) return false;
    if (tok_.text == "yield" && ctx_.generator) return false;
    if (tok_.text == "await" && ctx_.async) return false;
    return true;
  }

  NodePtr ParseIdentifier() {
    if (!IsIdentifierToken()) Unexpected();
    auto n = Make(NodeKind::kIdentifier, tok_.begin);
    n->name = std::string(tok_.text);
    Advance();
    return Finish(std::move(n));
  }

  // ---- Statements ----

  NodePtr ParseStatement() {
    const size_t begin = tok_.begin;
    if (tok_.kind == TokenKind::kPunctuator) {
      if (IsPunct("{")) return ParseBlock();
      if (IsPunct(";")) {
        Advance();
        return Finish(Make(NodeKind::kEmpty, begin));
      }
    }
    if (tok_.kind == TokenKind::kIdentifier) {
      absl::string_view w = tok_.text;
      if (w == "var" || w == "const") return ParseVarStatement();
      if (w == "let") {
        Token next = PeekNext();
        if (next.kind == TokenKind::kIdentifier ||
            (next.kind == TokenKind::kPunctuator &&
             (next.text == "[" || next.text == "{"))) {
          return ParseVarStatement();
        }
      }
      if (w == "function") return ParseFunction(/*declaration=*/true, false);
      if (w == "async") {
        Token next = PeekNext();
        if (next.kind == TokenKind::kIdentifier && next.text == "function" &&
            !next.newline_before) {
          Advance();
          return ParseFunction(/*declaration=*/true, /*async=*/true, begin);
        }
      }
      if (w == "class") return ParseClass(/*declaration=*/true);
      if (w == "if") return ParseIf();
      if (w == "for") return ParseFor();
      if (w == "while") {
        Advance();
        auto n = Make(NodeKind::kWhile, begin);
        n->children.push_back(ParseParenExpression());
        n->children.push_back(ParseLoopBody());
        return Finish(std::move(n));
      }
      if (w == "do") {
        Advance();
        auto n = Make(NodeKind::kDoWhile, begin);
        n->children.push_back(ParseLoopBody());
        ExpectWord("while");
        n->children.push_back(ParseParenExpression());
        EatPunct(";");
        return Finish(std::move(n));
      }
      if (w == "continue" || w == "break") {
        const bool is_break = w == "break";
        Advance();
        auto n = Make(is_break ? NodeKind::kBreak : NodeKind::kContinue, begin);
        if (tok_.kind == TokenKind::kIdentifier && !tok_.newline_before &&
            IsIdentifierToken()) {
          n->name = std::string(tok_.text);
          Advance();
        } else if (!is_break && loop_depth_ == 0) {
          Fail("continue outside of a loop");
        } else if (is_break && loop_depth_ == 0 && switch_depth_ == 0) {
          Fail("break outside of a loop or switch");
        }
        ConsumeSemicolon();
        return Finish(std::move(n));
      }
      if (w == "return") {
        if (!ctx_.in_function) Fail("return outside of a function");
        Advance();
        auto n = Make(NodeKind::kReturn, begin);
        if (!IsPunct(";") && !IsPunct("}") && tok_.kind != TokenKind::kEof &&
            !tok_.newline_before) {
          n->children.push_back(ParseExpression(false));
        }
        ConsumeSemicolon();
        return Finish(std::move(n));
      }
      if (w == "throw") {
        Advance();
        if (tok_.newline_before) Fail("newline after throw");
        auto n = Make(NodeKind::kThrow, begin);
        n->children.push_back(ParseExpression(false));
        ConsumeSemicolon();
        return Finish(std::move(n));
      }
      if (w == "try") return ParseTry();
      if (w == "switch") return ParseSwitch();
      if (w == "with") {
        Advance();
        auto n = Make(NodeKind::kWith, begin);
        n->children.push_back(ParseParenExpression());
        n->children.push_back(ParseStatement());
        return Finish(std::move(n));
      }
      if (w == "debugger") {
        Advance();
        ConsumeSemicolon();
        return Finish(Make(NodeKind::kDebugger, begin));
      }
      if (IsIdentifierToken()) {
        Token next = PeekNext();
        if (next.kind == TokenKind::kPunctuator && next.text == ":") {
          auto n = Make(NodeKind::kLabeled, begin);
          n->name = std::string(tok_.text);
          Advance();
          Advance();
          // Labels make `break label` legal inside plain blocks.
          ++switch_depth_;
          n->children.push_back(ParseStatement());
          --switch_depth_;
          return Finish(std::move(n));
        }
      }
    }
    auto n = Make(NodeKind::kExpressionStmt, begin);
    n->children.push_back(ParseExpression(false));
    ConsumeSemicolon();
    return Finish(std::move(n));
  }

  NodePtr ParseLoopBody() {
    ++loop_depth_;
    NodePtr body = ParseStatement();
    --loop_depth_;
    return body;
  }

  NodePtr ParseBlock() {
    auto n = Make(NodeKind::kBlock, tok_.begin);
    Expect("{");
    while (!IsPunct("}")) {
      if (tok_.kind == TokenKind::kEof) Fail("unterminated block");
      n->children.push_back(ParseStatement());
    }
    Advance();
    return Finish(std::move(n));
  }

  NodePtr ParseParenExpression() {
    Expect("(");
    NodePtr e = ParseExpression(false);
    Expect(")");
    return e;
  }

  NodePtr ParseVarStatement() {
    NodePtr decl = ParseVarDeclaration(/*no_in=*/false);
    ConsumeSemicolon();
    decl->end = prev_end_;
    return decl;
  }

  NodePtr ParseVarDeclaration(bool no_in) {
    auto n = Make(NodeKind::kVarDecl, tok_.begin);
    n->name = std::string(tok_.text);
    Advance();
    do {
      auto d = Make(NodeKind::kVarDeclarator, tok_.begin);
      d->children.push_back(ParseBindingTarget());
      if (EatPunct("=")) {
        d->children.push_back(ParseAssignment(no_in));
      } else {
        d->children.push_back(nullptr);
      }
      n->children.push_back(Finish(std::move(d)));
    } while (EatPunct(","));
    return Finish(std::move(n));
  }

  NodePtr ParseBindingTarget() {
    if (IsPunct("[")) return ParseArrayLiteral();
    if (IsPunct("{")) return ParseObjectLiteral();
    return ParseIdentifier();
  }

  NodePtr ParseIf() {
    auto n = Make(NodeKind::kIf, tok_.begin);
    Advance();
    n->children.push_back(ParseParenExpression());
    n->children.push_back(ParseStatement());
    if (IsWord("else")) {
      Advance();
      n->children.push_back(ParseStatement());
    }
    return Finish(std::move(n));
  }

  NodePtr ParseFor() {
    const size_t begin = tok_.begin;
    Advance();
    if (IsWord("await")) Advance();
    Expect("(");
    NodePtr init;
    if (IsPunct(";")) {
      // no initializer
    } else if (IsWord("var") || IsWord("const") ||
               (IsWord("let") && PeekNext().kind != TokenKind::kPunctuator) ||
               (IsWord("let") && (PeekNext().text == "[" || PeekNext().text == "{"))) {
      init = ParseVarDeclaration(/*no_in=*/true);
    } else {
      init = ParseExpression(/*no_in=*/true);
    }
    if (init != nullptr && (IsWord("in") || IsWord("of"))) {
      const bool of = IsWord("of");
      Advance();
      auto n = Make(of ? NodeKind::kForOf : NodeKind::kForIn, begin);
      n->children.push_back(std::move(init));
      n->children.push_back(of ? ParseAssignment(false) : ParseExpression(false));
      Expect(")");
      n->children.push_back(ParseLoopBody());
      return Finish(std::move(n));
    }
    auto n = Make(NodeKind::kFor, begin);
    n->children.push_back(std::move(init));
    Expect(";");
    n->children.push_back(IsPunct(";") ? nullptr : ParseExpression(false));
    Expect(";");
    n->children.push_back(IsPunct(")") ? nullptr : ParseExpression(false));
    Expect(")");
    n->children.push_back(ParseLoopBody());
    return Finish(std::move(n));
  }

  NodePtr ParseTry() {
    auto n = Make(NodeKind::kTry, tok_.begin);
    Advance();
    n->children.push_back(ParseBlock());
    bool handled = false;
    if (IsWord("catch")) {
      handled = true;
      auto c = Make(NodeKind::kCatch, tok_.begin);
      Advance();
      if (EatPunct("(")) {
        c->children.push_back(ParseBindingTarget());
        Expect(")");
      } else {
        c->children.push_back(nullptr);
      }
      c->children.push_back(ParseBlock());
      n->children.push_back(Finish(std::move(c)));
    } else {
      n->children.push_back(nullptr);
    }
    if (IsWord("finally")) {
      handled = true;
      Advance();
      n->children.push_back(ParseBlock());
    }
    if (!handled) Fail("try without catch or finally");
    return Finish(std::move(n));
  }

  NodePtr ParseSwitch() {
    auto n = Make(NodeKind::kSwitch, tok_.begin);
    Advance();
    n->children.push_back(ParseParenExpression());
    Expect("{");
    ++switch_depth_;
    bool seen_default = false;
    while (!IsPunct("}")) {
      auto c = Make(NodeKind::kCase, tok_.begin);
      if (IsWord("case")) {
        Advance();
        c->children.push_back(ParseExpression(false));
      } else if (IsWord("default")) {
        if (seen_default) Fail("duplicate default clause");
        seen_default = true;
        Advance();
        c->children.push_back(nullptr);
      } else {
        Unexpected();
      }
      Expect(":");
      while (!IsPunct("}") && !IsWord("case") && !IsWord("default")) {
        if (tok_.kind == TokenKind::kEof) Fail("unterminated switch");
        c->children.push_back(ParseStatement());
      }
      n->children.push_back(Finish(std::move(c)));
    }
    --switch_depth_;
    Advance();
    return Finish(std::move(n));
  }

  // `begin` lets callers include a leading `async`.
  NodePtr ParseFunction(bool declaration, bool async, size_t begin = SIZE_MAX) {
    if (begin == SIZE_MAX) begin = tok_.begin;
    ExpectWord("function");
    auto n = Make(declaration ? NodeKind::kFunctionDecl : NodeKind::kFunctionExpr,
                  begin);
    bool generator = EatPunct("*");
    if (tok_.kind == TokenKind::kIdentifier && !IsPunct("(")) {
      if (!IsIdentifierToken() && !(tok_.text == "yield" || tok_.text == "await")) {
        Unexpected();
      }
      n->name = std::string(tok_.text);
      Advance();
    } else if (declaration) {
      Fail("function declaration requires a name");
    }
    n->flag = generator;
    ParseFunctionRest(*n, generator, async);
    return Finish(std::move(n));
  }

  void ParseFunctionRest(Node& fn, bool generator, bool async) {
    FunctionContext saved = ctx_;
    int saved_loop = loop_depth_, saved_switch = switch_depth_;
    ctx_ = {true, generator, async};
    loop_depth_ = switch_depth_ = 0;
    fn.children.push_back(ParseParams());
    fn.children.push_back(ParseBlock());
    ctx_ = saved;
    loop_depth_ = saved_loop;
    switch_depth_ = saved_switch;
  }

  NodePtr ParseParams() {
    auto p = Make(NodeKind::kParams, tok_.begin);
    Expect("(");
    while (!IsPunct(")")) {
      if (IsPunct("...")) {
        auto s = Make(NodeKind::kSpread, tok_.begin);
        Advance();
        s->children.push_back(ParseBindingTarget());
        p->children.push_back(Finish(std::move(s)));
        break;
      }
      NodePtr target = ParseBindingTarget();
      if (IsPunct("=")) {
        auto a = Make(NodeKind::kAssign, target->begin);
        a->name = "=";
        Advance();
        a->children.push_back(std::move(target));
        a->children.push_back(ParseAssignment(false));
        target = Finish(std::move(a));
      }
      p->children.push_back(std::move(target));
      if (!EatPunct(",")) break;
    }
    Expect(")");
    return Finish(std::move(p));
  }

  NodePtr ParseClass(bool declaration) {
    auto n = Make(declaration ? NodeKind::kClassDecl : NodeKind::kClassExpr,
                  tok_.begin);
    Advance();
    if (IsIdentifierToken()) {
      n->name = std::string(tok_.text);
      Advance();
    } else if (declaration) {
      Fail("class declaration requires a name");
    }
    if (IsWord("extends")) {
      Advance();
      n->children.push_back(ParseLeftHandSide());
    } else {
      n->children.push_back(nullptr);
    }
    auto body = Make(NodeKind::kClassBody, tok_.begin);
    Expect("{");
    while (!IsPunct("}")) {
      if (tok_.kind == TokenKind::kEof) Fail("unterminated class body");
      if (EatPunct(";")) continue;
      body->children.push_back(ParseClassMember());
    }
    Advance();
    n->children.push_back(Finish(std::move(body)));
    return Finish(std::move(n));
  }

  NodePtr ParseClassMember() {
    const size_t begin = tok_.begin;
    if (IsWord("static")) {
      Token next = PeekNext();
      if (!(next.kind == TokenKind::kPunctuator &&
            (next.text == "(" || next.text == "="))) {
        Advance();
        if (IsPunct("{")) {
          // Static initialization block.
          auto block = ParseBlockAsFunction();
          block->begin = begin;
          return block;
        }
      }
    }
    NodePtr member = ParseMethodOrProperty(/*in_class=*/true);
    member->begin = begin;
    return member;
  }

  NodePtr ParseBlockAsFunction() {
    auto fn = Make(NodeKind::kFunctionExpr, tok_.begin);
    FunctionContext saved = ctx_;
    ctx_ = {true, false, false};
    fn->children.push_back(Finish(Make(NodeKind::kParams, tok_.begin)));
    fn->children.push_back(ParseBlock());
    ctx_ = saved;
    return Finish(std::move(fn));
  }

  // ---- Expressions ----

  NodePtr ParseExpression(bool no_in) {
    NodePtr first = ParseAssignment(no_in);
    if (!IsPunct(",")) return first;
    auto seq = Make(NodeKind::kSequence, first->begin);
    seq->children.push_back(std::move(first));
    while (EatPunct(",")) seq->children.push_back(ParseAssignment(no_in));
    return Finish(std::move(seq));
  }

  bool ArrowAhead() {
    // Current token is '('; look for the matching ')' followed by '=>'.
    Token saved = tok_;
    size_t saved_pos = lex_.position();
    size_t saved_prev = prev_end_;
    int depth = 0;
    bool arrow = false;
    try {
      while (true) {
        if (tok_.kind == TokenKind::kEof) break;
        if (tok_.kind == TokenKind::kPunctuator) {
          if (tok_.text == "(" || tok_.text == "[" || tok_.text == "{") ++depth;
          if (tok_.text == ")" || tok_.text == "]" || tok_.text == "}") --depth;
        }
        if (tok_.kind == TokenKind::kTemplate && !tok_.template_tail) ++depth;
        Advance();
        if (depth == 0) {
          arrow = IsPunct("=>") && !tok_.newline_before;
          break;
        }
      }
    } catch (const SyntaxFailure&) {
      arrow = false;
    }
    lex_.Reset(saved_pos);
    tok_ = saved;
    prev_end_ = saved_prev;
    return arrow;
  }

  NodePtr ParseArrowFromParams(NodePtr params, size_t begin, bool async) {
    Expect("=>");
    auto n = Make(NodeKind::kArrowFunction, begin);
    n->flag = async;
    n->children.push_back(std::move(params));
    FunctionContext saved = ctx_;
    int saved_loop = loop_depth_, saved_switch = switch_depth_;
    ctx_ = {true, false, async};
    loop_depth_ = switch_depth_ = 0;
    if (IsPunct("{")) {
      n->children.push_back(ParseBlock());
    } else {
      n->children.push_back(ParseAssignment(false));
    }
    ctx_ = saved;
    loop_depth_ = saved_loop;
    switch_depth_ = saved_switch;
    return Finish(std::move(n));
  }

  NodePtr ParseAssignment(bool no_in) {
    const size_t begin = tok_.begin;
    // Arrow functions.
    if (IsWord("async") && !ctx_.generator) {
      Token next = PeekNext();
      if (!next.newline_before) {
        if (next.kind == TokenKind::kIdentifier && next.text != "function") {
          // async x => ...
          Advance();
          if (IsIdentifierToken() && PeekNext().text == "=>") {
            auto params = Make(NodeKind::kParams, tok_.begin);
            params->children.push_back(ParseIdentifier());
            return ParseArrowFromParams(Finish(std::move(params)), begin, true);
          }
          FailAt(begin, "unexpected 'async'");
        }
        if (next.kind == TokenKind::kPunctuator && next.text == "(") {
          Token saved = tok_;
          size_t saved_pos = lex_.position();
          size_t saved_prev = prev_end_;
          Advance();
          if (ArrowAhead()) {
            return ParseArrowFromParams(ParseParams(), begin, true);
          }
          lex_.Reset(saved_pos);
          tok_ = saved;
          prev_end_ = saved_prev;
        }
      }
    }
    if (IsIdentifierToken()) {
      Token next = PeekNext();
      if (next.kind == TokenKind::kPunctuator && next.text == "=>" &&
          !next.newline_before) {
        auto params = Make(NodeKind::kParams, tok_.begin);
        params->children.push_back(ParseIdentifier());
        return ParseArrowFromParams(Finish(std::move(params)), begin, false);
      }
    }
    if (IsPunct("(") && ArrowAhead()) {
      return ParseArrowFromParams(ParseParams(), begin, false);
    }
    if (IsWord("yield") && ctx_.generator) {
      auto y = Make(NodeKind::kUnary, begin);
      y->name = "yield";
      Advance();
      EatPunct("*");
      if (!tok_.newline_before && !IsPunct(")") && !IsPunct("]") &&
          !IsPunct("}") && !IsPunct(",") && !IsPunct(";") && !IsPunct(":") &&
          tok_.kind != TokenKind::kEof) {
        y->children.push_back(ParseAssignment(no_in));
      }
      return Finish(std::move(y));
    }

    NodePtr lhs = ParseConditional(no_in);
    if (tok_.kind == TokenKind::kPunctuator && IsAssignOp(tok_.text)) {
      if (!IsAssignable(*lhs, tok_.text == "=")) {
        Fail("invalid assignment target");
      }
      auto a = Make(NodeKind::kAssign, begin);
      a->name = std::string(tok_.text);
      Advance();
      a->children.push_back(std::move(lhs));
      a->children.push_back(ParseAssignment(no_in));
      return Finish(std::move(a));
    }
    return lhs;
  }

  static bool IsAssignable(const Node& n, bool allow_pattern) {
    switch (n.kind) {
      case NodeKind::kIdentifier:
      case NodeKind::kMember:
      case NodeKind::kIndex:
        return !n.flag;  // optional chains are not assignable
      case NodeKind::kArray:
      case NodeKind::kObject:
        return allow_pattern;
      default:
        return false;
    }
  }

  NodePtr ParseConditional(bool no_in) {
    NodePtr test = ParseBinary(0, no_in);
    if (!IsPunct("?")) return test;
    auto n = Make(NodeKind::kConditional, test->begin);
    Advance();
    n->children.push_back(std::move(test));
    n->children.push_back(ParseAssignment(false));
    Expect(":");
    n->children.push_back(ParseAssignment(no_in));
    return Finish(std::move(n));
  }

  absl::string_view CurrentBinaryOp() const {
    if (tok_.kind == TokenKind::kPunctuator) return tok_.text;
    if (tok_.kind == TokenKind::kIdentifier &&
        (tok_.text == "instanceof" || tok_.text == "in")) {
      return tok_.text;
    }
    return {};
  }

  NodePtr ParseBinary(int min_prec, bool no_in) {
    NodePtr left = ParseUnary();
    while (true) {
      absl::string_view op = CurrentBinaryOp();
      int prec = op.empty() ? 0 : BinaryPrecedence(op, no_in);
      if (prec == 0 || prec <= min_prec) {
        // `**` is right-associative.
        if (!(op == "**" && prec == min_prec && prec != 0)) break;
      }
      std::string op_text(op);
      Advance();
      NodePtr right = ParseBinary(op_text == "**" ? prec - 1 : prec, no_in);
      const bool logical = op_text == "&&" || op_text == "||" || op_text == "??";
      auto n = Make(logical ? NodeKind::kLogical : NodeKind::kBinary, left->begin);
      n->name = std::move(op_text);
      n->children.push_back(std::move(left));
      n->children.push_back(std::move(right));
      left = Finish(std::move(n));
    }
    return left;
  }

  NodePtr ParseUnary() {
    const size_t begin = tok_.begin;
    if (tok_.kind == TokenKind::kPunctuator &&
        (tok_.text == "!" || tok_.text == "~" || tok_.text == "+" ||
         tok_.text == "-")) {
      auto n = Make(NodeKind::kUnary, begin);
      n->name = std::string(tok_.text);
      Advance();
      n->children.push_back(ParseUnary());
      return Finish(std::move(n));
    }
    if (tok_.kind == TokenKind::kIdentifier &&
        (tok_.text == "typeof" || tok_.text == "void" || tok_.text == "delete" ||
         (tok_.text == "await" && ctx_.async))) {
      auto n = Make(NodeKind::kUnary, begin);
      n->name = std::string(tok_.text);
      Advance();
      n->children.push_back(ParseUnary());
      return Finish(std::move(n));
    }
    if (IsPunct("++") || IsPunct("--")) {
      auto n = Make(NodeKind::kUpdate, begin);
      n->name = std::string(tok_.text);
      n->flag = true;
      Advance();
      NodePtr arg = ParseUnary();
      if (!IsAssignable(*arg, false)) FailAt(arg->begin, "invalid update target");
      n->children.push_back(std::move(arg));
      return Finish(std::move(n));
    }
    NodePtr expr = ParseLeftHandSide();
    if ((IsPunct("++") || IsPunct("--")) && !tok_.newline_before) {
      if (!IsAssignable(*expr, false)) Fail("invalid update target");
      auto n = Make(NodeKind::kUpdate, begin);
      n->name = std::string(tok_.text);
      Advance();
      n->children.push_back(std::move(expr));
      return Finish(std::move(n));
    }
    return expr;
  }

  NodePtr ParseLeftHandSide() {
    NodePtr expr = IsWord("new") ? ParseNew() : ParsePrimary();
    return ParseMemberTail(std::move(expr), /*allow_call=*/true);
  }

  NodePtr ParseNew() {
    const size_t begin = tok_.begin;
    Advance();
    if (EatPunct(".")) {
      if (!IsWord("target")) Fail("expected new.target");
      auto m = Make(NodeKind::kMetaProperty, begin);
      m->name = "new.target";
      Advance();
      return Finish(std::move(m));
    }
    NodePtr callee = IsWord("new") ? ParseNew() : ParsePrimary();
    callee = ParseMemberTail(std::move(callee), /*allow_call=*/false);
    auto n = Make(NodeKind::kNew, begin);
    n->children.push_back(std::move(callee));
    if (IsPunct("(")) ParseArguments(*n);
    return Finish(std::move(n));
  }

  void ParseArguments(Node& call) {
    Expect("(");
    while (!IsPunct(")")) {
      if (IsPunct("...")) {
        auto s = Make(NodeKind::kSpread, tok_.begin);
        Advance();
        s->children.push_back(ParseAssignment(false));
        call.children.push_back(Finish(std::move(s)));
      } else {
        call.children.push_back(ParseAssignment(false));
      }
      if (!EatPunct(",")) break;
    }
    Expect(")");
  }

  std::string ParsePropertyNameAfterDot() {
    if (tok_.kind != TokenKind::kIdentifier &&
        tok_.kind != TokenKind::kPrivateName) {
      Fail("expected property name");
    }
    std::string name(tok_.text);
    Advance();
    return name;
  }

  NodePtr ParseMemberTail(NodePtr expr, bool allow_call) {
    while (true) {
      const size_t begin = expr->begin;
      if (IsPunct(".")) {
        Advance();
        auto m = Make(NodeKind::kMember, begin);
        m->name = ParsePropertyNameAfterDot();
        m->children.push_back(std::move(expr));
        expr = Finish(std::move(m));
      } else if (IsPunct("?.")) {
        if (!allow_call) Fail("optional chain in new expression");
        Advance();
        if (IsPunct("(")) {
          auto c = Make(NodeKind::kCall, begin);
          c->flag = true;
          c->children.push_back(std::move(expr));
          ParseArguments(*c);
          expr = Finish(std::move(c));
        } else if (IsPunct("[")) {
          Advance();
          auto m = Make(NodeKind::kIndex, begin);
          m->flag = true;
          m->children.push_back(std::move(expr));
          m->children.push_back(ParseExpression(false));
          Expect("]");
          expr = Finish(std::move(m));
        } else {
          auto m = Make(NodeKind::kMember, begin);
          m->flag = true;
          m->name = ParsePropertyNameAfterDot();
          m->children.push_back(std::move(expr));
          expr = Finish(std::move(m));
        }
      } else if (IsPunct("[")) {
        Advance();
        auto m = Make(NodeKind::kIndex, begin);
        m->children.push_back(std::move(expr));
        m->children.push_back(ParseExpression(false));
        Expect("]");
        expr = Finish(std::move(m));
      } else if (tok_.kind == TokenKind::kTemplate) {
        // Tagged template.
        auto c = Make(NodeKind::kCall, begin);
        c->children.push_back(std::move(expr));
        c->children.push_back(ParseTemplate());
        expr = Finish(std::move(c));
      } else if (allow_call && IsPunct("(")) {
        auto c = Make(NodeKind::kCall, begin);
        c->children.push_back(std::move(expr));
        ParseArguments(*c);
        expr = Finish(std::move(c));
      } else {
        return expr;
      }
    }
  }

  NodePtr ParseTemplate() {
    auto t = Make(NodeKind::kTemplate, tok_.begin);
    t->string_value = tok_.value;
    while (!tok_.template_tail) {
      Advance();
      t->children.push_back(ParseExpression(false));
      if (!IsPunct("}")) Fail("expected '}' in template literal");
      if (absl::Status s = lex_.RescanTemplateContinuation(tok_); !s.ok()) {
        throw SyntaxFailure{s};
      }
      t->string_value += tok_.value;
    }
    Advance();
    return Finish(std::move(t));
  }

  NodePtr ParsePrimary() {
    const size_t begin = tok_.begin;
    switch (tok_.kind) {
      case TokenKind::kNumber: {
        auto n = Make(NodeKind::kNumber, begin);
        n->number_value = tok_.number;
        n->name = std::string(tok_.text);
        Advance();
        return Finish(std::move(n));
      }
      case TokenKind::kString: {
        auto n = Make(NodeKind::kString, begin);
        n->string_value = tok_.value;
        Advance();
        return Finish(std::move(n));
      }
      case TokenKind::kTemplate:
        return ParseTemplate();
      case TokenKind::kPunctuator: {
        if (tok_.text == "(") {
          Advance();
          NodePtr e = ParseExpression(false);
          Expect(")");
          // Keep parentheses inside the node's range so text splices stay
          // balanced.
          e->begin = begin;
          e->end = prev_end_;
          return e;
        }
        if (tok_.text == "[") return ParseArrayLiteral();
        if (tok_.text == "{") return ParseObjectLiteral();
        if (tok_.text == "/" || tok_.text == "/=") {
          if (absl::Status s = lex_.RescanRegExp(tok_); !s.ok()) {
            throw SyntaxFailure{s};
          }
          auto n = Make(NodeKind::kRegExp, begin);
          n->name = std::string(tok_.text);
          Advance();
          return Finish(std::move(n));
        }
        Unexpected();
      }
      case TokenKind::kIdentifier: {
        absl::string_view w = tok_.text;
        if (w == "function") return ParseFunction(false, false);
        if (w == "async" && PeekNext().text == "function" &&
            !PeekNext().newline_before) {
          Advance();
          return ParseFunction(false, true, begin);
        }
        if (w == "class") return ParseClass(false);
        if (w == "this" || w == "super" || w == "null" || w == "true" ||
            w == "false") {
          NodeKind kind = w == "this"    ? NodeKind::kThis
                          : w == "super" ? NodeKind::kSuper
                          : w == "null"  ? NodeKind::kNull
                                         : NodeKind::kBoolean;
          auto n = Make(kind, begin);
          n->name = std::string(w);
          n->flag = w == "true";
          Advance();
          return Finish(std::move(n));
        }
        return ParseIdentifier();
      }
      default:
        Unexpected();
    }
  }

  NodePtr ParseArrayLiteral() {
    auto n = Make(NodeKind::kArray, tok_.begin);
    Expect("[");
    while (!IsPunct("]")) {
      if (IsPunct(",")) {
        auto hole = Make(NodeKind::kHole, tok_.begin);
        hole->end = tok_.begin;
        n->children.push_back(std::move(hole));
        Advance();
        continue;
      }
      if (IsPunct("...")) {
        auto s = Make(NodeKind::kSpread, tok_.begin);
        Advance();
        s->children.push_back(ParseAssignment(false));
        n->children.push_back(Finish(std::move(s)));
      } else {
        n->children.push_back(ParseAssignment(false));
      }
      if (!IsPunct("]")) Expect(",");
    }
    Advance();
    return Finish(std::move(n));
  }

  NodePtr ParseObjectLiteral() {
    auto n = Make(NodeKind::kObject, tok_.begin);
    Expect("{");
    while (!IsPunct("}")) {
      if (IsPunct("...")) {
        auto s = Make(NodeKind::kSpread, tok_.begin);
        Advance();
        s->children.push_back(ParseAssignment(false));
        n->children.push_back(Finish(std::move(s)));
      } else {
        n->children.push_back(ParseMethodOrProperty(/*in_class=*/false));
      }
      if (!IsPunct("}")) Expect(",");
    }
    Advance();
    return Finish(std::move(n));
  }

  // Parses a property key into `prop` (name/flag/child 0).
  void ParsePropertyKey(Node& prop) {
    if (IsPunct("[")) {
      Advance();
      prop.flag = true;
      prop.children.push_back(ParseAssignment(false));
      Expect("]");
      return;
    }
    if (tok_.kind == TokenKind::kIdentifier ||
        tok_.kind == TokenKind::kPrivateName) {
      prop.name = std::string(tok_.text);
    } else if (tok_.kind == TokenKind::kString) {
      prop.name = tok_.value;
    } else if (tok_.kind == TokenKind::kNumber) {
      prop.name = std::string(tok_.text);
    } else {
      Unexpected();
    }
    prop.children.push_back(nullptr);
    Advance();
  }

  bool AtPropertyKeyStart() const {
    return tok_.kind == TokenKind::kIdentifier || tok_.kind == TokenKind::kString ||
           tok_.kind == TokenKind::kNumber ||
           tok_.kind == TokenKind::kPrivateName || IsPunct("[");
  }

  NodePtr ParseMethodOrProperty(bool in_class) {
    auto prop = Make(NodeKind::kProperty, tok_.begin);
    bool async = false, generator = false;
    std::string accessor;
    if ((IsWord("get") || IsWord("set") || IsWord("async")) &&
        tok_.kind == TokenKind::kIdentifier) {
      Token next = PeekNext();
      bool modifier = next.kind == TokenKind::kIdentifier ||
                      next.kind == TokenKind::kString ||
                      next.kind == TokenKind::kNumber ||
                      next.kind == TokenKind::kPrivateName ||
                      (next.kind == TokenKind::kPunctuator &&
                       (next.text == "[" || (next.text == "*" && IsWord("async"))));
      if (modifier && !(IsWord("async") && next.newline_before)) {
        if (IsWord("async")) {
          async = true;
        } else {
          accessor = std::string(tok_.text);
        }
        Advance();
      }
    }
    if (EatPunct("*")) generator = true;
    ParsePropertyKey(*prop);
    if (IsPunct("(")) {
      auto fn = Make(NodeKind::kFunctionExpr, tok_.begin);
      fn->flag = generator;
      ParseFunctionRest(*fn, generator, async);
      prop->children.push_back(Finish(std::move(fn)));
      prop->string_value = accessor.empty() ? "method" : accessor;
      return Finish(std::move(prop));
    }
    if (async || generator || !accessor.empty()) Fail("expected '('");
    if (EatPunct(":")) {
      if (in_class) Fail("unexpected ':' in class body");
      prop->children.push_back(ParseAssignment(false));
      prop->string_value = "init";
      return Finish(std::move(prop));
    }
    if (in_class) {
      // Field definition.
      if (EatPunct("=")) {
        prop->children.push_back(ParseAssignment(false));
      } else {
        prop->children.push_back(nullptr);
      }
      ConsumeSemicolon();
      prop->string_value = "field";
      return Finish(std::move(prop));
    }
    // Shorthand `{a}` or cover-initialized `{a = 1}` (patterns only).
    if (prop->flag || prop->name.empty()) Fail("expected ':'");
    auto id = Make(NodeKind::kIdentifier, prop->begin);
    id->name = prop->name;
    id->end = prev_end_;
    if (EatPunct("=")) {
      auto a = Make(NodeKind::kAssign, prop->begin);
      a->name = "=";
      a->children.push_back(std::move(id));
      a->children.push_back(ParseAssignment(false));
      prop->children.push_back(Finish(std::move(a)));
    } else {
      prop->children.push_back(std::move(id));
    }
    prop->string_value = "shorthand";
    return Finish(std::move(prop));
  }

  absl::string_view src_;
  Lexer lex_;
  Token tok_;
  size_t prev_end_ = 0;
  FunctionContext ctx_;
  int loop_depth_ = 0;
  int switch_depth_ = 0;
};

}  // namespace

absl::StatusOr<Ast> Parse(std::string source) {
  std::unique_ptr<Node> root;
  try {
    Parser parser(source);
    root = parser.ParseProgram();
  } catch (const SyntaxFailure& failure) {
    return failure.status;
  }
  return Ast(std::move(source), std::move(root));
}

bool IsSyntacticallyValid(absl::string_view source) {
  try {
    Parser parser(source);
    parser.ParseProgram();
  } catch (const SyntaxFailure&) {
    return false;
  }
  return true;
}

}  // namespace jsconform::js
