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

#include <string>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "jsconform/js/ast.h"

namespace jsconform::js {
namespace {

TEST(ParserTest, AcceptsCommonPrograms) {
  const char* kValid[] = {
      "function foo(str, start, len) { var ret = str.substr(start, len); "
      "return ret; }\nvar s = \"Albert\"; print(foo(s, 0, undefined));",
      "var a = [1, , 3]; for (var i = 0; i < a.length; i++) { a[i] += 1 }",
      "var o = {a: 1, 'b': 2, [k]: 3, get x() { return 1 }, m(y) {}};",
      "var f = (a, b = 2, ...c) => a + b; var g = x => ({x});",
      "label: for (var k in o) { if (k) continue label; else break; }",
      "try { throw new Error('x') } catch (e) { } finally { }",
      "switch (x) { case 1: y(); break; default: z() }",
      "var r = /ab+c/gi.test('abc'); var t = `a${1 + 2}b${`c${3}`}`;",
      "class A extends B { constructor() { super(); } static m() {} #p = 1; }",
      "async function f() { await g(); } function* h() { yield 1; }",
      "a = b\n++c",
      "var x = a ? b : c, y = (1, 2); x ?\?= y?.z?.[0]?.(1);",
      "do x++; while (x < 3)",
      "new Foo; new Foo.Bar(1).baz; new.target;",
      "var v = typeof x === 'undefined' && !y || void 0;",
      "x = 2 ** 3 ** 2; ({a, b: [c]} = d);",
      "",
  };
  for (const char* src : kValid) {
    EXPECT_TRUE(IsSyntacticallyValid(src)) << src << "\n" << Parse(src).status();
  }
}

TEST(ParserTest, RejectsBrokenPrograms) {
  const char* kInvalid[] = {
      "function (",  "var = 1;",       "if (x { }",          "a b",
      "1 = 2;",      "return 1;",      "var x = 'abc",       "{ { }",
      "for (;;",     "x = 0.normalize()", "break;",           "var a = [1, 2;",
      "throw\n1;",   "`abc",           "f(,)",             "try {}",
  };
  for (const char* src : kInvalid) {
    EXPECT_FALSE(IsSyntacticallyValid(src)) << src;
  }
}

TEST(ParserTest, ErrorsCarryLineAndColumn) {
  auto ast = Parse("var a = 1;\nvar = 2;");
  ASSERT_FALSE(ast.ok());
  EXPECT_THAT(std::string(ast.status().message()),
              testing::HasSubstr("SyntaxError at 2:5"));
}

TEST(ParserTest, RangesCoverSourceText) {
  auto ast = Parse("function foo(a) { var r = a.substr(1, 2); return r; }");
  ASSERT_TRUE(ast.ok());
  const Node& fn = *ast->root().child(0);
  EXPECT_EQ(fn.kind, NodeKind::kFunctionDecl);
  EXPECT_EQ(fn.name, "foo");
  const Node* call = nullptr;
  Walk(ast->root(), [&](const Node& n) {
    if (n.kind == NodeKind::kCall) call = &n;
    return true;
  });
  ASSERT_NE(call, nullptr);
  EXPECT_EQ(ast->Text(*call), "a.substr(1, 2)");
  EXPECT_EQ(call->child(0)->name, "substr");
  EXPECT_EQ(Statements(*fn.child(1)).size(), 2u);
}

TEST(ParserTest, ParenthesizedRangeIncludesParens) {
  auto ast = Parse("x = (1 + 2);");
  ASSERT_TRUE(ast.ok());
  const Node& assign = *ast->root().child(0)->child(0);
  EXPECT_EQ(ast->Text(*assign.child(1)), "(1 + 2)");
}

TEST(ParserTest, StringEscapesDecode) {
  auto ast = Parse("'a\\x41\\u0042\\u{1F600}\\n'");
  ASSERT_TRUE(ast.ok());
  const Node& s = *ast->root().child(0)->child(0);
  EXPECT_EQ(s.string_value, "aAB\xF0\x9F\x98\x80\n");
}

}  // namespace
}  // namespace jsconform::js
