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

#include "jsconform/reduce.h"

#include <algorithm>
#include <set>

#include "absl/strings/match.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "jsconform/common.h"
#include "jsconform/js/ast.h"

namespace jsconform::reduce {
namespace {

using js::Node;
using js::NodeKind;

constexpr absl::string_view kFlaky = "FlakyOracle: ";

struct Step {
  size_t begin, end;
  std::string text;
};

bool IsFunctionNode(const Node& n) {
  return n.kind == NodeKind::kFunctionDecl || n.kind == NodeKind::kFunctionExpr ||
         n.kind == NodeKind::kArrowFunction;
}

// The top-level statement defining the entry function, and the function
// node itself. Neither is removed.
struct Protected {
  const Node* statement = nullptr;
  const Node* function = nullptr;
};

Protected FindProtected(const js::Ast& ast) {
  auto entry = datagen::FindEntry(ast);
  if (!entry) return {};
  for (const Node* st : js::Statements(ast.root())) {
    if (st->kind == NodeKind::kFunctionDecl && st->name == entry->name) {
      return {st, st};
    }
    if (st->kind == NodeKind::kVarDecl) {
      for (const auto& d : st->children) {
        const Node* init = d->child(1);
        if (d->child(0)->kind == NodeKind::kIdentifier && d->child(0)->name == entry->name &&
            init != nullptr && IsFunctionNode(*init)) {
          return {st, init};
        }
      }
    }
    if (st->kind == NodeKind::kExpressionStmt && st->child(0) &&
        st->child(0)->kind == NodeKind::kAssign) {
      const Node& a = *st->child(0);
      if (a.child(0)->kind == NodeKind::kIdentifier && a.child(0)->name == entry->name &&
          a.child(1) && IsFunctionNode(*a.child(1))) {
        return {st, a.child(1)};
      }
    }
  }
  return {};
}

bool IsNeutralLiteral(const Node& n) {
  switch (n.kind) {
    case NodeKind::kNumber:
    case NodeKind::kString:
    case NodeKind::kBoolean:
    case NodeKind::kNull:
      return true;
    case NodeKind::kIdentifier:
      return n.name == "undefined";
    default:
      return false;
  }
}

// Widens a removal to whole lines when it spans them, so reduced programs
// keep their layout.
Step LineAware(const std::string& src, size_t begin, size_t end) {
  size_t line_start = begin;
  while (line_start > 0 && (src[line_start - 1] == ' ' || src[line_start - 1] == '\t')) {
    --line_start;
  }
  size_t line_end = end;
  while (line_end < src.size() && (src[line_end] == ' ' || src[line_end] == '\t')) {
    ++line_end;
  }
  if ((line_start == 0 || src[line_start - 1] == '\n') && line_end < src.size() &&
      src[line_end] == '\n') {
    return {line_start, line_end + 1, ""};
  }
  return {begin, end, ""};
}

void BySizeDesc(std::vector<Step>& steps) {
  std::stable_sort(steps.begin(), steps.end(), [](const Step& a, const Step& b) {
    return a.end - a.begin > b.end - b.begin;
  });
}

std::vector<std::string> Candidates(const std::string& src) {
  auto ast = js::Parse(src);
  if (!ast.ok()) return {};
  const Protected keep = FindProtected(*ast);
  std::vector<Step> statements, blocks, expressions;
  std::set<const Node*> assign_targets;

  js::Walk(ast->root(), [&](const Node& n) {
    for (const Node* st : js::Statements(n)) {
      if (st != keep.statement) statements.push_back(LineAware(src, st->begin, st->end));
    }
    auto unwrap = [&](const Node* body) {
      if (body == nullptr) return;
      std::string inner =
          body->kind == NodeKind::kBlock
              ? src.substr(body->begin + 1, body->end - body->begin - 2)
              : src.substr(body->begin, body->end - body->begin);
      blocks.push_back({n.begin, n.end, std::move(inner)});
    };
    switch (n.kind) {
      case NodeKind::kIf:
        unwrap(n.child(1));
        unwrap(n.child(2));
        break;
      case NodeKind::kFor:
        unwrap(n.child(3));
        break;
      case NodeKind::kForIn:
      case NodeKind::kForOf:
        unwrap(n.child(2));
        break;
      case NodeKind::kWhile:
      case NodeKind::kWith:
        unwrap(n.child(1));
        break;
      case NodeKind::kDoWhile:
        unwrap(n.child(0));
        break;
      case NodeKind::kTry:
        unwrap(n.child(0));
        if (n.child(1)) unwrap(n.child(1)->child(1));
        unwrap(n.child(2));
        break;
      default:
        break;
    }
    if (n.kind == NodeKind::kAssign || n.kind == NodeKind::kUpdate) {
      if (n.child(0)) assign_targets.insert(n.child(0));
    }
    if (n.IsExpression() && &n != keep.function && !IsNeutralLiteral(n) &&
        !assign_targets.count(&n) && n.end - n.begin > 1) {
      expressions.push_back({n.begin, n.end, "0"});
    }
    return true;
  });
  BySizeDesc(statements);
  BySizeDesc(blocks);
  BySizeDesc(expressions);

  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto* group : {&statements, &blocks, &expressions}) {
    for (const Step& s : *group) {
      std::string cand = src;
      cand.replace(s.begin, s.end - s.begin, s.text);
      if (cand.size() >= src.size() || !seen.insert(cand).second) continue;
      if (!js::IsSyntacticallyValid(cand)) continue;
      out.push_back(std::move(cand));
    }
  }
  return out;
}

datagen::TestCase WithProgram(const datagen::TestCase& tc, std::string source) {
  datagen::TestCase out = tc;
  progen::TestProgram p = progen::TestProgram::FromSource(
      std::move(source), tc.program.origin, tc.program.seed_header);
  p.command_id = tc.program.command_id;
  p.validity = tc.program.validity;
  out.program = std::move(p);
  out.id = ContentHash(out.source());
  return out;
}

}  // namespace

absl::StatusOr<bool> ReductionOracle::operator()(const datagen::TestCase& tc) const {
  if (!replay) return absl::FailedPreconditionError("oracle has no replay function");
  auto v = replay(tc);
  if (!v.ok()) return v.status();
  return v->outcome == outcome && v->deviants == deviants;
}

ReductionOracle HarnessOracle(const harness::Verdict& target,
                              std::vector<harness::Testbed> testbeds,
                              harness::MatrixOptions options) {
  ReductionOracle o;
  o.outcome = target.outcome;
  o.deviants = target.deviants;
  std::sort(o.deviants.begin(), o.deviants.end());
  o.replay = [testbeds = std::move(testbeds), options](
                 const datagen::TestCase& tc) -> absl::StatusOr<harness::Verdict> {
    std::optional<harness::Verdict> got;
    auto summary = harness::RunMatrix(
        testbeds, {harness::FromTestCase(tc)}, options,
        [&](const harness::Verdict& v) { got = v; });
    if (!summary.errors.empty()) {
      return absl::UnavailableError(absl::StrJoin(summary.errors, "; "));
    }
    if (!got) return absl::InternalError("no verdict");
    return *got;
  };
  return o;
}

bool IsFlakyOracle(const absl::Status& status) {
  return status.code() == absl::StatusCode::kAborted &&
         absl::StartsWith(status.message(), kFlaky);
}

std::vector<std::string> SingleSteps(const datagen::TestCase& tc) {
  return Candidates(tc.program.source);
}

absl::StatusOr<ReduceResult> Reduce(const datagen::TestCase& tc,
                                    const ReductionOracle& oracle,
                                    const ReduceOptions& options) {
  ReduceResult result{tc, {}};
  ReduceStats& stats = result.stats;
  auto ask = [&](const datagen::TestCase& c) -> absl::StatusOr<bool> {
    ++stats.oracle_calls;
    return oracle(c);
  };
  auto holds = ask(tc);
  if (!holds.ok()) return holds.status();
  if (!*holds) {
    return absl::FailedPreconditionError(
        absl::StrCat("oracle does not hold on case ", tc.id));
  }
  std::set<std::string> rejected;
  for (;;) {
    ++stats.passes;
    bool progressed = false;
    for (std::string& cand : Candidates(result.tc.program.source)) {
      if (stats.oracle_calls >= options.budget) {
        stats.budget_exhausted = true;
        return result;
      }
      const std::string key = Sha256Hex(cand);
      if (rejected.count(key)) continue;
      datagen::TestCase next = WithProgram(result.tc, std::move(cand));
      auto ok = ask(next);
      if (!ok.ok()) return ok.status();
      if (!*ok) {
        rejected.insert(key);
        continue;
      }
      if (options.confirm) {
        auto again = ask(next);
        if (!again.ok()) return again.status();
        if (!*again) {
          return absl::AbortedError(absl::StrCat(
              kFlaky, "verdict flipped on re-run of candidate ", next.id));
        }
      }
      result.tc = std::move(next);
      ++stats.removals;
      progressed = true;
      break;
    }
    if (!progressed) return result;
  }
}

}  // namespace jsconform::reduce
