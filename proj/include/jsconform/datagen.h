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

// Test data generation: find the standard-API call sites of a program,
// resolve where their arguments come from, and derive test cases that bind
// spec boundary values and random values to those arguments.

#ifndef JSCONFORM_DATAGEN_H_
#define JSCONFORM_DATAGEN_H_

#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "jsconform/common.h"
#include "jsconform/js/ast.h"
#include "jsconform/progen.h"
#include "jsconform/specdb.h"
#include "jsconform/value.h"
#include "nlohmann/json.hpp"

namespace jsconform::datagen {

// Where an argument's value is decided.
struct ArgBinding {
  enum class Kind {
    kLiteral,   // written at the call site
    kVariable,  // a straight-line definition, or an entry-function parameter
    kOpaque,    // crosses control flow or is computed; not rewritable
  };

  std::string param_name;  // spec parameter, or specdb::kReceiver
  Kind kind = Kind::kOpaque;
  std::optional<Value> current_value;  // when statically known
  // kVariable: the variable and the statement defining it (for a parameter,
  // the function declaration statement).
  std::string variable;
  int def_statement = -1;
  int entry_param = -1;  // index when bound to an entry-function parameter
  // Text to replace when rewriting: the literal, or the initializer of the
  // definition. `edit_prefix` is inserted first (" = " for `var x;`).
  size_t edit_begin = 0, edit_end = 0;
  std::string edit_prefix;
  bool absent = false;  // not passed at the call; appended when rewritten
  std::string note;     // why kOpaque
};

absl::string_view ArgKindName(ArgBinding::Kind kind);

struct CallSite {
  std::string api_name;
  // Index into the program's statements in pre-order, and the child path
  // from that statement to the call expression.
  int statement = 0;
  std::vector<int> path;
  std::vector<ArgBinding> args;  // one per passed argument, then absent ones
  std::optional<ArgBinding> receiver_binding;
  // Byte offsets of each passed argument and of the closing parenthesis.
  std::vector<std::pair<size_t, size_t>> arg_ranges;
  size_t close_paren = 0;
};

// The function a driver invokes: the first top-level function declaration,
// or a top-level variable initialized with a function expression.
struct EntryFunction {
  std::string name;
  std::vector<std::string> params;
  int statement = 0;
};

std::optional<EntryFunction> FindEntry(const js::Ast& ast);

// Call sites naming APIs present in `db`. Empty when the program does not
// parse.
std::vector<CallSite> FindApiCalls(const progen::TestProgram& prog,
                                   const specdb::SpecDb& db);

struct Binding {
  std::string variable;
  Value value;
  // True when the driver passes it to the entry function; false when the
  // program text was rewritten instead.
  bool in_driver = true;
};

struct MutationOrigin {
  enum class Kind { kAsGenerated, kBoundary, kRandom, kArity };
  Kind kind = Kind::kAsGenerated;
  std::string param;   // kBoundary: the mutated parameter
  std::string detail;  // kBoundary: the value; kArity: "drop:<param>"/"extra"
};

absl::string_view MutationKindName(MutationOrigin::Kind kind);

struct TestCase {
  // The program the driver is appended to. For rewritten mutations this is
  // a derived program; `program_id` names the generated original.
  progen::TestProgram program;
  std::string program_id;
  std::vector<Binding> bindings;
  std::string driver;
  MutationOrigin origin;
  std::string api;  // the mutated API; empty when none
  std::vector<std::string> apis_used;
  std::vector<std::string> notes;
  std::string id;  // ContentHash(source())

  std::string source() const { return program.source + driver; }
};

struct DatagenConfig {
  int random_cases_per_site = 3;
};

// Driver appended to `prog`: declares the entry function's arguments from
// `bindings`, calls it inside a try/catch, and prints one canonical line
// (the stringified result, or "EXC <ErrorName>").
absl::StatusOr<TestCase> SynthesizeDriver(const progen::TestProgram& prog,
                                          const std::vector<Binding>& bindings);

// The values each entry-function argument has as generated: taken from a
// top-level call of the entry function when the program contains one,
// otherwise a representative of the type its uses suggest.
std::vector<Binding> AsGeneratedBindings(const progen::TestProgram& prog,
                                         const specdb::SpecDb& db);

// Test cases for one call site: the as-generated case, one case per
// boundary value of each rewritable parameter, random cases, and the arity
// cases (each optional trailing argument dropped, one extra argument).
absl::StatusOr<std::vector<TestCase>> MutateTestData(
    const progen::TestProgram& prog, const CallSite& site,
    const specdb::ApiSpec& spec, const specdb::SpecDb& db,
    const DatagenConfig& cfg, Rng& rng);

// Every case for a program: the as-generated case once, then the mutations
// of each call site in order. Call site i draws from DeriveSeed(seed, i).
std::vector<TestCase> GenerateTestCases(const progen::TestProgram& prog,
                                        const specdb::SpecDb& db,
                                        const DatagenConfig& cfg,
                                        uint64_t seed);

// A value of type `t`. Numbers mix small and large integers, signed zeros,
// infinities, NaN and decimals; strings mix ASCII and non-ASCII text of at
// most 64 characters.
Value RandomValue(JsType t, Rng& rng);

// {program_id, api, apis, mutation_origin, bindings, driver_offset} as
// stored next to each case.
nlohmann::json CaseMeta(const TestCase& tc);
// Rebuilds a case from its stored source and meta. Bindings are not
// restored; the driver text is kept verbatim.
absl::StatusOr<TestCase> CaseFromMeta(std::string source, const nlohmann::json& meta);

}  // namespace jsconform::datagen

#endif  // JSCONFORM_DATAGEN_H_
