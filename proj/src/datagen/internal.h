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

#ifndef JSCONFORM_DATAGEN_INTERNAL_H_
#define JSCONFORM_DATAGEN_INTERNAL_H_

#include <optional>
#include <string>
#include <vector>

#include "absl/strings/string_view.h"
#include "jsconform/datagen.h"
#include "jsconform/js/ast.h"
#include "jsconform/value.h"

namespace jsconform::datagen::internal {

bool IsFunction(const js::Node& n);
// The value of a literal expression (including negated numbers and
// array/object literals of literals); function literals become stubs.
std::optional<Value> LiteralValue(const js::Node& n);
// True when `root` contains a write to the variable `name`.
bool AssignsTo(const js::Node& root, absl::string_view name);
// Parameter names of a function node; patterns get placeholder names.
std::vector<std::string> ParamNames(const js::Node& fn);
std::optional<JsType> ReceiverJsType(absl::string_view receiver);
// The entry function of `prog`, read from its first line when it does not
// parse.
std::optional<EntryFunction> EntryOf(const progen::TestProgram& prog);

}  // namespace jsconform::datagen::internal

#endif  // JSCONFORM_DATAGEN_INTERNAL_H_
