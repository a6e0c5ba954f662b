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

// Fixpoint test-case reduction: repeatedly remove syntax-tree pieces of the
// program while the differential verdict keeps its signature.

#ifndef JSCONFORM_REDUCE_H_
#define JSCONFORM_REDUCE_H_

#include <functional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "jsconform/datagen.h"
#include "jsconform/harness.h"

namespace jsconform::reduce {

// Holds when a replayed verdict has the target outcome and deviant set.
struct ReductionOracle {
  harness::Outcome outcome = harness::Outcome::kWrongOutput;
  std::vector<std::string> deviants;  // sorted
  std::function<absl::StatusOr<harness::Verdict>(const datagen::TestCase&)> replay;

  absl::StatusOr<bool> operator()(const datagen::TestCase& tc) const;
};

// Replays a case across `testbeds` with RunMatrix. All testbeds take part,
// not only the deviants.
ReductionOracle HarnessOracle(const harness::Verdict& target,
                              std::vector<harness::Testbed> testbeds,
                              harness::MatrixOptions options);

struct ReduceOptions {
  int budget = 2000;  // oracle calls
  // Re-run the oracle on each accepted candidate; a flip aborts.
  bool confirm = true;
};

struct ReduceStats {
  int oracle_calls = 0;
  int removals = 0;
  int passes = 0;
  bool budget_exhausted = false;
};

struct ReduceResult {
  datagen::TestCase tc;
  ReduceStats stats;
};

// Error returned when the oracle gives different answers for the same input.
bool IsFlakyOracle(const absl::Status& status);

// Shrinks tc.program by removing statements, then unwrapping blocks, then
// replacing expressions by a literal, largest first, until no single step
// keeps the oracle true. The entry function and the driver are kept. On
// budget exhaustion the best case so far is returned.
absl::StatusOr<ReduceResult> Reduce(const datagen::TestCase& tc,
                                    const ReductionOracle& oracle,
                                    const ReduceOptions& options = {});

// Every syntactically valid program source one reduction step away from
// `tc.program.source`, in the order Reduce tries them.
std::vector<std::string> SingleSteps(const datagen::TestCase& tc);

}  // namespace jsconform::reduce

#endif  // JSCONFORM_REDUCE_H_
