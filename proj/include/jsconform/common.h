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

// Small utilities shared by every stage of the pipeline: content hashing,
// a platform-stable random stream, and whole-file IO.

#ifndef JSCONFORM_COMMON_H_
#define JSCONFORM_COMMON_H_

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"

namespace jsconform {

// Hex-encoded SHA-256 of `data`, truncated to 16 characters. Used as the
// content address of programs, test cases and outputs.
std::string ContentHash(absl::string_view data);

// Full 64-character SHA-256 hex digest.
std::string Sha256Hex(absl::string_view data);

// 64-bit FNV-1a. Stable across platforms and builds.
uint64_t Fnv1a64(absl::string_view data);

// Derives an independent seed for stream `index` of a run seeded with `seed`
// (SplitMix64 finalizer over both inputs).
uint64_t DeriveSeed(uint64_t seed, uint64_t index);

// Deterministic random stream. The distribution helpers are written out
// rather than delegated to <random> distributions, whose output differs
// between standard library implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t Next() { return engine_(); }
  // Uniform integer in [0, n). `n` must be positive.
  uint64_t Uniform(uint64_t n);
  // Uniform integer in [lo, hi].
  int64_t UniformInt(int64_t lo, int64_t hi);
  // Uniform double in [0, 1).
  double UniformReal();
  bool Bernoulli(double p) { return UniformReal() < p; }
  // Index drawn proportionally to `weights` (non-negative, positive sum).
  size_t Weighted(const std::vector<double>& weights);

  template <typename T>
  const T& Pick(const std::vector<T>& items) {
    return items[Uniform(items.size())];
  }

 private:
  std::mt19937_64 engine_;
};

absl::StatusOr<std::string> ReadFile(const std::filesystem::path& path);
absl::Status WriteFile(const std::filesystem::path& path,
                       absl::string_view contents);
// Writes to a sibling temporary and renames, so readers never observe a
// partially written file.
absl::Status WriteFileAtomic(const std::filesystem::path& path,
                             absl::string_view contents);

// A fresh private directory under the system temp dir, removed with its
// contents when the object dies.
class ScopedTempDir {
 public:
  static absl::StatusOr<ScopedTempDir> Create(absl::string_view prefix);
  ScopedTempDir(ScopedTempDir&& other) noexcept : path_(std::move(other.path_)) {
    other.path_.clear();
  }
  ScopedTempDir& operator=(ScopedTempDir&&) = delete;
  ~ScopedTempDir();

  const std::filesystem::path& path() const { return path_; }

 private:
  explicit ScopedTempDir(std::filesystem::path p) : path_(std::move(p)) {}
  std::filesystem::path path_;
};

// Number of whitespace-delimited words in `text`.
size_t CountWords(absl::string_view text);

}  // namespace jsconform

#endif  // JSCONFORM_COMMON_H_
