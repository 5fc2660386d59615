// Copyright 2026 The ragcal Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Stable, platform-independent hashing and counter-based random draws.
//
// Nothing here depends on std::hash or on the standard library's
// distribution implementations, so every value is reproducible across
// compilers and processes.

#ifndef RAGCAL_HASHING_H_
#define RAGCAL_HASHING_H_

#include <cstdint>
#include <string>
#include <string_view>

namespace ragcal {

// 64-bit FNV-1a over the bytes of `data`.
uint64_t Fnv1a64(std::string_view data);

// SplitMix64 finalizer. Bijective on uint64_t.
uint64_t SplitMix64(uint64_t x);

// Order-sensitive combination of two 64-bit values.
uint64_t MixSeeds(uint64_t a, uint64_t b);

// Uniform draw in the open interval (0, 1) addressed by `counter`. The same
// counter always yields the same value.
double CounterUniform(uint64_t counter);

// Standard normal draw addressed by `counter` (Box-Muller on two uniforms
// derived from the counter).
double CounterGaussian(uint64_t counter);

// Lower-case hex SHA-256 digest of `data`.
std::string Sha256Hex(std::string_view data);

}  // namespace ragcal

#endif  // RAGCAL_HASHING_H_
