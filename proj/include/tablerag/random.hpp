/*
 * Copyright 2026 The tablerag-cpp Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace tablerag {

/// The standard distributions are implementation-defined, so samples would
/// differ between standard libraries. These helpers only rely on the raw
/// mt19937_64 output, which is fully specified.
using Rng = std::mt19937_64;

/// Uniform integer in [0, n). n must be positive.
std::uint64_t uniform_below(Rng& rng, std::uint64_t n);

/// k distinct indices from [0, n) chosen uniformly, returned ascending.
/// k >= n returns every index.
std::vector<std::size_t> sample_sorted(Rng& rng, std::size_t n, std::size_t k);

}  // namespace tablerag
