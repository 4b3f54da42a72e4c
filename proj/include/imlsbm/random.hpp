// Copyright 2026 The imlsbm Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef IMLSBM_RANDOM_HPP_
#define IMLSBM_RANDOM_HPP_

// Seeding and sub-stream derivation.
//
// Every random consumer gets its own std::mt19937_64 engine seeded from a
// 64-bit key.  Keys are derived with the SplitMix64 finalizer:
//
//   stream_seed(seed, tag, index) = mix(seed ^ mix(tag * 2^32 + index + 1))
//
// so layer l of a sample uses stream_seed(seed, kLayerTag, l), restart r of
// k-means uses stream_seed(seed, kKMeansTag, r), and so on.  Streams never
// share state, which keeps results identical under any parallel schedule.

#include <cstdint>
#include <random>

namespace imlsbm {

using Engine = std::mt19937_64;

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

enum class StreamTag : std::uint32_t {
  kLayer = 1,
  kKMeansRestart = 2,
  kEigenStart = 3,
  kLeaveOneOut = 4,
  kReplication = 5,
  kCoReg = 6,
};

inline constexpr std::uint64_t stream_seed(std::uint64_t seed, StreamTag tag,
                                           std::uint64_t index) {
  const std::uint64_t key =
      (static_cast<std::uint64_t>(tag) << 32) + index + 1;
  return splitmix64(seed ^ splitmix64(key));
}

inline Engine make_engine(std::uint64_t seed, StreamTag tag,
                          std::uint64_t index) {
  return Engine(stream_seed(seed, tag, index));
}

// Uniform double in [0, 1) from the top 53 bits of one engine draw.
inline double uniform01(Engine& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

}  // namespace imlsbm

#endif  // IMLSBM_RANDOM_HPP_
