// Copyright 2026 The trajrisk Authors
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
//
// Counter-based randomness: every draw is a pure function of
// (seed, repetition, trajectory, record, axis), so noise is reproducible
// across runs, platforms and row orderings, and repetitions never share
// streams.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace trajrisk {

inline constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

namespace detail {

// Philox-4x32 with 10 rounds. 64-bit key, 128-bit counter, 128-bit output.
inline std::array<std::uint32_t, 4> philox4x32(std::uint64_t key,
                                               std::uint64_t counter_hi,
                                               std::uint64_t counter_lo) {
  constexpr std::uint32_t kMul0 = 0xD2511F53u;
  constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  std::uint32_t k0 = static_cast<std::uint32_t>(key);
  std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
  std::array<std::uint32_t, 4> c = {
      static_cast<std::uint32_t>(counter_lo),
      static_cast<std::uint32_t>(counter_lo >> 32),
      static_cast<std::uint32_t>(counter_hi),
      static_cast<std::uint32_t>(counter_hi >> 32)};

  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
    c = {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k0,
         static_cast<std::uint32_t>(p1),
         static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k1,
         static_cast<std::uint32_t>(p0)};
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return c;
}

}  // namespace detail

// One standard normal draw per counter, via Box-Muller on the two 64-bit
// halves of a Philox block. u1 lands in (0, 1] so the log is always finite.
inline double keyed_gaussian(std::uint64_t seed, std::uint32_t repetition,
                             std::uint64_t trajectory_hash,
                             std::uint32_t record_index, std::uint32_t axis) {
  const std::uint64_t counter_lo = (static_cast<std::uint64_t>(repetition) << 40) |
                                   (static_cast<std::uint64_t>(record_index) << 8) |
                                   axis;
  const auto block = detail::philox4x32(seed, trajectory_hash, counter_lo);
  const std::uint64_t a =
      block[0] | (static_cast<std::uint64_t>(block[1]) << 32);
  const std::uint64_t b =
      block[2] | (static_cast<std::uint64_t>(block[3]) << 32);
  constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
  const double u1 = static_cast<double>((a >> 11) + 1) * kScale;
  const double u2 = static_cast<double>(b >> 11) * kScale;
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace trajrisk
