// Copyright 2026 The spikediff Authors.
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

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace spikediff {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Pure
// function of (key, counter); no hidden state.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// A keyed, splittable source of Gaussian and uniform noise.
//
// Output is a pure function of (master seed, stream path, position), so
// substreams can be carved out per trial / purpose / time index without
// coordination between threads. A single instance is not thread-safe; split
// instead of sharing.
class NoiseStream {
 public:
  explicit NoiseStream(std::uint64_t master_seed);

  // Child stream whose path is this path extended by `label`. The child
  // starts at position 0 and does not depend on this stream's position.
  NoiseStream split(std::uint64_t label) const;
  NoiseStream split(std::string_view tag) const;

  std::uint64_t master_seed() const noexcept { return seed_; }
  const std::vector<std::uint64_t>& path() const noexcept { return path_; }
  std::uint64_t position() const noexcept { return position_; }

  // Raw 128-bit block at the current position; advances by one.
  std::array<std::uint32_t, 4> next_block();

  std::uint64_t next_u64();
  // Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();
  double normal();
  // Fills `out` with i.i.d. N(0, 1). Consumes ceil(size / 2) blocks.
  void fill_normal(std::span<double> out);

 private:
  NoiseStream(std::uint64_t seed, std::vector<std::uint64_t> path,
              std::uint64_t path_key);

  std::uint64_t seed_;
  std::vector<std::uint64_t> path_;
  std::uint64_t path_key_;
  std::uint64_t position_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace spikediff
