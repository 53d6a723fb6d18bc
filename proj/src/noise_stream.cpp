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

#include "spikediff/noise_stream.hpp"

#include <cmath>
#include <numbers>

namespace spikediff {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

// 53 random bits mapped to (0, 1).
double to_open_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits =
      ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

NoiseStream::NoiseStream(std::uint64_t master_seed)
    : NoiseStream(master_seed, {}, splitmix64(0x5EEDull)) {}

NoiseStream::NoiseStream(std::uint64_t seed, std::vector<std::uint64_t> path,
                         std::uint64_t path_key)
    : seed_(seed), path_(std::move(path)), path_key_(path_key) {}

NoiseStream NoiseStream::split(std::uint64_t label) const {
  auto child_path = path_;
  child_path.push_back(label);
  const std::uint64_t key = splitmix64(path_key_ ^ splitmix64(label + 1));
  return NoiseStream(seed_, std::move(child_path), key);
}

NoiseStream NoiseStream::split(std::string_view tag) const {
  return split(fnv1a(tag));
}

std::array<std::uint32_t, 4> NoiseStream::next_block() {
  const std::uint64_t pos = position_++;
  const std::array<std::uint32_t, 4> ctr = {
      static_cast<std::uint32_t>(pos), static_cast<std::uint32_t>(pos >> 32),
      static_cast<std::uint32_t>(path_key_),
      static_cast<std::uint32_t>(path_key_ >> 32)};
  const std::array<std::uint32_t, 2> key = {
      static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)};
  return philox4x32(ctr, key);
}

std::uint64_t NoiseStream::next_u64() {
  const auto b = next_block();
  return (static_cast<std::uint64_t>(b[0]) << 32) | b[1];
}

double NoiseStream::uniform() {
  const auto b = next_block();
  return to_open_unit(b[0], b[1]);
}

double NoiseStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double pair[2];
  fill_normal(pair);
  has_spare_ = true;
  spare_ = pair[1];
  return pair[0];
}

void NoiseStream::fill_normal(std::span<double> out) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  std::size_t i = 0;
  while (i < out.size()) {
    const auto b = next_block();
    const double u1 = to_open_unit(b[0], b[1]);
    const double u2 = to_open_unit(b[2], b[3]);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = kTwoPi * u2;
    out[i++] = r * std::cos(theta);
    if (i < out.size()) out[i++] = r * std::sin(theta);
  }
}

}  // namespace spikediff
