//
// Copyright 2026 The agedp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "agedp/random.h"

#include <cmath>
#include <numbers>

namespace agedp {
namespace {

// splitmix64 finalizer; used to mix stream identifiers into the seed path.
uint64_t Mix(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 MakeEngine(uint64_t seed, uint64_t path) {
  std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32),
                    static_cast<uint32_t>(path), static_cast<uint32_t>(path >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

Rng::Rng(uint64_t seed, uint64_t stream) : Rng(seed, 0, stream) {}

Rng::Rng(uint64_t seed, uint64_t path, uint64_t stream)
    : seed_(seed), path_(Mix(path ^ Mix(stream))), engine_(MakeEngine(seed_, path_)) {}

Rng Rng::Split(uint64_t stream) const { return Rng(seed_, path_, stream); }

double Rng::Uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::UniformOpen() {
  // (k + 0.5) / 2^53 for k in [0, 2^53) never hits 0 or 1.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::Laplace(double scale) {
  const double u = UniformOpen() - 0.5;
  const double magnitude = -scale * std::log1p(-2.0 * std::abs(u));
  return u < 0 ? -magnitude : magnitude;
}

double Rng::Normal() {
  const double u1 = UniformOpen();
  const double u2 = Uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

int Rng::Categorical(std::span<const double> probabilities) {
  double total = 0.0;
  for (double p : probabilities) total += p;
  const double target = Uniform() * total;
  double cumulative = 0.0;
  int last_positive = 0;
  for (size_t i = 0; i < probabilities.size(); ++i) {
    if (probabilities[i] <= 0.0) continue;
    last_positive = static_cast<int>(i);
    cumulative += probabilities[i];
    if (target < cumulative) return static_cast<int>(i);
  }
  return last_positive;
}

int Rng::Binomial(int n, double p) {
  int successes = 0;
  for (int i = 0; i < n; ++i) {
    if (Uniform() < p) ++successes;
  }
  return successes;
}

}  // namespace agedp
