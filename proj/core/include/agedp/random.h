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

#ifndef AGEDP_RANDOM_H_
#define AGEDP_RANDOM_H_

#include <cstdint>
#include <random>
#include <span>

namespace agedp {

// Seeded pseudo-random source. Streams derived with Split() are independent
// of the parent and of each other, which is how Monte Carlo batches and
// per-user simulations are partitioned. All draws are built from raw 64-bit
// engine output so results are identical across standard libraries.
class Rng {
 public:
  explicit Rng(uint64_t seed, uint64_t stream = 0);

  // A child generator keyed by (seed, stream path, `stream`).
  Rng Split(uint64_t stream) const;

  uint64_t NextU64() { return engine_(); }

  // Uniform on [0, 1) with 53 bits of resolution.
  double Uniform();
  // Uniform on the open interval (0, 1).
  double UniformOpen();
  // Laplace(0, scale) by inverse CDF.
  double Laplace(double scale);
  // Standard normal via Box-Muller on UniformOpen().
  double Normal();
  // Index drawn from an unnormalized-or-normalized probability vector.
  int Categorical(std::span<const double> probabilities);
  // Number of successes in `n` Bernoulli(p) trials.
  int Binomial(int n, double p);

  uint64_t seed() const { return seed_; }

 private:
  Rng(uint64_t seed, uint64_t path, uint64_t stream);

  uint64_t seed_;
  uint64_t path_;
  std::mt19937_64 engine_;
};

}  // namespace agedp

#endif  // AGEDP_RANDOM_H_
