// SPDX-License-Identifier: Apache-2.0
//
// metaspec: RIS-coded compression and recovery of wireless sensing spectra
// Copyright (C) 2026 The metaspec authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
#ifndef METASPEC_RNG_HPP
#define METASPEC_RNG_HPP

#include <cstdint>
#include <random>

namespace metaspec
{
    // Seeded generator with platform-independent sampling. The std::*_distribution
    // templates are implementation-defined, so every draw here is built on the raw
    // 64-bit output of mt19937_64, which the standard fixes bit for bit.
    class Rng
    {
    public:
        explicit Rng(std::uint64_t seed) : engine_(seed) {}

        std::uint64_t next() { return engine_(); }

        // Uniform on [0, 1) with 53 random bits.
        double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

        double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

        // Uniform integer in [0, n), rejection sampled (no modulo bias).
        std::uint64_t index(std::uint64_t n);

        // Standard normal via Box-Muller.
        double normal();

    private:
        std::mt19937_64 engine_;
        double spare_ = 0.0;
        bool has_spare_ = false;
    };

    // Derives an independent stream seed from (seed, stream) with splitmix64 finalisation.
    std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);
}

#endif
