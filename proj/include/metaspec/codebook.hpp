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
#ifndef METASPEC_CODEBOOK_HPP
#define METASPEC_CODEBOOK_HPP

#include "metaspec/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace metaspec
{
    // Everything needed to regenerate a codebook; this is what gets stored on disk.
    struct CodebookId
    {
        std::uint64_t seed = 1;
        int bits = 4;
        int rows = 0; // K
        int cols = 0; // L
        double amp_floor = 0.0; // lowest amplitude level; 0 selects 1/2^bits

        double floor_level() const;
        bool operator==(const CodebookId &) const = default;
    };

    // Per-instant RIS amplitude and phase responses. Every mask is column-constant.
    struct RisCodebook
    {
        CodebookId id;
        std::vector<std::uint64_t> instants; // capture instant each mask belongs to
        FrameStack amp_masks;
        FrameStack phase_masks;

        int frames() const { return static_cast<int>(amp_masks.size()); }
    };

    // 2^bits amplitude levels from the floor up to 1, evenly spaced.
    std::vector<double> amplitude_levels(int bits, double amp_floor = 0.0);
    // 2^bits phase levels 2*pi*l/2^bits.
    std::vector<double> phase_levels(int bits);

    // Masks for instants 0..T-1.
    RisCodebook gen_codebook(int rows, int cols, int frames, int bits, std::uint64_t seed, double amp_floor = 0.0);

    // Masks for arbitrary capture instants. The mask of instant n depends only on (seed, n).
    RisCodebook gen_codebook_at(int rows, int cols, const std::vector<std::uint64_t> &instants, int bits,
                                std::uint64_t seed, double amp_floor = 0.0);

    enum class ViolationKind
    {
        Shape,
        Positivity,
        ColumnConstancy,
        AmplitudeLevel,
        PhaseLevel
    };

    struct Violation
    {
        ViolationKind kind;
        int frame = -1; // -1 when the violation is not frame-specific
        std::string detail;
    };

    std::string to_string(ViolationKind kind);

    std::vector<Violation> validate_codebook(const RisCodebook &cb, int rows, int cols, int frames);

    bool is_column_constant(const Matrix &mask, double tol = 0.0);
}

#endif
