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
#ifndef METASPEC_SEMANTIC_HASH_HPP
#define METASPEC_SEMANTIC_HASH_HPP

#include "metaspec/scene.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace metaspec
{
    // Four-level fingerprint, row-major, entries in {0, 1, 2, 3}.
    struct HashFingerprint
    {
        int rows = 0;
        int cols = 0;
        std::vector<std::uint8_t> values;

        std::uint8_t operator()(int r, int c) const { return values[static_cast<std::size_t>(r) * cols + c]; }
        std::size_t size() const { return values.size(); }
        bool operator==(const HashFingerprint &) const = default;
    };

    // Block-mean downsampling. Row block i covers [floor(i K / rx), floor((i+1) K / rx)).
    Matrix resize_mean(const Matrix &m, int rx, int ry);

    // 3: amp >= mean and phase >= mean, 2: amp only, 1: phase only, 0: neither.
    HashFingerprint fingerprint(const SpectrumPair &pair, int rx = 8, int ry = 8);

    int hamming(const HashFingerprint &a, const HashFingerprint &b);

    // 2 bits per cell, four cells per byte, low bits first.
    std::vector<std::uint8_t> pack(const HashFingerprint &f);
    HashFingerprint unpack(const std::vector<std::uint8_t> &bytes, int rows, int cols);

    // One coherence segment of received (RIS-masked) pairs and the masks applied to them.
    struct SegmentBuffer
    {
        std::vector<SpectrumPair> pairs;
        FrameStack amp_masks;
        FrameStack phase_masks;

        void validate() const;
    };

    struct Selection
    {
        int index = 0;    // 0-based position inside the segment
        int richness = 0; // distance of the selected frame to its predecessor
        std::vector<int> distances;
        HashFingerprint fingerprint; // of the selected, un-masked frame
        SpectrumPair pair;           // the selected masked pair
    };

    // Removes the RIS response: amplitude / amp_mask, phase - phase_mask.
    SpectrumPair unmask(const SpectrumPair &masked, const Matrix &amp_mask, const Matrix &phase_mask);

    // Frame k is compared with frame k-1; frame 0 with `previous` (distance 0 without one).
    // Ties go to the lowest index.
    Selection select_frame(const SegmentBuffer &segment, const std::optional<HashFingerprint> &previous,
                           int rx = 8, int ry = 8);

    enum class Sampling
    {
        Hash,
        Uniform
    };

    // Splits `count` frames into consecutive segments of `segment_len` and picks one frame
    // per segment. Returns absolute frame indices plus the richness trace (hash only).
    struct SamplingResult
    {
        std::vector<std::size_t> indices;
        std::vector<int> richness;
    };

    SamplingResult sample_frames(const std::vector<SpectrumPair> &masked, const FrameStack &amp_masks,
                                 const FrameStack &phase_masks, std::size_t segment_len, Sampling mode,
                                 int rx = 8, int ry = 8);
}

#endif
