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
#ifndef METASPEC_CODEC_HPP
#define METASPEC_CODEC_HPP

#include "metaspec/codebook.hpp"
#include "metaspec/scene.hpp"

#include <cstdint>
#include <vector>

namespace metaspec
{
    struct EncodedFrame
    {
        Matrix amp_diff;   // masked amplitude differenced across sensors
        Matrix phase_diff; // phase differences, first column de-masked, times the amplitude mask
        int time_index = 0;
    };

    struct MetaInfo
    {
        int rows = 0;  // K
        int cols = 0;  // L
        int frames = 0; // T
        int shift = 1; // D
        CodebookId codebook;
        std::vector<std::uint64_t> instants; // capture instant of each fused frame
    };

    struct MetaSpectrumPair
    {
        Matrix z_amp;   // (K + (T-1) D) x L
        Matrix z_phase; // same shape
        MetaInfo meta;
    };

    // Differences every column against its left neighbour; column 0 is kept.
    Matrix column_difference(const Matrix &m);
    // Inverse of column_difference: running sum from left to right.
    Matrix column_prefix_sum(const Matrix &m);

    // Masks must be column-constant, otherwise the RIS response does not factor out.
    EncodedFrame differential_encode(const SpectrumPair &masked, const Matrix &amp_mask, const Matrix &phase_mask,
                                     int time_index = 0);

    // Frame i is shifted down by i*D rows and all frames are summed.
    MetaSpectrumPair shift_add(const std::vector<EncodedFrame> &frames, int shift);

    // Stored size over raw size: 1/T + (1 - 1/T) D / K.
    double compression_ratio(int frames, int shift, int rows);

    // Matrix-free form of the structured sensing matrix: z = sum_i shift_i(x_i o mask_i).
    class SensingOperator
    {
    public:
        SensingOperator(FrameStack masks, int shift);

        int rows() const { return rows_; }
        int cols() const { return cols_; }
        int frames() const { return static_cast<int>(masks_.size()); }
        int shift() const { return shift_; }
        int output_rows() const { return rows_ + (frames() - 1) * shift_; }
        const FrameStack &masks() const { return masks_; }

        Matrix forward(const FrameStack &x) const;
        FrameStack adjoint(const Matrix &z) const;
        // Diagonal of Phi Phi^T, laid out like the measurement.
        Matrix gram_diagonal() const;

    private:
        FrameStack masks_;
        int shift_;
        int rows_;
        int cols_;
    };

    struct DifferentialPair
    {
        Matrix amp_diff;
        Matrix phase_diff;
    };

    // Prefix sums across sensors give back absolute amplitude and phase.
    std::vector<SpectrumPair> differential_decode(const std::vector<DifferentialPair> &frames);
}

#endif
