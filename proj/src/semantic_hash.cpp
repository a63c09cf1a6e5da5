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
#include "metaspec/semantic_hash.hpp"

#include <cmath>

namespace metaspec
{
    Matrix resize_mean(const Matrix &m, int rx, int ry)
    {
        require(rx >= 1 && ry >= 1, "resize target must be positive");
        require(rx <= m.rows() && ry <= m.cols(), "resize target larger than input");
        const Eigen::Index K = m.rows(), L = m.cols();
        Matrix out(rx, ry);
        for (int i = 0; i < rx; ++i)
        {
            const Eigen::Index r0 = i * K / rx, r1 = (i + 1) * K / rx;
            for (int j = 0; j < ry; ++j)
            {
                const Eigen::Index c0 = j * L / ry, c1 = (j + 1) * L / ry;
                out(i, j) = m.block(r0, c0, r1 - r0, c1 - c0).mean();
            }
        }
        return out;
    }

    namespace
    {
        // Above-or-equal test with slack for rounding in the mean of (near-)constant inputs.
        Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> at_least_mean(const Matrix &m)
        {
            const double mean = m.mean();
            const double tol = 1e-12 * m.cwiseAbs().mean();
            return m.array() >= mean - tol;
        }
    }

    HashFingerprint fingerprint(const SpectrumPair &pair, int rx, int ry)
    {
        require(same_shape(pair.amplitude, pair.phase), "spectrum pair channels differ in shape");
        const auto a = at_least_mean(resize_mean(pair.amplitude, rx, ry));
        const auto p = at_least_mean(resize_mean(pair.phase, rx, ry));
        HashFingerprint f{rx, ry, std::vector<std::uint8_t>(static_cast<std::size_t>(rx) * ry)};
        for (int r = 0; r < rx; ++r)
            for (int c = 0; c < ry; ++c)
                f.values[static_cast<std::size_t>(r) * ry + c] =
                    static_cast<std::uint8_t>((a(r, c) ? 2 : 0) + (p(r, c) ? 1 : 0));
        return f;
    }

    int hamming(const HashFingerprint &a, const HashFingerprint &b)
    {
        require(a.rows == b.rows && a.cols == b.cols && a.size() == b.size(), "fingerprint shapes differ");
        int d = 0;
        for (std::size_t i = 0; i < a.size(); ++i)
            d += a.values[i] != b.values[i];
        return d;
    }

    std::vector<std::uint8_t> pack(const HashFingerprint &f)
    {
        std::vector<std::uint8_t> out((f.size() + 3) / 4, 0);
        for (std::size_t i = 0; i < f.size(); ++i)
        {
            require(f.values[i] < 4, "fingerprint cell outside {0,1,2,3}");
            out[i / 4] |= static_cast<std::uint8_t>(f.values[i] << (2 * (i % 4)));
        }
        return out;
    }

    HashFingerprint unpack(const std::vector<std::uint8_t> &bytes, int rows, int cols)
    {
        require(rows >= 0 && cols >= 0, "negative fingerprint shape");
        const std::size_t n = static_cast<std::size_t>(rows) * cols;
        require(bytes.size() == (n + 3) / 4, "packed fingerprint has the wrong length");
        HashFingerprint f{rows, cols, std::vector<std::uint8_t>(n)};
        for (std::size_t i = 0; i < n; ++i)
            f.values[i] = (bytes[i / 4] >> (2 * (i % 4))) & 3u;
        return f;
    }

    void SegmentBuffer::validate() const
    {
        require(!pairs.empty(), "segment is empty");
        require(amp_masks.size() == pairs.size() && phase_masks.size() == pairs.size(),
                "segment needs one mask pair per frame");
        for (std::size_t i = 0; i < pairs.size(); ++i)
        {
            require(same_shape(pairs[i].amplitude, pairs[0].amplitude) && same_shape(pairs[i].phase, pairs[0].amplitude),
                    "segment frames differ in shape");
            require(same_shape(amp_masks[i], pairs[0].amplitude) && same_shape(phase_masks[i], pairs[0].amplitude),
                    "segment mask shape differs from frame shape");
        }
    }

    SpectrumPair unmask(const SpectrumPair &masked, const Matrix &amp_mask, const Matrix &phase_mask)
    {
        require(same_shape(masked.amplitude, amp_mask) && same_shape(masked.phase, phase_mask),
                "mask shape differs from spectrum shape");
        require((amp_mask.array() > 0.0).all(), "amplitude mask must be positive to un-mask");
        return {masked.amplitude.cwiseQuotient(amp_mask), masked.phase - phase_mask};
    }

    Selection select_frame(const SegmentBuffer &segment, const std::optional<HashFingerprint> &previous, int rx,
                           int ry)
    {
        segment.validate();
        const std::size_t n = segment.pairs.size();
        std::vector<HashFingerprint> prints(n);
        for (std::size_t k = 0; k < n; ++k)
            prints[k] = fingerprint(unmask(segment.pairs[k], segment.amp_masks[k], segment.phase_masks[k]), rx, ry);

        Selection s;
        s.distances.resize(n);
        s.distances[0] = previous ? hamming(prints[0], *previous) : 0;
        for (std::size_t k = 1; k < n; ++k)
            s.distances[k] = hamming(prints[k], prints[k - 1]);
        for (std::size_t k = 1; k < n; ++k)
            if (s.distances[k] > s.distances[s.index])
                s.index = static_cast<int>(k);
        s.richness = s.distances[s.index];
        s.fingerprint = prints[s.index];
        s.pair = segment.pairs[s.index];
        return s;
    }

    SamplingResult sample_frames(const std::vector<SpectrumPair> &masked, const FrameStack &amp_masks,
                                 const FrameStack &phase_masks, std::size_t segment_len, Sampling mode, int rx,
                                 int ry)
    {
        require(segment_len >= 1, "segment length must be at least 1");
        require(amp_masks.size() == masked.size() && phase_masks.size() == masked.size(),
                "need one mask pair per frame");
        SamplingResult out;
        std::optional<HashFingerprint> previous;
        for (std::size_t start = 0; start + segment_len <= masked.size(); start += segment_len)
        {
            if (mode == Sampling::Uniform)
            {
                out.indices.push_back(start);
                continue;
            }
            SegmentBuffer seg;
            for (std::size_t k = start; k < start + segment_len; ++k)
            {
                seg.pairs.push_back(masked[k]);
                seg.amp_masks.push_back(amp_masks[k]);
                seg.phase_masks.push_back(phase_masks[k]);
            }
            Selection s = select_frame(seg, previous, rx, ry);
            out.indices.push_back(start + static_cast<std::size_t>(s.index));
            out.richness.push_back(s.richness);
            previous = std::move(s.fingerprint);
        }
        return out;
    }
}
