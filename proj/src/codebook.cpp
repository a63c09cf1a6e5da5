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
#include "metaspec/codebook.hpp"
#include "metaspec/rng.hpp"

#include <algorithm>
#include <cmath>

namespace metaspec
{
    namespace
    {
        void check_dims(int rows, int cols, int bits)
        {
            require(rows >= 1 && cols >= 1, "codebook dimensions must be positive");
            require(bits >= 1 && bits <= 16, "codebook bits must be in [1, 16]");
        }

        bool on_level(double v, const std::vector<double> &levels)
        {
            return std::any_of(levels.begin(), levels.end(),
                               [v](double l) { return std::abs(v - l) <= 1e-12 * std::max(1.0, std::abs(l)); });
        }
    }

    double CodebookId::floor_level() const
    {
        return amp_floor > 0.0 ? amp_floor : std::ldexp(1.0, -bits);
    }

    std::vector<double> amplitude_levels(int bits, double amp_floor)
    {
        require(bits >= 1 && bits <= 16, "codebook bits must be in [1, 16]");
        const double lo = amp_floor > 0.0 ? amp_floor : std::ldexp(1.0, -bits);
        require(lo <= 1.0, "amplitude floor must not exceed 1");
        const int n = 1 << bits;
        std::vector<double> levels(n);
        for (int l = 0; l < n; ++l)
            levels[l] = lo + (1.0 - lo) * static_cast<double>(l) / static_cast<double>(n - 1);
        levels.back() = 1.0;
        return levels;
    }

    std::vector<double> phase_levels(int bits)
    {
        require(bits >= 1 && bits <= 16, "codebook bits must be in [1, 16]");
        const int n = 1 << bits;
        std::vector<double> levels(n);
        for (int l = 0; l < n; ++l)
            levels[l] = 2.0 * kPi * static_cast<double>(l) / static_cast<double>(n);
        return levels;
    }

    RisCodebook gen_codebook(int rows, int cols, int frames, int bits, std::uint64_t seed, double amp_floor)
    {
        require(frames >= 1, "codebook needs at least one frame");
        std::vector<std::uint64_t> instants(frames);
        for (int t = 0; t < frames; ++t)
            instants[t] = static_cast<std::uint64_t>(t);
        return gen_codebook_at(rows, cols, instants, bits, seed, amp_floor);
    }

    RisCodebook gen_codebook_at(int rows, int cols, const std::vector<std::uint64_t> &instants, int bits,
                                std::uint64_t seed, double amp_floor)
    {
        check_dims(rows, cols, bits);
        require(!instants.empty(), "codebook needs at least one frame");
        const auto amp = amplitude_levels(bits, amp_floor);
        const auto pha = phase_levels(bits);

        RisCodebook cb;
        cb.id = CodebookId{seed, bits, rows, cols, amp_floor};
        cb.instants = instants;
        for (const auto n : instants)
        {
            Rng rng(mix_seed(seed, n));
            Matrix a(rows, cols), p(rows, cols);
            for (int k = 0; k < rows; ++k)
            {
                a.row(k).setConstant(amp[rng.index(amp.size())]);
                p.row(k).setConstant(pha[rng.index(pha.size())]);
            }
            cb.amp_masks.push_back(std::move(a));
            cb.phase_masks.push_back(std::move(p));
        }
        return cb;
    }

    bool is_column_constant(const Matrix &mask, double tol)
    {
        for (Eigen::Index j = 1; j < mask.cols(); ++j)
            if ((mask.col(j) - mask.col(0)).cwiseAbs().maxCoeff() > tol)
                return false;
        return true;
    }

    std::string to_string(ViolationKind kind)
    {
        switch (kind)
        {
        case ViolationKind::Shape:
            return "shape";
        case ViolationKind::Positivity:
            return "positivity";
        case ViolationKind::ColumnConstancy:
            return "column-constancy";
        case ViolationKind::AmplitudeLevel:
            return "amplitude-level";
        case ViolationKind::PhaseLevel:
            return "phase-level";
        }
        return "unknown";
    }

    std::vector<Violation> validate_codebook(const RisCodebook &cb, int rows, int cols, int frames)
    {
        std::vector<Violation> out;
        if (cb.frames() != frames || static_cast<int>(cb.phase_masks.size()) != frames)
            out.push_back({ViolationKind::Shape, -1, "expected " + std::to_string(frames) + " frames"});
        if (cb.id.bits < 1 || cb.id.bits > 16)
        {
            out.push_back({ViolationKind::Shape, -1, "bits out of range"});
            return out;
        }
        const auto amp = amplitude_levels(cb.id.bits, cb.id.amp_floor);
        const auto pha = phase_levels(cb.id.bits);
        const std::size_t n = std::min(cb.amp_masks.size(), cb.phase_masks.size());
        for (std::size_t t = 0; t < n; ++t)
        {
            const int f = static_cast<int>(t);
            const Matrix &a = cb.amp_masks[t];
            const Matrix &p = cb.phase_masks[t];
            if (a.rows() != rows || a.cols() != cols || p.rows() != rows || p.cols() != cols)
            {
                out.push_back({ViolationKind::Shape, f, "mask is not " + std::to_string(rows) + "x" + std::to_string(cols)});
                continue;
            }
            if (!(a.array() > 0.0).all())
                out.push_back({ViolationKind::Positivity, f, "amplitude mask has non-positive entries"});
            if (!is_column_constant(a) || !is_column_constant(p))
                out.push_back({ViolationKind::ColumnConstancy, f, "mask columns differ"});
            const bool amp_ok = std::all_of(a.data(), a.data() + a.size(), [&](double v) { return on_level(v, amp); });
            if (!amp_ok)
                out.push_back({ViolationKind::AmplitudeLevel, f, "amplitude entry off the level set"});
            const bool pha_ok = std::all_of(p.data(), p.data() + p.size(), [&](double v) { return on_level(v, pha); });
            if (!pha_ok)
                out.push_back({ViolationKind::PhaseLevel, f, "phase entry off the level set"});
        }
        return out;
    }
}
