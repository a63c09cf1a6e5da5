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
#include "metaspec/codec.hpp"
#include "metaspec/kernels.hpp"

namespace metaspec
{
    Matrix column_difference(const Matrix &m)
    {
        Matrix out = m;
        for (Eigen::Index j = m.cols() - 1; j >= 1; --j)
            out.col(j) -= m.col(j - 1);
        return out;
    }

    Matrix column_prefix_sum(const Matrix &m)
    {
        Matrix out = m;
        for (Eigen::Index j = 1; j < m.cols(); ++j)
            out.col(j) += out.col(j - 1);
        return out;
    }

    EncodedFrame differential_encode(const SpectrumPair &masked, const Matrix &amp_mask, const Matrix &phase_mask,
                                     int time_index)
    {
        require(same_shape(masked.amplitude, masked.phase), "spectrum pair channels differ in shape");
        require(same_shape(masked.amplitude, amp_mask) && same_shape(masked.amplitude, phase_mask),
                "mask shape differs from spectrum shape");
        require(is_column_constant(amp_mask) && is_column_constant(phase_mask),
                "RIS masks must be column-constant for differential encoding");
        EncodedFrame f;
        f.time_index = time_index;
        f.amp_diff = column_difference(masked.amplitude);
        Matrix pd = column_difference(masked.phase);
        if (pd.cols() > 0)
            pd.col(0) -= phase_mask.col(0);
        f.phase_diff = pd.cwiseProduct(amp_mask);
        return f;
    }

    MetaSpectrumPair shift_add(const std::vector<EncodedFrame> &frames, int shift)
    {
        require(!frames.empty(), "shift_add needs at least one frame");
        require(shift >= 1, "shift must be at least 1");
        const Eigen::Index K = frames[0].amp_diff.rows(), L = frames[0].amp_diff.cols();
        const Eigen::Index T = static_cast<Eigen::Index>(frames.size());
        MetaSpectrumPair out;
        out.z_amp = Matrix::Zero(K + (T - 1) * shift, L);
        out.z_phase = Matrix::Zero(K + (T - 1) * shift, L);
        for (Eigen::Index i = 0; i < T; ++i)
        {
            const auto &f = frames[i];
            require(f.amp_diff.rows() == K && f.amp_diff.cols() == L && same_shape(f.phase_diff, f.amp_diff),
                    "encoded frames differ in shape");
            out.z_amp.middleRows(i * shift, K) += f.amp_diff;
            out.z_phase.middleRows(i * shift, K) += f.phase_diff;
        }
        out.meta.rows = static_cast<int>(K);
        out.meta.cols = static_cast<int>(L);
        out.meta.frames = static_cast<int>(T);
        out.meta.shift = shift;
        return out;
    }

    double compression_ratio(int frames, int shift, int rows)
    {
        require(frames >= 1 && rows >= 1 && shift >= 0, "invalid compression ratio arguments");
        const double t = frames;
        return 1.0 / t + (1.0 - 1.0 / t) * static_cast<double>(shift) / static_cast<double>(rows);
    }

    SensingOperator::SensingOperator(FrameStack masks, int shift) : masks_(std::move(masks)), shift_(shift)
    {
        require(!masks_.empty(), "sensing operator needs at least one mask");
        require(shift_ >= 1, "shift must be at least 1");
        rows_ = static_cast<int>(masks_[0].rows());
        cols_ = static_cast<int>(masks_[0].cols());
        for (const auto &m : masks_)
            require(m.rows() == rows_ && m.cols() == cols_, "sensing masks differ in shape");
    }

    Matrix SensingOperator::forward(const FrameStack &x) const
    {
        require(x.size() == masks_.size(), "frame count differs from operator");
        for (const auto &f : x)
            require(f.rows() == rows_ && f.cols() == cols_, "frame shape differs from operator");
        Matrix z;
        kernels::parallel::sensing_forward(masks_, x, shift_, z);
        return z;
    }

    FrameStack SensingOperator::adjoint(const Matrix &z) const
    {
        require(z.rows() == output_rows() && z.cols() == cols_, "measurement shape differs from operator");
        FrameStack x;
        kernels::parallel::sensing_adjoint(masks_, z, shift_, x);
        return x;
    }

    Matrix SensingOperator::gram_diagonal() const
    {
        Matrix g = Matrix::Zero(output_rows(), cols_);
        for (int i = 0; i < frames(); ++i)
            g.middleRows(static_cast<Eigen::Index>(i) * shift_, rows_) += masks_[i].cwiseAbs2();
        return g;
    }

    std::vector<SpectrumPair> differential_decode(const std::vector<DifferentialPair> &frames)
    {
        std::vector<SpectrumPair> out;
        out.reserve(frames.size());
        for (const auto &f : frames)
        {
            require(same_shape(f.amp_diff, f.phase_diff), "differential channels differ in shape");
            out.push_back({column_prefix_sum(f.amp_diff), column_prefix_sum(f.phase_diff)});
        }
        return out;
    }
}
