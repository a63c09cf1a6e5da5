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
#ifndef METASPEC_TENSOR_HPP
#define METASPEC_TENSOR_HPP

#include <Eigen/Core>

#include <cstddef>
#include <vector>

namespace metaspec
{
    // Dense NCHW tensor of doubles. The buffer is over-aligned: Eigen reductions over
    // unaligned maps pick their summation order from the address, which broke run-to-run
    // reproducibility with plain std::vector storage.
    struct Tensor
    {
        using Buffer = std::vector<double, Eigen::aligned_allocator<double>>;

        int n = 0, c = 0, h = 0, w = 0;
        Buffer data;

        Tensor() = default;
        Tensor(int n_, int c_, int h_, int w_) : n(n_), c(c_), h(h_), w(w_), data(count(), 0.0) {}

        std::size_t count() const { return static_cast<std::size_t>(n) * c * h * w; }
        std::size_t index(int in, int ic, int ih, int iw) const
        {
            return ((static_cast<std::size_t>(in) * c + ic) * h + ih) * w + iw;
        }
        double &operator()(int in, int ic, int ih, int iw) { return data[index(in, ic, ih, iw)]; }
        double operator()(int in, int ic, int ih, int iw) const { return data[index(in, ic, ih, iw)]; }
        double *sample(int in) { return data.data() + static_cast<std::size_t>(in) * c * h * w; }
        const double *sample(int in) const { return data.data() + static_cast<std::size_t>(in) * c * h * w; }
        bool same_shape(const Tensor &o) const { return n == o.n && c == o.c && h == o.h && w == o.w; }
    };

    // Output extent of a 3x3 convolution with padding 1.
    inline int conv_out(int extent, int stride) { return (extent - 1) / stride + 1; }
}

#endif
