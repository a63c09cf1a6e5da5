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
#ifndef METASPEC_KERNELS_HPP
#define METASPEC_KERNELS_HPP

#include "metaspec/tensor.hpp"
#include "metaspec/types.hpp"

// Hot loops in two flavours: `serial` is a plain reference implementation kept for
// testing, `parallel` is what the library uses (OpenMP, im2col + GEMM). Both produce
// the same values up to floating-point reassociation in the GEMM; reductions in the
// parallel versions run in a fixed order so results do not depend on thread count.
namespace metaspec::kernels
{
    // 3x3 convolution, padding 1. weight is [cout][cin][3][3], bias [cout].
    struct ConvShape
    {
        int cin = 1;
        int cout = 1;
        int stride = 1;
    };

    namespace serial
    {
        void sensing_forward(const FrameStack &masks, const FrameStack &x, int shift, Matrix &z);
        void sensing_adjoint(const FrameStack &masks, const Matrix &z, int shift, FrameStack &x);

        void conv3x3_forward(const Tensor &in, const double *weight, const double *bias, const ConvShape &s,
                             Tensor &out);
        // Accumulates into dweight and dbias; overwrites din (skipped when din is null).
        void conv3x3_backward(const Tensor &in, const double *weight, const Tensor &dout, const ConvShape &s,
                              double *dweight, double *dbias, Tensor *din);
    }

    namespace parallel
    {
        void sensing_forward(const FrameStack &masks, const FrameStack &x, int shift, Matrix &z);
        void sensing_adjoint(const FrameStack &masks, const Matrix &z, int shift, FrameStack &x);

        void conv3x3_forward(const Tensor &in, const double *weight, const double *bias, const ConvShape &s,
                             Tensor &out);
        void conv3x3_backward(const Tensor &in, const double *weight, const Tensor &dout, const ConvShape &s,
                              double *dweight, double *dbias, Tensor *din);
    }
}

#endif
