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
#include "metaspec/kernels.hpp"

#include <omp.h>

namespace metaspec::kernels
{
    namespace
    {
        using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
        using RowMap = Eigen::Map<RowMat>;
        using ConstRowMap = Eigen::Map<const RowMat>;

        void prepare_forward(const FrameStack &masks, const FrameStack &x, int shift, Matrix &z)
        {
            require(!masks.empty() && masks.size() == x.size(), "frame count differs from mask count");
            const Eigen::Index K = masks[0].rows(), L = masks[0].cols();
            z.setZero(K + static_cast<Eigen::Index>(masks.size() - 1) * shift, L);
        }

        void check_conv(const Tensor &in, const ConvShape &s)
        {
            require(in.c == s.cin, "convolution input channels differ from layer");
            require(s.stride == 1 || s.stride == 2, "convolution stride must be 1 or 2");
        }

        // Unfolds one sample into a (cin*9) x (hout*wout) row-major patch matrix.
        void im2col(const double *src, int cin, int h, int w, int stride, int ho, int wo, double *cols)
        {
            const std::size_t hw = static_cast<std::size_t>(ho) * wo;
            for (int ci = 0; ci < cin; ++ci)
                for (int ky = 0; ky < 3; ++ky)
                    for (int kx = 0; kx < 3; ++kx)
                    {
                        double *row = cols + (static_cast<std::size_t>(ci) * 9 + ky * 3 + kx) * hw;
                        for (int oy = 0; oy < ho; ++oy)
                        {
                            const int iy = oy * stride + ky - 1;
                            for (int ox = 0; ox < wo; ++ox)
                            {
                                const int ix = ox * stride + kx - 1;
                                const bool inside = iy >= 0 && iy < h && ix >= 0 && ix < w;
                                row[static_cast<std::size_t>(oy) * wo + ox] =
                                    inside ? src[(static_cast<std::size_t>(ci) * h + iy) * w + ix] : 0.0;
                            }
                        }
                    }
        }

        void col2im(const double *cols, int cin, int h, int w, int stride, int ho, int wo, double *dst)
        {
            const std::size_t hw = static_cast<std::size_t>(ho) * wo;
            std::fill(dst, dst + static_cast<std::size_t>(cin) * h * w, 0.0);
            for (int ci = 0; ci < cin; ++ci)
                for (int ky = 0; ky < 3; ++ky)
                    for (int kx = 0; kx < 3; ++kx)
                    {
                        const double *row = cols + (static_cast<std::size_t>(ci) * 9 + ky * 3 + kx) * hw;
                        for (int oy = 0; oy < ho; ++oy)
                        {
                            const int iy = oy * stride + ky - 1;
                            if (iy < 0 || iy >= h)
                                continue;
                            for (int ox = 0; ox < wo; ++ox)
                            {
                                const int ix = ox * stride + kx - 1;
                                if (ix >= 0 && ix < w)
                                    dst[(static_cast<std::size_t>(ci) * h + iy) * w + ix] +=
                                        row[static_cast<std::size_t>(oy) * wo + ox];
                            }
                        }
                    }
        }
    }

    namespace serial
    {
        void sensing_forward(const FrameStack &masks, const FrameStack &x, int shift, Matrix &z)
        {
            prepare_forward(masks, x, shift, z);
            const Eigen::Index K = masks[0].rows(), L = masks[0].cols();
            for (std::size_t i = 0; i < masks.size(); ++i)
                for (Eigen::Index j = 0; j < L; ++j)
                    for (Eigen::Index k = 0; k < K; ++k)
                        z(static_cast<Eigen::Index>(i) * shift + k, j) += x[i](k, j) * masks[i](k, j);
        }

        void sensing_adjoint(const FrameStack &masks, const Matrix &z, int shift, FrameStack &x)
        {
            const Eigen::Index K = masks[0].rows(), L = masks[0].cols();
            x.assign(masks.size(), Matrix(K, L));
            for (std::size_t i = 0; i < masks.size(); ++i)
                for (Eigen::Index j = 0; j < L; ++j)
                    for (Eigen::Index k = 0; k < K; ++k)
                        x[i](k, j) = z(static_cast<Eigen::Index>(i) * shift + k, j) * masks[i](k, j);
        }

        void conv3x3_forward(const Tensor &in, const double *weight, const double *bias, const ConvShape &s,
                             Tensor &out)
        {
            check_conv(in, s);
            const int ho = conv_out(in.h, s.stride), wo = conv_out(in.w, s.stride);
            out = Tensor(in.n, s.cout, ho, wo);
            for (int n = 0; n < in.n; ++n)
                for (int co = 0; co < s.cout; ++co)
                    for (int oy = 0; oy < ho; ++oy)
                        for (int ox = 0; ox < wo; ++ox)
                        {
                            double acc = bias[co];
                            for (int ci = 0; ci < s.cin; ++ci)
                                for (int ky = 0; ky < 3; ++ky)
                                    for (int kx = 0; kx < 3; ++kx)
                                    {
                                        const int iy = oy * s.stride + ky - 1, ix = ox * s.stride + kx - 1;
                                        if (iy < 0 || iy >= in.h || ix < 0 || ix >= in.w)
                                            continue;
                                        acc += weight[((co * s.cin + ci) * 3 + ky) * 3 + kx] * in(n, ci, iy, ix);
                                    }
                            out(n, co, oy, ox) = acc;
                        }
        }

        void conv3x3_backward(const Tensor &in, const double *weight, const Tensor &dout, const ConvShape &s,
                              double *dweight, double *dbias, Tensor *din)
        {
            check_conv(in, s);
            if (din != nullptr)
                *din = Tensor(in.n, in.c, in.h, in.w);
            for (int n = 0; n < in.n; ++n)
                for (int co = 0; co < s.cout; ++co)
                    for (int oy = 0; oy < dout.h; ++oy)
                        for (int ox = 0; ox < dout.w; ++ox)
                        {
                            const double g = dout(n, co, oy, ox);
                            dbias[co] += g;
                            for (int ci = 0; ci < s.cin; ++ci)
                                for (int ky = 0; ky < 3; ++ky)
                                    for (int kx = 0; kx < 3; ++kx)
                                    {
                                        const int iy = oy * s.stride + ky - 1, ix = ox * s.stride + kx - 1;
                                        if (iy < 0 || iy >= in.h || ix < 0 || ix >= in.w)
                                            continue;
                                        const std::size_t wi = ((co * s.cin + ci) * 3 + ky) * 3 + kx;
                                        dweight[wi] += g * in(n, ci, iy, ix);
                                        if (din != nullptr)
                                            (*din)(n, ci, iy, ix) += g * weight[wi];
                                    }
                        }
        }
    }

    namespace parallel
    {
        void sensing_forward(const FrameStack &masks, const FrameStack &x, int shift, Matrix &z)
        {
            prepare_forward(masks, x, shift, z);
            const Eigen::Index K = masks[0].rows(), L = masks[0].cols();
            const Eigen::Index T = static_cast<Eigen::Index>(masks.size());
            // Columns are independent; within a column frames are summed in order.
#pragma omp parallel for schedule(static)
            for (Eigen::Index j = 0; j < L; ++j)
                for (Eigen::Index i = 0; i < T; ++i)
                    z.col(j).segment(i * shift, K) += x[i].col(j).cwiseProduct(masks[i].col(j));
        }

        void sensing_adjoint(const FrameStack &masks, const Matrix &z, int shift, FrameStack &x)
        {
            const Eigen::Index K = masks[0].rows(), L = masks[0].cols();
            const Eigen::Index T = static_cast<Eigen::Index>(masks.size());
            x.assign(masks.size(), Matrix(K, L));
#pragma omp parallel for schedule(static)
            for (Eigen::Index i = 0; i < T; ++i)
                x[i] = z.middleRows(i * shift, K).cwiseProduct(masks[i]);
        }

        void conv3x3_forward(const Tensor &in, const double *weight, const double *bias, const ConvShape &s,
                             Tensor &out)
        {
            check_conv(in, s);
            const int ho = conv_out(in.h, s.stride), wo = conv_out(in.w, s.stride);
            const int hw = ho * wo, kk = s.cin * 9;
            out = Tensor(in.n, s.cout, ho, wo);
            ConstRowMap W(weight, s.cout, kk);
            const Eigen::Map<const Eigen::VectorXd> b(bias, s.cout);
#pragma omp parallel
            {
                RowMat cols(kk, hw);
#pragma omp for schedule(static)
                for (int n = 0; n < in.n; ++n)
                {
                    im2col(in.sample(n), s.cin, in.h, in.w, s.stride, ho, wo, cols.data());
                    RowMap o(out.sample(n), s.cout, hw);
                    o.noalias() = W * cols;
                    o.colwise() += b;
                }
            }
        }

        void conv3x3_backward(const Tensor &in, const double *weight, const Tensor &dout, const ConvShape &s,
                              double *dweight, double *dbias, Tensor *din)
        {
            check_conv(in, s);
            const int ho = dout.h, wo = dout.w;
            const int hw = ho * wo, kk = s.cin * 9;
            ConstRowMap W(weight, s.cout, kk);
            if (din != nullptr)
                *din = Tensor(in.n, in.c, in.h, in.w);
            // Per-sample partial gradients, summed afterwards in sample order.
            std::vector<RowMat> dw(in.n);
            std::vector<Eigen::VectorXd> db(in.n);
#pragma omp parallel
            {
                RowMat cols(kk, hw), dcols(kk, hw);
#pragma omp for schedule(static)
                for (int n = 0; n < in.n; ++n)
                {
                    im2col(in.sample(n), s.cin, in.h, in.w, s.stride, ho, wo, cols.data());
                    ConstRowMap g(dout.sample(n), s.cout, hw);
                    dw[n].noalias() = g * cols.transpose();
                    db[n] = g.rowwise().sum();
                    if (din != nullptr)
                    {
                        dcols.noalias() = W.transpose() * g;
                        col2im(dcols.data(), s.cin, in.h, in.w, s.stride, ho, wo, din->sample(n));
                    }
                }
            }
            RowMap dW(dweight, s.cout, kk);
            Eigen::Map<Eigen::VectorXd> dB(dbias, s.cout);
            for (int n = 0; n < in.n; ++n)
            {
                dW += dw[n];
                dB += db[n];
            }
        }
    }
}
