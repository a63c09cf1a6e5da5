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
#include "metaspec/generator.hpp"

#include <cmath>

namespace metaspec
{
    void leaky_forward(const Tensor &in, double slope, Tensor &out)
    {
        out = in;
        for (double &v : out.data)
            if (v < 0.0)
                v *= slope;
    }

    void leaky_backward(const Tensor &in, const Tensor &dout, double slope, Tensor &din)
    {
        require(in.same_shape(dout), "leaky backward shape mismatch");
        din = dout;
        for (std::size_t i = 0; i < din.data.size(); ++i)
            if (in.data[i] < 0.0)
                din.data[i] *= slope;
    }

    void upsample_forward(const Tensor &in, int h, int w, Tensor &out)
    {
        require(h >= 1 && w >= 1, "upsample target must be positive");
        out = Tensor(in.n, in.c, h, w);
        for (int n = 0; n < in.n; ++n)
            for (int c = 0; c < in.c; ++c)
                for (int y = 0; y < h; ++y)
                {
                    const int sy = static_cast<int>(static_cast<long>(y) * in.h / h);
                    for (int x = 0; x < w; ++x)
                        out(n, c, y, x) = in(n, c, sy, static_cast<int>(static_cast<long>(x) * in.w / w));
                }
    }

    void upsample_backward(const Tensor &dout, int h, int w, Tensor &din)
    {
        din = Tensor(dout.n, dout.c, h, w);
        for (int n = 0; n < dout.n; ++n)
            for (int c = 0; c < dout.c; ++c)
                for (int y = 0; y < dout.h; ++y)
                {
                    const int sy = static_cast<int>(static_cast<long>(y) * h / dout.h);
                    for (int x = 0; x < dout.w; ++x)
                        din(n, c, sy, static_cast<int>(static_cast<long>(x) * w / dout.w)) += dout(n, c, y, x);
                }
    }

    Generator::Generator(const GeneratorArch &arch) : arch_(arch)
    {
        require(arch.in_channels >= 1 && arch.out_channels >= 1 && arch.width >= 1, "generator channels must be positive");
        require(arch.depth >= 0, "generator depth must be non-negative");
        std::size_t offset = 0;
        auto add = [&](int cin, int cout, int stride) {
            Conv c{{cin, cout, stride}, offset, offset + static_cast<std::size_t>(cout) * cin * 9};
            offset = c.bias + static_cast<std::size_t>(cout);
            convs_.push_back(c);
        };
        int c = arch.in_channels;
        for (int i = 0; i < arch.depth; ++i, c = arch.width)
            add(c, arch.width, 2);
        for (int i = 0; i < arch.depth; ++i, c = arch.width)
            add(c, arch.width, 1);
        add(c, arch.out_channels, 1);
        params_.assign(offset, 0.0);
    }

    void Generator::initialize(Rng &rng)
    {
        for (const auto &c : convs_)
        {
            const double bound = 1.0 / std::sqrt(static_cast<double>(c.shape.cin) * 9.0);
            for (std::size_t i = c.weight; i < c.bias + static_cast<std::size_t>(c.shape.cout); ++i)
                params_[i] = rng.uniform(-bound, bound);
        }
    }

    void Generator::conv_forward(const Conv &c, const Tensor &in, Tensor &out) const
    {
        const double *w = params_.data() + c.weight;
        const double *b = params_.data() + c.bias;
        if (use_serial_kernels)
            kernels::serial::conv3x3_forward(in, w, b, c.shape, out);
        else
            kernels::parallel::conv3x3_forward(in, w, b, c.shape, out);
    }

    void Generator::conv_backward(const Conv &c, const Tensor &in, const Tensor &dout, std::vector<double> &grad,
                                  Tensor *din) const
    {
        const double *w = params_.data() + c.weight;
        if (use_serial_kernels)
            kernels::serial::conv3x3_backward(in, w, dout, c.shape, grad.data() + c.weight, grad.data() + c.bias, din);
        else
            kernels::parallel::conv3x3_backward(in, w, dout, c.shape, grad.data() + c.weight, grad.data() + c.bias, din);
    }

    const Tensor &Generator::forward(const Tensor &input)
    {
        require(input.c == arch_.in_channels, "generator input channels differ from architecture");
        const int d = arch_.depth;
        input_ = input;
        down_pre_.resize(d);
        down_post_.resize(d);
        up_in_.resize(d);
        up_pre_.resize(d);
        up_post_.resize(d);

        const Tensor *h = &input_;
        for (int i = 0; i < d; ++i)
        {
            conv_forward(convs_[i], *h, down_pre_[i]);
            leaky_forward(down_pre_[i], arch_.slope, down_post_[i]);
            h = &down_post_[i];
        }
        for (int i = 0; i < d; ++i)
        {
            // Mirror the spatial size seen on the way down.
            const Tensor &target = (d - 1 - i == 0) ? input_ : down_post_[d - 2 - i];
            upsample_forward(*h, target.h, target.w, up_in_[i]);
            conv_forward(convs_[d + i], up_in_[i], up_pre_[i]);
            leaky_forward(up_pre_[i], arch_.slope, up_post_[i]);
            h = &up_post_[i];
        }
        conv_forward(convs_.back(), *h, output_);
        return output_;
    }

    void Generator::backward(const Tensor &doutput, std::vector<double> &grad, Tensor *dinput)
    {
        require(doutput.same_shape(output_), "output gradient shape differs from last forward");
        const int d = arch_.depth;
        grad.assign(params_.size(), 0.0);

        Tensor g, tmp;
        const Tensor &last = d > 0 ? up_post_[d - 1] : input_;
        const bool need_input_grad = d > 0 || dinput != nullptr;
        conv_backward(convs_.back(), last, doutput, grad, need_input_grad ? &g : nullptr);
        for (int i = d - 1; i >= 0; --i)
        {
            leaky_backward(up_pre_[i], g, arch_.slope, tmp);
            conv_backward(convs_[d + i], up_in_[i], tmp, grad, &g);
            const Tensor &below = i > 0 ? up_post_[i - 1] : down_post_[d - 1];
            upsample_backward(g, below.h, below.w, tmp);
            g = std::move(tmp);
        }
        for (int i = d - 1; i >= 0; --i)
        {
            leaky_backward(down_pre_[i], g, arch_.slope, tmp);
            const Tensor &in = i > 0 ? down_post_[i - 1] : input_;
            const bool last_stage = i == 0;
            conv_backward(convs_[i], in, tmp, grad, (!last_stage || dinput != nullptr) ? &g : nullptr);
        }
        if (dinput != nullptr)
            *dinput = g;
    }
}
