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
#ifndef METASPEC_GENERATOR_HPP
#define METASPEC_GENERATOR_HPP

#include "metaspec/kernels.hpp"
#include "metaspec/rng.hpp"
#include "metaspec/tensor.hpp"

#include <vector>

namespace metaspec
{
    // Elementwise layers with their reverse-mode counterparts.
    void leaky_forward(const Tensor &in, double slope, Tensor &out);
    void leaky_backward(const Tensor &in, const Tensor &dout, double slope, Tensor &din);

    // Nearest-neighbour resize; source index = floor(dst * in / out).
    void upsample_forward(const Tensor &in, int h, int w, Tensor &out);
    void upsample_backward(const Tensor &dout, int h, int w, Tensor &din);

    struct GeneratorArch
    {
        int in_channels = 1;
        int out_channels = 1;
        int width = 16;
        int depth = 3; // stride-2 stages, mirrored by as many upsampling stages
        double slope = 0.2;
    };

    // Encoder-decoder convolutional network without skip connections:
    // depth x (stride-2 conv, leaky), depth x (upsample, conv, leaky), linear 3x3 output conv.
    class Generator
    {
    public:
        explicit Generator(const GeneratorArch &arch = {});

        const GeneratorArch &arch() const { return arch_; }
        std::size_t parameter_count() const { return params_.size(); }
        std::vector<double> &parameters() { return params_; }
        const std::vector<double> &parameters() const { return params_; }

        // Uniform weights and biases in +-1/sqrt(fan_in).
        void initialize(Rng &rng);

        // Caches intermediate activations for backward().
        const Tensor &forward(const Tensor &input);
        // Gradient of the loss w.r.t. the parameters given dL/d(output) of the last forward().
        // Overwrites `grad`; the input gradient is written when `dinput` is non-null.
        void backward(const Tensor &doutput, std::vector<double> &grad, Tensor *dinput = nullptr);

        bool use_serial_kernels = false;

    private:
        struct Conv
        {
            kernels::ConvShape shape;
            std::size_t weight = 0; // offsets into params_
            std::size_t bias = 0;
        };

        void conv_forward(const Conv &c, const Tensor &in, Tensor &out) const;
        void conv_backward(const Conv &c, const Tensor &in, const Tensor &dout, std::vector<double> &grad,
                           Tensor *din) const;

        GeneratorArch arch_;
        std::vector<Conv> convs_; // depth down, depth up, output
        std::vector<double> params_;

        // Activations: input, then per stage the conv output (pre) and activation (post).
        Tensor input_;
        std::vector<Tensor> down_pre_, down_post_;
        std::vector<Tensor> up_in_, up_pre_, up_post_;
        Tensor output_;
    };
}

#endif
