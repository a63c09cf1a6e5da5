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
// Serial reference vs OpenMP kernels on decoder-sized problems.
#include <benchmark/benchmark.h>

#include "metaspec/kernels.hpp"
#include "metaspec/music.hpp"
#include "metaspec/rng.hpp"
#include "metaspec/scene.hpp"
#include "metaspec/scene_file.hpp"

#include <string>
#include <vector>

using namespace metaspec;

namespace
{
    std::vector<double> random_vec(Rng &rng, std::size_t n)
    {
        std::vector<double> v(n);
        for (auto &x : v)
            x = rng.uniform(-0.1, 0.1);
        return v;
    }

    Tensor random_tensor(Rng &rng, int n, int c, int h, int w)
    {
        Tensor t(n, c, h, w);
        for (auto &x : t.data)
            x = rng.normal();
        return t;
    }

    // T=10 latent batch through one 64-channel layer of a 64x8 spectrum
    struct ConvCase
    {
        kernels::ConvShape shape{64, 64, 1};
        Tensor in;
        std::vector<double> w, b;
        ConvCase()
        {
            Rng rng(1);
            in = random_tensor(rng, 10, 64, 64, 8);
            w = random_vec(rng, 64 * 64 * 9);
            b = random_vec(rng, 64);
        }
    };

    template <bool Serial>
    void conv_forward(benchmark::State &state)
    {
        ConvCase c;
        Tensor out;
        for (auto _ : state)
        {
            if constexpr (Serial)
                kernels::serial::conv3x3_forward(c.in, c.w.data(), c.b.data(), c.shape, out);
            else
                kernels::parallel::conv3x3_forward(c.in, c.w.data(), c.b.data(), c.shape, out);
            benchmark::DoNotOptimize(out.data.data());
        }
    }

    template <bool Serial>
    void conv_backward(benchmark::State &state)
    {
        ConvCase c;
        Rng rng(2);
        const Tensor g = random_tensor(rng, 10, 64, 64, 8);
        std::vector<double> dw(c.w.size()), db(c.b.size());
        Tensor din;
        for (auto _ : state)
        {
            if constexpr (Serial)
                kernels::serial::conv3x3_backward(c.in, c.w.data(), g, c.shape, dw.data(), db.data(), &din);
            else
                kernels::parallel::conv3x3_backward(c.in, c.w.data(), g, c.shape, dw.data(), db.data(), &din);
            benchmark::DoNotOptimize(din.data.data());
        }
    }

    FrameStack random_stack(Rng &rng, int T, int rows, int cols, double lo, double hi)
    {
        FrameStack s;
        for (int i = 0; i < T; ++i)
        {
            Matrix m(rows, cols);
            for (Eigen::Index j = 0; j < m.size(); ++j)
                m.data()[j] = rng.uniform(lo, hi);
            s.push_back(m);
        }
        return s;
    }

    template <bool Serial>
    void sensing(benchmark::State &state)
    {
        Rng rng(3);
        const FrameStack masks = random_stack(rng, 10, 64, 8, 0.1, 1.0);
        const FrameStack x = random_stack(rng, 10, 64, 8, -1.0, 1.0);
        Matrix z;
        FrameStack back;
        for (auto _ : state)
        {
            if constexpr (Serial)
            {
                kernels::serial::sensing_forward(masks, x, 1, z);
                kernels::serial::sensing_adjoint(masks, z, 1, back);
            }
            else
            {
                kernels::parallel::sensing_forward(masks, x, 1, z);
                kernels::parallel::sensing_adjoint(masks, z, 1, back);
            }
            benchmark::DoNotOptimize(back.data());
        }
    }

    template <MusicKernel K>
    void music(benchmark::State &state)
    {
        const MultipathScene scene = load_scene(std::string(METASPEC_DATA_DIR) + "/scenes/desk.scene").base;
        const std::vector<ComplexMatrix> frames{gen_cfr(scene, 0.0).values};
        const auto grid = SteeringGrid::defaults(scene.geometry, scene.grid.size());
        const auto model = ArrayModel::of(scene);
        for (auto _ : state)
        {
            auto s = music_spectrum(frames, grid, model, 2, K);
            benchmark::DoNotOptimize(s.values.data());
        }
    }
}

BENCHMARK(conv_forward<true>)->Name("conv_forward/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(conv_forward<false>)->Name("conv_forward/parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(conv_backward<true>)->Name("conv_backward/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(conv_backward<false>)->Name("conv_backward/parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(sensing<true>)->Name("sensing/serial")->Unit(benchmark::kMicrosecond);
BENCHMARK(sensing<false>)->Name("sensing/parallel")->Unit(benchmark::kMicrosecond);
BENCHMARK(music<MusicKernel::Serial>)->Name("music/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(music<MusicKernel::Parallel>)->Name("music/parallel")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
