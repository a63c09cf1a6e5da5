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
#ifndef METASPEC_DECODER_HPP
#define METASPEC_DECODER_HPP

#include "metaspec/codebook.hpp"
#include "metaspec/codec.hpp"
#include "metaspec/generator.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace metaspec
{
    enum class Denoiser
    {
        SteepestDescent,
        TotalVariation
    };

    enum class Prior
    {
        Conv, // untrained generator refitted every outer iteration
        None  // plain preconditioned gradient descent on the data term
    };

    enum class GeneratorLayout
    {
        TimeBatch,   // one shared network, frames as a batch, latent interpolated over time
        ChannelStack // frames stacked as the channels of a single field
    };

    struct DecodeConfig
    {
        double beta1 = 0.5; // amplitude penalty
        double beta2 = 0.5; // phase penalty
        double alpha1 = 1.0; // accepted for completeness, no effect
        double alpha2 = 1.0;
        double step = 0.5; // steepest-descent step s
        int inner_iters = 600;
        int theta_iters = 200;
        int outer_iters = 18;
        std::uint64_t seed = 1;
        Denoiser denoiser = Denoiser::SteepestDescent;
        Prior prior = Prior::Conv;
        GeneratorLayout layout = GeneratorLayout::TimeBatch;
        int width = 16;
        int depth = 3;
        double lr = 0.01;        // Adam learning rate
        double lr_floor = 0.05;  // cosine schedule ends at lr * lr_floor
        double latent_scale = 0.1;
        double tv_lambda = 0.01;
        double early_stop_tol = 0.0; // relative objective change; 0 disables
        bool serial_kernels = false;
        bool backtrack = true; // reject steps that raise the fit objective
        bool keep_better = true; // a refit that ends worse than the previous output is discarded
        bool reinit = false;     // fresh generator weights (and Adam state) at every outer iteration

        void validate() const;
    };

    // Parses `key = value` overrides (same names as the fields above).
    void apply_decode_option(DecodeConfig &cfg, const std::string &key, const std::string &value, int line = 0);

    struct FitResult
    {
        std::vector<double> losses; // objective after every iteration (accepted or kept)
        int rejected = 0;
        int evaluations = 0; // forward passes, halvings included
    };

    // Adam moments; carried between outer iterations when the weights are kept.
    struct AdamState
    {
        std::vector<double> m, v;
        long steps = 0;
        double shrink = 1.0; // step multiplier left by backtracking
    };

    // Minimises ||z - Phi G(e)||^2 + beta ||x - G(e) - t||^2 over the generator weights with
    // Adam-scaled steps; a step that raises the objective is halved (at most 10 times) and
    // dropped if it still does not help.
    FitResult fit_generator(Generator &gen, const Tensor &latent, const Matrix &z, const SensingOperator &op,
                            const FrameStack &x, const FrameStack &t, double beta, const DecodeConfig &cfg,
                            AdamState *adam = nullptr);

    // x <- x - s (x - g - t), `iters` times.
    void update_x_sd(FrameStack &x, const FrameStack &g, const FrameStack &t, double step, int iters);
    // x <- TV-prox(g + t).
    void update_x_tv(FrameStack &x, const FrameStack &g, const FrameStack &t, double lambda, int iters);
    // t <- t + g - x.
    void update_t(FrameStack &t, const FrameStack &g, const FrameStack &x);

    // argmin_u 0.5 ||u - f||^2 + lambda TV(u), isotropic TV, Chambolle's projection iteration.
    Matrix tv_denoise(const Matrix &f, double lambda, int iters);

    double total_variation(const Matrix &m);

    // Objective and quality of one outer iteration.
    struct ChannelTrace
    {
        std::vector<double> objective;
        std::vector<double> psnr; // empty without ground truth
        std::vector<FrameStack> snapshots; // differential estimates per iteration, when requested
    };

    struct ChannelResult
    {
        FrameStack diff; // recovered differential frames
        ChannelTrace trace;
    };

    // Recovers T differential frames from one measurement channel. `truth` holds absolute
    // (prefix-summed) frames and only feeds the trace.
    ChannelResult decode_channel(const Matrix &z, const SensingOperator &op, double beta, std::uint64_t seed,
                                 const DecodeConfig &cfg, const FrameStack *truth = nullptr,
                                 bool keep_snapshots = false, bool nonneg = false);

    struct DecodeTrace
    {
        std::vector<double> objective_amp, objective_phase;
        std::vector<double> psnr_amp, psnr_phase;

        // iter,objective_amp,objective_phase,psnr_amp,psnr_phase
        std::string to_csv() const;
    };

    struct DecodeResult
    {
        std::vector<SpectrumPair> frames;
        DecodeTrace trace;
        std::vector<FrameStack> amp_snapshots, phase_snapshots;
    };

    enum class Channels
    {
        Both,
        Amplitude,
        Phase
    };

    // Decodes both channels independently, then undoes the differential encoding.
    // The amplitude is clamped at zero.
    DecodeResult admm_decode(const MetaSpectrumPair &meta, const RisCodebook &cb, const DecodeConfig &cfg,
                             const std::vector<SpectrumPair> *truth = nullptr, Channels channels = Channels::Both,
                             bool keep_snapshots = false);

    // 10 log10(peak^2 / MSE) with peak = max |truth|; capped at 200 dB.
    double psnr(const FrameStack &estimate, const FrameStack &truth);

    std::string to_string(Denoiser d);
    std::string to_string(Prior p);
    Denoiser parse_denoiser(const std::string &s);
    Prior parse_prior(const std::string &s);
}

#endif
