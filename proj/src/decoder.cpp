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
#include "metaspec/decoder.hpp"
#include "metaspec/config.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace metaspec
{
    void DecodeConfig::validate() const
    {
        require(beta1 > 0.0 && beta2 > 0.0, "beta1 and beta2 must be positive");
        require(step > 0.0 && step < 2.0, "steepest-descent step must lie in (0, 2)");
        require(inner_iters >= 1 && theta_iters >= 1 && outer_iters >= 1, "iteration counts must be at least 1");
        require(width >= 1 && depth >= 0, "invalid generator shape");
        require(lr > 0.0 && lr_floor >= 0.0 && lr_floor <= 1.0, "invalid learning-rate schedule");
        require(latent_scale > 0.0, "latent scale must be positive");
        require(tv_lambda >= 0.0 && early_stop_tol >= 0.0, "tv_lambda and early_stop_tol must be non-negative");
    }

    std::string to_string(Denoiser d) { return d == Denoiser::SteepestDescent ? "sd" : "tv"; }
    std::string to_string(Prior p) { return p == Prior::Conv ? "conv" : "none"; }

    Denoiser parse_denoiser(const std::string &s)
    {
        if (s == "sd")
            return Denoiser::SteepestDescent;
        if (s == "tv")
            return Denoiser::TotalVariation;
        throw InvalidArgument("denoiser must be 'sd' or 'tv', got '" + s + "'");
    }

    Prior parse_prior(const std::string &s)
    {
        if (s == "conv")
            return Prior::Conv;
        if (s == "none")
            return Prior::None;
        throw InvalidArgument("prior must be 'conv' or 'none', got '" + s + "'");
    }

    void apply_decode_option(DecodeConfig &cfg, const std::string &key, const std::string &value, int line)
    {
        const KeyValue kv{key, value, line};
        auto as_int = [&] { return static_cast<int>(parse_int(kv)); };
        if (key == "beta1")
            cfg.beta1 = parse_double(kv);
        else if (key == "beta2")
            cfg.beta2 = parse_double(kv);
        else if (key == "alpha1")
            cfg.alpha1 = parse_double(kv);
        else if (key == "alpha2")
            cfg.alpha2 = parse_double(kv);
        else if (key == "sd_step")
            cfg.step = parse_double(kv);
        else if (key == "inner_iters")
            cfg.inner_iters = as_int();
        else if (key == "theta_iters")
            cfg.theta_iters = as_int();
        else if (key == "outer_iters")
            cfg.outer_iters = as_int();
        else if (key == "decode_seed")
            cfg.seed = parse_u64(kv);
        else if (key == "denoiser")
            cfg.denoiser = parse_denoiser(value);
        else if (key == "prior")
            cfg.prior = parse_prior(value);
        else if (key == "generator_layout")
        {
            if (value == "time_batch")
                cfg.layout = GeneratorLayout::TimeBatch;
            else if (value == "channel_stack")
                cfg.layout = GeneratorLayout::ChannelStack;
            else
                throw ParseError(line, "generator_layout must be 'time_batch' or 'channel_stack'");
        }
        else if (key == "width")
            cfg.width = as_int();
        else if (key == "depth")
            cfg.depth = as_int();
        else if (key == "lr")
            cfg.lr = parse_double(kv);
        else if (key == "lr_floor")
            cfg.lr_floor = parse_double(kv);
        else if (key == "latent_scale")
            cfg.latent_scale = parse_double(kv);
        else if (key == "tv_lambda")
            cfg.tv_lambda = parse_double(kv);
        else if (key == "early_stop_tol")
            cfg.early_stop_tol = parse_double(kv);
        else if (key == "backtrack" || key == "keep_better" || key == "reinit")
        {
            if (value != "true" && value != "false")
                throw ParseError(line, key + " must be 'true' or 'false'");
            bool &flag = key == "backtrack" ? cfg.backtrack : key == "keep_better" ? cfg.keep_better : cfg.reinit;
            flag = value == "true";
        }
        else
            throw ParseError(line, "unknown decoder key '" + key + "'");
    }

    namespace
    {
        double sq_norm(const FrameStack &s)
        {
            double acc = 0.0;
            for (const auto &m : s)
                acc += m.squaredNorm();
            return acc;
        }

        // Generator output <-> frame stack, for both layouts.
        FrameStack to_frames(const Tensor &out, int K, int L)
        {
            FrameStack f;
            const int T = out.n * out.c;
            f.reserve(T);
            for (int i = 0; i < T; ++i)
            {
                Matrix m(K, L);
                const double *src = out.data.data() + static_cast<std::size_t>(i) * K * L;
                for (int k = 0; k < K; ++k)
                    for (int l = 0; l < L; ++l)
                        m(k, l) = src[static_cast<std::size_t>(k) * L + l];
                f.push_back(std::move(m));
            }
            return f;
        }

        void from_frames(const FrameStack &f, Tensor &out)
        {
            const int K = out.h, L = out.w;
            for (std::size_t i = 0; i < f.size(); ++i)
            {
                double *dst = out.data.data() + i * K * L;
                for (int k = 0; k < K; ++k)
                    for (int l = 0; l < L; ++l)
                        dst[static_cast<std::size_t>(k) * L + l] = f[i](k, l);
            }
        }

        struct Objective
        {
            const Matrix &z;
            const SensingOperator &op;
            const FrameStack &x;
            const FrameStack &t;
            double beta;

            // Loss at generator output g; residuals kept for the gradient.
            double value(const FrameStack &g, Matrix &r_data, FrameStack &r_prox) const
            {
                r_data = z - op.forward(g);
                r_prox.resize(g.size());
                for (std::size_t i = 0; i < g.size(); ++i)
                    r_prox[i] = x[i] - g[i] - t[i];
                return r_data.squaredNorm() + beta * sq_norm(r_prox);
            }

            FrameStack gradient(const Matrix &r_data, const FrameStack &r_prox) const
            {
                FrameStack d = op.adjoint(r_data);
                for (std::size_t i = 0; i < d.size(); ++i)
                    d[i] = -2.0 * d[i] - 2.0 * beta * r_prox[i];
                return d;
            }
        };

        Tensor make_latent(GeneratorLayout layout, int T, int K, int L, double scale, Rng &rng)
        {
            if (layout == GeneratorLayout::ChannelStack)
            {
                Tensor e(1, T, K, L);
                for (double &v : e.data)
                    v = scale * rng.uniform();
                return e;
            }
            // Two random endpoints blended linearly across the frame axis.
            Tensor e(T, 1, K, L);
            std::vector<double> a(static_cast<std::size_t>(K) * L), b(a.size());
            for (double &v : a)
                v = scale * rng.uniform();
            for (double &v : b)
                v = scale * rng.uniform();
            for (int i = 0; i < T; ++i)
            {
                const double w = T > 1 ? static_cast<double>(i) / (T - 1) : 0.0;
                double *dst = e.sample(i);
                for (std::size_t j = 0; j < a.size(); ++j)
                    dst[j] = (1.0 - w) * a[j] + w * b[j];
            }
            return e;
        }

        GeneratorArch make_arch(const DecodeConfig &cfg, int T)
        {
            GeneratorArch arch;
            arch.width = cfg.width;
            arch.depth = cfg.depth;
            if (cfg.layout == GeneratorLayout::ChannelStack)
                arch.in_channels = arch.out_channels = T;
            return arch;
        }

        FrameStack zeros_like(int T, int K, int L)
        {
            return FrameStack(T, Matrix::Zero(K, L));
        }

        FrameStack prefix_sums(const FrameStack &diff, double scale, bool nonneg)
        {
            FrameStack out;
            out.reserve(diff.size());
            for (const auto &d : diff)
            {
                Matrix m = column_prefix_sum(d * scale);
                if (nonneg)
                    m = m.cwiseMax(0.0);
                out.push_back(std::move(m));
            }
            return out;
        }
    }

    FitResult fit_generator(Generator &gen, const Tensor &latent, const Matrix &z, const SensingOperator &op,
                            const FrameStack &x, const FrameStack &t, double beta, const DecodeConfig &cfg,
                            AdamState *adam)
    {
        const int K = op.rows(), L = op.cols();
        const Objective obj{z, op, x, t, beta};
        const std::size_t P = gen.parameter_count();
        AdamState local;
        AdamState &st = adam ? *adam : local;
        if (st.m.size() != P)
            st = AdamState{std::vector<double>(P, 0.0), std::vector<double>(P, 0.0), 0, 1.0};
        auto &m = st.m, &v = st.v;
        std::vector<double> grad, dir(P), saved;
        constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;

        Matrix r_data;
        FrameStack r_prox;
        auto evaluate = [&] { return obj.value(to_frames(gen.forward(latent), K, L), r_data, r_prox); };
        auto backprop = [&] {
            Tensor dout(latent.n, gen.arch().out_channels, latent.h, latent.w);
            from_frames(obj.gradient(r_data, r_prox), dout);
            gen.backward(dout, grad);
        };

        FitResult res;
        auto counted = [&] {
            ++res.evaluations;
            return evaluate();
        };
        double loss = counted();
        require(std::isfinite(loss), "generator objective is not finite at initialisation");
        backprop();

        const double lo = cfg.lr * cfg.lr_floor;
        for (int it = 0; it < cfg.theta_iters; ++it)
        {
            const double k = static_cast<double>(++st.steps);
            const double c1 = 1.0 - std::pow(b1, k), c2 = 1.0 - std::pow(b2, k);
            for (std::size_t i = 0; i < P; ++i)
            {
                m[i] = b1 * m[i] + (1.0 - b1) * grad[i];
                v[i] = b2 * v[i] + (1.0 - b2) * grad[i] * grad[i];
                dir[i] = (m[i] / c1) / (std::sqrt(v[i] / c2) + eps);
            }
            const double scheduled = lo + (cfg.lr - lo) * 0.5 * (1.0 + std::cos(kPi * it / cfg.theta_iters));
            double shrink = cfg.backtrack ? st.shrink : 1.0;

            saved = gen.parameters();
            bool accepted = false, finite_seen = false;
            for (int halving = 0; halving <= 10; ++halving, shrink *= 0.5)
            {
                auto &p = gen.parameters();
                for (std::size_t i = 0; i < P; ++i)
                    p[i] = saved[i] - scheduled * shrink * dir[i];
                const double trial = counted();
                if (!std::isfinite(trial))
                    continue;
                finite_seen = true;
                if (trial <= loss || !cfg.backtrack)
                {
                    loss = trial;
                    accepted = true;
                    // clean steps let the multiplier grow back
                    st.shrink = halving == 0 ? std::min(1.0, 2.0 * shrink) : shrink;
                    break;
                }
            }
            if (!finite_seen)
            {
                gen.parameters() = saved;
                throw std::runtime_error("generator objective diverged: no finite value after 10 step halvings");
            }
            if (!accepted)
            {
                gen.parameters() = saved;
                ++res.rejected;
                counted();
            }
            backprop();
            res.losses.push_back(loss);
        }
        return res;
    }

    void update_x_sd(FrameStack &x, const FrameStack &g, const FrameStack &t, double step, int iters)
    {
        require(x.size() == g.size() && x.size() == t.size(), "x, g and t differ in frame count");
        for (std::size_t i = 0; i < x.size(); ++i)
        {
            const Matrix target = g[i] + t[i];
            for (int it = 0; it < iters; ++it)
                x[i] -= step * (x[i] - target);
        }
    }

    void update_x_tv(FrameStack &x, const FrameStack &g, const FrameStack &t, double lambda, int iters)
    {
        require(g.size() == t.size(), "g and t differ in frame count");
        x.resize(g.size());
        for (std::size_t i = 0; i < g.size(); ++i)
            x[i] = tv_denoise(g[i] + t[i], lambda, iters);
    }

    void update_t(FrameStack &t, const FrameStack &g, const FrameStack &x)
    {
        require(x.size() == g.size() && x.size() == t.size(), "x, g and t differ in frame count");
        for (std::size_t i = 0; i < t.size(); ++i)
            t[i] += g[i] - x[i];
    }

    namespace
    {
        void grad2(const Matrix &u, Matrix &gx, Matrix &gy)
        {
            const Eigen::Index K = u.rows(), L = u.cols();
            gx = Matrix::Zero(K, L);
            gy = Matrix::Zero(K, L);
            if (K > 1)
                gx.topRows(K - 1) = u.bottomRows(K - 1) - u.topRows(K - 1);
            if (L > 1)
                gy.leftCols(L - 1) = u.rightCols(L - 1) - u.leftCols(L - 1);
        }

        // Negative adjoint of grad2.
        Matrix div2(const Matrix &px, const Matrix &py)
        {
            const Eigen::Index K = px.rows(), L = px.cols();
            Matrix d = Matrix::Zero(K, L);
            for (Eigen::Index j = 0; j < L; ++j)
                for (Eigen::Index i = 0; i < K; ++i)
                {
                    double v = 0.0;
                    if (K > 1)
                        v += (i < K - 1 ? px(i, j) : 0.0) - (i > 0 ? px(i - 1, j) : 0.0);
                    if (L > 1)
                        v += (j < L - 1 ? py(i, j) : 0.0) - (j > 0 ? py(i, j - 1) : 0.0);
                    d(i, j) = v;
                }
            return d;
        }
    }

    double total_variation(const Matrix &m)
    {
        Matrix gx, gy;
        grad2(m, gx, gy);
        return (gx.cwiseAbs2() + gy.cwiseAbs2()).cwiseSqrt().sum();
    }

    Matrix tv_denoise(const Matrix &f, double lambda, int iters)
    {
        if (lambda <= 0.0)
            return f;
        constexpr double tau = 0.125;
        Matrix px = Matrix::Zero(f.rows(), f.cols()), py = px, gx, gy;
        const Matrix scaled = f / lambda;
        for (int it = 0; it < iters; ++it)
        {
            grad2(div2(px, py) - scaled, gx, gy);
            const Matrix norm = (gx.cwiseAbs2() + gy.cwiseAbs2()).cwiseSqrt();
            px = (px + tau * gx).cwiseQuotient((1.0 + tau * norm.array()).matrix());
            py = (py + tau * gy).cwiseQuotient((1.0 + tau * norm.array()).matrix());
        }
        return f - lambda * div2(px, py);
    }

    double psnr(const FrameStack &estimate, const FrameStack &truth)
    {
        require(estimate.size() == truth.size() && !truth.empty(), "PSNR needs equally long non-empty stacks");
        double peak = 0.0, se = 0.0;
        std::size_t n = 0;
        for (std::size_t i = 0; i < truth.size(); ++i)
        {
            require(same_shape(estimate[i], truth[i]), "PSNR frames differ in shape");
            peak = std::max(peak, truth[i].cwiseAbs().maxCoeff());
            se += (estimate[i] - truth[i]).squaredNorm();
            n += static_cast<std::size_t>(truth[i].size());
        }
        const double mse = se / static_cast<double>(n);
        if (mse == 0.0)
            return 200.0;
        return std::min(200.0, 10.0 * std::log10(peak * peak / mse));
    }

    ChannelResult decode_channel(const Matrix &z, const SensingOperator &op, double beta, std::uint64_t seed,
                                 const DecodeConfig &cfg, const FrameStack *truth, bool keep_snapshots,
                                 bool nonneg)
    {
        cfg.validate();
        require(z.rows() == op.output_rows() && z.cols() == op.cols(), "measurement shape differs from operator");
        const int T = op.frames(), K = op.rows(), L = op.cols();

        // Work at unit scale: normalise by the peak of the gram-preconditioned back-projection.
        const Matrix gram = op.gram_diagonal();
        const Matrix pre = (gram.array() > 0.0).select(z.cwiseQuotient(gram), 0.0);
        double scale = 0.0;
        for (const auto &f : op.adjoint(pre))
            scale = std::max(scale, f.cwiseAbs().maxCoeff());
        if (!(scale > 0.0))
            scale = 1.0;
        const Matrix zn = z / scale;

        ChannelResult res;
        FrameStack x = zeros_like(T, K, L), t = zeros_like(T, K, L);
        auto record = [&](double objective) {
            res.trace.objective.push_back(objective);
            if (truth != nullptr)
                res.trace.psnr.push_back(psnr(prefix_sums(x, scale, nonneg), *truth));
            if (keep_snapshots)
            {
                FrameStack snap;
                for (const auto &f : x)
                    snap.push_back(f * scale);
                res.trace.snapshots.push_back(std::move(snap));
            }
        };
        auto converged = [&] {
            const auto &o = res.trace.objective;
            if (cfg.early_stop_tol <= 0.0 || o.size() < 2)
                return false;
            const double prev = o[o.size() - 2], cur = o.back();
            return std::abs(prev - cur) <= cfg.early_stop_tol * std::max(std::abs(prev), 1e-300);
        };

        if (cfg.prior == Prior::None)
        {
            for (int k = 0; k < cfg.outer_iters; ++k)
            {
                for (int it = 0; it < cfg.inner_iters; ++it)
                {
                    const Matrix r = zn - op.forward(x);
                    const FrameStack step = op.adjoint((gram.array() > 0.0).select(r.cwiseQuotient(gram), 0.0));
                    for (int i = 0; i < T; ++i)
                        x[i] += cfg.step * step[i];
                }
                record((zn - op.forward(x)).squaredNorm());
                if (converged())
                    break;
            }
        }
        else
        {
            Rng latent_rng(mix_seed(seed, 0));
            const Tensor latent = make_latent(cfg.layout, T, K, L, cfg.latent_scale, latent_rng);
            Generator gen(make_arch(cfg, T));
            gen.use_serial_kernels = cfg.serial_kernels;
            FrameStack g_prev;
            AdamState adam;
            for (int k = 0; k < cfg.outer_iters; ++k)
            {
                if (k == 0 || cfg.reinit)
                {
                    Rng init(mix_seed(seed, 1000 + static_cast<std::uint64_t>(k)));
                    gen.initialize(init);
                    adam = AdamState{};
                }
                const FitResult fit = fit_generator(gen, latent, zn, op, x, t, beta, cfg, &adam);
                FrameStack g = to_frames(gen.forward(latent), K, L);
                double objective = fit.losses.empty() ? 0.0 : fit.losses.back();
                if (cfg.keep_better && !g_prev.empty())
                {
                    // Random restarts occasionally land in a poor fit.
                    Matrix r_data;
                    FrameStack r_prox;
                    const double prev = Objective{zn, op, x, t, beta}.value(g_prev, r_data, r_prox);
                    if (prev < objective)
                    {
                        g = g_prev;
                        objective = prev;
                    }
                }
                g_prev = g;
                if (cfg.denoiser == Denoiser::SteepestDescent)
                    update_x_sd(x, g, t, cfg.step, cfg.inner_iters);
                else
                    update_x_tv(x, g, t, cfg.tv_lambda, cfg.inner_iters);
                update_t(t, g, x);
                record(objective);
                if (converged())
                    break;
            }
        }

        res.diff.reserve(T);
        for (const auto &f : x)
            res.diff.push_back(f * scale);
        return res;
    }

    std::string DecodeTrace::to_csv() const
    {
        std::ostringstream os;
        os.precision(17);
        os << "iter,objective_amp,objective_phase,psnr_amp,psnr_phase\n";
        const std::size_t n = std::max(objective_amp.size(), objective_phase.size());
        auto cell = [&](const std::vector<double> &v, std::size_t i) {
            if (i < v.size())
                os << v[i];
        };
        for (std::size_t i = 0; i < n; ++i)
        {
            os << i + 1 << ',';
            cell(objective_amp, i);
            os << ',';
            cell(objective_phase, i);
            os << ',';
            cell(psnr_amp, i);
            os << ',';
            cell(psnr_phase, i);
            os << '\n';
        }
        return os.str();
    }

    DecodeResult admm_decode(const MetaSpectrumPair &meta, const RisCodebook &cb, const DecodeConfig &cfg,
                             const std::vector<SpectrumPair> *truth, Channels channels, bool keep_snapshots)
    {
        const auto &mi = meta.meta;
        require(mi.frames >= 1 && cb.frames() == mi.frames, "codebook frame count differs from the MetaSpectrum");
        require(same_shape(meta.z_amp, meta.z_phase), "MetaSpectrum channels differ in shape");
        for (const auto &m : cb.amp_masks)
            require(m.rows() == mi.rows && m.cols() == mi.cols, "codebook mask shape differs from the MetaSpectrum");
        const SensingOperator op(cb.amp_masks, mi.shift);
        require(meta.z_amp.rows() == op.output_rows() && meta.z_amp.cols() == op.cols(),
                "MetaSpectrum shape inconsistent with its metadata");
        if (truth != nullptr)
            require(static_cast<int>(truth->size()) == mi.frames, "ground truth frame count differs");

        FrameStack amp_truth, phase_truth;
        if (truth != nullptr)
            for (const auto &p : *truth)
            {
                amp_truth.push_back(p.amplitude);
                phase_truth.push_back(p.phase);
            }

        DecodeResult out;
        FrameStack amp_diff = zeros_like(mi.frames, mi.rows, mi.cols), phase_diff = amp_diff;
        if (channels != Channels::Phase)
        {
            auto r = decode_channel(meta.z_amp, op, cfg.beta1, mix_seed(cfg.seed, 1), cfg,
                                    truth ? &amp_truth : nullptr, keep_snapshots, true);
            amp_diff = std::move(r.diff);
            out.trace.objective_amp = std::move(r.trace.objective);
            out.trace.psnr_amp = std::move(r.trace.psnr);
            out.amp_snapshots = std::move(r.trace.snapshots);
        }
        if (channels != Channels::Amplitude)
        {
            auto r = decode_channel(meta.z_phase, op, cfg.beta2, mix_seed(cfg.seed, 2), cfg,
                                    truth ? &phase_truth : nullptr, keep_snapshots, false);
            phase_diff = std::move(r.diff);
            out.trace.objective_phase = std::move(r.trace.objective);
            out.trace.psnr_phase = std::move(r.trace.psnr);
            out.phase_snapshots = std::move(r.trace.snapshots);
        }

        std::vector<DifferentialPair> d;
        for (int i = 0; i < mi.frames; ++i)
            d.push_back({amp_diff[i], phase_diff[i]});
        out.frames = differential_decode(d);
        for (auto &p : out.frames)
            p.amplitude = p.amplitude.cwiseMax(0.0);
        return out;
    }
}
