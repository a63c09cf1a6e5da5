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
// metaspec command-line front end.
#include "metaspec/pipeline.hpp"

#include "metaspec/config.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using namespace metaspec;

namespace
{
    // Flags shared by every subcommand; unset ones leave the config file values alone.
    struct Overrides
    {
        std::string config;
        std::optional<std::uint64_t> seed;
        std::optional<std::uint64_t> codebook_seed;
        std::optional<int> codebook_bits;
        std::optional<int> t_frames;
        std::optional<int> shift_d;
        std::optional<std::string> sampling;
        std::optional<std::string> denoiser;
        std::optional<std::string> prior;
        std::optional<std::string> out_dir;
        std::optional<std::string> scene;

        void attach(CLI::App *app)
        {
            app->add_option("--config", config, "key=value config file");
            app->add_option("--seed", seed, "scene noise seed");
            app->add_option("--codebook-seed", codebook_seed, "codebook seed used as the decode key");
            app->add_option("--codebook-bits", codebook_bits, "RIS quantisation bits");
            app->add_option("--t-frames", t_frames, "frames fused per MetaSpectrum");
            app->add_option("--shift-d", shift_d, "row shift between fused frames");
            app->add_option("--sampling", sampling, "hash | uniform")->check(CLI::IsMember({"hash", "uniform"}));
            app->add_option("--denoiser", denoiser, "sd | tv")->check(CLI::IsMember({"sd", "tv"}));
            app->add_option("--prior", prior, "conv | none")->check(CLI::IsMember({"conv", "none"}));
            app->add_option("--out-dir", out_dir, "output directory");
            app->add_option("--scene", scene, "scene description file");
        }

        PipelineConfig resolve() const
        {
            PipelineConfig cfg = config.empty() ? PipelineConfig{} : load_pipeline_config(config);
            auto set = [&](const char *key, const auto &v) {
                if (v)
                {
                    std::ostringstream os;
                    os << *v;
                    apply_pipeline_option(cfg, key, os.str());
                }
            };
            set("seed", seed);
            set("codebook_seed", codebook_seed);
            set("codebook_bits", codebook_bits);
            set("t_frames", t_frames);
            set("shift_d", shift_d);
            set("sampling", sampling);
            set("denoiser", denoiser);
            set("prior", prior);
            set("out_dir", out_dir);
            set("scene", scene);
            return cfg;
        }
    };

    void need_scene(const PipelineConfig &cfg)
    {
        if (cfg.scene_file.empty())
            throw std::runtime_error("no scene file: pass --scene or set 'scene' in the config");
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"metaspec: RIS-coded compression and recovery of wireless sensing spectra"};
    app.require_subcommand(1);

    Overrides o;
    double duration = 1.0, rate = 100.0;
    std::string decoded_path, truth_path;

    auto *simulate = app.add_subcommand("simulate", "simulate CFR frames from a scene file");
    simulate->add_option("--duration", duration, "seconds of capture")->check(CLI::NonNegativeNumber);
    simulate->add_option("--rate", rate, "frames per second")->check(CLI::PositiveNumber);
    auto *sample = app.add_subcommand("sample", "apply the RIS codebook and pick one frame per segment");
    auto *encode = app.add_subcommand("encode", "fuse sampled frames into a MetaSpectrum pair");
    auto *decode = app.add_subcommand("decode", "recover frames from a MetaSpectrum pair");
    auto *estimate = app.add_subcommand("estimate", "2D AoA / ToF estimation on decoded frames");
    auto *metrics = app.add_subcommand("metrics", "compare decoded frames against the truth");
    metrics->add_option("--decoded", decoded_path, "decoded spectrum container");
    metrics->add_option("--truth", truth_path, "ground-truth spectrum container");
    auto *pipeline = app.add_subcommand("pipeline", "run every stage end to end");
    for (auto *sub : {simulate, sample, encode, decode, estimate, metrics, pipeline})
        o.attach(sub);

    CLI11_PARSE(app, argc, argv);

    try
    {
        const PipelineConfig cfg = o.resolve();
        const fs::path dir = cfg.out_dir;
        fs::create_directories(dir);

        if (*simulate)
        {
            need_scene(cfg);
            const auto n = cmd_simulate(cfg.scene_file, duration, rate, dir / "cfr.mspc", cfg.scene_seed);
            std::cout << "wrote " << n << " frames to " << (dir / "cfr.mspc").string() << "\n";
        }
        else if (*sample)
        {
            const auto frames = cfr_frames_from(read_container(dir / "cfr.mspc"));
            const SampledSet s = stage_sample(frames, cfg);
            write_container(dir / "sampled.mspc", sampled_container(s, cfg));
            write_container(dir / "truth.mspc", truth_container(s));
            write_container(dir / "fingerprints.mspc", to_container(s.prints));
            std::cout << "sampled " << s.instants.size() << " frames\n";
        }
        else if (*encode)
        {
            const Container sc = read_container(dir / "sampled.mspc");
            PipelineConfig enc = cfg;
            enc.ris_seed = parse_u64(KeyValue{"ris_seed", sc.get("ris_seed"), 0});
            enc.codebook_bits = static_cast<int>(parse_int(KeyValue{"codebook_bits", sc.get("codebook_bits"), 0}));
            enc.amp_floor = parse_double(sc.get("amp_floor"), 0);
            const MetaSpectrumPair meta = stage_encode(sampled_from(sc), enc);
            write_container(dir / "meta.mspc", to_container(meta));
            std::cout << "MetaSpectrum " << meta.z_amp.rows() << "x" << meta.z_amp.cols() << ", ratio "
                      << compression_ratio(meta.meta.frames, meta.meta.shift, meta.meta.rows) << "\n";
        }
        else if (*decode)
        {
            const MetaSpectrumPair meta = meta_spectrum_from(read_container(dir / "meta.mspc"));
            std::optional<SampledSet> truth;
            if (fs::exists(dir / "truth.mspc"))
            {
                const Container tc = read_container(dir / "truth.mspc");
                truth = SampledSet{};
                truth->truth = spectrum_pairs_from(tc);
                truth->instants = meta.meta.instants;
                truth->times = split_doubles(tc.get("timestamps"));
            }
            const DecodeResult r = stage_decode(meta, cfg, truth ? &truth->truth : nullptr);
            SampledSet stamps;
            stamps.instants = meta.meta.instants;
            if (truth)
                stamps.times = truth->times;
            else
                for (auto n : meta.meta.instants)
                    stamps.times.push_back(static_cast<double>(n) / cfg.rate);
            write_container(dir / "decoded.mspc", decoded_container(r, stamps));
            write_text_atomic(dir / "trace.csv", r.trace.to_csv());
            std::cout << "decoded " << r.frames.size() << " frames\n";
        }
        else if (*estimate)
        {
            need_scene(cfg);
            const Container dc = read_container(dir / "decoded.mspc");
            const auto pairs = spectrum_pairs_from(dc);
            const auto times = split_doubles(dc.get("timestamps"));
            const SceneDescription scene = load_scene(cfg.scene_file);
            const auto est = stage_estimate(pairs, cfg, scene.expand(1, cfg.rate));
            write_text_atomic(dir / "peaks.csv", peaks_csv(est, times));
            write_container(dir / "music.mspc", to_container(est.front().spectrum));
            std::cout << peaks_csv(est, times);
        }
        else if (*metrics)
        {
            const fs::path dp = decoded_path.empty() ? dir / "decoded.mspc" : fs::path(decoded_path);
            const fs::path tp = truth_path.empty() ? dir / "truth.mspc" : fs::path(truth_path);
            const MetricsReport r = cmd_metrics(spectrum_pairs_from(read_container(dp)),
                                                spectrum_pairs_from(read_container(tp)), cfg.rx, cfg.ry);
            write_text_atomic(dir / "metrics.json", r.to_json());
            std::cout << r.to_json();
        }
        else if (*pipeline)
        {
            need_scene(cfg);
            const MetricsReport r = cmd_pipeline(cfg);
            std::cout << r.to_json();
        }
    }
    catch (const ParseError &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
