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
#include "metaspec/pipeline.hpp"
#include "metaspec/codebook.hpp"
#include "metaspec/config.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

namespace metaspec
{
    namespace
    {
        std::string join_u64(const std::vector<std::uint64_t> &v)
        {
            std::string s;
            for (std::size_t i = 0; i < v.size(); ++i)
                s += (i ? "," : "") + std::to_string(v[i]);
            return s;
        }

        std::vector<std::uint64_t> split_u64(const std::string &s)
        {
            std::vector<std::uint64_t> v;
            if (trim(s).empty())
                return v;
            for (const auto &p : split(s, ','))
                v.push_back(parse_u64(KeyValue{"index", p, 0}));
            return v;
        }

        // Runs a stage and prefixes any failure with its name.
        template <typename F>
        auto stage(const char *name, F &&f)
        {
            try
            {
                return f();
            }
            catch (const std::exception &e)
            {
                throw std::runtime_error(std::string(name) + ": " + e.what());
            }
        }

        SceneDescription load_for(const PipelineConfig &cfg)
        {
            SceneDescription scene = load_scene(cfg.scene_file);
            if (cfg.scene_seed)
                scene.seed = *cfg.scene_seed;
            return scene;
        }
    }

    void PipelineConfig::validate() const
    {
        require(rate > 0.0, "rate must be positive");
        require(frames >= 1 && segment_len >= 1 && shift >= 1, "frames, segment_len and shift must be at least 1");
        require(codebook_bits >= 1 && codebook_bits <= 16, "codebook bits must be in [1, 16]");
        require(rx >= 1 && ry >= 1, "fingerprint size must be positive");
        require(angle_step_deg > 0.0 && tau_step_ns > 0.0 && tau_max_ns >= 0.0, "invalid MUSIC grid");
        require(sources >= 1, "source count must be at least 1");
        decode.validate();
    }

    void apply_pipeline_option(PipelineConfig &cfg, const std::string &key, const std::string &value, int line)
    {
        const KeyValue kv{key, value, line};
        auto as_int = [&] { return static_cast<int>(parse_int(kv)); };
        if (key == "scene")
            cfg.scene_file = value;
        else if (key == "rate_hz")
            cfg.rate = parse_double(kv);
        else if (key == "t_frames")
            cfg.frames = as_int();
        else if (key == "segment_len")
            cfg.segment_len = as_int();
        else if (key == "shift_d")
            cfg.shift = as_int();
        else if (key == "codebook_bits")
            cfg.codebook_bits = as_int();
        else if (key == "amp_floor")
            cfg.amp_floor = parse_double(kv);
        else if (key == "ris_seed")
            cfg.ris_seed = parse_u64(kv);
        else if (key == "codebook_seed")
            cfg.codebook_seed = parse_u64(kv);
        else if (key == "seed")
            cfg.scene_seed = parse_u64(kv);
        else if (key == "sampling")
        {
            if (value == "hash")
                cfg.sampling = Sampling::Hash;
            else if (value == "uniform")
                cfg.sampling = Sampling::Uniform;
            else
                throw ParseError(line, "sampling must be 'hash' or 'uniform'");
        }
        else if (key == "hash_rx")
            cfg.rx = as_int();
        else if (key == "hash_ry")
            cfg.ry = as_int();
        else if (key == "music_angle_step_deg")
            cfg.angle_step_deg = parse_double(kv);
        else if (key == "music_tau_max_ns")
            cfg.tau_max_ns = parse_double(kv);
        else if (key == "music_tau_step_ns")
            cfg.tau_step_ns = parse_double(kv);
        else if (key == "sources")
            cfg.sources = as_int();
        else if (key == "out_dir")
            cfg.out_dir = value;
        else
            apply_decode_option(cfg.decode, key, value, line);
    }

    PipelineConfig load_pipeline_config(const std::filesystem::path &file)
    {
        std::ifstream in(file);
        if (!in)
            throw std::runtime_error("cannot open config file " + file.string());
        PipelineConfig cfg;
        for (const auto &kv : parse_key_values(in))
        {
            try
            {
                apply_pipeline_option(cfg, kv.key, kv.value, kv.line);
            }
            catch (const InvalidArgument &e)
            {
                throw ParseError(kv.line, e.what());
            }
        }
        if (!cfg.scene_file.empty() && cfg.scene_file.is_relative())
            cfg.scene_file = file.parent_path() / cfg.scene_file;
        return cfg;
    }

    std::vector<SpectrumPair> unwrapped_pairs(const std::vector<CfrFrame> &frames)
    {
        std::vector<SpectrumPair> out;
        out.reserve(frames.size());
        for (const auto &f : frames)
            out.push_back(unwrap_subcarriers(split_spectrums(f)));
        return out;
    }

    SampledSet stage_sample(const std::vector<CfrFrame> &frames, const PipelineConfig &cfg)
    {
        require(frames.size() >= cfg.captured_frames(), "not enough captured frames for t_frames x segment_len");
        const std::vector<CfrFrame> used(frames.begin(), frames.begin() + static_cast<long>(cfg.captured_frames()));
        const auto truth = unwrapped_pairs(used);
        const int K = static_cast<int>(truth[0].amplitude.rows()), L = static_cast<int>(truth[0].amplitude.cols());

        std::vector<std::uint64_t> all(used.size());
        for (std::size_t i = 0; i < all.size(); ++i)
            all[i] = i;
        const RisCodebook cb = gen_codebook_at(K, L, all, cfg.codebook_bits, cfg.ris_seed, cfg.amp_floor);
        std::vector<SpectrumPair> masked;
        masked.reserve(used.size());
        for (std::size_t i = 0; i < used.size(); ++i)
            masked.push_back(apply_ris(truth[i], cb.amp_masks[i], cb.phase_masks[i]));

        const SamplingResult pick =
            sample_frames(masked, cb.amp_masks, cb.phase_masks, cfg.segment_len, cfg.sampling, cfg.rx, cfg.ry);
        SampledSet s;
        s.richness = pick.richness;
        for (const auto i : pick.indices)
        {
            s.truth.push_back(truth[i]);
            s.masked.push_back(masked[i]);
            s.instants.push_back(i);
            s.times.push_back(used[i].timestamp);
            s.prints.push_back(fingerprint(truth[i], cfg.rx, cfg.ry));
        }
        return s;
    }

    MetaSpectrumPair stage_encode(const SampledSet &sampled, const PipelineConfig &cfg)
    {
        require(!sampled.masked.empty(), "nothing to encode");
        const int K = static_cast<int>(sampled.masked[0].amplitude.rows());
        const int L = static_cast<int>(sampled.masked[0].amplitude.cols());
        // Each frame is bound to the mask of its own capture instant.
        const RisCodebook cb = gen_codebook_at(K, L, sampled.instants, cfg.codebook_bits, cfg.ris_seed, cfg.amp_floor);
        std::vector<EncodedFrame> enc;
        for (std::size_t i = 0; i < sampled.masked.size(); ++i)
            enc.push_back(differential_encode(sampled.masked[i], cb.amp_masks[i], cb.phase_masks[i],
                                              static_cast<int>(i)));
        MetaSpectrumPair meta = shift_add(enc, cfg.shift);
        meta.meta.codebook = cb.id;
        meta.meta.instants = sampled.instants;
        return meta;
    }

    DecodeResult stage_decode(const MetaSpectrumPair &meta, const PipelineConfig &cfg,
                              const std::vector<SpectrumPair> *truth, bool keep_snapshots)
    {
        const auto &mi = meta.meta;
        const RisCodebook key = gen_codebook_at(mi.rows, mi.cols, mi.instants, mi.codebook.bits, cfg.decode_key(),
                                                mi.codebook.amp_floor);
        return admm_decode(meta, key, cfg.decode, truth, Channels::Both, keep_snapshots);
    }

    SteeringGrid music_grid(const PipelineConfig &cfg, const MultipathScene &scene)
    {
        return SteeringGrid::defaults(scene.geometry, scene.grid.size(), cfg.angle_step_deg, cfg.tau_max_ns * 1e-9,
                                      cfg.tau_step_ns * 1e-9);
    }

    std::vector<Estimate> stage_estimate(const std::vector<SpectrumPair> &pairs, const PipelineConfig &cfg,
                                         const MultipathScene &scene)
    {
        const SteeringGrid grid = music_grid(cfg, scene);
        const ArrayModel model = ArrayModel::of(scene);
        std::vector<Estimate> out;
        for (const auto &p : pairs)
        {
            Estimate e;
            e.spectrum = music_spectrum({combine_spectrums(p)}, grid, model, cfg.sources);
            e.peaks = find_peaks(e.spectrum, static_cast<std::size_t>(cfg.sources));
            out.push_back(std::move(e));
        }
        return out;
    }

    std::vector<AoaSample> reference_track(const SceneDescription &scene, std::size_t count, double rate)
    {
        std::vector<AoaSample> out;
        for (std::size_t n = 0; n < count; ++n)
        {
            const double t = static_cast<double>(n) / rate;
            const Path p = scene.paths_at(t).front();
            out.push_back({t, p.elevation, p.azimuth});
        }
        return out;
    }

    std::vector<AoaSample> estimated_track(const std::vector<Estimate> &est, const std::vector<double> &times)
    {
        require(est.size() == times.size(), "one timestamp per estimate required");
        std::vector<AoaSample> out;
        for (std::size_t i = 0; i < est.size(); ++i)
        {
            require(!est[i].peaks.empty(), "MUSIC spectrum has no peak");
            out.push_back({times[i], est[i].peaks.front().theta, est[i].peaks.front().phi});
        }
        return out;
    }

    std::string peaks_csv(const std::vector<Estimate> &est, const std::vector<double> &times)
    {
        std::ostringstream os;
        os.precision(10);
        os << "frame,time_s,theta_deg,phi_deg,tau_ns,magnitude\n";
        for (std::size_t i = 0; i < est.size(); ++i)
            for (const auto &p : est[i].peaks)
                os << i << ',' << times[i] << ',' << rad2deg(p.theta) << ',' << rad2deg(p.phi) << ',' << p.tau * 1e9
                   << ',' << p.magnitude << '\n';
        return os.str();
    }

    Container sampled_container(const SampledSet &s, const PipelineConfig &cfg)
    {
        Container c = to_container(s.masked);
        c.set("instants", join_u64(s.instants));
        c.set("timestamps", join_doubles(s.times));
        std::vector<double> rich(s.richness.begin(), s.richness.end());
        c.set("richness", join_doubles(rich));
        c.set("ris_seed", std::to_string(cfg.ris_seed));
        c.set("codebook_bits", std::to_string(cfg.codebook_bits));
        c.set("amp_floor", format_double(cfg.amp_floor));
        return c;
    }

    SampledSet sampled_from(const Container &c)
    {
        SampledSet s;
        s.masked = spectrum_pairs_from(c);
        s.instants = split_u64(c.get("instants"));
        s.times = split_doubles(c.get("timestamps"));
        for (double r : split_doubles(c.get("richness")))
            s.richness.push_back(static_cast<int>(r));
        if (s.instants.size() != s.masked.size() || s.times.size() != s.masked.size())
            throw std::runtime_error("sampled container footer disagrees with its frame count");
        return s;
    }

    Container truth_container(const SampledSet &s)
    {
        Container c = to_container(s.truth);
        c.set("instants", join_u64(s.instants));
        c.set("timestamps", join_doubles(s.times));
        return c;
    }

    Container decoded_container(const DecodeResult &r, const SampledSet &s)
    {
        Container c = to_container(r.frames);
        c.set("instants", join_u64(s.instants));
        c.set("timestamps", join_doubles(s.times));
        return c;
    }

    MetricsReport cmd_metrics(const std::vector<SpectrumPair> &decoded, const std::vector<SpectrumPair> &truth, int rx,
                              int ry)
    {
        MetricsReport r;
        const PsnrPair p = spectrum_psnr(decoded, truth);
        r.psnr_amp = p.amplitude;
        r.psnr_phase = p.phase;
        r.hamming_final = fingerprint_distance(decoded, truth, rx, ry);
        r.fingerprint_cells = static_cast<int>(truth.size()) * rx * ry;
        return r;
    }

    std::size_t cmd_simulate(const std::filesystem::path &scene_file, double duration, double rate,
                             const std::filesystem::path &out, std::optional<std::uint64_t> seed)
    {
        SceneDescription scene = load_scene(scene_file);
        if (seed)
            scene.seed = *seed;
        const auto frames = simulate_frames(scene, frame_count(duration, rate), rate);
        if (out.has_parent_path())
            std::filesystem::create_directories(out.parent_path());
        write_container(out, to_container(frames));
        return frames.size();
    }

    MetricsReport cmd_pipeline(const PipelineConfig &cfg)
    {
        cfg.validate();
        const auto start = std::chrono::steady_clock::now();
        std::filesystem::create_directories(cfg.out_dir);
        const auto &dir = cfg.out_dir;
        nlohmann::ordered_json timing;
        auto lap = [&, last = start](const char *name) mutable {
            const auto now = std::chrono::steady_clock::now();
            timing[name] = std::chrono::duration<double>(now - last).count();
            last = now;
        };

        const SceneDescription scene = stage("simulate", [&] { return load_for(cfg); });
        const std::size_t count = cfg.captured_frames();
        const auto frames = stage("simulate", [&] {
            auto f = simulate_frames(scene, count, cfg.rate);
            write_container(dir / "cfr.mspc", to_container(f));
            return f;
        });
        lap("simulate");

        const SampledSet sampled = stage("sample", [&] {
            auto s = stage_sample(frames, cfg);
            write_container(dir / "sampled.mspc", sampled_container(s, cfg));
            write_container(dir / "truth.mspc", truth_container(s));
            write_container(dir / "fingerprints.mspc", to_container(s.prints));
            return s;
        });
        lap("sample");

        const MetaSpectrumPair meta = stage("encode", [&] {
            auto m = stage_encode(sampled, cfg);
            write_container(dir / "meta.mspc", to_container(m));
            return m;
        });
        lap("encode");

        const DecodeResult decoded = stage("decode", [&] {
            auto r = stage_decode(meta, cfg, &sampled.truth, true);
            write_container(dir / "decoded.mspc", decoded_container(r, sampled));
            write_text_atomic(dir / "trace.csv", r.trace.to_csv());
            return r;
        });
        lap("decode");

        const MultipathScene expanded = scene.expand(count, cfg.rate);
        const auto estimates = stage("estimate", [&] {
            auto e = stage_estimate(decoded.frames, cfg, expanded);
            write_text_atomic(dir / "peaks.csv", peaks_csv(e, sampled.times));
            write_container(dir / "music.mspc", to_container(e.front().spectrum));
            return e;
        });
        lap("estimate");

        MetricsReport report = stage("metrics", [&] {
            MetricsReport r = cmd_metrics(decoded.frames, sampled.truth, cfg.rx, cfg.ry);
            r.compression_ratio = compression_ratio(meta.meta.frames, meta.meta.shift, meta.meta.rows);
            r.aoa_mse = aoa_mse(estimated_track(estimates, sampled.times), reference_track(scene, count, cfg.rate));
            r.sampled_indices.assign(sampled.instants.begin(), sampled.instants.end());
            r.sampling_richness = sampled.richness;
            const std::size_t iters = std::min(decoded.amp_snapshots.size(), decoded.phase_snapshots.size());
            for (std::size_t k = 0; k < iters; ++k)
            {
                std::vector<DifferentialPair> d;
                for (std::size_t i = 0; i < sampled.truth.size(); ++i)
                    d.push_back({decoded.amp_snapshots[k][i], decoded.phase_snapshots[k][i]});
                auto pairs = differential_decode(d);
                for (auto &p : pairs)
                    p.amplitude = p.amplitude.cwiseMax(0.0);
                r.hamming_trace.push_back(fingerprint_distance(pairs, sampled.truth, cfg.rx, cfg.ry));
            }
            return r;
        });
        lap("metrics");

        report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        timing["wall_time"] = report.wall_time;
        write_text_atomic(dir / "report.json", report.to_json());
        write_text_atomic(dir / "timing.json", timing.dump(2) + "\n");
        return report;
    }
}
