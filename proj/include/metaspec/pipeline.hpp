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
#ifndef METASPEC_PIPELINE_HPP
#define METASPEC_PIPELINE_HPP

#include "metaspec/container.hpp"
#include "metaspec/decoder.hpp"
#include "metaspec/metrics.hpp"
#include "metaspec/music.hpp"
#include "metaspec/scene_file.hpp"
#include "metaspec/semantic_hash.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace metaspec
{
    struct PipelineConfig
    {
        std::filesystem::path scene_file;
        double rate = 100.0;  // frames per second
        int frames = 10;      // T, frames fused per MetaSpectrum
        int segment_len = 10; // captured frames per sampling segment
        int shift = 1;        // D
        int codebook_bits = 4;
        double amp_floor = 0.0;
        std::uint64_t ris_seed = 1;                 // codebook the encoder applies
        std::optional<std::uint64_t> codebook_seed; // decoder's key; defaults to ris_seed
        std::optional<std::uint64_t> scene_seed;    // overrides the scene file's noise seed
        Sampling sampling = Sampling::Hash;
        int rx = 8;
        int ry = 8;
        DecodeConfig decode;
        double angle_step_deg = 2.0;
        double tau_max_ns = 100.0;
        double tau_step_ns = 2.0;
        int sources = 1;
        std::filesystem::path out_dir = "out";

        std::uint64_t decode_key() const { return codebook_seed.value_or(ris_seed); }
        std::size_t captured_frames() const { return static_cast<std::size_t>(frames) * segment_len; }
        void validate() const;
    };

    // `key = value` overrides; decoder keys are forwarded to DecodeConfig.
    void apply_pipeline_option(PipelineConfig &cfg, const std::string &key, const std::string &value, int line = 0);
    // Relative scene paths resolve against the config file's directory.
    PipelineConfig load_pipeline_config(const std::filesystem::path &file);

    // Frames picked for encoding, with the RIS responses they were captured under.
    struct SampledSet
    {
        std::vector<SpectrumPair> truth;  // un-masked, phase unwrapped along subcarriers
        std::vector<SpectrumPair> masked; // what the receiver recorded
        std::vector<std::uint64_t> instants;
        std::vector<double> times;
        std::vector<int> richness;
        std::vector<HashFingerprint> prints; // of the selected un-masked frames
    };

    std::vector<SpectrumPair> unwrapped_pairs(const std::vector<CfrFrame> &frames);

    SampledSet stage_sample(const std::vector<CfrFrame> &frames, const PipelineConfig &cfg);
    MetaSpectrumPair stage_encode(const SampledSet &sampled, const PipelineConfig &cfg);
    DecodeResult stage_decode(const MetaSpectrumPair &meta, const PipelineConfig &cfg,
                              const std::vector<SpectrumPair> *truth = nullptr, bool keep_snapshots = false);

    struct Estimate
    {
        std::vector<Peak> peaks; // strongest first
        MusicSpectrum spectrum;
    };

    SteeringGrid music_grid(const PipelineConfig &cfg, const MultipathScene &scene);
    std::vector<Estimate> stage_estimate(const std::vector<SpectrumPair> &pairs, const PipelineConfig &cfg,
                                         const MultipathScene &scene);

    // Reference angles of the first scene path at every captured instant.
    std::vector<AoaSample> reference_track(const SceneDescription &scene, std::size_t count, double rate);
    std::vector<AoaSample> estimated_track(const std::vector<Estimate> &est, const std::vector<double> &times);

    std::string peaks_csv(const std::vector<Estimate> &est, const std::vector<double> &times);

    // Container footers carry instants and timestamps so stages can run as separate commands.
    Container sampled_container(const SampledSet &s, const PipelineConfig &cfg);
    SampledSet sampled_from(const Container &c);
    Container truth_container(const SampledSet &s);
    Container decoded_container(const DecodeResult &r, const SampledSet &s);

    // simulate -> sample -> encode -> decode -> estimate -> metrics, writing every
    // intermediate into cfg.out_dir.
    MetricsReport cmd_pipeline(const PipelineConfig &cfg);

    // Writes cfr.mspc; returns the number of frames.
    std::size_t cmd_simulate(const std::filesystem::path &scene_file, double duration, double rate,
                             const std::filesystem::path &out, std::optional<std::uint64_t> seed = {});

    // PSNR and fingerprint distance of decoded pairs against the truth.
    MetricsReport cmd_metrics(const std::vector<SpectrumPair> &decoded, const std::vector<SpectrumPair> &truth,
                              int rx = 8, int ry = 8);
}

#endif
