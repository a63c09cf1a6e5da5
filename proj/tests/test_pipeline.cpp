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
#include "metaspec/codec.hpp"
#include "metaspec/config.hpp"
#include "metaspec/pipeline.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

using namespace metaspec;

namespace
{
    std::filesystem::path scratch(const std::string &name)
    {
        return std::filesystem::temp_directory_path() /
               ("metaspec_pipe_" + std::to_string(::getpid()) + "_" + name);
    }

    // Small, fast configuration on the desk scene.
    PipelineConfig quick(const std::string &name)
    {
        PipelineConfig cfg;
        cfg.scene_file = std::string(METASPEC_DATA_DIR) + "/scenes/desk.scene";
        cfg.frames = 3;
        cfg.segment_len = 4;
        cfg.decode.width = 4;
        cfg.decode.depth = 2;
        cfg.decode.theta_iters = 10;
        cfg.decode.outer_iters = 2;
        cfg.decode.inner_iters = 20;
        cfg.angle_step_deg = 6.0;
        cfg.tau_step_ns = 10.0;
        cfg.out_dir = scratch(name);
        return cfg;
    }

    std::string slurp(const std::filesystem::path &p)
    {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream os;
        os << in.rdbuf();
        return os.str();
    }
}

TEST_CASE("options and config files")
{
    PipelineConfig cfg;
    apply_pipeline_option(cfg, "t_frames", "12");
    apply_pipeline_option(cfg, "sampling", "uniform");
    apply_pipeline_option(cfg, "codebook_seed", "9");
    apply_pipeline_option(cfg, "beta2", "0.75");
    CHECK(cfg.frames == 12);
    CHECK(cfg.sampling == Sampling::Uniform);
    CHECK(cfg.decode_key() == 9);
    CHECK(cfg.decode.beta2 == 0.75);
    CHECK_THROWS_AS(apply_pipeline_option(cfg, "sampling", "random", 3), ParseError);
    CHECK_THROWS_AS(apply_pipeline_option(cfg, "nonsense", "1", 3), ParseError);

    const auto dir = scratch("cfg");
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "run.cfg");
        out << "# comment\nscene = my.scene\nshift_d = 2\nouter_iters = 3\n";
    }
    const auto loaded = load_pipeline_config(dir / "run.cfg");
    CHECK(loaded.scene_file == dir / "my.scene");
    CHECK(loaded.shift == 2);
    CHECK(loaded.decode.outer_iters == 3);
    {
        std::ofstream out(dir / "bad.cfg");
        out << "scene = x\n\nshift_d = two\n";
    }
    try
    {
        load_pipeline_config(dir / "bad.cfg");
        CHECK(false);
    }
    catch (const ParseError &e)
    {
        CHECK(e.line() == 3);
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("sample and encode stages")
{
    const auto cfg = quick("stages");
    const auto scene = load_scene(cfg.scene_file);
    const auto frames = simulate_frames(scene, cfg.captured_frames(), cfg.rate);
    const auto s = stage_sample(frames, cfg);
    REQUIRE(s.truth.size() == 3);
    CHECK(s.instants.size() == 3);
    for (std::size_t i = 0; i < 3; ++i)
    {
        CHECK(s.instants[i] >= i * 4);
        CHECK(s.instants[i] < (i + 1) * 4);
        CHECK(s.times[i] == doctest::Approx(s.instants[i] / cfg.rate));
    }
    const auto meta = stage_encode(s, cfg);
    CHECK(meta.z_amp.rows() == 64 + 2);
    CHECK(meta.meta.codebook.seed == cfg.ris_seed);
    CHECK(meta.meta.instants == s.instants);

    // Sampled container round trip keeps everything the next stage needs.
    const auto back = sampled_from(deserialize(serialize(sampled_container(s, cfg))));
    CHECK(back.instants == s.instants);
    CHECK(back.times == s.times);
    REQUIRE(back.masked.size() == 3);
    CHECK(back.masked[2].phase == s.masked[2].phase);
    CHECK(back.truth.empty());
    const auto truth = spectrum_pairs_from(deserialize(serialize(truth_container(s))));
    REQUIRE(truth.size() == 3);
    CHECK(truth[1].amplitude == s.truth[1].amplitude);
}

TEST_CASE("unwrapped phase is continuous along subcarriers")
{
    const auto scene = load_scene(std::string(METASPEC_DATA_DIR) + "/scenes/desk.scene");
    const auto pairs = unwrapped_pairs(simulate_frames(scene, 1, 100.0));
    const Matrix &p = pairs[0].phase;
    for (Eigen::Index j = 0; j < p.cols(); ++j)
        for (Eigen::Index k = 1; k < p.rows(); ++k)
            CHECK(std::abs(p(k, j) - p(k - 1, j)) <= kPi);
}

TEST_CASE("metrics of an exact decode")
{
    const auto scene = load_scene(std::string(METASPEC_DATA_DIR) + "/scenes/desk.scene");
    const auto pairs = unwrapped_pairs(simulate_frames(scene, 3, 100.0));
    const auto r = cmd_metrics(pairs, pairs);
    CHECK(r.psnr_amp == 200.0);
    CHECK(r.psnr_phase == 200.0);
    CHECK(r.hamming_final == 0);
    CHECK(r.fingerprint_cells == 3 * 64);
}

TEST_CASE("PSNR of a known noise level")
{
    Rng rng(5);
    std::vector<SpectrumPair> truth, noisy;
    const double sigma = 0.01;
    for (int t = 0; t < 4; ++t)
    {
        const Matrix a = oracle::random_matrix(rng, 64, 8, 0.0, 1.0);
        Matrix n(64, 8);
        for (Eigen::Index i = 0; i < n.size(); ++i)
            n.data()[i] = sigma * rng.normal();
        truth.push_back({a, a});
        noisy.push_back({a + n, a});
    }
    double peak = 0.0;
    for (const auto &p : truth)
        peak = std::max(peak, p.amplitude.cwiseAbs().maxCoeff());
    const auto r = cmd_metrics(noisy, truth);
    CHECK(std::abs(r.psnr_amp - 10.0 * std::log10(peak * peak / (sigma * sigma))) < 0.5);
}

TEST_CASE("AoA error holds each estimate until the next one")
{
    const std::vector<AoaSample> est{{0.0, deg2rad(10), deg2rad(20)}, {0.2, deg2rad(30), deg2rad(20)}};
    const std::vector<AoaSample> ref{{0.0, deg2rad(10), deg2rad(20)},
                                     {0.1, deg2rad(12), deg2rad(20)},
                                     {0.2, deg2rad(30), deg2rad(24)}};
    // Errors: 0, (2^2 + 0)/2, (0 + 4^2)/2.
    CHECK(aoa_mse(est, ref) == doctest::Approx((0.0 + 2.0 + 8.0) / 3.0));
}

TEST_CASE("end-to-end pipeline writes every artefact and is reproducible")
{
    auto a = quick("run_a"), b = quick("run_b");
    const auto ra = cmd_pipeline(a);
    const auto rb = cmd_pipeline(b);
    for (const char *f : {"cfr.mspc", "sampled.mspc", "truth.mspc", "fingerprints.mspc", "meta.mspc", "decoded.mspc",
                          "trace.csv", "peaks.csv", "music.mspc", "report.json", "timing.json"})
    {
        CAPTURE(f);
        REQUIRE(std::filesystem::exists(a.out_dir / f));
        if (std::string(f) != "timing.json")
            CHECK(slurp(a.out_dir / f) == slurp(b.out_dir / f));
    }
    CHECK(ra.to_json() == rb.to_json());
    CHECK(ra.compression_ratio == compression_ratio(3, 1, 64));
    CHECK(ra.hamming_trace.size() == 2);
    CHECK(ra.sampled_indices.size() == 3);

    // A wrong key changes the result.
    auto c = quick("run_c");
    c.codebook_seed = 99;
    const auto rc = cmd_pipeline(c);
    CHECK(rc.to_json() != ra.to_json());

    for (const auto &p : {a.out_dir, b.out_dir, c.out_dir})
        std::filesystem::remove_all(p);
}

TEST_CASE("a bad scene path names the failing stage")
{
    auto cfg = quick("bad");
    cfg.scene_file = "/nonexistent.scene";
    CHECK_THROWS_WITH_AS(cmd_pipeline(cfg), doctest::Contains("simulate"), std::runtime_error);
    std::filesystem::remove_all(cfg.out_dir);
}
