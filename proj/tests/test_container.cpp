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
#include "metaspec/container.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <limits>
#include <unistd.h>

using namespace metaspec;

namespace
{
    std::filesystem::path scratch(const std::string &name)
    {
        const auto dir = std::filesystem::temp_directory_path() / ("metaspec_test_" + std::to_string(::getpid()));
        std::filesystem::create_directories(dir);
        return dir / name;
    }

    Container sample_container()
    {
        Container c;
        c.kind = ContainerKind::SpectrumPair;
        c.dims = {1, 2, 3, 1};
        c.dtype = DType::F64;
        c.payload.resize(6 * 8);
        for (std::size_t i = 0; i < c.payload.size(); ++i)
            c.payload[i] = static_cast<std::uint8_t>(i * 7);
        c.set("a", "1");
        c.set("b", "two words");
        return c;
    }
}

TEST_CASE("byte layout of the header")
{
    const auto bytes = serialize(sample_container());
    REQUIRE(bytes.size() == 4 + 2 + 1 + 16 + 1 + 48 + 4 + std::string("a=1\nb=two words\n").size());
    CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "MSPC");
    CHECK(bytes[4] == 1);
    CHECK(bytes[5] == 0);
    CHECK(bytes[6] == 2);
    CHECK(bytes[7 + 4] == 2); // dims[1], little-endian
    CHECK(bytes[23] == 1);
}

TEST_CASE("serialize round trip and rejection of damaged input")
{
    const Container c = sample_container();
    auto bytes = serialize(c);
    CHECK(deserialize(bytes) == c);

    auto bad = bytes;
    bad[0] = 'X';
    CHECK_THROWS(deserialize(bad));
    bad = bytes;
    bad[6] = 9;
    CHECK_THROWS(deserialize(bad));
    bad = bytes;
    bad[23] = 0;
    CHECK_THROWS(deserialize(bad));
    bad = bytes;
    bad.push_back(0);
    CHECK_THROWS(deserialize(bad));
    bad = bytes;
    bad.resize(bytes.size() - 3);
    CHECK_THROWS(deserialize(bad));
    CHECK_THROWS(c.get("missing"));
}

TEST_CASE("double formatting round-trips exactly")
{
    for (double v : {0.1, -1e-300, 1.0 / 3.0, 6.02214076e23, std::numeric_limits<double>::denorm_min()})
        CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
    const std::vector<double> v{1.5, -2.25, 1e-9};
    CHECK(split_doubles(join_doubles(v)) == v);
    CHECK(split_doubles("").empty());
}

TEST_CASE("typed round trips are bit-exact")
{
    Rng rng(12);
    SUBCASE("CFR frames")
    {
        std::vector<CfrFrame> frames;
        for (int t = 0; t < 3; ++t)
        {
            ComplexMatrix m(5, 4);
            for (Eigen::Index i = 0; i < m.size(); ++i)
                m.data()[i] = cdouble(rng.normal(), rng.normal());
            frames.push_back({m, 0.01 * t + 1.0 / 3.0});
        }
        const auto back = cfr_frames_from(deserialize(serialize(to_container(frames))));
        REQUIRE(back.size() == 3);
        for (int t = 0; t < 3; ++t)
        {
            CHECK(back[t].values == frames[t].values);
            CHECK(back[t].timestamp == frames[t].timestamp);
        }
        CHECK(cfr_frames_from(to_container(std::vector<CfrFrame>{})).empty());
    }
    SUBCASE("spectrum pairs")
    {
        std::vector<SpectrumPair> pairs;
        for (int t = 0; t < 2; ++t)
            pairs.push_back({oracle::random_matrix(rng, 6, 3), oracle::random_matrix(rng, 6, 3)});
        const auto back = spectrum_pairs_from(deserialize(serialize(to_container(pairs))));
        REQUIRE(back.size() == 2);
        CHECK(back[1].amplitude == pairs[1].amplitude);
        CHECK(back[0].phase == pairs[0].phase);
    }
    SUBCASE("MetaSpectrum with codebook identity")
    {
        MetaSpectrumPair m;
        m.z_amp = oracle::random_matrix(rng, 9, 4);
        m.z_phase = oracle::random_matrix(rng, 9, 4);
        m.meta = {8, 4, 2, 1, CodebookId{77, 3, 8, 4, 0.125}, {4, 19}};
        const auto back = meta_spectrum_from(deserialize(serialize(to_container(m))));
        CHECK(back.z_amp == m.z_amp);
        CHECK(back.z_phase == m.z_phase);
        CHECK(back.meta.codebook == m.meta.codebook);
        CHECK(back.meta.instants == m.meta.instants);
        CHECK(back.meta.shift == 1);
        CHECK(back.meta.frames == 2);
    }
    SUBCASE("MUSIC spectrum")
    {
        MusicSpectrum s;
        s.grid.theta = {0.0, 0.1};
        s.grid.phi = {0.2, 0.3, 0.4};
        s.grid.tau = {1e-9};
        s.grid.k_sub = 4, s.grid.m_sub = 2, s.grid.n_sub = 1;
        for (int i = 0; i < 6; ++i)
            s.values.push_back(rng.uniform());
        const auto back = music_spectrum_from(deserialize(serialize(to_container(s))));
        CHECK(back.values == s.values);
        CHECK(back.grid.phi == s.grid.phi);
        CHECK(back.grid.tau == s.grid.tau);
        CHECK(back.grid.k_sub == 4);
    }
    SUBCASE("fingerprints")
    {
        std::vector<HashFingerprint> prints(3, HashFingerprint{2, 4, std::vector<std::uint8_t>(8)});
        for (auto &p : prints)
            for (auto &v : p.values)
                v = static_cast<std::uint8_t>(rng.index(4));
        const auto c = to_container(prints);
        CHECK(c.dtype == DType::U8);
        CHECK(fingerprints_from(deserialize(serialize(c))) == prints);
    }
}

TEST_CASE("kind mismatch is an error")
{
    const auto c = to_container(std::vector<SpectrumPair>{{Matrix::Ones(2, 2), Matrix::Zero(2, 2)}});
    CHECK_THROWS(meta_spectrum_from(c));
    CHECK_THROWS(cfr_frames_from(c));
}

TEST_CASE("files are written atomically and read back")
{
    const auto path = scratch("x.mspc");
    write_container(path, sample_container());
    CHECK(read_container(path) == sample_container());
    for (const auto &e : std::filesystem::directory_iterator(path.parent_path()))
        CHECK(e.path().filename().string().find(".tmp.") == std::string::npos);

    const auto text = scratch("t.txt");
    write_text_atomic(text, "hello\n");
    std::ifstream in(text);
    std::string line;
    std::getline(in, line);
    CHECK(line == "hello");
    CHECK_THROWS(read_container(scratch("missing.mspc")));
    std::filesystem::remove_all(path.parent_path());
}
