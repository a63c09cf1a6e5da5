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
#ifndef METASPEC_CONTAINER_HPP
#define METASPEC_CONTAINER_HPP

#include "metaspec/codec.hpp"
#include "metaspec/music.hpp"
#include "metaspec/semantic_hash.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace metaspec
{
    enum class ContainerKind : std::uint8_t
    {
        CfrFrameStack = 1,
        SpectrumPair = 2,
        MetaSpectrumPair = 3,
        MusicSpectrum = 4,
        Fingerprint = 5
    };

    enum class DType : std::uint8_t
    {
        F64 = 1,
        F32 = 2,
        C64 = 3, // complex double as interleaved (re, im)
        U8 = 4
    };

    std::size_t dtype_size(DType t);

    // "MSPC" | u16 version | u8 kind | u32 dims[4] | u8 dtype | payload | u32 footer length | footer.
    // Everything little-endian; the payload is row-major over dims.
    struct Container
    {
        static constexpr std::uint16_t kVersion = 1;

        ContainerKind kind = ContainerKind::CfrFrameStack;
        std::array<std::uint32_t, 4> dims{0, 0, 0, 0};
        DType dtype = DType::F64;
        std::vector<std::uint8_t> payload;
        std::vector<std::pair<std::string, std::string>> footer; // ordered key=value lines

        std::size_t element_count() const;
        // Value of a footer key; throws when missing.
        const std::string &get(const std::string &key) const;
        bool has(const std::string &key) const;
        void set(const std::string &key, const std::string &value);

        bool operator==(const Container &) const = default;
    };

    std::vector<std::uint8_t> serialize(const Container &c);
    Container deserialize(const std::vector<std::uint8_t> &bytes);

    // Writes to a temporary file in the same directory, then renames over `path`.
    void write_container(const std::filesystem::path &path, const Container &c);
    Container read_container(const std::filesystem::path &path);

    // Atomic text write, same scheme.
    void write_text_atomic(const std::filesystem::path &path, const std::string &text);

    // Round-trip exact decimal form of a double.
    std::string format_double(double v);
    std::string join_doubles(const std::vector<double> &v);
    std::vector<double> split_doubles(const std::string &s);

    Container to_container(const std::vector<CfrFrame> &frames);
    Container to_container(const std::vector<SpectrumPair> &pairs);
    Container to_container(const MetaSpectrumPair &meta);
    Container to_container(const MusicSpectrum &spec);
    Container to_container(const std::vector<HashFingerprint> &prints);

    std::vector<CfrFrame> cfr_frames_from(const Container &c);
    std::vector<SpectrumPair> spectrum_pairs_from(const Container &c);
    MetaSpectrumPair meta_spectrum_from(const Container &c);
    MusicSpectrum music_spectrum_from(const Container &c);
    std::vector<HashFingerprint> fingerprints_from(const Container &c);
}

#endif
