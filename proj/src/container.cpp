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
#include "metaspec/config.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

namespace metaspec
{
    namespace
    {
        class Writer
        {
        public:
            std::vector<std::uint8_t> bytes;

            template <typename U>
            void uint(U v)
            {
                for (std::size_t i = 0; i < sizeof(U); ++i)
                    bytes.push_back(static_cast<std::uint8_t>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xffu));
            }
            void f64(double v) { uint(std::bit_cast<std::uint64_t>(v)); }
            void raw(const void *p, std::size_t n)
            {
                const auto *b = static_cast<const std::uint8_t *>(p);
                bytes.insert(bytes.end(), b, b + n);
            }
        };

        class Reader
        {
        public:
            explicit Reader(const std::vector<std::uint8_t> &b) : bytes_(b) {}

            template <typename U>
            U uint()
            {
                need(sizeof(U));
                std::uint64_t v = 0;
                for (std::size_t i = 0; i < sizeof(U); ++i)
                    v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
                pos_ += sizeof(U);
                return static_cast<U>(v);
            }
            double f64() { return std::bit_cast<double>(uint<std::uint64_t>()); }
            void copy(void *dst, std::size_t n)
            {
                need(n);
                std::memcpy(dst, bytes_.data() + pos_, n);
                pos_ += n;
            }
            std::size_t remaining() const { return bytes_.size() - pos_; }

        private:
            void need(std::size_t n) const
            {
                if (remaining() < n)
                    throw std::runtime_error("container truncated");
            }
            const std::vector<std::uint8_t> &bytes_;
            std::size_t pos_ = 0;
        };

        // Payload helpers: doubles are stored as their LE bit pattern.
        void put_f64(std::vector<std::uint8_t> &out, double v)
        {
            const auto u = std::bit_cast<std::uint64_t>(v);
            for (int i = 0; i < 8; ++i)
                out.push_back(static_cast<std::uint8_t>((u >> (8 * i)) & 0xffu));
        }

        double get_f64(const std::vector<std::uint8_t> &in, std::size_t element)
        {
            std::uint64_t u = 0;
            for (int i = 0; i < 8; ++i)
                u |= static_cast<std::uint64_t>(in[element * 8 + i]) << (8 * i);
            return std::bit_cast<double>(u);
        }

        void expect(const Container &c, ContainerKind kind, DType dtype)
        {
            if (c.kind != kind || c.dtype != dtype)
                throw std::runtime_error("container holds a different kind or dtype than requested");
        }

        long long footer_int(const Container &c, const std::string &key)
        {
            return parse_int(KeyValue{key, c.get(key), 0});
        }

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
                v.push_back(parse_u64(KeyValue{"instants", p, 0}));
            return v;
        }
    }

    std::size_t dtype_size(DType t)
    {
        switch (t)
        {
        case DType::F64:
            return 8;
        case DType::F32:
            return 4;
        case DType::C64:
            return 16;
        case DType::U8:
            return 1;
        }
        throw std::runtime_error("unknown dtype");
    }

    std::size_t Container::element_count() const
    {
        std::size_t n = 1;
        for (auto d : dims)
            n *= d;
        return n;
    }

    const std::string &Container::get(const std::string &key) const
    {
        for (const auto &kv : footer)
            if (kv.first == key)
                return kv.second;
        throw std::runtime_error("container footer lacks key '" + key + "'");
    }

    bool Container::has(const std::string &key) const
    {
        for (const auto &kv : footer)
            if (kv.first == key)
                return true;
        return false;
    }

    void Container::set(const std::string &key, const std::string &value)
    {
        require(key.find_first_of("=\n") == std::string::npos && value.find('\n') == std::string::npos,
                "footer keys and values must be single-line without '=' in the key");
        for (auto &kv : footer)
            if (kv.first == key)
            {
                kv.second = value;
                return;
            }
        footer.emplace_back(key, value);
    }

    std::vector<std::uint8_t> serialize(const Container &c)
    {
        require(c.payload.size() == c.element_count() * dtype_size(c.dtype), "container payload length mismatch");
        Writer w;
        w.raw("MSPC", 4);
        w.uint<std::uint16_t>(Container::kVersion);
        w.uint<std::uint8_t>(static_cast<std::uint8_t>(c.kind));
        for (auto d : c.dims)
            w.uint<std::uint32_t>(d);
        w.uint<std::uint8_t>(static_cast<std::uint8_t>(c.dtype));
        w.raw(c.payload.data(), c.payload.size());
        std::string footer;
        for (const auto &[k, v] : c.footer)
            footer += k + "=" + v + "\n";
        w.uint<std::uint32_t>(static_cast<std::uint32_t>(footer.size()));
        w.raw(footer.data(), footer.size());
        return std::move(w.bytes);
    }

    Container deserialize(const std::vector<std::uint8_t> &bytes)
    {
        Reader r(bytes);
        char magic[4];
        r.copy(magic, 4);
        if (std::memcmp(magic, "MSPC", 4) != 0)
            throw std::runtime_error("not a container: bad magic");
        const auto version = r.uint<std::uint16_t>();
        if (version != Container::kVersion)
            throw std::runtime_error("unsupported container version " + std::to_string(version));
        Container c;
        const auto kind = r.uint<std::uint8_t>();
        if (kind < 1 || kind > 5)
            throw std::runtime_error("unknown container kind " + std::to_string(kind));
        c.kind = static_cast<ContainerKind>(kind);
        for (auto &d : c.dims)
            d = r.uint<std::uint32_t>();
        const auto dtype = r.uint<std::uint8_t>();
        if (dtype < 1 || dtype > 4)
            throw std::runtime_error("unknown container dtype " + std::to_string(dtype));
        c.dtype = static_cast<DType>(dtype);
        const std::size_t n = c.element_count() * dtype_size(c.dtype);
        if (r.remaining() < n)
            throw std::runtime_error("container truncated");
        c.payload.resize(n);
        r.copy(c.payload.data(), n);
        const auto flen = r.uint<std::uint32_t>();
        std::string footer(flen, '\0');
        r.copy(footer.data(), flen);
        if (r.remaining() != 0)
            throw std::runtime_error("trailing bytes after container footer");
        std::istringstream fs(footer);
        std::string line;
        while (std::getline(fs, line))
        {
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw std::runtime_error("malformed container footer line");
            c.footer.emplace_back(line.substr(0, eq), line.substr(eq + 1));
        }
        return c;
    }

    void write_text_atomic(const std::filesystem::path &path, const std::string &text)
    {
        const auto tmp = path.string() + ".tmp." + std::to_string(::getpid());
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out)
                throw std::runtime_error("cannot write " + tmp);
            out.write(text.data(), static_cast<std::streamsize>(text.size()));
            if (!out)
                throw std::runtime_error("write failed for " + tmp);
        }
        std::filesystem::rename(tmp, path);
    }

    void write_container(const std::filesystem::path &path, const Container &c)
    {
        const auto bytes = serialize(c);
        write_text_atomic(path, std::string(bytes.begin(), bytes.end()));
    }

    Container read_container(const std::filesystem::path &path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw std::runtime_error("cannot open " + path.string());
        std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        return deserialize(bytes);
    }

    std::string format_double(double v)
    {
        char buf[64];
        const auto res = std::to_chars(buf, buf + sizeof buf, v);
        return std::string(buf, res.ptr);
    }

    std::string join_doubles(const std::vector<double> &v)
    {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i)
            s += (i ? "," : "") + format_double(v[i]);
        return s;
    }

    std::vector<double> split_doubles(const std::string &s)
    {
        std::vector<double> v;
        if (trim(s).empty())
            return v;
        for (const auto &p : split(s, ','))
            v.push_back(parse_double(p, 0));
        return v;
    }

    Container to_container(const std::vector<CfrFrame> &frames)
    {
        Container c;
        c.kind = ContainerKind::CfrFrameStack;
        c.dtype = DType::C64;
        const auto K = frames.empty() ? 0 : frames[0].values.rows();
        const auto L = frames.empty() ? 0 : frames[0].values.cols();
        c.dims = {static_cast<std::uint32_t>(frames.size()), static_cast<std::uint32_t>(K),
                  static_cast<std::uint32_t>(L), 1};
        std::vector<double> stamps;
        for (const auto &f : frames)
        {
            require(f.values.rows() == K && f.values.cols() == L, "CFR frames differ in shape");
            for (Eigen::Index k = 0; k < K; ++k)
                for (Eigen::Index l = 0; l < L; ++l)
                {
                    put_f64(c.payload, f.values(k, l).real());
                    put_f64(c.payload, f.values(k, l).imag());
                }
            stamps.push_back(f.timestamp);
        }
        c.set("timestamps", join_doubles(stamps));
        return c;
    }

    std::vector<CfrFrame> cfr_frames_from(const Container &c)
    {
        expect(c, ContainerKind::CfrFrameStack, DType::C64);
        const auto T = c.dims[0], K = c.dims[1], L = c.dims[2];
        const auto stamps = split_doubles(c.get("timestamps"));
        if (stamps.size() != T)
            throw std::runtime_error("timestamp count differs from frame count");
        std::vector<CfrFrame> frames(T);
        std::size_t e = 0;
        for (std::uint32_t t = 0; t < T; ++t)
        {
            frames[t].values.resize(K, L);
            frames[t].timestamp = stamps[t];
            for (std::uint32_t k = 0; k < K; ++k)
                for (std::uint32_t l = 0; l < L; ++l, e += 2)
                    frames[t].values(k, l) = cdouble(get_f64(c.payload, e), get_f64(c.payload, e + 1));
        }
        return frames;
    }

    Container to_container(const std::vector<SpectrumPair> &pairs)
    {
        Container c;
        c.kind = ContainerKind::SpectrumPair;
        c.dtype = DType::F64;
        const auto K = pairs.empty() ? 0 : pairs[0].amplitude.rows();
        const auto L = pairs.empty() ? 0 : pairs[0].amplitude.cols();
        c.dims = {static_cast<std::uint32_t>(pairs.size()), 2, static_cast<std::uint32_t>(K),
                  static_cast<std::uint32_t>(L)};
        for (const auto &p : pairs)
            for (const Matrix *m : {&p.amplitude, &p.phase})
            {
                require(m->rows() == K && m->cols() == L, "spectrum pairs differ in shape");
                for (Eigen::Index k = 0; k < K; ++k)
                    for (Eigen::Index l = 0; l < L; ++l)
                        put_f64(c.payload, (*m)(k, l));
            }
        return c;
    }

    std::vector<SpectrumPair> spectrum_pairs_from(const Container &c)
    {
        expect(c, ContainerKind::SpectrumPair, DType::F64);
        const auto T = c.dims[0], K = c.dims[2], L = c.dims[3];
        if (c.dims[1] != 2)
            throw std::runtime_error("spectrum pair container needs 2 channels");
        std::vector<SpectrumPair> out(T);
        std::size_t e = 0;
        for (auto &p : out)
            for (Matrix *m : {&p.amplitude, &p.phase})
            {
                m->resize(K, L);
                for (std::uint32_t k = 0; k < K; ++k)
                    for (std::uint32_t l = 0; l < L; ++l)
                        (*m)(k, l) = get_f64(c.payload, e++);
            }
        return out;
    }

    Container to_container(const MetaSpectrumPair &meta)
    {
        require(same_shape(meta.z_amp, meta.z_phase), "MetaSpectrum channels differ in shape");
        Container c;
        c.kind = ContainerKind::MetaSpectrumPair;
        c.dtype = DType::F64;
        c.dims = {2, static_cast<std::uint32_t>(meta.z_amp.rows()), static_cast<std::uint32_t>(meta.z_amp.cols()), 1};
        for (const Matrix *m : {&meta.z_amp, &meta.z_phase})
            for (Eigen::Index k = 0; k < m->rows(); ++k)
                for (Eigen::Index l = 0; l < m->cols(); ++l)
                    put_f64(c.payload, (*m)(k, l));
        const auto &mi = meta.meta;
        c.set("K", std::to_string(mi.rows));
        c.set("L", std::to_string(mi.cols));
        c.set("T", std::to_string(mi.frames));
        c.set("D", std::to_string(mi.shift));
        c.set("codebook_seed", std::to_string(mi.codebook.seed));
        c.set("codebook_bits", std::to_string(mi.codebook.bits));
        c.set("codebook_amp_floor", format_double(mi.codebook.amp_floor));
        c.set("instants", join_u64(mi.instants));
        return c;
    }

    MetaSpectrumPair meta_spectrum_from(const Container &c)
    {
        expect(c, ContainerKind::MetaSpectrumPair, DType::F64);
        if (c.dims[0] != 2 || c.dims[3] != 1)
            throw std::runtime_error("MetaSpectrum container has unexpected dims");
        MetaSpectrumPair m;
        const auto R = c.dims[1], L = c.dims[2];
        std::size_t e = 0;
        for (Matrix *z : {&m.z_amp, &m.z_phase})
        {
            z->resize(R, L);
            for (std::uint32_t k = 0; k < R; ++k)
                for (std::uint32_t l = 0; l < L; ++l)
                    (*z)(k, l) = get_f64(c.payload, e++);
        }
        auto &mi = m.meta;
        mi.rows = static_cast<int>(footer_int(c, "K"));
        mi.cols = static_cast<int>(footer_int(c, "L"));
        mi.frames = static_cast<int>(footer_int(c, "T"));
        mi.shift = static_cast<int>(footer_int(c, "D"));
        mi.codebook.seed = parse_u64(KeyValue{"codebook_seed", c.get("codebook_seed"), 0});
        mi.codebook.bits = static_cast<int>(footer_int(c, "codebook_bits"));
        mi.codebook.amp_floor = parse_double(c.get("codebook_amp_floor"), 0);
        mi.codebook.rows = mi.rows;
        mi.codebook.cols = mi.cols;
        mi.instants = split_u64(c.get("instants"));
        return m;
    }

    Container to_container(const MusicSpectrum &spec)
    {
        Container c;
        c.kind = ContainerKind::MusicSpectrum;
        c.dtype = DType::F64;
        const auto &g = spec.grid;
        c.dims = {static_cast<std::uint32_t>(g.theta.size()), static_cast<std::uint32_t>(g.phi.size()),
                  static_cast<std::uint32_t>(g.tau.size()), 1};
        for (double v : spec.values)
            put_f64(c.payload, v);
        c.set("theta", join_doubles(g.theta));
        c.set("phi", join_doubles(g.phi));
        c.set("tau", join_doubles(g.tau));
        c.set("k_sub", std::to_string(g.k_sub));
        c.set("m_sub", std::to_string(g.m_sub));
        c.set("n_sub", std::to_string(g.n_sub));
        return c;
    }

    MusicSpectrum music_spectrum_from(const Container &c)
    {
        expect(c, ContainerKind::MusicSpectrum, DType::F64);
        MusicSpectrum s;
        s.grid.theta = split_doubles(c.get("theta"));
        s.grid.phi = split_doubles(c.get("phi"));
        s.grid.tau = split_doubles(c.get("tau"));
        s.grid.k_sub = static_cast<int>(footer_int(c, "k_sub"));
        s.grid.m_sub = static_cast<int>(footer_int(c, "m_sub"));
        s.grid.n_sub = static_cast<int>(footer_int(c, "n_sub"));
        if (s.grid.theta.size() != c.dims[0] || s.grid.phi.size() != c.dims[1] || s.grid.tau.size() != c.dims[2])
            throw std::runtime_error("MUSIC grid axes disagree with container dims");
        s.values.resize(c.element_count());
        for (std::size_t i = 0; i < s.values.size(); ++i)
            s.values[i] = get_f64(c.payload, i);
        return s;
    }

    Container to_container(const std::vector<HashFingerprint> &prints)
    {
        Container c;
        c.kind = ContainerKind::Fingerprint;
        c.dtype = DType::U8;
        const int R = prints.empty() ? 0 : prints[0].rows, C = prints.empty() ? 0 : prints[0].cols;
        c.dims = {static_cast<std::uint32_t>(prints.size()), static_cast<std::uint32_t>(R),
                  static_cast<std::uint32_t>(C), 1};
        for (const auto &p : prints)
        {
            require(p.rows == R && p.cols == C, "fingerprints differ in shape");
            c.payload.insert(c.payload.end(), p.values.begin(), p.values.end());
        }
        return c;
    }

    std::vector<HashFingerprint> fingerprints_from(const Container &c)
    {
        expect(c, ContainerKind::Fingerprint, DType::U8);
        const auto n = c.dims[0];
        const int R = static_cast<int>(c.dims[1]), C = static_cast<int>(c.dims[2]);
        std::vector<HashFingerprint> out(n);
        const std::size_t cells = static_cast<std::size_t>(R) * C;
        for (std::uint32_t i = 0; i < n; ++i)
        {
            out[i] = {R, C, std::vector<std::uint8_t>(c.payload.begin() + i * cells, c.payload.begin() + (i + 1) * cells)};
            for (auto v : out[i].values)
                if (v > 3)
                    throw std::runtime_error("fingerprint cell outside {0,1,2,3}");
        }
        return out;
    }
}
