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
#include "metaspec/scene_file.hpp"
#include "metaspec/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace metaspec
{
    namespace
    {
        std::vector<double> numbers(const KeyValue &kv, std::size_t expected)
        {
            const auto parts = split(kv.value, ',');
            if (parts.size() != expected)
                throw ParseError(kv.line, "'" + kv.key + "' expects " + std::to_string(expected) +
                                              " comma-separated values, got " + std::to_string(parts.size()));
            std::vector<double> out;
            for (const auto &p : parts)
                out.push_back(parse_double(p, kv.line));
            return out;
        }

        void check_path(const Path &p, int line)
        {
            try
            {
                validate_path(p);
            }
            catch (const InvalidArgument &e)
            {
                throw ParseError(line, e.what());
            }
        }
    }

    SceneDescription parse_scene(std::istream &in)
    {
        SceneDescription desc;
        double center = 5.805e9, bandwidth = 160e6;
        long long subcarriers = 64;
        std::optional<double> spacing;

        for (const auto &kv : parse_key_values(in))
        {
            if (kv.key == "center_freq_hz")
                center = parse_double(kv);
            else if (kv.key == "bandwidth_hz")
                bandwidth = parse_double(kv);
            else if (kv.key == "subcarriers")
                subcarriers = parse_int(kv);
            else if (kv.key == "m_sensors")
                desc.base.geometry.m_count = static_cast<int>(parse_int(kv));
            else if (kv.key == "n_sensors")
                desc.base.geometry.n_count = static_cast<int>(parse_int(kv));
            else if (kv.key == "spacing_m")
                spacing = parse_double(kv);
            else if (kv.key == "propagation_speed")
                desc.base.propagation_speed = parse_double(kv);
            else if (kv.key == "seed")
                desc.seed = parse_u64(kv);
            else if (kv.key == "snr_db")
            {
                if (kv.value == "off" || kv.value == "none")
                    desc.snr_db.reset();
                else
                    desc.snr_db = parse_double(kv);
            }
            else if (kv.key == "motion")
            {
                if (kv.value == "linear")
                    desc.motion = Motion::Linear;
                else if (kv.value == "hold")
                    desc.motion = Motion::Hold;
                else
                    throw ParseError(kv.line, "motion must be 'linear' or 'hold'");
            }
            else if (kv.key == "path")
            {
                const auto v = numbers(kv, 5);
                Path p{cdouble(v[0], v[1]), v[2] * 1e-9, deg2rad(v[3]), deg2rad(v[4])};
                check_path(p, kv.line);
                desc.base.paths.push_back(p);
            }
            else if (kv.key == "waypoint")
            {
                const auto v = numbers(kv, 5);
                if (v[1] < 0 || v[1] != std::floor(v[1]))
                    throw ParseError(kv.line, "waypoint path index must be a non-negative integer");
                Waypoint w{v[0], static_cast<int>(v[1]), v[2] * 1e-9, deg2rad(v[3]), deg2rad(v[4])};
                if (w.time < 0.0)
                    throw ParseError(kv.line, "waypoint time must be non-negative");
                check_path(Path{cdouble(1.0, 0.0), w.tof, w.elevation, w.azimuth}, kv.line);
                if (static_cast<std::size_t>(w.path) >= desc.base.paths.size())
                    throw ParseError(kv.line, "waypoint refers to path " + std::to_string(w.path) +
                                                  " which is not declared above it");
                desc.waypoints.push_back(w);
            }
            else
                throw ParseError(kv.line, "unknown key '" + kv.key + "'");
        }

        if (desc.base.paths.empty())
            throw ParseError(0, "scene declares no 'path' lines");
        if (subcarriers < 1)
            throw ParseError(0, "subcarriers must be at least 1");
        try
        {
            desc.base.grid = SubcarrierGrid::uniform(center, bandwidth, static_cast<int>(subcarriers));
            desc.base.geometry.spacing = spacing.value_or(half_wavelength(center, desc.base.propagation_speed));
            desc.base.validate();
        }
        catch (const InvalidArgument &e)
        {
            throw ParseError(0, e.what());
        }
        std::stable_sort(desc.waypoints.begin(), desc.waypoints.end(),
                         [](const Waypoint &a, const Waypoint &b) { return a.time < b.time; });
        return desc;
    }

    SceneDescription load_scene(const std::filesystem::path &file)
    {
        std::ifstream in(file);
        if (!in)
            throw std::runtime_error("cannot open scene file " + file.string());
        return parse_scene(in);
    }

    std::vector<Path> SceneDescription::paths_at(double t) const
    {
        std::vector<Path> out = base.paths;
        for (std::size_t i = 0; i < out.size(); ++i)
        {
            // Keyframes of path i, starting with its declared parameters at t = 0.
            Waypoint prev{0.0, static_cast<int>(i), out[i].tof, out[i].elevation, out[i].azimuth};
            const Waypoint *next = nullptr;
            for (const auto &w : waypoints)
            {
                if (w.path != static_cast<int>(i))
                    continue;
                if (w.time <= t)
                    prev = w;
                else
                {
                    next = &w;
                    break;
                }
            }
            double tof = prev.tof, el = prev.elevation, az = prev.azimuth;
            if (next != nullptr && motion == Motion::Linear && next->time > prev.time)
            {
                const double a = (t - prev.time) / (next->time - prev.time);
                tof += a * (next->tof - prev.tof);
                el += a * (next->elevation - prev.elevation);
                az += a * (next->azimuth - prev.azimuth);
            }
            out[i].tof = tof;
            out[i].elevation = el;
            out[i].azimuth = az;
        }
        return out;
    }

    MultipathScene SceneDescription::expand(std::size_t count, double rate) const
    {
        require(rate > 0.0, "frame rate must be positive");
        MultipathScene scene = base;
        scene.trajectory.clear();
        scene.trajectory.reserve(count);
        for (std::size_t n = 0; n < count; ++n)
        {
            const double t = static_cast<double>(n) / rate;
            scene.trajectory.push_back(TrajectoryInstant{t, paths_at(t)});
        }
        return scene;
    }

    std::size_t frame_count(double duration, double rate)
    {
        require(duration >= 0.0 && rate > 0.0, "duration must be non-negative and rate positive");
        return static_cast<std::size_t>(std::floor(duration * rate + 1e-9));
    }

    std::vector<CfrFrame> simulate_frames(const SceneDescription &desc, std::size_t count, double rate)
    {
        const MultipathScene scene = desc.expand(count, rate);
        std::vector<CfrFrame> frames;
        frames.reserve(count);
        for (std::size_t n = 0; n < count; ++n)
        {
            CfrFrame f = gen_cfr(scene, scene.trajectory[n].time);
            if (desc.snr_db)
            {
                Rng rng(mix_seed(desc.seed, n));
                add_noise(f, *desc.snr_db, rng);
            }
            frames.push_back(std::move(f));
        }
        return frames;
    }
}
