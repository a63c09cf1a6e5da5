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
#ifndef METASPEC_SCENE_FILE_HPP
#define METASPEC_SCENE_FILE_HPP

#include "metaspec/scene.hpp"

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <vector>

namespace metaspec
{
    // Keyframe for one path: from `time` on, the path has these parameters.
    struct Waypoint
    {
        double time = 0.0;
        int path = 0;
        double tof = 0.0;       // seconds
        double elevation = 0.0; // radians
        double azimuth = 0.0;   // radians
    };

    enum class Motion
    {
        Hold,  // parameters jump at each waypoint
        Linear // parameters are interpolated between waypoints
    };

    // Parsed scene description file. `base.paths` hold the parameters at t = 0.
    struct SceneDescription
    {
        MultipathScene base;
        std::vector<Waypoint> waypoints;
        Motion motion = Motion::Linear;
        std::uint64_t seed = 1;
        std::optional<double> snr_db; // noise off when empty

        std::vector<Path> paths_at(double t) const;

        // Trajectory with one instant per captured frame, t_n = n / rate.
        MultipathScene expand(std::size_t frame_count, double rate) const;
    };

    SceneDescription parse_scene(std::istream &in);
    SceneDescription load_scene(const std::filesystem::path &file);

    // Number of frames captured in `duration` seconds at `rate` Hz.
    std::size_t frame_count(double duration, double rate);

    std::vector<CfrFrame> simulate_frames(const SceneDescription &scene, std::size_t count, double rate);
}

#endif
