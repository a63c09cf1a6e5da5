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
#ifndef METASPEC_METRICS_HPP
#define METASPEC_METRICS_HPP

#include "metaspec/scene.hpp"
#include "metaspec/semantic_hash.hpp"

#include <string>
#include <vector>

namespace metaspec
{
    // One angle estimate, stamped with the capture time of the frame it came from.
    struct AoaSample
    {
        double time = 0.0;
        double theta = 0.0; // radians
        double phi = 0.0;   // radians
    };

    // Mean over reference instants of ((dtheta^2 + dphi^2) / 2) in squared degrees. Estimates
    // are held from their capture time until the next one; before the first, the first is used.
    double aoa_mse(const std::vector<AoaSample> &estimates, const std::vector<AoaSample> &reference);

    // Sum over frames of the fingerprint Hamming distance between estimate and truth.
    int fingerprint_distance(const std::vector<SpectrumPair> &estimate, const std::vector<SpectrumPair> &truth,
                             int rx = 8, int ry = 8);

    struct PsnrPair
    {
        double amplitude = 0.0;
        double phase = 0.0;
    };

    PsnrPair spectrum_psnr(const std::vector<SpectrumPair> &estimate, const std::vector<SpectrumPair> &truth);

    struct MetricsReport
    {
        double psnr_amp = 0.0;
        double psnr_phase = 0.0;
        double aoa_mse = 0.0;
        double compression_ratio = 1.0;
        std::vector<int> hamming_trace;
        int hamming_final = 0;
        int fingerprint_cells = 0; // cells per fingerprint times frames
        std::vector<std::size_t> sampled_indices;
        std::vector<int> sampling_richness;
        double wall_time = 0.0; // kept out of to_json so reports compare bit for bit

        std::string to_json() const;
    };
}

#endif
