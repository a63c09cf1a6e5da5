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
#include "metaspec/metrics.hpp"
#include "metaspec/decoder.hpp"

#include <json.hpp>

#include <algorithm>

namespace metaspec
{
    double aoa_mse(const std::vector<AoaSample> &estimates, const std::vector<AoaSample> &reference)
    {
        require(!estimates.empty() && !reference.empty(), "AoA MSE needs estimates and reference instants");
        require(std::is_sorted(estimates.begin(), estimates.end(),
                               [](const AoaSample &a, const AoaSample &b) { return a.time < b.time; }),
                "AoA estimates must be in time order");
        double acc = 0.0;
        std::size_t held = 0;
        for (const auto &r : reference)
        {
            while (held + 1 < estimates.size() && estimates[held + 1].time <= r.time)
                ++held;
            const double dt = rad2deg(estimates[held].theta - r.theta);
            const double dp = rad2deg(estimates[held].phi - r.phi);
            acc += 0.5 * (dt * dt + dp * dp);
        }
        return acc / static_cast<double>(reference.size());
    }

    int fingerprint_distance(const std::vector<SpectrumPair> &estimate, const std::vector<SpectrumPair> &truth,
                             int rx, int ry)
    {
        require(estimate.size() == truth.size(), "frame counts differ");
        int d = 0;
        for (std::size_t i = 0; i < truth.size(); ++i)
            d += hamming(fingerprint(estimate[i], rx, ry), fingerprint(truth[i], rx, ry));
        return d;
    }

    PsnrPair spectrum_psnr(const std::vector<SpectrumPair> &estimate, const std::vector<SpectrumPair> &truth)
    {
        require(estimate.size() == truth.size() && !truth.empty(), "frame counts differ");
        FrameStack ea, ep, ta, tp;
        for (std::size_t i = 0; i < truth.size(); ++i)
        {
            ea.push_back(estimate[i].amplitude);
            ep.push_back(estimate[i].phase);
            ta.push_back(truth[i].amplitude);
            tp.push_back(truth[i].phase);
        }
        return {psnr(ea, ta), psnr(ep, tp)};
    }

    std::string MetricsReport::to_json() const
    {
        nlohmann::ordered_json j;
        j["psnr_amp"] = psnr_amp;
        j["psnr_phase"] = psnr_phase;
        j["aoa_mse"] = aoa_mse;
        j["compression_ratio"] = compression_ratio;
        j["hamming_trace"] = hamming_trace;
        j["hamming_final"] = hamming_final;
        j["fingerprint_cells"] = fingerprint_cells;
        j["sampled_indices"] = sampled_indices;
        j["sampling_richness"] = sampling_richness;
        return j.dump(2) + "\n";
    }
}
