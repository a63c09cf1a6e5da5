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
#ifndef METASPEC_MUSIC_HPP
#define METASPEC_MUSIC_HPP

#include "metaspec/scene.hpp"

#include <vector>

namespace metaspec
{
    // Search lattice plus the smoothing sub-array sizes.
    struct SteeringGrid
    {
        std::vector<double> theta; // elevation, radians
        std::vector<double> phi;   // azimuth, radians
        std::vector<double> tau;   // seconds
        int k_sub = 0;             // subcarriers per window
        int m_sub = 0;             // x-branch sensors used
        int n_sub = 0;             // y-branch sensors used

        int dimension() const { return 1 + k_sub * (m_sub + n_sub); }
        std::size_t size() const { return theta.size() * phi.size() * tau.size(); }
        void validate(const ArrayGeometry &geometry, int subcarriers) const;

        // k' = min(16, K/2), m' = M/2 + 1, n' = N/2 + 1; theta and phi over [0, 90] degrees.
        static SteeringGrid defaults(const ArrayGeometry &geometry, int subcarriers, double angle_step_deg = 2.0,
                                     double tau_max = 100e-9, double tau_step = 2e-9);
    };

    // Everything the steering model needs besides the grid.
    struct ArrayModel
    {
        ArrayGeometry geometry;
        SubcarrierGrid subcarriers;
        double propagation_speed = 3.0e8;

        static ArrayModel of(const MultipathScene &scene)
        {
            return {scene.geometry, scene.grid, scene.propagation_speed};
        }
    };

    // [1; x-branch (subcarrier-major, m = 1..m'); y-branch (n = 1..n')]. The delay enters
    // through the subcarrier offset from the first subcarrier of the centre window.
    ComplexVector steering_vector(double theta, double phi, double tau, const SteeringGrid &grid,
                                  const ArrayModel &model);

    // Snapshot of one subcarrier window starting at k0, laid out like steering_vector.
    ComplexVector window_snapshot(const ComplexMatrix &frame, int k0, const SteeringGrid &grid,
                                  const ArrayGeometry &geometry);

    // Mean of v v^H over all windows of all frames.
    ComplexMatrix smooth_covariance(const std::vector<ComplexMatrix> &frames, const SteeringGrid &grid,
                                    const ArrayGeometry &geometry);

    struct MusicSpectrum
    {
        SteeringGrid grid;
        std::vector<double> values; // theta-major, then phi, then tau

        std::size_t index(std::size_t i, std::size_t j, std::size_t k) const
        {
            return (i * grid.phi.size() + j) * grid.tau.size() + k;
        }
        double at(std::size_t i, std::size_t j, std::size_t k) const { return values[index(i, j, k)]; }
    };

    enum class MusicKernel
    {
        Serial,  // projects on the noise subspace directly
        Parallel // ||a||^2 - ||E_s^H a||^2, OpenMP over theta
    };

    inline constexpr double kMusicEpsilon = 1e-12;

    MusicSpectrum music_spectrum(const std::vector<ComplexMatrix> &frames, const SteeringGrid &grid,
                                 const ArrayModel &model, int sources = 1,
                                 MusicKernel kernel = MusicKernel::Parallel);

    struct Peak
    {
        double theta = 0.0, phi = 0.0, tau = 0.0, magnitude = 0.0;
        std::size_t i = 0, j = 0, k = 0; // grid indices
    };

    // Strict 26-neighbourhood maxima, strongest first; equal magnitudes keep grid order.
    std::vector<Peak> find_peaks(const MusicSpectrum &spec, std::size_t count);

    // Pairs each reference peak with the nearest unused candidate (grid-index distance).
    // Returns, per reference peak, the index into `candidates` or -1.
    std::vector<int> match_peaks(const std::vector<Peak> &reference, const std::vector<Peak> &candidates);

    // Largest per-axis grid-index difference between two peaks.
    std::size_t cell_distance(const Peak &a, const Peak &b);
}

#endif
