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
#ifndef METASPEC_SCENE_HPP
#define METASPEC_SCENE_HPP

#include "metaspec/rng.hpp"
#include "metaspec/types.hpp"

#include <utility>
#include <vector>

namespace metaspec
{
    // L-shaped receive array: M sensors along x, the origin element, N sensors along y.
    // Spectrum columns are ordered [x-branch m = 1..M, origin, y-branch n = 1..N].
    struct ArrayGeometry
    {
        int m_count = 4;      // x-branch sensors, excluding the origin
        int n_count = 3;      // y-branch sensors, excluding the origin
        double spacing = 0.0; // element spacing d in metres

        int sensor_count() const { return m_count + n_count + 1; }
        int origin_column() const { return m_count; }

        // Integer offsets (along x, along y) of the sensor stored in `column`, in units of d.
        std::pair<int, int> sensor_offset(int column) const;

        void validate() const;
    };

    // OFDM subcarrier frequencies in Hz, strictly increasing.
    struct SubcarrierGrid
    {
        std::vector<double> frequencies;

        // K subcarriers of width bandwidth/K centred on `center`.
        static SubcarrierGrid uniform(double center, double bandwidth, int count);

        int size() const { return static_cast<int>(frequencies.size()); }
        double center() const;
        void validate() const;
    };

    struct Path
    {
        cdouble alpha{1.0, 0.0}; // complex path gain
        double tof = 0.0;        // seconds
        double elevation = 0.0;  // theta, radians in [0, pi/2]
        double azimuth = 0.0;    // phi, radians in [0, pi)
    };

    struct TrajectoryInstant
    {
        double time = 0.0;
        std::vector<Path> paths;
    };

    struct MultipathScene
    {
        std::vector<Path> paths; // used when the trajectory is empty
        double propagation_speed = 3.0e8;
        ArrayGeometry geometry;
        SubcarrierGrid grid;
        std::vector<TrajectoryInstant> trajectory;

        // Paths active at time t. Static scenes ignore t; otherwise t must match an instant.
        const std::vector<Path> &paths_at(double t) const;
        void validate() const;
    };

    struct CfrFrame
    {
        ComplexMatrix values; // K x L
        double timestamp = 0.0;
    };

    struct SpectrumPair
    {
        Matrix amplitude; // K x L, linear magnitude
        Matrix phase;     // K x L, radians
    };

    double half_wavelength(double frequency, double propagation_speed = 3.0e8);

    void validate_path(const Path &path);

    // Channel frequency response of every (subcarrier, sensor) pair at time t.
    CfrFrame gen_cfr(const MultipathScene &scene, double t);

    // Same, for an explicit path list (no trajectory lookup).
    ComplexMatrix cfr_from_paths(const std::vector<Path> &paths, const ArrayGeometry &geometry,
                                 const SubcarrierGrid &grid, double propagation_speed);

    // Magnitude and principal argument in (-pi, pi]; zero entries get phase 0.
    SpectrumPair split_spectrums(const CfrFrame &frame);

    // Unwraps the phase of every sensor column along the subcarrier axis.
    SpectrumPair unwrap_subcarriers(SpectrumPair pair);

    ComplexMatrix combine_spectrums(const SpectrumPair &pair);

    // amplitude o amp_mask, phase + phase_mask.
    SpectrumPair apply_ris(const SpectrumPair &pair, const Matrix &amp_mask, const Matrix &phase_mask);

    // Additive circular complex Gaussian noise at the given SNR relative to mean entry power.
    void add_noise(CfrFrame &frame, double snr_db, Rng &rng);
}

#endif
