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
#include "metaspec/scene.hpp"

#include <cmath>
#include <string>

namespace metaspec
{
    std::pair<int, int> ArrayGeometry::sensor_offset(int column) const
    {
        require(column >= 0 && column < sensor_count(), "sensor column out of range");
        if (column < m_count)
            return {column + 1, 0};
        if (column == m_count)
            return {0, 0};
        return {0, column - m_count};
    }

    void ArrayGeometry::validate() const
    {
        require(m_count >= 1 && n_count >= 1, "array needs at least one sensor on each branch");
        require(std::isfinite(spacing) && spacing > 0.0, "array spacing must be positive");
    }

    SubcarrierGrid SubcarrierGrid::uniform(double center, double bandwidth, int count)
    {
        require(count >= 1, "subcarrier count must be at least 1");
        require(center > 0.0 && bandwidth > 0.0, "center frequency and bandwidth must be positive");
        SubcarrierGrid grid;
        grid.frequencies.resize(static_cast<std::size_t>(count));
        const double spacing = bandwidth / count;
        for (int k = 0; k < count; ++k)
            grid.frequencies[k] = center + (k - 0.5 * (count - 1)) * spacing;
        return grid;
    }

    double SubcarrierGrid::center() const
    {
        require(!frequencies.empty(), "empty subcarrier grid");
        return 0.5 * (frequencies.front() + frequencies.back());
    }

    void SubcarrierGrid::validate() const
    {
        require(!frequencies.empty(), "subcarrier grid must not be empty");
        for (std::size_t k = 0; k < frequencies.size(); ++k)
        {
            require(std::isfinite(frequencies[k]), "non-finite subcarrier frequency");
            if (k > 0)
                require(frequencies[k] > frequencies[k - 1], "subcarrier frequencies must be strictly increasing");
        }
    }

    double half_wavelength(double frequency, double propagation_speed)
    {
        return 0.5 * propagation_speed / frequency;
    }

    void validate_path(const Path &p)
    {
        require(std::isfinite(p.alpha.real()) && std::isfinite(p.alpha.imag()) && std::isfinite(p.tof) &&
                    std::isfinite(p.elevation) && std::isfinite(p.azimuth),
                "non-finite path parameter");
        require(p.tof >= 0.0, "path time of flight must be non-negative");
        require(p.elevation >= 0.0 && p.elevation <= 0.5 * kPi + 1e-12, "elevation must lie in [0, pi/2]");
        require(p.azimuth >= 0.0 && p.azimuth < kPi, "azimuth must lie in [0, pi)");
    }

    const std::vector<Path> &MultipathScene::paths_at(double t) const
    {
        if (trajectory.empty())
            return paths;
        for (const auto &instant : trajectory)
            if (std::abs(instant.time - t) <= 1e-9 * std::max(1.0, std::abs(t)))
                return instant.paths;
        throw InvalidArgument("time " + std::to_string(t) + " is not a trajectory instant");
    }

    void MultipathScene::validate() const
    {
        geometry.validate();
        grid.validate();
        require(std::isfinite(propagation_speed) && propagation_speed > 0.0, "propagation speed must be positive");
    }

    ComplexMatrix cfr_from_paths(const std::vector<Path> &paths, const ArrayGeometry &geometry,
                                 const SubcarrierGrid &grid, double c)
    {
        require(!paths.empty(), "scene has no propagation paths");
        for (const auto &p : paths)
            validate_path(p);

        const int K = grid.size();
        const int L = geometry.sensor_count();
        ComplexMatrix H = ComplexMatrix::Zero(K, L);
        for (const auto &p : paths)
        {
            const double ux = geometry.spacing * std::cos(p.elevation) * std::sin(p.azimuth) / c;
            const double uy = geometry.spacing * std::sin(p.elevation) * std::sin(p.azimuth) / c;
            for (int col = 0; col < L; ++col)
            {
                const auto [mx, ny] = geometry.sensor_offset(col);
                const double delay = p.tof + mx * ux + ny * uy;
                for (int k = 0; k < K; ++k)
                    H(k, col) += p.alpha * std::polar(1.0, -2.0 * kPi * grid.frequencies[k] * delay);
            }
        }
        return H;
    }

    CfrFrame gen_cfr(const MultipathScene &scene, double t)
    {
        scene.validate();
        return CfrFrame{cfr_from_paths(scene.paths_at(t), scene.geometry, scene.grid, scene.propagation_speed), t};
    }

    SpectrumPair split_spectrums(const CfrFrame &frame)
    {
        const auto &H = frame.values;
        SpectrumPair out{Matrix(H.rows(), H.cols()), Matrix(H.rows(), H.cols())};
        for (Eigen::Index j = 0; j < H.cols(); ++j)
            for (Eigen::Index k = 0; k < H.rows(); ++k)
            {
                const cdouble h = H(k, j);
                const double mag = std::abs(h);
                out.amplitude(k, j) = mag;
                double ph = mag == 0.0 ? 0.0 : std::arg(h);
                if (ph <= -kPi) // atan2(-0.0, x<0) returns -pi
                    ph = kPi;
                out.phase(k, j) = ph;
            }
        return out;
    }

    SpectrumPair unwrap_subcarriers(SpectrumPair pair)
    {
        auto &P = pair.phase;
        for (Eigen::Index j = 0; j < P.cols(); ++j)
        {
            double offset = 0.0;
            for (Eigen::Index k = 1; k < P.rows(); ++k)
            {
                const double raw_step = P(k, j) - (P(k - 1, j) - offset);
                offset -= 2.0 * kPi * std::round(raw_step / (2.0 * kPi));
                P(k, j) += offset;
            }
        }
        return pair;
    }

    ComplexMatrix combine_spectrums(const SpectrumPair &pair)
    {
        require(same_shape(pair.amplitude, pair.phase), "amplitude and phase shapes differ");
        ComplexMatrix H(pair.amplitude.rows(), pair.amplitude.cols());
        for (Eigen::Index j = 0; j < H.cols(); ++j)
            for (Eigen::Index k = 0; k < H.rows(); ++k)
                H(k, j) = std::polar(1.0, pair.phase(k, j)) * pair.amplitude(k, j);
        return H;
    }

    SpectrumPair apply_ris(const SpectrumPair &pair, const Matrix &amp_mask, const Matrix &phase_mask)
    {
        require(same_shape(pair.amplitude, pair.phase), "amplitude and phase shapes differ");
        require(same_shape(pair.amplitude, amp_mask) && same_shape(pair.phase, phase_mask),
                "RIS mask shape does not match the spectrum shape");
        return SpectrumPair{pair.amplitude.cwiseProduct(amp_mask), pair.phase + phase_mask};
    }

    void add_noise(CfrFrame &frame, double snr_db, Rng &rng)
    {
        const double power = frame.values.squaredNorm() / static_cast<double>(frame.values.size());
        const double sigma = std::sqrt(power / std::pow(10.0, snr_db / 10.0) / 2.0);
        for (Eigen::Index j = 0; j < frame.values.cols(); ++j)
            for (Eigen::Index k = 0; k < frame.values.rows(); ++k)
            {
                const double re = rng.normal();
                const double im = rng.normal();
                frame.values(k, j) += sigma * cdouble(re, im);
            }
    }
}
