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
#include "metaspec/music.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace metaspec
{
    namespace
    {
        std::vector<double> arange(double lo, double hi, double step)
        {
            std::vector<double> v;
            const int n = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
            for (int i = 0; i < n; ++i)
                v.push_back(lo + i * step);
            return v;
        }

        bool sorted_nonempty(const std::vector<double> &v)
        {
            return !v.empty() && std::is_sorted(v.begin(), v.end());
        }

        int centre_window(const SteeringGrid &grid, int K) { return (K - grid.k_sub) / 2; }
    }

    void SteeringGrid::validate(const ArrayGeometry &geometry, int subcarriers) const
    {
        require(k_sub > 0 && k_sub < subcarriers, "subcarrier window must satisfy 0 < k' < K");
        require(m_sub > 0 && m_sub < geometry.m_count, "x sub-array must satisfy 0 < m' < M");
        require(n_sub > 0 && n_sub < geometry.n_count, "y sub-array must satisfy 0 < n' < N");
        require(sorted_nonempty(theta) && sorted_nonempty(phi) && sorted_nonempty(tau),
                "MUSIC grid axes must be non-empty and sorted");
    }

    SteeringGrid SteeringGrid::defaults(const ArrayGeometry &geometry, int subcarriers, double angle_step_deg,
                                        double tau_max, double tau_step)
    {
        SteeringGrid g;
        g.k_sub = std::min(16, subcarriers / 2);
        g.m_sub = geometry.m_count / 2 + 1;
        g.n_sub = geometry.n_count / 2 + 1;
        g.theta = arange(0.0, kPi / 2, deg2rad(angle_step_deg));
        g.phi = arange(0.0, kPi / 2, deg2rad(angle_step_deg));
        g.tau = arange(0.0, tau_max, tau_step);
        return g;
    }

    ComplexVector steering_vector(double theta, double phi, double tau, const SteeringGrid &grid,
                                  const ArrayModel &model)
    {
        const auto &f = model.subcarriers.frequencies;
        const int K = static_cast<int>(f.size());
        grid.validate(model.geometry, K);
        const int c0 = centre_window(grid, K);
        const double d = model.geometry.spacing, c = model.propagation_speed;
        const double ux = d * std::cos(theta) * std::sin(phi) / c;
        const double uy = d * std::sin(theta) * std::sin(phi) / c;

        ComplexVector a(grid.dimension());
        a(0) = 1.0;
        int idx = 1;
        for (int kk = 0; kk < grid.k_sub; ++kk)
        {
            const double fk = f[c0 + kk];
            const double delay = (fk - f[c0]) * tau;
            for (int m = 1; m <= grid.m_sub; ++m)
                a(idx++) = std::polar(1.0, -2.0 * kPi * (delay + fk * m * ux));
        }
        for (int kk = 0; kk < grid.k_sub; ++kk)
        {
            const double fk = f[c0 + kk];
            const double delay = (fk - f[c0]) * tau;
            for (int n = 1; n <= grid.n_sub; ++n)
                a(idx++) = std::polar(1.0, -2.0 * kPi * (delay + fk * n * uy));
        }
        return a;
    }

    ComplexVector window_snapshot(const ComplexMatrix &frame, int k0, const SteeringGrid &grid,
                                  const ArrayGeometry &geometry)
    {
        const int o = geometry.origin_column();
        ComplexVector v(grid.dimension());
        v(0) = frame(k0, o);
        int idx = 1;
        for (int kk = 0; kk < grid.k_sub; ++kk)
            for (int m = 1; m <= grid.m_sub; ++m)
                v(idx++) = frame(k0 + kk, m - 1);
        for (int kk = 0; kk < grid.k_sub; ++kk)
            for (int n = 1; n <= grid.n_sub; ++n)
                v(idx++) = frame(k0 + kk, o + n);
        return v;
    }

    ComplexMatrix smooth_covariance(const std::vector<ComplexMatrix> &frames, const SteeringGrid &grid,
                                    const ArrayGeometry &geometry)
    {
        require(!frames.empty(), "covariance needs at least one frame");
        const int K = static_cast<int>(frames[0].rows());
        require(frames[0].cols() == geometry.sensor_count(), "frame width differs from the array");
        require(grid.k_sub > 0 && grid.k_sub <= K && grid.m_sub > 0 && grid.m_sub <= geometry.m_count &&
                    grid.n_sub > 0 && grid.n_sub <= geometry.n_count,
                "sub-array larger than the data");
        const int n = grid.dimension();
        ComplexMatrix R = ComplexMatrix::Zero(n, n);
        std::size_t count = 0;
        for (const auto &f : frames)
        {
            require(f.rows() == K && f.cols() == frames[0].cols(), "frames differ in shape");
            for (int k0 = 0; k0 + grid.k_sub <= K; ++k0)
            {
                const ComplexVector v = window_snapshot(f, k0, grid, geometry);
                R.noalias() += v * v.adjoint();
                ++count;
            }
        }
        R /= static_cast<double>(count);
        // Remove rounding asymmetry.
        return 0.5 * (R + R.adjoint());
    }

    MusicSpectrum music_spectrum(const std::vector<ComplexMatrix> &frames, const SteeringGrid &grid,
                                 const ArrayModel &model, int sources, MusicKernel kernel)
    {
        const int K = model.subcarriers.size();
        grid.validate(model.geometry, K);
        const int dim = grid.dimension();
        require(sources >= 1 && sources < dim, "source count must be below the covariance dimension");

        const ComplexMatrix R = smooth_covariance(frames, grid, model.geometry);
        require(R.cwiseAbs().maxCoeff() > 0.0, "covariance is zero; frames carry no signal");
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(R);
        require(eig.info() == Eigen::Success, "covariance eigendecomposition failed");
        // Eigenvalues ascending: noise subspace first.
        const ComplexMatrix noise = eig.eigenvectors().leftCols(dim - sources);
        const ComplexMatrix signal = eig.eigenvectors().rightCols(sources);

        MusicSpectrum spec;
        spec.grid = grid;
        spec.values.assign(grid.size(), 0.0);
        const std::size_t nt = grid.theta.size(), np = grid.phi.size(), nd = grid.tau.size();

        if (kernel == MusicKernel::Serial)
        {
            for (std::size_t i = 0; i < nt; ++i)
                for (std::size_t j = 0; j < np; ++j)
                    for (std::size_t k = 0; k < nd; ++k)
                    {
                        const ComplexVector a = steering_vector(grid.theta[i], grid.phi[j], grid.tau[k], grid, model);
                        const double q = (noise.adjoint() * a).squaredNorm();
                        spec.values[spec.index(i, j, k)] = 1.0 / (q + kMusicEpsilon);
                    }
            return spec;
        }

        // Separable steering: per-tau subcarrier phase ramp times per-angle spatial phases.
        const auto &f = model.subcarriers.frequencies;
        const int c0 = centre_window(grid, K);
        std::vector<ComplexVector> ramps(nd, ComplexVector(grid.k_sub));
        for (std::size_t k = 0; k < nd; ++k)
            for (int kk = 0; kk < grid.k_sub; ++kk)
                ramps[k](kk) = std::polar(1.0, -2.0 * kPi * (f[c0 + kk] - f[c0]) * grid.tau[k]);
        const double norm2 = static_cast<double>(dim);

#pragma omp parallel
        {
            ComplexVector a(dim);
#pragma omp for schedule(static)
            for (std::size_t i = 0; i < nt; ++i)
                for (std::size_t j = 0; j < np; ++j)
                {
                    const ComplexVector s0 = steering_vector(grid.theta[i], grid.phi[j], 0.0, grid, model);
                    for (std::size_t k = 0; k < nd; ++k)
                    {
                        a(0) = s0(0);
                        int idx = 1;
                        for (int branch = 0; branch < 2; ++branch)
                        {
                            const int width = branch == 0 ? grid.m_sub : grid.n_sub;
                            for (int kk = 0; kk < grid.k_sub; ++kk)
                                for (int m = 0; m < width; ++m, ++idx)
                                    a(idx) = s0(idx) * ramps[k](kk);
                        }
                        const double q = std::max(0.0, norm2 - (signal.adjoint() * a).squaredNorm());
                        spec.values[spec.index(i, j, k)] = 1.0 / (q + kMusicEpsilon);
                    }
                }
        }
        return spec;
    }

    std::vector<Peak> find_peaks(const MusicSpectrum &spec, std::size_t count)
    {
        require(count >= 1, "peak count must be at least 1");
        const long nt = static_cast<long>(spec.grid.theta.size()), np = static_cast<long>(spec.grid.phi.size()),
                   nd = static_cast<long>(spec.grid.tau.size());
        std::vector<Peak> peaks;
        for (long i = 0; i < nt; ++i)
            for (long j = 0; j < np; ++j)
                for (long k = 0; k < nd; ++k)
                {
                    const double v = spec.at(i, j, k);
                    bool strict = true;
                    for (long di = -1; di <= 1 && strict; ++di)
                        for (long dj = -1; dj <= 1 && strict; ++dj)
                            for (long dk = -1; dk <= 1 && strict; ++dk)
                            {
                                if (di == 0 && dj == 0 && dk == 0)
                                    continue;
                                const long a = i + di, b = j + dj, c = k + dk;
                                if (a < 0 || a >= nt || b < 0 || b >= np || c < 0 || c >= nd)
                                    continue;
                                if (!(v > spec.at(a, b, c)))
                                    strict = false;
                            }
                    if (strict)
                        peaks.push_back({spec.grid.theta[i], spec.grid.phi[j], spec.grid.tau[k], v,
                                         static_cast<std::size_t>(i), static_cast<std::size_t>(j),
                                         static_cast<std::size_t>(k)});
                }
        std::stable_sort(peaks.begin(), peaks.end(),
                         [](const Peak &a, const Peak &b) { return a.magnitude > b.magnitude; });
        if (peaks.size() > count)
            peaks.resize(count);
        return peaks;
    }

    std::size_t cell_distance(const Peak &a, const Peak &b)
    {
        auto diff = [](std::size_t x, std::size_t y) { return x > y ? x - y : y - x; };
        return std::max({diff(a.i, b.i), diff(a.j, b.j), diff(a.k, b.k)});
    }

    std::vector<int> match_peaks(const std::vector<Peak> &reference, const std::vector<Peak> &candidates)
    {
        std::vector<int> out(reference.size(), -1);
        std::vector<bool> used(candidates.size(), false);
        for (std::size_t r = 0; r < reference.size(); ++r)
        {
            std::size_t best = std::numeric_limits<std::size_t>::max();
            for (std::size_t c = 0; c < candidates.size(); ++c)
            {
                if (used[c])
                    continue;
                const std::size_t d = cell_distance(reference[r], candidates[c]);
                if (d < best)
                {
                    best = d;
                    out[r] = static_cast<int>(c);
                }
            }
            if (out[r] >= 0)
                used[out[r]] = true;
        }
        return out;
    }
}
