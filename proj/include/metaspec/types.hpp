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
#ifndef METASPEC_TYPES_HPP
#define METASPEC_TYPES_HPP

#include <Eigen/Dense>

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace metaspec
{
    using cdouble = std::complex<double>;
    using Matrix = Eigen::MatrixXd;         // K x L real spectra, masks, measurements
    using ComplexMatrix = Eigen::MatrixXcd; // K x L channel frequency responses
    using ComplexVector = Eigen::VectorXcd;
    using FrameStack = std::vector<Matrix>; // T frames of equal shape

    inline constexpr double kPi = std::numbers::pi;

    inline double deg2rad(double deg) { return deg * kPi / 180.0; }
    inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

    // Raised when an input violates a documented shape or range precondition.
    class InvalidArgument : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    inline void require(bool condition, const std::string &message)
    {
        if (!condition)
            throw InvalidArgument(message);
    }

    inline bool same_shape(const Matrix &a, const Matrix &b)
    {
        return a.rows() == b.rows() && a.cols() == b.cols();
    }
}

#endif
