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
#include "gradcheck.hpp"
#include "metaspec/kernels.hpp"

#include <doctest.h>
#include <omp.h>

using namespace metaspec;

namespace
{
    std::vector<double> random_vec(Rng &rng, std::size_t n)
    {
        std::vector<double> v(n);
        for (double &x : v)
            x = rng.uniform(-1.0, 1.0);
        return v;
    }
}

TEST_CASE("3x3 conv against a hand-computed value")
{
    // Single channel 3x3 input, all-ones kernel: centre output sums the whole input.
    Tensor in(1, 1, 3, 3);
    for (int i = 0; i < 9; ++i)
        in.data[i] = i + 1;
    const std::vector<double> w(9, 1.0), b{0.5};
    Tensor out;
    kernels::serial::conv3x3_forward(in, w.data(), b.data(), {1, 1, 1}, out);
    CHECK(out(0, 0, 1, 1) == 45.5);
    CHECK(out(0, 0, 0, 0) == 1 + 2 + 4 + 5 + 0.5);

    kernels::serial::conv3x3_forward(in, w.data(), b.data(), {1, 1, 2}, out);
    CHECK(out.h == 2);
    CHECK(out.w == 2);
    CHECK(out(0, 0, 1, 1) == 5 + 6 + 8 + 9 + 0.5);
}

TEST_CASE("serial and parallel conv agree")
{
    Rng rng(17);
    for (int stride : {1, 2})
        for (int cin : {1, 3})
        {
            const kernels::ConvShape s{cin, 4, stride};
            const auto w = random_vec(rng, 4 * cin * 9), b = random_vec(rng, 4);
            const Tensor in = gradcheck::random_tensor(rng, 3, cin, 11, 6);
            Tensor os, op;
            kernels::serial::conv3x3_forward(in, w.data(), b.data(), s, os);
            kernels::parallel::conv3x3_forward(in, w.data(), b.data(), s, op);
            REQUIRE(os.same_shape(op));
            for (std::size_t i = 0; i < os.data.size(); ++i)
                CHECK(os.data[i] == doctest::Approx(op.data[i]).epsilon(1e-12));

            const Tensor g = gradcheck::random_tensor(rng, 3, 4, os.h, os.w);
            std::vector<double> dws(w.size(), 0.0), dbs(4, 0.0), dwp = dws, dbp = dbs;
            Tensor dis, dip;
            kernels::serial::conv3x3_backward(in, w.data(), g, s, dws.data(), dbs.data(), &dis);
            kernels::parallel::conv3x3_backward(in, w.data(), g, s, dwp.data(), dbp.data(), &dip);
            for (std::size_t i = 0; i < dws.size(); ++i)
                CHECK(dws[i] == doctest::Approx(dwp[i]).epsilon(1e-12));
            for (std::size_t i = 0; i < dbs.size(); ++i)
                CHECK(dbs[i] == doctest::Approx(dbp[i]).epsilon(1e-12));
            for (std::size_t i = 0; i < dis.data.size(); ++i)
                CHECK(dis.data[i] == doctest::Approx(dip.data[i]).epsilon(1e-12));
        }
}

TEST_CASE("conv backward accumulates into the gradient buffers")
{
    Rng rng(2);
    const kernels::ConvShape s{2, 2, 1};
    const auto w = random_vec(rng, 36);
    const Tensor in = gradcheck::random_tensor(rng, 1, 2, 4, 4);
    const Tensor g = gradcheck::random_tensor(rng, 1, 2, 4, 4);
    std::vector<double> once(36, 0.0), twice(36, 0.0), db1(2, 0.0), db2(2, 0.0);
    kernels::parallel::conv3x3_backward(in, w.data(), g, s, once.data(), db1.data(), nullptr);
    kernels::parallel::conv3x3_backward(in, w.data(), g, s, twice.data(), db2.data(), nullptr);
    kernels::parallel::conv3x3_backward(in, w.data(), g, s, twice.data(), db2.data(), nullptr);
    for (std::size_t i = 0; i < once.size(); ++i)
        CHECK(twice[i] == doctest::Approx(2.0 * once[i]));
}

TEST_CASE("parallel conv is independent of the thread count")
{
    Rng rng(23);
    const kernels::ConvShape s{3, 5, 2};
    const auto w = random_vec(rng, 5 * 3 * 9);
    const Tensor in = gradcheck::random_tensor(rng, 6, 3, 12, 8);
    const Tensor g = gradcheck::random_tensor(rng, 6, 5, 6, 4);
    auto run = [&](int threads) {
        const int keep = omp_get_max_threads();
        omp_set_num_threads(threads);
        std::vector<double> dw(w.size(), 0.0), db(5, 0.0);
        kernels::parallel::conv3x3_backward(in, w.data(), g, s, dw.data(), db.data(), nullptr);
        omp_set_num_threads(keep);
        return dw;
    };
    CHECK(run(1) == run(3));
}

TEST_CASE("conv rejects mismatched channels and strides")
{
    const std::vector<double> w(18, 0.0), b(1, 0.0);
    Tensor out;
    CHECK_THROWS_AS(kernels::serial::conv3x3_forward(Tensor(1, 1, 4, 4), w.data(), b.data(), {2, 1, 1}, out),
                    InvalidArgument);
    CHECK_THROWS_AS(kernels::parallel::conv3x3_forward(Tensor(1, 2, 4, 4), w.data(), b.data(), {2, 1, 3}, out),
                    InvalidArgument);
}
