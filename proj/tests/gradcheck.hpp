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
// Finite-difference checks for the generator and its layers.
#ifndef METASPEC_TEST_GRADCHECK_HPP
#define METASPEC_TEST_GRADCHECK_HPP

#include "metaspec/generator.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

namespace gradcheck
{
    using metaspec::Tensor;

    struct Report
    {
        double worst = 0.0; // largest relative error seen
        int checked = 0;
        std::string where;
    };

    inline double rel(double a, double b)
    {
        const double s = std::max({std::abs(a), std::abs(b), 1e-6});
        return std::abs(a - b) / s;
    }

    inline Tensor random_tensor(metaspec::Rng &rng, int n, int c, int h, int w)
    {
        Tensor t(n, c, h, w);
        for (double &v : t.data)
            v = rng.uniform(-1.0, 1.0);
        return t;
    }

    inline double inner(const Tensor &a, const Tensor &b)
    {
        double acc = 0.0;
        for (std::size_t i = 0; i < a.data.size(); ++i)
            acc += a.data[i] * b.data[i];
        return acc;
    }

    // Central differences of loss() over every entry of v against the analytic gradient g.
    template <class Vec, class Grad>
    void compare(Vec &v, const Grad &g, const std::function<double()> &loss, const std::string &tag, Report &rep,
                 double h = 1e-5)
    {
        for (std::size_t i = 0; i < v.size(); ++i)
        {
            const double keep = v[i];
            v[i] = keep + h;
            const double up = loss();
            v[i] = keep - h;
            const double down = loss();
            v[i] = keep;
            const double e = rel(g[i], (up - down) / (2.0 * h));
            ++rep.checked;
            if (e > rep.worst)
            {
                rep.worst = e;
                rep.where = tag + "[" + std::to_string(i) + "]";
            }
        }
    }

    // Whole network: loss = <r, G(e)>, so dL/dG = r.
    inline Report generator(std::uint64_t seed, const metaspec::GeneratorArch &arch, int n, int h, int w,
                            bool serial = false)
    {
        metaspec::Rng rng(seed);
        metaspec::Generator gen(arch);
        gen.use_serial_kernels = serial;
        gen.initialize(rng);
        Tensor input = random_tensor(rng, n, arch.in_channels, h, w);
        const Tensor r = random_tensor(rng, n, arch.out_channels, h, w);

        std::vector<double> grad;
        Tensor dinput;
        gen.forward(input);
        gen.backward(r, grad, &dinput);

        Report rep;
        auto loss = [&] { return inner(gen.forward(input), r); };
        compare(gen.parameters(), grad, loss, "param", rep);
        compare(input.data, dinput.data, loss, "input", rep);
        return rep;
    }

    inline Report leaky(std::uint64_t seed, double slope)
    {
        metaspec::Rng rng(seed);
        Tensor in = random_tensor(rng, 2, 3, 4, 5);
        const Tensor r = random_tensor(rng, 2, 3, 4, 5);
        Tensor out, din;
        metaspec::leaky_backward(in, r, slope, din);
        Report rep;
        compare(in.data, din.data, [&] { metaspec::leaky_forward(in, slope, out); return inner(out, r); }, "leaky",
                rep);
        return rep;
    }

    inline Report upsample(std::uint64_t seed, int h, int w, int oh, int ow)
    {
        metaspec::Rng rng(seed);
        Tensor in = random_tensor(rng, 2, 2, h, w);
        const Tensor r = random_tensor(rng, 2, 2, oh, ow);
        Tensor out, din;
        metaspec::upsample_backward(r, h, w, din);
        Report rep;
        compare(in.data, din.data, [&] { metaspec::upsample_forward(in, oh, ow, out); return inner(out, r); },
                "upsample", rep);
        return rep;
    }

    inline Report conv(std::uint64_t seed, int cin, int cout, int stride, bool serial)
    {
        metaspec::Rng rng(seed);
        const metaspec::kernels::ConvShape s{cin, cout, stride};
        std::vector<double> weight(static_cast<std::size_t>(cout) * cin * 9), bias(cout);
        for (double &v : weight)
            v = rng.uniform(-1.0, 1.0);
        for (double &v : bias)
            v = rng.uniform(-1.0, 1.0);
        Tensor in = random_tensor(rng, 2, cin, 7, 5);
        const Tensor r = random_tensor(rng, 2, cout, metaspec::conv_out(7, stride), metaspec::conv_out(5, stride));

        auto fwd = [&] {
            Tensor out;
            if (serial)
                metaspec::kernels::serial::conv3x3_forward(in, weight.data(), bias.data(), s, out);
            else
                metaspec::kernels::parallel::conv3x3_forward(in, weight.data(), bias.data(), s, out);
            return inner(out, r);
        };
        std::vector<double> dw(weight.size(), 0.0), db(bias.size(), 0.0);
        Tensor din;
        if (serial)
            metaspec::kernels::serial::conv3x3_backward(in, weight.data(), r, s, dw.data(), db.data(), &din);
        else
            metaspec::kernels::parallel::conv3x3_backward(in, weight.data(), r, s, dw.data(), db.data(), &din);

        Report rep;
        compare(weight, dw, fwd, "weight", rep);
        compare(bias, db, fwd, "bias", rep);
        compare(in.data, din.data, fwd, "input", rep);
        return rep;
    }
}

#endif
