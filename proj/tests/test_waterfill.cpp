// SPDX-License-Identifier: Apache-2.0
//
// relayopt - robust transceiver design for multi-hop AF MIMO relay chains
// Copyright (C) 2026 The relayopt authors
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

#include <catch_amalgamated.hpp>

#include "oracles.hpp"
#include "relayopt/waterfill.hpp"

using namespace relayopt;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

RealMatrix gains_of(std::initializer_list<std::initializer_list<double>> rows)
{
    RealMatrix g(static_cast<Index>(rows.size()), static_cast<Index>(rows.begin()->size()));
    Index k = 0;
    for (const auto& r : rows) {
        Index i = 0;
        for (double x : r)
            g(k, i++) = x;
        ++k;
    }
    return g;
}

/// Sorted random gains, hops x n.
RealMatrix random_gains(Rng& rng, Index hops, Index n)
{
    RealMatrix g(hops, n);
    for (Index k = 0; k < hops; ++k) {
        RealVector r(n);
        for (Index i = 0; i < n; ++i)
            r(i) = 0.3 + 2.0 * rng.uniform();
        std::sort(r.data(), r.data() + n, std::greater<>());
        g.row(k) = r.transpose();
    }
    return g;
}

double final_value(const Allocation& a)
{
    return a.objective_trace.back();
}

bool non_increasing(const std::vector<double>& trace, double slack)
{
    for (std::size_t t = 1; t < trace.size(); ++t)
        if (trace[t] > trace[t - 1] + slack)
            return false;
    return true;
}

} // namespace

TEST_CASE("weighted MSE: closed cases")
{
    const std::vector<double> one{1.0};
    const std::vector<double> p5{5.0};
    const Allocation single = waterfill_weighted_mse(gains_of({{1.0}}), one, p5);
    CHECK_THAT(single.f_sq(0, 0), WithinAbs(5.0, 1e-12));

    const std::vector<double> w{1.0, 1.0};
    const std::vector<double> p2{2.0};
    const Allocation equal = waterfill_weighted_mse(gains_of({{1.0, 1.0}}), w, p2);
    CHECK_THAT(equal.f_sq(0, 0), WithinAbs(1.0, 1e-12));
    CHECK_THAT(equal.f_sq(0, 1), WithinAbs(1.0, 1e-12));

    // Single hop, all streams on: f^2 = sqrt(w / mu) / h - 1 / h^2 gives (5/6, 7/6) here.
    const Allocation uneven = waterfill_weighted_mse(gains_of({{2.0, 1.0}}), w, p2);
    CHECK_THAT(uneven.f_sq(0, 0), WithinAbs(5.0 / 6.0, 1e-10));
    CHECK_THAT(uneven.f_sq(0, 1), WithinAbs(7.0 / 6.0, 1e-10));
}

TEST_CASE("weighted MSE: single hop against a grid")
{
    const RealMatrix g = gains_of({{2.0, 1.0}});
    const std::vector<double> w{1.0, 1.0};
    const std::vector<double> p{2.0};
    const double oracle = oracle::grid_two_streams(oracle::Scalar::Mse, w, g, p, 2000);
    const Allocation a = waterfill_weighted_mse(g, w, p);
    CHECK(std::abs(final_value(a) - oracle) <= 0.01 * std::abs(oracle));
    CHECK(final_value(a) <= oracle + 1e-12);
}

TEST_CASE("two hops against a joint grid")
{
    Rng rng(51);
    for (int t = 0; t < 4; ++t) {
        const RealMatrix g = random_gains(rng, 2, 2);
        const std::vector<double> p{0.5 + 4.0 * rng.uniform(), 0.5 + 4.0 * rng.uniform()};
        const std::vector<double> w{1.0, 0.4 + 0.6 * rng.uniform()};
        const std::vector<double> ones{1.0, 1.0};

        const double mse_ref = oracle::grid_two_streams(oracle::Scalar::Mse, w, g, p, 200);
        CHECK(std::abs(final_value(waterfill_weighted_mse(g, w, p)) - mse_ref) <= 0.01 * std::abs(mse_ref));

        const double cap_ref = oracle::grid_two_streams(oracle::Scalar::Log, ones, g, p, 200);
        CHECK(std::abs(final_value(waterfill_capacity(g, p)) - cap_ref) <= 0.01 * std::abs(cap_ref));

        const double max_ref = oracle::grid_two_streams(oracle::Scalar::Mse, ones, g, p, 200) / 2.0;
        CHECK(std::abs(final_value(waterfill_maxmse(g, p)) - max_ref) <= 0.01 * std::abs(max_ref));

        const std::vector<double> v{1.0 + rng.uniform(), 0.5};
        const double wsr_ref = oracle::grid_two_streams(oracle::Scalar::Log, v, g, p, 200);
        CHECK(std::abs(final_value(waterfill_weighted_sumrate(g, v, p)) - wsr_ref) <= 0.01 * std::abs(wsr_ref));
    }
}

TEST_CASE("capacity: classic water-filling")
{
    const std::vector<double> p2{2.0};
    const Allocation equal = waterfill_capacity(gains_of({{1.0, 1.0}}), p2);
    CHECK_THAT(equal.f_sq(0, 0), WithinAbs(1.0, 1e-12));
    CHECK_THAT(equal.f_sq(0, 1), WithinAbs(1.0, 1e-12));
    CHECK_THAT(-final_value(equal), WithinAbs(2.0, 1e-12));

    const std::vector<double> small{0.1};
    const Allocation skewed = waterfill_capacity(gains_of({{10.0, 0.01}}), small);
    CHECK_THAT(skewed.f_sq(0, 0), WithinAbs(0.1, 1e-12));
    CHECK(skewed.f_sq(0, 1) == 0.0);
}

TEST_CASE("max-MSE equals unit-weight MSE")
{
    const std::vector<double> p2{2.0};
    const Allocation a = waterfill_maxmse(gains_of({{1.0, 1.0}}), p2);
    CHECK_THAT(a.f_sq(0, 0), WithinAbs(1.0, 1e-12));
    CHECK_THAT(a.f_sq(0, 1), WithinAbs(1.0, 1e-12));

    Rng rng(52);
    for (int t = 0; t < 5; ++t) {
        const RealMatrix g = random_gains(rng, 3, 3);
        const std::vector<double> p{1.0 + rng.uniform(), 2.0, 3.0 * rng.uniform() + 0.1};
        const std::vector<double> ones(3, 1.0);
        const Allocation m = waterfill_maxmse(g, p);
        const Allocation w = waterfill_weighted_mse(g, ones, p);
        CHECK(m.f_sq == w.f_sq);
        CHECK(non_increasing(m.objective_trace, 1e-12));
    }
}

TEST_CASE("weighted sum-rate")
{
    Rng rng(53);
    const RealMatrix g = random_gains(rng, 2, 3);
    const std::vector<double> p{3.0, 5.0};
    const std::vector<double> ones(3, 1.0);
    const Allocation wsr = waterfill_weighted_sumrate(g, ones, p);
    const Allocation cap = waterfill_capacity(g, p);
    CHECK((wsr.f_sq - cap.f_sq).cwiseAbs().maxCoeff() < 1e-10);

    const RealMatrix flat = gains_of({{1.0, 1.0}});
    const std::vector<double> v{2.0, 1.0};
    const std::vector<double> p2{2.0};
    RealMatrix best;
    const double ref = oracle::grid_two_streams(oracle::Scalar::Log, v, flat, p2, 2000, &best);
    const Allocation a = waterfill_weighted_sumrate(flat, v, p2);
    CHECK(a.f_sq(0, 0) > a.f_sq(0, 1));
    CHECK(std::abs(final_value(a) - ref) <= 0.01 * std::abs(ref));
    CHECK_THAT(a.f_sq(0, 0), WithinAbs(best(0, 0), 0.01 * p2[0]));

    CHECK_THROWS_AS(waterfill_weighted_sumrate(flat, std::vector<double>{1.0, 2.0}, p2), ValidationError);
}

TEST_CASE("single stream takes the whole budget on every hop")
{
    const std::vector<double> p{3.0, 0.5, 7.0};
    const RealMatrix g = gains_of({{0.7}, {1.9}, {0.2}});
    for (const Objective& obj : std::vector<Objective>{Capacity{}, MaxMse{}, WeightedMse{identity(1)},
                                                       WeightedSumRate{{2.0}}}) {
        const Allocation a = waterfill(obj, g, p);
        for (Index k = 0; k < 3; ++k)
            CHECK_THAT(a.f_sq(k, 0), WithinRel(p[static_cast<std::size_t>(k)], 1e-12));
    }
}

TEST_CASE("traces are non-increasing and budgets are met")
{
    Rng rng(54);
    for (int t = 0; t < 100; ++t) {
        const Index hops = 1 + static_cast<Index>(t % 4);
        const Index n = 1 + static_cast<Index>((t / 4) % 4);
        const RealMatrix g = random_gains(rng, hops, n);
        std::vector<double> p;
        for (Index k = 0; k < hops; ++k)
            p.push_back(std::pow(10.0, 3.0 * rng.uniform()));
        const std::vector<Objective> objs{Capacity{}, MaxMse{}, WeightedMse{identity(n)},
                                          WeightedSumRate{std::vector<double>(static_cast<std::size_t>(n), 1.0)}};
        for (const auto& obj : objs) {
            const Allocation a = waterfill(obj, g, p);
            CHECK(a.converged);
            CHECK(a.sweeps <= 200);
            CHECK(non_increasing(a.objective_trace, 1e-10));
            for (Index k = 0; k < hops; ++k)
                CHECK_THAT(a.f_sq.row(k).sum(), WithinRel(p[static_cast<std::size_t>(k)], 1e-12));
            CHECK(a.f_sq.minCoeff() >= 0.0);
        }
    }
}

TEST_CASE("stream_gamma matches the product oracle")
{
    Rng rng(55);
    const RealMatrix g = random_gains(rng, 3, 2);
    RealMatrix f(3, 2);
    f << 1.0, 2.0, 0.5, 0.1, 3.0, 0.0;
    const RealVector lib = stream_gamma(g, f);
    const auto ref = oracle::gamma_products(g, f);
    for (Index i = 0; i < 2; ++i)
        CHECK_THAT(lib(i), WithinAbs(ref[static_cast<std::size_t>(i)], 1e-15));
}

TEST_CASE("water-filling input validation")
{
    const std::vector<double> p{1.0};
    CHECK_THROWS_AS(waterfill_capacity(gains_of({{0.0, 0.0}}), p), DegenerateChannelError);
    CHECK_THROWS_AS(waterfill_capacity(gains_of({{1.0, 1.0}}), std::vector<double>{0.0}), ValidationError);
    CHECK_THROWS_AS(waterfill_capacity(gains_of({{1.0, 1.0}}), std::vector<double>{1.0, 1.0}), ValidationError);
    CHECK_THROWS_AS(waterfill_capacity(gains_of({{1.0, 1.0}}), p, SolverOptions{1e-8, 0}), ValidationError);
}
