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
#include "relayopt/designer.hpp"
#include "relayopt/system_model.hpp"
#include "relayopt/verification.hpp"

using namespace relayopt;
using Catch::Matchers::WithinAbs;

namespace {

NetworkModel scalar_network()
{
    HopModel hop;
    hop.h_bar = identity(1);
    hop.sigma = ComplexMatrix::Zero(1, 1);
    hop.psi = ComplexMatrix::Zero(1, 1);
    hop.noise_var = 1.0;
    hop.power_budget = 1.0;
    NetworkModel net;
    net.n_streams = 1;
    net.hops.push_back(hop);
    return net;
}

NetworkModel identity_network(Index n, double noise)
{
    HopModel hop;
    hop.h_bar = identity(n);
    hop.sigma = ComplexMatrix::Zero(n, n);
    hop.psi = ComplexMatrix::Zero(n, n);
    hop.noise_var = noise;
    hop.power_budget = static_cast<double>(n);
    NetworkModel net;
    net.n_streams = n;
    net.hops.push_back(hop);
    return net;
}

/// Random precoders scaled to the per-hop budgets.
std::vector<ComplexMatrix> random_precoders(const NetworkModel& net, Rng& rng)
{
    std::vector<ComplexMatrix> p;
    for (Index k = 0; k < net.num_hops(); ++k)
        p.push_back(oracle::gaussian(net.hops[k].tx_dim(), net.input_dim(k), rng));
    const auto powers = transmit_powers(net, p);
    for (std::size_t k = 0; k < p.size(); ++k) {
        const double s = std::sqrt(net.hops[k].power_budget / powers[k]);
        p[k] *= s;
        for (std::size_t l = k + 1; l < p.size(); ++l)
            p[l] /= s;
    }
    return p;
}

NetworkModel seeded_network(std::uint64_t seed, int hops, Index n)
{
    Rng rng(seed);
    return random_network(rng, hops, n);
}

} // namespace

TEST_CASE("signal_covariances: hand cases")
{
    const NetworkModel net = identity_network(2, 1.0);
    const auto r = signal_covariances(net, {identity(2)});
    CHECK((r[0] - 2.0 * identity(2)).norm() < 1e-15);

    const NetworkModel noisy = identity_network(2, 0.7);
    const auto z = signal_covariances(noisy, {ComplexMatrix::Zero(2, 2)});
    CHECK((z[0] - 0.7 * identity(2)).norm() < 1e-15);
}

TEST_CASE("signal_covariances match a step-by-step recursion")
{
    const NetworkModel net = seeded_network(21, 2, 3);
    Rng rng(22);
    const auto p = random_precoders(net, rng);
    const auto lib = signal_covariances(net, p);
    const auto ref = oracle::covariances(net, p);
    REQUIRE(lib.size() == ref.size());
    for (std::size_t k = 0; k < lib.size(); ++k)
        CHECK((lib[k] - ref[k]).norm() < 1e-10 * std::max(1.0, ref[k].norm()));
}

TEST_CASE("mse_matrix: hand cases")
{
    const NetworkModel net = scalar_network();
    CHECK_THAT(mse_matrix(net, {identity(1)}, ComplexMatrix::Constant(1, 1, 0.5))(0, 0).real(),
               WithinAbs(0.5, 1e-15));

    const NetworkModel wide = identity_network(3, 1.0);
    const ComplexMatrix phi = mse_matrix(wide, {identity(3)}, ComplexMatrix::Zero(3, 3));
    CHECK((phi - identity(3)).norm() < 1e-15);
}

TEST_CASE("mse_matrix agrees with the perfect-CSI signal path formula")
{
    NetworkModel net = without_estimation_error(seeded_network(23, 3, 2));
    Rng rng(24);
    const auto p = random_precoders(net, rng);
    const ComplexMatrix g = oracle::gaussian(net.n_streams, net.hops.back().rx_dim(), rng);
    const ComplexMatrix lib = mse_matrix(net, p, g);
    const ComplexMatrix ref = oracle::perfect_csi_mse(net, p, g);
    CHECK((lib - ref).norm() < 1e-10 * ref.norm());
}

TEST_CASE("mse_matrix agrees with Monte Carlo under channel errors")
{
    NetworkModel net;
    net.n_streams = 2;
    Rng rng(25);
    for (int k = 0; k < 2; ++k) {
        HopModel hop;
        hop.h_bar = oracle::gaussian(3, 3, rng);
        ComplexMatrix s(3, 3), q(3, 3);
        for (Index i = 0; i < 3; ++i)
            for (Index j = 0; j < 3; ++j) {
                s(i, j) = std::pow(0.5, std::abs(i - j));
                q(i, j) = 0.05 * std::pow(0.3, std::abs(i - j));
            }
        hop.sigma = s;
        hop.psi = q;
        hop.noise_var = 0.5;
        hop.power_budget = 4.0;
        net.hops.push_back(hop);
    }
    const auto p = random_precoders(net, rng);
    const ComplexMatrix g = lmmse_equalizer(net, p);
    const ComplexMatrix model = mse_matrix(net, p, g);
    const ComplexMatrix empirical = oracle::monte_carlo_mse(net, p, g, 100000, 26);
    CHECK((empirical - model).norm() / model.norm() < 0.03);
}

TEST_CASE("lmmse_equalizer")
{
    const NetworkModel net = scalar_network();
    CHECK_THAT(lmmse_equalizer(net, {identity(1)})(0, 0).real(), WithinAbs(0.5, 1e-15));

    const NetworkModel wide = identity_network(2, 1.0);
    CHECK(lmmse_equalizer(wide, {ComplexMatrix::Zero(2, 2)}).norm() == 0.0);
}

TEST_CASE("lmmse_equalizer dominates perturbed equalizers")
{
    const NetworkModel net = seeded_network(27, 2, 3);
    Rng rng(28);
    const auto p = random_precoders(net, rng);
    const ComplexMatrix g = lmmse_equalizer(net, p);
    const ComplexMatrix best = mse_matrix(net, p, g);
    double worst = std::numeric_limits<double>::infinity();
    for (int t = 0; t < 100; ++t) {
        const ComplexMatrix delta = 0.1 * oracle::gaussian(g.rows(), g.cols(), rng);
        const ComplexMatrix diff = mse_matrix(net, p, g + delta) - best;
        worst = std::min(worst, Eigen::SelfAdjointEigenSolver<ComplexMatrix>(diff).eigenvalues().minCoeff());
    }
    CHECK(worst >= -1e-10);
}

TEST_CASE("mmse_matrix")
{
    const NetworkModel net = scalar_network();
    CHECK_THAT(mmse_matrix(net, {identity(1)})(0, 0).real(), WithinAbs(0.5, 1e-15));

    const NetworkModel wide = identity_network(2, 1.0);
    CHECK((mmse_matrix(wide, {ComplexMatrix::Zero(2, 2)}) - identity(2)).norm() < 1e-15);

    const NetworkModel rnd = seeded_network(29, 3, 2);
    Rng rng(30);
    const auto p = random_precoders(rnd, rng);
    const ComplexMatrix ref = mse_matrix(rnd, p, lmmse_equalizer(rnd, p));
    CHECK((mmse_matrix(rnd, p) - ref).norm() < 1e-9);
}

TEST_CASE("sum_rate")
{
    const NetworkModel net = scalar_network();
    CHECK_THAT(sum_rate(net, {identity(1)}), WithinAbs(1.0, 1e-14));

    const NetworkModel wide = identity_network(2, 1.0);
    CHECK_THAT(sum_rate(wide, {ComplexMatrix::Zero(2, 2)}), WithinAbs(0.0, 1e-14));

    // The designer's Theta eigenvalues give the rate of its own precoders.
    const NetworkModel rnd = seeded_network(31, 2, 3);
    const DesignResult res = design(rnd, Capacity{});
    double expected = 0.0;
    for (Index i = 0; i < res.theta_eigenvalues.size(); ++i)
        expected -= std::log2(1.0 - res.theta_eigenvalues(i));
    CHECK_THAT(sum_rate(rnd, res.transceiver.precoders), WithinAbs(expected, 1e-9));
}

TEST_CASE("weighted_mse")
{
    CHECK_THAT(weighted_mse(identity(4), identity(4)), WithinAbs(4.0, 1e-15));

    RealVector w(4);
    w << 0.3, 0.3, 0.26, 0.26;
    const ComplexMatrix wm = w.cast<Complex>().asDiagonal();
    CHECK_THAT(weighted_mse(wm, identity(4)), WithinAbs(1.12, 1e-15));

    Rng rng(32);
    const ComplexMatrix a = oracle::gaussian(4, 4, rng);
    const ComplexMatrix b = oracle::gaussian(4, 4, rng);
    const ComplexMatrix wr = oracle::mul(a, oracle::herm(a));
    const ComplexMatrix phi = oracle::mul(b, oracle::herm(b));
    Complex direct = 0.0;
    for (Index i = 0; i < 4; ++i)
        for (Index j = 0; j < 4; ++j)
            direct += wr(i, j) * phi(j, i);
    CHECK_THAT(weighted_mse(wr, phi), WithinAbs(direct.real(), 1e-12 * std::abs(direct)));
}

TEST_CASE("network validation")
{
    NetworkModel net = identity_network(2, 1.0);
    CHECK_NOTHROW(validate(net));

    NetworkModel zero_power = net;
    zero_power.hops[0].power_budget = 0.0;
    CHECK_THROWS_AS(validate(zero_power), ValidationError);

    NetworkModel too_many = net;
    too_many.n_streams = 3;
    CHECK_THROWS_AS(validate(too_many), ValidationError);

    NetworkModel bad_cov = net;
    bad_cov.hops[0].sigma(0, 0) = -1.0;
    CHECK_THROWS_AS(validate(bad_cov), ValidationError);

    CHECK_THROWS_AS(signal_covariances(net, {identity(3)}), ValidationError);
}
