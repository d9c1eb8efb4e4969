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

#pragma once

// Test-only reference computations. Written from the model definitions with
// plain loops and brute force, sharing no code paths with the library beyond
// the data types and the random stream.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "relayopt/objectives.hpp"
#include "relayopt/random.hpp"
#include "relayopt/system_model.hpp"

namespace oracle {

using relayopt::Complex;
using relayopt::ComplexMatrix;
using relayopt::Index;
using relayopt::RealMatrix;
using relayopt::RealVector;

inline ComplexMatrix gaussian(Index m, Index n, relayopt::Rng& rng)
{
    ComplexMatrix a(m, n);
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < n; ++j)
            a(i, j) = rng.complex_normal();
    return a;
}

/// Naive triple-loop product.
inline ComplexMatrix mul(const ComplexMatrix& a, const ComplexMatrix& b)
{
    ComplexMatrix c = ComplexMatrix::Zero(a.rows(), b.cols());
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < b.cols(); ++j)
            for (Index l = 0; l < a.cols(); ++l)
                c(i, j) += a(i, l) * b(l, j);
    return c;
}

inline ComplexMatrix herm(const ComplexMatrix& a)
{
    ComplexMatrix c(a.cols(), a.rows());
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j)
            c(j, i) = std::conj(a(i, j));
    return c;
}

inline Complex trace(const ComplexMatrix& a)
{
    Complex t = 0.0;
    for (Index i = 0; i < a.rows(); ++i)
        t += a(i, i);
    return t;
}

/// Step-by-step covariance recursion.
inline std::vector<ComplexMatrix> covariances(const relayopt::NetworkModel& net,
                                              const std::vector<ComplexMatrix>& p)
{
    std::vector<ComplexMatrix> out;
    ComplexMatrix r = ComplexMatrix::Identity(net.n_streams, net.n_streams);
    for (std::size_t k = 0; k < net.hops.size(); ++k) {
        const auto& hop = net.hops[k];
        const ComplexMatrix tx = mul(mul(p[k], r), herm(p[k]));
        const double err = trace(mul(tx, hop.psi)).real();
        ComplexMatrix next = mul(mul(hop.h_bar, tx), herm(hop.h_bar));
        for (Index i = 0; i < next.rows(); ++i) {
            for (Index j = 0; j < next.cols(); ++j)
                next(i, j) += err * hop.sigma(i, j);
            next(i, i) += hop.noise_var;
        }
        out.push_back(next);
        r = next;
    }
    return out;
}

inline ComplexMatrix end_to_end(const relayopt::NetworkModel& net, const std::vector<ComplexMatrix>& p)
{
    ComplexMatrix t = ComplexMatrix::Identity(net.n_streams, net.n_streams);
    for (std::size_t k = 0; k < net.hops.size(); ++k)
        t = mul(mul(net.hops[k].h_bar, p[k]), t);
    return t;
}

/// E[(G y - s)(G y - s)^H] = G R_y G^H - G H - H^H G^H + I.
inline ComplexMatrix mse(const relayopt::NetworkModel& net, const std::vector<ComplexMatrix>& p,
                         const ComplexMatrix& g)
{
    const ComplexMatrix ry = covariances(net, p).back();
    const ComplexMatrix gh = mul(g, end_to_end(net, p));
    ComplexMatrix phi = mul(mul(g, ry), herm(g)) - gh - herm(gh);
    for (Index i = 0; i < phi.rows(); ++i)
        phi(i, i) += 1.0;
    return (phi + herm(phi)) * 0.5;
}

/// I - H^H R_y^{-1} H via a full-pivot LU solve.
inline ComplexMatrix mmse(const relayopt::NetworkModel& net, const std::vector<ComplexMatrix>& p)
{
    const ComplexMatrix ry = covariances(net, p).back();
    const ComplexMatrix h = end_to_end(net, p);
    ComplexMatrix phi = -mul(herm(h), ComplexMatrix(ry.fullPivLu().solve(h)));
    for (Index i = 0; i < phi.rows(); ++i)
        phi(i, i) += 1.0;
    return (phi + herm(phi)) * 0.5;
}

/// Objective value of an error covariance, from the objective definitions.
inline double objective(const relayopt::Objective& obj, const ComplexMatrix& phi)
{
    if (const auto* o = std::get_if<relayopt::WeightedMse>(&obj))
        return trace(mul(o->w, phi)).real();
    if (std::holds_alternative<relayopt::Capacity>(obj)) {
        const RealVector ev = Eigen::SelfAdjointEigenSolver<ComplexMatrix>(phi).eigenvalues();
        double acc = 0.0;
        for (Index i = 0; i < ev.size(); ++i)
            acc += std::log2(ev(i));
        return acc;
    }
    std::vector<double> d;
    for (Index i = 0; i < phi.rows(); ++i)
        d.push_back(phi(i, i).real());
    std::sort(d.begin(), d.end());
    if (std::holds_alternative<relayopt::MaxMse>(obj))
        return d.back();
    const auto& v = std::get<relayopt::WeightedSumRate>(obj).v;
    double acc = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i)
        acc += v[i] * std::log2(d[i]);
    return acc;
}

/// Error covariance without estimation errors, from the explicit signal and
/// per-hop noise paths: y = T s + sum_k C_k n_k.
inline ComplexMatrix perfect_csi_mse(const relayopt::NetworkModel& net, const std::vector<ComplexMatrix>& p,
                                     const ComplexMatrix& g)
{
    const auto hops = net.hops.size();
    ComplexMatrix t = ComplexMatrix::Identity(net.n_streams, net.n_streams);
    for (std::size_t k = 0; k < hops; ++k)
        t = mul(mul(net.hops[k].h_bar, p[k]), t);
    ComplexMatrix e = mul(g, t) - ComplexMatrix::Identity(net.n_streams, net.n_streams);
    ComplexMatrix phi = mul(e, herm(e));
    for (std::size_t k = 0; k < hops; ++k) {
        // Noise of hop k passes through hops k+1..K.
        ComplexMatrix c = ComplexMatrix::Identity(net.hops[k].rx_dim(), net.hops[k].rx_dim());
        for (std::size_t l = k + 1; l < hops; ++l)
            c = mul(mul(net.hops[l].h_bar, p[l]), c);
        const ComplexMatrix gc = mul(g, c);
        phi += net.hops[k].noise_var * mul(gc, herm(gc));
    }
    return phi;
}

/// Empirical E[(G y - s)(G y - s)^H] with fresh data, noise and channel errors per draw.
inline ComplexMatrix monte_carlo_mse(const relayopt::NetworkModel& net, const std::vector<ComplexMatrix>& p,
                                     const ComplexMatrix& g, int draws, std::uint64_t seed)
{
    relayopt::Rng rng(seed);
    const Index n = net.n_streams;
    ComplexMatrix acc = ComplexMatrix::Zero(n, n);
    std::vector<ComplexMatrix> sig_root, psi_root;
    for (const auto& hop : net.hops) {
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es_s(hop.sigma), es_p(hop.psi);
        sig_root.push_back(es_s.operatorSqrt());
        psi_root.push_back(es_p.operatorSqrt());
    }
    for (int d = 0; d < draws; ++d) {
        const ComplexMatrix s = gaussian(n, 1, rng);
        ComplexMatrix x = s;
        for (std::size_t k = 0; k < net.hops.size(); ++k) {
            const auto& hop = net.hops[k];
            const ComplexMatrix h =
                hop.h_bar + sig_root[k] * gaussian(hop.rx_dim(), hop.tx_dim(), rng) * psi_root[k];
            x = h * (p[k] * x) + std::sqrt(hop.noise_var) * gaussian(hop.rx_dim(), 1, rng);
        }
        const ComplexMatrix e = g * x - s;
        acc += e * e.adjoint();
    }
    return acc / static_cast<double>(draws);
}

/// Haar unitary via Gram-Schmidt on a Gaussian matrix.
inline ComplexMatrix unitary(Index n, relayopt::Rng& rng)
{
    ComplexMatrix q = gaussian(n, n, rng);
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < j; ++i) {
            const Complex proj = q.col(i).dot(q.col(j));
            q.col(j) -= proj * q.col(i);
        }
        q.col(j) /= q.col(j).norm();
    }
    return q;
}

/// x weakly majorized by y: every partial sum of sorted x is at most that of y (+ slack).
inline bool weakly_majorized(std::vector<double> x, std::vector<double> y, double slack)
{
    std::sort(x.begin(), x.end(), std::greater<>());
    std::sort(y.begin(), y.end(), std::greater<>());
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        if (sx > sy + slack)
            return false;
    }
    return true;
}

/// Product of snr/(snr+1) over hops for each stream.
inline std::vector<double> gamma_products(const RealMatrix& gains, const RealMatrix& f_sq)
{
    std::vector<double> g(static_cast<std::size_t>(gains.cols()), 1.0);
    for (Index i = 0; i < gains.cols(); ++i) {
        for (Index k = 0; k < gains.rows(); ++k) {
            const double x = f_sq(k, i) * gains(k, i) * gains(k, i);
            g[static_cast<std::size_t>(i)] *= x / (1.0 + x);
        }
    }
    return g;
}

enum class Scalar { Mse, Log };

/// Stream-paired objective: sum w_i (1 - gamma_i) or sum w_i log2(1 - gamma_i).
inline double scalar_value(Scalar kind, const std::vector<double>& w, const std::vector<double>& gamma)
{
    double acc = 0.0;
    for (std::size_t i = 0; i < gamma.size(); ++i)
        acc += kind == Scalar::Mse ? w[i] * (1.0 - gamma[i]) : w[i] * std::log2(1.0 - gamma[i]);
    return acc;
}

/// Exhaustive grid over power splits between two streams; hops = 1 or 2.
/// Returns the minimum and the minimizing allocation.
inline double grid_two_streams(Scalar kind, const std::vector<double>& w, const RealMatrix& gains,
                               const std::vector<double>& budgets, int points, RealMatrix* best_alloc = nullptr)
{
    const Index hops = gains.rows();
    RealMatrix f(hops, 2);
    double best = std::numeric_limits<double>::infinity();
    const int outer = hops == 2 ? points : 1;
    for (int a = 0; a < outer; ++a) {
        if (hops == 2) {
            const double t = static_cast<double>(a) / (points - 1);
            f(1, 0) = budgets[1] * t;
            f(1, 1) = budgets[1] * (1.0 - t);
        }
        for (int b = 0; b < points; ++b) {
            const double t = static_cast<double>(b) / (points - 1);
            f(0, 0) = budgets[0] * t;
            f(0, 1) = budgets[0] * (1.0 - t);
            const double v = scalar_value(kind, w, gamma_products(gains, f));
            if (v < best) {
                best = v;
                if (best_alloc)
                    *best_alloc = f;
            }
        }
    }
    return best;
}

} // namespace oracle
