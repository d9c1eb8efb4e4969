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

// Self-check suites run by `relayopt verify`. Each suite reports its worst
// residual against a fixed limit. Instances are seeded, so a failure is
// reproducible from the suite name alone.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "designer.hpp"
#include "objectives.hpp"
#include "system_model.hpp"
#include "waterfill.hpp"

namespace relayopt {

enum class VerifyLevel { Fast, Full };

/// Deliberate faults for negative-control runs.
enum class VerifyFault { None, CorruptQ };

struct SuiteResult {
    std::string name;
    bool passed = false;
    double worst = 0.0; // worst residual seen
    double limit = 0.0;
    int cases = 0;
    std::string note;
};

/// Random hop chain with Sigma or Psi proportional to I on every hop.
/// Antenna counts vary between N and N + extra per node.
inline NetworkModel random_network(Rng& rng, int k_hops, Index n_streams, Index extra = 2)
{
    NetworkModel net;
    net.n_streams = n_streams;
    auto dim = [&] { return n_streams + static_cast<Index>(rng.next_u64() % static_cast<std::uint64_t>(extra + 1)); };
    auto exp_cov = [](Index d, double rho, double scale) {
        ComplexMatrix c(d, d);
        for (Index i = 0; i < d; ++i)
            for (Index j = 0; j < d; ++j)
                c(i, j) = scale * std::pow(rho, static_cast<double>(std::abs(i - j)));
        return c;
    };
    for (int k = 0; k < k_hops; ++k) {
        HopModel hop;
        const Index rx = dim();
        const Index tx = dim();
        hop.h_bar.resize(rx, tx);
        for (Index i = 0; i < rx; ++i)
            for (Index j = 0; j < tx; ++j)
                hop.h_bar(i, j) = rng.complex_normal();
        const double se = 0.001 + 0.05 * rng.uniform();
        const double rho = 0.9 * rng.uniform();
        switch (rng.next_u64() % 3) {
        case 0:
            hop.sigma = (0.5 + rng.uniform()) * identity(rx);
            hop.psi = exp_cov(tx, rho, se);
            break;
        case 1:
            hop.sigma = exp_cov(rx, rho, 1.0);
            hop.psi = se * identity(tx);
            break;
        default:
            hop.sigma = ComplexMatrix::Zero(rx, rx);
            hop.psi = ComplexMatrix::Zero(tx, tx);
            break;
        }
        hop.noise_var = 0.5 + rng.uniform();
        hop.power_budget = std::pow(10.0, 3.0 * rng.uniform());
        net.hops.push_back(std::move(hop));
    }
    return net;
}

/// Random objective of the given kind (0..3) for n streams.
inline Objective random_objective(Rng& rng, int kind, Index n)
{
    switch (kind % 4) {
    case 0: {
        ComplexMatrix b(n, n);
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < n; ++j)
                b(i, j) = rng.complex_normal();
        return WeightedMse{hermitian_part(b * b.adjoint())};
    }
    case 1:
        return Capacity{};
    case 2:
        return MaxMse{};
    default: {
        std::vector<double> v(static_cast<std::size_t>(n));
        for (double& x : v)
            x = 0.2 + rng.uniform();
        std::sort(v.begin(), v.end(), std::greater<>());
        return WeightedSumRate{v};
    }
    }
}

/// Sum of the j largest entries of x for j = 1..n.
inline RealVector partial_sums(RealVector x)
{
    std::sort(x.data(), x.data() + x.size(), std::greater<>());
    for (Index i = 1; i < x.size(); ++i)
        x(i) += x(i - 1);
    return x;
}

namespace detail {

struct SuiteRunner {
    SuiteResult result;

    SuiteRunner(std::string name, double limit)
    {
        result.name = std::move(name);
        result.limit = limit;
        result.passed = true;
    }

    void record(double residual) { record(residual, result.limit); }

    void record(double residual, double limit)
    {
        ++result.cases;
        if (!std::isfinite(residual) || residual > limit)
            result.passed = false;
        if (std::isfinite(residual))
            result.worst = std::max(result.worst, residual);
        else
            result.worst = std::numeric_limits<double>::infinity();
    }

    SuiteResult run(const std::function<void(SuiteRunner&)>& body)
    {
        try {
            body(*this);
        } catch (const std::exception& e) {
            result.passed = false;
            result.note = e.what();
        }
        return result;
    }
};

struct DesignCase {
    NetworkModel net;
    Objective obj;
    DesignResult res;
};

inline std::vector<DesignCase> design_cases(std::uint64_t seed, int count, int min_hops)
{
    std::vector<DesignCase> out;
    for (int i = 0; i < count; ++i) {
        Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(i)}));
        const int hops = min_hops + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(4 - min_hops));
        const Index n = 1 + static_cast<Index>(rng.next_u64() % 3);
        DesignCase c{random_network(rng, hops, n), random_objective(rng, i, n), {}};
        c.res = design(c.net, c.obj);
        out.push_back(std::move(c));
    }
    return out;
}

/// Objective of the MMSE receiver for the given factors, evaluated end to end.
inline double end_to_end_objective(const NetworkModel& net, const Objective& obj,
                                   const std::vector<ComplexMatrix>& f, const std::vector<ComplexMatrix>& q)
{
    const Transceiver t = recover_precoders(net, f, q);
    return matrix_objective(obj, mmse_matrix(net, t.precoders));
}

} // namespace detail

inline SuiteResult suite_decompositions(int count)
{
    return detail::SuiteRunner("decompositions", 1e-9).run([&](detail::SuiteRunner& s) {
        Rng rng(11);
        for (int i = 0; i < count; ++i) {
            const Index m = 1 + static_cast<Index>(rng.next_u64() % 6);
            const Index n = 1 + static_cast<Index>(rng.next_u64() % 6);
            ComplexMatrix a(m, n);
            for (Index r = 0; r < m; ++r)
                for (Index c = 0; c < n; ++c)
                    a(r, c) = rng.complex_normal();
            s.record((reconstruct(ordered_svd(a)) - a).norm() / a.norm());
            const ComplexMatrix h = hermitian_part(a * a.adjoint());
            s.record((reconstruct(ordered_eig_hermitian(h)) - h).norm() / h.norm());
            const ComplexMatrix root = hermitian_sqrt(h);
            s.record((root * root - h).norm() / h.norm());
            ComplexMatrix pd = h;
            pd.diagonal().array() += 0.1;
            const ComplexMatrix t = hermitian_inv_sqrt(pd);
            s.record((t * pd * t - identity(m)).norm());
        }
    });
}

inline SuiteResult suite_lmmse_dominance(const std::vector<detail::DesignCase>& cases, int perturbations)
{
    return detail::SuiteRunner("lmmse_dominance", 1e-10).run([&](detail::SuiteRunner& s) {
        Rng rng(12);
        for (const auto& c : cases) {
            const auto& p = c.res.transceiver.precoders;
            const ComplexMatrix g = c.res.transceiver.equalizer;
            const ComplexMatrix phi = mse_matrix(c.net, p, g);
            for (int t = 0; t < perturbations; ++t) {
                ComplexMatrix d(g.rows(), g.cols());
                for (Index i = 0; i < d.rows(); ++i)
                    for (Index j = 0; j < d.cols(); ++j)
                        d(i, j) = rng.complex_normal();
                d *= std::pow(10.0, -4.0 + 4.0 * rng.uniform()) * std::max(1.0, g.norm()) / d.norm();
                const ComplexMatrix diff = hermitian_part(mse_matrix(c.net, p, g + d) - phi);
                s.record(std::max(0.0, -ordered_eig_hermitian(diff).eigenvalues.minCoeff()));
            }
        }
    });
}

inline SuiteResult suite_power_closure(const std::vector<detail::DesignCase>& cases)
{
    return detail::SuiteRunner("power_closure", 1e-6).run([&](detail::SuiteRunner& s) {
        for (const auto& c : cases) {
            const auto powers = transmit_powers(c.net, c.res.transceiver.precoders);
            for (std::size_t k = 0; k < powers.size(); ++k)
                s.record(std::abs(powers[k] - c.net.hops[k].power_budget) / c.net.hops[k].power_budget);
            for (Index k = 0; k < c.res.allocation.f_sq.rows(); ++k)
                s.record(std::abs(c.res.allocation.f_sq.row(k).sum() - c.net.hops[static_cast<std::size_t>(k)].power_budget) /
                         c.net.hops[static_cast<std::size_t>(k)].power_budget);
        }
    });
}

inline SuiteResult suite_gamma_identity(const std::vector<detail::DesignCase>& cases)
{
    return detail::SuiteRunner("gamma_identity", 1e-8).run([&](detail::SuiteRunner& s) {
        for (const auto& c : cases) {
            const auto& in = *c.res.transceiver.internals;
            std::vector<ComplexMatrix> a;
            for (std::size_t k = 0; k < in.f.size(); ++k)
                a.push_back(hop_factors(c.net.hops[k], in.f[k]).a);
            const RealVector lam = ordered_eig_hermitian(theta_matrix(a, in.q)).eigenvalues;
            RealVector gamma = c.res.gamma;
            std::sort(gamma.data(), gamma.data() + gamma.size(), std::greater<>());
            s.record((lam - gamma).cwiseAbs().maxCoeff());
        }
    });
}

/// Optimal interior rotations reproduce gamma exactly; random ones are weakly majorized by it.
inline SuiteResult suite_majorization(const std::vector<detail::DesignCase>& cases, int replacements,
                                      VerifyFault fault)
{
    return detail::SuiteRunner("majorization", 1e-8).run([&](detail::SuiteRunner& s) {
        Rng rng(13);
        for (const auto& c : cases) {
            if (c.net.num_hops() < 2)
                continue;
            const auto& in = *c.res.transceiver.internals;
            std::vector<ComplexMatrix> a;
            for (std::size_t k = 0; k < in.f.size(); ++k)
                a.push_back(hop_factors(c.net.hops[k], in.f[k]).a);
            std::vector<ComplexMatrix> q = in.q;
            if (fault == VerifyFault::CorruptQ)
                q[1] = random_unitary(q[1].rows(), rng);
            const RealVector best = partial_sums(c.res.gamma);
            const RealVector own = partial_sums(ordered_eig_hermitian(theta_matrix(a, q)).eigenvalues);
            s.record((own - best).cwiseAbs().maxCoeff());
            for (int t = 0; t < replacements; ++t) {
                std::vector<ComplexMatrix> qr = q;
                const auto k = 1 + static_cast<std::size_t>(rng.next_u64() % (qr.size() - 2));
                qr[k] = random_unitary(qr[k].rows(), rng);
                const RealVector sums = partial_sums(ordered_eig_hermitian(theta_matrix(a, qr)).eigenvalues);
                s.record(std::max(0.0, (sums - best).maxCoeff()), 1e-9);
            }
        }
    });
}

/// Random Q_0, or a random interior Q_k with Q_0 re-optimized, never beats the design.
inline SuiteResult suite_rotation_optimality(const std::vector<detail::DesignCase>& cases, int replacements)
{
    return detail::SuiteRunner("rotation_optimality", 1e-9).run([&](detail::SuiteRunner& s) {
        Rng rng(14);
        for (const auto& c : cases) {
            const auto& in = *c.res.transceiver.internals;
            const double best = c.res.objective_value;
            for (int t = 0; t < replacements; ++t) {
                std::vector<ComplexMatrix> q = in.q;
                q[0] = random_unitary(c.net.n_streams, rng);
                s.record(std::max(0.0, best - detail::end_to_end_objective(c.net, c.obj, in.f, q)));
                if (c.net.num_hops() < 2)
                    continue;
                q = in.q;
                const auto k = 1 + static_cast<std::size_t>(rng.next_u64() % (q.size() - 2));
                q[k] = random_unitary(q[k].rows(), rng);
                std::vector<ComplexMatrix> a;
                for (std::size_t h = 0; h < in.f.size(); ++h)
                    a.push_back(hop_factors(c.net.hops[h], in.f[h]).a);
                const OrderedEig eig = ordered_eig_hermitian(theta_matrix(a, q));
                q[0] = eig.u * rotation_matrix(c.obj, c.net.n_streams).adjoint();
                s.record(std::max(0.0, best - detail::end_to_end_objective(c.net, c.obj, in.f, q)));
            }
        }
    });
}

inline SuiteResult suite_convergence(int count)
{
    return detail::SuiteRunner("convergence", 1e-10).run([&](detail::SuiteRunner& s) {
        for (int i = 0; i < count; ++i) {
            Rng rng(derive_seed(15, {static_cast<std::uint64_t>(i)}));
            const Index hops = 1 + static_cast<Index>(rng.next_u64() % 4);
            const Index n = 1 + static_cast<Index>(rng.next_u64() % 4);
            RealMatrix gains(hops, n);
            std::vector<double> budgets;
            for (Index k = 0; k < hops; ++k) {
                RealVector g(n);
                for (Index j = 0; j < n; ++j)
                    g(j) = std::pow(10.0, 1.5 * (rng.uniform() - 0.5));
                std::sort(g.data(), g.data() + n, std::greater<>());
                gains.row(k) = g.transpose();
                budgets.push_back(std::pow(10.0, 3.0 * rng.uniform()));
            }
            const Allocation al = waterfill(random_objective(rng, i, n), gains, budgets);
            double rise = 0.0;
            for (std::size_t t = 1; t < al.objective_trace.size(); ++t)
                rise = std::max(rise, al.objective_trace[t] - al.objective_trace[t - 1]);
            s.record(al.converged ? rise : std::numeric_limits<double>::infinity());
        }
    });
}

/// Exhaustive grid over the power split of N = 2 streams (K = 1 or 2 hops).
inline double grid_search_two_streams(const Objective& obj, const RealMatrix& gains, std::span<const double> budgets,
                                      int points)
{
    const RealVector w = stream_weights(obj, 2);
    const bool log_based = std::holds_alternative<Capacity>(obj) || std::holds_alternative<WeightedSumRate>(obj);
    const double scale = std::holds_alternative<MaxMse>(obj) ? 0.5 : 1.0;
    auto value = [&](const RealMatrix& f_sq) {
        const RealVector gamma = stream_gamma(gains, f_sq);
        double acc = 0.0;
        for (Index i = 0; i < 2; ++i)
            acc += log_based ? w(i) * std::log2(1.0 - gamma(i)) : w(i) * (1.0 - gamma(i));
        return scale * acc;
    };
    const Index hops = gains.rows();
    RealMatrix f_sq(hops, 2);
    double best = std::numeric_limits<double>::infinity();
    const auto split = [&](Index k, int idx) {
        const double p = budgets[static_cast<std::size_t>(k)];
        const double t = static_cast<double>(idx) / static_cast<double>(points - 1);
        f_sq(k, 0) = p * t;
        f_sq(k, 1) = p * (1.0 - t);
    };
    const int outer = hops == 2 ? points : 1;
    for (int a = 0; a < outer; ++a) {
        if (hops == 2)
            split(1, a);
        for (int b = 0; b < points; ++b) {
            split(0, b);
            best = std::min(best, value(f_sq));
        }
    }
    return best;
}

inline SuiteResult suite_grid_oracles(int count)
{
    return detail::SuiteRunner("grid_oracles", 0.01).run([&](detail::SuiteRunner& s) {
        for (int i = 0; i < count; ++i) {
            Rng rng(derive_seed(16, {static_cast<std::uint64_t>(i)}));
            const Index hops = 1 + static_cast<Index>(i % 2);
            RealMatrix gains(hops, 2);
            std::vector<double> budgets;
            for (Index k = 0; k < hops; ++k) {
                const double a = 0.3 + 2.0 * rng.uniform();
                const double b = 0.3 + 2.0 * rng.uniform();
                gains(k, 0) = std::max(a, b);
                gains(k, 1) = std::min(a, b);
                budgets.push_back(0.5 + 5.0 * rng.uniform());
            }
            const Objective obj = random_objective(rng, i / 2, 2);
            const Allocation al = waterfill(obj, gains, budgets);
            const double oracle = grid_search_two_streams(obj, gains, budgets, hops == 1 ? 2000 : 200);
            s.record(std::abs(al.objective_trace.back() - oracle) / std::max(std::abs(oracle), 1e-12));
        }
    });
}

inline std::vector<SuiteResult> run_verification(VerifyLevel level, VerifyFault fault = VerifyFault::None)
{
    const bool full = level == VerifyLevel::Full;
    std::vector<SuiteResult> out;
    std::vector<detail::DesignCase> cases;
    std::vector<detail::DesignCase> multi;
    try {
        cases = detail::design_cases(101, full ? 50 : 12, 1);
        multi = detail::design_cases(202, full ? 50 : 12, 2);
    } catch (const std::exception& e) {
        SuiteResult r;
        r.name = "design_setup";
        r.note = e.what();
        out.push_back(r);
        return out;
    }
    out.push_back(suite_decompositions(full ? 200 : 40));
    out.push_back(suite_lmmse_dominance(cases, full ? 100 : 20));
    out.push_back(suite_power_closure(cases));
    out.push_back(suite_gamma_identity(cases));
    out.push_back(suite_majorization(multi, full ? 20 : 5, fault));
    out.push_back(suite_rotation_optimality(cases, full ? 20 : 5));
    out.push_back(suite_convergence(full ? 1000 : 100));
    if (full)
        out.push_back(suite_grid_oracles(16));
    return out;
}

} // namespace relayopt
