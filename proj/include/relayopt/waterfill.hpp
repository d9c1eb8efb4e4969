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

// Iterative (cyclic, per-hop) water-filling for the scalar allocation problem
//
//   min_f  g(gamma),   gamma_i = prod_k x_ki / (x_ki + 1),  x_ki = f_ki^2 h_ki^2,
//   s.t.   sum_i f_ki^2 = P_k  for every hop k.
//
// With the other hops fixed, each per-hop subproblem is convex in f_k^2 and is
// solved exactly: the KKT conditions give every f_ki^2 as a function of one
// multiplier mu_k, which is located by bisection on the power constraint.
// Exact block minimization makes the objective non-increasing sweep by sweep.

#include <algorithm>
#include <cmath>
#include <span>
#include <sstream>
#include <variant>
#include <vector>

#include "objectives.hpp"

namespace relayopt {

struct SolverOptions {
    double tol = 1e-8;
    int max_iter = 200;
};

struct Allocation {
    RealMatrix f_sq;                     // K x N, f_ki^2
    RealVector multipliers;              // mu_k
    std::vector<double> objective_trace; // initial point, then one entry per sweep
    int sweeps = 0;
    bool converged = false;
};

namespace detail {

enum class AllocationFamily {
    Mse, // g = sum_i w_i (1 - gamma_i)
    Log, // g = sum_i v_i log2(1 - gamma_i)
};

/// prod_{l != k} x_li / (x_li + 1) for every stream i.
inline RealVector coupling(const RealMatrix& gains, const RealMatrix& f_sq, Index k)
{
    RealVector b = RealVector::Ones(gains.cols());
    for (Index l = 0; l < gains.rows(); ++l) {
        if (l == k)
            continue;
        for (Index i = 0; i < gains.cols(); ++i) {
            const double x = f_sq(l, i) * gains(l, i) * gains(l, i);
            b(i) *= x / (x + 1.0);
        }
    }
    return b;
}

/// Optimal f^2 of one stream for a given multiplier.
inline double stream_power(AllocationFamily family, double mu, double h, double weight, double b)
{
    if (h <= 0.0 || weight <= 0.0 || b <= 0.0)
        return 0.0;
    const double h2 = h * h;
    if (family == AllocationFamily::Mse)
        return std::max(std::sqrt(weight * b / mu) / h - 1.0 / h2, 0.0);
    // Positive root of (1-b) y^2 + b y - b c = 0 with y = x + 1 and c = weight h^2 / mu,
    // written in the conjugate form so b -> 1 (single hop) and b -> 0 stay exact.
    const double c = weight * h2 / mu;
    const double y = 2.0 * b * c / (b + std::sqrt(b * b + 4.0 * (1.0 - b) * b * c));
    return std::max((y - 1.0) / h2, 0.0);
}

struct HopSolution {
    RealVector f_sq;
    double mu;
};

inline HopSolution solve_hop(AllocationFamily family, const RealVector& h, const RealVector& weight,
                             const RealVector& b, double budget, Index k)
{
    const Index n = h.size();
    // Above mu_max every stream is switched off.
    double mu_max = 0.0;
    for (Index i = 0; i < n; ++i)
        if (h(i) > 0.0 && weight(i) > 0.0 && b(i) > 0.0)
            mu_max = std::max(mu_max, weight(i) * b(i) * h(i) * h(i));
    if (!(mu_max > 0.0)) {
        std::ostringstream os;
        os << "water-filling: hop " << (k + 1) << " has no stream with positive effective gain";
        throw DegenerateChannelError(os.str());
    }

    auto power = [&](double mu) {
        double acc = 0.0;
        for (Index i = 0; i < n; ++i)
            acc += stream_power(family, mu, h(i), weight(i), b(i));
        return acc;
    };

    double hi = mu_max;
    double lo = mu_max;
    for (int guard = 0; power(lo) < budget; ++guard) {
        if (guard > 4000)
            throw NumericalError("water-filling: failed to bracket the multiplier");
        hi = lo;
        lo *= 0.25;
    }
    for (int it = 0; it < 400 && hi / lo - 1.0 > 1e-15; ++it) {
        const double mid = std::sqrt(lo * hi);
        if (power(mid) >= budget)
            lo = mid;
        else
            hi = mid;
    }

    HopSolution out{RealVector(n), lo};
    for (Index i = 0; i < n; ++i)
        out.f_sq(i) = stream_power(family, lo, h(i), weight(i), b(i));
    // Remove the residual bracket error so the constraint holds to rounding.
    const double total = out.f_sq.sum();
    if (total > 0.0)
        out.f_sq *= budget / total;
    return out;
}

inline double allocation_objective(AllocationFamily family, const RealMatrix& gains, const RealMatrix& f_sq,
                                   const RealVector& weight)
{
    double acc = 0.0;
    for (Index i = 0; i < gains.cols(); ++i) {
        double gamma = 1.0;
        for (Index k = 0; k < gains.rows(); ++k) {
            const double x = f_sq(k, i) * gains(k, i) * gains(k, i);
            gamma *= x / (x + 1.0);
        }
        acc += family == AllocationFamily::Mse ? weight(i) * (1.0 - gamma) : weight(i) * std::log2(1.0 - gamma);
    }
    return acc;
}

inline void check_problem(const RealMatrix& gains, std::span<const double> budgets, const RealVector& weight)
{
    if (gains.rows() < 1 || gains.cols() < 1)
        throw ValidationError("water-filling: gain matrix must be non-empty");
    if (!gains.allFinite() || gains.minCoeff() < 0.0)
        throw ValidationError("water-filling: gains must be finite and non-negative");
    if (static_cast<Index>(budgets.size()) != gains.rows())
        throw ValidationError("water-filling: expected one power budget per hop");
    for (double p : budgets)
        if (!(p > 0.0) || !std::isfinite(p))
            throw ValidationError("water-filling: power budgets must be positive");
    if (weight.size() != gains.cols())
        throw ValidationError("water-filling: expected one weight per stream");
    if (!weight.allFinite() || weight.minCoeff() < 0.0 || !(weight.maxCoeff() > 0.0))
        throw ValidationError("water-filling: weights must be non-negative and not all zero");
    for (Index k = 0; k < gains.rows(); ++k) {
        if (!(gains.row(k).maxCoeff() > 0.0)) {
            std::ostringstream os;
            os << "water-filling: every gain of hop " << (k + 1) << " is zero";
            throw DegenerateChannelError(os.str());
        }
    }
}

inline Allocation run_waterfill(AllocationFamily family, const RealMatrix& gains, const RealVector& weight,
                                std::span<const double> budgets, const SolverOptions& options)
{
    check_problem(gains, budgets, weight);
    if (options.max_iter < 1 || !(options.tol > 0.0))
        throw ValidationError("water-filling: max_iter must be >= 1 and tol > 0");

    const Index hops = gains.rows();
    const Index n = gains.cols();
    Allocation out;
    out.f_sq.resize(hops, n);
    out.multipliers = RealVector::Zero(hops);
    for (Index k = 0; k < hops; ++k)
        out.f_sq.row(k).setConstant(budgets[static_cast<std::size_t>(k)] / static_cast<double>(n));

    double prev = allocation_objective(family, gains, out.f_sq, weight);
    out.objective_trace.push_back(prev);
    for (int sweep = 1; sweep <= options.max_iter; ++sweep) {
        for (Index k = 0; k < hops; ++k) {
            const RealVector b = coupling(gains, out.f_sq, k);
            const HopSolution sol =
                solve_hop(family, gains.row(k).transpose(), weight, b, budgets[static_cast<std::size_t>(k)], k);
            out.f_sq.row(k) = sol.f_sq.transpose();
            out.multipliers(k) = sol.mu;
        }
        const double obj = allocation_objective(family, gains, out.f_sq, weight);
        out.objective_trace.push_back(obj);
        out.sweeps = sweep;
        if (std::abs(prev - obj) <= options.tol * std::max(std::abs(prev), 1e-300)) {
            out.converged = true;
            break;
        }
        prev = obj;
    }
    return out;
}

} // namespace detail

inline Allocation waterfill_weighted_mse(const RealMatrix& gains, std::span<const double> w,
                                         std::span<const double> budgets, const SolverOptions& options = {})
{
    const RealVector weight = Eigen::Map<const RealVector>(w.data(), static_cast<Index>(w.size()));
    return detail::run_waterfill(detail::AllocationFamily::Mse, gains, weight, budgets, options);
}

inline Allocation waterfill_capacity(const RealMatrix& gains, std::span<const double> budgets,
                                     const SolverOptions& options = {})
{
    return detail::run_waterfill(detail::AllocationFamily::Log, gains, RealVector::Ones(gains.cols()), budgets,
                                 options);
}

/// MAX-MSE reduces to unit-weight MSE; the trace is reported as 1 - mean(gamma).
inline Allocation waterfill_maxmse(const RealMatrix& gains, std::span<const double> budgets,
                                   const SolverOptions& options = {})
{
    const std::vector<double> ones(static_cast<std::size_t>(gains.cols()), 1.0);
    Allocation out = waterfill_weighted_mse(gains, ones, budgets, options);
    for (double& v : out.objective_trace)
        v /= static_cast<double>(gains.cols());
    return out;
}

/// Capacity update with the multiplier divided by v_i on stream i.
inline Allocation waterfill_weighted_sumrate(const RealMatrix& gains, std::span<const double> v,
                                             std::span<const double> budgets, const SolverOptions& options = {})
{
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!(v[i] > 0.0))
            throw ValidationError("water-filling: rate weights must be positive");
        if (i > 0 && v[i] > v[i - 1])
            throw ValidationError("water-filling: rate weights must be sorted non-increasing");
    }
    const RealVector weight = Eigen::Map<const RealVector>(v.data(), static_cast<Index>(v.size()));
    return detail::run_waterfill(detail::AllocationFamily::Log, gains, weight, budgets, options);
}

inline Allocation waterfill(const Objective& obj, const RealMatrix& gains, std::span<const double> budgets,
                            const SolverOptions& options = {})
{
    if (std::holds_alternative<Capacity>(obj))
        return waterfill_capacity(gains, budgets, options);
    if (std::holds_alternative<MaxMse>(obj))
        return waterfill_maxmse(gains, budgets, options);
    if (const auto* o = std::get_if<WeightedSumRate>(&obj))
        return waterfill_weighted_sumrate(gains, o->v, budgets, options);
    const RealVector w = stream_weights(obj, gains.cols());
    return waterfill_weighted_mse(gains, std::span<const double>(w.data(), static_cast<std::size_t>(w.size())),
                                  budgets, options);
}

/// gamma_i = prod_k x_ki / (x_ki + 1) in stream order.
inline RealVector stream_gamma(const RealMatrix& gains, const RealMatrix& f_sq)
{
    RealVector gamma = RealVector::Ones(gains.cols());
    for (Index k = 0; k < gains.rows(); ++k) {
        for (Index i = 0; i < gains.cols(); ++i) {
            const double x = f_sq(k, i) * gains(k, i) * gains(k, i);
            gamma(i) *= x / (x + 1.0);
        }
    }
    return gamma;
}

} // namespace relayopt
