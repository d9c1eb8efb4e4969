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

// The four design criteria. Each is a matrix-increasing function f(Phi) of the
// error covariance; once the output rotation is optimal it collapses to a
// decreasing, Schur-concave scalar function g(gamma) of the per-stream
// products gamma_i, which is what the power allocation minimizes.
//
// SINR- and BER-type criteria can be written as increasing Schur-convex or
// Schur-concave functions of diag(Phi) as well; they are not provided as
// separate objectives.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "system_model.hpp"

namespace relayopt {

struct WeightedMse {
    ComplexMatrix w; // Hermitian PSD, N x N
};

struct Capacity {};

struct MaxMse {};

struct WeightedSumRate {
    std::vector<double> v; // positive, non-increasing
};

using Objective = std::variant<WeightedMse, Capacity, MaxMse, WeightedSumRate>;

inline constexpr double kGammaCeiling = 1.0 - 1e-12;
inline constexpr double kSortSlack = 1e-12;

inline std::string_view objective_name(const Objective& obj)
{
    return std::visit(
        [](const auto& o) -> std::string_view {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, WeightedMse>)
                return "weighted_mse";
            else if constexpr (std::is_same_v<T, Capacity>)
                return "capacity";
            else if constexpr (std::is_same_v<T, MaxMse>)
                return "max_mse";
            else
                return "weighted_sum_rate";
        },
        obj);
}

inline void validate(const Objective& obj, Index n)
{
    if (const auto* o = std::get_if<WeightedMse>(&obj)) {
        require_shape(o->w, n, n, "weighting matrix");
        require_hermitian(o->w, "weighting matrix");
        const double lo = ordered_eig_hermitian(o->w).eigenvalues.minCoeff();
        if (lo < -kPsdClip * std::max(1.0, detail::max_abs(o->w)))
            throw ValidationError("weighting matrix is not PSD");
    } else if (const auto* o = std::get_if<WeightedSumRate>(&obj)) {
        if (static_cast<Index>(o->v.size()) != n)
            throw ValidationError("rate weights: expected one weight per stream");
        for (std::size_t i = 0; i < o->v.size(); ++i) {
            if (!(o->v[i] > 0.0) || !std::isfinite(o->v[i]))
                throw ValidationError("rate weights must be positive");
            if (i > 0 && o->v[i] > o->v[i - 1])
                throw ValidationError("rate weights must be sorted non-increasing");
        }
    }
}

/// Per-stream weights paired with the i-th largest gamma: eigenvalues of W
/// (descending) for weighted MSE, v for weighted sum-rate, ones otherwise.
inline RealVector stream_weights(const Objective& obj, Index n)
{
    if (const auto* o = std::get_if<WeightedMse>(&obj))
        return ordered_eig_hermitian(o->w).eigenvalues.cwiseMax(0.0);
    if (const auto* o = std::get_if<WeightedSumRate>(&obj))
        return Eigen::Map<const RealVector>(o->v.data(), static_cast<Index>(o->v.size()));
    return RealVector::Ones(n);
}

/// Output rotation U_Omega that makes Q_0^H Theta Q_0 = U_Omega diag(lambda) U_Omega^H optimal.
inline ComplexMatrix rotation_matrix(const Objective& obj, Index n)
{
    validate(obj, n);
    if (const auto* o = std::get_if<WeightedMse>(&obj))
        return ordered_eig_hermitian(o->w).u;
    if (std::holds_alternative<MaxMse>(obj))
        return dft_matrix(n);
    // Capacity is rotation invariant (identity chosen); weighted sum-rate needs identity.
    return identity(n);
}

/// g(gamma) for gamma sorted non-increasing. Rates are in bits.
inline double scalar_objective(const Objective& obj, std::span<const double> gamma)
{
    const auto n = static_cast<Index>(gamma.size());
    if (n < 1)
        throw ValidationError("scalar_objective: empty gamma");
    validate(obj, n);
    for (std::size_t i = 0; i < gamma.size(); ++i) {
        if (!std::isfinite(gamma[i]) || gamma[i] < 0.0 || gamma[i] > 1.0)
            throw DomainError("scalar_objective: gamma entries must lie in [0, 1]");
        if (i > 0 && gamma[i] > gamma[i - 1] + kSortSlack)
            throw ValidationError("scalar_objective: gamma must be sorted non-increasing");
    }
    const bool log_based = std::holds_alternative<Capacity>(obj) || std::holds_alternative<WeightedSumRate>(obj);
    if (log_based) {
        for (double g : gamma)
            if (g > kGammaCeiling)
                throw DomainError("scalar_objective: gamma too close to 1 for a log objective");
    }
    const RealVector w = stream_weights(obj, n);
    if (w.size() != n)
        throw ValidationError("scalar_objective: weight count does not match gamma");

    double acc = 0.0;
    if (std::holds_alternative<MaxMse>(obj)) {
        for (double g : gamma)
            acc += g;
        return 1.0 - acc / static_cast<double>(n);
    }
    for (Index i = 0; i < n; ++i) {
        if (log_based)
            acc += w(i) * std::log2(1.0 - gamma[i]);
        else
            acc += w(i) * (1.0 - gamma[i]);
    }
    return acc;
}

/// f(Phi) evaluated on a full error covariance matrix.
inline double matrix_objective(const Objective& obj, const ComplexMatrix& phi)
{
    require_hermitian(phi, "matrix_objective");
    const Index n = phi.rows();
    if (const auto* o = std::get_if<WeightedMse>(&obj))
        return weighted_mse(o->w, phi);
    if (std::holds_alternative<Capacity>(obj)) {
        const RealVector ev = ordered_eig_hermitian(phi).eigenvalues;
        if (!(ev.minCoeff() > 0.0))
            throw DomainError("matrix_objective: singular error covariance");
        double acc = 0.0;
        for (Index i = 0; i < n; ++i)
            acc += std::log2(ev(i));
        return acc;
    }
    RealVector d = phi.diagonal().real();
    if (std::holds_alternative<MaxMse>(obj))
        return d.maxCoeff();
    // Largest weight pairs with the smallest diagonal entry.
    const auto& v = std::get<WeightedSumRate>(obj).v;
    std::sort(d.data(), d.data() + n);
    double acc = 0.0;
    for (Index i = 0; i < n; ++i) {
        if (!(d(i) > 0.0))
            throw DomainError("matrix_objective: non-positive diagonal error");
        acc += v[static_cast<std::size_t>(i)] * std::log2(d(i));
    }
    return acc;
}

} // namespace relayopt
