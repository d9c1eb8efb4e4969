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

// Robust joint design of the precoders P_1..P_K and the equalizer G.
//
// The precoders are re-parametrized as
//   F_1 = P_1 Q_0^H,
//   F_k = P_k K_{k-1}^{1/2} Pi_{k-1}^{1/2} Q_{k-1}^H,
//   K_k  = Tr(F_k F_k^H Psi_k) Sigma_k + noise_k I,
//   Pi_k = K_k^{-1/2} Hbar_k F_k F_k^H Hbar_k^H K_k^{-1/2} + I,
// which decouples the power constraints into Tr(F_k F_k^H) <= P_k. With
// A_k = Pi_k^{-1/2} K_k^{-1/2} Hbar_k F_k the MMSE matrix becomes
//   Phi = I - Q_0^H A_1^H Q_1^H ... A_K^H Q_K^H Q_K A_K ... Q_1 A_1 Q_0.
//
// When Sigma_k or Psi_k is a scaled identity, K_k / eta_k does not depend on
// F_k and every F_k is diagonalized by the SVD of a fixed whitened channel.
// The remaining unknowns are the per-stream powers f_ki^2, found by
// water-filling, after which Q_0..Q_K follow in closed form.

#include <cmath>
#include <sstream>
#include <vector>

#include "objectives.hpp"
#include "system_model.hpp"
#include "waterfill.hpp"

namespace relayopt {

inline constexpr double kProportionalTol = 1e-10;
inline constexpr double kClosureTol = 1e-6;
inline constexpr double kEtaTol = 1e-8;

enum class ErrorCovStructure {
    RowProportional,    // Sigma = alpha I: K_F / eta = I
    ColumnProportional, // Psi = beta I: closed form
    UpperBound,         // neither; bounded surrogate, not optimal
};

struct NormalizedErrorCov {
    ComplexMatrix matrix; // K_F / eta_f, M x M
    ErrorCovStructure structure = ErrorCovStructure::RowProportional;

    bool surrogate() const { return structure == ErrorCovStructure::UpperBound; }
};

namespace detail {

/// True when a = c I within tolerance; c is returned through `scale`.
inline bool is_scaled_identity(const ComplexMatrix& a, double& scale)
{
    const Index n = a.rows();
    scale = a.trace().real() / static_cast<double>(n);
    ComplexMatrix d = a;
    d.diagonal().array() -= scale;
    return max_abs(d) <= kProportionalTol * std::max(1.0, max_abs(a));
}

inline double mean_diagonal(const ComplexMatrix& a)
{
    return a.trace().real() / static_cast<double>(a.rows());
}

} // namespace detail

/// K_F / eta_f for a hop, which is independent of F under proportional error covariances.
inline NormalizedErrorCov normalized_error_cov(const HopModel& hop)
{
    const Index m = hop.rx_dim();
    double scale = 0.0;
    if (detail::is_scaled_identity(hop.sigma, scale))
        return {identity(m), ErrorCovStructure::RowProportional};

    const double alpha = detail::mean_diagonal(hop.sigma);
    const double p = hop.power_budget;
    const double s2 = hop.noise_var;
    double beta = 0.0;
    if (detail::is_scaled_identity(hop.psi, beta)) {
        ComplexMatrix out = beta * p * hop.sigma;
        out.diagonal().array() += s2;
        return {hermitian_part(out / (alpha * beta * p + s2)), ErrorCovStructure::ColumnProportional};
    }

    // Tr(F F^H Psi) <= P lambda_1(Psi) bounds K_F from above.
    const double lam = std::max(ordered_eig_hermitian(hop.psi).eigenvalues(0), 0.0);
    const double denom = p * lam * alpha + s2;
    ComplexMatrix out = (p * lam / denom) * hop.sigma;
    out.diagonal().array() += s2 / denom;
    return {hermitian_part(out), ErrorCovStructure::UpperBound};
}

struct EffectiveHop {
    NormalizedErrorCov norm_error_cov;
    ComplexMatrix calh;     // (K_F/eta)^{-1/2} Hbar (alpha P Psi + noise I)^{-1/2}
    OrderedSVD svd;         // of calh
    RealVector gains;       // first N singular values
    ComplexMatrix v_n;      // first N right singular vectors
    ComplexMatrix whitener; // (alpha P Psi + noise I)^{-1/2}
    double alpha = 0.0;     // Tr(Sigma) / M
};

inline EffectiveHop effective_channel(const HopModel& hop, Index n_streams)
{
    EffectiveHop out;
    out.alpha = detail::mean_diagonal(hop.sigma);
    ComplexMatrix w = out.alpha * hop.power_budget * hop.psi;
    w.diagonal().array() += hop.noise_var;
    out.whitener = hermitian_inv_sqrt(hermitian_part(w));
    out.norm_error_cov = normalized_error_cov(hop);
    out.calh = hermitian_inv_sqrt(out.norm_error_cov.matrix) * hop.h_bar * out.whitener;
    out.svd = ordered_svd(out.calh);
    if (out.svd.singular_values.size() < n_streams)
        throw ValidationError("effective_channel: fewer singular values than streams");
    out.gains = out.svd.singular_values.head(n_streams);
    out.v_n = out.svd.v.leftCols(n_streams);
    return out;
}

struct ForwardingFactor {
    ComplexMatrix f; // N_k x input_dim
    double xi = 0.0; // equals eta_f = Tr(F F^H Psi) alpha + noise
};

/// F = sqrt(xi) W^{-1/2} V_N diag(lambda_f) E^H with E = first N columns of
/// the identity (or of `right_unitary` when one is given).
inline ForwardingFactor assemble_F(const HopModel& hop, const EffectiveHop& eff, const RealVector& lambda_f,
                                   Index input_dim, const ComplexMatrix* right_unitary = nullptr)
{
    const Index n = eff.v_n.cols();
    if (lambda_f.size() != n || lambda_f.minCoeff() < 0.0)
        throw ValidationError("assemble_F: expected N non-negative stream amplitudes");
    if (input_dim < n)
        throw ValidationError("assemble_F: input dimension smaller than the stream count");

    const ComplexMatrix core = eff.whitener * eff.v_n;
    const ComplexMatrix d = core.adjoint() * hop.psi * core;
    double load = 0.0;
    for (Index i = 0; i < n; ++i)
        load += lambda_f(i) * lambda_f(i) * d(i, i).real();
    const double denom = 1.0 - eff.alpha * load;
    if (!(denom > 0.0))
        throw InfeasibleStructureError("assemble_F: non-positive normalization in the forwarding structure");

    ForwardingFactor out;
    out.xi = hop.noise_var / denom;
    const ComplexMatrix left = std::sqrt(out.xi) * core * lambda_f.cast<Complex>().asDiagonal();
    if (right_unitary) {
        require_shape(*right_unitary, input_dim, input_dim, "assemble_F: right unitary");
        out.f = left * right_unitary->leftCols(n).adjoint();
    } else {
        out.f = ComplexMatrix::Zero(hop.tx_dim(), input_dim);
        out.f.leftCols(n) = left;
    }

    const double power = out.f.squaredNorm();
    if (std::abs(power - hop.power_budget) > kClosureTol * hop.power_budget) {
        std::ostringstream os;
        os << "assemble_F: Tr(F F^H) = " << power << " but the budget is " << hop.power_budget;
        throw ConsistencyError(os.str());
    }
    const double eta = trace_product(out.f * out.f.adjoint(), hop.psi).real() * eff.alpha + hop.noise_var;
    if (std::abs(eta - out.xi) > kEtaTol * out.xi)
        throw ConsistencyError("assemble_F: eta_f does not match its closed form");
    return out;
}

/// Per-hop factors of the substitution: K^{-1/2}, Pi^{-1/2} and A.
struct HopFactors {
    ComplexMatrix k_inv_sqrt;
    ComplexMatrix pi_inv_sqrt;
    ComplexMatrix a; // M_k x input_dim
};

inline HopFactors hop_factors(const HopModel& hop, const ComplexMatrix& f)
{
    const double load = trace_product(f * f.adjoint(), hop.psi).real();
    ComplexMatrix k = load * hop.sigma;
    k.diagonal().array() += hop.noise_var;

    HopFactors out;
    out.k_inv_sqrt = hermitian_inv_sqrt(hermitian_part(k));
    const ComplexMatrix b = out.k_inv_sqrt * hop.h_bar * f;
    ComplexMatrix pi = b * b.adjoint();
    pi.diagonal().array() += 1.0;
    out.pi_inv_sqrt = hermitian_inv_sqrt(hermitian_part(pi));
    out.a = out.pi_inv_sqrt * b;
    return out;
}

/// Theta = A_1^H Q_1^H ... A_K^H Q_K^H Q_K A_K ... Q_1 A_1, with q[0] unused.
inline ComplexMatrix theta_matrix(const std::vector<ComplexMatrix>& a, const std::vector<ComplexMatrix>& q)
{
    if (a.empty() || q.size() != a.size() + 1)
        throw ValidationError("theta_matrix: need K factors and K + 1 rotations");
    ComplexMatrix acc = q[1] * a[0];
    for (std::size_t k = 1; k < a.size(); ++k)
        acc = q[k + 1] * a[k] * acc;
    return hermitian_part(acc.adjoint() * acc);
}

struct Rotations {
    std::vector<ComplexMatrix> q; // Q_0..Q_K
    std::vector<HopFactors> hops;
    ComplexMatrix theta;
    RealVector theta_eigenvalues; // non-increasing
};

/// Optimal Q_k = V_{A_{k+1}} U_{A_k}^H, Q_K = I and Q_0 = U_Theta U_Omega^H.
inline Rotations assemble_rotations(const NetworkModel& net, const Objective& obj,
                                    const std::vector<ComplexMatrix>& f_list)
{
    const auto hops = static_cast<std::size_t>(net.num_hops());
    if (f_list.size() != hops)
        throw ValidationError("assemble_rotations: expected one forwarding matrix per hop");

    Rotations out;
    std::vector<ComplexMatrix> a;
    std::vector<OrderedSVD> svds;
    for (std::size_t k = 0; k < hops; ++k) {
        out.hops.push_back(hop_factors(net.hops[k], f_list[k]));
        a.push_back(out.hops.back().a);
        svds.push_back(ordered_svd(a.back()));
    }

    out.q.resize(hops + 1);
    for (std::size_t k = 1; k < hops; ++k)
        out.q[k] = svds[k].v * svds[k - 1].u.adjoint();
    out.q[hops] = identity(net.hops.back().rx_dim());

    out.q[0] = identity(net.n_streams);
    out.theta = theta_matrix(a, out.q);
    const OrderedEig eig = ordered_eig_hermitian(out.theta);
    out.theta_eigenvalues = eig.eigenvalues;
    out.q[0] = eig.u * rotation_matrix(obj, net.n_streams).adjoint();
    return out;
}

/// P_1 = F_1 Q_0, P_k = F_k Q_{k-1} Pi_{k-1}^{-1/2} K_{k-1}^{-1/2}; G is the LMMSE equalizer.
inline Transceiver recover_precoders(const NetworkModel& net, const std::vector<ComplexMatrix>& f_list,
                                     const std::vector<ComplexMatrix>& q_list)
{
    const auto hops = static_cast<std::size_t>(net.num_hops());
    if (f_list.size() != hops || q_list.size() != hops + 1)
        throw ValidationError("recover_precoders: factor counts do not match the hop count");

    Transceiver out;
    out.precoders.push_back(f_list[0] * q_list[0]);
    for (std::size_t k = 1; k < hops; ++k) {
        const HopFactors prev = hop_factors(net.hops[k - 1], f_list[k - 1]);
        out.precoders.push_back(f_list[k] * q_list[k] * prev.pi_inv_sqrt * prev.k_inv_sqrt);
    }

    const std::vector<double> powers = transmit_powers(net, out.precoders);
    for (std::size_t k = 0; k < hops; ++k) {
        const double budget = net.hops[k].power_budget;
        if (std::abs(powers[k] - budget) > kClosureTol * budget) {
            std::ostringstream os;
            os << "recover_precoders: hop " << (k + 1) << " transmits " << powers[k] << " but the budget is "
               << budget;
            throw ConsistencyError(os.str());
        }
    }
    out.equalizer = lmmse_equalizer(net, out.precoders);
    return out;
}

struct DesignResult {
    Transceiver transceiver;
    Allocation allocation;
    std::vector<EffectiveHop> effective_hops;
    RealVector gamma;      // per-stream products, stream order
    RealVector theta_eigenvalues;
    double objective_value = 0.0;
    bool surrogate = false; // some hop used the bounded surrogate
};

inline DesignResult design(const NetworkModel& net, const Objective& obj, const SolverOptions& options = {})
{
    validate(net);
    validate(obj, net.n_streams);
    const Index hops = net.num_hops();
    const Index n = net.n_streams;

    DesignResult out;
    RealMatrix gains(hops, n);
    std::vector<double> budgets;
    for (Index k = 0; k < hops; ++k) {
        out.effective_hops.push_back(effective_channel(net.hops[k], n));
        gains.row(k) = out.effective_hops.back().gains.transpose();
        budgets.push_back(net.hops[k].power_budget);
        out.surrogate = out.surrogate || out.effective_hops.back().norm_error_cov.surrogate();
    }
    out.allocation = waterfill(obj, gains, budgets, options);

    TransceiverInternals internals;
    internals.lambda_f = out.allocation.f_sq.cwiseMax(0.0).cwiseSqrt();
    for (Index k = 0; k < hops; ++k) {
        const ForwardingFactor ff = assemble_F(net.hops[k], out.effective_hops[k],
                                               internals.lambda_f.row(k).transpose(), net.input_dim(k));
        internals.f.push_back(ff.f);
        internals.eta.push_back(ff.xi);
    }
    const Rotations rot = assemble_rotations(net, obj, internals.f);
    internals.q = rot.q;

    out.transceiver = recover_precoders(net, internals.f, internals.q);
    out.transceiver.internals = std::move(internals);
    out.gamma = stream_gamma(gains, out.allocation.f_sq);
    out.theta_eigenvalues = rot.theta_eigenvalues;
    out.objective_value =
        scalar_objective(obj, std::span<const double>(out.gamma.data(), static_cast<std::size_t>(n)));
    return out;
}

/// Design that trusts the estimated channels as exact. Evaluate it against the
/// original network to see the effect of the ignored errors.
inline DesignResult nonrobust_design(const NetworkModel& net, const Objective& obj,
                                     const SolverOptions& options = {})
{
    return design(without_estimation_error(net), obj, options);
}

} // namespace relayopt
