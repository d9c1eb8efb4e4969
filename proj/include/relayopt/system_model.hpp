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

// Signal model of a K-hop amplify-and-forward chain with Kronecker-structured
// channel estimation errors H_k = Hbar_k + Sigma_k^{1/2} H_W Psi_k^{1/2}.
//
// All second-order quantities below are expectations over data, noise and the
// estimation errors. The per-hop power constraint is likewise averaged over the
// errors; that average is already contained in the trace terms of the
// covariance recursion, so no separate averaging step exists.

#include <cmath>
#include <optional>
#include <sstream>
#include <vector>

#include "linalg.hpp"

namespace relayopt {

/// One hop: estimated channel (rx x tx), error covariances, noise, power budget.
struct HopModel {
    ComplexMatrix h_bar;
    ComplexMatrix sigma; // receive-side (row) error covariance, rx x rx
    ComplexMatrix psi;   // transmit-side (column) error covariance, tx x tx
    double noise_var = 1.0;
    double power_budget = 1.0;

    Index rx_dim() const { return h_bar.rows(); }
    Index tx_dim() const { return h_bar.cols(); }
};

struct NetworkModel {
    std::vector<HopModel> hops;
    Index n_streams = 1;

    Index num_hops() const { return static_cast<Index>(hops.size()); }

    /// Dimension of the signal entering hop k's precoder (N for k = 0).
    Index input_dim(Index k) const { return k == 0 ? n_streams : hops[k - 1].rx_dim(); }
};

/// Factors produced by the structured design, kept for inspection and checks.
struct TransceiverInternals {
    std::vector<ComplexMatrix> f;   // F_1..F_K
    std::vector<ComplexMatrix> q;   // Q_0..Q_K
    RealMatrix lambda_f;            // K x N, diagonal of Lambda_F per hop
    std::vector<double> eta;        // eta_f per hop
};

struct Transceiver {
    std::vector<ComplexMatrix> precoders; // P_1..P_K
    ComplexMatrix equalizer;              // G, N x M_K
    std::optional<TransceiverInternals> internals;
};

inline constexpr double kPowerSlack = 1e-8;

inline void validate(const HopModel& hop, Index n_streams, Index k)
{
    std::ostringstream where;
    where << "hop " << (k + 1);
    require_finite(hop.h_bar, where.str() + " channel");
    if (hop.rx_dim() < n_streams || hop.tx_dim() < n_streams) {
        std::ostringstream os;
        os << where.str() << ": channel is " << hop.rx_dim() << "x" << hop.tx_dim()
           << " but both dimensions must be at least the stream count " << n_streams;
        throw ValidationError(os.str());
    }
    require_shape(hop.sigma, hop.rx_dim(), hop.rx_dim(), where.str() + " sigma");
    require_shape(hop.psi, hop.tx_dim(), hop.tx_dim(), where.str() + " psi");
    require_hermitian(hop.sigma, where.str() + " sigma");
    require_hermitian(hop.psi, where.str() + " psi");
    for (const auto* cov : {&hop.sigma, &hop.psi}) {
        const double lo = ordered_eig_hermitian(*cov).eigenvalues.minCoeff();
        if (lo < -kPsdClip * std::max(1.0, detail::max_abs(*cov)))
            throw ValidationError(where.str() + ": error covariance is not PSD");
    }
    if (!(hop.noise_var > 0.0) || !std::isfinite(hop.noise_var))
        throw ValidationError(where.str() + ": noise variance must be positive");
    if (!(hop.power_budget > 0.0) || !std::isfinite(hop.power_budget))
        throw ValidationError(where.str() + ": power budget must be positive");
}

inline void validate(const NetworkModel& net)
{
    if (net.hops.empty())
        throw ValidationError("network: at least one hop is required");
    if (net.n_streams < 1)
        throw ValidationError("network: stream count must be at least 1");
    for (Index k = 0; k < net.num_hops(); ++k)
        validate(net.hops[k], net.n_streams, k);
}

inline void check_precoders(const NetworkModel& net, const std::vector<ComplexMatrix>& precoders)
{
    if (static_cast<Index>(precoders.size()) != net.num_hops())
        throw ValidationError("precoders: expected one matrix per hop");
    for (Index k = 0; k < net.num_hops(); ++k) {
        std::ostringstream os;
        os << "precoder " << (k + 1);
        require_shape(precoders[k], net.hops[k].tx_dim(), net.input_dim(k), os.str());
    }
}

/// Received covariances R_x1..R_xK of the recursion
///   R_xk = Hbar P R_x(k-1) P^H Hbar^H + Tr(P R_x(k-1) P^H Psi) Sigma + noise I,
/// starting from R_x0 = I_N.
inline std::vector<ComplexMatrix> signal_covariances(const NetworkModel& net,
                                                     const std::vector<ComplexMatrix>& precoders)
{
    check_precoders(net, precoders);
    std::vector<ComplexMatrix> out;
    out.reserve(net.hops.size());
    ComplexMatrix r = identity(net.n_streams);
    for (Index k = 0; k < net.num_hops(); ++k) {
        const HopModel& hop = net.hops[k];
        const ComplexMatrix tx = precoders[k] * r * precoders[k].adjoint();
        const double err = trace_product(tx, hop.psi).real();
        ComplexMatrix next = hop.h_bar * tx * hop.h_bar.adjoint() + err * hop.sigma;
        next.diagonal().array() += hop.noise_var;
        r = hermitian_part(next);
        out.push_back(r);
    }
    return out;
}

/// Average transmit power Tr(P_k R_x(k-1) P_k^H) of every hop.
inline std::vector<double> transmit_powers(const NetworkModel& net, const std::vector<ComplexMatrix>& precoders)
{
    const auto cov = signal_covariances(net, precoders);
    std::vector<double> out;
    for (Index k = 0; k < net.num_hops(); ++k) {
        const ComplexMatrix& r = k == 0 ? identity(net.n_streams) : cov[k - 1];
        out.push_back((precoders[k] * r * precoders[k].adjoint()).trace().real());
    }
    return out;
}

/// Product Hbar_K P_K ... Hbar_1 P_1 of the estimated chain.
inline ComplexMatrix end_to_end_channel(const NetworkModel& net, const std::vector<ComplexMatrix>& precoders)
{
    check_precoders(net, precoders);
    ComplexMatrix acc = identity(net.n_streams);
    for (Index k = 0; k < net.num_hops(); ++k)
        acc = net.hops[k].h_bar * precoders[k] * acc;
    return acc;
}

/// Error covariance Phi(G, {P_k}) for an arbitrary equalizer.
inline ComplexMatrix mse_matrix(const NetworkModel& net, const std::vector<ComplexMatrix>& precoders,
                                const ComplexMatrix& equalizer)
{
    const auto cov = signal_covariances(net, precoders);
    const ComplexMatrix& ry = cov.back();
    require_shape(equalizer, net.n_streams, ry.rows(), "equalizer");
    const ComplexMatrix h = end_to_end_channel(net, precoders);
    const ComplexMatrix gh = equalizer * h;
    ComplexMatrix phi = equalizer * ry * equalizer.adjoint() - gh - gh.adjoint();
    phi.diagonal().array() += 1.0;
    return hermitian_part(phi);
}

inline ComplexMatrix lmmse_equalizer(const NetworkModel& net, const std::vector<ComplexMatrix>& precoders)
{
    const auto cov = signal_covariances(net, precoders);
    const ComplexMatrix h = end_to_end_channel(net, precoders);
    Eigen::LLT<ComplexMatrix> llt(cov.back());
    if (llt.info() != Eigen::Success) {
        const double smallest = ordered_eig_hermitian(cov.back()).eigenvalues.minCoeff();
        throw ConditioningError("lmmse_equalizer: receive covariance is singular", smallest);
    }
    // G = H^H R_y^{-1}  <=>  G^H = R_y^{-1} H.
    return llt.solve(h).adjoint();
}

/// Phi at the LMMSE equalizer, I - H^H R_y^{-1} H.
inline ComplexMatrix mmse_matrix(const NetworkModel& net, const std::vector<ComplexMatrix>& precoders)
{
    const auto cov = signal_covariances(net, precoders);
    const ComplexMatrix h = end_to_end_channel(net, precoders);
    Eigen::LLT<ComplexMatrix> llt(cov.back());
    if (llt.info() != Eigen::Success) {
        const double smallest = ordered_eig_hermitian(cov.back()).eigenvalues.minCoeff();
        throw ConditioningError("mmse_matrix: receive covariance is singular", smallest);
    }
    ComplexMatrix phi = -(h.adjoint() * llt.solve(h));
    phi.diagonal().array() += 1.0;
    return hermitian_part(phi);
}

/// -log2 det(Phi) for a Hermitian PD error covariance, in bits.
inline double rate_from_mse(const ComplexMatrix& phi)
{
    const OrderedEig eig = ordered_eig_hermitian(phi);
    if (!(eig.eigenvalues.minCoeff() > 0.0))
        throw DomainError("rate_from_mse: error covariance is singular");
    double acc = 0.0;
    for (Index i = 0; i < eig.eigenvalues.size(); ++i)
        acc -= std::log2(eig.eigenvalues(i));
    return acc;
}

inline double sum_rate(const NetworkModel& net, const std::vector<ComplexMatrix>& precoders)
{
    return rate_from_mse(mmse_matrix(net, precoders));
}

inline double weighted_mse(const ComplexMatrix& w, const ComplexMatrix& phi)
{
    require_shape(phi, w.rows(), w.cols(), "weighted_mse");
    const Complex t = trace_product(w, phi);
    const double scale = std::max(1.0, std::abs(t));
    if (std::abs(t.imag()) > 1e-12 * scale)
        throw NumericalError("weighted_mse: trace has a non-negligible imaginary part");
    return t.real();
}

/// Copy of the network with every estimation error removed.
inline NetworkModel without_estimation_error(const NetworkModel& net)
{
    NetworkModel out = net;
    for (auto& hop : out.hops) {
        hop.sigma.setZero();
        hop.psi.setZero();
    }
    return out;
}

} // namespace relayopt
