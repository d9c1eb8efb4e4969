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

// Seeded Monte Carlo evaluation of robust and non-robust designs.
//
// Each trial draws one scenario (estimated channels plus the true channels
// they were estimated from), designs both transceivers on the estimate, and
// pushes QPSK symbols through the true chain. Every random draw comes from a
// substream keyed by (seed, trial, hop, purpose), so a trial is reproducible in
// isolation and the outcome never depends on scheduling. The sweep value is not
// part of the key: all grid points reuse the same underlying draws, which
// makes differences between grid points much less noisy.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "designer.hpp"
#include "objectives.hpp"
#include "random.hpp"
#include "system_model.hpp"

namespace relayopt {

struct SimConfig {
    int k_hops = 2;
    Index n_streams = 4;
    Index antennas = 4; // every node
    double alpha = 0.6; // transmit-side error correlation
    double beta = 0.0;  // receive-side error correlation
    double sigma_e_sq = 0.01;
    std::vector<double> snr_db{30.0, 30.0}; // P_k / noise_k per hop
    int trials = 200;
    int symbols_per_stream = 1000;
    std::uint64_t seed = 1;
    Objective objective = Capacity{};
    SolverOptions solver;
};

enum class SeedPurpose : std::uint64_t {
    ChannelEstimate = 1,
    ChannelError = 2,
    Data = 3,
    Noise = 4,
};

inline void validate(const SimConfig& c)
{
    if (c.k_hops < 1)
        throw ValidationError("k_hops must be at least 1");
    if (c.n_streams < 1)
        throw ValidationError("n_streams must be at least 1");
    if (c.antennas < c.n_streams)
        throw ValidationError("antennas must be at least n_streams");
    if (!(c.alpha >= 0.0 && c.alpha < 1.0))
        throw ValidationError("alpha must lie in [0, 1)");
    if (!(c.beta >= 0.0 && c.beta < 1.0))
        throw ValidationError("beta must lie in [0, 1)");
    if (!(c.sigma_e_sq >= 0.0 && c.sigma_e_sq < 1.0))
        throw ValidationError("sigma_e_sq must lie in [0, 1)");
    if (static_cast<int>(c.snr_db.size()) != c.k_hops)
        throw ValidationError("snr_db needs one value per hop");
    for (double s : c.snr_db)
        if (!std::isfinite(s))
            throw ValidationError("snr_db must be finite");
    if (c.trials < 1)
        throw ValidationError("trials must be at least 1");
    if (c.symbols_per_stream < 1)
        throw ValidationError("symbols_per_stream must be at least 1");
    validate(c.objective, c.n_streams);
}

struct ErrorCovariances {
    ComplexMatrix psi;   // transmit side
    ComplexMatrix sigma; // receive side
};

/// Psi[i,j] = sigma_e^2 alpha^|i-j|, Sigma[i,j] = beta^|i-j|.
inline ErrorCovariances error_covariances_exponential(Index dim, double alpha, double beta, double sigma_e_sq)
{
    if (dim < 1)
        throw ValidationError("error_covariances_exponential: dimension must be at least 1");
    if (!(alpha >= 0.0 && alpha < 1.0) || !(beta >= 0.0 && beta < 1.0))
        throw ValidationError("error_covariances_exponential: correlation coefficients must lie in [0, 1)");
    if (!(sigma_e_sq >= 0.0 && sigma_e_sq < 1.0))
        throw ValidationError("error_covariances_exponential: sigma_e_sq must lie in [0, 1)");
    ErrorCovariances out{ComplexMatrix(dim, dim), ComplexMatrix(dim, dim)};
    for (Index i = 0; i < dim; ++i) {
        for (Index j = 0; j < dim; ++j) {
            const auto d = static_cast<double>(std::abs(i - j));
            out.psi(i, j) = sigma_e_sq * std::pow(alpha, d);
            out.sigma(i, j) = std::pow(beta, d);
        }
    }
    return out;
}

/// Error covariances of an MMSE channel estimate: Psi = R_T, Sigma = s (I + s R_R^{-1})^{-1}.
inline ErrorCovariances estimation_error_covariances(const ComplexMatrix& r_t, const ComplexMatrix& r_r,
                                                     double sigma_e_sq)
{
    require_hermitian(r_t, "estimation_error_covariances: R_T");
    if (!(sigma_e_sq >= 0.0) || !std::isfinite(sigma_e_sq))
        throw ValidationError("estimation_error_covariances: sigma_e_sq must be non-negative");
    ComplexMatrix inner = sigma_e_sq * hermitian_pd_inverse(r_r, "estimation_error_covariances: R_R");
    inner.diagonal().array() += 1.0;
    return {r_t, hermitian_part(sigma_e_sq * hermitian_pd_inverse(hermitian_part(inner), "estimation error"))};
}

struct Scenario {
    NetworkModel estimated;
    std::vector<ComplexMatrix> true_channels;
};

inline Scenario generate_scenario(const SimConfig& c, std::uint64_t trial)
{
    validate(c);
    const Index m = c.antennas;
    const ErrorCovariances cov = error_covariances_exponential(m, c.alpha, c.beta, c.sigma_e_sq);
    Scenario out;
    out.estimated.n_streams = c.n_streams;
    for (int k = 0; k < c.k_hops; ++k) {
        const auto hop_id = static_cast<std::uint64_t>(k);
        Rng est_rng(derive_seed(c.seed, {trial, hop_id, static_cast<std::uint64_t>(SeedPurpose::ChannelEstimate)}));
        Rng err_rng(derive_seed(c.seed, {trial, hop_id, static_cast<std::uint64_t>(SeedPurpose::ChannelError)}));

        HopModel hop;
        hop.sigma = cov.sigma;
        hop.psi = cov.psi;
        hop.noise_var = 1.0;
        hop.power_budget = std::pow(10.0, c.snr_db[static_cast<std::size_t>(k)] / 10.0);
        ComplexMatrix delta;
        if (c.sigma_e_sq > 0.0) {
            // Hbar and the error are independent and add up to unit-variance entries.
            const double scale = (1.0 - c.sigma_e_sq) / c.sigma_e_sq;
            hop.h_bar = sample_kronecker_gaussian(m, m, scale * cov.sigma, cov.psi, est_rng);
            delta = sample_kronecker_gaussian(m, m, cov.sigma, cov.psi, err_rng);
        } else {
            hop.h_bar = sample_kronecker_gaussian(m, m, identity(m), identity(m), est_rng);
            delta = ComplexMatrix::Zero(m, m);
        }
        out.true_channels.push_back(hop.h_bar + delta);
        out.estimated.hops.push_back(std::move(hop));
    }
    return out;
}

/// Metric weighting: the objective's W for weighted MSE, identity otherwise.
inline ComplexMatrix metric_weight(const Objective& obj, Index n)
{
    if (const auto* o = std::get_if<WeightedMse>(&obj))
        return o->w;
    return identity(n);
}

struct DesignMetrics {
    double weighted_mse = 0.0;           // Tr(W Phi), model
    double weighted_mse_empirical = 0.0; // from transmitted symbols
    double sum_rate = 0.0;               // -log2 det Phi, model
    double max_mse = 0.0;                // max diag Phi, model
    double objective = 0.0;              // f(Phi) of the configured objective
    double ber = 0.0;
    std::uint64_t bit_errors = 0;
    std::uint64_t bits = 0;
};

struct TrialRecord {
    std::uint64_t trial = 0;
    bool ok = false;
    std::string error;
    DesignMetrics robust;
    DesignMetrics nonrobust;
};

namespace detail {

/// Gray-coded unit-energy QPSK: bit b0 on I, b1 on Q, 0 -> +.
inline Complex qpsk(unsigned bits)
{
    const double a = std::sqrt(0.5);
    return {(bits & 1U) ? -a : a, (bits & 2U) ? -a : a};
}

struct Transmission {
    ComplexMatrix symbols;             // N x L
    std::vector<unsigned> bits;        // N * L two-bit labels, column-major
    std::vector<ComplexMatrix> noise;  // per hop, M_k x L, unit variance
};

inline Transmission draw_transmission(const SimConfig& c, const Scenario& s, std::uint64_t trial)
{
    const Index n = c.n_streams;
    const Index len = c.symbols_per_stream;
    Transmission out;
    Rng data(derive_seed(c.seed, {trial, 0, static_cast<std::uint64_t>(SeedPurpose::Data)}));
    out.symbols.resize(n, len);
    out.bits.resize(static_cast<std::size_t>(n * len));
    for (Index l = 0; l < len; ++l) {
        for (Index i = 0; i < n; ++i) {
            const auto b = static_cast<unsigned>(data.next_u64() >> 62);
            out.bits[static_cast<std::size_t>(l * n + i)] = b;
            out.symbols(i, l) = qpsk(b);
        }
    }
    for (Index k = 0; k < s.estimated.num_hops(); ++k) {
        Rng rng(derive_seed(c.seed, {trial, static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(SeedPurpose::Noise)}));
        const Index m = s.true_channels[static_cast<std::size_t>(k)].rows();
        ComplexMatrix z(m, len);
        for (Index l = 0; l < len; ++l)
            for (Index i = 0; i < m; ++i)
                z(i, l) = rng.complex_normal();
        out.noise.push_back(std::move(z));
    }
    return out;
}

inline void measure_link(const SimConfig& c, const Scenario& s, const Transmission& tx, const Transceiver& t,
                         const ComplexMatrix& w, DesignMetrics& out)
{
    ComplexMatrix x = tx.symbols;
    for (Index k = 0; k < s.estimated.num_hops(); ++k) {
        const HopModel& hop = s.estimated.hops[static_cast<std::size_t>(k)];
        x = s.true_channels[static_cast<std::size_t>(k)] * (t.precoders[static_cast<std::size_t>(k)] * x) +
            std::sqrt(hop.noise_var) * tx.noise[static_cast<std::size_t>(k)];
    }
    const ComplexMatrix est = t.equalizer * x;
    const ComplexMatrix err = est - tx.symbols;
    const Index len = c.symbols_per_stream;
    out.weighted_mse_empirical = trace_product(w, err * err.adjoint()).real() / static_cast<double>(len);

    std::uint64_t errors = 0;
    for (Index l = 0; l < len; ++l) {
        for (Index i = 0; i < c.n_streams; ++i) {
            const unsigned b = tx.bits[static_cast<std::size_t>(l * c.n_streams + i)];
            const Complex z = est(i, l);
            errors += static_cast<std::uint64_t>((z.real() < 0.0) != ((b & 1U) != 0U));
            errors += static_cast<std::uint64_t>((z.imag() < 0.0) != ((b & 2U) != 0U));
        }
    }
    out.bit_errors = errors;
    out.bits = static_cast<std::uint64_t>(2 * len * c.n_streams);
    out.ber = static_cast<double>(errors) / static_cast<double>(out.bits);
}

inline void model_metrics(const Objective& obj, const ComplexMatrix& w, const ComplexMatrix& phi, DesignMetrics& out)
{
    out.weighted_mse = weighted_mse(w, phi);
    out.sum_rate = rate_from_mse(phi);
    out.max_mse = phi.diagonal().real().maxCoeff();
    out.objective = matrix_objective(obj, phi);
}

} // namespace detail

/// Robust and non-robust design on the same scenario, data and noise.
inline TrialRecord run_trial(const SimConfig& c, std::uint64_t trial)
{
    TrialRecord rec;
    rec.trial = trial;
    const Scenario s = generate_scenario(c, trial);
    const ComplexMatrix w = metric_weight(c.objective, c.n_streams);
    try {
        const DesignResult robust = design(s.estimated, c.objective, c.solver);
        const DesignResult plain = nonrobust_design(s.estimated, c.objective, c.solver);
        const detail::Transmission tx = detail::draw_transmission(c, s, trial);

        // The robust equalizer is the LMMSE one of the error model. The
        // non-robust receiver keeps the equalizer it was designed with.
        detail::model_metrics(c.objective, w, mmse_matrix(s.estimated, robust.transceiver.precoders), rec.robust);
        detail::model_metrics(c.objective, w,
                              mse_matrix(s.estimated, plain.transceiver.precoders, plain.transceiver.equalizer),
                              rec.nonrobust);
        detail::measure_link(c, s, tx, robust.transceiver, w, rec.robust);
        detail::measure_link(c, s, tx, plain.transceiver, w, rec.nonrobust);
        rec.ok = true;
    } catch (const NumericalError& e) {
        rec.ok = false;
        rec.error = e.what();
    }
    return rec;
}

struct MetricSummary {
    double mean = 0.0;
    double std_error = 0.0;
};

struct AggregateMetrics {
    MetricSummary weighted_mse;
    MetricSummary weighted_mse_empirical;
    MetricSummary sum_rate;
    MetricSummary max_mse;
    MetricSummary ber;
    int trials_used = 0;
    int trials_failed = 0;
};

namespace detail {

inline MetricSummary summarize(const std::vector<double>& x)
{
    MetricSummary out;
    if (x.empty())
        return out;
    const auto n = static_cast<double>(x.size());
    double sum = 0.0;
    for (double v : x)
        sum += v;
    out.mean = sum / n;
    if (x.size() > 1) {
        double ss = 0.0;
        for (double v : x)
            ss += (v - out.mean) * (v - out.mean);
        out.std_error = std::sqrt(ss / (n - 1.0) / n);
    }
    return out;
}

} // namespace detail

/// Reduction in trial order. BER is total errors over total bits.
inline AggregateMetrics aggregate(const std::vector<TrialRecord>& records, bool robust)
{
    AggregateMetrics out;
    std::vector<double> wmse, wmse_emp, rate, maxmse, ber;
    std::uint64_t errors = 0, bits = 0;
    for (const auto& r : records) {
        if (!r.ok) {
            ++out.trials_failed;
            continue;
        }
        const DesignMetrics& m = robust ? r.robust : r.nonrobust;
        wmse.push_back(m.weighted_mse);
        wmse_emp.push_back(m.weighted_mse_empirical);
        rate.push_back(m.sum_rate);
        maxmse.push_back(m.max_mse);
        ber.push_back(m.ber);
        errors += m.bit_errors;
        bits += m.bits;
        ++out.trials_used;
    }
    out.weighted_mse = detail::summarize(wmse);
    out.weighted_mse_empirical = detail::summarize(wmse_emp);
    out.sum_rate = detail::summarize(rate);
    out.max_mse = detail::summarize(maxmse);
    out.ber = detail::summarize(ber);
    if (bits > 0)
        out.ber.mean = static_cast<double>(errors) / static_cast<double>(bits);
    return out;
}

enum class SweepAxis { SigmaESq, SnrDb };

inline const char* axis_name(SweepAxis a)
{
    return a == SweepAxis::SigmaESq ? "sigma_e_sq" : "snr_db";
}

struct SweepPoint {
    double value = 0.0;
    AggregateMetrics robust;
    AggregateMetrics nonrobust;
    std::vector<TrialRecord> records;
};

inline SimConfig at_sweep_value(SimConfig c, SweepAxis axis, double value)
{
    if (axis == SweepAxis::SigmaESq)
        c.sigma_e_sq = value;
    else
        std::fill(c.snr_db.begin(), c.snr_db.end(), value);
    return c;
}

/// One aggregate pair per grid value. Output does not depend on `threads`.
inline std::vector<SweepPoint> sweep(const SimConfig& c, SweepAxis axis, const std::vector<double>& values,
                                     int threads = 1)
{
    if (values.empty())
        throw ValidationError("sweep: grid must contain at least one value");
    std::vector<SimConfig> configs;
    for (double v : values) {
        configs.push_back(at_sweep_value(c, axis, v));
        validate(configs.back());
    }

    const std::size_t trials = static_cast<std::size_t>(c.trials);
    const std::size_t tasks = values.size() * trials;
    std::vector<TrialRecord> results(tasks);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};

    auto worker = [&] {
        for (std::size_t i = next++; i < tasks && !failed.load(); i = next++) {
            try {
                results[i] = run_trial(configs[i / trials], static_cast<std::uint64_t>(i % trials));
            } catch (...) {
                if (!failed.exchange(true))
                    failure = std::current_exception();
            }
        }
    };
    const auto count = static_cast<std::size_t>(std::clamp(threads, 1, 256));
    if (count == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < std::min(count, tasks); ++t)
            pool.emplace_back(worker);
        for (auto& t : pool)
            t.join();
    }
    if (failure)
        std::rethrow_exception(failure);

    std::vector<SweepPoint> out;
    for (std::size_t p = 0; p < values.size(); ++p) {
        SweepPoint pt;
        pt.value = values[p];
        pt.records.assign(results.begin() + static_cast<std::ptrdiff_t>(p * trials),
                          results.begin() + static_cast<std::ptrdiff_t>((p + 1) * trials));
        pt.robust = aggregate(pt.records, true);
        pt.nonrobust = aggregate(pt.records, false);
        out.push_back(std::move(pt));
    }
    return out;
}

} // namespace relayopt
