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

// Command implementations behind the `relayopt` executable. Each returns a
// process exit code:
//   0  success
//   1  configuration or input validation error
//   2  numerical failure
//   3  verification failure

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "config.hpp"
#include "designer.hpp"
#include "io.hpp"
#include "montecarlo.hpp"
#include "verification.hpp"

namespace relayopt {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitNumerical = 2;
inline constexpr int kExitVerify = 3;

inline constexpr const char* kThreadsEnv = "RELAY_OPTIM_THREADS";

/// Thread count: explicit flag, then RELAY_OPTIM_THREADS, then the config value.
inline int resolve_threads(std::optional<int> flag, int config_value)
{
    if (flag) {
        if (*flag < 1)
            throw ValidationError("--threads must be at least 1");
        return *flag;
    }
    if (const char* env = std::getenv(kThreadsEnv); env && *env) {
        const long long v = detail::parse_integer(kThreadsEnv, env);
        if (v < 1 || v > 256)
            throw ValidationError(std::string(kThreadsEnv) + " must lie in [1, 256]");
        return static_cast<int>(v);
    }
    return config_value;
}

/// Ascending comma-separated grid.
inline std::vector<double> parse_grid(const std::string& text)
{
    const std::vector<double> v = detail::parse_list("--values", text);
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] > v[i - 1]))
            throw ValidationError("--values must be strictly ascending");
    return v;
}

inline SweepAxis parse_axis(const std::string& text)
{
    if (text == "sigma_e_sq")
        return SweepAxis::SigmaESq;
    if (text == "snr_db")
        return SweepAxis::SnrDb;
    throw ValidationError("--axis must be sigma_e_sq or snr_db, got '" + text + "'");
}

/// Estimated network for the design command: seeded trial 0, or diagonal channels.
inline NetworkModel design_network(const RunConfig& rc)
{
    if (rc.channel_model != "diagonal")
        return generate_scenario(rc.sim, 0).estimated;
    const SimConfig& c = rc.sim;
    const ErrorCovariances cov = error_covariances_exponential(c.antennas, c.alpha, c.beta, c.sigma_e_sq);
    const RealVector g = Eigen::Map<const RealVector>(rc.diagonal_gains.data(), c.antennas);
    NetworkModel net;
    net.n_streams = c.n_streams;
    for (int k = 0; k < c.k_hops; ++k) {
        HopModel hop;
        hop.h_bar = g.cast<Complex>().asDiagonal();
        hop.sigma = cov.sigma;
        hop.psi = cov.psi;
        hop.noise_var = 1.0;
        hop.power_budget = std::pow(10.0, c.snr_db[static_cast<std::size_t>(k)] / 10.0);
        net.hops.push_back(std::move(hop));
    }
    return net;
}

namespace detail {

template <class Body>
int guarded(std::ostream& err, Body&& body)
{
    try {
        return body();
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        err << "numerical error: " << e.what() << '\n';
        return kExitNumerical;
    }
}

inline void write_text_file(const std::string& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw ValidationError("cannot open output file '" + path + "'");
    f << text;
    if (!f)
        throw ValidationError("failed to write output file '" + path + "'");
}

} // namespace detail

inline int cmd_design(const std::string& config_path, const std::optional<std::string>& output, std::ostream& out,
                      std::ostream& err)
{
    return detail::guarded(err, [&] {
        const RunConfig rc = load_config(config_path);
        const NetworkModel net = design_network(rc);
        const DesignResult res = design(net, rc.sim.objective, rc.sim.solver);
        const Index n = net.n_streams;

        out << "objective: " << objective_name(rc.sim.objective) << '\n';
        for (Index k = 0; k < net.num_hops(); ++k) {
            out << "hop " << (k + 1) << " gains:";
            for (Index i = 0; i < n; ++i)
                out << ' ' << format_number(res.effective_hops[static_cast<std::size_t>(k)].gains(i));
            out << '\n' << "hop " << (k + 1) << " f_sq:";
            for (Index i = 0; i < n; ++i)
                out << ' ' << format_number(res.allocation.f_sq(k, i));
            out << '\n';
        }
        out << "objective value: " << format_number(res.objective_value) << '\n';
        out << "sweeps: " << res.allocation.sweeps << (res.allocation.converged ? " (converged)" : " (max_iter reached)")
            << '\n';
        if (res.surrogate)
            err << "warning: some hop has neither Sigma nor Psi proportional to I; "
                   "the design optimizes an upper bound and is not optimal\n";

        std::ostringstream dump;
        const auto& in = *res.transceiver.internals;
        for (std::size_t k = 0; k < res.transceiver.precoders.size(); ++k)
            write_matrix_block(dump, "P" + std::to_string(k + 1), res.transceiver.precoders[k]);
        write_matrix_block(dump, "G", res.transceiver.equalizer);
        for (std::size_t k = 0; k < in.f.size(); ++k)
            write_matrix_block(dump, "F" + std::to_string(k + 1), in.f[k]);
        for (std::size_t k = 0; k < in.q.size(); ++k)
            write_matrix_block(dump, "Q" + std::to_string(k), in.q[k]);
        const std::string path = output ? *output : (rc.output.empty() ? std::string("factors.txt") : rc.output);
        detail::write_text_file(path, dump.str());
        out << "factors written to " << path << '\n';
        return kExitOk;
    });
}

inline int cmd_sweep(const std::string& config_path, const std::string& axis_text, const std::string& values_text,
                     std::optional<int> threads_flag, const std::optional<std::string>& output, std::ostream& out,
                     std::ostream& err)
{
    return detail::guarded(err, [&] {
        const RunConfig rc = load_config(config_path);
        if (rc.channel_model != "random")
            throw ValidationError("sweep needs network.channel_model = random");
        const SweepAxis axis = parse_axis(axis_text);
        const std::vector<double> grid = parse_grid(values_text);
        const int threads = resolve_threads(threads_flag, rc.threads);

        const auto points = sweep(rc.sim, axis, grid, threads);
        std::ostringstream csv;
        write_sweep_csv(csv, objective_name(rc.sim.objective), points);

        int failed = 0;
        for (const auto& p : points)
            failed += p.robust.trials_failed;
        if (failed > 0)
            err << "warning: " << failed << " trial(s) failed and were excluded\n";

        const std::string path = output ? *output : rc.output;
        if (path.empty() || path == "-")
            out << csv.str();
        else
            detail::write_text_file(path, csv.str());
        if (rc.verbosity > 0)
            err << "sweep: " << grid.size() << " point(s) x " << rc.sim.trials << " trial(s) on " << threads
                << " thread(s)\n";
        return kExitOk;
    });
}

inline int cmd_verify(const std::string& level_text, VerifyFault fault, std::ostream& out, std::ostream& err)
{
    return detail::guarded(err, [&] {
        VerifyLevel level;
        if (level_text == "fast")
            level = VerifyLevel::Fast;
        else if (level_text == "full")
            level = VerifyLevel::Full;
        else
            throw ValidationError("--level must be fast or full, got '" + level_text + "'");

        bool ok = true;
        for (const auto& s : run_verification(level, fault)) {
            ok = ok && s.passed;
            out << std::left << std::setw(22) << s.name << (s.passed ? "PASS" : "FAIL") << "  worst "
                << format_number(s.worst) << " (limit " << format_number(s.limit) << ", " << s.cases << " cases)";
            if (!s.note.empty())
                out << "  " << s.note;
            out << '\n';
        }
        return ok ? kExitOk : kExitVerify;
    });
}

} // namespace relayopt
