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

// Run configuration in sectioned `key = value` text:
//
//   [network]    k_hops, n_streams, antennas, channel_model, diagonal_gains
//   [channel]    alpha, beta, sigma_e_sq, snr_db
//   [objective]  type, w, v
//   [simulation] trials, symbols_per_stream, seed, threads
//   [solver]     tol, max_iter
//   [output]     path, verbosity
//
// `#` starts a comment. Lists are comma separated. Unknown sections or keys,
// duplicates and missing required keys are errors that name the key.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "montecarlo.hpp"
#include "objectives.hpp"

namespace relayopt {

struct RunConfig {
    SimConfig sim;
    int threads = 1;
    std::string output; // empty: command default
    int verbosity = 0;
    std::string channel_model = "random"; // or "diagonal"
    std::vector<double> diagonal_gains;
};

namespace detail {

struct ConfigKey {
    std::string_view name;
    bool required;
};

inline constexpr ConfigKey kConfigKeys[] = {
    {"network.k_hops", true},           {"network.n_streams", true},
    {"network.antennas", true},         {"network.channel_model", false},
    {"network.diagonal_gains", false},  {"channel.alpha", true},
    {"channel.beta", true},             {"channel.sigma_e_sq", true},
    {"channel.snr_db", true},           {"objective.type", true},
    {"objective.w", false},             {"objective.v", false},
    {"simulation.trials", true},        {"simulation.symbols_per_stream", false},
    {"simulation.seed", true},          {"simulation.threads", false},
    {"solver.tol", false},              {"solver.max_iter", false},
    {"output.path", false},             {"output.verbosity", false},
};

inline std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

[[noreturn]] inline void config_error(std::string_view key, std::string_view why)
{
    throw ValidationError("config: key '" + std::string(key) + "': " + std::string(why));
}

inline double parse_double(std::string_view key, std::string_view text)
{
    text = trim(text);
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size() || !std::isfinite(v))
        config_error(key, "expected a real number, got '" + std::string(text) + "'");
    return v;
}

inline long long parse_integer(std::string_view key, std::string_view text)
{
    text = trim(text);
    long long v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        config_error(key, "expected an integer, got '" + std::string(text) + "'");
    return v;
}

inline std::uint64_t parse_u64(std::string_view key, std::string_view text)
{
    text = trim(text);
    std::uint64_t v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        config_error(key, "expected an unsigned 64-bit integer, got '" + std::string(text) + "'");
    return v;
}

inline std::vector<double> parse_list(std::string_view key, std::string_view text)
{
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const auto end = comma == std::string_view::npos ? text.size() : comma;
        out.push_back(parse_double(key, text.substr(start, end - start)));
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    return out;
}

inline int parse_bounded(std::string_view key, std::string_view text, long long lo, long long hi)
{
    const long long v = parse_integer(key, text);
    if (v < lo || v > hi)
        config_error(key, "value " + std::to_string(v) + " outside [" + std::to_string(lo) + ", " +
                              std::to_string(hi) + "]");
    return static_cast<int>(v);
}

} // namespace detail

/// Parse config text; `source` labels line numbers in messages.
inline RunConfig parse_config(std::string_view text, std::string_view source = "config")
{
    std::map<std::string, std::string, std::less<>> values;
    std::string section;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    auto where = [&] { return std::string(source) + ":" + std::to_string(line_no) + ": "; };

    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ValidationError(where() + "malformed section header");
            section = std::string(detail::trim(line.substr(1, line.size() - 2)));
            const bool known = std::any_of(std::begin(detail::kConfigKeys), std::end(detail::kConfigKeys),
                                           [&](const auto& k) { return k.name.starts_with(section + "."); });
            if (!known)
                throw ValidationError(where() + "unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ValidationError(where() + "expected 'key = value'");
        if (section.empty())
            throw ValidationError(where() + "key outside of any section");
        const std::string key = section + "." + std::string(detail::trim(line.substr(0, eq)));
        const bool known = std::any_of(std::begin(detail::kConfigKeys), std::end(detail::kConfigKeys),
                                       [&](const auto& k) { return k.name == key; });
        if (!known)
            throw ValidationError(where() + "unknown key '" + key + "'");
        if (!values.emplace(key, std::string(detail::trim(line.substr(eq + 1)))).second)
            throw ValidationError(where() + "duplicate key '" + key + "'");
    }
    for (const auto& k : detail::kConfigKeys)
        if (k.required && !values.contains(k.name))
            throw ValidationError("config: missing required key '" + std::string(k.name) + "'");

    auto get = [&](std::string_view key) -> const std::string* {
        const auto it = values.find(key);
        return it == values.end() ? nullptr : &it->second;
    };

    RunConfig rc;
    SimConfig& c = rc.sim;
    c.k_hops = detail::parse_bounded("network.k_hops", *get("network.k_hops"), 1, 64);
    c.n_streams = detail::parse_bounded("network.n_streams", *get("network.n_streams"), 1, 256);
    c.antennas = detail::parse_bounded("network.antennas", *get("network.antennas"), 1, 256);
    if (c.antennas < c.n_streams)
        detail::config_error("network.antennas", "must be at least n_streams");
    if (const auto* s = get("network.channel_model")) {
        rc.channel_model = *s;
        if (rc.channel_model != "random" && rc.channel_model != "diagonal")
            detail::config_error("network.channel_model", "expected 'random' or 'diagonal'");
    }
    if (const auto* s = get("network.diagonal_gains"))
        rc.diagonal_gains = detail::parse_list("network.diagonal_gains", *s);
    if (rc.channel_model == "diagonal") {
        if (static_cast<Index>(rc.diagonal_gains.size()) != c.antennas)
            detail::config_error("network.diagonal_gains", "needs one gain per antenna for a diagonal channel");
        for (double g : rc.diagonal_gains)
            if (g < 0.0)
                detail::config_error("network.diagonal_gains", "gains must be non-negative");
    }

    c.alpha = detail::parse_double("channel.alpha", *get("channel.alpha"));
    if (!(c.alpha >= 0.0 && c.alpha < 1.0))
        detail::config_error("channel.alpha", "must lie in [0, 1)");
    c.beta = detail::parse_double("channel.beta", *get("channel.beta"));
    if (!(c.beta >= 0.0 && c.beta < 1.0))
        detail::config_error("channel.beta", "must lie in [0, 1)");
    c.sigma_e_sq = detail::parse_double("channel.sigma_e_sq", *get("channel.sigma_e_sq"));
    if (!(c.sigma_e_sq >= 0.0 && c.sigma_e_sq < 1.0))
        detail::config_error("channel.sigma_e_sq", "must lie in [0, 1)");
    c.snr_db = detail::parse_list("channel.snr_db", *get("channel.snr_db"));
    if (c.snr_db.size() == 1)
        c.snr_db.assign(static_cast<std::size_t>(c.k_hops), c.snr_db.front());
    if (static_cast<int>(c.snr_db.size()) != c.k_hops)
        detail::config_error("channel.snr_db", "give one value or one per hop");

    const std::string& type = *get("objective.type");
    const Index n = c.n_streams;
    if (type == "weighted_mse") {
        const auto* w = get("objective.w");
        if (!w)
            detail::config_error("objective.w", "required for weighted_mse (diagonal of W)");
        const auto diag = detail::parse_list("objective.w", *w);
        if (static_cast<Index>(diag.size()) != n)
            detail::config_error("objective.w", "needs n_streams entries");
        for (double d : diag)
            if (d < 0.0)
                detail::config_error("objective.w", "entries must be non-negative");
        const RealVector d = Eigen::Map<const RealVector>(diag.data(), n);
        c.objective = WeightedMse{ComplexMatrix(d.cast<Complex>().asDiagonal())};
    } else if (type == "capacity") {
        c.objective = Capacity{};
    } else if (type == "max_mse") {
        c.objective = MaxMse{};
    } else if (type == "weighted_sum_rate") {
        const auto* v = get("objective.v");
        if (!v)
            detail::config_error("objective.v", "required for weighted_sum_rate");
        WeightedSumRate o{detail::parse_list("objective.v", *v)};
        if (static_cast<Index>(o.v.size()) != n)
            detail::config_error("objective.v", "needs n_streams entries");
        for (std::size_t i = 0; i < o.v.size(); ++i)
            if (!(o.v[i] > 0.0) || (i > 0 && o.v[i] > o.v[i - 1]))
                detail::config_error("objective.v", "entries must be positive and non-increasing");
        c.objective = std::move(o);
    } else {
        detail::config_error("objective.type",
                             "expected weighted_mse, capacity, max_mse or weighted_sum_rate, got '" + type + "'");
    }

    c.trials = detail::parse_bounded("simulation.trials", *get("simulation.trials"), 1, 100000000);
    if (const auto* s = get("simulation.symbols_per_stream"))
        c.symbols_per_stream = detail::parse_bounded("simulation.symbols_per_stream", *s, 1, 10000000);
    c.seed = detail::parse_u64("simulation.seed", *get("simulation.seed"));
    if (const auto* s = get("simulation.threads"))
        rc.threads = detail::parse_bounded("simulation.threads", *s, 1, 256);

    if (const auto* s = get("solver.tol")) {
        c.solver.tol = detail::parse_double("solver.tol", *s);
        if (!(c.solver.tol > 0.0))
            detail::config_error("solver.tol", "must be positive");
    }
    if (const auto* s = get("solver.max_iter"))
        c.solver.max_iter = detail::parse_bounded("solver.max_iter", *s, 1, 1000000);

    if (const auto* s = get("output.path"))
        rc.output = *s;
    if (const auto* s = get("output.verbosity"))
        rc.verbosity = detail::parse_bounded("output.verbosity", *s, 0, 3);

    validate(c);
    return rc;
}

inline RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ValidationError("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path);
}

} // namespace relayopt
