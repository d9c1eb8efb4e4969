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

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "relayopt/cli.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Robust transceiver design for multi-hop AF MIMO relay chains"};
    app.require_subcommand(1);

    std::string config;
    std::optional<std::string> output;
    auto* design = app.add_subcommand("design", "Design one seeded scenario and dump the factors");
    design->add_option("config", config, "Run configuration file")->required();
    design->add_option("-o,--output", output, "Factor dump path (overrides output.path)");

    std::string axis;
    std::string values;
    std::optional<int> threads;
    auto* sweep = app.add_subcommand("sweep", "Monte Carlo sweep, CSV output");
    sweep->add_option("config", config, "Run configuration file")->required();
    sweep->add_option("--axis", axis, "sigma_e_sq or snr_db")->required();
    sweep->add_option("--values", values, "Ascending grid, comma separated")->required();
    sweep->add_option("-j,--threads", threads, "Worker threads (overrides RELAY_OPTIM_THREADS)");
    sweep->add_option("-o,--output", output, "CSV path (overrides output.path; '-' for stdout)");

    std::string level = "fast";
    std::string fault = "none";
    auto* verify = app.add_subcommand("verify", "Run the built-in property suites");
    verify->add_option("--level", level, "fast or full")->check(CLI::IsMember({"fast", "full"}));
    verify->add_option("--fault", fault, "Negative control")->check(CLI::IsMember({"none", "corrupt-q"}))->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? relayopt::kExitOk : relayopt::kExitConfig;
    }

    if (*design)
        return relayopt::cmd_design(config, output, std::cout, std::cerr);
    if (*sweep)
        return relayopt::cmd_sweep(config, axis, values, threads, output, std::cout, std::cerr);
    const auto f = fault == "corrupt-q" ? relayopt::VerifyFault::CorruptQ : relayopt::VerifyFault::None;
    return relayopt::cmd_verify(level, f, std::cout, std::cerr);
}
