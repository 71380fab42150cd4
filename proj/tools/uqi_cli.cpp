// Copyright 2026 The UQI Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: uqi <command> --input <path> --output <path>
//   [--seed N] [--max-iters N] [--tol X] [--csv <path>]
// Exit codes: 0 success, 2 parse error, 3 validation error, 4 runtime error.

#include <chrono>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "uqi/io.hpp"

namespace {

constexpr int kExitParse = 2;
constexpr int kExitValidation = 3;
constexpr int kExitRuntime = 4;

}  // namespace

int main(int argc, char **argv) {
    using namespace uqi;

    CLI::App app{"Interface-qubit controllability, synthesis, measurement and network simulation"};
    std::string command, input, output, csv;
    io::Overrides overrides;
    std::uint64_t seed = 0;
    int max_iters = 0;
    double tol = 0.0;
    app.add_option("command", command, "analyze | bridge | synthesize | measure | scan | transfer | compile-run")
        ->required();
    app.add_option("--input", input, "JSON config")->required();
    app.add_option("--output", output, "JSON report")->required();
    auto *seed_opt = app.add_option("--seed", seed, "RNG seed (overrides the config)");
    auto *iters_opt = app.add_option("--max-iters", max_iters, "optimizer iteration cap, or closure depth for analyze/bridge");
    auto *tol_opt = app.add_option("--tol", tol, "target infidelity, or closure rank tolerance for analyze/bridge");
    app.add_option("--csv", csv, "scan CSV path (default: output path with .csv extension)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    }
    if (seed_opt->count()) overrides.seed = seed;
    if (iters_opt->count()) overrides.max_iters = max_iters;
    if (tol_opt->count()) overrides.tol = tol;

    io::PreparedRun run;
    try {
        run = io::prepare(command, io::read_json_file(input), overrides);
    } catch (const io::ParseError &e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const InvariantError &e) {
        std::cerr << "invalid field \"" << e.field() << "\": " << e.what() << "\n";
        return kExitValidation;
    } catch (const DimensionError &e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitValidation;
    }

    try {
        const auto start = std::chrono::steady_clock::now();
        const io::Json results = run.execute();
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (command == "scan") {
            std::filesystem::path csv_path = csv;
            if (csv_path.empty()) csv_path = std::filesystem::path(output).replace_extension(".csv");
            io::write_atomic(csv_path, io::scan_csv(results));
        }
        io::write_atomic(output, io::make_report(run, results, wall).dump(2) + "\n");
    } catch (const std::exception &e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return 0;
}
