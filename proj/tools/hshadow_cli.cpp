// Copyright 2026 The hshadow Authors
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

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hshadow/config.hpp"
#include "hshadow/runner.hpp"

int main(int argc, char **argv) {
    CLI::App app{"Run a Hadamard-test or classical-shadow experiment described by a config file."};
    std::string config_path;
    hshadow::ConfigOverrides over;
    hshadow::RunOptions opt;
    std::string scheme;
    app.add_option("--config", config_path, "Experiment config file")->required();
    app.add_option("--seed", over.seed, "Master seed (overrides the config)");
    app.add_option("--shots", over.shots, "Shot count (overrides the config)");
    app.add_option("--scheme", scheme, "Shadow scheme")->check(CLI::IsMember({"local", "global"}));
    app.add_option("--emit-snapshots", opt.emit_snapshots, "Write the snapshot log to this path");
    app.add_flag("--oracle-only", opt.oracle_only, "Compute exact reference values only");
    app.add_option("--threads", over.threads, "Worker threads for shot generation (0 = all cores)");
    app.add_option("--replay", opt.replay, "Finalize from a snapshot log instead of sampling");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : hshadow::kExitConfig;
    }
    if (!scheme.empty()) {
        over.scheme = hshadow::parse_scheme(scheme);
    }
    if (opt.replay && opt.oracle_only) {
        std::cerr << "error: --replay and --oracle-only are mutually exclusive\n";
        return hshadow::kExitConfig;
    }
    try {
        const hshadow::ExperimentConfig cfg = hshadow::load_config(config_path, over);
        const hshadow::RunResult result = hshadow::run_experiment(cfg, opt);
        hshadow::write_outputs(cfg, result, opt);
        std::cout << "wrote " << cfg.output << ".tsv\n";
        return 0;
    } catch (const std::exception &e) {
        const int code = hshadow::exit_code_for(e);
        const char *kind = code == hshadow::kExitConfig      ? "config error"
                           : code == hshadow::kExitNumerical ? "numerical consistency failure"
                                                             : "error";
        std::cerr << kind << ": " << e.what() << '\n';
        return code;
    }
}
