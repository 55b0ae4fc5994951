/*
   Copyright 2026 the rwre-lab authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <iostream>
#include <string>

#include "rwre/errors.hpp"
#include "rwre/experiment.hpp"
#include "rwre/io.hpp"

namespace {

// Exit codes: 0 all assertions pass, 1 assertion failure, 2 config error,
// 3 budget error.
int run(const std::string& name, const std::string& config_path, const std::string& out_dir,
        std::int64_t seed_override, bool has_seed, int threads) {
    nlohmann::json config;
    try {
        config = nlohmann::json::parse(rwre::read_file(config_path));
    } catch (const nlohmann::json::parse_error& e) {
        std::cerr << "config parse error: " << e.what() << "\n";
        return 2;
    }
    if (config.contains("experiment") &&
        config.at("experiment").get<std::string>() != name) {
        std::cerr << "config names experiment '" << config.at("experiment").get<std::string>()
                  << "' but the subcommand is '" << name << "'\n";
        return 2;
    }
    config["experiment"] = name;
    if (has_seed) config["master_seed"] = static_cast<std::uint64_t>(seed_override);

    const rwre::ExperimentResult result = rwre::run_experiment(config, threads);
    rwre::write_result(result, out_dir);
    std::cout << rwre::summary_text(result);
    return result.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rwre-lab: random walks in random environments, simulated and solved exactly"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    std::int64_t seed = 0;
    bool has_seed = false;
    int threads = 1;

    for (const std::string& name : rwre::experiment_names()) {
        CLI::App* sub = app.add_subcommand(name, "run the '" + name + "' suite");
        sub->add_option("--config", config_path, "experiment config (JSON)")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed, "override the config master seed")
            ->each([&has_seed](const std::string&) { has_seed = true; });
        sub->add_option("--threads", threads, "worker threads (must not change results)");
    }

    CLI11_PARSE(app, argc, argv);

    const std::string name = app.get_subcommands().front()->get_name();
    try {
        return run(name, config_path, out_dir, seed, has_seed, threads);
    } catch (const rwre::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const rwre::budget_error& e) {
        std::cerr << "budget error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
