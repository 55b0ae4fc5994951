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

#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace rwre {

// Experiment runner: validates a config document against a versioned schema
// (unknown fields are errors), executes the named suite and emits a JSON
// report plus a plot-ready CSV. Identical configs reproduce identical bytes,
// and the thread count never changes results.

inline const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names = {
        "velocity",       "kalikow-verify", "phat-identity", "gambler",      "polynomial-probe",
        "tgamma",         "expansion",      "renorm-audit",  "box-classify", "green-scaling"};
    return names;
}

struct ExperimentResult {
    std::string experiment;
    std::string config_hash;
    nlohmann::ordered_json report;
    std::string csv;
    bool pass = true;  // all hard assertions
};

ExperimentResult run_experiment(const nlohmann::json& config, int threads);

// Writes <out_dir>/<experiment>.json and <out_dir>/<experiment>.csv.
void write_result(const ExperimentResult& result, const std::string& out_dir);

std::string summary_text(const ExperimentResult& result);

}  // namespace rwre
