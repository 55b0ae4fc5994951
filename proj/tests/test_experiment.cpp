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

#include <doctest.h>

#include <nlohmann/json.hpp>

#include "rwre/errors.hpp"
#include "rwre/experiment.hpp"

using namespace rwre;
using json = nlohmann::json;

namespace {

json velocity_config() {
    return json::parse(R"({
        "schema_version": 1,
        "experiment": "velocity",
        "master_seed": 42,
        "law": {"type": "two_point", "d": 2, "epsilon": 0.2, "lambda": 0.04},
        "budgets": {"n_steps": 500, "n_walks": 500}
    })");
}

}  // namespace

TEST_CASE("velocity suite runs and reports deterministically") {
    const ExperimentResult a = run_experiment(velocity_config(), 1);
    CHECK(a.pass);
    CHECK(a.csv.find("name,mean,stderr,n,config_hash") == 0);
    CHECK(a.csv.find(a.config_hash) != std::string::npos);
    CHECK(a.report.at("resolved_config").at("budgets").at("n_steps") == 500);

    const ExperimentResult b = run_experiment(velocity_config(), 1);
    CHECK(a.csv == b.csv);
    CHECK(a.report.dump(2) == b.report.dump(2));

    // thread count must not change a byte
    const ExperimentResult c = run_experiment(velocity_config(), 3);
    CHECK(a.csv == c.csv);
    CHECK(a.report.dump(2) == c.report.dump(2));
}

TEST_CASE("unknown fields are rejected with their name") {
    json config = velocity_config();
    config["budgets"]["n_wlaks"] = 5;
    CHECK_THROWS_WITH_AS(run_experiment(config, 1), doctest::Contains("n_wlaks"), config_error);

    json top = velocity_config();
    top["extra_section"] = 1;
    CHECK_THROWS_AS(run_experiment(top, 1), config_error);

    json noschema = velocity_config();
    noschema.erase("schema_version");
    CHECK_THROWS_AS(run_experiment(noschema, 1), config_error);
}

TEST_CASE("infeasible drift targets surface the ceiling in the error") {
    json config = velocity_config();
    config["law"]["lambda"] = 0.06;
    CHECK_THROWS_WITH_AS(run_experiment(config, 1), doctest::Contains("eps/(2d)"), config_error);
}

TEST_CASE("budget violations raise budget errors") {
    json config = json::parse(R"({
        "schema_version": 1,
        "experiment": "kalikow-verify",
        "master_seed": 7,
        "law": {"type": "two_point", "d": 2, "epsilon": 0.2, "lambda": 0.04},
        "geometry": {"square_side": 4},
        "budgets": {"enum_cap": 100}
    })");
    CHECK_THROWS_AS(run_experiment(config, 1), budget_error);
}

TEST_CASE("gambler and kalikow suites pass their hard assertions") {
    json gambler = json::parse(R"({
        "schema_version": 1,
        "experiment": "gambler",
        "master_seed": 1,
        "geometry": {"grid_max": 8}
    })");
    const ExperimentResult g = run_experiment(gambler, 1);
    CHECK(g.pass);

    json kalikow = json::parse(R"({
        "schema_version": 1,
        "experiment": "kalikow-verify",
        "master_seed": 5,
        "law": {"type": "two_point", "d": 2, "epsilon": 0.2, "lambda": 0.04}
    })");
    const ExperimentResult k = run_experiment(kalikow, 1);
    CHECK(k.pass);
    CHECK(k.report.at("results").at("n_configs") == 512);
    CHECK(k.report.at("results").at("max_error").get<double>() < 1e-9);
}

TEST_CASE("renorm audit suite runs at a reduced range") {
    json config = json::parse(R"({
        "schema_version": 1,
        "experiment": "renorm-audit",
        "master_seed": 2,
        "geometry": {"epsilon": 0.5, "k_max": 60, "xi_k_max": 10000},
        "constants": {"m0": 3000.0, "d": 3}
    })");
    const ExperimentResult r = run_experiment(config, 1);
    CHECK(r.pass);
    CHECK(r.report.at("results").at("K") == 1408);
}

TEST_CASE("explicit law configs are accepted") {
    json config = json::parse(R"({
        "schema_version": 1,
        "experiment": "velocity",
        "master_seed": 9,
        "law": {"type": "explicit", "d": 2, "epsilon": 0.1,
                "support": [{"prob": 1.0, "xi": [0.125, -0.125, 0.0, 0.0]}]},
        "budgets": {"n_steps": 200, "n_walks": 200}
    })");
    const ExperimentResult r = run_experiment(config, 1);
    CHECK(r.pass);
    CHECK(r.report.at("results").at("lambda").get<double>() == doctest::Approx(0.025));
}

TEST_CASE("experiment name must be known and match the config") {
    json config = velocity_config();
    config["experiment"] = "unknown-suite";
    CHECK_THROWS_AS(run_experiment(config, 1), config_error);
}
