// SPDX-License-Identifier: Apache-2.0
//
// pathfuse: robust fusion of ABG path-loss models
// Copyright (C) 2026 The pathfuse authors
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

// Published values checked at ten seeded trials, beyond the acceptance set.

#include <doctest.h>

#include <cmath>

#include "pathfuse/errors.hpp"
#include "pathfuse/evaluation.hpp"
#include "pathfuse/io.hpp"

using namespace pathfuse;

namespace {

const ExperimentResult& result(ExperimentKind which)
{
    static std::map<ExperimentKind, ExperimentResult> cache;
    auto it = cache.find(which);
    if (it == cache.end()) {
        ExperimentSpec spec;
        spec.which = which;
        it = cache.emplace(which, run_experiment(standard_registry(), spec)).first;
    }
    return it->second;
}

const EvaluationReport& row(ExperimentKind which, std::string_view scenario, std::string_view band,
                            std::string_view method, std::string_view column)
{
    for (const auto& r : result(which).rows)
        if (r.scenario == scenario && r.band == band && r.method == method && r.column == column) return r;
    throw Error(ErrorKind::Contract, "row not found");
}

double sigma(std::string_view scenario, std::string_view band, std::string_view method)
{
    return row(ExperimentKind::IntegrationStudy, scenario, band, method, "sigma").sigma;
}

}  // namespace

TEST_CASE("street-canyon low band: EWABG, WABG and pooled ABG")
{
    CHECK(sigma("UMiSC", "2-18", "EWABG") == doctest::Approx(4.80).epsilon(0.3 / 4.80));
    CHECK(sigma("UMiSC", "2-18", "WABG") == doctest::Approx(5.27).epsilon(0.3 / 5.27));
    CHECK(std::abs(sigma("UMiSC", "2-18", "Sun16") - 7.95) <= 0.3);
}

TEST_CASE("open-street wide band: EWABG and pooled ABG")
{
    CHECK(std::abs(sigma("UMiOS", "2-60", "EWABG") - 3.45) <= 0.3);
    CHECK(std::abs(sigma("UMiOS", "2-60", "Sun16") - 7.83) <= 0.3);
    CHECK(std::abs(sigma("UMiOS", "2-60", "WABG") - 3.9) <= 0.3);
}

TEST_CASE("street-canyon wide band: EWABG and WABG")
{
    CHECK(std::abs(sigma("UMiSC", "2-73.5", "EWABG") - 5.93) <= 0.3);
    CHECK(std::abs(sigma("UMiSC", "2-73.5", "WABG") - 6.02) <= 0.3);
}

TEST_CASE("second-order coefficients of the street-canyon low band")
{
    const auto& c = *row(ExperimentKind::IntegrationStudy, "UMiSC", "2-18", "EWABG", "sigma").coefficients;
    CHECK(c[0] > 0.0);
    CHECK(c[1] > 0.0);
    CHECK(c[2] < 0.0);
    CHECK(c[5] > 0.0);
    CHECK(std::abs(c[0] - 2.35) < 1.0);
    CHECK(std::abs(c[1] - 51.7) < 10.0);
    CHECK(std::abs(c[2] - (-4.8)) < 1.5);
    CHECK(std::abs(c[3] - 0.03) < 0.05);
    CHECK(std::abs(c[5] - 0.45) < 0.15);
}

TEST_CASE("RANSAC is second best with outliers")
{
    const auto& ransac = row(ExperimentKind::RobustStudy, "UMiSC", "2.9", "RANSAC", "sigma_with");
    CHECK(std::abs(ransac.sigma - 4.654) <= 0.15);
    for (const char* m : {"OLS", "Lasso", "Ridge", "ElasticNet"})
        CHECK(ransac.sigma < row(ExperimentKind::RobustStudy, "UMiSC", "2.9", m, "sigma_with").sigma);
}

TEST_CASE("contamination study: pooled ABG on the open-street high band")
{
    const auto& r = row(ExperimentKind::OutlierStudy, "UMiOS", "29-60", "Sun16", "50m");
    REQUIRE(r.error_ratio_percent.has_value());
    CHECK(*r.error_ratio_percent >= 40.0);
}

TEST_CASE("contamination study: macro-cell ratios stay small")
{
    for (const auto& r : result(ExperimentKind::OutlierStudy).rows) {
        if (r.scenario != "UMa") continue;
        INFO(r.band << " " << r.method << " " << r.column);
        CHECK(std::abs(r.error_ratio_percent.value_or(1e9)) < 2.0);
    }
}
