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

#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "pathfuse/atmosphere.hpp"
#include "pathfuse/errors.hpp"
#include "pathfuse/rng.hpp"

using namespace pathfuse;

namespace {

const GasAttenuationTable& table() { return GasAttenuationTable::standard(); }

FittedModel corrected(const CoefficientSet& c)
{
    FittedModel m;
    m.coefficients = c;
    m.gas_corrected = true;
    return m;
}

}  // namespace

TEST_CASE("specific attenuation")
{
    const auto nodes = table().entries();
    REQUIRE(nodes.size() > 10);
    for (std::size_t i = 0; i < nodes.size(); i += 7)
        CHECK(table().specific_attenuation(nodes[i].frequency_ghz) == doctest::Approx(nodes[i].atten_db_per_km).epsilon(1e-12));
    CHECK(table().specific_attenuation(60.0) == doctest::Approx(15.0).epsilon(0.2));
    CHECK(table().specific_attenuation(60.0) > 10.0 * table().specific_attenuation(30.0));
    try {
        table().specific_attenuation(0.5);
        FAIL("0.5 GHz accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Range);
    }
}

TEST_CASE("attenuation curve peaks at the water and oxygen lines")
{
    std::vector<double> f, a;
    for (double x = 1.0; x <= 100.0; x += 0.5) {
        f.push_back(x);
        a.push_back(table().specific_attenuation(x));
    }
    bool water = false, oxygen = false;
    for (std::size_t i = 1; i + 1 < a.size(); ++i) {
        if (a[i] >= a[i - 1] && a[i] >= a[i + 1]) {
            water = water || (f[i] >= 21.5 && f[i] <= 23.0);
            oxygen = oxygen || (f[i] >= 57.0 && f[i] <= 63.0);
        }
    }
    CHECK(water);
    CHECK(oxygen);
}

TEST_CASE("gas_loss")
{
    for (double f : {2.0, 28.0, 60.0, 73.5})
        CHECK(table().gas_loss(1000.0, f) == doctest::Approx(table().specific_attenuation(f)).epsilon(1e-14));
    CHECK(table().gas_loss(1e-9, 60.0) < 1e-9);
    const double oracle = 0.2 * table().specific_attenuation(60.0);
    CHECK(table().gas_loss(200.0, 60.0) == doctest::Approx(oracle).epsilon(1e-14));
    CHECK(table().gas_loss(200.0, 60.0) == doctest::Approx(3.0).epsilon(0.2));
}

TEST_CASE("remove and restore gas loss")
{
    const std::vector<PathLossSample> one{{100.0, 2.0, 90.0, "a"}};
    const auto removed = remove_gas_loss(table(), one);
    CHECK(one[0].path_loss_db - removed[0].path_loss_db >= 0.0);
    CHECK(one[0].path_loss_db - removed[0].path_loss_db < 0.01);
    CHECK(remove_gas_loss(table(), std::vector<PathLossSample>{}).empty());

    auto rng = make_rng(3, "gas-test");
    std::vector<PathLossSample> s(2000);
    for (auto& x : s) x = {5.0 + 2000.0 * uniform_open01(rng), 1.0 + 99.0 * uniform_open01(rng), 60.0 + 80.0 * uniform_open01(rng), "b"};
    const auto r = remove_gas_loss(table(), s);
    const auto zero = corrected(CoefficientSet::zeros(ModelOrder::First));
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double g = restore_gas_loss(table(), zero, s[i].distance_m, s[i].frequency_ghz);
        CHECK(g == doctest::Approx(table().gas_loss(s[i].distance_m, s[i].frequency_ghz)).epsilon(1e-14));
        CHECK(std::abs(r[i].path_loss_db + g - s[i].path_loss_db) <= 1e-12);
    }

    CHECK(restore_gas_loss(table(), zero, 1000.0, 60.0) - restore_gas_loss(table(), zero, 1000.0, 35.0) >= 10.0);

    FittedModel plain;
    try {
        restore_gas_loss(table(), plain, 10.0, 10.0);
        FAIL("uncorrected model accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Contract);
    }
}

TEST_CASE("table validation")
{
    using E = GasAttenuationTable::Entry;
    CHECK_THROWS_AS(GasAttenuationTable({{1.0, 0.01}, {1.0, 0.02}, {100.0, 1.0}}), Error);
    CHECK_THROWS_AS(GasAttenuationTable({{1.0, 0.01}, {50.0, -1.0}, {100.0, 1.0}}), Error);
    CHECK_THROWS_AS(GasAttenuationTable({E{2.0, 0.01}, E{100.0, 1.0}}), Error);
    const GasAttenuationTable ok({{1.0, 0.01}, {100.0, 1.0}});
    // Linear in frequency, geometric in attenuation.
    CHECK(ok.specific_attenuation(10.0) == doctest::Approx(std::pow(10.0, -2.0 + 2.0 * 9.0 / 99.0)).epsilon(1e-12));
}
