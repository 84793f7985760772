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
#include <vector>

#include "pathfuse/errors.hpp"
#include "pathfuse/evaluation.hpp"
#include "pathfuse/io.hpp"

using namespace pathfuse;

TEST_CASE("weighted_rms and weighted_std")
{
    const std::vector<double> zeros{0.0, 0.0, 0.0}, ones{1.0, 1.0, 1.0};
    CHECK(weighted_rms(zeros, ones) == 0.0);
    CHECK(weighted_rms(std::vector<double>{1.0, -1.0}, std::vector<double>{1.0, 1.0}) == 1.0);
    CHECK(weighted_rms(std::vector<double>{3.0, 0.0}, std::vector<double>{1.0, 3.0}) == std::sqrt(9.0 / 4.0));

    const auto c = CoefficientSet::abg(2.0, 30.0, 2.0);
    std::vector<PathLossSample> s{{10, 2, 0, "a"}, {100, 2, 0, "a"}};
    s[0].path_loss_db = predict(c, 10, 2) + 3.0;
    s[1].path_loss_db = predict(c, 100, 2);
    CHECK(weighted_std(c, s, std::vector<double>{1.0, 3.0}) == doctest::Approx(1.5).epsilon(1e-12));

    try {
        weighted_rms(std::vector<double>{}, std::vector<double>{});
        FAIL("empty input accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Metric);
    }
    CHECK_THROWS_AS(weighted_rms(std::vector<double>{1.0}, std::vector<double>{-1.0}), Error);
    CHECK_THROWS_AS(weighted_rms(std::vector<double>{1.0, 2.0}, std::vector<double>{0.0, 0.0}), Error);
    CHECK_THROWS_AS(weighted_rms(std::vector<double>{1.0, 2.0}, std::vector<double>{1.0}), Error);
}

TEST_CASE("weighted_std of a gas-corrected model restores the gas loss")
{
    FittedModel m;
    m.coefficients = CoefficientSet::abg(2.0, 30.0, 2.0);
    m.gas_corrected = true;
    const auto& gas = GasAttenuationTable::standard();
    std::vector<PathLossSample> s{{1000, 60, 0, "a"}, {500, 60, 0, "a"}};
    for (auto& x : s) x.path_loss_db = restore_gas_loss(gas, m, x.distance_m, x.frequency_ghz);
    const std::vector<double> w{1.0, 1.0};
    CHECK(weighted_std(m, s, w, &gas) < 1e-12);
    CHECK(weighted_std(m, s, w) > 5.0);
}

TEST_CASE("error_ratio")
{
    CHECK(error_ratio(7.0, 7.0) == 0.0);
    CHECK(error_ratio(8.94, 7.95) == doctest::Approx(100.0 * (8.94 - 7.95) / 7.95));
    CHECK(error_ratio(8.94, 7.95) == doctest::Approx(12.45).epsilon(1e-3));
    CHECK(error_ratio(4.0, 4.1) < 0.0);
    CHECK_THROWS_AS(error_ratio(1.0, 0.0), Error);
}

TEST_CASE("loocv")
{
    SourceModel m;
    m.scenario = Scenario::UMiSC;
    m.n_points = 50;
    m.dist_min_m = 20;
    m.dist_max_m = 200;
    m.alpha = 3.0;
    m.beta_db = 25.0;
    m.gamma = 2.0;
    m.sigma_db = 5.0;
    std::vector<SourceModel> models;
    for (double f : {2.0, 10.0, 30.0}) {
        m.id = "m" + format_double(f);
        m.frequency_ghz = f;
        models.push_back(m);
    }
    LoocvConfig cfg;
    cfg.method = wabg_method(WeightingPolicy::Identity);
    cfg.synthesis.noise_scale = 0.0;
    const auto r = loocv_detailed(models, cfg);
    CHECK(r.sigma < 1e-9);
    REQUIRE(r.folds.size() == 3);
    CHECK(r.folds[0].n_test == 181);

    CHECK_THROWS_AS(loocv(std::span(models).first(2), cfg), Error);
}

TEST_CASE("surface grids")
{
    std::vector<double> d, f;
    for (double x = 10; x <= 300; x += 10) d.push_back(x);
    for (double x = 1; x <= 80; x += 1) f.push_back(x);
    const auto plane = evaluate_surface("WABG", CoefficientSet::abg(3.0, 25.0, 2.0), d, f);
    CHECK(plane.path_loss_db.rows() == 30);
    CHECK(plane.path_loss_db.cols() == 80);
    CHECK(plane.path_loss_db(9, 1) == doctest::Approx(predict(CoefficientSet::abg(3.0, 25.0, 2.0), 100.0, 2.0)));
    CHECK(plane.max_second_difference < 1e-9);
    CHECK(plane.nonmonotone_f == 0);
    CHECK(plane.nonmonotone_d == 0);

    // Minimum of the frequency parabola at Lf = 10 (10 GHz).
    const CoefficientSet valley(ModelOrder::Second, {3.0, 25.0, -2.0, 0.0, 0.0, 0.1});
    const auto g = evaluate_surface("valley", valley, d, f);
    CHECK(g.nonmonotone_f == 30 * 9);
    CHECK(g.nonmonotone_f_1_18 == 30 * 9);
    CHECK(g.max_second_difference > 0.0);
}

TEST_CASE("methods")
{
    CHECK(pooled_abg_method().label == "Sun16");
    CHECK_FALSE(pooled_abg_method().pipeline.robust.has_value());
    CHECK(to_int(wabg_method().pipeline.order) == 1);
    CHECK(ewabg_method().pipeline.robust->kind == RegressorKind::TheilSen);
    CHECK(ewabg_method(ModelOrder::Third).label == "EWABG3");
}

TEST_CASE("experiment names and bands")
{
    for (auto k : {ExperimentKind::OrderStudy, ExperimentKind::RobustStudy, ExperimentKind::IntegrationStudy,
                   ExperimentKind::OutlierStudy})
        CHECK(parse_experiment_kind(to_string(k)) == k);
    CHECK(band_label({2.0, 18.0}) == "2-18");
    CHECK(band_label({28.5, 73.5}) == "28.5-73.5");
    CHECK(default_bands(Scenario::UMiOS).size() == 3);
    ExperimentSpec spec;
    spec.trials = 0;
    CHECK_THROWS_AS(spec.validate(), Error);
}

TEST_CASE("reference constants lookup")
{
    const auto& ref = ReferenceTable::standard();
    CHECK(ref.lookup("table4", "UMiSC", "2-18", "EWABG", "sigma_exp") == 4.80);
    CHECK(ref.lookup("table2", "UMiSC", "LOOCV", "EWABG2", "sigma") == 7.772);
    CHECK(ref.lookup("table3", "UMiSC", "2.9", "TheilSen", "sigma_with") == 3.902);
    CHECK_FALSE(ref.lookup("table4", "UMiSC", "1-2", "EWABG", "sigma_exp").has_value());
    CHECK(ref.entries().size() > 50);
}

TEST_CASE("registry selection")
{
    const auto& reg = standard_registry();
    CHECK(select_models(reg, Scenario::UMiSC, {2.0, 18.0}).size() == 3);
    CHECK(select_models(reg, Scenario::UMiOS, {29.0, 60.0}).size() == 2);
    CHECK(select_models(reg, Scenario::UMa, {28.5, 73.5}).size() == 4);
    CHECK(select_models(reg, Scenario::UMiOS, {90.0, 100.0}).empty());
}
