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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "pathfuse/errors.hpp"
#include "pathfuse/pipeline.hpp"
#include "pathfuse/rng.hpp"
#include "pathfuse/synthesis.hpp"

using namespace pathfuse;

namespace {

std::vector<PathLossSample> groups(int n1, int n2)
{
    std::vector<PathLossSample> s;
    for (int i = 0; i < n1; ++i) s.push_back({10.0 + i, 2.0, 80.0, "a"});
    for (int i = 0; i < n2; ++i) s.push_back({10.0 + i, 28.0, 90.0, "b"});
    return s;
}

std::vector<PathLossSample> planted(const CoefficientSet& c, int n_freq, int per_freq, double noise, std::uint64_t seed)
{
    auto rng = make_rng(seed, "pipeline-test");
    std::vector<PathLossSample> s;
    for (int j = 0; j < n_freq; ++j) {
        const double f = 2.0 * std::pow(1.9, j);
        for (int i = 0; i < per_freq; ++i) {
            const double d = 15.0 + 400.0 * uniform_open01(rng);
            s.push_back({d, f, predict(c, d, f) + noise * (uniform_open01(rng) - 0.5), "src" + std::to_string(j)});
        }
    }
    return s;
}

SourceCatalog unit_catalog(const std::vector<PathLossSample>& s)
{
    SourceCatalog cat;
    for (const auto& x : s) cat[x.source_id] = {1.0, 1};
    return cat;
}

PipelineConfig plain(ModelOrder order)
{
    PipelineConfig cfg;
    cfg.order = order;
    cfg.weighting = WeightingPolicy::Identity;
    cfg.robust.reset();
    cfg.gas_correction = false;
    return cfg;
}

}  // namespace

TEST_CASE("compute_weights")
{
    const auto s = groups(100, 400);
    SourceCatalog cat{{"a", {1.0, 1000}}, {"b", {2.0, 250}}};

    const auto id = compute_weights(s, cat, WeightingPolicy::Identity);
    CHECK(std::all_of(id.begin(), id.end(), [](double w) { return w == 1.0; }));

    const auto iv = compute_weights(s, cat, WeightingPolicy::InverseVariance);
    CHECK(iv.front() / iv.back() == doctest::Approx(1.0 / 0.25));

    const auto bc = compute_weights(s, cat, WeightingPolicy::BalanceCount);
    CHECK(100.0 * bc.front() == doctest::Approx(400.0 * bc.back()));

    const auto mx = compute_weights(s, cat, WeightingPolicy::Mixture);
    CHECK(mx.front() / mx.back() == doctest::Approx((1.0 / (100 * 1.0)) / (1.0 / (400 * 4.0))));

    const auto sp = compute_weights(s, cat, WeightingPolicy::SourcePoints);
    CHECK(sp.front() / sp.back() == doctest::Approx((1000.0 / 100) / (250.0 / 400)));

    for (const auto& w : {iv, bc, mx, sp})
        CHECK(std::accumulate(w.begin(), w.end(), 0.0) / w.size() == doctest::Approx(1.0));

    SourceCatalog missing{{"a", {1.0, 10}}};
    try {
        compute_weights(s, missing, WeightingPolicy::Mixture);
        FAIL("unknown source accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Data);
    }
}

TEST_CASE("policy names round trip")
{
    for (auto p : {WeightingPolicy::Identity, WeightingPolicy::InverseVariance, WeightingPolicy::BalanceCount,
                   WeightingPolicy::Mixture, WeightingPolicy::SourcePoints})
        CHECK(parse_weighting_policy(to_string(p)) == p);
    for (auto f : {FilterScope::PerSource, FilterScope::Pooled}) CHECK(parse_filter_scope(to_string(f)) == f);
    CHECK_THROWS_AS(parse_weighting_policy("median"), Error);
}

TEST_CASE("column bookkeeping")
{
    const std::vector<int> degrees{0, 0, 1, 0, 1, 2, 0, 1, 2, 3};
    for (std::size_t i = 0; i < 10; ++i) CHECK(frequency_degree(i) == degrees[i]);
    CHECK(identifiable_columns(ModelOrder::Second, 2) == std::vector<std::size_t>{0, 1, 2, 3, 4});
    CHECK(identifiable_columns(ModelOrder::Second, 5).size() == 6);
    CHECK(identifiable_columns(ModelOrder::Third, 1) == std::vector<std::size_t>{0, 1, 3, 6});
    CHECK(distance_only_columns(ModelOrder::First) == std::vector<std::size_t>{0, 1});
}

TEST_CASE("plain first-order fit equals the ABG least-squares fit")
{
    const auto s = planted(CoefficientSet::abg(3.0, 20.0, 2.2), 4, 40, 8.0, 1);
    const auto fit = fit_pathloss_model(s, unit_catalog(s), plain(ModelOrder::First));
    const auto sys = build_design_system(s, ModelOrder::First);
    const Eigen::VectorXd ols = solve_ols(sys.X, sys.y);
    for (int i = 0; i < 3; ++i) CHECK(fit.model.coefficients[i] == doctest::Approx(ols(i)).epsilon(1e-12));
    CHECK(fit.n_outliers == 0);
    CHECK(fit.survivors.size() == s.size());

    const auto wabg = fit_wabg(s, unit_catalog(s), WeightingPolicy::Identity);
    for (int i = 0; i < 3; ++i) CHECK(wabg.coefficients[i] == doctest::Approx(ols(i)).epsilon(1e-12));
    CHECK_FALSE(wabg.gas_corrected);
}

TEST_CASE("noiseless recovery at every order")
{
    const CoefficientSet c3(ModelOrder::Third, {2.5, 30.0, 1.5, 0.02, -0.01, 0.03, 0.0005, -0.0004, 0.0003, -0.0002});
    for (auto order : {ModelOrder::First, ModelOrder::Second, ModelOrder::Third}) {
        std::vector<double> v(c3.values().begin(), c3.values().begin() + parameter_count(order));
        const CoefficientSet c(order, v);
        const auto s = planted(c, 6, 20, 0.0, 2);
        const auto fit = fit_pathloss_model(s, unit_catalog(s), plain(order));
        for (std::size_t i = 0; i < c.size(); ++i)
            CHECK(fit.model.coefficients[i] == doctest::Approx(c[i]).epsilon(1e-9).scale(1.0));
        CHECK(fit.model.sigma_db < 1e-9);
    }
}

TEST_CASE("frequency terms a corpus cannot identify are fixed to zero")
{
    const CoefficientSet c(ModelOrder::Second, {2.5, 30.0, 1.5, 0.02, -0.01, 0.0});
    const auto s = planted(c, 2, 30, 0.0, 3);
    const auto fit = fit_pathloss_model(s, unit_catalog(s), plain(ModelOrder::Second));
    CHECK(fit.model.coefficients[5] == 0.0);
    for (std::size_t i = 0; i < 5; ++i) CHECK(fit.model.coefficients[i] == doctest::Approx(c[i]).epsilon(1e-9));

    auto strict = plain(ModelOrder::Second);
    strict.drop_unidentified_frequency_terms = false;
    CHECK_THROWS_AS(fit_pathloss_model(s, unit_catalog(s), strict), Error);
}

TEST_CASE("pinned gamma")
{
    const auto c = CoefficientSet::abg(3.9, 10.2, 2.0);
    const auto s = planted(c, 1, 50, 0.0, 4);
    auto cfg = plain(ModelOrder::First);
    cfg.pinned_gamma = 2.0;
    const auto fit = fit_pathloss_model(s, unit_catalog(s), cfg);
    CHECK(fit.model.coefficients[2] == 2.0);
    CHECK(fit.model.coefficients[0] == doctest::Approx(3.9).epsilon(1e-10));
    CHECK(fit.model.coefficients[1] == doctest::Approx(10.2).epsilon(1e-10));
}

TEST_CASE("robust filter removes gross outliers")
{
    const auto c = CoefficientSet::abg(3.0, 20.0, 2.2);
    auto s = planted(c, 4, 60, 2.0, 5);
    std::vector<bool> planted_out(s.size(), false);
    for (std::size_t i = 0; i < s.size(); i += 10) {
        s[i].path_loss_db += 60.0;
        planted_out[i] = true;
    }
    for (auto scope : {FilterScope::PerSource, FilterScope::Pooled}) {
        auto cfg = plain(ModelOrder::First);
        cfg.robust = regressor_config(RegressorKind::TheilSen);
        cfg.filter_scope = scope;
        const auto fit = fit_pathloss_model(s, unit_catalog(s), cfg);
        CHECK(fit.n_outliers >= 24);
        for (const auto& x : fit.survivors) CHECK(x.path_loss_db - predict(c, x.distance_m, x.frequency_ghz) < 30.0);
        CHECK(fit.model.coefficients[0] == doctest::Approx(3.0).epsilon(0.05));
    }
}

TEST_CASE("band selection, gas correction and metadata")
{
    const auto c = CoefficientSet::abg(3.0, 20.0, 2.2);
    const auto s = planted(c, 5, 30, 1.0, 6);
    auto cfg = plain(ModelOrder::First);
    cfg.freq_band = {1.0, 10.0};
    const auto fit = fit_pathloss_model(s, unit_catalog(s), cfg);
    CHECK(fit.n_in_band == 90);
    CHECK(fit.model.freq_range_ghz.lo == 2.0);
    CHECK(fit.model.freq_range_ghz.hi == doctest::Approx(7.22));
    CHECK(fit.model.provenance == std::vector<std::string>{"src0", "src1", "src2"});

    cfg.gas_correction = true;
    CHECK(fit_pathloss_model(s, unit_catalog(s), cfg).model.gas_corrected);

    cfg.freq_band = {90.0, 100.0};
    try {
        fit_pathloss_model(s, unit_catalog(s), cfg);
        FAIL("empty band accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InsufficientData);
    }
}

TEST_CASE("config validation")
{
    PipelineConfig cfg;
    cfg.outlier_threshold = 0.0;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = {};
    cfg.freq_band = {10.0, 1.0};
    CHECK_THROWS_AS(cfg.validate(), Error);
}
