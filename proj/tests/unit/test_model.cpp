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
#include "pathfuse/model.hpp"

using namespace pathfuse;

namespace {

double L(double x) { return 10.0 * std::log10(x); }

// Rank by Gaussian elimination with partial pivoting.
int rank_of(std::vector<std::vector<double>> a, double tol = 1e-9)
{
    const std::size_t rows = a.size(), cols = a.front().size();
    int rank = 0;
    for (std::size_t c = 0, r = 0; c < cols && r < rows; ++c) {
        std::size_t piv = r;
        for (std::size_t i = r + 1; i < rows; ++i)
            if (std::abs(a[i][c]) > std::abs(a[piv][c])) piv = i;
        if (std::abs(a[piv][c]) < tol) continue;
        std::swap(a[piv], a[r]);
        for (std::size_t i = r + 1; i < rows; ++i) {
            const double m = a[i][c] / a[r][c];
            for (std::size_t k = c; k < cols; ++k) a[i][k] -= m * a[r][k];
        }
        ++r;
        ++rank;
    }
    return rank;
}

}  // namespace

TEST_CASE("predict_abg")
{
    const auto c = CoefficientSet::abg(3.5, 25.0, 2.0);
    const double oracle = 10.0 * 3.5 * std::log10(100.0) + 25.0 + 10.0 * 2.0 * std::log10(2.0);
    CHECK(predict_abg(c, 100.0, 2.0) == doctest::Approx(oracle).epsilon(1e-14));
    CHECK(predict_abg(c, 100.0, 2.0) == doctest::Approx(101.02).epsilon(5e-5));
    CHECK(predict_abg(c, 1.0, 1.0) == 25.0);
    CHECK(predict_abg(CoefficientSet::abg(0.0, 0.0, 2.0), 5.0, 10.0) == doctest::Approx(20.0));
}

TEST_CASE("predict_ewabg2")
{
    const CoefficientSet c(ModelOrder::Second, {2.35, 51.7, -4.8, 0.03, -0.01, 0.45});
    const double ld = L(100.0), lf = L(2.0);
    const double oracle = 2.35 * ld + 51.7 - 4.8 * lf + 0.03 * ld * ld - 0.01 * ld * lf + 0.45 * lf * lf;
    CHECK(predict_ewabg2(c, 100.0, 2.0) == doctest::Approx(oracle).epsilon(1e-14));
    CHECK(std::abs(predict_ewabg2(c, 100.0, 2.0) - 99.73) < 0.005);

    const auto abg = CoefficientSet::abg(2.1, 33.0, 2.4);
    for (double d : {3.0, 50.0, 900.0})
        for (double f : {0.9, 6.0, 73.5})
            CHECK(predict_ewabg2(abg.promoted(ModelOrder::Second), d, f) == predict_abg(abg, d, f));
    CHECK(predict_ewabg2(CoefficientSet::zeros(ModelOrder::Second), 7.0, 7.0) == 0.0);
}

TEST_CASE("predict_ewabg3")
{
    const CoefficientSet quad(ModelOrder::Second, {2.35, 51.7, -4.8, 0.03, -0.01, 0.45});
    CHECK(predict_ewabg3(quad.promoted(ModelOrder::Third), 100.0, 2.0) == predict_ewabg2(quad, 100.0, 2.0));

    std::vector<double> v(10, 0.0);
    v[6] = 1.0;
    CHECK(predict_ewabg3(CoefficientSet(ModelOrder::Third, v), 10.0, 1.0) == doctest::Approx(1000.0));
}

TEST_CASE("predict dispatches on order and validates input")
{
    const auto c = CoefficientSet::abg(2.0, 30.0, 2.0);
    CHECK(predict(c, 10.0, 3.0) == predict_abg(c, 10.0, 3.0));
    CHECK_THROWS_AS(predict(c, 0.0, 3.0), Error);
    CHECK_THROWS_AS(predict(c, 10.0, -1.0), Error);
    try {
        predict_ewabg2(c, 10.0, 3.0);
        FAIL("order mismatch accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Contract);
    }
}

TEST_CASE("coefficient set")
{
    CHECK_THROWS_AS(CoefficientSet(ModelOrder::Second, {1.0, 2.0, 3.0}), Error);
    const auto c = CoefficientSet::abg(1.0, 2.0, 3.0).promoted(ModelOrder::Third);
    REQUIRE(c.size() == 10);
    CHECK(c[0] == 1.0);
    CHECK(c[1] == 2.0);
    CHECK(c[2] == 3.0);
    for (std::size_t i = 3; i < 10; ++i) CHECK(c[i] == 0.0);
    CHECK(coefficient_name(ModelOrder::First, 0) == "alpha");
    CHECK(coefficient_name(ModelOrder::Second, 4) == "delta");
    CHECK(coefficient_name(ModelOrder::Third, 9) == "gamma3");
}

TEST_CASE("design_row")
{
    CHECK(design_row(ModelOrder::Second, 10.0, 10.0) == std::vector<double>{10, 1, 10, 100, 100, 100});
    CHECK(design_row(ModelOrder::First, 1.0, 1.0) == std::vector<double>{0, 1, 0});
    const auto r3 = design_row(ModelOrder::Third, 10.0, 1.0);
    REQUIRE(r3.size() == 10);
    CHECK(r3[6] == doctest::Approx(1000.0));
    for (std::size_t i : {2u, 4u, 5u, 7u, 8u, 9u}) CHECK(r3[i] == 0.0);
}

TEST_CASE("build_design_system")
{
    std::vector<PathLossSample> s3{{10, 2, 80, "a"}, {20, 3, 90, "a"}, {30, 4, 95, "a"}};
    const auto sys = build_design_system(s3, ModelOrder::First);
    CHECK(sys.X.rows() == 3);
    CHECK(sys.X.cols() == 3);
    CHECK(sys.y(1) == 90.0);

    std::vector<PathLossSample> s6{{10, 1, 0, "a"}, {20, 2, 0, "a"}, {35, 3.5, 0, "a"},
                                   {50, 7, 0, "a"}, {80, 11, 0, "a"}, {150, 30, 0, "a"}};
    const auto sys6 = build_design_system(s6, ModelOrder::Second);
    REQUIRE(sys6.X.rows() == 6);
    std::vector<std::vector<double>> rows;
    for (const auto& s : s6) rows.push_back(design_row(ModelOrder::Second, s.distance_m, s.frequency_ghz));
    CHECK(rank_of(rows) == 6);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) CHECK(sys6.X(i, j) == rows[i][j]);

    s6.pop_back();
    try {
        build_design_system(s6, ModelOrder::Second);
        FAIL("5 samples accepted for 6 parameters");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InsufficientData);
    }
}

TEST_CASE("source model ABG surface")
{
    SourceModel m;
    m.id = "x";
    m.frequency_ghz = 2.0;
    m.alpha = 3.5;
    m.beta_db = 25.0;
    m.gamma = 2.0;
    m.sigma_db = 7.6;
    m.dist_min_m = 19;
    m.dist_max_m = 272;
    CHECK(predict(m, 100.0) == doctest::Approx(101.0206).epsilon(1e-6));
    m.dist_min_m = 300;
    CHECK_THROWS_AS(m.validate(), Error);
}
