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
#include <vector>

#include "pathfuse/errors.hpp"
#include "pathfuse/estimators.hpp"
#include "pathfuse/model.hpp"
#include "pathfuse/rng.hpp"

using namespace pathfuse;

namespace {

struct Planted {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
};

// First-order design over a (d, f) grid plus uniform noise of width `noise`.
Planted first_order(double alpha, double beta, double gamma, int n, double noise, std::uint64_t seed)
{
    auto rng = make_rng(seed, "estimator-test");
    Planted p{Eigen::MatrixXd(n, 3), Eigen::VectorXd(n)};
    for (int i = 0; i < n; ++i) {
        const double d = 10.0 + 990.0 * uniform_open01(rng);
        const double f = 1.0 + 79.0 * uniform_open01(rng);
        const auto row = design_row(ModelOrder::First, d, f);
        for (int j = 0; j < 3; ++j) p.X(i, j) = row[j];
        p.y(i) = alpha * row[0] + beta + gamma * row[2] + noise * (uniform_open01(rng) - 0.5);
    }
    return p;
}

double max_abs(const Eigen::VectorXd& v) { return v.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("solve_wls")
{
    const auto p = first_order(2.0, 30.0, 2.0, 20, 0.0, 1);
    const Eigen::VectorXd b = solve_wls(p.X, p.y, Eigen::VectorXd::Ones(20));
    CHECK(std::abs(b(0) - 2.0) <= 1e-9 * 2.0);
    CHECK(std::abs(b(1) - 30.0) <= 1e-9 * 30.0);
    CHECK(std::abs(b(2) - 2.0) <= 1e-9 * 2.0);

    const auto q = first_order(2.0, 30.0, 2.0, 40, 6.0, 2);
    const Eigen::VectorXd b1 = solve_wls(q.X, q.y, Eigen::VectorXd::Ones(40));
    const Eigen::VectorXd b5 = solve_wls(q.X, q.y, Eigen::VectorXd::Constant(40, 5.0));
    CHECK(max_abs(b1 - b5) <= 1e-12 * max_abs(b1));

    Eigen::MatrixXd X(2, 2);
    X << 1, 0, 1, 1;
    Eigen::VectorXd y(2);
    y << 1, 3;
    const Eigen::VectorXd hand = solve_ols(X, y);
    CHECK(hand(0) == doctest::Approx(1.0));
    CHECK(hand(1) == doctest::Approx(2.0));
}

TEST_CASE("solve_wls rejects singular systems")
{
    Eigen::MatrixXd X(4, 2);
    X << 1, 2, 2, 4, 3, 6, 4, 8;
    Eigen::VectorXd y = Eigen::VectorXd::LinSpaced(4, 1, 4);
    try {
        solve_ols(X, y);
        FAIL("collinear columns accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::SingularSystem);
    }
}

TEST_CASE("weighted solve matches the normal equations")
{
    const auto p = first_order(3.1, 12.0, 2.3, 60, 8.0, 3);
    auto rng = make_rng(3, "weights");
    Eigen::VectorXd w(60);
    for (auto& v : w) v = 0.1 + 5.0 * uniform_open01(rng);
    const Eigen::MatrixXd A = p.X.transpose() * w.asDiagonal() * p.X;
    const Eigen::VectorXd rhs = p.X.transpose() * w.asDiagonal() * p.y;
    const Eigen::VectorXd oracle = A.ldlt().solve(rhs);
    CHECK(max_abs(solve_wls(p.X, p.y, w) - oracle) <= 1e-9 * max_abs(oracle));
}

TEST_CASE("fit_ridge")
{
    const auto p = first_order(2.5, 40.0, 1.8, 50, 10.0, 4);
    CHECK(max_abs(fit_ridge(p.X, p.y, 0.0) - solve_wls(p.X, p.y, Eigen::VectorXd::Ones(50))) <= 1e-9 * 40.0);

    const Eigen::VectorXd big = fit_ridge(p.X, p.y, 1e12);
    CHECK(std::abs(big(0)) < 1e-6);
    CHECK(std::abs(big(2)) < 1e-6);
    CHECK(big(1) == doctest::Approx(p.y.mean()).epsilon(1e-6));

    Eigen::MatrixXd x(4, 1);
    x << 0.5, -0.5, 0.5, -0.5;
    Eigen::VectorXd y(4);
    y << 1.0, -2.0, 4.0, 3.0;
    const double xty = x.col(0).dot(y);
    CHECK(fit_ridge(x, y, 1.0)(0) == doctest::Approx(xty / 2.0).epsilon(1e-12));
}

TEST_CASE("fit_lasso")
{
    const auto p = first_order(2.5, 40.0, 1.8, 50, 10.0, 5);
    const Eigen::VectorXd ols = solve_ols(p.X, p.y);
    CHECK(max_abs(fit_lasso(p.X, p.y, 0.0) - ols) <= 1e-6 * max_abs(ols));

    // Orthonormal columns: soft-threshold of X^T y at lambda / 2.
    auto rng = make_rng(5, "orthonormal");
    Eigen::MatrixXd R(30, 3);
    for (auto& v : R.reshaped()) v = uniform_open01(rng) - 0.5;
    const Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(R).householderQ() * Eigen::MatrixXd::Identity(30, 3);
    Eigen::VectorXd y(30);
    for (auto& v : y) v = 4.0 * (uniform_open01(rng) - 0.5);
    const double lambda = 0.6;
    const Eigen::VectorXd z = Q.transpose() * y;
    const Eigen::VectorXd lasso = fit_lasso(Q, y, lambda);
    for (int j = 0; j < 3; ++j) {
        const double oracle = std::copysign(std::max(std::abs(z(j)) - lambda / 2.0, 0.0), z(j));
        CHECK(lasso(j) == doctest::Approx(oracle).epsilon(1e-8));
    }

    const Eigen::VectorXd huge = fit_lasso(p.X, p.y, 1e9);
    CHECK(huge(0) == 0.0);
    CHECK(huge(2) == 0.0);
}

TEST_CASE("fit_elasticnet endpoints")
{
    const auto p = first_order(2.5, 40.0, 1.8, 50, 10.0, 6);
    CHECK(max_abs(fit_elasticnet(p.X, p.y, 0.0, 0.3) - fit_ridge(p.X, p.y, 0.3)) <= 1e-6);
    CHECK(max_abs(fit_elasticnet(p.X, p.y, 1.0, 0.3) - fit_lasso(p.X, p.y, 0.3)) <= 1e-6);
    const Eigen::VectorXd ols = solve_ols(p.X, p.y);
    for (double l1 : {0.0, 0.4, 1.0}) CHECK(max_abs(fit_elasticnet(p.X, p.y, l1, 0.0) - ols) <= 1e-6 * max_abs(ols));
}

TEST_CASE("fit_ransac")
{
    auto clean = first_order(2.0, 30.0, 2.0, 80, 2.0, 7);
    auto cfg = regressor_config(RegressorKind::RANSAC);
    cfg.seed = 7;
    cfg.ransac_inlier_threshold = 3.0 * (2.0 / std::sqrt(12.0));
    const auto d = fit_ransac(clean.X, clean.y, cfg);
    CHECK(std::all_of(d.inlier_mask.begin(), d.inlier_mask.end(), [](bool b) { return b; }));
    CHECK(max_abs(d.coefficients - solve_ols(clean.X, clean.y)) <= 1e-9 * 30.0);

    // 20% gross outliers.
    std::vector<bool> truth(80, true);
    auto dirty = clean;
    for (int i = 0; i < 80; i += 5) {
        dirty.y(i) += 50.0;
        truth[i] = false;
    }
    cfg.ransac_inlier_threshold = 5.0;
    const auto r = fit_ransac(dirty.X, dirty.y, cfg);
    CHECK(r.inlier_mask == truth);
    Eigen::MatrixXd Xc(64, 3);
    Eigen::VectorXd yc(64);
    for (int i = 0, k = 0; i < 80; ++i)
        if (truth[i]) {
            Xc.row(k) = dirty.X.row(i);
            yc(k++) = dirty.y(i);
        }
    CHECK(max_abs(r.coefficients - solve_ols(Xc, yc)) <= 1e-8 * 30.0);

    const auto tiny = first_order(2.0, 30.0, 2.0, 3, 1.0, 8);
    try {
        fit_ransac(tiny.X, tiny.y, cfg);
        FAIL("n = p accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ConsensusFailure);
    }
}

TEST_CASE("fit_theilsen one-dimensional")
{
    Eigen::MatrixXd X(5, 2);
    X << 1, 1, 2, 1, 3, 1, 4, 1, 5, 1;
    Eigen::VectorXd y(5);
    y << 1, 2, 3, 4, 100;
    std::vector<double> slopes;
    for (int i = 0; i < 5; ++i)
        for (int j = i + 1; j < 5; ++j) slopes.push_back((y(j) - y(i)) / (X(j, 0) - X(i, 0)));
    std::sort(slopes.begin(), slopes.end());
    const double oracle = 0.5 * (slopes[4] + slopes[5]);
    const auto d = fit_theilsen(X, y, regressor_config(RegressorKind::TheilSen));
    CHECK(oracle == 1.0);
    CHECK(d.coefficients(0) == oracle);
    CHECK(d.coefficients(1) == 0.0);
    CHECK_FALSE(d.inlier_mask[4]);

    // Tied x: that pair has no slope.
    Eigen::MatrixXd Xt(4, 2);
    Xt << 1, 1, 1, 1, 2, 1, 3, 1;
    Eigen::VectorXd yt(4);
    yt << 1, 5, 2, 3;
    const auto t = fit_theilsen(Xt, yt, regressor_config(RegressorKind::TheilSen));
    CHECK(t.coefficients(0) == 1.0);
}

TEST_CASE("fit_theilsen exact plane")
{
    const auto p = first_order(3.3, 17.0, 2.2, 25, 0.0, 9);
    auto cfg = regressor_config(RegressorKind::TheilSen);
    cfg.theilsen_subsets = 500;
    const auto d = fit_theilsen(p.X, p.y, cfg);
    CHECK(d.coefficients(0) == doctest::Approx(3.3).epsilon(1e-9));
    CHECK(d.coefficients(1) == doctest::Approx(17.0).epsilon(1e-9));
    CHECK(d.coefficients(2) == doctest::Approx(2.2).epsilon(1e-9));
}

TEST_CASE("tune_penalty_kfold")
{
    const auto noisy = first_order(2.5, 40.0, 1.8, 60, 10.0, 10);
    auto cfg = regressor_config(RegressorKind::Ridge);
    cfg.kfold_k = 5;
    const std::vector<double> zero{0.0};
    CHECK(tune_penalty_kfold(noisy.X, noisy.y, RegressorKind::Ridge, zero, cfg).lambda == 0.0);

    const auto clean = first_order(2.5, 40.0, 1.8, 60, 0.0, 11);
    const std::vector<double> grid{0.0, 0.5, 1.0};
    for (auto kind : {RegressorKind::Ridge, RegressorKind::Lasso})
        CHECK(tune_penalty_kfold(clean.X, clean.y, kind, grid, cfg).lambda == 0.0);

    // Contaminated data: the choice is stable under re-seeding of the folds.
    auto dirty = first_order(2.5, 40.0, 1.8, 120, 10.0, 12);
    for (int i = 0; i < 120; i += 6) dirty.y(i) += 30.0;
    const auto g = default_penalty_grid();
    std::vector<long> picks;
    for (std::uint64_t s = 0; s < 10; ++s) {
        cfg.seed = s;
        const double lam = tune_penalty_kfold(dirty.X, dirty.y, RegressorKind::Ridge, g, cfg).lambda;
        picks.push_back(std::find(g.begin(), g.end(), lam) - g.begin());
    }
    long mode = picks[0], best = 0;
    for (long p : picks) {
        const auto c = std::count(picks.begin(), picks.end(), p);
        if (c > best) best = c, mode = p;
    }
    for (std::size_t s = 0; s < picks.size(); ++s) {
        INFO("seed " << s << " picked grid index " << picks[s] << ", mode " << mode);
        CHECK(std::abs(picks[s] - mode) <= 1);
    }
}

TEST_CASE("robust scale helpers")
{
    CHECK(median({3.0, 1.0, 2.0}) == 2.0);
    CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
    const std::vector<double> r{-1.0, 0.0, 1.0, 2.0, 100.0};
    CHECK(mad_scale(r) == doctest::Approx(1.4826));
}
