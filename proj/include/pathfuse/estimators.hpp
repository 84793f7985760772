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

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace pathfuse {

enum class RegressorKind { OLS, WLS, Ridge, Lasso, ElasticNet, RANSAC, TheilSen };

std::string_view to_string(RegressorKind kind);
RegressorKind parse_regressor_kind(std::string_view text);

struct RegressorConfig {
    RegressorKind kind = RegressorKind::OLS;
    double lambda = 0.0;   // Ridge / Lasso
    double lambda1 = 0.5;  // ElasticNet L1/L2 balance in [0, 1]
    double lambda2 = 0.0;  // ElasticNet overall penalty
    int ransac_iters = 1000;
    /// When unset: 2 x (1.4826 MAD) of a Theil-Sen prefit's residuals.
    std::optional<double> ransac_inlier_threshold;
    int theilsen_subsets = 10000;
    int kfold_k = 10;
    /// Tune lambda (or lambda1/lambda2) by k-fold CV before fitting.
    bool tune_penalty = false;
    std::uint64_t seed = 0;
    double tol = 1e-10;
    int max_iters = 100000;

    /// Throws Error(Config).
    void validate() const;
};

/// Default settings for `kind`.
inline RegressorConfig regressor_config(RegressorKind kind)
{
    RegressorConfig c;
    c.kind = kind;
    return c;
}

struct FitDiagnostics {
    Eigen::VectorXd coefficients;
    std::vector<bool> inlier_mask;  // all true unless the method rejects samples
    double residual_wsd = 0.0;      // RMS residual over the inliers
    double condition_estimate = 0.0;
    int iterations_used = 0;
    double lambda = 0.0;            // penalty actually used (after tuning)
    double lambda1 = 0.0;
};

/// Weighted least squares (X^T W X)^{-1} X^T W y through a QR factorisation of
/// the column-equilibrated, row-weighted system. Throws Error(SingularSystem)
/// naming the offending columns when the condition estimate exceeds
/// `max_condition`.
Eigen::VectorXd solve_wls(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& w,
                          double max_condition = 1e12);

Eigen::VectorXd solve_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

/// Condition number (2-norm) of diag(sqrt(w)) X after scaling columns to unit norm.
double condition_estimate(const Eigen::MatrixXd& X, const Eigen::VectorXd& w);

// Penalized fits minimise ||y - X b||^2 + penalty(b). A column of X that is
// constant and nonzero is treated as the intercept: it is left out of the
// penalty and the remaining columns are centred. Penalized columns are
// scaled to unit Euclidean norm before fitting and the coefficients are
// mapped back, so lambda is relative to unit-norm columns.

Eigen::VectorXd fit_ridge(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda);

/// Lasso, penalty lambda ||b||_1. Coordinate descent with an exact
/// active-set polish. Throws ConvergenceError after max_iters sweeps.
Eigen::VectorXd fit_lasso(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda,
                          double tol = 1e-10, int max_iters = 100000, int* iterations = nullptr);

/// Elastic net, penalty lambda1 lambda2 ||b||_1 + (1 - lambda1) lambda2 ||b||_2^2.
/// lambda1 = 0 is Ridge(lambda2); lambda1 = 1 is Lasso(lambda2).
Eigen::VectorXd fit_elasticnet(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda1, double lambda2,
                               double tol = 1e-10, int max_iters = 100000, int* iterations = nullptr);

/// RANSAC over minimal p-point subsets; the final coefficients are an OLS
/// refit on the largest consensus set. Throws Error(ConsensusFailure).
FitDiagnostics fit_ransac(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const RegressorConfig& cfg);

/// Theil-Sen. With two columns one of which is constant: exact median of all
/// pairwise slopes, intercept = median(y - slope x). Otherwise: coordinate-wise
/// median of exact solutions over elemental p-point subsets, exhaustive when
/// C(n, p) <= cfg.theilsen_subsets, else that many seeded random subsets.
/// The inlier mask flags |residual| <= 3 x (1.4826 MAD). Throws
/// Error(DegenerateData) when fewer than p + 1 nonsingular subsets exist.
FitDiagnostics fit_theilsen(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const RegressorConfig& cfg);

struct PenaltyChoice {
    double lambda = 0.0;   // Ridge/Lasso lambda, or ElasticNet lambda2
    double lambda1 = 0.0;  // ElasticNet only
    double cv_rmse = 0.0;
};

/// 0 followed by 21 log-spaced points in [1e-4, 1].
std::vector<double> default_penalty_grid();
/// ElasticNet balance grid {0, 0.25, 0.5, 0.75, 1}.
std::vector<double> default_l1_ratio_grid();

/// K-fold CV over the grid (mean held-out unweighted RMSE, ties to the
/// smallest penalty). For ElasticNet the grid is crossed with `l1_grid`.
PenaltyChoice tune_penalty_kfold(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, RegressorKind kind,
                                 std::span<const double> grid, const RegressorConfig& cfg,
                                 std::span<const double> l1_grid = {});

/// Dispatch on cfg.kind. OLS ignores w; WLS uses it.
FitDiagnostics fit_regressor(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& w,
                             const RegressorConfig& cfg);

/// Consistent Gaussian scale 1.4826 x median(|r - median(r)|).
double mad_scale(std::span<const double> residuals);

double median(std::vector<double> values);

}  // namespace pathfuse
